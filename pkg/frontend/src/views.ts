/**
 * HTML builders. Pure string-in string-out so they are testable without
 * an app instance; the App wires events onto the produced DOM.
 *
 * Body rendering: each root annotation tree nests cleanly (the server
 * guarantees children nest and siblings never partially overlap), but
 * two root trees may cover overlapping text, as when one article yields
 * two readings. Roots are therefore packed into lanes of pairwise
 * disjoint trees and each lane renders the full text as its own flow;
 * most documents need exactly one.
 */

import { termBorder, termColor } from "./colors.js";
import { byId, rootIds } from "./model.js";
import type {
  AnnotationData, ConsistencyResult, DocumentData, DocumentSummary,
  FormalizationReport, FormulaEntry, Limits, PerFormulaResult, QueryReport,
  TestReport, VocabularyReport,
} from "./types.js";

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

type Span = [number, number];

function disjoint(a: Span, b: Span): boolean {
  return a[1] <= b[0] || b[1] <= a[0];
}

export function planLanes(doc: DocumentData): string[][] {
  const map = byId(doc);
  const roots = rootIds(doc).sort((x, y) => {
    const sx = map.get(x)!.span;
    const sy = map.get(y)!.span;
    return sx[0] - sy[0] || sx[1] - sy[1];
  });
  const lanes: { ids: string[]; spans: Span[] }[] = [];
  for (const id of roots) {
    const span = map.get(id)!.span;
    const lane = lanes.find(l => l.spans.every(s => disjoint(span, s)));
    if (lane) {
      lane.ids.push(id);
      lane.spans.push(span);
    } else {
      lanes.push({ ids: [id], spans: [span] });
    }
  }
  if (lanes.length === 0) return [[]];
  return lanes.map(l => l.ids);
}

function textSegment(body: string, from: number, to: number): string {
  if (from >= to) return "";
  return `<span class="txt" data-from="${from}">${esc(body.slice(from, to))}</span>`;
}

function termLabel(a: AnnotationData): string {
  const args = a.args ?? [];
  return args.length > 0 ? `${a.name}(${args.join(", ")})` : a.name ?? "";
}

function renderRange(body: string, map: Map<string, AnnotationData>,
                     from: number, to: number, ids: string[]): string {
  let out = "";
  let cur = from;
  for (const id of ids) {
    const a = map.get(id)!;
    out += textSegment(body, cur, a.span[0]);
    out += renderAnnotation(body, map, a);
    cur = a.span[1];
  }
  out += textSegment(body, cur, to);
  return out;
}

function renderAnnotation(body: string, map: Map<string, AnnotationData>,
                          a: AnnotationData): string {
  const inner = renderRange(body, map, a.span[0], a.span[1], a.children ?? []);
  if (a.kind === "term") {
    const label = termLabel(a);
    const style = `background:${termColor(a.name ?? "")};` +
      `border-bottom:2px solid ${termBorder(a.name ?? "")}`;
    return `<span class="ann term" data-ann="${esc(a.id)}" data-name="${esc(a.name ?? "")}"` +
      ` title="${esc(label)}" style="${style}">${inner}</span>`;
  }
  const cls = a.kind === "goal" ? "goal" : "composite";
  const chip = a.kind === "goal" ? "Goal" : a.connective ?? "";
  const conn = a.kind === "composite" ? ` data-connective="${esc(a.connective ?? "")}"` : "";
  return `<span class="ann ${cls}" data-ann="${esc(a.id)}"${conn}>` +
    `<span class="chip">${esc(chip)}</span>${inner}</span>`;
}

export function renderBody(doc: DocumentData): string {
  const map = byId(doc);
  const lanes = planLanes(doc);
  return lanes
    .map((ids, i) => {
      const head = lanes.length > 1 ? `<div class="lane-label">reading ${i + 1}</div>` : "";
      return `${head}<div class="flow" data-lane="${i}">` +
        renderRange(doc.body, map, 0, doc.body.length, ids) + "</div>";
    })
    .join("");
}

// ---------------------------
// Verdicts and result panel
// ---------------------------

const BADGE_TONE: Record<string, string> = {
  Valid: "good", Consistent: "good", Independent: "good",
  CounterSatisfiable: "warn", Dependent: "warn",
  Inconsistent: "bad",
  Unknown: "mute",
};

export function verdictBadge(verdict: string): string {
  const tone = BADGE_TONE[verdict] ?? "mute";
  return `<span class="badge badge-${tone}" data-verdict="${esc(verdict)}">${esc(verdict)}</span>`;
}

const LIMIT_FOR_REASON: Record<string, keyof Limits> = {
  "depth-exhausted": "maxDepth",
  "time-exhausted": "timeBudgetMs",
  "grounding-too-large": "maxGroundAtoms",
};

function unknownNote(reason: string | undefined, limits: Limits): string {
  if (!reason) return "";
  const key = LIMIT_FOR_REASON[reason];
  const at = key ? ` at ${key} = ${limits[key]}` : "";
  return `<span class="reason">${esc(reason)}${at}</span>`;
}

function evidence(label: string, payload: unknown): string {
  if (payload === null || payload === undefined) return "";
  let note = label;
  if (label === "certificate") {
    const steps = (payload as { steps?: unknown[] }).steps;
    if (Array.isArray(steps)) note = `certificate (${steps.length} steps)`;
  } else {
    const worlds = (payload as { worlds?: unknown[] }).worlds;
    if (Array.isArray(worlds)) note = `countermodel (${worlds.length} worlds)`;
  }
  return `<details class="evidence" data-evidence="${esc(label)}"><summary>${esc(note)}</summary>` +
    `<pre>${esc(JSON.stringify(payload, null, 1))}</pre></details>`;
}

export function renderConsistencyResult(r: ConsistencyResult): string {
  return `<div class="result" data-action="consistency">` +
    verdictBadge(r.status) +
    `<span class="elapsed">${r.elapsedMs} ms</span>` +
    unknownNote(r.reason, r.limitsUsed) +
    evidence("certificate", r.certificate) +
    evidence("model", r.model) +
    "</div>";
}

export function renderIndependenceResult(consistency: ConsistencyResult,
                                         per: Record<string, PerFormulaResult>): string {
  const rows = Object.entries(per)
    .map(([name, p]) =>
      `<tr data-formula="${esc(name)}"><td>${esc(name)}</td><td>${verdictBadge(p.status)}</td>` +
      `<td>${evidence("certificate", p.certificate)}${evidence("model", p.model)}</td></tr>`)
    .join("");
  return `<div class="result" data-action="independence">` +
    `<div>theory ${verdictBadge(consistency.status)}</div>` +
    `<table class="per-formula"><tbody>${rows}</tbody></table></div>`;
}

export function renderQueryResult(r: QueryReport): string {
  const hint = r.verdict === "CounterSatisfiable"
    ? `<a href="#" class="vocab-hint" data-goto-tab="vocabulary">` +
      "countermodel found: check the vocabulary for conditions the query never satisfies</a>"
    : "";
  return `<div class="result" data-action="query" data-query="${esc(r.queryId)}">` +
    `<span class="who">${esc(r.queryId)} against ${esc(r.legislationId)}:</span>` +
    verdictBadge(r.verdict) +
    `<span class="elapsed">${r.elapsedMs} ms</span>` +
    unknownNote(r.reason, r.limitsUsed) +
    evidence("certificate", r.certificate) +
    evidence("model", r.model) +
    hint +
    "</div>";
}

// ---------------------------
// Tabs
// ---------------------------

export function renderVocabulary(report: VocabularyReport): string {
  if (report.terms.length === 0) return `<p class="empty">no terms yet</p>`;
  const rows = report.terms
    .map(t => {
      const swatch = `<span class="swatch" style="background:${termColor(t.name)}"></span>`;
      const arity = t.conflict
        ? `<span class="conflict" title="used with arities ${t.arities.join(", ")}">conflict</span>`
        : String(t.arity);
      const occ = t.occurrences
        .map(o => `<a href="#" class="occurrence" data-doc="${esc(o.documentId)}"` +
          ` data-from="${o.span[0]}" data-to="${o.span[1]}">${esc(o.documentId)}` +
          `:${o.span[0]}-${o.span[1]}</a>`)
        .join(" ");
      return `<tr data-term="${esc(t.name)}"><td>${swatch}<code>${esc(t.name)}</code></td>` +
        `<td>${arity}</td><td>${occ}</td></tr>`;
    })
    .join("");
  return `<table class="vocab"><thead><tr><th>term</th><th>arity</th><th>occurrences</th></tr>` +
    `</thead><tbody>${rows}</tbody></table>`;
}

export function renderFormalization(report: FormalizationReport,
                                    per?: Record<string, PerFormulaResult>): string {
  const items = report.formulas
    .map((f: FormulaEntry) => {
      const status = per?.[f.name] ? verdictBadge(per[f.name]!.status) : "";
      return `<li data-formula="${esc(f.name)}"><span class="fname">${esc(f.name)}</span>` +
        `${status}<code class="formula">${esc(f.formula)}</code></li>`;
    })
    .join("");
  const goal = report.goal === null
    ? ""
    : `<div class="goal-line">goal: <code class="formula">${esc(report.goal)}</code></div>`;
  if (report.formulas.length === 0 && report.goal === null) {
    return `<p class="empty">nothing compiles yet: annotate the text first</p>`;
  }
  return `<ol class="formulas">${items}</ol>${goal}`;
}

export function renderQueries(current: DocumentData, all: DocumentSummary[],
                              tests?: TestReport): string {
  const queries = all.filter(s => s.kind === "query");
  if (current.kind === "query") {
    const legs = all.filter(s => s.kind === "legislation");
    const opts = legs
      .map(l => `<option value="${esc(l.id)}">${esc(l.title)}</option>`)
      .join("");
    return `<div class="exec-row">run this query against ` +
      `<select id="leg-select">${opts}</select> ` +
      `<button id="exec-btn" class="analysis" data-analysis="query">Execute query</button></div>`;
  }
  const byName = new Map((tests?.tests ?? []).map(t => [t.name, t]));
  const rows = queries
    .map(q => {
      const isTest = q.title.startsWith("Test ");
      const line = byName.get(q.title);
      const chip = !isTest
        ? ""
        : line
          ? `<span class="chip-test ${line.passed ? "pass" : "fail"}" data-test="${esc(q.title)}">` +
            `${line.passed ? "pass" : "fail"}</span>`
          : `<span class="chip-test idle" data-test="${esc(q.title)}">test</span>`;
      return `<tr data-query="${esc(q.id)}"><td>${esc(q.title)}</td><td>${chip}</td>` +
        `<td><button class="run-query" data-query="${esc(q.id)}">&#9654; run</button></td></tr>`;
    })
    .join("");
  const suite = queries.some(q => q.title.startsWith("Test "))
    ? `<button id="run-tests" class="analysis">Run test suite</button>`
    : "";
  const summary = tests
    ? `<div class="suite-summary" data-passed="${tests.passed}" data-failed="${tests.failed}">` +
      `${tests.passed}/${tests.total} passed</div>`
    : "";
  if (queries.length === 0) return `<p class="empty">no query documents</p>`;
  return `<table class="queries"><tbody>${rows}</tbody></table>${suite}${summary}`;
}

export function renderDocumentOptions(all: DocumentSummary[], currentId: string | null): string {
  return all
    .map(s => `<option value="${esc(s.id)}"${s.id === currentId ? " selected" : ""}>` +
      `${esc(s.title)} (${esc(s.kind)})</option>`)
    .join("");
}
