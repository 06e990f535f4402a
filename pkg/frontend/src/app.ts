/**
 * The editor application. Owns the DOM, delegates every document edit to
 * the pure state module and every verdict to the gateway: nothing in
 * here decides logic, it only displays what the server said.
 */

import { Gateway, GatewayError } from "./gateway.js";
import { AnnotationError, removeAnnotation } from "./model.js";
import { parseTermInput } from "./naming.js";
import {
  annotateSelection, clearSelection, EditorState, markSaved, openState,
  replaceDocument, setSelection, suggestName,
} from "./state.js";
import type {
  Connective, DocumentSummary, FormalizationReport, IndependenceReport,
  TestReport, VocabularyReport,
} from "./types.js";
import {
  esc, renderBody, renderConsistencyResult, renderDocumentOptions,
  renderFormalization, renderIndependenceResult, renderQueries,
  renderQueryResult, renderVocabulary,
} from "./views.js";

type TabName = "vocabulary" | "formalization" | "queries";

const KIND_OPTIONS: { value: string; label: string }[] = [
  { value: "term", label: "Term" },
  { value: "Not", label: "Not" },
  { value: "And", label: "And" },
  { value: "Or", label: "Or" },
  { value: "Implies", label: "Implies" },
  { value: "Id", label: "Id" },
  { value: "Ob", label: "Ob" },
  { value: "Pm", label: "Pm" },
  { value: "Fb", label: "Fb" },
  { value: "CondOb", label: "CondOb" },
  { value: "CondPm", label: "CondPm" },
  { value: "CondFb", label: "CondFb" },
];

export class App {
  private root: HTMLElement;
  private gw: Gateway;
  private st: EditorState | null = null;
  private summaries: DocumentSummary[] = [];
  private activeTab: TabName = "vocabulary";
  private selectedAnnotation: string | null = null;

  private vocab: VocabularyReport | null = null;
  private formal: FormalizationReport | null = null;
  private lastIndependence: IndependenceReport | null = null;
  private lastTests: TestReport | null = null;
  private resultHtml = "";
  private running = false;

  /** Stale-save prompt, swappable in tests. True = overwrite server copy. */
  confirmStale: (message: string) => boolean = m => window.confirm(m);

  constructor(root: HTMLElement, gw: Gateway) {
    this.root = root;
    this.gw = gw;
    this.mountSkeleton();
    this.wireEvents();
  }

  async start(initialId?: string): Promise<void> {
    await this.refreshListing();
    const id = initialId ?? this.summaries[0]?.id;
    if (id) await this.load(id);
  }

  get state(): EditorState | null {
    return this.st;
  }

  // ---------------------------
  // Skeleton and event wiring
  // ---------------------------

  private mountSkeleton(): void {
    const kinds = KIND_OPTIONS
      .map(k => `<option value="${k.value}">${k.label}</option>`)
      .join("");
    this.root.innerHTML = `
      <header id="topbar">
        <span class="brand">normkit editor</span>
        <select id="doc-select"></select>
        <button id="save-btn">Save</button>
        <span id="status-chip"></span>
      </header>
      <div id="banner"></div>
      <main id="main">
        <section id="editor">
          <div id="annotate-bar">
            <select id="kind-select">${kinds}</select>
            <input id="name-input" placeholder="term name" spellcheck="false">
            <button id="annotate-btn">Annotate selection</button>
            <button id="goal-btn">Mark goal</button>
            <button id="delete-btn" disabled>Delete annotation</button>
          </div>
          <div id="body-pane"></div>
        </section>
        <aside id="side">
          <nav id="tabs">
            <button class="tab-btn" data-tab="vocabulary">Vocabulary</button>
            <button class="tab-btn" data-tab="formalization">Formalization</button>
            <button class="tab-btn" data-tab="queries">Queries</button>
          </nav>
          <div id="tab-pane"></div>
        </aside>
      </main>
      <footer id="actions">
        <button class="analysis" data-analysis="consistency">Check consistency</button>
        <button class="analysis" data-analysis="independence">Check independence</button>
        <button class="analysis" data-analysis="query" id="footer-exec">Execute query</button>
        <div id="result-pane"></div>
      </footer>`;
  }

  private el<T extends HTMLElement>(selector: string): T {
    return this.root.querySelector(selector) as T;
  }

  private wireEvents(): void {
    this.el("#doc-select").addEventListener("change", () => {
      const id = (this.el("#doc-select") as HTMLSelectElement).value;
      void this.load(id);
    });
    this.el("#save-btn").addEventListener("click", () => void this.save());
    this.el("#annotate-btn").addEventListener("click", () => this.onAnnotate());
    this.el("#goal-btn").addEventListener("click", () => this.onMarkGoal());
    this.el("#delete-btn").addEventListener("click", () => this.onDelete());
    this.el("#body-pane").addEventListener("mouseup", () => this.onMouseUp());

    // one delegated click handler for everything rendered from strings
    this.root.addEventListener("click", e => {
      const target = e.target as HTMLElement;
      const tab = target.closest<HTMLElement>(".tab-btn");
      if (tab) {
        this.activeTab = tab.dataset["tab"] as TabName;
        this.renderTabs();
        return;
      }
      const goto = target.closest<HTMLElement>("[data-goto-tab]");
      if (goto) {
        e.preventDefault();
        this.activeTab = goto.dataset["gotoTab"] as TabName;
        this.renderTabs();
        return;
      }
      const occ = target.closest<HTMLElement>(".occurrence");
      if (occ) {
        e.preventDefault();
        void this.jumpTo(occ.dataset["doc"]!,
                         Number(occ.dataset["from"]), Number(occ.dataset["to"]));
        return;
      }
      const run = target.closest<HTMLElement>(".run-query");
      if (run) {
        void this.runQuery(run.dataset["query"]!, this.st!.doc.id);
        return;
      }
      if (target.closest("#run-tests")) {
        void this.runTests();
        return;
      }
      if (target.closest("#exec-btn") || target.closest("#footer-exec")) {
        void this.runQueryFromCurrent();
        return;
      }
      const analysis = target.closest<HTMLElement>(".analysis[data-analysis]");
      if (analysis && analysis.dataset["analysis"] !== "query") {
        void this.runAnalysis(analysis.dataset["analysis"] as "consistency" | "independence");
        return;
      }
      const ann = target.closest<HTMLElement>(".ann");
      if (ann && this.el("#body-pane").contains(ann)) {
        this.selectedAnnotation = ann.dataset["ann"] ?? null;
        this.renderEditor();
      }
    });
  }

  // ---------------------------
  // Loading and saving
  // ---------------------------

  private async refreshListing(): Promise<void> {
    this.summaries = await this.gw.listDocuments();
    this.el<HTMLSelectElement>("#doc-select").innerHTML =
      renderDocumentOptions(this.summaries, this.st?.doc.id ?? null);
  }

  async load(id: string): Promise<void> {
    try {
      const stored = await this.gw.getDocument(id);
      this.st = openState(stored);
      this.selectedAnnotation = null;
      this.lastIndependence = null;
      this.lastTests = null;
      this.resultHtml = "";
      this.el<HTMLSelectElement>("#doc-select").value = id;
      this.render();
      await this.refreshTabs();
    } catch (e) {
      this.showError(e, () => void this.load(id));
    }
  }

  /** Push local edits. Resolves true when the document is clean. */
  async save(): Promise<boolean> {
    if (!this.st) return false;
    if (!this.st.dirty) return true;
    try {
      const stored = await this.gw.saveDocument(this.st.doc, this.st.revision);
      this.st = markSaved(this.st, stored);
      this.render();
      await this.refreshTabs();
      await this.refreshListing();
      return true;
    } catch (e) {
      if (e instanceof GatewayError && e.code === "stale_revision") {
        return this.resolveStaleSave();
      }
      this.showError(e, () => void this.save());
      return false;
    }
  }

  private async resolveStaleSave(): Promise<boolean> {
    const st = this.st!;
    const overwrite = this.confirmStale(
      "The document changed on the server while you were editing. " +
      "Overwrite the server copy with yours?");
    const fresh = await this.gw.getDocument(st.doc.id);
    if (!overwrite) {
      this.st = openState(fresh);
      this.render();
      await this.refreshTabs();
      return false;
    }
    const stored = await this.gw.saveDocument(st.doc, fresh.revision);
    this.st = markSaved(st, stored);
    this.render();
    await this.refreshTabs();
    return true;
  }

  // ---------------------------
  // Annotation flow
  // ---------------------------

  /** Programmatic selection, also the target of the mouseup mapping. */
  setSelectionRange(from: number, to: number): void {
    if (!this.st) return;
    this.st = setSelection(this.st, from, to);
    if (this.st.selection) {
      try {
        this.el<HTMLInputElement>("#name-input").value = suggestName(this.st);
      } catch {
        this.el<HTMLInputElement>("#name-input").value = "";
      }
    }
    this.renderStatus();
  }

  private onMouseUp(): void {
    const offsets = this.domSelectionOffsets();
    if (offsets) this.setSelectionRange(offsets[0], offsets[1]);
  }

  private domSelectionOffsets(): [number, number] | null {
    const sel = window.getSelection ? window.getSelection() : null;
    if (!sel || sel.rangeCount === 0 || sel.isCollapsed) return null;
    const range = sel.getRangeAt(0);
    const a = this.offsetAt(range.startContainer, range.startOffset);
    const b = this.offsetAt(range.endContainer, range.endOffset);
    if (a === null || b === null || a === b) return null;
    return a < b ? [a, b] : [b, a];
  }

  private offsetAt(node: Node, offset: number): number | null {
    const el = node.nodeType === Node.TEXT_NODE ? node.parentElement : node as HTMLElement;
    const seg = el?.closest<HTMLElement>(".txt");
    if (!seg) return null;
    return Number(seg.dataset["from"]) + offset;
  }

  private onAnnotate(): void {
    if (!this.st) return;
    const kind = this.el<HTMLSelectElement>("#kind-select").value;
    try {
      if (kind === "term") {
        const raw = this.el<HTMLInputElement>("#name-input").value;
        const parsed = raw.trim() === "" ? { name: "", args: [] } : parseTermInput(raw);
        if (!parsed) {
          throw new AnnotationError(
            "name_error", `'${raw}' is not a term: use name or name(X, c)`);
        }
        this.st = annotateSelection(this.st, {
          kind: "term",
          name: parsed.name || undefined,
          args: parsed.args,
        });
      } else {
        this.st = annotateSelection(this.st, {
          kind: "composite",
          connective: kind as Connective,
        });
      }
      this.clearBanner();
      this.render();
    } catch (e) {
      this.showError(e);
    }
  }

  private onMarkGoal(): void {
    if (!this.st) return;
    try {
      this.st = annotateSelection(this.st, { kind: "goal" });
      this.clearBanner();
      this.render();
    } catch (e) {
      this.showError(e);
    }
  }

  private onDelete(): void {
    if (!this.st || !this.selectedAnnotation) return;
    try {
      this.st = replaceDocument(this.st, removeAnnotation(this.st.doc, this.selectedAnnotation));
      this.selectedAnnotation = null;
      this.render();
    } catch (e) {
      this.showError(e);
    }
  }

  // ---------------------------
  // Analysis actions
  // ---------------------------

  private async runAnalysis(action: "consistency" | "independence"): Promise<void> {
    if (!this.st || this.running) return;
    if (!(await this.save())) return;       // always analyze what the server has
    const id = this.st.doc.id;
    this.setRunning(true);
    try {
      if (action === "consistency") {
        const report = await this.gw.consistency(id);
        this.resultHtml = renderConsistencyResult(report.consistency);
      } else {
        const report = await this.gw.independence(id);
        this.lastIndependence = report;
        this.resultHtml = renderIndependenceResult(report.consistency, report.perFormula);
      }
      this.clearBanner();
    } catch (e) {
      this.showError(e, () => void this.runAnalysis(action));
    } finally {
      this.setRunning(false);
      this.renderResult();
      this.renderTabs();
    }
  }

  private async runQueryFromCurrent(): Promise<void> {
    if (!this.st) return;
    if (this.st.doc.kind === "query") {
      const sel = this.root.querySelector<HTMLSelectElement>("#leg-select");
      const leg = sel?.value ?? this.summaries.find(s => s.kind === "legislation")?.id;
      if (!leg) {
        this.showError(new GatewayError(0, "no_legislation", "no legislation document to run against"));
        return;
      }
      await this.runQuery(this.st.doc.id, leg);
    } else {
      const query = this.summaries.find(s => s.kind === "query");
      if (!query) {
        this.showError(new GatewayError(0, "no_query", "no query document to execute"));
        return;
      }
      await this.runQuery(query.id, this.st.doc.id);
    }
  }

  private async runQuery(queryId: string, legislationId: string): Promise<void> {
    if (this.running) return;
    if (!(await this.save())) return;
    this.setRunning(true);
    try {
      const report = await this.gw.execQuery(queryId, legislationId);
      this.resultHtml = renderQueryResult(report);
      this.clearBanner();
    } catch (e) {
      this.showError(e, () => void this.runQuery(queryId, legislationId));
    } finally {
      this.setRunning(false);
      this.renderResult();
    }
  }

  private async runTests(): Promise<void> {
    if (!this.st || this.running) return;
    if (!(await this.save())) return;
    this.setRunning(true);
    try {
      this.lastTests = await this.gw.runTests(this.st.doc.id);
      this.clearBanner();
    } catch (e) {
      this.showError(e, () => void this.runTests());
    } finally {
      this.setRunning(false);
      this.renderTabs();
    }
  }

  private setRunning(running: boolean): void {
    this.running = running;
    for (const b of this.root.querySelectorAll<HTMLButtonElement>(".analysis")) {
      b.disabled = running;
    }
    this.renderStatus();
  }

  // ---------------------------
  // Tab data and navigation
  // ---------------------------

  private async refreshTabs(): Promise<void> {
    if (!this.st) return;
    const id = this.st.doc.id;
    try {
      this.vocab = await this.gw.vocabulary(id);
    } catch {
      this.vocab = null;
    }
    try {
      this.formal = await this.gw.formalization(id);
    } catch {
      this.formal = null;      // e.g. arity conflict; the tab explains
    }
    this.renderTabs();
  }

  private async jumpTo(docId: string, from: number, to: number): Promise<void> {
    if (this.st && this.st.doc.id !== docId) await this.load(docId);
    if (!this.st) return;
    const hit = this.st.doc.annotations.find(
      a => a.span[0] === from && a.span[1] === to && a.kind === "term");
    if (!hit) return;
    for (const el of this.root.querySelectorAll(`.ann[data-ann="${hit.id}"]`)) {
      el.classList.add("flash");
      setTimeout(() => el.classList.remove("flash"), 1200);
    }
  }

  // ---------------------------
  // Rendering
  // ---------------------------

  render(): void {
    this.renderEditor();
    this.renderStatus();
    this.renderResult();
    this.renderTabs();
  }

  private renderEditor(): void {
    if (!this.st) return;
    this.el("#body-pane").innerHTML = renderBody(this.st.doc);
    if (this.selectedAnnotation) {
      for (const el of this.root.querySelectorAll(
          `.ann[data-ann="${this.selectedAnnotation}"]`)) {
        el.classList.add("selected");
      }
    }
    this.el<HTMLButtonElement>("#delete-btn").disabled = this.selectedAnnotation === null;
  }

  private renderStatus(): void {
    if (!this.st) return;
    const chip = this.el("#status-chip");
    if (this.running) {
      chip.textContent = "running...";
      chip.className = "busy";
    } else if (this.st.dirty) {
      chip.textContent = "unsaved changes";
      chip.className = "dirty";
    } else {
      chip.textContent = `saved (rev ${this.st.revision})`;
      chip.className = "clean";
    }
    const sel = this.st.selection;
    this.el<HTMLButtonElement>("#annotate-btn").disabled = sel === null;
    // goals only exist on query documents
    const goalBtn = this.el<HTMLButtonElement>("#goal-btn");
    goalBtn.hidden = this.st.doc.kind !== "query";
    goalBtn.disabled = sel === null;
  }

  private renderResult(): void {
    this.el("#result-pane").innerHTML = this.resultHtml;
  }

  private renderTabs(): void {
    if (!this.st) return;
    for (const b of this.root.querySelectorAll<HTMLElement>(".tab-btn")) {
      b.classList.toggle("active", b.dataset["tab"] === this.activeTab);
    }
    const stale = this.st.dirty
      ? `<p class="stale-note">unsaved edits are not reflected here yet</p>`
      : "";
    let content: string;
    if (this.activeTab === "vocabulary") {
      content = this.vocab
        ? renderVocabulary(this.vocab)
        : `<p class="empty">vocabulary unavailable</p>`;
    } else if (this.activeTab === "formalization") {
      content = this.formal
        ? renderFormalization(this.formal, this.lastIndependence?.perFormula)
        : `<p class="empty">the document does not compile; fix the annotations</p>`;
    } else {
      content = renderQueries(this.st.doc, this.summaries, this.lastTests ?? undefined);
    }
    this.el("#tab-pane").innerHTML = stale + content;
  }

  // ---------------------------
  // Errors
  // ---------------------------

  private showError(e: unknown, retry?: () => void): void {
    const banner = this.el("#banner");
    let text: string;
    if (e instanceof GatewayError) {
      text = `${e.code}: ${e.message}`;
    } else if (e instanceof AnnotationError) {
      text = e.where ? `${e.code} at ${e.where}: ${e.message}` : `${e.code}: ${e.message}`;
    } else {
      text = String(e);
    }
    banner.innerHTML = `<div class="error-banner">` +
      `<span class="error-text">${esc(text)}</span>` +
      (retry ? `<button id="retry-btn">Retry</button>` : "") +
      `<button id="dismiss-btn">Dismiss</button></div>`;
    const retryBtn = banner.querySelector("#retry-btn");
    if (retryBtn && retry) retryBtn.addEventListener("click", () => retry());
    banner.querySelector("#dismiss-btn")!.addEventListener("click", () => this.clearBanner());
  }

  private clearBanner(): void {
    this.el("#banner").innerHTML = "";
  }
}

export function mount(root: HTMLElement, base = ""): App {
  const app = new App(root, new Gateway(base));
  void app.start();
  return app;
}
