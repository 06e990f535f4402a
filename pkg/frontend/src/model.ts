/**
 * Client-side annotation forest.
 *
 * Mirrors the server's insertion rules so that anything built here saves
 * without surprises: same containment checks, same overlap rejection,
 * same child ordering. The document value is immutable; every edit
 * returns a fresh one.
 */

import type { AnnotationData, Connective, DocumentData } from "./types.js";
import { UNARY_CONNECTIVES } from "./types.js";

export class AnnotationError extends Error {
  code: string;
  where?: string;

  constructor(code: string, message: string, where?: string) {
    super(message);
    this.code = code;
    this.where = where;
  }
}

type Span = [number, number];

function contains(outer: Span, inner: Span): boolean {
  return outer[0] <= inner[0] && inner[1] <= outer[1];
}

function disjoint(a: Span, b: Span): boolean {
  return a[1] <= b[0] || b[1] <= a[0];
}

// Nesting rank for equal spans, outermost first. Matches the server.
const RANK: Record<string, number> = {
  goal: 0,
  CondOb: 1, CondPm: 1, CondFb: 1,
  Implies: 2,
  Or: 3,
  And: 4,
  Id: 5, Ob: 5, Pm: 5, Fb: 5,
  Not: 6,
  term: 7,
};

export function rank(a: AnnotationData): number {
  if (a.kind === "composite") return RANK[a.connective ?? ""] ?? 7;
  return RANK[a.kind] ?? 7;
}

export function byId(doc: DocumentData): Map<string, AnnotationData> {
  const m = new Map<string, AnnotationData>();
  for (const a of doc.annotations) m.set(a.id, a);
  return m;
}

export function rootIds(doc: DocumentData): string[] {
  const childIds = new Set<string>();
  for (const a of doc.annotations) for (const c of a.children ?? []) childIds.add(c);
  return doc.annotations.filter(a => !childIds.has(a.id)).map(a => a.id);
}

export function parentOf(doc: DocumentData): Map<string, string> {
  const m = new Map<string, string>();
  for (const a of doc.annotations) for (const c of a.children ?? []) m.set(c, a.id);
  return m;
}

function sortedBySpan(map: Map<string, AnnotationData>, ids: string[]): string[] {
  return [...ids].sort((x, y) => {
    const sx = map.get(x)!.span;
    const sy = map.get(y)!.span;
    return sx[0] - sy[0] || sx[1] - sy[1];
  });
}

function checkFields(a: AnnotationData, bodyLen: number): void {
  const [start, end] = a.span;
  if (!(0 <= start && start < end && end <= bodyLen)) {
    throw new AnnotationError("span_error", `span [${start}, ${end}] outside body bounds`, a.id);
  }
}

/** Smallest container of the new span, skipping the subtrees it adopts. */
function deriveParent(doc: DocumentData, a: AnnotationData,
                      map: Map<string, AnnotationData>): string | null {
  const adopted = new Set<string>();
  const stack = [...(a.children ?? [])];
  while (stack.length > 0) {
    const cid = stack.pop()!;
    adopted.add(cid);
    stack.push(...(map.get(cid)!.children ?? []));
  }

  const candidates = doc.annotations.filter(
    ann => !adopted.has(ann.id) && ann.kind !== "term" && contains(ann.span, a.span));
  if (candidates.length === 0) return null;

  const smallest = Math.min(...candidates.map(ann => ann.span[1] - ann.span[0]));
  const tight = candidates.filter(ann => ann.span[1] - ann.span[0] === smallest);
  const tightSpans = new Set(tight.map(ann => `${ann.span[0]}:${ann.span[1]}`));
  if (tightSpans.size > 1) {
    throw new AnnotationError(
      "overlap_error",
      "attachment is ambiguous between overlapping readings; pass an explicit parent",
      a.id);
  }
  const first = tight[0]!;
  if (first.span[0] === a.span[0] && first.span[1] === a.span[1]) {
    // slot in below an equal-span chain: must be one parent-child path,
    // outermost rank first, every member outranking the new node
    const chain = [...tight].sort((x, y) => rank(x) - rank(y));
    const parents = parentOf(doc);
    let linked = true;
    for (let i = 0; i + 1 < chain.length; i++) {
      if (parents.get(chain[i + 1]!.id) !== chain[i]!.id) linked = false;
    }
    if (!linked || chain.some(ann => rank(ann) >= rank(a))) {
      throw new AnnotationError(
        "overlap_error",
        "equal spans with no unique nesting order; pass an explicit parent or adopt via children",
        a.id);
    }
    return chain[chain.length - 1]!.id;
  }
  if (tight.length > 1) {
    throw new AnnotationError(
      "overlap_error",
      "attachment is ambiguous between overlapping readings; pass an explicit parent",
      a.id);
  }
  return first.id;
}

export const DERIVE = Symbol("derive-parent");

/**
 * Insert an annotation and return the new document. `parent` is an
 * annotation id, null to force a new root, or DERIVE (default) to attach
 * under the smallest span that contains the new one. `a.children` may
 * name existing roots, which the new annotation adopts.
 */
export function addAnnotation(doc: DocumentData, a: AnnotationData,
                              parent: string | null | typeof DERIVE = DERIVE): DocumentData {
  checkFields(a, doc.body.length);
  const map = byId(doc);
  if (map.has(a.id)) {
    throw new AnnotationError("structure_error", `annotation id '${a.id}' already used`, a.id);
  }

  const roots = new Set(rootIds(doc));
  const children = a.children ?? [];
  if (children.length > 0 && a.kind === "term") {
    throw new AnnotationError("structure_error", "terms are leaves", a.id);
  }
  const seen = new Set<string>();
  for (const cid of children) {
    if (seen.has(cid)) {
      throw new AnnotationError("structure_error", `duplicate child '${cid}'`, a.id);
    }
    seen.add(cid);
    const child = map.get(cid);
    if (!child) {
      throw new AnnotationError("structure_error", `child '${cid}' does not exist`, a.id);
    }
    if (!roots.has(cid)) {
      throw new AnnotationError("structure_error", `child '${cid}' is not a root`, a.id);
    }
    if (!contains(a.span, child.span)) {
      throw new AnnotationError("overlap_error", `child '${cid}' outside the new span`, a.id);
    }
  }
  for (let i = 0; i < children.length; i++) {
    for (let j = i + 1; j < children.length; j++) {
      if (!disjoint(map.get(children[i]!)!.span, map.get(children[j]!)!.span)) {
        throw new AnnotationError(
          "overlap_error", `children '${children[i]}' and '${children[j]}' overlap`, a.id);
      }
    }
  }

  if (a.kind === "goal") {
    if (doc.kind !== "query") {
      throw new AnnotationError("structure_error", "goals belong to query documents", a.id);
    }
    if (doc.annotations.some(ann => ann.kind === "goal")) {
      throw new AnnotationError("structure_error", "document already has a goal", a.id);
    }
  }

  let parentId: string | null = parent === DERIVE ? deriveParent(doc, a, map) : parent;
  if (parentId !== null) {
    const p = map.get(parentId);
    if (!p) {
      throw new AnnotationError("structure_error", `parent '${parentId}' does not exist`, a.id);
    }
    if (p.kind === "term") {
      throw new AnnotationError("structure_error", "terms cannot have children", a.id);
    }
    if (a.kind === "goal") {
      throw new AnnotationError("structure_error", "a goal must be a root annotation", a.id);
    }
    if (!contains(p.span, a.span)) {
      throw new AnnotationError("overlap_error", `span escapes parent '${parentId}'`, a.id);
    }
    if (children.includes(parentId)) {
      throw new AnnotationError("structure_error", "parent cannot also be a child", a.id);
    }
    for (const cid of p.children ?? []) {
      if (!disjoint(map.get(cid)!.span, a.span)) {
        throw new AnnotationError("overlap_error", `span conflicts with sibling '${cid}'`, a.id);
      }
    }
  }

  const inserted: AnnotationData = { ...a };
  if (children.length > 0) inserted.children = sortedBySpan(map, children);
  else delete inserted.children;
  map.set(inserted.id, inserted);

  const annotations = doc.annotations.map(ann => {
    if (parentId !== null && ann.id === parentId) {
      return { ...ann, children: sortedBySpan(map, [...(ann.children ?? []), inserted.id]) };
    }
    return ann;
  });
  annotations.push(inserted);
  return { ...doc, annotations };
}

/** Remove an annotation and its whole subtree. */
export function removeAnnotation(doc: DocumentData, id: string): DocumentData {
  const map = byId(doc);
  if (!map.has(id)) {
    throw new AnnotationError("structure_error", `annotation '${id}' does not exist`, id);
  }
  const doomed = new Set<string>();
  const stack = [id];
  while (stack.length > 0) {
    const cur = stack.pop()!;
    doomed.add(cur);
    stack.push(...(map.get(cur)!.children ?? []));
  }
  const annotations: AnnotationData[] = [];
  for (const ann of doc.annotations) {
    if (doomed.has(ann.id)) continue;
    const kids = (ann.children ?? []).filter(c => !doomed.has(c));
    const copy: AnnotationData = { ...ann };
    if (kids.length > 0) copy.children = kids;
    else delete copy.children;
    annotations.push(copy);
  }
  return { ...doc, annotations };
}

/** Fresh annotation id: first free `${prefix}N`, so ids are stable for
 *  a given edit sequence. */
export function freshId(doc: DocumentData, prefix: string): string {
  const used = new Set(doc.annotations.map(a => a.id));
  for (let n = 1; ; n++) {
    const id = `${prefix}${n}`;
    if (!used.has(id)) return id;
  }
}

/** Root annotations whose span sits inside the given range: what a new
 *  composite over that selection would adopt. */
export function adoptableRoots(doc: DocumentData, span: Span): string[] {
  const map = byId(doc);
  const ids = rootIds(doc).filter(id => contains(span, map.get(id)!.span));
  return sortedBySpan(map, ids);
}

export function connectiveArity(c: Connective): 1 | 2 {
  return UNARY_CONNECTIVES.includes(c) ? 1 : 2;
}

/**
 * Structural fingerprint of the forest: spans, kinds and child lists in
 * a canonical order. Two documents with equal fingerprints render
 * identically.
 */
export function spanStructure(doc: DocumentData): string {
  const lines = doc.annotations.map(a => {
    const head = `${a.id} [${a.span[0]},${a.span[1]}] ${a.kind}`;
    const detail = a.kind === "term"
      ? `${a.name}(${(a.args ?? []).join(",")})`
      : a.kind === "composite" ? a.connective ?? "" : "";
    const kids = (a.children ?? []).join(",");
    return `${head} ${detail} <${kids}>`;
  });
  return lines.sort().join("\n");
}
