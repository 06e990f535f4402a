/**
 * Editor state and its transitions. Pure: every operation returns a new
 * state or throws, leaving the old one intact, which is what makes
 * "reject the annotation, keep the document" trivially correct.
 */

import { addAnnotation, adoptableRoots, AnnotationError, byId, freshId } from "./model.js";
import { autoName } from "./naming.js";
import type {
  AnnotationData, Connective, DocumentData, StoredDocument,
} from "./types.js";

export type PendingKind = "term" | "goal" | Connective;

export interface EditorState {
  doc: DocumentData;
  revision: number;           // server revision this copy is based on
  dirty: boolean;             // local edits not yet saved
  selection: [number, number] | null;
  pendingKind: PendingKind;
}

export function openState(stored: StoredDocument): EditorState {
  return {
    doc: stored.document,
    revision: stored.revision,
    dirty: false,
    selection: null,
    pendingKind: "term",
  };
}

export function markSaved(st: EditorState, stored: StoredDocument): EditorState {
  return { ...st, doc: stored.document, revision: stored.revision, dirty: false };
}

export function setSelection(st: EditorState, from: number, to: number): EditorState {
  const lo = Math.max(0, Math.min(from, to));
  const hi = Math.min(st.doc.body.length, Math.max(from, to));
  return { ...st, selection: lo < hi ? [lo, hi] : null };
}

export function clearSelection(st: EditorState): EditorState {
  return { ...st, selection: null };
}

/** Term names already used in the document, for auto-name dedup. */
export function takenNames(doc: DocumentData): string[] {
  const names = new Set<string>();
  for (const a of doc.annotations) {
    if (a.kind === "term" && a.name) names.add(a.name);
  }
  return [...names].sort();
}

/** The name the term dialog prefills for the current selection. */
export function suggestName(st: EditorState): string {
  if (!st.selection) return "";
  const [from, to] = st.selection;
  return autoName(st.doc.body.slice(from, to), takenNames(st.doc));
}

export interface TermSpec {
  kind: "term";
  name?: string;              // default: autoName of the selected text
  args?: string[];
}

export interface CompositeSpec {
  kind: "composite";
  connective: Connective;
}

export interface GoalSpec {
  kind: "goal";
}

export type AnnotateSpec = TermSpec | CompositeSpec | GoalSpec;

/**
 * Turn the current selection into an annotation. Composites and goals
 * adopt every root annotation inside the selection; terms are leaves.
 * Throws AnnotationError and changes nothing when the selection cannot
 * be annotated (overlap, second goal, ...).
 */
export function annotateSelection(st: EditorState, spec: AnnotateSpec): EditorState {
  if (!st.selection) {
    throw new AnnotationError("span_error", "select some text first");
  }
  const [from, to] = st.selection;
  let ann: AnnotationData;
  if (spec.kind === "term") {
    const name = spec.name && spec.name.length > 0
      ? spec.name
      : autoName(st.doc.body.slice(from, to), takenNames(st.doc));
    ann = {
      id: freshId(st.doc, "a"),
      span: [from, to],
      kind: "term",
      name,
      args: spec.args ?? [],
    };
  } else {
    const children = adoptableRoots(st.doc, [from, to]);
    ann = spec.kind === "goal"
      ? { id: freshId(st.doc, "a"), span: [from, to], kind: "goal", children }
      : {
          id: freshId(st.doc, "a"),
          span: [from, to],
          kind: "composite",
          connective: spec.connective,
          children,
        };
    if (children.length === 0) delete ann.children;
  }
  const doc = addAnnotation(st.doc, ann);
  return { ...st, doc, dirty: true, selection: null };
}

/** The annotation covering a position, innermost first. */
export function annotationsAt(st: EditorState, pos: number): AnnotationData[] {
  const covering = st.doc.annotations.filter(a => a.span[0] <= pos && pos < a.span[1]);
  return covering.sort((x, y) => (x.span[1] - x.span[0]) - (y.span[1] - y.span[0]));
}

export function replaceDocument(st: EditorState, doc: DocumentData): EditorState {
  return { ...st, doc, dirty: true };
}

export { AnnotationError, byId };
