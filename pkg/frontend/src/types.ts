/**
 * Wire types for the normkit gateway.
 *
 * These mirror the JSON bodies exactly; the editor never invents fields
 * of its own on the way to the server.
 */

export type DocumentKind = "legislation" | "query";

export type AnnotationKind = "term" | "composite" | "goal";

export type Connective =
  | "Not" | "And" | "Or" | "Implies"
  | "Id" | "Ob" | "Pm" | "Fb"
  | "CondOb" | "CondPm" | "CondFb";

export const UNARY_CONNECTIVES: readonly Connective[] = ["Not", "Id", "Ob", "Pm", "Fb"];

export interface AnnotationData {
  id: string;
  span: [number, number];          // character offsets, end exclusive
  kind: AnnotationKind;
  name?: string;                   // term only
  args?: string[];                 // term only
  connective?: Connective;         // composite only
  children?: string[];             // omitted when empty
}

export interface DocumentData {
  id: string;
  title: string;
  body: string;
  kind: DocumentKind;
  annotations: AnnotationData[];
}

export interface StoredDocument {
  revision: number;
  createdAt: string;
  updatedAt: string;
  document: DocumentData;
}

export interface DocumentSummary {
  id: string;
  title: string;
  kind: DocumentKind;
  revision: number;
  createdAt: string;
  updatedAt: string;
}

export interface Limits {
  maxDepth: number;
  timeBudgetMs: number;
  maxGroundAtoms: number;
}

// The gateway's three-valued answers. The UI treats these as opaque
// strings to display; it never reclassifies a verdict locally.
export type ConsistencyStatus = "Consistent" | "Inconsistent" | "Unknown";
export type IndependenceStatus = "Independent" | "Dependent" | "Unknown";
export type QueryVerdict = "Valid" | "CounterSatisfiable" | "Unknown";

export interface ConsistencyResult {
  status: ConsistencyStatus;
  elapsedMs: number;
  limitsUsed: Limits;
  certificate: unknown;
  model: unknown;
  reason?: string;
}

export interface FormulaEntry {
  name: string;
  origin: string;
  formula: string;
  tree: unknown;
}

export interface ConsistencyReport {
  documentId: string;
  formulas: FormulaEntry[];
  consistency: ConsistencyResult;
}

export interface PerFormulaResult {
  status: IndependenceStatus;
  certificate: unknown;
  model: unknown;
  reason?: string;
}

export interface IndependenceReport extends ConsistencyReport {
  perFormula: Record<string, PerFormulaResult>;
}

export interface QueryReport {
  verdict: QueryVerdict;
  elapsedMs: number;
  limitsUsed: Limits;
  certificate: unknown;
  model: unknown;
  reason?: string;
  queryId: string;
  legislationId: string;
}

export interface TestLine {
  name: string;
  verdict: QueryVerdict;
  passed: boolean;
}

export interface TestReport {
  tests: TestLine[];
  total: number;
  passed: number;
  failed: number;
  legislationId: string;
}

export interface VocabularyOccurrence {
  documentId: string;
  span: [number, number];
}

export interface VocabularyTerm {
  name: string;
  arity: number;
  arities: number[];
  conflict: boolean;
  occurrences: VocabularyOccurrence[];
}

export interface VocabularyReport {
  documentId: string;
  terms: VocabularyTerm[];
}

export interface FormalizationReport {
  documentId: string;
  formulas: FormulaEntry[];
  goal: string | null;
  goalTree: unknown;
}

export interface ApiErrorBody {
  error: {
    httpStatus: number;
    code: string;
    message: string;
    where?: string;
  };
}
