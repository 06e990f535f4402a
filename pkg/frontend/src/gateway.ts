// Typed client for the gateway REST API. All reasoning happens on the
// server; this module only moves JSON.

import type {
  ConsistencyReport, DocumentData, DocumentSummary, FormalizationReport,
  IndependenceReport, QueryReport, StoredDocument, TestReport, VocabularyReport,
} from "./types.js";

export class GatewayError extends Error {
  httpStatus: number;
  code: string;
  where?: string;

  constructor(httpStatus: number, code: string, message: string, where?: string) {
    super(message);
    this.httpStatus = httpStatus;
    this.code = code;
    this.where = where;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Gateway {
  private base: string;
  private fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (i, n) => fetch(i, n)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (e) {
      throw new GatewayError(0, "network_error", e instanceof Error ? e.message : String(e));
    }
    if (resp.status === 204) return undefined as T;
    const text = await resp.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        throw new GatewayError(resp.status, "bad_response", "server sent malformed JSON");
      }
    }
    if (!resp.ok) {
      const err = (data as { error?: { code?: string; message?: string; where?: string } })?.error;
      throw new GatewayError(
        resp.status, err?.code ?? "http_error", err?.message ?? `HTTP ${resp.status}`, err?.where);
    }
    return data as T;
  }

  listDocuments(): Promise<DocumentSummary[]> {
    return this.request("GET", "/documents");
  }

  getDocument(id: string): Promise<StoredDocument> {
    return this.request("GET", `/documents/${encodeURIComponent(id)}`);
  }

  createDocument(doc: DocumentData): Promise<StoredDocument> {
    return this.request("POST", "/documents", doc);
  }

  saveDocument(doc: DocumentData, revision: number): Promise<StoredDocument> {
    return this.request("PUT", `/documents/${encodeURIComponent(doc.id)}`,
                        { document: doc, revision });
  }

  deleteDocument(id: string): Promise<void> {
    return this.request("DELETE", `/documents/${encodeURIComponent(id)}`);
  }

  vocabulary(id: string): Promise<VocabularyReport> {
    return this.request("GET", `/documents/${encodeURIComponent(id)}/vocabulary`);
  }

  formalization(id: string): Promise<FormalizationReport> {
    return this.request("GET", `/documents/${encodeURIComponent(id)}/formalization`);
  }

  consistency(id: string): Promise<ConsistencyReport> {
    return this.request("POST", `/documents/${encodeURIComponent(id)}/consistency`);
  }

  independence(id: string): Promise<IndependenceReport> {
    return this.request("POST", `/documents/${encodeURIComponent(id)}/independence`);
  }

  execQuery(queryId: string, legislationId: string): Promise<QueryReport> {
    const q = encodeURIComponent(legislationId);
    return this.request("POST", `/queries/${encodeURIComponent(queryId)}/exec?legislation=${q}`);
  }

  runTests(legislationId: string): Promise<TestReport> {
    return this.request("POST", `/documents/${encodeURIComponent(legislationId)}/tests`);
  }
}
