"""HTTP gateway.

Routes mirror the editor's tabs and buttons: document CRUD, read-only
vocabulary and formalization views, and prover-backed consistency,
independence, and query endpoints.  Reasoning runs synchronously under
the request's resource limits; at most ``prover_slots`` prover runs are
admitted at once and the rest are rejected with a 503 so a busy server
stays responsive.

Error bodies all look like::

    {"error": {"httpStatus": 422, "code": "overlap_error",
               "message": "...", "where": "a7"}}
"""

import threading
from contextlib import contextmanager
from typing import Optional

from fastapi import Body, Depends, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import gateway
from .documents import DOC_QUERY, DocumentError, document_from_jsonable
from .embedding import CompileError
from .services import TEST_PREFIX
from .store import DocumentStore, StoreError, stored_jsonable
from .syntax import ArityError, LanguageError

DEFAULT_PROVER_SLOTS = 4


class BusyError(Exception):
    pass


class ProverGate:
    """Admission control for simultaneous prover runs."""

    def __init__(self, slots: int):
        self.slots = slots
        self._sem = threading.BoundedSemaphore(slots) if slots > 0 else None

    @contextmanager
    def slot(self):
        if self._sem is None or not self._sem.acquire(blocking=False):
            raise BusyError
        try:
            yield
        finally:
            self._sem.release()


def _error_body(status: int, code: str, message: str,
                where: Optional[str] = None) -> JSONResponse:
    error = {"httpStatus": status, "code": code, "message": message}
    if where is not None:
        error["where"] = where
    return JSONResponse({"error": error}, status_code=status)


_STORE_STATUS = {"not_found": 404, "stale_revision": 409,
                 "already_exists": 409, "id_error": 422}


def _summary(sd) -> dict:
    return {
        "id": sd.document.id,
        "title": sd.document.title,
        "kind": sd.document.kind,
        "revision": sd.revision,
        "createdAt": sd.created_at,
        "updatedAt": sd.updated_at,
    }


def create_app(data_dir, prover_slots: int = DEFAULT_PROVER_SLOTS) -> FastAPI:
    app = FastAPI(title="normkit", docs_url=None, redoc_url=None)
    # the editor is served as static files from its own port
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"https?://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = DocumentStore(data_dir)
    gate = ProverGate(prover_slots)
    app.state.store = store
    app.state.gate = gate

    @app.exception_handler(DocumentError)
    def document_error(_req: Request, e: DocumentError):
        return _error_body(422, e.code, str(e), e.where)

    @app.exception_handler(StoreError)
    def store_error(_req: Request, e: StoreError):
        return _error_body(_STORE_STATUS[e.code], e.code, str(e))

    @app.exception_handler(ArityError)
    def arity_error(_req: Request, e: ArityError):
        return _error_body(422, "arity_conflict", str(e))

    @app.exception_handler(CompileError)
    def compile_error(_req: Request, e: CompileError):
        return _error_body(422, "name_error", str(e))

    @app.exception_handler(LanguageError)
    def language_error(_req: Request, e: LanguageError):
        return _error_body(422, "validation_error", str(e))

    @app.exception_handler(ValueError)
    def value_error(_req: Request, e: ValueError):
        return _error_body(422, "validation_error", str(e))

    @app.exception_handler(BusyError)
    def busy(_req: Request, _e: BusyError):
        return _error_body(503, "busy",
                           "all prover slots are taken, retry shortly")

    @app.exception_handler(RequestValidationError)
    def request_error(_req: Request, e: RequestValidationError):
        return _error_body(422, "validation_error", str(e.errors()[:1]))

    def limits(max_depth: Optional[int] = Query(None, alias="maxDepth", ge=1),
               time_budget_ms: Optional[int] = Query(
                   None, alias="timeBudgetMs", ge=1),
               max_ground_atoms: Optional[int] = Query(
                   None, alias="maxGroundAtoms", ge=1)):
        return gateway.make_limits(max_depth, time_budget_ms,
                                   max_ground_atoms)

    # -- document CRUD ------------------------------------------------

    @app.get("/documents")
    def list_documents():
        return [_summary(sd) for sd in store.list_documents()]

    @app.post("/documents", status_code=201)
    def create_document(payload: dict = Body(...)):
        return stored_jsonable(store.create(document_from_jsonable(payload)))

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        return stored_jsonable(store.load(doc_id))

    @app.put("/documents/{doc_id}")
    def put_document(doc_id: str, payload: dict = Body(...)):
        if not isinstance(payload.get("revision"), int):
            raise DocumentError("structure_error",
                                "update needs the integer revision it is "
                                "based on", doc_id)
        doc = document_from_jsonable(payload.get("document"))
        if doc.id != doc_id:
            raise DocumentError("structure_error",
                                f"payload document id {doc.id!r} does not "
                                f"match the path", doc_id)
        return stored_jsonable(store.save(doc, payload["revision"]))

    @app.delete("/documents/{doc_id}", status_code=204)
    def delete_document(doc_id: str):
        store.delete(doc_id)
        return Response(status_code=204)

    # -- read-only views ----------------------------------------------

    @app.get("/documents/{doc_id}/vocabulary")
    def vocabulary(doc_id: str):
        return gateway.vocabulary_payload(store.load(doc_id).document)

    @app.get("/documents/{doc_id}/formalization")
    def formalization(doc_id: str):
        return gateway.formalization_payload(store.load(doc_id).document)

    # -- prover-backed endpoints --------------------------------------

    @app.post("/documents/{doc_id}/consistency")
    def consistency(doc_id: str, lim=Depends(limits)):
        doc = store.load(doc_id).document
        with gate.slot():
            return gateway.consistency_payload(doc, lim)

    @app.post("/documents/{doc_id}/independence")
    def independence(doc_id: str, lim=Depends(limits)):
        doc = store.load(doc_id).document
        with gate.slot():
            return gateway.independence_payload(doc, lim)

    @app.post("/queries/{doc_id}/exec")
    def exec_query(doc_id: str,
                   legislation: str = Query(...),
                   lim=Depends(limits)):
        query_doc = store.load(doc_id).document
        leg_doc = store.load(legislation).document
        with gate.slot():
            return gateway.exec_payload(leg_doc, query_doc, lim)

    @app.post("/documents/{doc_id}/tests")
    def run_tests(doc_id: str, lim=Depends(limits)):
        # every stored test-marked query document, against this legislation
        leg_doc = store.load(doc_id).document
        suite = [sd.document for sd in store.list_documents()
                 if sd.document.kind == DOC_QUERY
                 and sd.document.title.startswith(TEST_PREFIX)]
        with gate.slot():
            return gateway.test_payload(leg_doc, suite, lim)

    return app
