"""Record a gateway session for the editor's contract tests.

Seeds a fresh store with the shared fixture corpus, walks every route the
editor uses, and freezes the exchanges into tests/fixtures/recording.json.
Re-run after changing the gateway or the fixtures:

    python3 scripts/record_session.py
"""

import json
import pathlib
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
REPO = HERE.parent.parent
sys.path.insert(0, str(REPO / "tests"))

from fastapi.testclient import TestClient   # noqa: E402

from fixture_docs import fixture_documents  # noqa: E402
from normkit.api import create_app          # noqa: E402
from normkit.documents import (              # noqa: E402
    Document, add_annotation, composite_annotation, document_jsonable,
    goal_annotation, term_annotation,
)

OUT = HERE.parent / "tests" / "fixtures" / "recording.json"

ROUNDTRIP_BODY = "if the light is red you must stop"


def roundtrip_document() -> Document:
    """The document the editor test builds click by click; kept in sync
    with tests/roundtrip.test.ts so the recorded server response is the
    reference for the client-side insertion logic."""
    body = ROUNDTRIP_BODY
    d = Document("roundtrip", "Round trip", body, "query")
    s1 = body.index("the light is red")
    d = add_annotation(d, term_annotation(
        "a1", (s1, s1 + len("the light is red")), "the_light_is_red"))
    s2 = body.index("must stop")
    d = add_annotation(d, term_annotation(
        "a2", (s2, s2 + len("must stop")), "must_stop", ("c",)))
    d = add_annotation(d, composite_annotation(
        "a3", (0, len(body)), "CondOb", ("a1", "a2")))
    d = add_annotation(d, goal_annotation("a4", (0, len(body)), ("a3",)))
    return d


def main() -> None:
    entries = []

    def record(client, method, path, **kwargs):
        resp = client.request(method, path, **kwargs)
        key = path
        entries.append({
            "method": method,
            "path": key,
            "status": resp.status_code,
            "body": resp.json() if resp.content else None,
        })
        return resp

    with tempfile.TemporaryDirectory() as td:
        client = TestClient(create_app(td))
        for doc in fixture_documents():
            resp = client.post("/documents", json=document_jsonable(doc))
            assert resp.status_code == 201, resp.text

        record(client, "GET", "/documents")
        for doc_id in ("article-1", "case-1", "case-2",
                       "test-scenario-1", "test-scenario-2"):
            record(client, "GET", f"/documents/{doc_id}")
            record(client, "GET", f"/documents/{doc_id}/vocabulary")
            record(client, "GET", f"/documents/{doc_id}/formalization")
        record(client, "POST", "/documents/article-1/consistency")
        record(client, "POST", "/documents/article-1/independence")
        record(client, "POST", "/queries/case-1/exec?legislation=article-1")
        record(client, "POST", "/queries/case-2/exec?legislation=article-1")
        record(client, "POST", "/documents/article-1/tests")

        # the round-trip contract: empty create, then the same edits the
        # editor test performs, pushed as one save
        empty = {"id": "roundtrip", "title": "Round trip",
                 "body": ROUNDTRIP_BODY, "kind": "query", "annotations": []}
        record(client, "POST", "/documents", json=empty)
        full = document_jsonable(roundtrip_document())
        record(client, "PUT", "/documents/roundtrip",
               json={"document": full, "revision": 1})
        record(client, "GET", "/documents/roundtrip")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"entries": entries}, indent=1) + "\n")
    print(f"wrote {OUT} ({len(entries)} exchanges)")


if __name__ == "__main__":
    main()
