import threading

import pytest
from fastapi.testclient import TestClient

import normkit.gateway
from normkit.api import create_app
from normkit.documents import Document, annotation_jsonable, document_jsonable
from normkit.documents import (composite_annotation as composite,
                               term_annotation as term)

from fixture_docs import (
    article_document, case_one_document, case_two_document, fixture_documents,
)


@pytest.fixture
def client(tmp_path):
    app = create_app(tmp_path / "data")
    with TestClient(app) as c:
        yield c


def post_doc(client, doc):
    r = client.post("/documents", json=document_jsonable(doc))
    assert r.status_code == 201, r.text
    return r.json()


def seeded(client):
    for doc in fixture_documents():
        post_doc(client, doc)
    return client


class TestCrud:
    def test_post_then_get_round_trip(self, client):
        doc = article_document()
        created = post_doc(client, doc)
        assert created["revision"] == 1
        got = client.get(f"/documents/{doc.id}")
        assert got.status_code == 200
        assert got.json() == created
        assert got.json()["document"] == document_jsonable(doc)

    def test_listing_summaries(self, client):
        seeded(client)
        r = client.get("/documents")
        rows = r.json()
        assert [row["id"] for row in rows] == sorted(row["id"] for row in rows)
        row = next(row for row in rows if row["id"] == "article-1")
        assert row["title"] == "Article 1"
        assert row["kind"] == "legislation"
        assert row["revision"] == 1
        assert set(row) == {"id", "title", "kind", "revision",
                            "createdAt", "updatedAt"}

    def test_put_bumps_revision(self, client):
        doc = article_document()
        post_doc(client, doc)
        r = client.put(f"/documents/{doc.id}",
                       json={"document": document_jsonable(doc),
                             "revision": 1})
        assert r.status_code == 200
        assert r.json()["revision"] == 2

    def test_put_with_stale_revision(self, client):
        doc = article_document()
        post_doc(client, doc)
        envelope = {"document": document_jsonable(doc), "revision": 1}
        assert client.put(f"/documents/{doc.id}", json=envelope).status_code == 200
        r = client.put(f"/documents/{doc.id}", json=envelope)
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "stale_revision"
        assert r.json()["error"]["httpStatus"] == 409

    def test_delete_then_get(self, client):
        doc = article_document()
        post_doc(client, doc)
        assert client.delete(f"/documents/{doc.id}").status_code == 204
        r = client.get(f"/documents/{doc.id}")
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "not_found"

    def test_post_duplicate_id(self, client):
        post_doc(client, article_document())
        r = client.post("/documents",
                        json=document_jsonable(article_document()))
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "already_exists"

    def test_post_invalid_document(self, client):
        # overlapping siblings under one composite
        bad = Document("bad", "Bad", "some words here", "legislation", (
            term("t1", (0, 6), "a"),
            term("t2", (4, 10), "b"),
            composite("c", (0, 10), "And", ("t1", "t2")),
        ))
        r = client.post("/documents", json=document_jsonable(bad))
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "overlap_error"
        assert r.json()["error"]["where"] == "c"

    def test_post_malformed_payload(self, client):
        r = client.post("/documents", json={"id": "x"})
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "structure_error"

    def test_put_id_mismatch(self, client):
        post_doc(client, article_document())
        r = client.put("/documents/article-1",
                       json={"document": document_jsonable(case_one_document()),
                             "revision": 1})
        assert r.status_code == 422

    def test_put_without_revision(self, client):
        doc = article_document()
        post_doc(client, doc)
        r = client.put(f"/documents/{doc.id}",
                       json={"document": document_jsonable(doc)})
        assert r.status_code == 422

    def test_bad_id_rejected(self, client):
        r = client.get("/documents/..%2fescape")
        assert r.status_code in (404, 422)

    def test_cors_for_locally_served_editor(self, client):
        # the browser editor runs on its own port
        r = client.get("/documents",
                       headers={"origin": "http://localhost:8080"})
        assert r.headers["access-control-allow-origin"] == \
            "http://localhost:8080"
        r = client.get("/documents",
                       headers={"origin": "http://evil.example"})
        assert "access-control-allow-origin" not in r.headers


class TestViews:
    def test_vocabulary(self, client):
        seeded(client)
        r = client.get("/documents/article-1/vocabulary")
        assert r.status_code == 200
        terms = r.json()["terms"]
        names = [t["name"] for t in terms]
        assert names == sorted(names)
        adult = next(t for t in terms if t["name"] == "adult")
        assert adult["arity"] == 1
        assert adult["conflict"] is False
        assert all(o["documentId"] == "article-1"
                   for o in adult["occurrences"])

    def test_formalization_listing(self, client):
        seeded(client)
        r = client.get("/documents/article-1/formalization")
        body = r.json()
        assert [f["name"] for f in body["formulas"]] == \
            ["Article 1 #1", "Article 1 #2"]
        assert body["goal"] is None
        assert all(f["origin"] == "article-1" for f in body["formulas"])

    def test_formalization_of_query_has_goal(self, client):
        seeded(client)
        r = client.get("/documents/case-2/formalization")
        assert r.json()["goal"] is not None

    def test_view_of_missing_document(self, client):
        r = client.get("/documents/nope/vocabulary")
        assert r.status_code == 404


class TestReasoning:
    def test_consistency_of_fixture(self, client):
        seeded(client)
        r = client.post("/documents/article-1/consistency")
        assert r.status_code == 200
        body = r.json()
        assert body["consistency"]["status"] == "Consistent"
        assert body["consistency"]["model"] is not None
        assert len(body["formulas"]) == 2

    def test_inconsistent_document_carries_certificate(self, client):
        body = "obliged and forbidden"
        doc = Document("clash", "Clash", body, "legislation", (
            term("t1", (0, 7), "p"),
            composite("ob", (0, 7), "Ob", ("t1",)),
            term("t2", (12, 21), "p"),
            composite("fb", (12, 21), "Fb", ("t2",)),
        ))
        post_doc(client, doc)
        r = client.post("/documents/clash/consistency")
        body = r.json()
        assert body["consistency"]["status"] == "Inconsistent"
        assert body["consistency"]["certificate"] is not None

    def test_limits_pass_through(self, client):
        seeded(client)
        r = client.post("/documents/article-1/consistency?maxDepth=7")
        assert r.json()["consistency"]["limitsUsed"]["maxDepth"] == 7
        r = client.post("/documents/article-1/consistency?maxDepth=0")
        assert r.status_code == 422

    def test_unknown_via_tiny_atom_budget(self, client):
        seeded(client)
        r = client.post("/documents/article-1/consistency?maxGroundAtoms=1")
        assert r.json()["consistency"]["status"] == "Unknown"
        assert r.json()["consistency"]["reason"] == "grounding-too-large"

    def test_independence_of_fixture(self, client):
        seeded(client)
        r = client.post("/documents/article-1/independence")
        body = r.json()
        assert body["consistency"]["status"] == "Consistent"
        assert set(body["perFormula"]) == {"Article 1 #1", "Article 1 #2"}
        assert all(s["status"] == "Independent"
                   for s in body["perFormula"].values())

    def test_independence_flags_duplicate(self, client):
        body = "p and also p"
        doc = Document("dup", "Dup", body, "legislation", (
            term("t1", (0, 1), "p"),
            term("t2", (11, 12), "p"),
        ))
        post_doc(client, doc)
        r = client.post("/documents/dup/independence")
        statuses = {name: s["status"]
                    for name, s in r.json()["perFormula"].items()}
        assert statuses == {"Dup #1": "Dependent", "Dup #2": "Dependent"}

    def test_independence_of_empty_document(self, client):
        post_doc(client, Document("empty", "Empty", "no annotations yet",
                                  "legislation", ()))
        r = client.post("/documents/empty/independence")
        assert r.status_code == 200
        assert r.json()["perFormula"] == {}
        assert r.json()["formulas"] == []

    def test_exec_case_two_valid(self, client):
        seeded(client)
        r = client.post("/queries/case-2/exec?legislation=article-1")
        body = r.json()
        assert body["verdict"] == "Valid"
        assert body["certificate"] is not None
        assert body["queryId"] == "case-2"
        assert body["legislationId"] == "article-1"
        assert body["elapsedMs"] >= 0

    def test_exec_case_one_countersatisfiable(self, client):
        seeded(client)
        r = client.post("/queries/case-1/exec?legislation=article-1")
        assert r.json()["verdict"] == "CounterSatisfiable"
        assert r.json()["model"] is not None

    def test_exec_without_goal(self, client):
        seeded(client)
        doc = Document("no-goal", "No goal", "just a fact", "query", (
            term("f", (0, 4), "p"),
        ))
        post_doc(client, doc)
        r = client.post("/queries/no-goal/exec?legislation=article-1")
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "missing_goal"

    def test_exec_legislation_must_be_legislation(self, client):
        seeded(client)
        r = client.post("/queries/case-2/exec?legislation=case-1")
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "structure_error"

    def test_exec_requires_legislation_param(self, client):
        seeded(client)
        r = client.post("/queries/case-2/exec")
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "validation_error"

    def test_exec_missing_documents(self, client):
        seeded(client)
        assert client.post(
            "/queries/nope/exec?legislation=article-1").status_code == 404
        assert client.post(
            "/queries/case-1/exec?legislation=nope").status_code == 404

    def test_stored_test_suite(self, client):
        seeded(client)
        r = client.post("/documents/article-1/tests")
        assert r.status_code == 200
        body = r.json()
        assert body["total"] == 2
        assert body["passed"] == 2
        assert {e["name"] for e in body["tests"]} == \
            {"Test scenario 1", "Test scenario 2"}
        assert body["legislationId"] == "article-1"


class TestConcurrencyCap:
    def test_zero_slots_reject_immediately(self, tmp_path):
        app = create_app(tmp_path / "data", prover_slots=0)
        with TestClient(app) as client:
            post_doc(client, article_document())
            r = client.post("/documents/article-1/consistency")
            assert r.status_code == 503
            assert r.json()["error"]["code"] == "busy"
            # CRUD stays available
            assert client.get("/documents/article-1").status_code == 200

    def test_overloaded_run_rejected_then_capacity_returns(
            self, tmp_path, monkeypatch):
        app = create_app(tmp_path / "data", prover_slots=1)
        started, release = threading.Event(), threading.Event()
        real = normkit.gateway.consistency_payload

        def slow(doc, limits):
            started.set()
            release.wait(10)
            return real(doc, limits)

        monkeypatch.setattr(normkit.gateway, "consistency_payload", slow)
        with TestClient(app) as client:
            post_doc(client, article_document())
            results = []
            t = threading.Thread(target=lambda: results.append(
                client.post("/documents/article-1/consistency")))
            t.start()
            assert started.wait(10)
            busy = client.post("/documents/article-1/consistency")
            assert busy.status_code == 503
            release.set()
            t.join(30)
            assert results[0].status_code == 200
            monkeypatch.setattr(normkit.gateway, "consistency_payload", real)
            again = client.post("/documents/article-1/consistency")
            assert again.status_code == 200
