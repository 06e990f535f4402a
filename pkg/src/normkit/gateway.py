"""Document-level reasoning operations shared by the HTTP API and the CLI.

Both frontends call these functions and emit the returned dicts verbatim,
so a report fetched over HTTP and one printed by the CLI have the same
schema for the same inputs.
"""

from typing import Iterable, List, Optional

from .documents import (
    DOC_LEGISLATION, DOC_QUERY, CompiledDocument, Document, DocumentError,
    compile_document, extract_vocabulary,
)
from .prover import ResourceLimits
from .services import (
    DEFAULT_LIMITS, FormalizationReport, QuerySpec,
    check_consistency, check_independence, consistency_jsonable,
    formalization_report_jsonable, query_result_jsonable, run_query,
    run_test_suite, test_report_jsonable,
)
from .syntax import formula_to_tree, print_formula


def make_limits(max_depth: Optional[int] = None,
                time_budget_ms: Optional[int] = None,
                max_ground_atoms: Optional[int] = None) -> ResourceLimits:
    """Fill unspecified limits from the defaults."""
    return ResourceLimits(
        max_depth if max_depth is not None else DEFAULT_LIMITS.max_depth,
        time_budget_ms if time_budget_ms is not None
        else DEFAULT_LIMITS.time_budget_ms,
        max_ground_atoms if max_ground_atoms is not None
        else DEFAULT_LIMITS.max_ground_atoms)


def require_kind(d: Document, kind: str) -> Document:
    if d.kind != kind:
        raise DocumentError("structure_error",
                            f"document {d.id!r} is a {d.kind} document, "
                            f"expected {kind}", d.id)
    return d


def document_query_spec(d: Document) -> QuerySpec:
    """Compile a query document into a runnable entailment question."""
    require_kind(d, DOC_QUERY)
    compiled = compile_document(d)
    if compiled.goal is None:
        raise DocumentError("missing_goal",
                            f"query document {d.id!r} has no goal annotation",
                            d.id)
    return QuerySpec(d.title, compiled.goal, compiled.formulas)


def _formula_listing(compiled: CompiledDocument) -> List[dict]:
    return [{"name": nf.name, "origin": nf.origin,
             "formula": print_formula(nf.closed.formula),
             "tree": formula_to_tree(nf.closed.formula)}
            for nf in compiled.formulas]


def formalization_payload(d: Document) -> dict:
    """The compiled-formula listing, no proving."""
    compiled = compile_document(d)
    return {
        "documentId": d.id,
        "formulas": _formula_listing(compiled),
        "goal": (None if compiled.goal is None
                 else print_formula(compiled.goal.formula)),
        "goalTree": (None if compiled.goal is None
                     else formula_to_tree(compiled.goal.formula)),
    }


def vocabulary_payload(d: Document) -> dict:
    vocab = extract_vocabulary([d])
    return {
        "documentId": d.id,
        "terms": [{
            "name": e.name,
            "arity": e.arity,
            "arities": list(e.arities),
            "conflict": e.conflict,
            "occurrences": [{"documentId": doc_id,
                             "span": [span[0], span[1]]}
                            for doc_id, span in e.occurrences],
        } for e in vocab.entries],
    }


def consistency_payload(d: Document,
                        limits: ResourceLimits = DEFAULT_LIMITS) -> dict:
    compiled = compile_document(d)
    result = check_consistency(compiled.theory(), limits)
    return {
        "documentId": d.id,
        "formulas": _formula_listing(compiled),
        "consistency": consistency_jsonable(result),
    }


def independence_payload(d: Document,
                         limits: ResourceLimits = DEFAULT_LIMITS) -> dict:
    compiled = compile_document(d)
    t = compiled.theory()
    if t.formulas:
        report = check_independence(t, limits)
    else:
        report = FormalizationReport(check_consistency(t, limits), {})
    out = formalization_report_jsonable(report)
    out["documentId"] = d.id
    out["formulas"] = _formula_listing(compiled)
    return out


def exec_payload(legislation: Document, query: Document,
                 limits: ResourceLimits = DEFAULT_LIMITS) -> dict:
    require_kind(legislation, DOC_LEGISLATION)
    t = compile_document(legislation).theory()
    spec = document_query_spec(query)
    result = run_query(t, spec, limits)
    out = query_result_jsonable(result)
    out["queryId"] = query.id
    out["legislationId"] = legislation.id
    return out


def test_payload(legislation: Document, queries: Iterable[Document],
                 limits: ResourceLimits = DEFAULT_LIMITS) -> dict:
    """Run the test-marked queries (title starting with the test prefix)
    against a legislation document."""
    require_kind(legislation, DOC_LEGISLATION)
    t = compile_document(legislation).theory()
    specs = [document_query_spec(q) for q in queries]
    out = test_report_jsonable(run_test_suite(t, specs, limits))
    out["legislationId"] = legislation.id
    return out
