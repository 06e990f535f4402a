"""Reasoning services over a Theory.

Four analyses, all stateless and each owning its prover run:

* consistency: is falsum underivable, i.e. does the theory have a model?
* independence: for every formula, would the rest of the theory already
  prove it?  Dependent formulas are redundant and usually a sign that the
  formalization says less than its author thinks.
* query execution: theory + case facts |- goal, with the verdict backed by
  a replayable certificate or a countermodel.
* test suite: run every query whose name marks it as a test ("Test "
  prefix) and tally pass/fail, where passing means the goal was proved.

Unknown verdicts from the prover pass through untouched.  Calls are
independent of each other, so callers may run them concurrently.
"""

import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .embedding import compile_theory
from .kripke import KripkeCountermodel, model_jsonable
from .prover import (
    DEFAULT_LIMITS, CounterSatisfiable, Proved, ResourceLimits, prove,
)
from .resolution import ProofCertificate, certificate_jsonable
from .syntax import (
    ClosedFormula, NamedFormula, Signature, Theory, collect_signature,
)

# wire names for verdicts; shared by the CLI and the HTTP gateway
VALID = "Valid"
COUNTER_SATISFIABLE = "CounterSatisfiable"
UNKNOWN = "Unknown"

CONSISTENT = "Consistent"
INCONSISTENT = "Inconsistent"

INDEPENDENT = "Independent"
DEPENDENT = "Dependent"

TEST_PREFIX = "Test "


@dataclass(frozen=True)
class QuerySpec:
    """A named entailment question: case facts plus a goal."""

    name: str
    goal: ClosedFormula
    assumptions: Tuple[NamedFormula, ...] = ()

    @property
    def is_test(self) -> bool:
        return self.name.startswith(TEST_PREFIX)


@dataclass(frozen=True)
class QueryResult:
    verdict: str
    elapsed_ms: int
    limits: ResourceLimits
    certificate: Optional[ProofCertificate] = None
    model: Optional[KripkeCountermodel] = None
    reason: Optional[str] = None


@dataclass(frozen=True)
class ConsistencyResult:
    status: str  # Consistent | Inconsistent | Unknown
    elapsed_ms: int
    limits: ResourceLimits
    # refutation of the axioms themselves, present when inconsistent
    certificate: Optional[ProofCertificate] = None
    model: Optional[KripkeCountermodel] = None
    reason: Optional[str] = None


@dataclass(frozen=True)
class IndependenceStatus:
    status: str  # Independent | Dependent | Unknown
    certificate: Optional[ProofCertificate] = None
    reason: Optional[str] = None


@dataclass(frozen=True)
class FormalizationReport:
    consistency: ConsistencyResult
    per_formula: Dict[str, IndependenceStatus]


@dataclass(frozen=True)
class TestEntry:
    name: str
    verdict: str
    passed: bool


@dataclass(frozen=True)
class TestReport:
    entries: Tuple[TestEntry, ...]
    total: int
    passed: int
    failed: int


def _timed_prove(cs, limits: ResourceLimits):
    started = time.monotonic()
    result = prove(cs, limits)
    elapsed_ms = int((time.monotonic() - started) * 1000)
    return result, elapsed_ms


def check_consistency(t: Theory,
                      limits: ResourceLimits = DEFAULT_LIMITS) -> ConsistencyResult:
    """Satisfiability of the whole theory.  A refutation with no goal is a
    derivation of falsum from the axioms alone."""
    cs = compile_theory(t.formulas, signature=t.signature)
    result, elapsed_ms = _timed_prove(cs, limits)
    if isinstance(result, Proved):
        return ConsistencyResult(INCONSISTENT, elapsed_ms, limits,
                                 certificate=result.certificate)
    if isinstance(result, CounterSatisfiable):
        return ConsistencyResult(CONSISTENT, elapsed_ms, limits,
                                 model=result.model)
    return ConsistencyResult(UNKNOWN, elapsed_ms, limits, reason=result.reason)


def check_independence(t: Theory,
                       limits: ResourceLimits = DEFAULT_LIMITS) -> FormalizationReport:
    """Per-formula redundancy check: a formula is dependent when the rest
    of the theory proves it, witnessed by a certificate."""
    if not t.formulas:
        raise ValueError("independence needs at least one formula")
    consistency = check_consistency(t, limits)
    per_formula: Dict[str, IndependenceStatus] = {}
    for nf in t.formulas:
        rest = t.without(nf.name)
        cs = compile_theory(rest.formulas, negated_goal=nf,
                            signature=t.signature)
        result, _elapsed = _timed_prove(cs, limits)
        if isinstance(result, Proved):
            per_formula[nf.name] = IndependenceStatus(
                DEPENDENT, certificate=result.certificate)
        elif isinstance(result, CounterSatisfiable):
            per_formula[nf.name] = IndependenceStatus(INDEPENDENT)
        else:
            per_formula[nf.name] = IndependenceStatus(UNKNOWN,
                                                      reason=result.reason)
    return FormalizationReport(consistency, per_formula)


def _merged_signature(t: Theory, q: QuerySpec) -> Signature:
    merged = t.signature
    for nf in q.assumptions:
        merged = merged.merge(collect_signature(nf.closed.formula))
    return merged.merge(collect_signature(q.goal.formula))


def run_query(t: Theory, q: QuerySpec,
              limits: ResourceLimits = DEFAULT_LIMITS) -> QueryResult:
    """Does the theory plus the query's assumptions entail its goal?

    Signature conflicts between the theory and the query (same symbol,
    different arity or kind) surface as ArityError before any proving.
    """
    signature = _merged_signature(t, q)
    names = {nf.name for nf in t.formulas}
    for nf in q.assumptions:
        if nf.name in names:
            raise ValueError(f"assumption name already used by the theory: {nf.name!r}")
        names.add(nf.name)
    goal = NamedFormula(q.name, q.goal)
    axioms = tuple(t.formulas) + tuple(q.assumptions)
    cs = compile_theory(axioms, negated_goal=goal, signature=signature)
    result, elapsed_ms = _timed_prove(cs, limits)
    if isinstance(result, Proved):
        return QueryResult(VALID, elapsed_ms, limits,
                           certificate=result.certificate)
    if isinstance(result, CounterSatisfiable):
        return QueryResult(COUNTER_SATISFIABLE, elapsed_ms, limits,
                           model=result.model)
    return QueryResult(UNKNOWN, elapsed_ms, limits, reason=result.reason)


def run_test_suite(t: Theory, queries: Iterable[QuerySpec],
                   limits: ResourceLimits = DEFAULT_LIMITS) -> TestReport:
    """Run every test-marked query; a test passes iff its goal is proved."""
    entries: List[TestEntry] = []
    for q in queries:
        if not q.is_test:
            continue
        result = run_query(t, q, limits)
        entries.append(TestEntry(q.name, result.verdict,
                                 result.verdict == VALID))
    passed = sum(1 for e in entries if e.passed)
    return TestReport(tuple(entries), len(entries), passed,
                      len(entries) - passed)


# ---------------------------------------------------------------------------
# JSON shapes (shared verbatim by the CLI and the HTTP gateway)
# ---------------------------------------------------------------------------

def limits_jsonable(limits: ResourceLimits) -> dict:
    return {
        "maxDepth": limits.max_depth,
        "timeBudgetMs": limits.time_budget_ms,
        "maxGroundAtoms": limits.max_ground_atoms,
    }


def _evidence(out: dict, certificate, model, reason) -> dict:
    out["certificate"] = (None if certificate is None
                          else certificate_jsonable(certificate))
    out["model"] = None if model is None else model_jsonable(model)
    if reason is not None:
        out["reason"] = reason
    return out


def query_result_jsonable(r: QueryResult) -> dict:
    out = {
        "verdict": r.verdict,
        "elapsedMs": r.elapsed_ms,
        "limitsUsed": limits_jsonable(r.limits),
    }
    return _evidence(out, r.certificate, r.model, r.reason)


def consistency_jsonable(r: ConsistencyResult) -> dict:
    out = {
        "status": r.status,
        "elapsedMs": r.elapsed_ms,
        "limitsUsed": limits_jsonable(r.limits),
    }
    return _evidence(out, r.certificate, r.model, r.reason)


def independence_status_jsonable(s: IndependenceStatus) -> dict:
    out = {"status": s.status}
    return _evidence(out, s.certificate, None, s.reason)


def formalization_report_jsonable(r: FormalizationReport) -> dict:
    return {
        "consistency": consistency_jsonable(r.consistency),
        "perFormula": {name: independence_status_jsonable(s)
                       for name, s in r.per_formula.items()},
    }


def test_report_jsonable(r: TestReport) -> dict:
    return {
        "tests": [{"name": e.name, "verdict": e.verdict, "passed": e.passed}
                  for e in r.entries],
        "total": r.total,
        "passed": r.passed,
        "failed": r.failed,
    }
