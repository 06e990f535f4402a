"""Saturation prover: binary resolution and factoring over the clause layer.

The calculus is unrestricted binary resolution plus positive/negative
factoring, which is refutationally complete for first-order clause logic.
No set-of-support restriction is applied: consistency checking needs
refutations whose every leaf is an axiom, so the goal clauses get no
special status.

Determinism: clauses carry integer ids in creation order; the given-clause
loop selects, every third iteration, the oldest passive clause, and
otherwise the lightest one (fewest symbols, ties by id).  Derived clauses
are renamed to a canonical variable spelling on creation.  For fixed input
and limits the derivation, and hence the certificate, is reproducible.

Certificates list every inference on the path to the empty clause.  A step
names its parents (input clauses by their position in the clause set,
derived clauses by position after the inputs), the literal indices
resolved or factored, and the unifier over the prefix-renamed parents
(left parent variables get an ``L`` prefix, right parent an ``R``;
factoring renames with ``L``).  ``check_proof`` replays each step by
applying the recorded substitution and comparing syntactically, so a
certificate is evidence independent of the search that produced it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .embedding import ClauseSet
from .fol import (
    Clause, FApp, FTerm, FVar, Literal, Substitution, canonical_rename,
    clause_variables, prefix_rename, print_clause, print_fterm,
    resolve_substitution, substitute, substitute_literal, unify_literals,
)

RULE_RESOLVE = "resolve"
RULE_FACTOR = "factor"


class MalformedCertificateError(Exception):
    """The certificate is structurally unusable against this clause set
    (bad ids or indices, or it does not end in the empty clause) as opposed
    to merely failing to replay."""


@dataclass(frozen=True)
class ProofStep:
    rule: str
    parents: tuple  # one id for factor, two for resolve
    literals: tuple  # literal index per parent
    substitution: tuple  # ((FVar, FTerm), ...) over the prefix-renamed parents
    result: Clause


@dataclass(frozen=True)
class ProofCertificate:
    steps: tuple

    def to_lines(self) -> List[str]:
        lines = []
        for k, step in enumerate(self.steps):
            refs = " ".join(f"{p}.{i}" for p, i in zip(step.parents, step.literals))
            binds = ", ".join(f"{var.name}:{var.sort}={print_fterm(term)}"
                              for var, term in step.substitution)
            lines.append(f"{k}: {step.rule} {refs} [{binds}] => {print_clause(step.result)}")
        return lines

    def to_text(self) -> str:
        return "\n".join(self.to_lines()) + "\n"


# ---------------------------------------------------------------------------
# JSON-friendly serialization (the shape the gateway returns)
# ---------------------------------------------------------------------------

def _term_jsonable(term: FTerm) -> dict:
    if isinstance(term, FVar):
        return {"var": term.name, "sort": term.sort}
    return {"fun": term.symbol, "sort": term.sort,
            "args": [_term_jsonable(a) for a in term.args]}

def _term_from_jsonable(data: dict) -> FTerm:
    if "var" in data:
        return FVar(data["var"], data["sort"])
    return FApp(data["fun"], tuple(_term_from_jsonable(a) for a in data["args"]),
                data["sort"])

def _literal_jsonable(lit: Literal) -> dict:
    return {"sign": lit.positive, "predicate": lit.predicate,
            "args": [_term_jsonable(a) for a in lit.args]}

def _literal_from_jsonable(data: dict) -> Literal:
    return Literal(data["sign"], data["predicate"],
                   tuple(_term_from_jsonable(a) for a in data["args"]))

def certificate_jsonable(cert: ProofCertificate) -> dict:
    return {"steps": [
        {"rule": s.rule, "parents": list(s.parents), "literals": list(s.literals),
         "substitution": [
             {"var": v.name, "sort": v.sort, "term": _term_jsonable(t)}
             for v, t in s.substitution],
         "result": [_literal_jsonable(l) for l in s.result.literals]}
        for s in cert.steps]}

def certificate_from_jsonable(data: dict) -> ProofCertificate:
    steps = []
    for s in data["steps"]:
        steps.append(ProofStep(
            s["rule"], tuple(s["parents"]), tuple(s["literals"]),
            tuple((FVar(b["var"], b["sort"]), _term_from_jsonable(b["term"]))
                  for b in s["substitution"]),
            Clause(tuple(_literal_from_jsonable(l) for l in s["result"]))))
    return ProofCertificate(tuple(steps))


# ---------------------------------------------------------------------------
# Subsumption
# ---------------------------------------------------------------------------

def _match_term(pattern: FTerm, target: FTerm, binding: Substitution) -> Optional[Substitution]:
    """One-way matching: pattern variables bind, target is rigid."""
    if isinstance(pattern, FVar):
        bound = binding.get(pattern)
        if bound is not None:
            return binding if bound == target else None
        if pattern.sort != target.sort:
            return None
        binding = dict(binding)
        binding[pattern] = target
        return binding
    if isinstance(target, FVar):
        return None
    if pattern.symbol != target.symbol or len(pattern.args) != len(target.args):
        return None
    for p, t in zip(pattern.args, target.args):
        binding = _match_term(p, t, binding)
        if binding is None:
            return None
    return binding


def subsumes(general: Clause, specific: Clause) -> bool:
    """Theta-subsumption: some substitution maps every literal of
    ``general`` onto a literal of ``specific``.  ``general`` is renamed
    apart first so shared variable names cannot alias."""
    if len(general.literals) > len(specific.literals):
        return False
    renamed, _ = prefix_rename(general, "S")

    def extend(index: int, binding: Substitution) -> bool:
        if index == len(renamed.literals):
            return True
        lit = renamed.literals[index]
        for candidate in specific.literals:
            if candidate.positive != lit.positive or candidate.predicate != lit.predicate:
                continue
            if len(candidate.args) != len(lit.args):
                continue
            attempt: Optional[Substitution] = binding
            for p, t in zip(lit.args, candidate.args):
                attempt = _match_term(p, t, attempt)
                if attempt is None:
                    break
            if attempt is not None and extend(index + 1, attempt):
                return True
        return False

    return extend(0, {})


# ---------------------------------------------------------------------------
# Inference rules (shared by search and replay)
# ---------------------------------------------------------------------------

def _frozen_substitution(subst: Substitution) -> tuple:
    flat = resolve_substitution(subst)
    return tuple(sorted(flat.items(), key=lambda kv: (kv[0].sort, kv[0].name)))


def _resolvent(left: Clause, right: Clause, li: int, ri: int,
               subst: Substitution) -> Clause:
    keep = [substitute_literal(subst, lit)
            for k, lit in enumerate(left.literals) if k != li]
    keep += [substitute_literal(subst, lit)
             for k, lit in enumerate(right.literals) if k != ri]
    deduped: List[Literal] = []
    for lit in keep:
        if lit not in deduped:
            deduped.append(lit)
    return canonical_rename(Clause(tuple(deduped)))


def _factor_result(clause: Clause, keep_index: int, drop_index: int,
                   subst: Substitution) -> Clause:
    kept = [substitute_literal(subst, lit)
            for k, lit in enumerate(clause.literals) if k != drop_index]
    deduped: List[Literal] = []
    for lit in kept:
        if lit not in deduped:
            deduped.append(lit)
    return canonical_rename(Clause(tuple(deduped)))


# ---------------------------------------------------------------------------
# The prover
# ---------------------------------------------------------------------------

class SaturationProver:
    """Incremental given-clause saturation over a ClauseSet.

    ``step(iterations)`` runs a bounded number of given-clause rounds so a
    caller can interleave saturation with other work (the countermodel
    search).  Results: ("proved", certificate), ("saturated", depth_limited:
    bool) when the passive queue empties, or None while work remains.
    """

    def __init__(self, cs: ClauseSet, max_depth: int = 30,
                 deadline: Optional[float] = None):
        self.cs = cs
        self.max_depth = max_depth
        self.deadline = deadline
        self.clauses: List[Clause] = list(cs.clauses)
        self.depths: List[int] = [0] * len(self.clauses)
        self.steps: Dict[int, ProofStep] = {}
        self.active: List[int] = []
        self.passive: List[int] = list(range(len(self.clauses)))
        self.iteration = 0
        self.depth_limited = False
        self._done: Optional[tuple] = None
        # clause form of any formula has at least one literal per clause
        assert not any(c.is_empty() for c in self.clauses), "falsum in input"

    # -- selection ----------------------------------------------------------

    def _select(self) -> int:
        if self.iteration % 3 == 0:
            chosen = min(self.passive)
        else:
            chosen = min(self.passive,
                         key=lambda cid: (self.clauses[cid].symbol_count(), cid))
        self.passive.remove(chosen)
        return chosen

    # -- derived clause intake ----------------------------------------------

    def _admit(self, clause: Clause, step: ProofStep, depth: int) -> Optional[int]:
        if depth > self.max_depth:
            self.depth_limited = True
            return None
        if clause.is_tautology():
            return None
        if not clause.is_empty():
            for aid in self.active:
                if subsumes(self.clauses[aid], clause):
                    return None
        cid = len(self.clauses)
        self.clauses.append(clause)
        self.depths.append(depth)
        self.steps[cid] = step
        self.passive.append(cid)
        return cid

    def _infer_around(self, given_id: int) -> Optional[int]:
        """All factors of the given clause and all resolvents against the
        active set; returns the id of an empty clause if one appears."""
        given = self.clauses[given_id]
        gdepth = self.depths[given_id]

        renamed_given, _ = prefix_rename(given, "L")
        for i in range(len(renamed_given.literals)):
            for j in range(i + 1, len(renamed_given.literals)):
                a, b = renamed_given.literals[i], renamed_given.literals[j]
                if a.positive != b.positive:
                    continue
                unifier = unify_literals(a, b)
                if unifier is None:
                    continue
                frozen = _frozen_substitution(unifier)
                result = _factor_result(renamed_given, i, j, dict(frozen))
                step = ProofStep(RULE_FACTOR, (given_id,), (i, j), frozen, result)
                cid = self._admit(result, step, gdepth + 1)
                if cid is not None and result.is_empty():
                    return cid

        for other_id in list(self.active):
            other = self.clauses[other_id]
            left, _ = prefix_rename(given, "L")
            right, _ = prefix_rename(other, "R")
            for li, llit in enumerate(left.literals):
                for ri, rlit in enumerate(right.literals):
                    if llit.positive == rlit.positive:
                        continue
                    unifier = unify_literals(llit, rlit)
                    if unifier is None:
                        continue
                    frozen = _frozen_substitution(unifier)
                    result = _resolvent(left, right, li, ri, dict(frozen))
                    step = ProofStep(RULE_RESOLVE, (given_id, other_id),
                                     (li, ri), frozen, result)
                    depth = max(gdepth, self.depths[other_id]) + 1
                    cid = self._admit(result, step, depth)
                    if cid is not None and result.is_empty():
                        return cid
        return None

    # -- public stepping ------------------------------------------------------

    def step(self, iterations: int) -> Optional[tuple]:
        if self._done is not None:
            return self._done
        for _ in range(iterations):
            if self.deadline is not None and time.monotonic() > self.deadline:
                return None  # caller notices the deadline itself
            if not self.passive:
                self._done = ("saturated", self.depth_limited)
                return self._done
            self.iteration += 1
            given_id = self._select()
            given = self.clauses[given_id]
            if given.is_tautology():
                continue
            if any(subsumes(self.clauses[aid], given) for aid in self.active):
                continue
            empty_id = self._infer_around(given_id)
            self.active.append(given_id)
            if empty_id is not None:
                self._done = ("proved", self._certificate(empty_id))
                return self._done
        return None

    def exhaust(self, max_iterations: int = 10_000_000) -> tuple:
        result = self.step(max_iterations)
        if result is None:
            raise TimeoutError("saturation ran out of its iteration allowance")
        return result

    # -- certificate extraction ----------------------------------------------

    def _certificate(self, empty_id: int) -> ProofCertificate:
        base = len(self.cs.clauses)
        needed: Set[int] = set()
        stack = [empty_id]
        while stack:
            cid = stack.pop()
            if cid < base or cid in needed:
                continue
            needed.add(cid)
            stack.extend(self.steps[cid].parents)
        ordered = sorted(needed)
        renumber = {cid: base + k for k, cid in enumerate(ordered)}
        steps = []
        for cid in ordered:
            step = self.steps[cid]
            parents = tuple(renumber.get(p, p) for p in step.parents)
            steps.append(ProofStep(step.rule, parents, step.literals,
                                   step.substitution, step.result))
        return ProofCertificate(tuple(steps))


# ---------------------------------------------------------------------------
# Certificate replay
# ---------------------------------------------------------------------------

def check_proof(cs: ClauseSet, cert: ProofCertificate) -> bool:
    """Replay a certificate against a clause set.

    Raises MalformedCertificateError when the certificate cannot even be
    interpreted (unknown rule, id or literal index out of range, no steps,
    or a final step that is not the empty clause).  Returns False when the
    structure is fine but some step fails to replay: wrong signs, recorded
    substitution does not equate the atoms, or the derived clause differs
    from the recorded one.
    """
    if not cert.steps:
        raise MalformedCertificateError("certificate has no steps")
    if not cert.steps[-1].result.is_empty():
        raise MalformedCertificateError("final step does not derive the empty clause")

    clauses: List[Clause] = list(cs.clauses)
    for k, step in enumerate(cert.steps):
        if step.rule not in (RULE_RESOLVE, RULE_FACTOR):
            raise MalformedCertificateError(f"step {k}: unknown rule {step.rule!r}")
        expected_parents = 2 if step.rule == RULE_RESOLVE else 1
        if len(step.parents) != expected_parents or len(step.literals) != expected_parents + (
                0 if step.rule == RULE_RESOLVE else 1):
            raise MalformedCertificateError(f"step {k}: wrong parent or index count")
        for parent in step.parents:
            if not 0 <= parent < len(clauses):
                raise MalformedCertificateError(f"step {k}: no clause with id {parent}")

        subst = dict(step.substitution)
        if step.rule == RULE_RESOLVE:
            left, _ = prefix_rename(clauses[step.parents[0]], "L")
            right, _ = prefix_rename(clauses[step.parents[1]], "R")
            li, ri = step.literals
            if not (0 <= li < len(left.literals) and 0 <= ri < len(right.literals)):
                raise MalformedCertificateError(f"step {k}: literal index out of range")
            llit, rlit = left.literals[li], right.literals[ri]
            if llit.positive == rlit.positive:
                return False
            if substitute_literal(subst, llit).negated() != substitute_literal(subst, rlit):
                return False
            derived = _resolvent(left, right, li, ri, subst)
        else:
            parent, _ = prefix_rename(clauses[step.parents[0]], "L")
            i, j = step.literals
            if not (0 <= i < len(parent.literals) and 0 <= j < len(parent.literals)):
                raise MalformedCertificateError(f"step {k}: literal index out of range")
            if i == j:
                raise MalformedCertificateError(f"step {k}: factoring a literal with itself")
            a, b = parent.literals[i], parent.literals[j]
            if a.positive != b.positive:
                return False
            if substitute_literal(subst, a) != substitute_literal(subst, b):
                return False
            derived = _factor_result(parent, i, j, subst)

        if derived != step.result:
            return False
        clauses.append(step.result)
    return True
