"""Two-sorted first-order clause layer: terms, literals, clauses, unification.

Everything downstream of the modal embedding lives in a classical clause
language with two sorts, ``i`` (individuals) and ``w`` (worlds).  Domain
predicates carry their world argument last; the two accessibility relations
``r_d`` and ``r_i`` relate worlds directly.  The reserved symbol names are
``w0`` (the actual world), ``r_d``/``r_i``, ``d0`` (the default individual
constant used when a theory has variables but no constants), and the
``sk_*`` family (Skolem functions).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple, Union

SORT_INDIVIDUAL = "i"
SORT_WORLD = "w"

R_D = "r_d"
R_I = "r_i"
ACCESSIBILITY = (R_D, R_I)
WORLD_ACTUAL = "w0"
DEFAULT_INDIVIDUAL = "d0"
SKOLEM_PREFIX = "sk_"

RESERVED_NAMES = frozenset({R_D, R_I, WORLD_ACTUAL, DEFAULT_INDIVIDUAL})


@dataclass(frozen=True)
class FVar:
    name: str
    sort: str


@dataclass(frozen=True)
class FApp:
    """Function application; the sort is that of the value.  Argument sorts
    are whatever the symbol was built with (world Skolem functions may take
    arguments of both sorts)."""

    symbol: str
    args: tuple
    sort: str


FTerm = Union[FVar, FApp]


def world_const(name: str) -> FApp:
    return FApp(name, (), SORT_WORLD)


def individual_const(name: str) -> FApp:
    return FApp(name, (), SORT_INDIVIDUAL)


ACTUAL = world_const(WORLD_ACTUAL)


@dataclass(frozen=True)
class Literal:
    """Signed atom.  ``predicate`` is a domain predicate (world arg last)
    or one of the accessibility relations."""

    positive: bool
    predicate: str
    args: tuple

    def negated(self) -> "Literal":
        return Literal(not self.positive, self.predicate, self.args)

    def same_atom(self, other: "Literal") -> bool:
        return self.predicate == other.predicate and self.args == other.args


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals; the empty clause is falsum."""

    literals: tuple

    def is_empty(self) -> bool:
        return not self.literals

    def is_tautology(self) -> bool:
        for i, lit in enumerate(self.literals):
            for other in self.literals[i + 1:]:
                if lit.positive != other.positive and lit.same_atom(other):
                    return True
        return False

    def symbol_count(self) -> int:
        total = 0
        for lit in self.literals:
            total += 1
            for arg in lit.args:
                total += term_size(arg)
        return total


def term_size(term: FTerm) -> int:
    if isinstance(term, FVar):
        return 1
    return 1 + sum(term_size(a) for a in term.args)


def term_variables(term: FTerm) -> Iterator[FVar]:
    if isinstance(term, FVar):
        yield term
    else:
        for arg in term.args:
            yield from term_variables(arg)


def clause_variables(clause: Clause) -> Iterator[FVar]:
    for lit in clause.literals:
        for arg in lit.args:
            yield from term_variables(arg)


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

Substitution = Dict[FVar, FTerm]


def substitute(subst: Substitution, term: FTerm) -> FTerm:
    if isinstance(term, FVar):
        bound = subst.get(term)
        if bound is None or bound == term:
            return term
        # bindings may chain (triangular form built during unification)
        return substitute(subst, bound)
    if not term.args:
        return term
    return FApp(term.symbol, tuple(substitute(subst, a) for a in term.args), term.sort)


def substitute_literal(subst: Substitution, lit: Literal) -> Literal:
    return Literal(lit.positive, lit.predicate,
                   tuple(substitute(subst, a) for a in lit.args))


def substitute_clause(subst: Substitution, clause: Clause) -> Clause:
    return Clause(tuple(substitute_literal(subst, lit) for lit in clause.literals))


def _occurs(var: FVar, term: FTerm, subst: Substitution) -> bool:
    if isinstance(term, FVar):
        if term == var:
            return True
        bound = subst.get(term)
        return bound is not None and _occurs(var, bound, subst)
    return any(_occurs(var, a, subst) for a in term.args)


def unify_terms(s: FTerm, t: FTerm, subst: Optional[Substitution] = None) -> Optional[Substitution]:
    """Most general unifier extending ``subst``, or None.  Syntactic
    unification with occurs-check; variables only bind within their sort."""
    if subst is None:
        subst = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        while isinstance(a, FVar) and a in subst:
            a = subst[a]
        while isinstance(b, FVar) and b in subst:
            b = subst[b]
        if a == b:
            continue
        if isinstance(a, FVar):
            if a.sort != b.sort:
                return None
            if _occurs(a, b, subst):
                return None
            subst[a] = b
        elif isinstance(b, FVar):
            if b.sort != a.sort:
                return None
            if _occurs(b, a, subst):
                return None
            subst[b] = a
        else:
            if a.symbol != b.symbol or len(a.args) != len(b.args) or a.sort != b.sort:
                return None
            stack.extend(zip(a.args, b.args))
    return subst


def unify_literals(a: Literal, b: Literal,
                   subst: Optional[Substitution] = None) -> Optional[Substitution]:
    """Unify two literals' atoms (signs are the caller's business)."""
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    working = dict(subst) if subst else {}
    for x, y in zip(a.args, b.args):
        result = unify_terms(x, y, working)
        if result is None:
            return None
        working = result
    return working


def resolve_substitution(subst: Substitution) -> Substitution:
    """Flatten a triangular substitution so every binding is fully applied."""
    return {var: substitute(subst, var) for var in subst}


# ---------------------------------------------------------------------------
# Renaming
# ---------------------------------------------------------------------------

def canonical_rename(clause: Clause) -> Clause:
    """Rename variables to X0, X1, ... (individuals) and W0, W1, ...
    (worlds) in first-occurrence order.  Gives every stored clause a
    stable, input-independent spelling."""
    mapping: Substitution = {}
    counters = {SORT_INDIVIDUAL: 0, SORT_WORLD: 0}
    prefixes = {SORT_INDIVIDUAL: "X", SORT_WORLD: "W"}
    for var in clause_variables(clause):
        if var not in mapping:
            fresh = FVar(f"{prefixes[var.sort]}{counters[var.sort]}", var.sort)
            counters[var.sort] += 1
            mapping[var] = fresh
    return substitute_clause(mapping, clause)


def prefix_rename(clause: Clause, prefix: str) -> Tuple[Clause, Substitution]:
    """Prepend ``prefix`` to every variable name; returns the renamed clause
    and the renaming map.  Used to make resolution parents variable-disjoint
    in a way a certificate checker can reproduce."""
    mapping: Substitution = {}
    for var in clause_variables(clause):
        if var not in mapping:
            mapping[var] = FVar(prefix + var.name, var.sort)
    return substitute_clause(mapping, clause), mapping


# ---------------------------------------------------------------------------
# Printing (shared by debug output, certificates, and the TPTP exporter)
# ---------------------------------------------------------------------------

def print_fterm(term: FTerm) -> str:
    if isinstance(term, FVar):
        return term.name
    if not term.args:
        return term.symbol
    return f"{term.symbol}({','.join(print_fterm(a) for a in term.args)})"


def print_literal(lit: Literal) -> str:
    sign = "" if lit.positive else "~"
    if not lit.args:
        return f"{sign}{lit.predicate}"
    return f"{sign}{lit.predicate}({','.join(print_fterm(a) for a in lit.args)})"


def print_clause(clause: Clause) -> str:
    if clause.is_empty():
        return "$false"
    return " | ".join(print_literal(lit) for lit in clause.literals)
