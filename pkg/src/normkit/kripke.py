"""Bounded countermodel search over serial bi-relational Kripke structures.

Works on individually-ground clause sets (world variables may remain).  For
a world count k the structure is described by Boolean variables:

  1. edge variables rd[i][j] and ri[i][j] for every world pair,
  2. valuation variables val[t][w] for every ground atom template t
     (predicate plus individual arguments, world stripped) and world w,
  3. selector variables ftab[f,args][j], one-hot per application of a
     Skolem world function to ground arguments, reading "f(args) is
     world j".

Clauses are instantiated over all assignments of their world variables;
a literal mentioning Skolem world terms is expanded against the selector
variables (the clause fires only under the matching selector choices, and
a one-hot constraint per application makes the table a function).  The
seriality clauses of the input then force every world to have successors
in both relations, so any satisfying assignment is a legal structure.

The search is deterministic: variables are numbered in a fixed documented
order (edges, valuations, then selectors in first-encounter order during
instantiation), and the solver is a chronological DPLL with unit
propagation that always decides the lowest-numbered unassigned variable,
False first.  The first model found is therefore the lexicographically
least satisfying assignment in that variable order; re-running on equal
input reproduces it bit for bit.  World counts are tried in increasing
order, so the returned model also has the fewest worlds the bound allows.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .embedding import ClauseSet, ground_if_finite
from .fol import (
    Clause, FApp, FTerm, FVar, Literal, R_D, R_I, SORT_INDIVIDUAL,
    SORT_WORLD, WORLD_ACTUAL, print_fterm,
)


class SearchAborted(Exception):
    """The time budget expired inside the model search."""


@dataclass(frozen=True)
class KripkeCountermodel:
    """A finite bi-relational structure refuting an entailment.

    ``valuation`` maps ((predicate, individual args), world) to a truth
    value, with individual args spelled as constant names.  The
    ``world_functions`` table interprets the Skolem world functions that
    clausification introduced; checkModel needs it to evaluate clauses
    containing those terms.
    """

    worlds: tuple
    actual: str
    r_d: frozenset
    r_i: frozenset
    valuation: dict
    world_functions: dict

    def to_lines(self) -> List[str]:
        lines = [f"worlds: {' '.join(self.worlds)}", f"actual: {self.actual}"]
        for name, rel in (("r_d", self.r_d), ("r_i", self.r_i)):
            pairs = " ".join(f"{a}->{b}" for a, b in sorted(rel))
            lines.append(f"{name}: {pairs}")
        for (template, world), value in sorted(self.valuation.items()):
            predicate, args = template
            spelled = f"{predicate}({','.join(args)})" if args else predicate
            lines.append(f"{spelled} @ {world} = {'true' if value else 'false'}")
        for (symbol, args), world in sorted(self.world_functions.items()):
            lines.append(f"{symbol}({','.join(args)}) = {world}")
        return lines

    def to_text(self) -> str:
        return "\n".join(self.to_lines()) + "\n"


def model_jsonable(m: KripkeCountermodel) -> dict:
    return {
        "worlds": list(m.worlds),
        "actual": m.actual,
        "r_d": sorted([a, b] for a, b in m.r_d),
        "r_i": sorted([a, b] for a, b in m.r_i),
        "valuation": [
            {"predicate": template[0], "args": list(template[1]),
             "world": world, "value": value}
            for (template, world), value in sorted(m.valuation.items())],
        "world_functions": [
            {"function": symbol, "args": list(args), "world": world}
            for (symbol, args), world in sorted(m.world_functions.items())],
    }


def model_from_jsonable(data: dict) -> KripkeCountermodel:
    return KripkeCountermodel(
        worlds=tuple(data["worlds"]),
        actual=data["actual"],
        r_d=frozenset((a, b) for a, b in data["r_d"]),
        r_i=frozenset((a, b) for a, b in data["r_i"]),
        valuation={((e["predicate"], tuple(e["args"])), e["world"]): e["value"]
                   for e in data["valuation"]},
        world_functions={(e["function"], tuple(e["args"])): e["world"]
                         for e in data["world_functions"]},
    )


# ---------------------------------------------------------------------------
# Ground term spelling
# ---------------------------------------------------------------------------

def _individual_key(term: FTerm) -> str:
    assert isinstance(term, FApp) and not term.args, "individual args must be ground constants"
    return term.symbol


def _world_name(index: int) -> str:
    return f"w{index}"


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

class _Encoding:
    def __init__(self, cs: ClauseSet, num_worlds: int):
        self.cs = cs
        self.k = num_worlds
        self.index: Dict[tuple, int] = {}
        self.order: List[tuple] = []
        self.sat_clauses: List[List[int]] = []
        self.templates = self._collect_templates()
        for i in range(self.k):
            for j in range(self.k):
                self._var(("rd", i, j))
        for i in range(self.k):
            for j in range(self.k):
                self._var(("ri", i, j))
        for template in self.templates:
            for w in range(self.k):
                self._var(("val", template, w))
        self._instantiate_all()

    def _var(self, name: tuple) -> int:
        got = self.index.get(name)
        if got is None:
            got = len(self.order) + 1
            self.index[name] = got
            self.order.append(name)
        return got

    def _collect_templates(self) -> List[tuple]:
        seen = set()
        for clause in self.cs.clauses:
            for lit in clause.literals:
                if lit.predicate in (R_D, R_I):
                    continue
                template = (lit.predicate,
                            tuple(_individual_key(a) for a in lit.args[:-1]))
                seen.add(template)
        return sorted(seen)

    def _selector(self, symbol: str, args: tuple) -> List[int]:
        """The k one-hot variables of one world-function application,
        creating them (plus the one-hot constraint) on first sight."""
        key = ("ftab", symbol, args)
        if key + (0,) not in self.index:
            variables = [self._var(key + (j,)) for j in range(self.k)]
            self.sat_clauses.append(list(variables))  # at least one
            for a, b in itertools.combinations(variables, 2):
                self.sat_clauses.append([-a, -b])  # at most one
        return [self.index[key + (j,)] for j in range(self.k)]

    def _world_value(self, term: FTerm, env: dict):
        """A ground world term under a world-variable assignment: either a
        world index, or ("fun", symbol, ground args) for a Skolem term."""
        if isinstance(term, FVar):
            return env[term]
        if term.symbol == WORLD_ACTUAL:
            return 0
        args = []
        for a in term.args:
            if a.sort == SORT_WORLD:
                value = self._world_value(a, env)
                assert isinstance(value, int), "nested Skolem world terms do not occur"
                args.append(_world_name(value))
            else:
                args.append(_individual_key(a))
        return ("fun", term.symbol, tuple(args))

    def _instantiate_all(self) -> None:
        for clause in self.cs.clauses:
            world_vars = []
            for lit in clause.literals:
                for arg in lit.args:
                    for var in _world_vars_of(arg):
                        if var not in world_vars:
                            world_vars.append(var)
            for combo in itertools.product(range(self.k), repeat=len(world_vars)):
                self._instantiate(clause, dict(zip(world_vars, combo)))

    def _instantiate(self, clause: Clause, env: dict) -> None:
        # evaluate world positions; collect the distinct Skolem applications
        evaluated = []
        applications: List[tuple] = []
        for lit in clause.literals:
            values = []
            for arg in lit.args:
                if arg.sort == SORT_WORLD:
                    value = self._world_value(arg, env)
                    if isinstance(value, tuple) and value not in applications:
                        applications.append(value)
                    values.append(value)
                else:
                    values.append(_individual_key(arg))
            evaluated.append((lit, values))

        for worlds in itertools.product(range(self.k), repeat=len(applications)):
            lookup = dict(zip(applications, worlds))
            sat_clause: List[int] = []
            for application, world in lookup.items():
                selector = self._selector(application[1], application[2])
                sat_clause.append(-selector[world])
            for lit, values in evaluated:
                resolved = [lookup.get(v, v) if isinstance(v, tuple) else v
                            for v in values]
                if lit.predicate == R_D or lit.predicate == R_I:
                    rel = "rd" if lit.predicate == R_D else "ri"
                    var = self._var((rel, resolved[0], resolved[1]))
                else:
                    template = (lit.predicate, tuple(resolved[:-1]))
                    var = self._var(("val", template, resolved[-1]))
                sat_clause.append(var if lit.positive else -var)
            self.sat_clauses.append(sat_clause)


def _world_vars_of(term: FTerm):
    if isinstance(term, FVar):
        if term.sort == SORT_WORLD:
            yield term
        return
    for arg in term.args:
        yield from _world_vars_of(arg)


# ---------------------------------------------------------------------------
# DPLL (chronological, fixed order, False first = lexicographically least)
# ---------------------------------------------------------------------------

def _dpll(num_vars: int, clauses: List[List[int]],
          deadline: Optional[float] = None) -> Optional[List[bool]]:
    assign: List[Optional[bool]] = [None] * (num_vars + 1)  # 1-based
    trail: List[int] = []
    checked = 0

    def lit_value(lit: int) -> Optional[bool]:
        value = assign[abs(lit)]
        if value is None:
            return None
        return value if lit > 0 else not value

    def propagate() -> bool:
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = None
                count = 0
                satisfied = False
                for lit in clause:
                    value = lit_value(lit)
                    if value is True:
                        satisfied = True
                        break
                    if value is None:
                        unassigned = lit
                        count += 1
                if satisfied:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    assign[abs(unassigned)] = unassigned > 0
                    trail.append(abs(unassigned))
                    changed = True
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            assign[trail.pop()] = None

    def solve() -> bool:
        nonlocal checked
        checked += 1
        if deadline is not None and checked % 256 == 0:
            if time.monotonic() > deadline:
                raise SearchAborted()
        mark = len(trail)
        if not propagate():
            undo(mark)
            return False
        decision = None
        for v in range(1, num_vars + 1):
            if assign[v] is None:
                decision = v
                break
        if decision is None:
            return True
        for choice in (False, True):
            submark = len(trail)
            assign[decision] = choice
            trail.append(decision)
            if solve():
                return True
            undo(submark)
        undo(mark)
        return False

    if solve():
        return [bool(assign[v]) for v in range(1, num_vars + 1)]
    return None


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def find_countermodel(cs: ClauseSet, max_worlds: int,
                      deadline: Optional[float] = None) -> Optional[KripkeCountermodel]:
    """First satisfying structure with at most max_worlds worlds, in the
    documented enumeration order, or None.  The clause set must be
    individually ground (run ground_if_finite first)."""
    for k in range(1, max_worlds + 1):
        model = find_countermodel_at(cs, k, deadline)
        if model is not None:
            return model
    return None


def find_countermodel_at(cs: ClauseSet, num_worlds: int,
                         deadline: Optional[float] = None) -> Optional[KripkeCountermodel]:
    encoding = _Encoding(cs, num_worlds)
    solution = _dpll(len(encoding.order), encoding.sat_clauses, deadline)
    if solution is None:
        return None
    values = dict(zip(encoding.order, solution))
    k = num_worlds
    r_d = frozenset((_world_name(i), _world_name(j))
                    for i in range(k) for j in range(k) if values[("rd", i, j)])
    r_i = frozenset((_world_name(i), _world_name(j))
                    for i in range(k) for j in range(k) if values[("ri", i, j)])
    valuation = {}
    for template in encoding.templates:
        for w in range(k):
            valuation[(template, _world_name(w))] = values[("val", template, w)]
    functions = {}
    for name in encoding.order:
        if name[0] == "ftab" and values[name]:
            _, symbol, args, j = name
            functions[(symbol, args)] = _world_name(j)
    return KripkeCountermodel(
        worlds=tuple(_world_name(i) for i in range(k)),
        actual=_world_name(0),
        r_d=r_d, r_i=r_i, valuation=valuation, world_functions=functions)


def check_model(cs: ClauseSet, m: KripkeCountermodel) -> bool:
    """Independent replay of the negative verdict: seriality of both
    relations, plus every clause true at every assignment of its world
    variables.  Individual variables are read as ranging over the constant
    symbols of the clause set, so the set is grounded first; a set that
    cannot be grounded has no checkable finite model."""
    grounded = ground_if_finite(cs)
    if grounded is None:
        return False
    cs = grounded
    worlds = list(m.worlds)
    for w in worlds:
        if not any(a == w for a, _ in m.r_d):
            return False
        if not any(a == w for a, _ in m.r_i):
            return False
    if m.actual not in worlds:
        return False

    def world_of(term: FTerm, env: dict) -> Optional[str]:
        if isinstance(term, FVar):
            return env[term]
        if term.symbol == WORLD_ACTUAL:
            return m.actual
        args = []
        for a in term.args:
            if a.sort == SORT_WORLD:
                inner = world_of(a, env)
                if inner is None:
                    return None
                args.append(inner)
            else:
                args.append(_individual_key(a))
        return m.world_functions.get((term.symbol, tuple(args)))

    for clause in cs.clauses:
        world_vars = []
        for lit in clause.literals:
            for arg in lit.args:
                for var in _world_vars_of(arg):
                    if var not in world_vars:
                        world_vars.append(var)
        for combo in itertools.product(worlds, repeat=len(world_vars)):
            env = dict(zip(world_vars, combo))
            satisfied = False
            for lit in clause.literals:
                if lit.predicate in (R_D, R_I):
                    a = world_of(lit.args[0], env)
                    b = world_of(lit.args[1], env)
                    if a is None or b is None:
                        continue  # uninterpreted function application
                    rel = m.r_d if lit.predicate == R_D else m.r_i
                    holds = (a, b) in rel
                else:
                    world = world_of(lit.args[-1], env)
                    if world is None:
                        continue
                    template = (lit.predicate,
                                tuple(_individual_key(a) for a in lit.args[:-1]))
                    value = m.valuation.get((template, world))
                    if value is None:
                        return False  # valuation not total over the atom set
                    holds = value
                if holds == lit.positive:
                    satisfied = True
                    break
            if not satisfied:
                return False
    return True
