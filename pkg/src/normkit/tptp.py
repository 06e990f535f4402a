"""TPTP-style CNF text format for clause sets.

One annotated clause per line:

    cnf(name, role, ( lit | lit | ... )).

Names are lower_words or single-quoted atoms (the original provenance
string, quoted when it is not a lower_word).  Roles are ``axiom`` and
``negated_conjecture``.  Literals print exactly like the internal clause
printer: ``~`` for negation, arguments in parentheses, variables
uppercase-initial, everything else lowercase-initial.  Lines starting with
``%`` are comments.

Importing infers the two sorts from positions: both arguments of ``r_d``
and ``r_i`` are worlds, the last argument of every other predicate is a
world and the rest are individuals.  Function and variable sorts are
solved by propagating those constraints through the whole file (so a world
Skolem function can take world arguments); anything left unconstrained is
an individual, and a symbol forced into both sorts is an error.
"""

import re
from typing import Dict, List, Optional, Tuple

from .embedding import ClauseSet, ROLE_AXIOM, ROLE_NEGATED_GOAL
from .fol import (
    ACCESSIBILITY, Clause, FApp, FTerm, FVar, Literal, SORT_INDIVIDUAL,
    SORT_WORLD, print_literal,
)


class TptpError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


_LOWER_WORD = re.compile(r"[a-z][A-Za-z0-9_]*\Z")

_ROLE_OUT = {ROLE_AXIOM: "axiom", ROLE_NEGATED_GOAL: "negated_conjecture"}
_ROLE_IN = {"axiom": ROLE_AXIOM, "negated_conjecture": ROLE_NEGATED_GOAL,
            # common aliases kept readable for hand-written files
            "hypothesis": ROLE_AXIOM, "conjecture": ROLE_NEGATED_GOAL}


def _name_out(name: str) -> str:
    if _LOWER_WORD.match(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def clause_set_to_tptp(cs: ClauseSet) -> str:
    lines = ["% clause export: two-sorted modal clauses, world argument last"]
    for i, clause in enumerate(cs.clauses):
        body = " | ".join(print_literal(lit) for lit in clause.literals)
        lines.append(f"cnf({_name_out(cs.provenance[i])}, "
                     f"{_ROLE_OUT[cs.roles[i]]}, ( {body} )).")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<lower>[a-z][A-Za-z0-9_]*)
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<punct>[(),.|~])
  | (?P<space>\s+)
""", re.VERBOSE)


def _tokenize(text: str, line: int) -> List[Tuple[str, str]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise TptpError(f"unexpected character {text[pos]!r}", line)
        kind = m.lastgroup
        if kind != "space":
            out.append((kind, m.group()))
        pos = m.end()
    return out


class _RawTerm:
    """Symbol tree before sort inference."""

    __slots__ = ("symbol", "args", "is_var")

    def __init__(self, symbol: str, args, is_var: bool):
        self.symbol = symbol
        self.args = args
        self.is_var = is_var


class _LineParser:
    def __init__(self, tokens: List[Tuple[str, str]], line: int):
        self.tokens = tokens
        self.line = line
        self.pos = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, text: Optional[str] = None) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise TptpError("unexpected end of line", self.line)
        if text is not None and tok[1] != text:
            raise TptpError(f"expected {text!r}, found {tok[1]!r}", self.line)
        self.pos += 1
        return tok

    def name(self) -> str:
        kind, text = self.take()
        if kind == "lower":
            return text
        if kind == "quoted":
            return re.sub(r"\\(.)", r"\1", text[1:-1])
        raise TptpError(f"expected a clause name, found {text!r}", self.line)

    def raw_term(self) -> _RawTerm:
        kind, text = self.take()
        if kind == "upper":
            return _RawTerm(text, (), True)
        if kind != "lower":
            raise TptpError(f"expected a term, found {text!r}", self.line)
        args = []
        tok = self.peek()
        if tok is not None and tok[1] == "(":
            self.take("(")
            args.append(self.raw_term())
            while self.peek() is not None and self.peek()[1] == ",":
                self.take(",")
                args.append(self.raw_term())
            self.take(")")
        return _RawTerm(text, tuple(args), False)

    def literal(self) -> Tuple[bool, _RawTerm]:
        positive = True
        if self.peek() is not None and self.peek()[1] == "~":
            self.take("~")
            positive = False
        atom = self.raw_term()
        if atom.is_var:
            raise TptpError("a variable cannot head an atom", self.line)
        if not atom.args:
            raise TptpError(
                f"predicate {atom.symbol!r} needs at least a world argument",
                self.line)
        return positive, atom


class _SortSolver:
    """Union-find over sort cells.

    Cells exist for every clause-local variable, every function value, and
    every function argument slot.  Predicate positions pin cells to a
    concrete sort; term structure merges cells; unconstrained cells default
    to the individual sort.
    """

    def __init__(self):
        self.parent: Dict[tuple, tuple] = {}
        self.sort: Dict[tuple, Tuple[str, int]] = {}  # root -> (sort, line)
        self.fn_arity: Dict[str, Tuple[int, int]] = {}

    def _find(self, cell: tuple) -> tuple:
        root = cell
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(cell, cell) != cell:
            self.parent[cell], cell = root, self.parent[cell]
        return root

    def merge(self, a: tuple, b: tuple, line: int) -> None:
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return
        sa, sb = self.sort.get(ra), self.sort.get(rb)
        if sa is not None and sb is not None and sa[0] != sb[0]:
            raise TptpError(
                f"sort clash between lines {sa[1]} and {sb[1]}", line)
        self.parent[ra] = rb
        if sa is not None:
            self.sort[rb] = sa

    def pin(self, cell: tuple, sort: str, line: int) -> None:
        root = self._find(cell)
        known = self.sort.get(root)
        if known is not None and known[0] != sort:
            raise TptpError(
                f"sort clash with line {known[1]}", line)
        self.sort.setdefault(root, (sort, line))

    def resolved(self, cell: tuple) -> str:
        known = self.sort.get(self._find(cell))
        return known[0] if known is not None else SORT_INDIVIDUAL

    def constrain_term(self, raw: _RawTerm, cell: tuple, clause_idx: int,
                       line: int) -> None:
        if raw.is_var:
            self.merge(("var", clause_idx, raw.symbol), cell, line)
            return
        known = self.fn_arity.setdefault(raw.symbol, (len(raw.args), line))
        if known[0] != len(raw.args):
            raise TptpError(
                f"function {raw.symbol!r} used with arities {known[0]} and "
                f"{len(raw.args)} (first use at line {known[1]})", line)
        self.merge(("fnval", raw.symbol), cell, line)
        for i, arg in enumerate(raw.args):
            self.constrain_term(arg, ("fnarg", raw.symbol, i), clause_idx,
                                line)

    def build_term(self, raw: _RawTerm, cell: tuple,
                   clause_idx: int) -> FTerm:
        if raw.is_var:
            return FVar(raw.symbol,
                        self.resolved(("var", clause_idx, raw.symbol)))
        args = tuple(self.build_term(arg, ("fnarg", raw.symbol, i),
                                     clause_idx)
                     for i, arg in enumerate(raw.args))
        return FApp(raw.symbol, args, self.resolved(cell))


def _predicate_slot_sorts(symbol: str, arity: int) -> Tuple[str, ...]:
    if symbol in ACCESSIBILITY:
        return (SORT_WORLD, SORT_WORLD)
    return tuple([SORT_INDIVIDUAL] * (arity - 1) + [SORT_WORLD])


def clause_set_from_tptp(text: str) -> ClauseSet:
    """Parse the export format back into a clause set."""
    parsed: List[Tuple[int, str, str, List[Tuple[bool, _RawTerm]]]] = []
    pred_arity: Dict[str, Tuple[int, int]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        p = _LineParser(_tokenize(stripped, lineno), lineno)
        p.take("cnf")
        p.take("(")
        name = p.name()
        p.take(",")
        kind, role_text = p.take()
        if kind != "lower" or role_text not in _ROLE_IN:
            raise TptpError(f"unknown role {role_text!r}", lineno)
        p.take(",")
        p.take("(")
        raw_literals = [p.literal()]
        while p.peek() is not None and p.peek()[1] == "|":
            p.take("|")
            raw_literals.append(p.literal())
        p.take(")")
        p.take(")")
        p.take(".")
        if p.peek() is not None:
            raise TptpError("trailing tokens after clause", lineno)
        for _positive, atom in raw_literals:
            known = pred_arity.setdefault(atom.symbol,
                                          (len(atom.args), lineno))
            if known[0] != len(atom.args):
                raise TptpError(
                    f"predicate {atom.symbol!r} used with arities {known[0]}"
                    f" and {len(atom.args)} (first use at line {known[1]})",
                    lineno)
            if atom.symbol in ACCESSIBILITY and len(atom.args) != 2:
                raise TptpError(f"{atom.symbol} takes two worlds", lineno)
        parsed.append((lineno, name, role_text, raw_literals))

    solver = _SortSolver()
    for clause_idx, (lineno, _name, _role, raw_literals) in enumerate(parsed):
        for _positive, atom in raw_literals:
            slots = _predicate_slot_sorts(atom.symbol, len(atom.args))
            for i, (arg, sort) in enumerate(zip(atom.args, slots)):
                cell = ("predslot", clause_idx, id(atom), i)
                solver.pin(cell, sort, lineno)
                solver.constrain_term(arg, cell, clause_idx, lineno)

    clauses: List[Clause] = []
    provenance: List[str] = []
    roles: List[str] = []
    for clause_idx, (lineno, name, role_text, raw_literals) in enumerate(parsed):
        literals = []
        for positive, atom in raw_literals:
            args = tuple(
                solver.build_term(arg, ("predslot", clause_idx, id(atom), i),
                                  clause_idx)
                for i, arg in enumerate(atom.args))
            literals.append(Literal(positive, atom.symbol, args))
        clauses.append(Clause(tuple(literals)))
        provenance.append(name)
        roles.append(_ROLE_IN[role_text])
    return ClauseSet(tuple(clauses), tuple(provenance), tuple(roles))
