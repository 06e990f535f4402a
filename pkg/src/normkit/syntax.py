"""Core deontic language: signatures, terms, formulas, parsing and printing.

The language is quantifier-free first-order logic extended with the unary
normative operators ``Id`` (ideally), ``Ob`` (obligatory), ``Pm`` (permitted),
``Fb`` (forbidden) and three conditional arrows ``=Ob=>``, ``=Pm=>``,
``=Fb=>``.  Identifiers starting with an uppercase letter are variables; all
free variables of a formula are read as universally quantified at the top
level.  ``universal_closure`` makes that binding explicit as metadata without
adding quantifier nodes to the syntax tree.

Concrete grammar (also in docs/grammar.ebnf)::

    formula   = or_expr , [ ("=>" | "=Ob=>" | "=Pm=>" | "=Fb=>") , formula ] ;
    or_expr   = and_expr , { "|" , and_expr } ;
    and_expr  = unary , { "&" , unary } ;
    unary     = "!" , unary | ("Id"|"Ob"|"Pm"|"Fb") , unary | primary ;
    primary   = "(" , formula , ")" | atom ;
    atom      = lower_ident , [ "(" , term , { "," , term } , ")" ] ;
    term      = upper_ident | lower_ident , [ "(" , term , { "," , term } , ")" ] ;

Precedence: ``!`` and the modal prefixes bind tightest, then ``&``, then
``|``; all four arrows share the lowest precedence and associate to the
right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


class LanguageError(Exception):
    """Base class for errors raised by the language layer."""


class ParseError(LanguageError):
    """Syntax error, carrying the character offset where it was detected."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ArityError(LanguageError):
    """A symbol was used with two different arities, or as both a
    predicate and a function symbol."""

    def __init__(self, symbol: str, message: str):
        super().__init__(message)
        self.symbol = symbol


MODAL_KEYWORDS = ("Id", "Ob", "Pm", "Fb")


# ---------------------------------------------------------------------------
# Terms and formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """Individual variable (identifier with an uppercase first letter)."""

    name: str


@dataclass(frozen=True)
class App:
    """Function application; constants are 0-ary applications."""

    symbol: str
    args: tuple = ()


Term = Union[Var, App]


def const(name: str) -> App:
    """Convenience constructor for a constant term."""
    return App(name, ())


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Id:
    body: "Formula"


@dataclass(frozen=True)
class Ob:
    body: "Formula"


@dataclass(frozen=True)
class Pm:
    body: "Formula"


@dataclass(frozen=True)
class Fb:
    body: "Formula"


@dataclass(frozen=True)
class CondOb:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class CondPm:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class CondFb:
    left: "Formula"
    right: "Formula"


Formula = Union[
    Atom, Not, And, Or, Implies, Id, Ob, Pm, Fb, CondOb, CondPm, CondFb
]

UNARY_TYPES = (Not, Id, Ob, Pm, Fb)
BINARY_TYPES = (And, Or, Implies, CondOb, CondPm, CondFb)
ARROW_TYPES = (Implies, CondOb, CondPm, CondFb)


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------

@dataclass
class Signature:
    """Predicate and function symbols with fixed arities.

    Predicate and function names are disjoint; a symbol never carries two
    different arities.  Variables are not declared (any uppercase-initial
    identifier is a variable).
    """

    predicates: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)

    def declare_predicate(self, name: str, arity: int) -> None:
        if name in self.functions:
            raise ArityError(name, f"'{name}' is already a function symbol")
        old = self.predicates.get(name)
        if old is not None and old != arity:
            raise ArityError(
                name, f"predicate '{name}' used with arity {arity}, declared {old}"
            )
        self.predicates[name] = arity

    def declare_function(self, name: str, arity: int) -> None:
        if name in self.predicates:
            raise ArityError(name, f"'{name}' is already a predicate symbol")
        old = self.functions.get(name)
        if old is not None and old != arity:
            raise ArityError(
                name, f"function '{name}' used with arity {arity}, declared {old}"
            )
        self.functions[name] = arity

    def copy(self) -> "Signature":
        return Signature(dict(self.predicates), dict(self.functions))

    def merge(self, other: "Signature") -> "Signature":
        """Union of two signatures; raises ArityError on any conflict."""
        merged = self.copy()
        for name, arity in other.predicates.items():
            merged.declare_predicate(name, arity)
        for name, arity in other.functions.items():
            merged.declare_function(name, arity)
        return merged


def collect_signature(formula: Formula, signature: Optional[Signature] = None) -> Signature:
    """Extend ``signature`` (or a fresh one) with every symbol used in
    ``formula``, checking arity consistency."""
    sig = signature if signature is not None else Signature()

    def walk_term(term: Term) -> None:
        if isinstance(term, App):
            sig.declare_function(term.symbol, len(term.args))
            for arg in term.args:
                walk_term(arg)

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            sig.declare_predicate(f.symbol, len(f.args))
            for arg in f.args:
                walk_term(arg)
        elif isinstance(f, UNARY_TYPES):
            walk(f.body)
        else:
            walk(f.left)
            walk(f.right)

    walk(formula)
    return sig


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<condob>=Ob=>)|(?P<condpm>=Pm=>)|(?P<condfb>=Fb=>)|(?P<arrow>=>)"
    r"|(?P<bang>!)|(?P<amp>&)|(?P<pipe>\|)|(?P<lpar>\()|(?P<rpar>\))|(?P<comma>,)"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_]*))"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", bad_at)
        group = match.lastgroup
        tok_text = match.group(group)
        start = match.start(group)
        kind = group
        if group == "ident":
            if tok_text in MODAL_KEYWORDS:
                kind = "modal"
            elif tok_text[0].isupper():
                kind = "var"
            else:
                kind = "sym"
        tokens.append(_Token(kind, tok_text, start))
        pos = match.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list, signature: Signature):
        self.tokens = tokens
        self.index = 0
        self.signature = signature

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str, what: str) -> _Token:
        token = self.peek()
        if token.kind != kind:
            raise ParseError(f"expected {what}, found {token.text or 'end of input'!r}",
                             token.position)
        return self.advance()

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        token = self.peek()
        arrows = {"arrow": Implies, "condob": CondOb, "condpm": CondPm, "condfb": CondFb}
        if token.kind in arrows:
            self.advance()
            right = self.parse_formula()  # right-associative
            return arrows[token.kind](left, right)
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.peek().kind == "pipe":
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.peek().kind == "amp":
            self.advance()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        token = self.peek()
        if token.kind == "bang":
            self.advance()
            return Not(self.parse_unary())
        if token.kind == "modal":
            self.advance()
            ctor = {"Id": Id, "Ob": Ob, "Pm": Pm, "Fb": Fb}[token.text]
            return ctor(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        token = self.peek()
        if token.kind == "lpar":
            self.advance()
            inner = self.parse_formula()
            self.expect("rpar", "')'")
            return inner
        if token.kind == "sym":
            return self.parse_atom()
        if token.kind == "var":
            raise ParseError(
                f"variable {token.text!r} cannot stand alone as a formula", token.position
            )
        raise ParseError(f"expected a formula, found {token.text or 'end of input'!r}",
                         token.position)

    def parse_atom(self) -> Atom:
        name = self.advance()
        args: tuple = ()
        if self.peek().kind == "lpar":
            self.advance()
            args = self.parse_term_list()
        self.signature.declare_predicate(name.text, len(args))
        return Atom(name.text, args)

    def parse_term_list(self) -> tuple:
        terms = [self.parse_term()]
        while self.peek().kind == "comma":
            self.advance()
            terms.append(self.parse_term())
        self.expect("rpar", "')'")
        return tuple(terms)

    def parse_term(self) -> Term:
        token = self.peek()
        if token.kind == "var":
            self.advance()
            return Var(token.text)
        if token.kind == "modal":
            raise ParseError(f"{token.text!r} is a reserved keyword", token.position)
        if token.kind != "sym":
            raise ParseError(f"expected a term, found {token.text or 'end of input'!r}",
                             token.position)
        self.advance()
        args: tuple = ()
        if self.peek().kind == "lpar":
            self.advance()
            args = self.parse_term_list()
        self.signature.declare_function(token.text, len(args))
        return App(token.text, args)


def parse_formula(text: str, signature: Optional[Signature] = None):
    """Parse ``text`` into a formula.

    Returns ``(formula, signature)`` where the signature is ``signature``
    extended (in a copy) with every symbol inferred from use.  Raises
    ParseError on bad syntax and ArityError when a symbol is used with
    conflicting arities (against the given signature or within the text).
    """
    sig = signature.copy() if signature is not None else Signature()
    parser = _Parser(_tokenize(text), sig)
    formula = parser.parse_formula()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.position)
    return formula, sig


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_LEVEL_ARROW, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY = 0, 1, 2, 3

_ARROW_TEXT = {Implies: "=>", CondOb: "=Ob=>", CondPm: "=Pm=>", CondFb: "=Fb=>"}
_MODAL_TEXT = {Id: "Id", Ob: "Ob", Pm: "Pm", Fb: "Fb"}


def print_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if not term.args:
        return term.symbol
    return f"{term.symbol}({', '.join(print_term(a) for a in term.args)})"


def print_formula(formula: Formula) -> str:
    """Render a formula in the concrete grammar with minimal parentheses;
    ``parse_formula(print_formula(f))`` yields a tree structurally equal
    to ``f``."""

    def render(f: Formula, min_level: int) -> str:
        if isinstance(f, Atom):
            if not f.args:
                return f.symbol
            return f"{f.symbol}({', '.join(print_term(a) for a in f.args)})"
        if isinstance(f, Not):
            text = "!" + render(f.body, _LEVEL_UNARY)
            level = _LEVEL_UNARY
        elif isinstance(f, (Id, Ob, Pm, Fb)):
            text = f"{_MODAL_TEXT[type(f)]} {render(f.body, _LEVEL_UNARY)}"
            level = _LEVEL_UNARY
        elif isinstance(f, And):
            text = f"{render(f.left, _LEVEL_AND)} & {render(f.right, _LEVEL_AND + 1)}"
            level = _LEVEL_AND
        elif isinstance(f, Or):
            text = f"{render(f.left, _LEVEL_OR)} | {render(f.right, _LEVEL_OR + 1)}"
            level = _LEVEL_OR
        else:
            op = _ARROW_TEXT[type(f)]
            text = f"{render(f.left, _LEVEL_ARROW + 1)} {op} {render(f.right, _LEVEL_ARROW)}"
            level = _LEVEL_ARROW
        if level < min_level:
            return f"({text})"
        return text

    return render(formula, _LEVEL_ARROW)


# ---------------------------------------------------------------------------
# Free variables and universal closure
# ---------------------------------------------------------------------------

def _iter_variables(formula: Formula) -> Iterator[str]:
    """Yield variable names in first-occurrence (left-to-right) order,
    possibly with repeats."""

    def walk_term(term: Term) -> Iterator[str]:
        if isinstance(term, Var):
            yield term.name
        else:
            for arg in term.args:
                yield from walk_term(arg)

    def walk(f: Formula) -> Iterator[str]:
        if isinstance(f, Atom):
            for arg in f.args:
                yield from walk_term(arg)
        elif isinstance(f, UNARY_TYPES):
            yield from walk(f.body)
        else:
            yield from walk(f.left)
            yield from walk(f.right)

    yield from walk(formula)


def free_variables(formula) -> set:
    """All variables occurring in the formula (the language has no binders,
    so every occurrence is free).  Accepts a ClosedFormula, in which case
    the closed variables are discounted."""
    if isinstance(formula, ClosedFormula):
        return set(_iter_variables(formula.formula)) - set(formula.universals)
    return set(_iter_variables(formula))


@dataclass(frozen=True)
class ClosedFormula:
    """A formula together with its top-level universally quantified
    variables, in first-occurrence order.  The closure is metadata: the
    formula tree itself stays quantifier-free."""

    formula: Formula
    universals: tuple = ()


def universal_closure(formula) -> ClosedFormula:
    """Close ``formula`` over its free variables (first-occurrence order).
    Idempotent: a ClosedFormula is returned unchanged."""
    if isinstance(formula, ClosedFormula):
        return formula
    seen: dict = {}
    for name in _iter_variables(formula):
        seen.setdefault(name, None)
    return ClosedFormula(formula, tuple(seen))


# ---------------------------------------------------------------------------
# Named formulas and theories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NamedFormula:
    name: str
    closed: ClosedFormula
    origin: Optional[str] = None


@dataclass(frozen=True)
class Theory:
    """An ordered list of named, closed formulas over one signature."""

    signature: Signature
    formulas: tuple = ()

    def formula_named(self, name: str) -> NamedFormula:
        for nf in self.formulas:
            if nf.name == name:
                return nf
        raise KeyError(name)

    def without(self, name: str) -> "Theory":
        return Theory(self.signature,
                      tuple(nf for nf in self.formulas if nf.name != name))


def make_theory(named: Iterable, signature: Optional[Signature] = None) -> Theory:
    """Build a validated Theory from ``(name, formula-or-text)`` pairs.

    Strings are parsed; formulas are closed; the signature is inferred from
    use (extending ``signature`` when given).  Raises LanguageError on
    duplicate or empty names and on arity conflicts.
    """
    sig = signature.copy() if signature is not None else Signature()
    result = []
    names = set()
    for name, item in named:
        if not name:
            raise LanguageError("formula name must be non-empty")
        if name in names:
            raise LanguageError(f"duplicate formula name {name!r}")
        names.add(name)
        if isinstance(item, str):
            formula, sig = parse_formula(item, sig)
        else:
            formula = item.formula if isinstance(item, ClosedFormula) else item
            sig = collect_signature(formula, sig)
        result.append(NamedFormula(name, universal_closure(formula)))
    return Theory(sig, tuple(result))


# ---------------------------------------------------------------------------
# Structured-tree serialization (used by the API)
# ---------------------------------------------------------------------------

_KIND_BY_TYPE = {
    Atom: "atom", Not: "not", And: "and", Or: "or", Implies: "implies",
    Id: "id", Ob: "ob", Pm: "pm", Fb: "fb",
    CondOb: "cond_ob", CondPm: "cond_pm", CondFb: "cond_fb",
}
_TYPE_BY_KIND = {v: k for k, v in _KIND_BY_TYPE.items()}


def term_to_tree(term: Term) -> dict:
    if isinstance(term, Var):
        return {"kind": "var", "symbol": term.name}
    return {"kind": "app", "symbol": term.symbol,
            "args": [term_to_tree(a) for a in term.args]}


def term_from_tree(tree: dict) -> Term:
    if tree["kind"] == "var":
        return Var(tree["symbol"])
    if tree["kind"] == "app":
        return App(tree["symbol"], tuple(term_from_tree(a) for a in tree.get("args", [])))
    raise LanguageError(f"unknown term kind {tree.get('kind')!r}")


def formula_to_tree(formula: Formula) -> dict:
    """Serialize to the structured-tree document format (fields: kind,
    symbol, args, left, right, body)."""
    kind = _KIND_BY_TYPE[type(formula)]
    if isinstance(formula, Atom):
        return {"kind": kind, "symbol": formula.symbol,
                "args": [term_to_tree(a) for a in formula.args]}
    if isinstance(formula, UNARY_TYPES):
        return {"kind": kind, "body": formula_to_tree(formula.body)}
    return {"kind": kind, "left": formula_to_tree(formula.left),
            "right": formula_to_tree(formula.right)}


def formula_from_tree(tree: dict) -> Formula:
    kind = tree.get("kind")
    ctor = _TYPE_BY_KIND.get(kind)
    if ctor is None:
        raise LanguageError(f"unknown formula kind {kind!r}")
    if ctor is Atom:
        return Atom(tree["symbol"],
                    tuple(term_from_tree(a) for a in tree.get("args", [])))
    if ctor in UNARY_TYPES:
        return ctor(formula_from_tree(tree["body"]))
    return ctor(formula_from_tree(tree["left"]), formula_from_tree(tree["right"]))
