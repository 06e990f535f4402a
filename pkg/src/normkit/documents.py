"""Annotated documents and their compilation into formulas.

A document is plain text plus a forest of annotations.  Every annotation
selects a span of the body and is one of

* a term: an atom of the vocabulary, with an explicit argument list
  (uppercase-initial arguments are variables, the rest constants),
* a composite: a connective applied to the annotations nested inside it,
* a goal: the single query target of a query document.

Structure is explicit: each annotation lists its children by id.  Spans
justify the structure (a child's span lies inside its parent's) but two
independent readings of the same passage may freely overlap as long as
they are separate trees, so containment alone never decides tree
membership.  ``add_annotation`` therefore accepts an attachment argument
and only falls back to span-based placement when it is unambiguous.

Compilation turns each root annotation into one named formula, children in
span order, goal trees excluded from the assumption list.  The vocabulary
is the set of term names with arities and occurrence back-references;
arity clashes are reported inside the vocabulary, not raised.
"""

import re
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .syntax import (
    And, App, ClosedFormula, CondFb, CondOb, CondPm, Fb, Formula, Id, Atom,
    Implies, NamedFormula, Not, Ob, Or, Pm, Signature, Theory, Var,
    collect_signature, universal_closure,
)
from .syntax import ArityError

KIND_TERM = "term"
KIND_COMPOSITE = "composite"
KIND_GOAL = "goal"

DOC_LEGISLATION = "legislation"
DOC_QUERY = "query"

CONNECTIVES = {
    "Not": Not, "And": And, "Or": Or, "Implies": Implies,
    "Id": Id, "Ob": Ob, "Pm": Pm, "Fb": Fb,
    "CondOb": CondOb, "CondPm": CondPm, "CondFb": CondFb,
}
UNARY_CONNECTIVES = ("Not", "Id", "Ob", "Pm", "Fb")

# nesting rank for equal spans in derived attachment: outermost first
_RANK = {"Goal": 0, "CondOb": 1, "CondPm": 1, "CondFb": 1, "Implies": 2,
         "Or": 3, "And": 4, "Id": 5, "Ob": 5, "Pm": 5, "Fb": 5, "Not": 6,
         "Term": 7}

# attachment sentinel: derive the parent from spans
DERIVE = object()


class DocumentError(ValueError):
    """Structural or compile-level problem with a document.

    ``code`` is the stable machine name (overlap_error, span_error,
    structure_error, arity_conflict, name_error, missing_goal); ``where``
    points at the offending annotation or field when known.
    """

    def __init__(self, code: str, message: str, where: Optional[str] = None):
        super().__init__(message)
        self.code = code
        self.where = where


@dataclass(frozen=True)
class Annotation:
    id: str
    span: Tuple[int, int]
    kind: str
    name: Optional[str] = None          # term only
    args: Tuple[str, ...] = ()          # term only
    connective: Optional[str] = None    # composite only
    children: Tuple[str, ...] = ()

    def rank(self) -> int:
        if self.kind == KIND_GOAL:
            return _RANK["Goal"]
        if self.kind == KIND_TERM:
            return _RANK["Term"]
        return _RANK[self.connective]


def term_annotation(aid: str, span, name: str, args: Sequence[str] = ()) -> Annotation:
    return Annotation(aid, tuple(span), KIND_TERM, name=name, args=tuple(args))


def composite_annotation(aid: str, span, connective: str,
                         children: Sequence[str] = ()) -> Annotation:
    return Annotation(aid, tuple(span), KIND_COMPOSITE, connective=connective,
                      children=tuple(children))


def goal_annotation(aid: str, span, children: Sequence[str] = ()) -> Annotation:
    return Annotation(aid, tuple(span), KIND_GOAL, children=tuple(children))


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    body: str
    kind: str
    annotations: Tuple[Annotation, ...] = ()

    def annotation(self, aid: str) -> Annotation:
        for a in self.annotations:
            if a.id == aid:
                return a
        raise KeyError(aid)

    def roots(self) -> Tuple[Annotation, ...]:
        child_ids = {c for a in self.annotations for c in a.children}
        return tuple(a for a in self.annotations if a.id not in child_ids)


def _contains(outer: Tuple[int, int], inner: Tuple[int, int]) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def _disjoint(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    return a[1] <= b[0] or b[1] <= a[0]


def _check_annotation_fields(a: Annotation, body_len: int) -> None:
    start, end = a.span
    if not (0 <= start < end <= body_len):
        raise DocumentError("span_error",
                            f"span {a.span} outside body bounds", a.id)
    if a.kind == KIND_TERM:
        if not a.name or not re.fullmatch(r"[a-z][A-Za-z0-9_]*", a.name):
            raise DocumentError("structure_error",
                                f"term name {a.name!r} is not a lowercase"
                                " identifier", a.id)
        if a.connective is not None:
            raise DocumentError("structure_error",
                                "term carries a connective", a.id)
        for arg in a.args:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", arg):
                raise DocumentError("structure_error",
                                    f"bad term argument {arg!r}", a.id)
    elif a.kind == KIND_COMPOSITE:
        if a.connective not in CONNECTIVES:
            raise DocumentError("structure_error",
                                f"unknown connective {a.connective!r}", a.id)
        if a.name is not None or a.args:
            raise DocumentError("structure_error",
                                "composite carries term fields", a.id)
    elif a.kind == KIND_GOAL:
        if a.name is not None or a.args or a.connective is not None:
            raise DocumentError("structure_error",
                                "goal carries term or composite fields", a.id)
    else:
        raise DocumentError("structure_error",
                            f"unknown annotation kind {a.kind!r}", a.id)


def _sorted_by_span(doc_annotations: Dict[str, Annotation],
                    ids: Iterable[str]) -> Tuple[str, ...]:
    return tuple(sorted(ids, key=lambda i: doc_annotations[i].span))


def add_annotation(d: Document, a: Annotation, parent=DERIVE) -> Document:
    """Insert ``a`` into the forest and return the new document.

    ``parent`` picks the attachment: an annotation id, None to force a new
    root, or the default DERIVE to place the annotation under the smallest
    unambiguous span that contains it.  ``a.children`` may name existing
    roots, which the new annotation adopts.
    """
    _check_annotation_fields(a, len(d.body))
    by_id = {ann.id: ann for ann in d.annotations}
    if a.id in by_id:
        raise DocumentError("structure_error",
                            f"annotation id {a.id!r} already used", a.id)

    root_ids = {r.id for r in d.roots()}
    if a.children and a.kind == KIND_TERM:
        raise DocumentError("structure_error", "terms are leaves", a.id)
    seen = set()
    for cid in a.children:
        if cid in seen:
            raise DocumentError("structure_error",
                                f"duplicate child {cid!r}", a.id)
        seen.add(cid)
        child = by_id.get(cid)
        if child is None:
            raise DocumentError("structure_error",
                                f"child {cid!r} does not exist", a.id)
        if cid not in root_ids:
            raise DocumentError("structure_error",
                                f"child {cid!r} is not a root", a.id)
        if not _contains(a.span, child.span):
            raise DocumentError("overlap_error",
                                f"child {cid!r} outside the new span", a.id)
    for i, c1 in enumerate(a.children):
        for c2 in a.children[i + 1:]:
            if not _disjoint(by_id[c1].span, by_id[c2].span):
                raise DocumentError("overlap_error",
                                    f"children {c1!r} and {c2!r} overlap", a.id)

    if a.kind == KIND_GOAL:
        if d.kind != DOC_QUERY:
            raise DocumentError("structure_error",
                                "goals belong to query documents", a.id)
        if any(ann.kind == KIND_GOAL for ann in d.annotations):
            raise DocumentError("structure_error",
                                "document already has a goal", a.id)

    if parent is DERIVE:
        parent = _derive_parent(d, a, by_id)
    if parent is not None:
        p = by_id.get(parent)
        if p is None:
            raise DocumentError("structure_error",
                                f"parent {parent!r} does not exist", a.id)
        if p.kind == KIND_TERM:
            raise DocumentError("structure_error",
                                "terms cannot have children", a.id)
        if a.kind == KIND_GOAL:
            raise DocumentError("structure_error",
                                "a goal must be a root annotation", a.id)
        if not _contains(p.span, a.span):
            raise DocumentError("overlap_error",
                                f"span escapes parent {parent!r}", a.id)
        if parent in a.children:
            raise DocumentError("structure_error",
                                "parent cannot also be a child", a.id)
        for cid in p.children:
            if not _disjoint(by_id[cid].span, a.span):
                raise DocumentError(
                    "overlap_error",
                    f"span conflicts with sibling {cid!r}", a.id)

    by_id[a.id] = replace(a, children=_sorted_by_span(by_id, a.children))
    if parent is not None:
        p = by_id[parent]
        by_id[parent] = replace(
            p, children=_sorted_by_span(by_id, p.children + (a.id,)))
    order = tuple(by_id[ann.id] for ann in d.annotations) + (by_id[a.id],)
    return replace(d, annotations=order)


def _derive_parent(d: Document, a: Annotation,
                   by_id: Dict[str, Annotation]) -> Optional[str]:
    """Smallest container of ``a``'s span, skipping the subtrees ``a``
    adopts.  Equal spans nest by connective rank, outermost first; any
    ambiguity is an error asking for an explicit attachment."""
    adopted = set()
    stack = list(a.children)
    while stack:
        cid = stack.pop()
        adopted.add(cid)
        stack.extend(by_id[cid].children)

    candidates = [ann for ann in d.annotations
                  if ann.id not in adopted and ann.kind != KIND_TERM
                  and _contains(ann.span, a.span)]
    if not candidates:
        return None
    smallest = min(ann.span[1] - ann.span[0] for ann in candidates)
    tight = [ann for ann in candidates
             if ann.span[1] - ann.span[0] == smallest]
    if len({ann.span for ann in tight}) > 1:
        raise DocumentError(
            "overlap_error",
            "attachment is ambiguous between overlapping readings; "
            "pass an explicit parent", a.id)
    if tight[0].span == a.span:
        # slot in below an equal-span chain: members must really be one
        # parent-child path, outermost rank first, all above the new node
        chain = sorted(tight, key=lambda ann: ann.rank())
        parent_of = {cid: ann.id for ann in d.annotations
                     for cid in ann.children}
        linked = all(parent_of.get(chain[i + 1].id) == chain[i].id
                     for i in range(len(chain) - 1))
        if not linked or any(ann.rank() >= a.rank() for ann in chain):
            raise DocumentError(
                "overlap_error",
                "equal spans with no unique nesting order; "
                "pass an explicit parent or adopt via children", a.id)
        return chain[-1].id
    if len(tight) > 1:
        raise DocumentError(
            "overlap_error",
            "attachment is ambiguous between overlapping readings; "
            "pass an explicit parent", a.id)
    return tight[0].id


def validate_document(d: Document) -> None:
    """Full structural validation, for documents arriving as data."""
    if d.kind not in (DOC_LEGISLATION, DOC_QUERY):
        raise DocumentError("structure_error",
                            f"unknown document kind {d.kind!r}")
    if not d.id:
        raise DocumentError("structure_error", "document id is empty")
    by_id: Dict[str, Annotation] = {}
    for a in d.annotations:
        _check_annotation_fields(a, len(d.body))
        if a.id in by_id:
            raise DocumentError("structure_error",
                                f"annotation id {a.id!r} already used", a.id)
        by_id[a.id] = a

    parent_of: Dict[str, str] = {}
    for a in d.annotations:
        if a.kind == KIND_TERM and a.children:
            raise DocumentError("structure_error", "terms are leaves", a.id)
        for cid in a.children:
            child = by_id.get(cid)
            if child is None:
                raise DocumentError("structure_error",
                                    f"child {cid!r} does not exist", a.id)
            if cid in parent_of:
                raise DocumentError("structure_error",
                                    f"{cid!r} has two parents", a.id)
            parent_of[cid] = a.id
            if not _contains(a.span, child.span):
                raise DocumentError("overlap_error",
                                    f"child {cid!r} escapes its parent", a.id)
        for i, c1 in enumerate(a.children):
            for c2 in a.children[i + 1:]:
                if not _disjoint(by_id[c1].span, by_id[c2].span):
                    raise DocumentError(
                        "overlap_error",
                        f"children {c1!r} and {c2!r} overlap", a.id)

    # no cycles: every annotation must reach a root
    for a in d.annotations:
        seen = set()
        cur = a.id
        while cur in parent_of:
            if cur in seen:
                raise DocumentError("structure_error",
                                    "annotation cycle", a.id)
            seen.add(cur)
            cur = parent_of[cur]

    goals = [a for a in d.annotations if a.kind == KIND_GOAL]
    if goals:
        if d.kind != DOC_QUERY:
            raise DocumentError("structure_error",
                                "goals belong to query documents",
                                goals[0].id)
        if len(goals) > 1:
            raise DocumentError("structure_error",
                                "document has more than one goal",
                                goals[1].id)
        if goals[0].id in parent_of:
            raise DocumentError("structure_error",
                                "a goal must be a root annotation",
                                goals[0].id)


@dataclass(frozen=True)
class CompiledDocument:
    formulas: Tuple[NamedFormula, ...]
    goal: Optional[ClosedFormula]
    signature: Signature

    def theory(self) -> Theory:
        return Theory(self.signature, self.formulas)


def _compile_term(a: Annotation) -> Formula:
    args = tuple(Var(s) if s[0].isupper() else App(s) for s in a.args)
    return Atom(a.name, args)


def _compile_tree(d: Document, a: Annotation) -> Formula:
    if a.kind == KIND_TERM:
        return _compile_term(a)
    children = [d.annotation(c) for c in a.children]
    children.sort(key=lambda c: c.span)
    if a.kind == KIND_GOAL:
        if len(children) != 1:
            raise DocumentError("structure_error",
                                "a goal wraps exactly one annotation", a.id)
        return _compile_tree(d, children[0])
    wanted = 1 if a.connective in UNARY_CONNECTIVES else 2
    if len(children) != wanted:
        raise DocumentError(
            "structure_error",
            f"{a.connective} needs {wanted} children, has {len(children)}",
            a.id)
    ctor = CONNECTIVES[a.connective]
    parts = [_compile_tree(d, c) for c in children]
    return ctor(*parts)


def compile_document(d: Document) -> CompiledDocument:
    """One named formula per non-goal root, children in span order, plus
    the goal formula for query documents."""
    validate_document(d)
    roots = sorted(d.roots(), key=lambda a: (a.span, a.id))
    formulas: List[NamedFormula] = []
    goal: Optional[ClosedFormula] = None
    signature = Signature()
    counter = 0
    for root in roots:
        body = _compile_tree(d, root)
        try:
            signature = collect_signature(body, signature)
        except ArityError as e:
            raise DocumentError("arity_conflict", str(e), root.id)
        closed = universal_closure(body)
        if root.kind == KIND_GOAL:
            goal = closed
        else:
            counter += 1
            formulas.append(NamedFormula(f"{d.title} #{counter}", closed,
                                         origin=d.id))
    return CompiledDocument(tuple(formulas), goal, signature)


# ---------------------------------------------------------------------------
# Vocabulary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VocabEntry:
    name: str
    arities: Tuple[int, ...]                      # sorted, >1 means conflict
    occurrences: Tuple[Tuple[str, Tuple[int, int]], ...]

    @property
    def arity(self) -> Optional[int]:
        return self.arities[0] if len(self.arities) == 1 else None

    @property
    def conflict(self) -> bool:
        return len(self.arities) > 1


@dataclass(frozen=True)
class Vocabulary:
    entries: Tuple[VocabEntry, ...]

    def names(self) -> Tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def entry(self, name: str) -> VocabEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def extract_vocabulary(docs: Iterable[Document]) -> Vocabulary:
    arities: Dict[str, set] = {}
    occurrences: Dict[str, list] = {}
    for d in docs:
        for a in d.annotations:
            if a.kind != KIND_TERM:
                continue
            arities.setdefault(a.name, set()).add(len(a.args))
            occurrences.setdefault(a.name, []).append((d.id, a.span))
    entries = tuple(
        VocabEntry(name, tuple(sorted(arities[name])),
                   tuple(sorted(occurrences[name])))
        for name in sorted(arities))
    return Vocabulary(entries)


def auto_name(selected_text: str, taken: Iterable[str] = ()) -> str:
    """Propose a term name from selected text: lowercased, non-alphanumeric
    runs collapsed to single underscores, numbered suffix when taken."""
    base = re.sub(r"[^a-z0-9]+", "_", selected_text.lower()).strip("_")
    if not base or not base[0].isalpha():
        raise DocumentError("name_error",
                            f"cannot derive a term name from {selected_text!r};"
                            " choose one manually")
    taken = set(taken)
    if base not in taken:
        return base
    n = 2
    while f"{base}_{n}" in taken:
        n += 1
    return f"{base}_{n}"


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------

def annotation_jsonable(a: Annotation) -> dict:
    out: dict = {"id": a.id, "span": list(a.span), "kind": a.kind}
    if a.kind == KIND_TERM:
        out["name"] = a.name
        out["args"] = list(a.args)
    if a.kind == KIND_COMPOSITE:
        out["connective"] = a.connective
    if a.children:
        out["children"] = list(a.children)
    return out


def document_jsonable(d: Document) -> dict:
    return {
        "id": d.id,
        "title": d.title,
        "body": d.body,
        "kind": d.kind,
        "annotations": [annotation_jsonable(a) for a in d.annotations],
    }


def _expect(data: dict, key: str, types, where: str):
    if key not in data:
        raise DocumentError("structure_error", f"missing field {key!r}", where)
    value = data[key]
    if not isinstance(value, types):
        raise DocumentError("structure_error",
                            f"field {key!r} has the wrong type", where)
    return value


def annotation_from_jsonable(data: dict, where: str = "annotation") -> Annotation:
    if not isinstance(data, dict):
        raise DocumentError("structure_error", "annotation must be an object",
                            where)
    aid = _expect(data, "id", str, where)
    span = _expect(data, "span", (list, tuple), aid)
    if (len(span) != 2 or not all(isinstance(x, int) for x in span)):
        raise DocumentError("structure_error",
                            "span must be a pair of offsets", aid)
    kind = _expect(data, "kind", str, aid)
    children = data.get("children", [])
    if (not isinstance(children, list)
            or not all(isinstance(c, str) for c in children)):
        raise DocumentError("structure_error", "children must be id strings",
                            aid)
    name = data.get("name")
    args = data.get("args", [])
    connective = data.get("connective")
    if kind == KIND_TERM:
        name = _expect(data, "name", str, aid)
        if (not isinstance(args, list)
                or not all(isinstance(s, str) for s in args)):
            raise DocumentError("structure_error",
                                "args must be a list of strings", aid)
    return Annotation(aid, (span[0], span[1]), kind, name=name,
                      args=tuple(args), connective=connective,
                      children=tuple(children))


def document_from_jsonable(data: dict) -> Document:
    """Parse and fully validate the document wire format."""
    if not isinstance(data, dict):
        raise DocumentError("structure_error", "document must be an object")
    did = _expect(data, "id", str, "document")
    title = _expect(data, "title", str, did)
    body = _expect(data, "body", str, did)
    kind = _expect(data, "kind", str, did)
    raw = data.get("annotations", [])
    if not isinstance(raw, list):
        raise DocumentError("structure_error", "annotations must be a list",
                            did)
    annotations = tuple(annotation_from_jsonable(a) for a in raw)
    d = Document(did, title, body, kind, annotations)
    validate_document(d)
    return d
