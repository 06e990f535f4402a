"""Parser, printer, closure, and signature behavior."""

import pytest
from hypothesis import given, settings, strategies as st

from normkit.syntax import (
    And, App, ArityError, Atom, ClosedFormula, CondFb, CondOb, CondPm, Fb,
    Id, Implies, LanguageError, Not, Ob, Or, ParseError, Pm, Signature, Var,
    collect_signature, formula_from_tree, formula_to_tree, free_variables,
    make_theory, parse_formula, print_formula, universal_closure,
)


def parse(text):
    formula, _ = parse_formula(text)
    return formula


class TestParsing:
    def test_modal_atom(self):
        assert parse("Ob p") == Ob(Atom("p"))

    def test_conditional_rule_shape(self):
        got = parse("adult(X) & smoke(X) => Fb punishment_fine(X)")
        want = Implies(
            And(Atom("adult", (Var("X"),)), Atom("smoke", (Var("X"),))),
            Fb(Atom("punishment_fine", (Var("X"),))),
        )
        assert got == want

    def test_and_binds_tighter_than_or(self):
        assert parse("p & q | r") == Or(And(Atom("p"), Atom("q")), Atom("r"))

    def test_or_does_not_capture_following_and(self):
        assert parse("p | q & r") == Or(Atom("p"), And(Atom("q"), Atom("r")))

    def test_negation_binds_tightest(self):
        assert parse("!p & q") == And(Not(Atom("p")), Atom("q"))

    def test_modal_binds_tighter_than_and(self):
        assert parse("Ob p & q") == And(Ob(Atom("p")), Atom("q"))
        assert parse("Ob (p & q)") == Ob(And(Atom("p"), Atom("q")))

    def test_modal_over_negation(self):
        assert parse("Fb !p") == Fb(Not(Atom("p")))
        assert parse("!Fb p") == Not(Fb(Atom("p")))

    def test_arrows_are_right_associative(self):
        assert parse("p => q => r") == Implies(Atom("p"), Implies(Atom("q"), Atom("r")))

    def test_conditional_arrows(self):
        assert parse("p =Ob=> q") == CondOb(Atom("p"), Atom("q"))
        assert parse("p =Pm=> q") == CondPm(Atom("p"), Atom("q"))
        assert parse("p =Fb=> q") == CondFb(Atom("p"), Atom("q"))

    def test_mixed_arrows_right_associate(self):
        got = parse("p => q =Fb=> r")
        assert got == Implies(Atom("p"), CondFb(Atom("q"), Atom("r")))

    def test_nested_modalities(self):
        assert parse("Id Ob p") == Id(Ob(Atom("p")))
        assert parse("Pm Fb q") == Pm(Fb(Atom("q")))

    def test_function_terms(self):
        got = parse("owns(father(X), car(X))")
        want = Atom("owns", (App("father", (Var("X"),)), App("car", (Var("X"),))))
        assert got == want

    def test_constants_are_nullary_apps(self):
        assert parse("smokes(alice)") == Atom("smokes", (App("alice"),))

    def test_whitespace_is_free(self):
        assert parse("  Ob   ( p &q )  ") == Ob(And(Atom("p"), Atom("q")))

    def test_signature_is_inferred(self):
        _, sig = parse_formula("adult(X) & smoke(X) => Fb punishment_fine(X)")
        assert sig.predicates == {"adult": 1, "smoke": 1, "punishment_fine": 1}
        assert sig.functions == {}

    def test_given_signature_is_extended_not_mutated(self):
        base = Signature()
        base.declare_predicate("p", 0)
        _, sig = parse_formula("p & q", base)
        assert sig.predicates == {"p": 0, "q": 0}
        assert base.predicates == {"p": 0}


class TestParseErrors:
    def test_empty_input(self):
        with pytest.raises(ParseError):
            parse("")

    def test_unbalanced_paren(self):
        with pytest.raises(ParseError):
            parse("Ob (p & q")

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("p q")

    def test_lone_variable_is_not_a_formula(self):
        with pytest.raises(ParseError):
            parse("X")

    def test_bad_character_reports_position(self):
        with pytest.raises(ParseError) as err:
            parse("p & $q")
        assert err.value.position == 4

    def test_modal_keyword_is_not_a_term(self):
        with pytest.raises(ParseError):
            parse("p(Ob)")

    def test_arity_conflict_within_one_formula(self):
        with pytest.raises(ArityError) as err:
            parse("p(X) & p(X, Y)")
        assert err.value.symbol == "p"

    def test_arity_conflict_against_signature(self):
        sig = Signature()
        sig.declare_predicate("smoke", 1)
        with pytest.raises(ArityError):
            parse_formula("smoke(X, Y)", sig)

    def test_symbol_cannot_be_both_predicate_and_function(self):
        with pytest.raises(ArityError):
            parse("p(q) & q")


class TestPrinting:
    def test_modal_atom(self):
        assert print_formula(Ob(Atom("p"))) == "Ob p"

    def test_implication_into_modal(self):
        assert print_formula(Implies(Atom("p"), Ob(Atom("q")))) == "p => Ob q"

    def test_conditional_arrow(self):
        assert print_formula(CondFb(Atom("p"), Atom("q"))) == "p =Fb=> q"

    def test_precedence_prints_without_redundant_parens(self):
        f = Or(And(Atom("p"), Atom("q")), Atom("r"))
        assert print_formula(f) == "p & q | r"

    def test_or_under_and_is_parenthesized(self):
        f = And(Or(Atom("p"), Atom("q")), Atom("r"))
        assert print_formula(f) == "(p | q) & r"

    def test_left_nested_arrow_is_parenthesized(self):
        f = Implies(Implies(Atom("p"), Atom("q")), Atom("r"))
        assert print_formula(f) == "(p => q) => r"

    def test_right_nested_arrow_is_flat(self):
        f = Implies(Atom("p"), Implies(Atom("q"), Atom("r")))
        assert print_formula(f) == "p => q => r"

    def test_modal_argument_parens(self):
        assert print_formula(Ob(And(Atom("p"), Atom("q")))) == "Ob (p & q)"
        assert print_formula(Not(Ob(Atom("p")))) == "!Ob p"

    def test_terms(self):
        f = Atom("owns", (App("father", (Var("X"),)), App("c")))
        assert print_formula(f) == "owns(father(X), c)"


class TestClosure:
    def test_free_variables_of_unary_atom(self):
        assert free_variables(parse("smoke(X)")) == {"X"}

    def test_ground_atom_has_no_free_variables(self):
        assert free_variables(parse("child_in_vehicle")) == set()

    def test_variables_from_both_branches(self):
        f = parse("adult(X) & punishment_fine(Y)")
        assert free_variables(f) == {"X", "Y"}

    def test_closure_records_first_occurrence_order(self):
        closed = universal_closure(parse("p(X) & q(Y)"))
        assert closed.universals == ("X", "Y")
        closed = universal_closure(parse("q(Y) & p(X) & r(Y)"))
        assert closed.universals == ("Y", "X")

    def test_closure_of_ground_formula(self):
        f = parse("Ob p")
        closed = universal_closure(f)
        assert closed == ClosedFormula(f, ())

    def test_closure_is_idempotent(self):
        closed = universal_closure(parse("smoke(X) => Fb fine(X)"))
        assert universal_closure(closed) == closed

    def test_closed_formula_has_no_free_variables(self):
        closed = universal_closure(parse("smoke(X) => Fb fine(X)"))
        assert free_variables(closed) == set()

    def test_variables_inside_modal_operators_are_closed(self):
        closed = universal_closure(parse("Ob fine(X)"))
        assert closed.universals == ("X",)


class TestTheory:
    def test_make_theory_from_text(self):
        theory = make_theory([("r1", "p => Ob q"), ("r2", "Fb r")])
        assert [nf.name for nf in theory.formulas] == ["r1", "r2"]
        assert theory.signature.predicates == {"p": 0, "q": 0, "r": 0}

    def test_duplicate_names_rejected(self):
        with pytest.raises(LanguageError):
            make_theory([("a", "p"), ("a", "q")])

    def test_empty_name_rejected(self):
        with pytest.raises(LanguageError):
            make_theory([("", "p")])

    def test_arity_conflict_across_formulas(self):
        with pytest.raises(ArityError):
            make_theory([("a", "p(X)"), ("b", "p(X, Y)")])

    def test_without(self):
        theory = make_theory([("a", "p"), ("b", "q")])
        assert [nf.name for nf in theory.without("a").formulas] == ["b"]

    def test_formula_named(self):
        theory = make_theory([("a", "p")])
        assert theory.formula_named("a").name == "a"
        with pytest.raises(KeyError):
            theory.formula_named("missing")


# --- generated-population properties ---------------------------------------

_var_names = st.sampled_from(["X", "Y", "Z", "Count"])
_pred_names = st.sampled_from(["p", "q", "smoke", "fine_due", "r0"])
_fun_names = st.sampled_from(["alice", "bob", "car"])

# distinct name pools per arity avoid generating arity conflicts
_terms = st.recursive(
    st.one_of(
        _var_names.map(Var),
        _fun_names.map(lambda s: App(s, ())),
    ),
    lambda children: st.tuples(children).map(lambda args: App("f1", args)),
    max_leaves=3,
)


@st.composite
def _atoms(draw):
    arity = draw(st.integers(0, 2))
    name = draw(_pred_names) + ("" if arity == 0 else f"_{arity}")
    args = tuple(draw(_terms) for _ in range(arity))
    return Atom(name, args)


_formulas = st.recursive(
    _atoms(),
    lambda sub: st.one_of(
        sub.map(Not), sub.map(Id), sub.map(Ob), sub.map(Pm), sub.map(Fb),
        st.tuples(sub, sub).map(lambda p: And(*p)),
        st.tuples(sub, sub).map(lambda p: Or(*p)),
        st.tuples(sub, sub).map(lambda p: Implies(*p)),
        st.tuples(sub, sub).map(lambda p: CondOb(*p)),
        st.tuples(sub, sub).map(lambda p: CondPm(*p)),
        st.tuples(sub, sub).map(lambda p: CondFb(*p)),
    ),
    max_leaves=12,
)


@given(_formulas)
@settings(max_examples=300)
def test_print_parse_round_trip(formula):
    reparsed, _ = parse_formula(print_formula(formula))
    assert reparsed == formula


@given(_formulas)
def test_closure_idempotence(formula):
    once = universal_closure(formula)
    assert universal_closure(once) == once
    assert free_variables(once) == set()


@given(_formulas)
def test_tree_serialization_round_trip(formula):
    assert formula_from_tree(formula_to_tree(formula)) == formula


@given(_formulas)
def test_collect_signature_accepts_generated_formulas(formula):
    sig = collect_signature(formula)
    names = set(sig.predicates) | set(sig.functions)
    assert names, "every formula mentions at least one symbol"
