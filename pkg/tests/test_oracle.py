"""The semantic oracle itself, checked against brute-force enumeration,
then used to fix the expected verdicts that other test modules assert
against the prover."""

from hypothesis import given, settings, strategies as st

from normkit.syntax import Not, parse_formula

from oracle import (
    naive_satisfiable, oracle_countermodel, oracle_satisfiable, oracle_valid,
)


def f(text):
    formula, _ = parse_formula(text)
    return formula


# --- oracle vs brute force --------------------------------------------------

_ground_atoms = st.sampled_from(["p", "q", "r"]).map(f)


@st.composite
def _modal_formulas(draw, depth=2):
    """Small formulas over p, q, r with modal depth <= depth."""
    if depth == 0 or draw(st.booleans()):
        choice = draw(st.integers(0, 2))
        atom = draw(_ground_atoms)
        if choice == 0:
            return atom
        other = draw(_ground_atoms)
        if choice == 1:
            kind = draw(st.sampled_from(["&", "|", "=>"]))
            from normkit.syntax import And, Implies, Or
            ctor = {"&": And, "|": Or, "=>": Implies}[kind]
            return ctor(atom, other)
        return Not(atom)
    from normkit.syntax import And, CondFb, CondOb, Fb, Id, Implies, Ob, Or, Pm
    kind = draw(st.sampled_from(["Ob", "Pm", "Fb", "Id", "!", "&", "|", "=>",
                                 "=Ob=>", "=Fb=>"]))
    body = draw(_modal_formulas(depth=depth - 1))
    if kind in ("Ob", "Pm", "Fb", "Id", "!"):
        ctor = {"Ob": Ob, "Pm": Pm, "Fb": Fb, "Id": Id, "!": Not}[kind]
        return ctor(body)
    other = draw(_modal_formulas(depth=depth - 1))
    ctor = {"&": And, "|": Or, "=>": Implies, "=Ob=>": CondOb, "=Fb=>": CondFb}[kind]
    return ctor(body, other)


@given(st.lists(_modal_formulas(), min_size=1, max_size=2),
       st.integers(1, 2))
@settings(max_examples=120, deadline=None)
def test_search_agrees_with_brute_force(formulas, num_worlds):
    from oracle import _Search, ground_instances
    fast = _Search(ground_instances(formulas), num_worlds).run() is not None
    slow = naive_satisfiable(formulas, num_worlds)
    assert fast == slow


def test_returned_model_satisfies_naive_semantics():
    from oracle import _naive_eval, ground_instances
    formulas = [f("Ob p"), f("Pm q"), f("!q")]
    model = oracle_satisfiable(formulas)
    assert model is not None
    rd = {w: {j for (i, j) in model["rd"] if i == w} for w in range(model["worlds"])}
    ri = {w: {j for (i, j) in model["ri"] if i == w} for w in range(model["worlds"])}
    for g in ground_instances(formulas):
        assert _naive_eval(g, 0, rd, ri, model["valuation"])


# --- deontic KD behavior: theorems ------------------------------------------

def test_ob_implies_pm_is_valid():
    # seriality at work: what is obligatory is permitted
    assert oracle_valid([], f("Ob p => Pm p"))


def test_ob_conjunction_projects():
    assert oracle_valid([], f("Ob (p & q) => Ob p"))


def test_ob_aggregates_conjunction():
    assert oracle_valid([], f("Ob p & Ob q => Ob (p & q)"))


def test_fb_is_ob_not_both_directions():
    assert oracle_valid([], f("Fb p => Ob !p"))
    assert oracle_valid([], f("Ob !p => Fb p"))


# --- deontic KD behavior: non-theorems ---------------------------------------

def test_fact_does_not_make_obligation():
    assert oracle_countermodel([], f("p => Ob p")) is not None


def test_obligation_does_not_make_fact():
    assert oracle_countermodel([], f("Ob p => p")) is not None


def test_permission_does_not_make_obligation():
    assert oracle_countermodel([], f("Pm p => Ob p")) is not None


# --- consistency -------------------------------------------------------------

def test_conflicting_obligations_unsatisfiable():
    # seriality gives a deontic successor; p and !p cannot both hold there
    assert oracle_satisfiable([f("Ob p"), f("Ob !p")]) is None


def test_obligation_with_prohibition_unsatisfiable():
    assert oracle_satisfiable([f("Ob p"), f("Fb p")]) is None


def test_obligation_alone_satisfiable():
    assert oracle_satisfiable([f("Ob p")]) is not None


# --- independence shapes -----------------------------------------------------

def test_modus_ponens_dependence():
    assert oracle_valid([f("p"), f("p => q")], f("q"))
    assert oracle_countermodel([f("p => q"), f("q")], f("p")) is not None
    assert oracle_countermodel([f("p"), f("q")], f("p => q")) is None  # also entailed


def test_distinct_atoms_independent():
    assert oracle_countermodel([f("q")], f("p")) is not None


def test_modal_monotonicity_dependence():
    assert oracle_valid([f("Ob p")], f("Ob (p | q)"))


# --- the article fixture ------------------------------------------------------

RULE_PERMIT = ("adult(X) & smoke(X) & child_in_vehicle & vehicle_in_public_place"
               " & !(designed_or_adapted & used_as_accommodation)"
               " =Pm=> punishment_fine(X)")
RULE_FORBID = ("adult(X) & (!smoke(X) | !child_in_vehicle |"
               " !vehicle_in_public_place |"
               " (designed_or_adapted & used_as_accommodation))"
               " =Fb=> punishment_fine(X)")


def rules():
    return [f(RULE_PERMIT), f(RULE_FORBID)]


def test_fixture_rules_consistent():
    assert oracle_satisfiable(rules()) is not None


def test_fixture_rules_independent_of_each_other():
    assert oracle_countermodel([f(RULE_FORBID)], f(RULE_PERMIT)) is not None
    assert oracle_countermodel([f(RULE_PERMIT)], f(RULE_FORBID)) is not None


def scenario(facts, goal):
    axioms = rules() + [f(t) for t in facts]
    return axioms, f(goal)


def test_scenario_no_public_place_forbids_fine():
    axioms, goal = scenario(
        ["adult(a)", "smoke(a)", "child_in_vehicle", "!vehicle_in_public_place"],
        "Fb punishment_fine(a)")
    assert oracle_valid(axioms, goal)


def test_scenario_mobile_home_permits_fine():
    axioms, goal = scenario(
        ["adult(a)", "smoke(a)", "child_in_vehicle", "vehicle_in_public_place",
         "!designed_or_adapted"],
        "Pm punishment_fine(a)")
    assert oracle_valid(axioms, goal)


def test_underspecified_case_draws_no_conclusion():
    axioms, goal = scenario(
        ["adult(c)", "smoke(c)", "child_in_vehicle"],
        "Fb punishment_fine(c)")
    assert oracle_countermodel(axioms, goal) is not None


def test_completed_case_permits_fine():
    axioms, goal = scenario(
        ["adult(c)", "smoke(c)", "child_in_vehicle", "vehicle_in_public_place",
         "!used_as_accommodation"],
        "Pm punishment_fine(c)")
    assert oracle_valid(axioms, goal)
