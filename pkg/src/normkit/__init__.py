"""normkit: formalize normative texts and reason over them.

Legal or regulatory prose is annotated span by span, compiled into formulas
of a quantifier-free deontic logic, and checked for consistency,
independence, and entailment by an embedded prover that returns replayable
proof certificates or explicit countermodels.
"""

from .syntax import (
    App,
    Atom,
    And,
    ClosedFormula,
    CondFb,
    CondOb,
    CondPm,
    Fb,
    Formula,
    Id,
    Implies,
    LanguageError,
    NamedFormula,
    Not,
    Ob,
    Or,
    ParseError,
    Pm,
    Signature,
    Term,
    Theory,
    Var,
    make_theory,
    parse_formula,
    print_formula,
    universal_closure,
)

__version__ = "0.1.0"

__all__ = [
    "App", "Atom", "And", "ClosedFormula", "CondFb", "CondOb", "CondPm",
    "Fb", "Formula", "Id", "Implies", "LanguageError", "NamedFormula",
    "Not", "Ob", "Or", "ParseError", "Pm", "Signature", "Term", "Theory",
    "Var", "make_theory", "parse_formula", "print_formula",
    "universal_closure", "__version__",
]
