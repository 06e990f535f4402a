"""Prover front door: refutation search with definitive negative verdicts.

``prove`` decides, for a compiled clause set, whether the empty clause is
derivable (Proved, with a replayable certificate) or the set has a finite
serial Kripke model (CounterSatisfiable, with a checkable model), and gives
up explicitly otherwise (Unknown, with the exhausted resource named).

The route depends on the individual Herbrand universe.  When it is finite
(constants only, the case for every annotated document this system builds)
and small enough for the maxGroundAtoms guard, saturation and the bounded
model search run interleaved: resolution quanta alternate with model
searches of growing world count.  Refutation completeness of the calculus
makes the positive side eventually fire on unsatisfiable input, and a
satisfiable ground bi-modal problem always has a finite model, so the
negative side eventually fires too; within the time budget the pair acts
as a decision procedure.  With an infinite universe only saturation runs,
and a clean saturation without refutation still reports Unknown, because
the negative verdict must carry a finite countermodel object and the
unbounded route cannot build one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Union

from .embedding import ClauseSet, GroundingTooLarge, count_atom_templates, ground_if_finite
from .kripke import KripkeCountermodel, SearchAborted, check_model, find_countermodel_at
from .resolution import ProofCertificate, SaturationProver, check_proof

REASON_DEPTH = "depth-exhausted"
REASON_TIME = "time-exhausted"
REASON_GROUNDING = "grounding-too-large"

# given-clause iterations per quantum when interleaving with model search
_QUANTUM = 50
# world counts worth trying after resolution gave up depth-limited
_STALLED_WORLD_CAP = 8


@dataclass(frozen=True)
class ResourceLimits:
    max_depth: int = 30
    time_budget_ms: int = 5000
    max_ground_atoms: int = 512

    def __post_init__(self):
        if self.max_depth <= 0 or self.time_budget_ms <= 0 or self.max_ground_atoms <= 0:
            raise ValueError("resource limits must be strictly positive")


DEFAULT_LIMITS = ResourceLimits()


@dataclass(frozen=True)
class Proved:
    certificate: ProofCertificate


@dataclass(frozen=True)
class CounterSatisfiable:
    model: KripkeCountermodel


@dataclass(frozen=True)
class Unknown:
    reason: str


ProverResult = Union[Proved, CounterSatisfiable, Unknown]


def prove(cs: ClauseSet, limits: ResourceLimits = DEFAULT_LIMITS) -> ProverResult:
    """Decide the refutation task in ``cs`` within ``limits``.

    Exhaustion is a result, never an exception.  For fixed input and limits
    the outcome is deterministic whenever the task finishes comfortably
    inside the time budget (the budget is wall-clock, so results at the
    edge of it can tip over to Unknown on a slower run).
    """
    deadline = time.monotonic() + limits.time_budget_ms / 1000.0

    try:
        grounded = ground_if_finite(cs)
    except GroundingTooLarge:
        return Unknown(REASON_GROUNDING)
    if grounded is not None and count_atom_templates(grounded) > limits.max_ground_atoms:
        return Unknown(REASON_GROUNDING)

    prover = SaturationProver(cs, max_depth=limits.max_depth, deadline=deadline)

    if grounded is None:
        # infinite universe: saturation is all there is
        while True:
            if time.monotonic() > deadline:
                return Unknown(REASON_TIME)
            outcome = prover.step(_QUANTUM)
            if outcome is None:
                continue
            kind, payload = outcome
            if kind == "proved":
                return Proved(payload)
            return Unknown(REASON_DEPTH)

    # finite universe: interleave, growing the world bound as we go
    k = 0
    saturation: Optional[tuple] = None
    while True:
        if time.monotonic() > deadline:
            return Unknown(REASON_TIME)
        if saturation is None:
            outcome = prover.step(_QUANTUM)
            if outcome is not None:
                saturation = outcome
                if saturation[0] == "proved":
                    return Proved(saturation[1])
        k += 1
        if saturation is not None and saturation[1] and k > _STALLED_WORLD_CAP:
            # resolution hit the depth ceiling and small models are ruled
            # out; a deeper search might settle it either way
            return Unknown(REASON_DEPTH)
        try:
            model = find_countermodel_at(grounded, k, deadline)
        except SearchAborted:
            return Unknown(REASON_TIME)
        if model is not None:
            return CounterSatisfiable(model)


def find_countermodel(cs: ClauseSet, max_worlds: int,
                      limits: ResourceLimits = DEFAULT_LIMITS) -> Optional[KripkeCountermodel]:
    """Bounded search entry point over a not-yet-ground clause set; applies
    the grounding guard, then delegates.  Raises GroundingTooLarge when the
    guard trips and ValueError when the universe is infinite."""
    grounded = ground_if_finite(cs)
    if grounded is None:
        raise ValueError("countermodel search needs a finite individual universe")
    if count_atom_templates(grounded) > limits.max_ground_atoms:
        raise GroundingTooLarge(f"more than {limits.max_ground_atoms} ground atoms")
    deadline = time.monotonic() + limits.time_budget_ms / 1000.0
    for k in range(1, max_worlds + 1):
        model = find_countermodel_at(grounded, k, deadline)
        if model is not None:
            return model
    return None


__all__ = [
    "CounterSatisfiable", "DEFAULT_LIMITS", "Proved", "ProverResult",
    "REASON_DEPTH", "REASON_GROUNDING", "REASON_TIME", "ResourceLimits",
    "Unknown", "check_model", "check_proof", "find_countermodel", "prove",
]
