"""Observer-indexed valuations with epistemic horizons.

An observer sees a world only if it lies within a bounded hop distance
of the observer's home world over accessibility-feasible edges.  A
proposition counts as true for an observer at a world when the world is
visible and the proposition is directly present or provable there from
a small antecedent drawn from the world's propositions.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .calculus import PreconditionError, Sequent, prove
from .formula import CostModel, Formula, formula_key
from .frame import Frame, accessible, hop_distance

PRESERVED = "preserved"
VIOLATED = "violated"
NOT_ESTABLISHED = "not_established"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Antecedent search is capped at this many formulas to stay decidable.
MAX_ANTECEDENT = 3


@dataclass(frozen=True)
class Observer:
    id: str
    home: str
    horizon: int

    def __post_init__(self) -> None:
        if not _IDENT.match(self.id):
            raise ValueError(f"observer id must be an identifier, got {self.id!r}")
        if not (isinstance(self.horizon, int) and self.horizon >= 0):
            raise ValueError(f"horizon must be an integer >= 0, got {self.horizon!r}")


def observer_sees(frame: Frame, o: Observer, w: str) -> bool:
    """True iff w is reachable from the observer's home within its horizon."""
    distance = hop_distance(frame, o.home, w)
    return distance is not None and distance <= o.horizon


def observer_valuation(frame: Frame, o: Observer, w: str, phi: Formula, model: CostModel) -> int:
    """Observer-relative truth: visible, and present or provable at w.

    Provability searches antecedent sub-multisets of props(w) of size
    at most MAX_ANTECEDENT under the world's own inference capacity and
    curvature.
    """
    world = frame.world(w)
    if not observer_sees(frame, o, w):
        return 0
    if phi in world.props:
        return 1
    items = list(world.props.elements())
    seen = set()
    for size in range(1, MAX_ANTECEDENT + 1):
        for combo in itertools.combinations(items, size):
            sig = tuple(sorted(formula_key(f) for f in combo))
            if sig in seen:
                continue
            seen.add(sig)
            if prove(Sequent(combo, (phi,)), world.lam, model, world.kappa).proved:
                return 1
    return 0


def persistence_check(
    frame: Frame, o: Observer, w: str, w_prime: str, phi: Formula, model: CostModel
) -> str:
    """Classify how an observer-established truth fares across w -> w'.

    Returns NOT_ESTABLISHED when phi never held at w for the observer,
    PRESERVED when it holds on both sides, and VIOLATED when the
    transition loses it, the marker of logical decoherence.
    """
    if not accessible(frame, w, w_prime):
        raise PreconditionError(f"pair {w!r} -> {w_prime!r} is not accessible")
    if not observer_valuation(frame, o, w, phi, model):
        return NOT_ESTABLISHED
    if observer_valuation(frame, o, w_prime, phi, model):
        return PRESERVED
    return VIOLATED
