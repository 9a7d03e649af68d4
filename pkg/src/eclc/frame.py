"""Energy-weighted Kripke frames and resource-indexed modal evaluation.

A frame is a finite set of worlds joined by directed edges, each edge
annotated with a transition cost deltaE.  A transition w -> w' is
accessible iff the edge exists and its deltaE does not exceed the
source world's current energy budget.  Queries are pure; only the
calculus transition operations mutate world state.
"""

from __future__ import annotations

import math
import re
from collections import Counter, deque
from dataclasses import dataclass, field

from .formula import CostModel, Diamond, Formula

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class UnknownWorldError(Exception):
    """Raised when a query names a world absent from the frame."""


@dataclass
class World:
    """Logical context: proposition multiset, energy budget, curvature,
    and inference capacity (maximum proof depth)."""

    id: str
    energy: float
    kappa: float
    lam: int
    props: Counter = field(default_factory=Counter)

    def __post_init__(self) -> None:
        if not _IDENT.match(self.id):
            raise ValueError(f"world id must be an identifier, got {self.id!r}")
        self.energy = float(self.energy) + 0.0
        self.kappa = float(self.kappa) + 0.0
        if not (math.isfinite(self.energy) and self.energy >= 0):
            raise ValueError(f"energy must be finite and >= 0, got {self.energy!r}")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise ValueError(f"kappa must be finite and >= 0, got {self.kappa!r}")
        if not (isinstance(self.lam, int) and self.lam >= 1):
            raise ValueError(f"lambda must be an integer >= 1, got {self.lam!r}")
        self.props = Counter(self.props)

    def copy(self) -> "World":
        return World(self.id, self.energy, self.kappa, self.lam, Counter(self.props))


@dataclass(frozen=True)
class PathCost:
    """Hop count and summed deltaE of a feasible directed path."""

    hops: int
    total_delta_e: float

    def __post_init__(self) -> None:
        if self.hops < 0 or self.total_delta_e < 0:
            raise ValueError("path cost components must be >= 0")


class Frame:
    """Directed graph of worlds; at most one edge per ordered pair."""

    def __init__(self, worlds, edges) -> None:
        self.worlds: dict[str, World] = {}
        for world in worlds:
            if world.id in self.worlds:
                raise ValueError(f"duplicate world id {world.id!r}")
            self.worlds[world.id] = world
        self.edges: dict[tuple[str, str], float] = {}
        for src, dst, delta_e in edges:
            if src not in self.worlds or dst not in self.worlds:
                raise ValueError(f"edge {src!r} -> {dst!r} names an undeclared world")
            if (src, dst) in self.edges:
                raise ValueError(f"duplicate edge {src!r} -> {dst!r}")
            delta_e = float(delta_e) + 0.0
            if not (math.isfinite(delta_e) and delta_e >= 0):
                raise ValueError(f"deltaE must be finite and >= 0, got {delta_e!r}")
            self.edges[(src, dst)] = delta_e

    def world(self, world_id: str) -> World:
        try:
            return self.worlds[world_id]
        except KeyError:
            raise UnknownWorldError(f"unknown world {world_id!r}") from None

    def successors(self, world_id: str):
        """Yield (target id, deltaE) pairs in edge declaration order."""
        self.world(world_id)
        for (src, dst), delta_e in self.edges.items():
            if src == world_id:
                yield dst, delta_e

    def copy(self) -> "Frame":
        dup = Frame.__new__(Frame)
        dup.worlds = {wid: world.copy() for wid, world in self.worlds.items()}
        dup.edges = dict(self.edges)
        return dup

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.worlds == other.worlds and self.edges == other.edges

    def __repr__(self) -> str:
        return f"Frame(worlds={list(self.worlds)}, edges={len(self.edges)})"


def accessible(frame: Frame, w: str, w_prime: str) -> bool:
    """True iff an edge w -> w' exists and its deltaE fits w's energy."""
    source = frame.world(w)
    frame.world(w_prime)
    delta_e = frame.edges.get((w, w_prime))
    return delta_e is not None and delta_e <= source.energy


def eval_diamond(frame: Frame, w: str, phi: Formula, budget: float, model: CostModel) -> bool:
    """True iff some accessible successor holds ``phi`` (syntactic
    membership) over an edge whose deltaE is within ``budget``."""
    source = frame.world(w)
    for dst, delta_e in frame.successors(w):
        if delta_e <= source.energy and delta_e <= budget and phi in frame.world(dst).props:
            return True
    return False


def eval_prop(frame: Frame, w: str, phi: Formula, model: CostModel) -> int:
    """Valuation V(w, phi): diamonds dispatch to their budgeted search,
    everything else is direct membership in the world's propositions."""
    if isinstance(phi, Diamond):
        return 1 if eval_diamond(frame, w, phi.inner, phi.budget, model) else 0
    return 1 if phi in frame.world(w).props else 0


def hop_distance(frame: Frame, w: str, w_prime: str) -> int | None:
    """Length of the shortest directed path over accessible edges, each
    step gated by its own source world's energy; None if unreachable."""
    frame.world(w)
    frame.world(w_prime)
    if w == w_prime:
        return 0
    seen = {w}
    queue = deque([(w, 0)])
    while queue:
        here, dist = queue.popleft()
        for dst, _ in frame.successors(here):
            if dst in seen or not accessible(frame, here, dst):
                continue
            if dst == w_prime:
                return dist + 1
            seen.add(dst)
            queue.append((dst, dist + 1))
    return None


def path_cost(frame: Frame, w: str, w_prime: str) -> PathCost | None:
    """Cheapest feasible path as (hops, total deltaE), minimizing hops
    first and summed deltaE among equal-hop paths; None if unreachable."""
    frame.world(w)
    frame.world(w_prime)
    best: dict[str, tuple[int, float]] = {w: (0, 0.0)}
    queue = deque([w])
    while queue:
        here = queue.popleft()
        hops, spent = best[here]
        for dst, delta_e in frame.successors(here):
            if not accessible(frame, here, dst):
                continue
            candidate = (hops + 1, spent + delta_e)
            if dst not in best or candidate < best[dst]:
                best[dst] = candidate
                queue.append(dst)
    if w_prime not in best:
        return None
    return PathCost(*best[w_prime])
