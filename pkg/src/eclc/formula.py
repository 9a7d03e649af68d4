"""Linear-logic formula trees, coherence classification, and cost models.

Formulas are immutable trees built from atoms and the connectives
tensor (*), lolli (-o), with (&), bang (!) and the budgeted diamond <r>.
Every atom carries a coherence flag: coherent atoms stand for live
quantum resources, non-coherent ones for classical/decohered tokens.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

# Atom names that always parse/serialize as non-coherent.
DEFAULT_CLASSICAL_ATOMS = frozenset({"Classical", "Decohered"})

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _check_ident(text: str, what: str) -> None:
    if not isinstance(text, str) or not _IDENT.match(text):
        raise ValueError(f"{what} must be a nonempty identifier, got {text!r}")


def _seal_hash(node, parts: tuple) -> None:
    # formula trees are deep and hashed constantly in multisets and
    # memo tables; one precomputed hash per node keeps that O(1)
    object.__setattr__(node, "_hash", hash(parts))


def _cached_hash(node) -> int:
    return node._hash


@dataclass(frozen=True)
class Atom:
    """Atomic proposition; ``coherent`` marks a live quantum resource."""

    name: str
    args: tuple[str, ...] = ()
    coherent: bool = True

    def __post_init__(self) -> None:
        _check_ident(self.name, "atom name")
        object.__setattr__(self, "args", tuple(self.args))
        for arg in self.args:
            _check_ident(arg, "atom argument")
        _seal_hash(self, (0, self.name, self.args, self.coherent))

    __hash__ = _cached_hash


@dataclass(frozen=True)
class Tensor:
    """Multiplicative conjunction: both resources held at once."""

    left: "Formula"
    right: "Formula"

    def __post_init__(self) -> None:
        _seal_hash(self, (1, self.left, self.right))

    __hash__ = _cached_hash


@dataclass(frozen=True)
class Lolli:
    """Linear implication: consumes its antecedent exactly once."""

    left: "Formula"
    right: "Formula"

    def __post_init__(self) -> None:
        _seal_hash(self, (2, self.left, self.right))

    __hash__ = _cached_hash


@dataclass(frozen=True)
class With:
    """Additive conjunction: an external choice between alternatives."""

    left: "Formula"
    right: "Formula"

    def __post_init__(self) -> None:
        _seal_hash(self, (3, self.left, self.right))

    __hash__ = _cached_hash


@dataclass(frozen=True)
class Bang:
    """Exponential modality: permits controlled duplication/discarding."""

    inner: "Formula"

    def __post_init__(self) -> None:
        _seal_hash(self, (4, self.inner))

    __hash__ = _cached_hash


@dataclass(frozen=True)
class Diamond:
    """Possibility bounded by a nonnegative transition budget."""

    budget: float
    inner: "Formula"

    __hash__ = _cached_hash

    def __post_init__(self) -> None:
        budget = float(self.budget) + 0.0  # normalize -0.0
        if not math.isfinite(budget) or budget < 0:
            raise ValueError(f"diamond budget must be finite and >= 0, got {self.budget!r}")
        object.__setattr__(self, "budget", budget)
        _seal_hash(self, (5, budget, self.inner))


Formula = Union[Atom, Tensor, Lolli, With, Bang, Diamond]


@lru_cache(maxsize=None)
def formula_key(phi: Formula) -> tuple:
    """Canonical sort/memo key; total order over formula trees."""
    if isinstance(phi, Atom):
        return (0, phi.name, phi.args, phi.coherent)
    if isinstance(phi, Tensor):
        return (1, formula_key(phi.left), formula_key(phi.right))
    if isinstance(phi, Lolli):
        return (2, formula_key(phi.left), formula_key(phi.right))
    if isinstance(phi, With):
        return (3, formula_key(phi.left), formula_key(phi.right))
    if isinstance(phi, Bang):
        return (4, formula_key(phi.inner))
    if isinstance(phi, Diamond):
        return (5, phi.budget, formula_key(phi.inner))
    raise TypeError(f"not a formula: {phi!r}")


def coherence(phi: Formula) -> int:
    """Return 1 iff every atomic leaf of ``phi`` carries the coherent flag.

    Any classical/decohered leaf poisons the whole composite.
    """
    if isinstance(phi, Atom):
        return 1 if phi.coherent else 0
    if isinstance(phi, (Tensor, Lolli, With)):
        return coherence(phi.left) & coherence(phi.right)
    return coherence(phi.inner)


@dataclass(frozen=True)
class CostModel:
    """Per-atom base costs plus the curvature coupling constant alpha.

    Unknown atoms fall back to ``default_cost`` so scenario files need
    not enumerate every atom they mention.
    """

    atom_costs: dict[str, float]
    default_cost: float = 1.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        costs = dict(self.atom_costs)
        for name, cost in costs.items():
            _check_ident(name, "cost atom name")
            if not (math.isfinite(cost) and cost >= 0):
                raise ValueError(f"cost for {name} must be finite and >= 0, got {cost!r}")
        object.__setattr__(self, "atom_costs", costs)
        if not (math.isfinite(self.default_cost) and self.default_cost >= 0):
            raise ValueError(f"default_cost must be finite and >= 0, got {self.default_cost!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha!r}")

    def atom_cost(self, name: str) -> float:
        return self.atom_costs.get(name, self.default_cost)


def base_cost(phi: Formula, model: CostModel) -> float:
    """Flat-space cost: atoms look up the model, tensor/lolli sum,
    with takes the worst branch, bang/diamond pass through."""
    if isinstance(phi, Atom):
        return model.atom_cost(phi.name)
    if isinstance(phi, (Tensor, Lolli)):
        return base_cost(phi.left, model) + base_cost(phi.right, model)
    if isinstance(phi, With):
        return max(base_cost(phi.left, model), base_cost(phi.right, model))
    return base_cost(phi.inner, model)


def curvature_cost(phi: Formula, model: CostModel, kappa: float) -> float:
    """Curvature-scaled cost: base cost inflated by (1 + alpha * kappa)."""
    if not (math.isfinite(kappa) and kappa >= 0):
        raise ValueError(f"kappa must be finite and >= 0, got {kappa!r}")
    return base_cost(phi, model) * (1.0 + model.alpha * kappa)


# Precedence levels for the textual syntax; higher binds tighter.
_LOLLI, _WITH, _TENSOR, _UNARY, _ATOM = 1, 2, 3, 4, 5


def _level(phi: Formula) -> int:
    if isinstance(phi, Atom):
        return _ATOM
    if isinstance(phi, (Bang, Diamond)):
        return _UNARY
    if isinstance(phi, Tensor):
        return _TENSOR
    if isinstance(phi, With):
        return _WITH
    return _LOLLI


def format_real(x: float) -> str:
    """Shortest decimal representation that round-trips to the same float."""
    return repr(float(x) + 0.0)


def format_formula(phi: Formula, classical_atoms: frozenset[str] = DEFAULT_CLASSICAL_ATOMS) -> str:
    """Pretty-print ``phi`` with minimal parentheses.

    The output reparses to a structurally identical tree.  Coherent
    atoms whose name is in ``classical_atoms`` have no textual form and
    raise ValueError.
    """

    def wrap(child: Formula, minimum: int) -> str:
        text = go(child)
        return f"({text})" if _level(child) < minimum else text

    def go(node: Formula) -> str:
        if isinstance(node, Atom):
            head = node.name
            if node.args:
                head += "(" + ",".join(node.args) + ")"
            if node.name in classical_atoms:
                if node.coherent:
                    raise ValueError(
                        f"atom {node.name!r} is in the classical set but flagged coherent; "
                        "it has no serializable form"
                    )
                return head
            return head if node.coherent else "~" + head
        if isinstance(node, Bang):
            return "!" + wrap(node.inner, _UNARY)
        if isinstance(node, Diamond):
            return f"<{format_real(node.budget)}>" + wrap(node.inner, _UNARY)
        if isinstance(node, Tensor):
            return f"{wrap(node.left, _TENSOR)} * {wrap(node.right, _TENSOR + 1)}"
        if isinstance(node, With):
            return f"{wrap(node.left, _WITH)} & {wrap(node.right, _WITH + 1)}"
        if isinstance(node, Lolli):
            return f"{wrap(node.left, _LOLLI + 1)} -o {wrap(node.right, _LOLLI)}"
        raise TypeError(f"not a formula: {node!r}")

    return go(phi)
