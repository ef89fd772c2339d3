"""Separable utilities, receiver gradients and gradient-optimal selection."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .core import (
    MISSING,
    ContractError,
    CostfrontError,
    DimensionSpec,
    Orientation,
    ResourceKind,
    SystemRecord,
    UnknownDimensionError,
    project_all,
)
from .pareto import Frontier

__all__ = [
    "EvaluationError",
    "SelectionError",
    "PiecewiseLinear",
    "CostModel",
    "UtilityModel",
    "Normalization",
    "ReceiverProfile",
    "parse_gradient",
    "evaluate_utility",
    "receiver_utility",
    "utility_table",
    "select_optimal",
]


class EvaluationError(CostfrontError, LookupError):
    def __init__(self, dimension: str, record_id: str | None = None):
        self.dimension = dimension
        who = f" for record {record_id!r}" if record_id else ""
        super().__init__(f"dimension {dimension!r} is not reported{who}")


class SelectionError(CostfrontError):
    pass


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolation through breakpoints, extended by the end slopes."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple(sorted((float(x), float(y)) for x, y in self.knots))
        if len(knots) < 2:
            raise ContractError("a piecewise-linear function needs at least two knots")
        if len({x for x, _ in knots}) != len(knots):
            raise ContractError("knot abscissae must be distinct")
        object.__setattr__(self, "knots", knots)

    @classmethod
    def linear(cls, slope: float = 1.0) -> PiecewiseLinear:
        return cls(((0.0, 0.0), (1.0, slope)))

    @property
    def non_decreasing(self) -> bool:
        return all(y1 <= y2 for (_, y1), (_, y2) in zip(self.knots, self.knots[1:]))

    def __call__(self, x: float) -> float:
        xs = [k[0] for k in self.knots]
        i = bisect.bisect_right(xs, x) - 1
        i = min(max(i, 0), len(xs) - 2)
        (x0, y0), (x1, y1) = self.knots[i], self.knots[i + 1]
        if x == x0:
            return y0
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


@dataclass(frozen=True)
class CostModel:
    """Cost functions per resource kind; only listed kinds are charged."""

    functions: Mapping[ResourceKind, PiecewiseLinear] = field(default_factory=dict)

    def __post_init__(self):
        fns = {}
        for kind, fn in dict(self.functions).items():
            kind = ResourceKind.parse(kind)
            if not fn.non_decreasing:
                raise ContractError(f"cost function for {kind.value!r} must be non-decreasing")
            if fn(0.0) != 0:
                raise ContractError(f"cost function for {kind.value!r} must be zero at zero")
            fns[kind] = fn
        object.__setattr__(self, "functions", {k: fns[k] for k in ResourceKind if k in fns})

    @classmethod
    def linear(cls, coefficients: Mapping[ResourceKind | str, float]) -> CostModel:
        return cls({k: PiecewiseLinear.linear(c) for k, c in coefficients.items()})

    def cost_terms(self, record: SystemRecord) -> dict[ResourceKind, float]:
        terms = {}
        for kind, fn in self.functions.items():
            q = record.resources.get(kind)
            if q is None:
                raise EvaluationError(kind.value, record.id)
            terms[kind] = fn(q.value)
        return terms


@dataclass(frozen=True)
class UtilityModel:
    """Benefit of performance minus the sum of per-resource costs."""

    benefit: Mapping[str, PiecewiseLinear] = field(default_factory=dict)
    costs: CostModel = field(default_factory=CostModel)

    def __post_init__(self):
        for name, fn in dict(self.benefit).items():
            if not fn.non_decreasing:
                raise ContractError(f"benefit function for {name!r} must be non-decreasing")

    def benefit_of(self, record: SystemRecord) -> float:
        total = 0.0
        for name, fn in self.benefit.items():
            value = record.performance.metrics.get(name)
            if value is None:
                raise EvaluationError(name, record.id)
            total += fn(value)
        return total


def evaluate_utility(model: UtilityModel, record: SystemRecord) -> float:
    benefit = model.benefit_of(record)
    return benefit - math.fsum(model.costs.cost_terms(record).values())


class Normalization(str, Enum):
    MINMAX = "minmax"
    RAW = "raw"


@dataclass(frozen=True)
class ReceiverProfile:
    """A recipient's non-negative weights over analysis dimensions."""

    name: str
    gradient: Mapping[str, float]
    normalization: Normalization = Normalization.MINMAX

    def __post_init__(self):
        gradient = {}
        for dim, w in dict(self.gradient).items():
            dim = dim.value if isinstance(dim, ResourceKind) else str(dim).split(":", 1)[-1]
            w = float(w)
            if not (w >= 0) or math.isinf(w):
                raise ContractError(f"gradient weight for {dim!r} must be finite and non-negative, got {w!r}")
            gradient[dim] = w
        if not any(w > 0 for w in gradient.values()):
            raise ContractError("gradient needs at least one positive weight")
        object.__setattr__(self, "gradient", dict(sorted(gradient.items())))
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    def scaled(self, k: float) -> ReceiverProfile:
        if not k > 0:
            raise ContractError("scale factor must be positive")
        return ReceiverProfile(self.name, {d: w * k for d, w in self.gradient.items()}, self.normalization)


def parse_gradient(text: str, name: str = "cli") -> ReceiverProfile:
    """Parse ``"elo=2,computation=1"`` into a profile."""
    gradient = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        dim, sep, weight = part.partition("=")
        if not sep:
            raise ContractError(f"gradient entry {part!r} is not of the form dim=weight")
        try:
            gradient[dim.strip()] = float(weight)
        except ValueError:
            raise ContractError(f"gradient weight {weight!r} is not a number") from None
    return ReceiverProfile(name, gradient)


def _resolve(profile: ReceiverProfile, dims: Sequence[DimensionSpec]) -> list[tuple[int, DimensionSpec, float]]:
    index = {d.name: k for k, d in enumerate(dims)}
    out = []
    for name, w in profile.gradient.items():
        if name not in index:
            raise UnknownDimensionError(f"gradient names unknown dimension {name!r}")
        out.append((index[name], dims[index[name]], w))
    return out


def _extents(dataset, dims):
    points = project_all(dataset, dims)
    ext = []
    for k in range(len(dims)):
        values = [p[k] for p in points if p[k] is not MISSING]
        ext.append((min(values), max(values)) if values else (0.0, 0.0))
    return ext


def _utility(weighted, point, extents, normalization, record_id):
    total = []
    for k, d, w in weighted:
        v = point[k]
        if v is MISSING:
            if w == 0:
                continue
            raise EvaluationError(d.name, record_id)
        if normalization is Normalization.MINMAX:
            lo, hi = extents[k]
            v = (v - lo) / (hi - lo) if hi > lo else 0.0
        sign = 1.0 if d.orientation is Orientation.MAXIMIZE else -1.0
        total.append(sign * w * v)
    return math.fsum(total)


def receiver_utility(
    profile: ReceiverProfile,
    record: SystemRecord,
    dataset: Sequence[SystemRecord],
    dims: Sequence[DimensionSpec],
) -> float:
    """Weighted benefits minus weighted costs, min-max scaled over ``dataset`` by default.

    A dimension on which every record agrees normalizes to 0.
    """
    weighted = _resolve(profile, dims)
    extents = _extents(list(dataset) + [record], dims)
    (point,) = project_all([record], dims)
    return _utility(weighted, point, extents, profile.normalization, record.id)


def utility_table(
    profile: ReceiverProfile,
    front: Frontier,
    dataset: Sequence[SystemRecord],
    dims: Sequence[DimensionSpec] | None = None,
) -> list[tuple[str, float]]:
    """Utilities of the front members that report every weighted dimension, best first."""
    dims = tuple(front.dims if dims is None else dims)
    weighted = _resolve(profile, dims)
    dataset = list(dataset)
    by_id = {r.id: r for r in dataset}
    missing = [m for m in front.members if m not in by_id]
    if missing:
        raise SelectionError(f"front members {missing} are not in the dataset")
    members = [by_id[m] for m in front.members]
    extents = _extents(dataset, dims)
    points = project_all(members, dims)
    rows = []
    for r, p in zip(members, points):
        try:
            rows.append((r.id, _utility(weighted, p, extents, profile.normalization, r.id)))
        except EvaluationError:
            continue
    rows.sort(key=lambda row: (-row[1], row[0]))
    return rows


def select_optimal(
    profile: ReceiverProfile,
    front: Frontier,
    dataset: Sequence[SystemRecord],
    dims: Sequence[DimensionSpec] | None = None,
) -> str:
    """Id of the front member with the highest receiver utility.

    Utilities equal up to rounding (relative 1e-12 of the weight mass) are
    ties, broken by the smallest id, so positive rescaling of the gradient
    never changes the answer.
    """
    rows = utility_table(profile, front, dataset, dims)
    if not rows:
        raise SelectionError("no front member reports every weighted dimension")
    best = rows[0][1]
    tol = 1e-12 * max(1.0, abs(best), sum(profile.gradient.values()))
    return min(rid for rid, u in rows if best - u <= tol)
