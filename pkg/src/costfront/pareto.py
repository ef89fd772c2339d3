"""Dominance, non-dominated sets, mixtures of systems, 2D frontiers and progress events.

Records that do not report a compared dimension can neither dominate nor be
dominated on that projection. They are carried on the :class:`Frontier` as
``incomparable`` rather than dropped or imputed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Any, Sequence

from .core import (
    MISSING,
    CombinationMode,
    ContractError,
    DimensionSpec,
    Orientation,
    Point,
    SystemRecord,
    fully_observed,
    project,
    project_all,
)

__all__ = [
    "Frontier",
    "ProgressClass",
    "ClassifierConfig",
    "ProgressAssessment",
    "dominates",
    "pareto_front",
    "mix",
    "achievable_frontier",
    "hypervolume",
    "default_reference",
    "front_gain",
    "assess_progress",
    "classify_progress",
]


@dataclass(frozen=True)
class Frontier:
    """Non-dominated members on ``dims``, ordered by the first dimension then id.

    ``polyline`` is set only for two dimensions and holds the achievable
    boundary (first dimension on the x axis). For ADDITIVE mode it includes
    the staircase corner points, which are not members themselves.
    """

    dims: tuple[DimensionSpec, ...]
    members: tuple[str, ...]
    points: tuple[Point, ...]
    incomparable: tuple[str, ...] = ()
    polyline: tuple[tuple[float, float], ...] | None = None
    mode: CombinationMode | None = None

    def point_of(self, record_id: str) -> Point:
        return self.points[self.members.index(record_id)]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, record_id: object) -> bool:
        return record_id in self.members


def _check_len(point: Sequence, dims: Sequence[DimensionSpec], what: str) -> None:
    if len(point) != len(dims):
        raise ContractError(f"{what} has {len(point)} entries but {len(dims)} dimensions were given")


def _minimizing(point: Point, dims: Sequence[DimensionSpec]) -> tuple:
    return tuple(-v if d.orientation is Orientation.MAXIMIZE else v for v, d in zip(point, dims))


def dominates(a: Point, b: Point, dims: Sequence[DimensionSpec]) -> bool:
    """True iff ``a`` is at least as good as ``b`` everywhere and strictly better somewhere."""
    _check_len(a, dims, "a")
    _check_len(b, dims, "b")
    if not (fully_observed(a) and fully_observed(b)):
        return False
    strictly = False
    for x, y, d in zip(a, b, dims):
        if d.better(y, x):
            return False
        if d.better(x, y):
            strictly = True
    return strictly


def _weakly_dominates_min(p: tuple, q: tuple) -> bool:
    return all(x <= y for x, y in zip(p, q))


def _nondominated_indices(keys: list[tuple]) -> list[int]:
    # Sort-filter: after a lexicographic sort of minimizing keys, a point can only
    # be dominated by an earlier one, and only kept points need to be checked.
    order = sorted(range(len(keys)), key=keys.__getitem__)
    kept: list[int] = []
    for i in order:
        q = keys[i]
        if not any(keys[j] != q and _weakly_dominates_min(keys[j], q) for j in kept):
            kept.append(i)
    return kept


def pareto_front(
    records: Sequence[SystemRecord],
    dims: Sequence[DimensionSpec],
    *,
    mode: CombinationMode | str | None = None,
) -> Frontier:
    """Non-dominated records on ``dims``.

    Identical points from different systems are all kept. With exactly two
    dimensions the achievable polyline is attached; ``mode`` overrides the
    first dimension's combination mode for it.
    """
    records = list(records)
    dims = tuple(dims)
    if not records:
        raise ContractError("pareto_front needs at least one record")
    points = project_all(records, dims)
    observed = [i for i, p in enumerate(points) if fully_observed(p)]
    incomparable = tuple(sorted(records[i].id for i, p in enumerate(points) if not fully_observed(p)))

    keys = [_minimizing(points[i], dims) for i in observed]
    kept = [observed[k] for k in _nondominated_indices(keys)]
    kept.sort(key=lambda i: (points[i][0] if dims else 0, records[i].id))

    polyline = None
    resolved_mode = None
    if len(dims) == 2 and kept:
        resolved_mode = CombinationMode(mode) if mode is not None else dims[0].combination_mode
        polyline = _polyline([points[i] for i in kept], dims[0], dims[1], resolved_mode)
    return Frontier(
        dims=dims,
        members=tuple(records[i].id for i in kept),
        points=tuple(points[i] for i in kept),
        incomparable=incomparable,
        polyline=polyline,
        mode=resolved_mode,
    )


def _lerp(lam, a, b):
    if all(isinstance(v, Rational) for v in (lam, a, b)):
        lam = Fraction(lam)
        return lam * a + (1 - lam) * b
    # Exact then rounded once, so the result is the correctly rounded interpolation.
    lam = Fraction(lam)
    return float(lam * Fraction(a) + (1 - lam) * Fraction(b))


def mix(a: Point, b: Point, lam: float, dims: Sequence[DimensionSpec]) -> Point:
    """The system that runs ``a`` with probability ``lam`` and ``b`` otherwise.

    CONVEX dimensions interpolate; ADDITIVE dimensions pay for both systems.
    At ``lam`` 0 or 1 only one system is needed, so the pure point is returned.
    """
    _check_len(a, dims, "a")
    _check_len(b, dims, "b")
    if not (0 <= lam <= 1):
        raise ContractError(f"mixture weight must lie in [0, 1], got {lam!r}")
    if not (fully_observed(a) and fully_observed(b)):
        raise ContractError("mix needs fully observed points")
    if lam == 1:
        return tuple(a)
    if lam == 0:
        return tuple(b)
    return tuple(
        x + y if d.combination_mode is CombinationMode.ADDITIVE else _lerp(lam, x, y)
        for x, y, d in zip(a, b, dims)
    )


def _cross(o, a, b) -> Fraction:
    o, a, b = ([Fraction(v) for v in p] for p in (o, a, b))
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _polyline(points, x: DimensionSpec, y: DimensionSpec, mode: CombinationMode):
    sx = 1 if x.orientation is Orientation.MINIMIZE else -1
    sy = 1 if y.orientation is Orientation.MAXIMIZE else -1
    # Work in (cost, benefit) space: cost to minimize, benefit to maximize.
    cb = sorted({(sx * p[0], sy * p[1]) for p in points})
    keys = [(c, -b) for c, b in cb]
    cb = [cb[i] for i in sorted(_nondominated_indices(keys))]
    cb.sort()
    if mode is CombinationMode.ADDITIVE:
        out = [cb[0]]
        for c, b in cb[1:]:
            out.append((c, out[-1][1]))
            out.append((c, b))
    else:
        out = []
        for p in cb:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) >= 0:
                out.pop()
            out.append(p)
    return tuple((sx * c, sy * b) for c, b in out)


def achievable_frontier(
    records: Sequence[SystemRecord],
    x: DimensionSpec,
    y: DimensionSpec,
    *,
    mode: CombinationMode | str | None = None,
) -> tuple[tuple[float, float], ...]:
    """Boundary reachable by mixing systems, with ``x`` as cost axis and ``y`` as benefit.

    CONVEX cost gives the upper-left hull of the front; ADDITIVE cost gives the
    axis-parallel staircase through every front point.
    """
    points = [p for p in project_all(records, (x, y)) if fully_observed(p)]
    if not points:
        raise ContractError(f"no record reports both {x.name!r} and {y.name!r}")
    resolved = CombinationMode(mode) if mode is not None else x.combination_mode
    return _polyline(points, x, y, resolved)


def _exact(v) -> Fraction:
    return Fraction(v)


def _hv_min(points: list[tuple], ref: tuple) -> Fraction:
    """Exact dominated volume for minimization; every point is weakly below ``ref``."""
    if not points:
        return Fraction(0)
    d = len(ref)
    if d == 1:
        return ref[0] - min(p[0] for p in points)
    pts = sorted(points, key=lambda p: p[-1])
    total = Fraction(0)
    if d == 2:
        best = None
        for i, p in enumerate(pts):
            best = p[0] if best is None else min(best, p[0])
            upper = pts[i + 1][1] if i + 1 < len(pts) else ref[1]
            total += (upper - p[1]) * (ref[0] - best)
        return total
    active: list[tuple] = []
    for i, p in enumerate(pts):
        active.append(p[:-1])
        upper = pts[i + 1][-1] if i + 1 < len(pts) else ref[-1]
        if upper > p[-1]:
            keep = _nondominated_indices(active)
            active = [active[k] for k in keep]
            total += (upper - p[-1]) * _hv_min(active, ref[:-1])
    return total


def _to_min_exact(point, dims):
    return tuple(_exact(v) for v in _minimizing(point, dims))


def _check_reference(points, reference, dims):
    _check_len(reference, dims, "reference")
    if not fully_observed(reference):
        raise ContractError("reference point must be fully observed")
    ref = _to_min_exact(reference, dims)
    for p in points:
        if not _weakly_dominates_min(p, ref):
            raise ContractError("reference point must be weakly worse than every point")
    return ref


def hypervolume(points: Sequence[Point], dims: Sequence[DimensionSpec], reference: Point) -> float:
    """Volume dominated by ``points`` and bounded by ``reference``, respecting orientation."""
    pts = []
    for p in points:
        _check_len(p, dims, "point")
        if not fully_observed(p):
            raise ContractError("hypervolume needs fully observed points")
        pts.append(_to_min_exact(p, dims))
    ref = _check_reference(pts, reference, dims)
    return float(_hv_min(pts, ref))


def default_reference(points: Sequence[Point], dims: Sequence[DimensionSpec], margin: float = 0.1) -> Point:
    """Per-dimension worst observed value pushed outward by ``margin`` of the range."""
    ref = []
    for k, d in enumerate(dims):
        values = [p[k] for p in points if p[k] is not MISSING]
        if not values:
            raise ContractError(f"no observed values on {d.name!r}")
        lo, hi = min(values), max(values)
        pad = margin * (hi - lo) if hi > lo else margin * max(1.0, abs(hi))
        ref.append(hi + pad if d.orientation is Orientation.MINIMIZE else lo - pad)
    return tuple(ref)


def front_gain(old_front: Frontier, candidate: SystemRecord, reference: Point) -> float:
    """Hypervolume added to ``old_front`` by ``candidate`` (its exclusive contribution)."""
    dims = old_front.dims
    c = project(candidate, dims)
    if not fully_observed(c):
        raise ContractError(f"candidate {candidate.id!r} is not fully observed on the front's dimensions")
    existing = [_to_min_exact(p, dims) for p in old_front.points]
    cmin = _to_min_exact(c, dims)
    ref = _check_reference(existing + [cmin], reference, dims)
    box = math.prod((r - v for r, v in zip(ref, cmin)), start=Fraction(1))
    # Volume the candidate shares with the front = hypervolume of the componentwise joins.
    clipped = [tuple(max(a, b) for a, b in zip(p, cmin)) for p in existing]
    return float(box - _hv_min(clipped, ref))


class ProgressClass(str, Enum):
    FRONT_IMPROVEMENT = "front-improvement"
    FLEXIBILITY = "flexibility"
    DIVERSITY = "diversity"
    NO_PROGRESS = "no-progress"


@dataclass(frozen=True)
class ClassifierConfig:
    """``epsilon`` is a Euclidean distance in min-max normalized space.

    ``min_span`` is the number of existing front vertices a family must come
    near for the flexibility criterion.
    """

    epsilon: float = 0.05
    min_span: int = 2
    receivers: tuple = ()

    def __post_init__(self):
        if not (self.epsilon >= 0):
            raise ContractError(f"epsilon must be non-negative, got {self.epsilon!r}")
        if int(self.min_span) != self.min_span or self.min_span < 2:
            raise ContractError(f"min_span must be an integer >= 2, got {self.min_span!r}")
        object.__setattr__(self, "receivers", tuple(self.receivers))


@dataclass(frozen=True)
class ProgressAssessment:
    progress_class: ProgressClass
    evidence: dict[str, Any] = field(default_factory=dict)


def _scaler(points: list[Point], ndims: int):
    lo = [min(p[k] for p in points) for k in range(ndims)]
    hi = [max(p[k] for p in points) for k in range(ndims)]

    def scale(p):
        return tuple((v - a) / (b - a) if b > a else 0.0 for v, a, b in zip(p, lo, hi))

    return scale


def assess_progress(
    candidate_family: Sequence[SystemRecord],
    dataset: Sequence[SystemRecord],
    dims: Sequence[DimensionSpec],
    config: ClassifierConfig = ClassifierConfig(),
) -> ProgressAssessment:
    """Classify a new family of variants against an existing dataset, with evidence.

    Criteria are tried in order: front improvement, flexibility, diversity.
    Records in ``dataset`` sharing an id with a candidate are ignored.
    """
    candidates = list(candidate_family)
    if not candidates:
        raise ContractError("candidate family is empty")
    dims = tuple(dims)
    cand_ids = {c.id for c in candidates}
    existing = [r for r in dataset if r.id not in cand_ids]
    cand_points = project_all(candidates, dims)
    for c, p in zip(candidates, cand_points):
        if not fully_observed(p):
            raise ContractError(f"candidate {c.id!r} is not fully observed on the analysis dimensions")
    exist_points = project_all(existing, dims) if existing else []

    # 1. front improvement
    observed_existing = [(r, p) for r, p in zip(existing, exist_points) if fully_observed(p)]
    nondominated = [
        c.id for c, p in zip(candidates, cand_points)
        if not any(dominates(q, p, dims) for _, q in observed_existing)
    ]
    front = pareto_front(existing, dims) if existing else Frontier(dims, (), ())
    improved_pairs = [
        [c.id, m]
        for c, p in zip(candidates, cand_points)
        for m, q in zip(front.members, front.points)
        if dominates(p, q, dims)
    ]
    if nondominated:
        chosen_by = []
        if config.receivers:
            from .utility import select_optimal

            pool = existing + candidates
            joint = pareto_front(pool, dims)
            for profile in config.receivers:
                pick = select_optimal(profile, joint, pool, dims)
                if pick in cand_ids:
                    chosen_by.append([profile.name, pick])
        if not config.receivers or chosen_by:
            evidence = {"nondominated_candidates": nondominated, "dominated_members": improved_pairs}
            if config.receivers:
                evidence["selected_by_receivers"] = chosen_by
            return ProgressAssessment(ProgressClass.FRONT_IMPROVEMENT, evidence)

    if not front.members:
        return ProgressAssessment(ProgressClass.NO_PROGRESS, {"reason": "no existing front to compare with"})

    scale = _scaler([p for _, p in observed_existing] + cand_points, len(dims))
    vertices = [(m, scale(q)) for m, q in zip(front.members, front.points)]
    families = {r.id: r.family for r in existing}
    cand_family_names = {c.family for c in candidates}
    cand_scaled = [(c.id, scale(p)) for c, p in zip(candidates, cand_points)]
    eps = config.epsilon

    def near(p, q):
        return math.dist(p, q) <= eps

    # 2. flexibility: one family reaches vertices that otherwise need several families
    covered = []
    for m, v in vertices:
        if families[m] in cand_family_names:
            continue
        hits = sorted(cid for cid, p in cand_scaled if near(p, v))
        if hits:
            covered.append({"vertex": m, "family": families[m], "covered_by": hits})
    owner_families = sorted({c["family"] for c in covered})
    if len(covered) >= config.min_span and len(owner_families) >= 2:
        return ProgressAssessment(
            ProgressClass.FLEXIBILITY,
            {"covered_vertices": covered, "vertex_families": owner_families},
        )

    # 3. diversity: near the front, and unlike everything already in that region
    tags = frozenset().union(*(c.approach_tags for c in candidates))
    region = sorted({m for m, v in vertices for _, p in cand_scaled if near(p, v)})
    if region and tags:
        region_points = [v for m, v in vertices if m in region]
        neighbours = sorted(
            r.id for r, p in observed_existing
            if any(near(scale(p), v) for v in region_points)
        )
        neighbour_tags = frozenset().union(*(r.approach_tags for r in existing if r.id in neighbours))
        if not (tags & neighbour_tags):
            return ProgressAssessment(
                ProgressClass.DIVERSITY,
                {
                    "near_vertices": region,
                    "neighbours": neighbours,
                    "candidate_tags": sorted(tags),
                    "neighbour_tags": sorted(neighbour_tags),
                },
            )

    dominators = {
        c.id: sorted(r.id for r, q in observed_existing if dominates(q, p, dims))
        for c, p in zip(candidates, cand_points)
    }
    return ProgressAssessment(ProgressClass.NO_PROGRESS, {"dominated_by": dominators})


def classify_progress(
    candidate_family: Sequence[SystemRecord],
    dataset: Sequence[SystemRecord],
    dims: Sequence[DimensionSpec],
    config: ClassifierConfig = ClassifierConfig(),
) -> ProgressClass:
    return assess_progress(candidate_family, dataset, dims, config).progress_class
