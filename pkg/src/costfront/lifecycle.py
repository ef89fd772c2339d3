"""Cost accounting over the conceive / produce / reproduce / replicate cycle.

System cost is paid once (conceive and produce); application cost is paid per
application or user (reproduce and replicate). All costs here are scalars in a
single cost unit. Sums are formed exactly with :class:`fractions.Fraction` so
the accounting identities hold without rounding slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    APPLICATION_STAGES,
    SYSTEM_STAGES,
    ContractError,
    ResourceKind,
    SystemRecord,
    UnitMismatchError,
)


def _nonneg(value, what: str):
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
        raise ContractError(f"{what} must be a number, got {value!r}")
    if not value >= 0:
        raise ContractError(f"{what} must be non-negative, got {value!r}")
    return value


def _kind_costs(costs: Mapping, what: str) -> dict[ResourceKind, Fraction]:
    out: dict[ResourceKind, Fraction] = {}
    for kind, c in costs.items():
        kind = ResourceKind.parse(kind)
        out[kind] = out.get(kind, Fraction(0)) + Fraction(_nonneg(c, f"{what} {kind.value}"))
    return out


@dataclass(frozen=True)
class LifecycleAccount:
    system_cost: float
    app_costs: tuple[float, ...] = ()
    per_resource_app_costs: tuple[Mapping[ResourceKind, float], ...] | None = None

    def __post_init__(self):
        _nonneg(self.system_cost, "system cost")
        object.__setattr__(self, "app_costs", tuple(self.app_costs))
        for j, c in enumerate(self.app_costs):
            _nonneg(c, f"application cost {j}")
        if self.per_resource_app_costs is not None:
            per = tuple(self.per_resource_app_costs)
            if len(per) != len(self.app_costs):
                raise ContractError("per-resource costs must list one map per application")
            for j, (costs, total) in enumerate(zip(per, self.app_costs)):
                s = sum(_kind_costs(costs, f"application {j}").values(), Fraction(0))
                if abs(s - Fraction(total)) > Fraction(1, 10**9) * max(abs(Fraction(total)), 1):
                    raise ContractError(f"application {j}: resource costs sum to {float(s)!r}, not {total!r}")
            object.__setattr__(self, "per_resource_app_costs", per)

    @property
    def n(self) -> int:
        return len(self.app_costs)


def total_cost(account: LifecycleAccount) -> float:
    total = Fraction(account.system_cost) + sum(map(Fraction, account.app_costs), Fraction(0))
    return float(total)


def average_cost_curve(system_cost, app_cost, n_values: Sequence[int]) -> list[tuple[int, Fraction]]:
    """Average cost per application, ``system_cost / n + app_cost``, as exact fractions."""
    C = Fraction(_nonneg(system_cost, "system cost"))
    c = Fraction(_nonneg(app_cost, "application cost"))
    out = []
    for n in n_values:
        if isinstance(n, bool) or int(n) != n or n <= 0:
            raise ContractError(f"number of applications must be a positive integer, got {n!r}")
        n = int(n)
        out.append((n, C / n + c))
    return out


@dataclass(frozen=True)
class ReproducibilityCheck:
    reproducible: bool
    residual: float
    observed: float
    expected: float

    def __bool__(self) -> bool:
        return self.reproducible


def check_specific_reproducibility(
    per_app: Sequence[Mapping],
    baseline: Mapping,
    tolerance: float = 1e-9,
) -> ReproducibilityCheck:
    """Do ``n`` applications cost exactly ``n`` times the baseline in total?

    Only totals are constrained: shifting cost between resource kinds within
    or across applications does not break the identity. ``residual`` is
    observed minus expected.
    """
    if not baseline:
        raise ContractError("baseline costs are empty")
    if not per_app:
        raise ContractError("need at least one application")
    base = sum(_kind_costs(baseline, "baseline").values(), Fraction(0))
    observed = sum(
        (sum(_kind_costs(a, f"application {j}").values(), Fraction(0)) for j, a in enumerate(per_app)),
        Fraction(0),
    )
    expected = len(per_app) * base
    residual = observed - expected
    ok = residual == 0 or abs(residual) <= Fraction(tolerance) * abs(expected)
    return ReproducibilityCheck(ok, float(residual), float(observed), float(expected))


@dataclass(frozen=True)
class ReplicabilityCost:
    total: float
    by_kind: dict[ResourceKind, float]


def replicability_cost(per_app: Sequence[Mapping]) -> ReplicabilityCost:
    if not per_app:
        raise ContractError("need at least one application")
    by_kind: dict[ResourceKind, Fraction] = {}
    for j, costs in enumerate(per_app):
        for kind, c in _kind_costs(costs, f"application {j}").items():
            by_kind[kind] = by_kind.get(kind, Fraction(0)) + c
    total = sum(by_kind.values(), Fraction(0))
    ordered = {k: float(by_kind[k]) for k in ResourceKind if k in by_kind}
    return ReplicabilityCost(float(total), ordered)


@dataclass(frozen=True)
class StageRollup:
    system_cost: float
    app_cost: float
    unit: str


def _stage_sum(record: SystemRecord, stages, registry) -> tuple[Fraction, set[str]]:
    total = Fraction(0)
    units = set()
    for stage in stages:
        vec = record.stage_costs.get(stage)
        if vec is None:
            continue
        for kind, q in vec.items():
            if registry is not None and registry.knows(q.unit):
                total += Fraction(registry.to_base(q.value, q.unit))
                units.add(registry.base_unit)
            else:
                total += Fraction(q.value)
                units.add(q.unit)
    return total, units


def stage_rollup(record: SystemRecord, registry=None) -> StageRollup | None:
    """Split a record's stage costs into system and application parts.

    Returns ``None`` when the record has no stage breakdown, so callers can
    fall back to its undifferentiated resource totals. Units the registry
    knows are converted to its base unit; any remaining mix is rejected.
    """
    if record.stage_costs is None:
        return None
    system, u1 = _stage_sum(record, SYSTEM_STAGES, registry)
    app, u2 = _stage_sum(record, APPLICATION_STAGES, registry)
    units = u1 | u2
    if len(units) > 1:
        raise UnitMismatchError(f"record {record.id!r}: stage costs mix units {sorted(units)}")
    unit = units.pop() if units else (registry.base_unit if registry is not None else "")
    return StageRollup(float(system), float(app), unit)
