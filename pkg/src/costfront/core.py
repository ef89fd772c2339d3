"""Domain types shared by every analysis: resources, performance, records, dimensions."""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence, Union


class CostfrontError(Exception):
    """Base class for all library errors."""


class ContractError(CostfrontError, ValueError):
    """A documented precondition was violated by the caller."""


class SchemaError(CostfrontError, ValueError):
    """Input data does not conform to the record schema."""

    def __init__(self, message: str, *, row: int | None = None, field: str | None = None):
        self.row = row
        self.field = field
        prefix = []
        if row is not None:
            prefix.append(f"row {row}")
        if field is not None:
            prefix.append(f"field {field!r}")
        super().__init__(f"{', '.join(prefix)}: {message}" if prefix else message)


class UnknownDimensionError(SchemaError):
    pass


class UnitMismatchError(SchemaError):
    pass


class ResourceKind(str, Enum):
    """The eight resource kinds an AI system may consume."""

    DATA = "data"
    KNOWLEDGE = "knowledge"
    SOFTWARE = "software"
    HARDWARE = "hardware"
    MANIPULATION = "manipulation"
    COMPUTATION = "computation"
    NETWORK = "network"
    TIME = "time"

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @classmethod
    def parse(cls, name: str | ResourceKind) -> ResourceKind:
        if isinstance(name, ResourceKind):
            return name
        try:
            return cls(name)
        except ValueError:
            pass
        for kind, sym in _SYMBOLS.items():
            if sym == name:
                return kind
        raise UnknownDimensionError(f"unknown resource kind {name!r}")


_SYMBOLS = {
    ResourceKind.DATA: "r_d",
    ResourceKind.KNOWLEDGE: "r_k",
    ResourceKind.SOFTWARE: "r_s",
    ResourceKind.HARDWARE: "r_h",
    ResourceKind.MANIPULATION: "r_m",
    ResourceKind.COMPUTATION: "r_c",
    ResourceKind.NETWORK: "r_n",
    ResourceKind.TIME: "r_t",
}

RESOURCE_NAMES = tuple(k.value for k in ResourceKind)


class Orientation(str, Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


class Source(str, Enum):
    PERFORMANCE = "performance"
    RESOURCE = "resource"


class CombinationMode(str, Enum):
    """How a dimension behaves when two systems are mixed with probability lambda."""

    CONVEX = "convex"
    ADDITIVE = "additive"


class LifecycleStage(str, Enum):
    CONCEIVE = "conceive"
    PRODUCE = "produce"
    REPRODUCE = "reproduce"
    REPLICATE = "replicate"


SYSTEM_STAGES = (LifecycleStage.CONCEIVE, LifecycleStage.PRODUCE)
APPLICATION_STAGES = (LifecycleStage.REPRODUCE, LifecycleStage.REPLICATE)


class ReportStatus(str, Enum):
    """Whether a publication reports a dimension, with the legend glyph used in coverage tables."""

    REPORTED = "reported"
    PARTIAL = "partial"
    MISSING_RELEVANT = "missing"
    NOT_APPLICABLE = "na"

    @property
    def glyph(self) -> str:
        return _GLYPHS[self]

    @classmethod
    def from_glyph(cls, glyph: str) -> ReportStatus:
        for status, g in _GLYPHS.items():
            if g == glyph:
                return status
        raise ValueError(f"unknown report glyph {glyph!r}")


_GLYPHS = {
    ReportStatus.REPORTED: "✓",
    ReportStatus.PARTIAL: "○",
    ReportStatus.MISSING_RELEVANT: "×",
    ReportStatus.NOT_APPLICABLE: "−",
}


class _Missing:
    """Marker for a dimension a record does not report. Never equal to a number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return (_Missing, ())


MISSING: Any = _Missing()

Value = Union[float, _Missing]
Point = tuple  # tuple[Value, ...]


def is_missing(value: object) -> bool:
    return value is MISSING


def fully_observed(point: Sequence[object]) -> bool:
    return all(v is not MISSING for v in point)


def _check_number(value: object, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{what} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise SchemaError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: str

    def __post_init__(self):
        _check_number(self.value, "quantity value")
        if self.value < 0:
            raise SchemaError(f"resource values must be non-negative, got {self.value!r}")
        if not isinstance(self.unit, str) or not self.unit:
            raise SchemaError(f"unit must be a non-empty string, got {self.unit!r}")


@dataclass(frozen=True)
class ResourceVector:
    """Quantities per resource kind. Kinds that are absent were not reported."""

    entries: Mapping[ResourceKind, Quantity] = field(default_factory=dict)

    def __post_init__(self):
        entries = {}
        for kind, q in dict(self.entries).items():
            kind = ResourceKind.parse(kind)
            if kind in entries:
                raise SchemaError(f"resource kind {kind.value!r} given twice")
            if not isinstance(q, Quantity):
                raise SchemaError(f"resource {kind.value!r} must be a Quantity")
            entries[kind] = q
        ordered = {k: entries[k] for k in ResourceKind if k in entries}
        object.__setattr__(self, "entries", ordered)

    @classmethod
    def of(cls, **values: tuple[float, str]) -> ResourceVector:
        """``ResourceVector.of(computation=(5, "gpu"))``."""
        return cls({ResourceKind.parse(k): Quantity(*v) for k, v in values.items()})

    def get(self, kind: ResourceKind | str) -> Quantity | None:
        return self.entries.get(ResourceKind.parse(kind))

    def __contains__(self, kind) -> bool:
        return ResourceKind.parse(kind) in self.entries

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return self.entries.items()


@dataclass(frozen=True)
class PerformanceVector:
    metrics: Mapping[str, float] = field(default_factory=dict)
    orientation: Mapping[str, Orientation] = field(default_factory=dict)

    def __post_init__(self):
        metrics = {}
        for name, value in dict(self.metrics).items():
            if name in RESOURCE_NAMES:
                raise SchemaError(f"performance metric {name!r} clashes with a resource kind")
            metrics[name] = float(_check_number(value, f"metric {name!r}"))
        orientation = {}
        for name, o in dict(self.orientation).items():
            try:
                orientation[name] = Orientation(o)
            except ValueError:
                raise SchemaError(f"orientation of {name!r} must be 'max' or 'min', got {o!r}") from None
        for name in metrics:
            # Metrics without an explicit orientation are scores to maximize.
            orientation.setdefault(name, Orientation.MAXIMIZE)
        object.__setattr__(self, "metrics", dict(sorted(metrics.items())))
        object.__setattr__(self, "orientation", dict(sorted(orientation.items())))


@dataclass(frozen=True)
class SystemRecord:
    id: str
    family: str = ""
    approach_tags: frozenset[str] = frozenset()
    date: _dt.date | None = None
    performance: PerformanceVector = field(default_factory=PerformanceVector)
    resources: ResourceVector = field(default_factory=ResourceVector)
    stage_costs: Mapping[LifecycleStage, ResourceVector] | None = None
    report_status: Mapping[str, ReportStatus] = field(default_factory=dict)
    provenance: str = ""
    extra: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise SchemaError("record id must be a non-empty string", field="id")
        object.__setattr__(self, "approach_tags", frozenset(self.approach_tags))
        if self.stage_costs is not None:
            stages = {LifecycleStage(s): v for s, v in dict(self.stage_costs).items()}
            object.__setattr__(self, "stage_costs", {s: stages[s] for s in LifecycleStage if s in stages})
        status = {}
        for dim, s in dict(self.report_status).items():
            name = dim.value if isinstance(dim, ResourceKind) else str(dim)
            try:
                status[name] = ReportStatus(s)
            except ValueError:
                raise SchemaError(f"unknown report status {s!r}", field=f"report_status.{name}") from None
        object.__setattr__(self, "report_status", dict(sorted(status.items())))

    def value(self, dim: DimensionSpec) -> Value:
        if dim.source is Source.RESOURCE:
            q = self.resources.get(dim.name)
            return MISSING if q is None else q.value
        return self.performance.metrics.get(dim.name, MISSING)

    def unit(self, dim: DimensionSpec) -> str | None:
        if dim.source is Source.RESOURCE:
            q = self.resources.get(dim.name)
            return None if q is None else q.unit
        return None


@dataclass(frozen=True)
class DimensionSpec:
    """One analysis axis. Resources default to MINIMIZE; performance to MAXIMIZE."""

    name: str
    source: Source = Source.PERFORMANCE
    orientation: Orientation | None = None
    combination_mode: CombinationMode | None = None

    def __post_init__(self):
        source = Source(self.source)
        object.__setattr__(self, "source", source)
        if source is Source.RESOURCE:
            object.__setattr__(self, "name", ResourceKind.parse(self.name).value)
        elif self.name in RESOURCE_NAMES:
            raise UnknownDimensionError(f"{self.name!r} is a resource kind, not a performance metric")
        if self.orientation is None:
            default = Orientation.MINIMIZE if source is Source.RESOURCE else Orientation.MAXIMIZE
            object.__setattr__(self, "orientation", default)
        else:
            object.__setattr__(self, "orientation", Orientation(self.orientation))
        if self.combination_mode is None:
            # Summing is the safe assumption for a resource; scores interpolate.
            default = CombinationMode.ADDITIVE if source is Source.RESOURCE else CombinationMode.CONVEX
            object.__setattr__(self, "combination_mode", default)
        else:
            object.__setattr__(self, "combination_mode", CombinationMode(self.combination_mode))

    @classmethod
    def resource(cls, kind: ResourceKind | str, **kw) -> DimensionSpec:
        return cls(ResourceKind.parse(kind).value, Source.RESOURCE, **kw)

    @classmethod
    def metric(cls, name: str, **kw) -> DimensionSpec:
        return cls(name, Source.PERFORMANCE, **kw)

    @property
    def qualified_name(self) -> str:
        prefix = "resource" if self.source is Source.RESOURCE else "perf"
        return f"{prefix}:{self.name}"

    def better(self, a: float, b: float) -> bool:
        return a > b if self.orientation is Orientation.MAXIMIZE else a < b


def project(record: SystemRecord, dims: Sequence[DimensionSpec]) -> Point:
    """Values of ``record`` on ``dims`` in order; unreported entries are MISSING."""
    return tuple(record.value(d) for d in dims)


def project_all(records: Iterable[SystemRecord], dims: Sequence[DimensionSpec]) -> list[Point]:
    """Project many records, refusing to compare a dimension reported in mixed units."""
    records = list(records)
    for d in dims:
        if d.source is not Source.RESOURCE:
            continue
        units = {r.unit(d) for r in records} - {None}
        if len(units) > 1:
            raise UnitMismatchError(
                f"dimension {d.name!r} mixes units {sorted(units)}; normalize the dataset first"
            )
    return [project(r, dims) for r in records]
