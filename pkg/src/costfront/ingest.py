"""Datasets on disk: JSON-lines and CSV codecs, unit normalization, coverage matrices.

JSON-lines is canonical: one record per line. An optional first line of the
form ``{"_dataset": {...}}`` carries the dataset name, dimension specs,
receiver profiles and unit overrides. Without it, dimensions are inferred
from the records.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import IO, Any, Iterable, Mapping, Sequence

from .core import (
    RESOURCE_NAMES,
    CostfrontError,
    DimensionSpec,
    LifecycleStage,
    Orientation,
    PerformanceVector,
    Quantity,
    ReportStatus,
    ResourceKind,
    ResourceVector,
    SchemaError,
    Source,
    SystemRecord,
    UnknownDimensionError,
)
from .utility import ReceiverProfile

__all__ = [
    "UnknownUnitError",
    "UnitRegistry",
    "DEFAULT_REGISTRY",
    "normalize_compute",
    "Dataset",
    "load_dataset",
    "save_dataset",
    "read_dataset",
    "CoverageReport",
    "coverage_report",
    "CASE_STUDIES",
    "load_case_study",
    "bundled_case_studies",
]


class UnknownUnitError(CostfrontError, LookupError):
    def __init__(self, unit: str, known: Iterable[str]):
        self.unit = unit
        self.known = sorted(known)
        super().__init__(f"unknown unit {unit!r}; registered units: {', '.join(self.known)}")


@dataclass(frozen=True)
class UnitRegistry:
    """Compute units as multiples of one CPU (device-time, not device count)."""

    multipliers: Mapping[str, float] = field(
        default_factory=lambda: {"cpu": 1, "cpu-equivalent": 1, "gpu": 5, "tpu-v1": 60, "tpu-v2": 180}
    )
    base_unit: str = "cpu"

    def __post_init__(self):
        table = {}
        for unit, m in dict(self.multipliers).items():
            if isinstance(m, bool) or not isinstance(m, (int, float)) or not (m > 0) or math.isinf(m):
                raise SchemaError(f"multiplier for unit {unit!r} must be a positive number, got {m!r}")
            table[str(unit)] = m
        if table.get(self.base_unit) != 1:
            raise SchemaError(f"base unit {self.base_unit!r} must have multiplier 1")
        object.__setattr__(self, "multipliers", dict(sorted(table.items())))

    def knows(self, unit: str) -> bool:
        return unit in self.multipliers

    def multiplier(self, unit: str) -> float:
        try:
            return self.multipliers[unit]
        except KeyError:
            raise UnknownUnitError(unit, self.multipliers) from None

    def to_base(self, value: float, unit: str) -> float:
        return value * self.multiplier(unit)

    def convert(self, value: float, from_unit: str, to_unit: str) -> float:
        """Exact ratio of multipliers applied once, so the result is correctly rounded."""
        ratio = Fraction(self.multiplier(from_unit)) / Fraction(self.multiplier(to_unit))
        return float(Fraction(value) * ratio)

    def with_overrides(self, overrides: Mapping[str, float]) -> UnitRegistry:
        if not overrides:
            return self
        return UnitRegistry({**self.multipliers, **overrides}, self.base_unit)


DEFAULT_REGISTRY = UnitRegistry()


def normalize_compute(value: float, unit: str, registry: UnitRegistry = DEFAULT_REGISTRY) -> float:
    """``value`` in ``unit`` expressed in CPU-equivalents."""
    if not value >= 0:
        raise SchemaError(f"compute value must be non-negative, got {value!r}")
    return registry.to_base(value, unit)


@dataclass(frozen=True)
class Dataset:
    name: str
    records: tuple[SystemRecord, ...]
    dimension_specs: tuple[DimensionSpec, ...]
    receivers: tuple[ReceiverProfile, ...] = ()
    unit_overrides: Mapping[str, float] = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "dimension_specs", tuple(self.dimension_specs))
        object.__setattr__(self, "receivers", tuple(self.receivers))
        object.__setattr__(self, "unit_overrides", dict(sorted(dict(self.unit_overrides).items())))
        seen = set()
        for row, r in enumerate(self.records, 1):
            if r.id in seen:
                raise SchemaError(f"duplicate id {r.id!r}", row=row, field="id")
            seen.add(r.id)
        names = [d.name for d in self.dimension_specs]
        if len(set(names)) != len(names):
            raise SchemaError("dimension specs repeat a name")
        allowed = set(names) | set(RESOURCE_NAMES)
        for row, r in enumerate(self.records, 1):
            for dim in r.report_status:
                if dim not in allowed:
                    raise UnknownDimensionError(
                        f"report status names unknown dimension {dim!r}", row=row, field="report_status"
                    )
        self.registry  # validates overrides

    @property
    def registry(self) -> UnitRegistry:
        return DEFAULT_REGISTRY.with_overrides(self.unit_overrides)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.records)

    def record(self, record_id: str) -> SystemRecord:
        for r in self.records:
            if r.id == record_id:
                return r
        raise KeyError(record_id)

    def dimension(self, name: str) -> DimensionSpec:
        """Look up a spec by name; ``resource:`` and ``perf:`` prefixes are accepted."""
        prefix, sep, bare = name.partition(":")
        source = None
        if sep:
            sources = {"resource": Source.RESOURCE, "perf": Source.PERFORMANCE, "performance": Source.PERFORMANCE}
            if prefix not in sources:
                raise UnknownDimensionError(f"unknown dimension prefix in {name!r}")
            source = sources[prefix]
        else:
            bare = name
        for d in self.dimension_specs:
            if d.name == bare and (source is None or d.source is source):
                return d
        if bare in RESOURCE_NAMES and source in (None, Source.RESOURCE):
            return DimensionSpec.resource(bare)
        raise UnknownDimensionError(
            f"unknown dimension {name!r}; known: {', '.join(d.qualified_name for d in self.dimension_specs)}"
        )

    def dims(self, names: Sequence[str] | None = None) -> tuple[DimensionSpec, ...]:
        if names is None:
            return self.dimension_specs
        return tuple(self.dimension(n) for n in names)

    def normalized(self, registry: UnitRegistry | None = None) -> Dataset:
        """Copy with every registered compute unit converted to the base unit."""
        registry = registry or self.registry

        def norm(vec: ResourceVector) -> ResourceVector:
            return ResourceVector({
                k: Quantity(registry.to_base(q.value, q.unit), registry.base_unit) if registry.knows(q.unit) else q
                for k, q in vec.items()
            })

        records = []
        for r in self.records:
            stages = None if r.stage_costs is None else {s: norm(v) for s, v in r.stage_costs.items()}
            records.append(replace(r, resources=norm(r.resources), stage_costs=stages))
        return replace(self, records=tuple(records))

    def without(self, ids: Iterable[str]) -> Dataset:
        drop = set(ids)
        return replace(self, records=tuple(r for r in self.records if r.id not in drop))


# --- JSON-lines ---------------------------------------------------------------

_RECORD_KEYS = (
    "id", "family", "approach_tags", "date", "performance", "performance_orientation",
    "resources", "stage_costs", "report_status", "provenance",
)


def _number(value: Any, row: int, fld: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", row=row, field=fld)
    if not math.isfinite(value):
        raise SchemaError(f"expected a finite number, got {value!r}", row=row, field=fld)
    return float(value)


def _mapping(value: Any, row: int, fld: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, got {value!r}", row=row, field=fld)
    return value


def _resource_vector(obj: Any, row: int, fld: str) -> ResourceVector:
    entries = {}
    for name, q in _mapping(obj, row, fld).items():
        try:
            kind = ResourceKind.parse(name)
        except SchemaError:
            raise UnknownDimensionError(f"unknown resource kind {name!r}", row=row, field=f"{fld}.{name}") from None
        if isinstance(q, dict):
            value, unit = q.get("value"), q.get("unit")
        else:
            raise SchemaError("expected {\"value\": x, \"unit\": u}", row=row, field=f"{fld}.{name}")
        value = _number(value, row, f"{fld}.{name}.value")
        if value < 0:
            raise SchemaError(f"negative value {value!r}", row=row, field=f"{fld}.{name}.value")
        if not isinstance(unit, str) or not unit:
            raise SchemaError("missing unit", row=row, field=f"{fld}.{name}.unit")
        entries[kind] = Quantity(value, unit)
    return ResourceVector(entries)


def record_from_dict(obj: Mapping[str, Any], row: int = 0) -> SystemRecord:
    """Build a record from its JSON object, reporting errors against ``row``."""
    if not isinstance(obj, dict):
        raise SchemaError("record must be a JSON object", row=row)
    rid = obj.get("id")
    if not isinstance(rid, str) or not rid:
        raise SchemaError("missing or empty id", row=row, field="id")
    tags = obj.get("approach_tags") or []
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise SchemaError("expected a list of strings", row=row, field="approach_tags")
    date = obj.get("date")
    if date is not None:
        try:
            date = dt.date.fromisoformat(date)
        except (TypeError, ValueError):
            raise SchemaError(f"not an ISO-8601 date: {date!r}", row=row, field="date") from None
    metrics = {
        m: _number(v, row, f"performance.{m}") for m, v in _mapping(obj.get("performance"), row, "performance").items()
    }
    orientation = _mapping(obj.get("performance_orientation"), row, "performance_orientation")
    for m, o in orientation.items():
        if o not in ("max", "min"):
            raise SchemaError(f"orientation must be 'max' or 'min', got {o!r}", row=row, field=f"performance_orientation.{m}")
    resources_ = _resource_vector(obj.get("resources"), row, "resources")
    stages_obj = obj.get("stage_costs")
    stage_costs = None
    if stages_obj is not None:
        stage_costs = {}
        for stage, vec in _mapping(stages_obj, row, "stage_costs").items():
            try:
                s = LifecycleStage(stage)
            except ValueError:
                raise SchemaError(f"unknown lifecycle stage {stage!r}", row=row, field=f"stage_costs.{stage}") from None
            stage_costs[s] = _resource_vector(vec, row, f"stage_costs.{stage}")
    status = {}
    for dim, s in _mapping(obj.get("report_status"), row, "report_status").items():
        try:
            status[dim] = ReportStatus(s)
        except ValueError:
            raise SchemaError(f"unknown report status {s!r}", row=row, field=f"report_status.{dim}") from None
    provenance = obj.get("provenance") or ""
    if not isinstance(provenance, str):
        raise SchemaError("expected a string", row=row, field="provenance")
    family = obj.get("family") or ""
    if not isinstance(family, str):
        raise SchemaError("expected a string", row=row, field="family")
    extra = {k: v for k, v in obj.items() if k not in _RECORD_KEYS}
    try:
        return SystemRecord(
            id=rid,
            family=family,
            approach_tags=frozenset(tags),
            date=date,
            performance=PerformanceVector(metrics, orientation),
            resources=resources_,
            stage_costs=stage_costs,
            report_status=status,
            provenance=provenance,
            extra=extra,
        )
    except SchemaError as exc:
        if exc.row is None:
            raise SchemaError(str(exc), row=row, field=exc.field) from None
        raise


def _vector_to_dict(vec: ResourceVector) -> dict:
    return {k.value: {"value": q.value, "unit": q.unit} for k, q in vec.items()}


def record_to_dict(r: SystemRecord) -> dict[str, Any]:
    out = {
        "id": r.id,
        "family": r.family,
        "approach_tags": sorted(r.approach_tags),
        "date": r.date.isoformat() if r.date else None,
        "performance": dict(r.performance.metrics),
        "performance_orientation": {m: o.value for m, o in r.performance.orientation.items()},
        "resources": _vector_to_dict(r.resources),
        "stage_costs": None if r.stage_costs is None else {s.value: _vector_to_dict(v) for s, v in r.stage_costs.items()},
        "report_status": {d: s.value for d, s in r.report_status.items()},
        "provenance": r.provenance,
    }
    for k, v in r.extra.items():
        out[k] = v
    return out


def _dims_to_json(dims: Sequence[DimensionSpec]) -> list[dict]:
    return [
        {"name": d.name, "source": d.source.value, "orientation": d.orientation.value,
         "combination_mode": d.combination_mode.value}
        for d in dims
    ]


def _infer_dims(records: Sequence[SystemRecord]) -> tuple[DimensionSpec, ...]:
    orientation: dict[str, Orientation] = {}
    for row, r in enumerate(records, 1):
        for m, o in r.performance.orientation.items():
            if orientation.setdefault(m, o) is not o:
                raise SchemaError(f"metric {m!r} declared with conflicting orientations", row=row,
                                  field=f"performance_orientation.{m}")
    kinds = {k for r in records for k in r.resources}
    dims = [DimensionSpec.metric(m, orientation=o) for m, o in sorted(orientation.items())]
    dims += [DimensionSpec.resource(k) for k in ResourceKind if k in kinds]
    return tuple(dims)


def _parse_meta(meta: Any) -> dict:
    if not isinstance(meta, dict):
        raise SchemaError("_dataset header must be an object", row=1)
    out: dict[str, Any] = {"name": meta.get("name", ""), "description": meta.get("description", "")}
    if "dimensions" in meta:
        dims = []
        for k, d in enumerate(meta["dimensions"]):
            try:
                dims.append(DimensionSpec(d["name"], Source(d.get("source", "performance")),
                                          d.get("orientation"), d.get("combination_mode")))
            except (KeyError, TypeError, ValueError) as exc:
                if isinstance(exc, SchemaError):
                    raise SchemaError(str(exc), row=1, field=f"_dataset.dimensions[{k}]") from None
                raise SchemaError(f"invalid dimension spec: {exc}", row=1, field=f"_dataset.dimensions[{k}]") from None
        out["dimension_specs"] = tuple(dims)
    receivers = []
    for k, p in enumerate(meta.get("receivers", [])):
        try:
            receivers.append(ReceiverProfile(p["name"], p["gradient"], p.get("normalization", "minmax")))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"invalid receiver: {exc}", row=1, field=f"_dataset.receivers[{k}]") from None
    out["receivers"] = tuple(receivers)
    out["unit_overrides"] = meta.get("unit_overrides", {}) or {}
    return out


def _build(records: list[SystemRecord], meta: dict, default_name: str) -> Dataset:
    seen: dict[str, int] = {}
    for row, r in records:
        if r.id in seen:
            raise SchemaError(f"duplicate id {r.id!r} (first on row {seen[r.id]})", row=row, field="id")
        seen[r.id] = row
    recs = [r for _, r in records]
    dims = meta.get("dimension_specs") or _infer_dims(recs)
    return Dataset(
        name=meta.get("name") or default_name,
        records=tuple(recs),
        dimension_specs=dims,
        receivers=meta.get("receivers", ()),
        unit_overrides=meta.get("unit_overrides", {}),
        description=meta.get("description", ""),
    )


def _text(stream: bytes | str | IO) -> str:
    if isinstance(stream, bytes):
        return stream.decode("utf-8")
    if isinstance(stream, str):
        return stream
    data = stream.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _load_jsonl(text: str, name: str) -> Dataset:
    records = []
    meta: dict = {}
    for row, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc.msg}", row=row) from None
        if isinstance(obj, dict) and "_dataset" in obj:
            if records or meta:
                raise SchemaError("_dataset header must be the first line", row=row)
            meta = _parse_meta(obj["_dataset"])
            continue
        records.append((row, record_from_dict(obj, row)))
    return _build(records, meta, name)


def _dump_jsonl(ds: Dataset) -> str:
    meta = {
        "name": ds.name,
        "description": ds.description,
        "dimensions": _dims_to_json(ds.dimension_specs),
        "receivers": [
            {"name": p.name, "gradient": dict(p.gradient), "normalization": p.normalization.value}
            for p in ds.receivers
        ],
        "unit_overrides": dict(ds.unit_overrides),
    }
    lines = [json.dumps({"_dataset": meta}, ensure_ascii=False)]
    lines += [json.dumps(record_to_dict(r), ensure_ascii=False) for r in ds.records]
    return "\n".join(lines) + "\n"


# --- CSV ----------------------------------------------------------------------

def _flatten(r: SystemRecord) -> dict[str, str]:
    row = {
        "id": r.id,
        "family": r.family,
        "approach_tags": ";".join(sorted(r.approach_tags)),
        "date": r.date.isoformat() if r.date else "",
        "provenance": r.provenance,
    }
    for m, v in r.performance.metrics.items():
        row[f"performance.{m}"] = repr(v)
    for m, o in r.performance.orientation.items():
        row[f"performance_orientation.{m}"] = o.value
    for k, q in r.resources.items():
        row[f"resources.{k.value}.value"] = repr(q.value)
        row[f"resources.{k.value}.unit"] = q.unit
    if r.stage_costs is not None:
        # stage names listed so that stages with no entries survive
        row["stage_costs"] = ";".join(s.value for s in r.stage_costs) or "none"
        for s, vec in r.stage_costs.items():
            for k, q in vec.items():
                row[f"stage_costs.{s.value}.{k.value}.value"] = repr(q.value)
                row[f"stage_costs.{s.value}.{k.value}.unit"] = q.unit
    for d, s in r.report_status.items():
        row[f"report_status.{d}"] = s.value
    for k, v in r.extra.items():
        row[f"extra.{k}"] = json.dumps(v, sort_keys=True)
    return row


_CSV_HEAD = ["id", "family", "approach_tags", "date", "provenance"]


def _dump_csv(ds: Dataset) -> str:
    rows = [_flatten(r) for r in ds.records]
    rest = sorted({c for row in rows for c in row} - set(_CSV_HEAD))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_CSV_HEAD + rest, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _csv_number(cell: str, row: int, fld: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise SchemaError(f"malformed number {cell!r}", row=row, field=fld) from None
    return _number(value, row, fld)


def _unflatten(cells: Mapping[str, str], row: int) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "id": cells.get("id", ""),
        "family": cells.get("family", ""),
        "approach_tags": [t for t in (cells.get("approach_tags") or "").split(";") if t],
        "date": cells.get("date") or None,
        "provenance": cells.get("provenance", ""),
        "performance": {}, "performance_orientation": {}, "resources": {}, "report_status": {},
    }
    if cells.get("stage_costs"):
        obj["stage_costs"] = {s: {} for s in cells["stage_costs"].split(";") if s != "none"}
    for col, cell in cells.items():
        if col is None:
            raise SchemaError("more cells than header columns", row=row)
        if cell in ("", None) or col in _CSV_HEAD or col == "stage_costs":
            continue
        head, _, rest = col.partition(".")
        if head == "performance":
            obj["performance"][rest] = _csv_number(cell, row, col)
        elif head == "performance_orientation":
            obj["performance_orientation"][rest] = cell
        elif head == "report_status":
            obj["report_status"][rest] = cell
        elif head == "resources":
            kind, _, part = rest.rpartition(".")
            slot = obj["resources"].setdefault(kind, {})
            slot[part] = _csv_number(cell, row, col) if part == "value" else cell
        elif head == "stage_costs":
            stage, _, tail = rest.partition(".")
            kind, _, part = tail.rpartition(".")
            slot = obj.setdefault("stage_costs", {}).setdefault(stage, {}).setdefault(kind, {})
            slot[part] = _csv_number(cell, row, col) if part == "value" else cell
        elif head == "extra":
            try:
                obj[rest] = json.loads(cell)
            except json.JSONDecodeError:
                raise SchemaError("malformed JSON in extra column", row=row, field=col) from None
        else:
            raise SchemaError(f"unknown column {col!r}", row=row, field=col)
    return obj


def _load_csv(text: str, name: str) -> Dataset:
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or "id" not in reader.fieldnames:
        raise SchemaError("CSV header row with an 'id' column is required", row=1)
    records = []
    for cells in reader:
        row = reader.line_num
        records.append((row, record_from_dict(_unflatten(cells, row), row)))
    return _build(records, {}, name)


def load_dataset(stream: bytes | str | IO, format: str = "jsonl", name: str = "dataset") -> Dataset:
    """Parse and validate a dataset. Errors name the offending row and field."""
    text = _text(stream)
    if format == "jsonl":
        return _load_jsonl(text, name)
    if format == "csv":
        return _load_csv(text, name)
    raise ValueError(f"unknown format {format!r}; expected 'jsonl' or 'csv'")


def save_dataset(dataset: Dataset, format: str = "jsonl") -> str:
    if format == "jsonl":
        return _dump_jsonl(dataset)
    if format == "csv":
        return _dump_csv(dataset)
    raise ValueError(f"unknown format {format!r}; expected 'jsonl' or 'csv'")


def read_dataset(path: str | Path, format: str | None = None) -> Dataset:
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    return load_dataset(path.read_bytes(), format, name=path.stem)


# --- coverage -----------------------------------------------------------------

@dataclass(frozen=True)
class CoverageReport:
    """Report status of every system on every canonical dimension."""

    columns: tuple[str, ...]
    rows: tuple[tuple[str, tuple[ReportStatus, ...]], ...]

    @property
    def counts(self) -> dict[ReportStatus, int]:
        c = Counter(s for _, cells in self.rows for s in cells)
        return {s: c.get(s, 0) for s in ReportStatus}

    def reported_share(self) -> dict[str, float]:
        n = len(self.rows)
        return {
            col: (sum(cells[k] is ReportStatus.REPORTED for _, cells in self.rows) / n if n else 0.0)
            for k, col in enumerate(self.columns)
        }

    def cell(self, record_id: str, column: str) -> ReportStatus:
        for rid, cells in self.rows:
            if rid == record_id:
                return cells[self.columns.index(column)]
        raise KeyError(record_id)


def coverage_report(dataset: Dataset) -> CoverageReport:
    """One row per system over the eight resource kinds plus the performance metrics.

    Explicit statuses win. Otherwise a reported value counts as Reported and
    anything else as missing-but-relevant.
    """
    metrics = [d.name for d in dataset.dimension_specs if d.source is Source.PERFORMANCE]
    extra = sorted({m for r in dataset.records for m in r.performance.metrics} - set(metrics))
    columns = tuple(RESOURCE_NAMES) + tuple(metrics) + tuple(extra)
    rows = []
    for r in dataset.records:
        cells = []
        for col in columns:
            status = r.report_status.get(col)
            if status is None:
                present = col in r.resources if col in RESOURCE_NAMES else col in r.performance.metrics
                status = ReportStatus.REPORTED if present else ReportStatus.MISSING_RELEVANT
            cells.append(status)
        rows.append((r.id, tuple(cells)))
    return CoverageReport(columns, tuple(rows))


# --- bundled datasets -----------------------------------------------------------

CASE_STUDIES = ("alpha-star", "ale", "schematic")


def load_case_study(name: str) -> Dataset:
    if name not in CASE_STUDIES:
        raise KeyError(f"unknown case study {name!r}; available: {', '.join(CASE_STUDIES)}")
    data = resources.files("costfront").joinpath("data", f"{name}.jsonl").read_bytes()
    return load_dataset(data, "jsonl", name=name)


def bundled_case_studies() -> list[Dataset]:
    return [load_case_study(n) for n in CASE_STUDIES]
