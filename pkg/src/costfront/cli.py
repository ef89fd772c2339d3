"""``costfront`` command line.

Exit codes: 0 success, 2 input schema error, 3 unknown dimension or unit,
4 invalid parameter.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import defaultdict
from pathlib import Path
from typing import Sequence

from . import ingest, lifecycle
from .core import (
    CombinationMode,
    ContractError,
    DimensionSpec,
    SchemaError,
    UnknownDimensionError,
    fully_observed,
    project_all,
)
from .ingest import Dataset, UnknownUnitError
from .pareto import ClassifierConfig, assess_progress, pareto_front
from .svg import PlotSpec, render_svg
from .utility import (
    EvaluationError,
    Normalization,
    ReceiverProfile,
    SelectionError,
    parse_gradient,
    select_optimal,
    utility_table,
)

EXIT_OK, EXIT_SCHEMA, EXIT_UNKNOWN, EXIT_PARAM = 0, 2, 3, 4


class ParameterError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args) -> Dataset:
    if args.case_study:
        ds = ingest.load_case_study(args.case_study)
    elif args.input:
        try:
            ds = ingest.read_dataset(args.input, args.format)
        except OSError as exc:
            raise SchemaError(f"cannot read {args.input}: {exc.strerror}") from None
    else:
        raise ParameterError("give --input PATH or --case-study NAME")
    return ds.normalized()


def _split(text: str | None) -> list[str] | None:
    return None if text is None else [t.strip() for t in text.split(",") if t.strip()]


def _dims_json(dims: Sequence[DimensionSpec]) -> list[dict]:
    return [
        {"name": d.name, "source": d.source.value, "orientation": d.orientation.value,
         "combination_mode": d.combination_mode.value}
        for d in dims
    ]


def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _gradient_path(ds: Dataset, dims) -> tuple[tuple[float, float], ...]:
    # Yearly centroid of dated systems, in date order.
    by_year = defaultdict(list)
    for r, p in zip(ds.records, project_all(ds.records, dims)):
        if r.date is not None and fully_observed(p):
            by_year[r.date.year].append(p)
    return tuple(
        (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))
        for _, pts in sorted(by_year.items())
    )


def cmd_front(args) -> int:
    ds = _load(args)
    if args.x or args.y:
        if not (args.x and args.y):
            raise ParameterError("--x and --y go together")
        dims = ds.dims([args.x, args.y])
    else:
        dims = ds.dims(_split(args.dims))
    if not dims:
        raise ParameterError("no dimensions to analyse")
    front = pareto_front(ds.records, dims, mode=args.mode)
    by_id = {r.id: r for r in ds.records}
    doc = {
        "dataset": ds.name,
        "dims": _dims_json(dims),
        "mode": front.mode.value if front.mode else None,
        "members": [
            {"id": m, "family": by_id[m].family, "point": list(p)} for m, p in zip(front.members, front.points)
        ],
        "incomparable": list(front.incomparable),
        "polyline": [list(p) for p in front.polyline] if front.polyline is not None else None,
    }
    _emit(_json(doc), args.output)
    if args.svg:
        if len(dims) != 2:
            raise ParameterError("--svg needs exactly two dimensions")
        pts = [(r.id, p[0], p[1]) for r, p in zip(ds.records, project_all(ds.records, dims)) if fully_observed(p)]
        spec = PlotSpec(
            x=dims[0].qualified_name, y=dims[1].qualified_name, log_x=args.log_x,
            front_mode=front.mode, annotate=args.annotate,
            gradient_arrows=_gradient_path(ds, dims) if args.gradient_path else None,
            title=ds.name,
        )
        Path(args.svg).write_text(render_svg(pts, spec, front), encoding="utf-8")
    return EXIT_OK


def cmd_select(args) -> int:
    ds = _load(args)
    profile = parse_gradient(args.gradient)
    if args.normalization != "minmax":
        profile = ReceiverProfile(profile.name, profile.gradient, Normalization(args.normalization))
    dims = ds.dims(_split(args.dims))
    # Resolve gradient names up front so unknown names exit 3 rather than 4.
    named = {d.name for d in dims}
    for name in profile.gradient:
        if name not in named:
            ds.dimension(name)
            raise UnknownDimensionError(f"gradient dimension {name!r} is not among the analysis dimensions")
    front = pareto_front(ds.records, dims)
    table = utility_table(profile, front, ds.records, dims)
    chosen = select_optimal(profile, front, ds.records, dims)
    lines = [f"selected\t{chosen}", "id\tutility"]
    lines += [f"{rid}\t{u!r}" for rid, u in table]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_classify(args) -> int:
    ds = _load(args)
    if args.candidate:
        try:
            cand = ingest.read_dataset(args.candidate, args.format)
        except OSError as exc:
            raise SchemaError(f"cannot read {args.candidate}: {exc.strerror}") from None
        candidates = list(cand.normalized(ds.registry).records)
    elif args.candidate_ids:
        try:
            candidates = [ds.record(i) for i in _split(args.candidate_ids)]
        except KeyError as exc:
            raise ParameterError(f"no record with id {exc.args[0]!r}") from None
    else:
        raise ParameterError("give --candidate PATH or --candidate-ids")
    dims = ds.dims(_split(args.dims))
    for c, p in zip(candidates, project_all(candidates, dims)):
        if not fully_observed(p):
            raise SchemaError(f"candidate {c.id!r} does not report every analysis dimension")
    config = ClassifierConfig(
        epsilon=args.epsilon, min_span=args.min_span,
        receivers=ds.receivers if args.use_receivers else (),
    )
    result = assess_progress(candidates, ds.records, dims, config)
    doc = {
        "class": result.progress_class.value,
        "candidates": [c.id for c in candidates],
        "epsilon": args.epsilon,
        "evidence": result.evidence,
    }
    _emit(_json(doc), args.output)
    return EXIT_OK


def _n_range(text: str) -> list[int]:
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            start, stop, step = parts[0], parts[1], parts[2] if len(parts) == 3 else 1
            if step <= 0:
                raise ParameterError("range step must be positive")
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse n-range {text!r}; use '1,10,100' or 'start:stop[:step]'") from None


def cmd_amortize(args) -> int:
    ns = _n_range(args.n_range)
    if not ns:
        raise ParameterError("empty n-range")
    curve = lifecycle.average_cost_curve(args.system_cost, args.app_cost, ns)
    lines = ["n,average"] + [f"{n},{float(avg)!r}" for n, avg in curve]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _json_arg(text: str, what: str):
    path = Path(text)
    try:
        raw = path.read_text(encoding="utf-8") if path.is_file() else text
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what}: malformed JSON ({exc.msg})") from None


def cmd_reproducibility(args) -> int:
    per_app = _json_arg(args.per_app, "--per-app")
    baseline = _json_arg(args.baseline, "--baseline")
    if not isinstance(per_app, list) or not all(isinstance(a, dict) for a in per_app):
        raise SchemaError("--per-app must be a JSON list of {resource: cost} objects")
    if not isinstance(baseline, dict):
        raise SchemaError("--baseline must be a JSON {resource: cost} object")
    check = lifecycle.check_specific_reproducibility(per_app, baseline, args.tolerance)
    rep = lifecycle.replicability_cost(per_app)
    doc = {
        "reproducible": check.reproducible,
        "residual": check.residual,
        "observed": check.observed,
        "expected": check.expected,
        "applications": len(per_app),
        "replicability": {"total": rep.total, "by_kind": {k.value: v for k, v in rep.by_kind.items()}},
    }
    _emit(_json(doc), args.output)
    return EXIT_OK


def cmd_report(args) -> int:
    ds = _load(args)
    rep = ingest.coverage_report(ds)
    share = rep.reported_share()
    header = ["id", *rep.columns]
    body = [[rid, *(s.glyph for s in cells)] for rid, cells in rep.rows]
    body.append(["reported%", *(f"{100 * share[c]:.0f}" for c in rep.columns)])
    widths = [max(len(row[k]) for row in [header, *body]) for k in range(len(header))]
    text = "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in [header, *body])
    legend = "legend: ✓ reported  ○ partial  × missing but relevant  − not applicable"
    sys.stdout.write(text + "\n" + legend + "\n")
    if args.output:
        lines = [",".join(header)]
        lines += [",".join([rid, *(s.value for s in cells)]) for rid, cells in rep.rows]
        lines.append(",".join(["reported_share", *(repr(share[c]) for c in rep.columns)]))
        Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_normalize(args) -> int:
    registry = ingest.DEFAULT_REGISTRY
    if args.value < 0:
        raise ParameterError("--value must be non-negative")
    value = registry.convert(args.value, args.unit, args.to)
    _emit(f"{value!r}\n", args.output)
    return EXIT_OK


def cmd_case_studies(args) -> int:
    if args.export:
        ds = ingest.load_case_study(args.export)
        _emit(ingest.save_dataset(ds, args.format or "jsonl"), args.output)
        return EXIT_OK
    lines = []
    for ds in ingest.bundled_case_studies():
        dims = ", ".join(d.qualified_name for d in ds.dimension_specs)
        lines.append(f"{ds.name}\t{len(ds.records)} systems\t{dims}\t{ds.description}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="dataset file (JSON-lines or CSV)")
    common.add_argument("--case-study", choices=ingest.CASE_STUDIES, help="use a bundled dataset")
    common.add_argument("--format", choices=("jsonl", "csv"), help="input format (default: from suffix)")
    common.add_argument("--output", metavar="PATH", help="write the main result here instead of stdout")
    common.add_argument("--svg", metavar="PATH", help="also write an SVG plot (front only)")
    common.add_argument("--seed", type=int, help="reserved; all commands are deterministic")

    parser = _Parser(prog="costfront", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("front", parents=[common], help="non-dominated systems and achievable frontier")
    p.add_argument("--x", help="x-axis (cost) dimension, e.g. resource:computation")
    p.add_argument("--y", help="y-axis (benefit) dimension, e.g. perf:score")
    p.add_argument("--dims", help="comma-separated dimensions (default: all dataset dimensions)")
    p.add_argument("--mode", choices=[m.value for m in CombinationMode], help="override the x-axis combination mode")
    p.add_argument("--log-x", action="store_true")
    p.add_argument("--annotate", action="store_true", help="label plotted points by id")
    p.add_argument("--gradient-path", action="store_true", help="overlay the yearly research trajectory")
    p.set_defaults(func=cmd_front)

    p = sub.add_parser("select", parents=[common], help="front member preferred by a receiver gradient")
    p.add_argument("--gradient", required=True, help='weights, e.g. "elo=2,computation=1"')
    p.add_argument("--dims", help="comma-separated analysis dimensions (default: all)")
    p.add_argument("--normalization", choices=[n.value for n in Normalization], default="minmax")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("classify", parents=[common], help="classify a new family as a progress event")
    p.add_argument("--candidate", metavar="PATH", help="file with the candidate family's records")
    p.add_argument("--candidate-ids", help="comma-separated ids from the dataset to treat as the candidate family")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--min-span", type=int, default=2)
    p.add_argument("--dims", help="comma-separated analysis dimensions (default: all)")
    p.add_argument("--use-receivers", action="store_true", help="require a dataset receiver to pick the candidate")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("amortize", parents=[common], help="average cost per application as n grows")
    p.add_argument("--system-cost", type=float, required=True)
    p.add_argument("--app-cost", type=float, required=True)
    p.add_argument("--n-range", required=True, help="'1,10,100' or 'start:stop[:step]'")
    p.set_defaults(func=cmd_amortize)

    p = sub.add_parser("reproducibility", parents=[common], help="check n applications cost n times the baseline")
    p.add_argument("--per-app", required=True, help="JSON list of {resource: cost} (inline or file)")
    p.add_argument("--baseline", required=True, help="JSON {resource: cost} (inline or file)")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_reproducibility)

    p = sub.add_parser("report", parents=[common], help="which dimensions each system reports")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("normalize", parents=[common], help="convert compute between device units")
    p.add_argument("--value", type=float, required=True)
    p.add_argument("--unit", required=True)
    p.add_argument("--to", default=ingest.DEFAULT_REGISTRY.base_unit)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("case-studies", parents=[common], help="list or export the bundled datasets")
    p.add_argument("--export", choices=ingest.CASE_STUDIES)
    p.set_defaults(func=cmd_case_studies)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UnknownDimensionError, UnknownUnitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (ParameterError, ContractError, SelectionError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
