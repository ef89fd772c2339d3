"""Acceptance criteria 1-11, each run at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed as they happen
and again in a summary section at the end of the pytest run.
"""

import math
import random
import subprocess
import sys
import time
from fractions import Fraction

from costfront import (
    ClassifierConfig,
    ProgressClass,
    ReceiverProfile,
    achievable_frontier,
    average_cost_curve,
    check_specific_reproducibility,
    classify_progress,
    dominates,
    mix,
    pareto_front,
    project,
    select_optimal,
)
from costfront.core import ResourceKind
from costfront.ingest import DEFAULT_REGISTRY

from conftest import ACCEPTANCE_LINES, brute_force_front, make_record, metric_dims, random_dataset


def verdict(number: int, title: str, failures: list[str], detail: str = "") -> None:
    status = "PASS" if not failures else "FAIL"
    note = detail if not failures else f"{len(failures)} failure(s), first: {failures[0]}"
    line = f"[{status}] criterion {number:>2}: {title}" + (f" ({note})" if note else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failures, line


def test_01_oracle_equivalence():
    rng = random.Random(20240101)
    failures, elapsed = [], 0.0
    for trial in range(1000):
        dims, points, records = random_dataset(rng, max_n=64, max_d=5)
        t0 = time.perf_counter()
        front = pareto_front(records, dims)
        elapsed += time.perf_counter() - t0
        expected = {records[i].id for i in brute_force_front(points, dims)}
        if set(front.members) != expected:
            failures.append(f"trial {trial}: {sorted(set(front.members) ^ expected)}")
    if elapsed >= 10:
        failures.append(f"runtime {elapsed:.2f}s >= 10s")
    verdict(1, "pareto_front equals brute-force filter on 1000 random datasets", failures,
            f"front time {elapsed:.2f}s")


def test_02_alpha_star_front(alpha_star):
    front = pareto_front(alpha_star.records, alpha_star.dims(["elo", "computation", "manipulation"]))
    members = set(front.members)
    expected = {"alphago-lee", "alphago-zero-20b", "alphago-zero-40b"}
    failures = []
    if members != expected:
        failures.append(f"front {sorted(members)} != {sorted(expected)}")
    if "alphago-fan" in members:
        failures.append("AlphaGo Fan on the front")
    verdict(2, "Alpha* front is Lee + AlphaGo Zero, Fan excluded", failures, ", ".join(sorted(members)))


def test_03_ale_front(ale):
    front = pareto_front(ale.records, ale.dims(["computation", "score"]))
    expected = {"best-linear", "es-ff", "reactor", "reactor-nd", "reactor-500m"}
    failures = [] if set(front.members) == expected else [f"front {sorted(front.members)}"]
    verdict(3, "ALE front is REACTOR variants, ES FF, Best Linear", failures, ", ".join(sorted(front.members)))


def test_04_mixture_semantics():
    rng = random.Random(4)
    dims = metric_dims(["min", "max", "min", "max"], ["additive", "convex", "convex", "additive"])
    failures = []
    for k in range(10_000):
        exact = k % 2 == 0
        if exact:
            a = tuple(Fraction(rng.randrange(10**6), rng.randrange(1, 1000)) for _ in dims)
            b = tuple(Fraction(rng.randrange(10**6), rng.randrange(1, 1000)) for _ in dims)
            lam = Fraction(rng.randrange(1, 10**6), 10**6)
        else:
            a = tuple(rng.uniform(0, 10 ** rng.randint(0, 12)) for _ in dims)
            b = tuple(rng.uniform(0, 10 ** rng.randint(0, 12)) for _ in dims)
            lam = rng.random() or 0.5
        got = mix(a, b, lam, dims)
        for x, y, g, d in zip(a, b, got, dims):
            if d.combination_mode.value == "additive":
                want = Fraction(x) + Fraction(y)
            else:
                want = Fraction(lam) * Fraction(x) + (1 - Fraction(lam)) * Fraction(y)
            if exact:
                if not (isinstance(g, Fraction) and g == want):
                    failures.append(f"pair {k} {d.name}: {g!r} != {want}")
            elif abs(Fraction(g) - want) > Fraction(math.ulp(float(want))):
                failures.append(f"pair {k} {d.name}: {g!r} vs {float(want)!r}")
    verdict(4, "mixture: additive sums and convex interpolation, 10^4 pairs", failures,
            "exact for rationals, <= 1 ulp for floats")


def _cross(o, a, b):
    o, a, b = ([Fraction(v) for v in p] for p in (o, a, b))
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def test_05_frontier_geometry(schematic):
    rng = random.Random(5)
    failures = []
    for trial in range(500):
        orient = [rng.choice(["min", "max"]), rng.choice(["min", "max"])]
        dims = metric_dims(orient)
        pts = [(rng.randrange(50), rng.randrange(50)) for _ in range(rng.randint(1, 20))]
        records = [make_record(f"p{i}", dims, p) for i, p in enumerate(pts)]
        stairs = achievable_frontier(records, dims[0], dims[1], mode="additive")
        if not all(p[0] == q[0] or p[1] == q[1] for p, q in zip(stairs, stairs[1:])):
            failures.append(f"trial {trial}: staircase has a diagonal segment")
        hull = achievable_frontier(records, dims[0], dims[1], mode="convex")
        # concave in (cost, benefit) space: every turn is clockwise
        sx = 1 if orient[0] == "min" else -1
        sy = 1 if orient[1] == "max" else -1
        cb = [(sx * x, sy * y) for x, y in hull]
        if any(_cross(o, a, b) >= 0 for o, a, b in zip(cb, cb[1:], cb[2:])):
            failures.append(f"trial {trial}: hull not strictly concave")
    dims = schematic.dims()
    hull = set(achievable_frontier(schematic.records, dims[0], dims[1], mode="convex"))
    on_hull = [r.id for r in schematic.records if project(r, dims) in hull and r.family in ("B", "C")]
    if on_hull:
        failures.append(f"B/C vertices on the schematic hull: {on_hull}")
    verdict(5, "additive frontier axis-parallel, convex frontier concave, hull drops B and C", failures)


def test_06_progress_classes(schematic):
    dims = schematic.dims()
    config = ClassifierConfig()
    failures = []
    if config.epsilon != 0.05:
        failures.append(f"default epsilon {config.epsilon}")
    cases = [(["A1"], ProgressClass.FRONT_IMPROVEMENT), (["A3"], ProgressClass.FRONT_IMPROVEMENT),
             (["D3"], ProgressClass.FRONT_IMPROVEMENT), (["B1", "B2", "B3"], ProgressClass.FLEXIBILITY),
             (["C1", "C2"], ProgressClass.DIVERSITY)]
    for ids, want in cases:
        got = classify_progress([schematic.record(i) for i in ids], schematic.records, dims, config)
        if got is not want:
            failures.append(f"{ids}: {got.value} != {want.value}")
    verdict(6, "schematic: A1/A3/D3 front-improvement, B flexibility, C diversity", failures)


def test_07_unit_registry():
    r = DEFAULT_REGISTRY
    failures = []
    if not (r.to_base(1, "tpu-v2") == r.to_base(3, "tpu-v1") == r.to_base(36, "gpu") == r.to_base(180, "cpu") == 180):
        failures.append("equivalence chain broken")
    units = ["cpu", "gpu", "tpu-v1", "tpu-v2"]
    rng = random.Random(7)
    for _ in range(10_000):
        v = rng.uniform(0, 10 ** rng.randint(0, 15))
        a, b, c = (rng.choice(units) for _ in range(3))
        direct = r.convert(v, a, c)
        chained = r.convert(r.convert(v, a, b), b, c)
        if abs(direct - chained) > math.ulp(direct):
            failures.append(f"{v!r} {a}->{b}->{c}: {chained!r} vs {direct!r}")
    verdict(7, "1 tpu-v2 = 3 tpu-v1 = 36 gpu = 180 cpu, chained conversions <= 1 ulp", failures)


def test_08_amortization():
    ns = [1, 10, 100, 1000] + list(range(2, 5000, 7))
    curve = dict(average_cost_curve(1000, 10, ns))
    failures = []
    for n, want in [(1, 1010), (10, 110), (100, 20), (1000, 11)]:
        if curve[n] != want:
            failures.append(f"n={n}: {curve[n]} != {want}")
    ordered = [curve[n] for n in sorted(curve)]
    if not all(x > y for x, y in zip(ordered, ordered[1:])):
        failures.append("not strictly decreasing")
    failures += [f"n={n}: |avg - 10| > 1000/n" for n, a in curve.items() if abs(a - 10) > Fraction(1000, n)]
    verdict(8, "amortization 1010/110/20/11, decreasing, |avg-10| <= 1000/n", failures)


def test_09_reproducibility():
    rng = random.Random(9)
    kinds = [k.value for k in ResourceKind]
    failures = []
    for trial in range(500):
        base = {k: rng.randrange(1, 100) for k in rng.sample(kinds, rng.randint(1, 8))}
        n = rng.randint(1, 20)
        ok = check_specific_reproducibility([dict(base)] * n, base)
        if not ok.reproducible or ok.residual != 0:
            failures.append(f"trial {trial}: identical apps gave residual {ok.residual}")
        apps = [dict(base) for _ in range(n)]
        j, kind = rng.randrange(n), rng.choice(kinds)
        delta = rng.choice([-1, 1]) * rng.randrange(1, 50)
        if apps[j].get(kind, 0) + delta < 0:
            delta = -delta
        apps[j][kind] = apps[j].get(kind, 0) + delta
        bad = check_specific_reproducibility(apps, base)
        if bad.reproducible or bad.residual != delta:
            failures.append(f"trial {trial}: perturbation {delta} gave residual {bad.residual}")
    verdict(9, "identical applications give residual 0, one perturbation its exact size", failures)


def test_10_selection_properties():
    rng = random.Random(10)
    failures, trials = [], 0
    while trials < 1000:
        dims, points, records = random_dataset(rng, max_n=30, max_d=4)
        front = pareto_front(records, dims)
        if not front.members:
            continue
        trials += 1
        gradient = {d.name: rng.choice([0.0, rng.uniform(0.01, 10)]) for d in dims}
        if not any(gradient.values()):
            gradient[dims[0].name] = 1.0
        profile = ReceiverProfile("r", gradient)
        chosen = select_optimal(profile, front, records, dims)
        k = rng.choice([1e-6, 0.37, 2.0, 1e6])
        if select_optimal(profile.scaled(k), front, records, dims) != chosen:
            failures.append(f"trial {trials}: scaling by {k} changed the choice")
        cp = points[[r.id for r in records].index(chosen)]
        if any(dominates(p, cp, dims) for p in points if None not in p):
            failures.append(f"trial {trials}: {chosen} is dominated")
    verdict(10, "selection invariant to gradient scaling, never dominated (1000 trials)", failures)


def _cli(*argv, cwd):
    proc = subprocess.run([sys.executable, "-m", "costfront", *argv], capture_output=True, cwd=cwd)
    return proc.returncode, proc.stdout, proc.stderr


def test_11_determinism(tmp_path):
    base = {"computation": 5, "data": 2}
    per_app = '[{"computation": 5, "data": 2}, {"computation": 7}]'
    commands = [
        ["front", "--case-study", "alpha-star", "--x", "resource:computation", "--y", "perf:elo",
         "--mode", "additive", "--annotate", "--gradient-path", "--svg", "out.svg", "--output", "out.json"],
        ["front", "--case-study", "ale", "--x", "resource:computation", "--y", "perf:score", "--log-x", "--svg", "out.svg"],
        ["front", "--case-study", "schematic", "--svg", "out.svg"],
        ["select", "--case-study", "alpha-star", "--gradient", "elo=2,computation=1"],
        ["select", "--case-study", "schematic", "--gradient", "performance=1,computation=1"],
        ["select", "--case-study", "ale", "--gradient", "score=1,computation=1"],
        ["classify", "--case-study", "schematic", "--candidate-ids", "B1,B2,B3"],
        ["classify", "--case-study", "alpha-star", "--candidate-ids", "alphazero", "--use-receivers"],
        ["classify", "--case-study", "ale", "--candidate-ids", "reactor"],
        ["amortize", "--system-cost", "1000", "--app-cost", "10", "--n-range", "1:200:3"],
        ["reproducibility", "--per-app", per_app, "--baseline", str(base).replace("'", '"')],
        ["report", "--case-study", "ale", "--output", "out.csv"],
        ["report", "--case-study", "alpha-star"],
        ["normalize", "--value", "3", "--unit", "tpu-v1", "--to", "gpu"],
        ["case-studies"],
        ["case-studies", "--export", "ale", "--format", "csv"],
    ]
    failures = []
    for argv in commands:
        runs = []
        for attempt in range(2):
            work = tmp_path / f"{argv[0]}-{len(runs)}-{commands.index(argv)}"
            work.mkdir()
            code, out, err = _cli(*argv, cwd=work)
            files = {p.name: p.read_bytes() for p in sorted(work.iterdir())}
            runs.append((code, out, err, files))
        if runs[0][0] != 0:
            failures.append(f"{' '.join(argv[:3])}: exit {runs[0][0]}: {runs[0][2].decode()[:200]}")
        elif runs[0] != runs[1]:
            failures.append(f"{' '.join(argv[:3])}: outputs differ between runs")
    verdict(11, f"byte-identical output across two runs of {len(commands)} CLI invocations", failures)
