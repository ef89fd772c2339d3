from __future__ import annotations

import random

import pytest

from costfront import DimensionSpec, PerformanceVector, ResourceVector, SystemRecord, load_case_study
from costfront.core import MISSING, Orientation, Quantity, ResourceKind, Source

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_record(rid: str, dims, values, family: str = "", tags=()) -> SystemRecord:
    """Record with the given values on ``dims``; ``None`` leaves a dimension unreported."""
    metrics, orient, res = {}, {}, {}
    for d, v in zip(dims, values):
        if v is None or v is MISSING:
            if d.source is Source.PERFORMANCE:
                orient[d.name] = d.orientation.value
            continue
        if d.source is Source.PERFORMANCE:
            metrics[d.name] = v
            orient[d.name] = d.orientation.value
        else:
            res[ResourceKind(d.name)] = Quantity(v, "cpu")
    return SystemRecord(
        id=rid, family=family, approach_tags=frozenset(tags),
        performance=PerformanceVector(metrics, orient), resources=ResourceVector(res),
    )


def metric_dims(orientations, modes=None):
    modes = modes or ["convex"] * len(orientations)
    return tuple(
        DimensionSpec.metric(f"m{k}", orientation=o, combination_mode=m)
        for k, (o, m) in enumerate(zip(orientations, modes))
    )


def brute_force_front(points, dims):
    """All-pairs filter written directly from the definition of dominance."""

    def at_least_as_good(x, y, d):
        return x >= y if d.orientation is Orientation.MAXIMIZE else x <= y

    def strictly_better(x, y, d):
        return x > y if d.orientation is Orientation.MAXIMIZE else x < y

    observed = [i for i, p in enumerate(points) if all(v is not None for v in p)]
    front = set()
    for i in observed:
        dominated = False
        for j in observed:
            if i == j:
                continue
            a, b = points[j], points[i]
            if all(at_least_as_good(x, y, d) for x, y, d in zip(a, b, dims)) and any(
                strictly_better(x, y, d) for x, y, d in zip(a, b, dims)
            ):
                dominated = True
                break
        if not dominated:
            front.add(i)
    return front


def random_dataset(rng: random.Random, max_n: int = 64, max_d: int = 5, missing_rate: float = 0.05):
    n = rng.randint(1, max_n)
    d = rng.randint(1, max_d)
    dims = metric_dims([rng.choice(["max", "min"]) for _ in range(d)])
    grid = rng.choice([4, 10, 1000])
    points = []
    for _ in range(n):
        p = []
        for _ in range(d):
            if rng.random() < missing_rate:
                p.append(None)
            elif grid == 1000:
                p.append(rng.random())
            else:
                p.append(float(rng.randrange(grid)))
        points.append(tuple(p))
    records = [make_record(f"r{i:02d}", dims, p) for i, p in enumerate(points)]
    return dims, points, records


def grid_hypervolume(points, ref):
    """Exact area/volume for integer coordinates (minimization) by counting unit cells."""
    import itertools

    lows = [min(p[k] for p in points) for k in range(len(ref))]
    count = 0
    for cell in itertools.product(*(range(lo, r) for lo, r in zip(lows, ref))):
        centre = [c + 0.5 for c in cell]
        if any(all(pk <= ck for pk, ck in zip(p, centre)) for p in points):
            count += 1
    return count


@pytest.fixture(scope="session")
def schematic():
    return load_case_study("schematic")


@pytest.fixture(scope="session")
def alpha_star():
    return load_case_study("alpha-star").normalized()


@pytest.fixture(scope="session")
def ale():
    return load_case_study("ale").normalized()
