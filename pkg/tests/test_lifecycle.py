import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from costfront import (
    ContractError,
    LifecycleAccount,
    ResourceVector,
    SystemRecord,
    average_cost_curve,
    check_specific_reproducibility,
    replicability_cost,
    stage_rollup,
    total_cost,
)
from costfront.core import LifecycleStage, ResourceKind, UnitMismatchError
from costfront.ingest import DEFAULT_REGISTRY

costs = st.integers(0, 10**6)


class TestTotalCost:
    def test_system_plus_apps(self):
        assert total_cost(LifecycleAccount(1000, [10] * 5)) == 1050

    def test_no_apps(self):
        assert total_cost(LifecycleAccount(1000)) == 1000

    def test_no_system_cost(self):
        assert total_cost(LifecycleAccount(0, [3, 4, 5])) == 12

    def test_rejects_negative(self):
        with pytest.raises(ContractError):
            LifecycleAccount(-1)
        with pytest.raises(ContractError):
            LifecycleAccount(1, [2, -3])

    def test_per_resource_maps_must_sum_to_totals(self):
        LifecycleAccount(0, [7], [{"computation": 5, "data": 2}])
        with pytest.raises(ContractError):
            LifecycleAccount(0, [7], [{"computation": 5}])

    @given(costs, st.lists(costs, min_size=1, max_size=8))
    def test_matches_replicability_view(self, system, apps):
        account = LifecycleAccount(system, apps)
        rep = replicability_cost([{"computation": c} for c in apps])
        assert total_cost(account) == system + rep.total


class TestAverageCost:
    def test_examples(self):
        curve = dict(average_cost_curve(1000, 10, [1, 10, 100, 1000]))
        assert curve == {1: 1010, 10: 110, 100: 20, 1000: 11}

    def test_no_system_cost_is_flat(self):
        assert {a for _, a in average_cost_curve(0, 10, range(1, 50))} == {10}

    @pytest.mark.parametrize("n", [0, -1, 2.5, True])
    def test_rejects_bad_n(self, n):
        with pytest.raises(ContractError):
            average_cost_curve(1, 1, [n])

    @given(st.integers(1, 10**6), costs, st.lists(st.integers(1, 10**5), min_size=1, max_size=20))
    def test_excess_is_exactly_system_over_n(self, system, app, ns):
        for n, avg in average_cost_curve(system, app, ns):
            assert avg - app == Fraction(system, n)

    @given(st.integers(1, 10**6), costs)
    def test_strictly_decreasing(self, system, app):
        avgs = [a for _, a in average_cost_curve(system, app, range(1, 200))]
        assert all(x > y for x, y in zip(avgs, avgs[1:]))


BASE = {"computation": 5, "data": 2}


class TestReproducibility:
    def test_identical_apps(self):
        check = check_specific_reproducibility([BASE] * 3, BASE)
        assert check.reproducible and check.residual == 0

    def test_one_app_doubled(self):
        apps = [BASE, {k: 2 * v for k, v in BASE.items()}, BASE]
        check = check_specific_reproducibility(apps, BASE)
        assert not check.reproducible
        assert check.residual == 7

    def test_shifting_cost_between_kinds(self):
        # totals: 7 + 7 + 7 = 21 on both sides
        apps = [{"computation": 7}, {"data": 7}, {"computation": 3, "data": 4}]
        assert check_specific_reproducibility(apps, BASE).reproducible

    def test_empty_baseline(self):
        with pytest.raises(ContractError):
            check_specific_reproducibility([BASE], {})

    def test_tolerance_is_relative(self):
        apps = [{"computation": 1e9}, {"computation": 1e9 + 1}]
        assert check_specific_reproducibility(apps, {"computation": 1e9}).reproducible
        assert not check_specific_reproducibility(apps, {"computation": 1e9}, tolerance=0).reproducible

    def test_permutation_invariant(self):
        rng = random.Random(3)
        for _ in range(200):
            apps = [{k: rng.randrange(10) for k in ("computation", "data")} for _ in range(rng.randint(1, 6))]
            base = {"computation": rng.randrange(10), "data": rng.randrange(1, 10)}
            shuffled = apps[:]
            rng.shuffle(shuffled)
            a = check_specific_reproducibility(apps, base)
            b = check_specific_reproducibility(shuffled, base)
            assert (a.reproducible, a.residual) == (b.reproducible, b.residual)


class TestReplicability:
    def test_breakdown(self):
        rep = replicability_cost([{"computation": 5}, {"computation": 7, "data": 1}])
        assert rep.total == 13
        assert rep.by_kind == {ResourceKind.COMPUTATION: 12, ResourceKind.DATA: 1}

    def test_single_and_zero(self):
        assert replicability_cost([{"software": 4, "time": 1}]).total == 5
        assert replicability_cost([{"computation": 0}] * 4).total == 0

    def test_negative_rejected(self):
        with pytest.raises(ContractError):
            replicability_cost([{"computation": -1}])


def _staged(**stages):
    return SystemRecord(
        id="s",
        stage_costs={
            LifecycleStage(name): ResourceVector.of(computation=q) for name, q in stages.items()
        },
    )


class TestStageRollup:
    def test_partition(self):
        r = _staged(conceive=(10, "cpu"), produce=(20, "cpu"), reproduce=(1, "cpu"))
        roll = stage_rollup(r, DEFAULT_REGISTRY)
        assert (roll.system_cost, roll.app_cost) == (30, 1)

    def test_only_replicate(self):
        roll = stage_rollup(_staged(replicate=(4, "cpu")), DEFAULT_REGISTRY)
        assert (roll.system_cost, roll.app_cost) == (0, 4)

    def test_mixed_units_normalized(self):
        roll = stage_rollup(_staged(conceive=(1, "tpu-v2"), produce=(180, "cpu")), DEFAULT_REGISTRY)
        assert roll.system_cost == 360

    def test_mixed_units_without_registry(self):
        with pytest.raises(UnitMismatchError):
            stage_rollup(_staged(conceive=(1, "tpu-v2"), produce=(180, "cpu")))

    def test_undifferentiated(self):
        assert stage_rollup(SystemRecord(id="x")) is None

    def test_partition_reproduces_totals(self):
        rng = random.Random(5)
        for _ in range(100):
            amounts = {s.value: rng.randrange(100) for s in LifecycleStage}
            roll = stage_rollup(_staged(**{k: (v, "cpu") for k, v in amounts.items()}), DEFAULT_REGISTRY)
            assert roll.system_cost + roll.app_cost == sum(amounts.values())
