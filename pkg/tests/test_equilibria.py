import math
from fractions import Fraction

import pytest

from bottleneck_arena.engine.dynamics import is_nash, run_brd
from bottleneck_arena.engine.equilibria import bound_value, enumerate_nash, measure_poa
from bottleneck_arena.engine.game_model import first_strategies, player_cost, social_cost
from bottleneck_arena.engine.generators import gen_linear_counterexample, gen_parallel_links
from bottleneck_arena.models import CostModel, Schedule


class TestEnumeration:
    def test_counterexample_k4(self, cx4_exp):
        found = enumerate_nash(cx4_exp)
        assert len(found.routings) == 48
        assert not found.truncated
        assert found.profile_space == found.profiles_scanned == 256
        assert all(is_nash(cx4_exp, r)[0] for r in found.routings)

    def test_all_on_e_excluded_under_expsum(self, cx4_exp):
        assert first_strategies(cx4_exp) not in enumerate_nash(cx4_exp).routings

    def test_truncated_prefix(self, cx4_exp):
        found = enumerate_nash(cx4_exp, profile_cap=10)
        assert found.truncated
        assert found.profiles_scanned == 10
        assert found.profile_space == 256
        assert len(found.routings) == 8

    def test_balanced_parallel_links(self):
        found = enumerate_nash(gen_parallel_links(4, 2, CostModel.expsum()))
        assert len(found.routings) == 6

    def test_worker_pool_gives_same_order(self, cx4_exp):
        assert enumerate_nash(cx4_exp, workers=2) == enumerate_nash(cx4_exp)

    @pytest.mark.parametrize("schedule", list(Schedule))
    def test_dynamics_end_points_are_enumerated(self, schedule):
        for inst in (
            gen_linear_counterexample(4, CostModel.expsum()),
            gen_linear_counterexample(5, CostModel.expsum()),
            gen_parallel_links(4, 3, CostModel.expsum()),
        ):
            trace = run_brd(inst, first_strategies(inst), schedule=schedule, seed=5)
            assert trace.final in enumerate_nash(inst).routings


class TestPriceOfAnarchy:
    def test_counterexample_k4_expsum(self, cx4_exp):
        report = measure_poa(cx4_exp)
        assert report.c_star == 1
        assert report.worst_nash_cost == 3
        assert report.best_nash_cost == 2
        assert report.poa == Fraction(3)
        assert report.pos == Fraction(2)
        assert report.max_path_length == 4
        assert report.edge_count == 13
        assert report.bound_value == pytest.approx(3 * math.log2(26))
        assert report.bound_ratio == pytest.approx(3 / (3 * math.log2(26)))

    @pytest.mark.parametrize("k, worst", [(3, 2), (5, 3), (6, 3)])
    def test_expsum_stays_logarithmic(self, k, worst):
        report = measure_poa(gen_linear_counterexample(k, CostModel.expsum()))
        assert report.worst_nash_cost == worst
        assert report.poa <= math.floor(math.log2(2 * k))

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_linear_grows_with_k(self, k):
        report = measure_poa(gen_linear_counterexample(k, CostModel.linear()))
        assert report.poa == Fraction(k)

    @pytest.mark.slow
    def test_linear_k6(self):
        assert measure_poa(gen_linear_counterexample(6, CostModel.linear())).poa == Fraction(6)

    def test_single_link_is_trivial(self):
        report = measure_poa(gen_parallel_links(1, 3, CostModel.expsum()))
        assert report.poa == report.pos == Fraction(1)

    def test_parallel_links_optimum(self):
        report = measure_poa(gen_parallel_links(5, 2, CostModel.expsum()))
        assert report.c_star == 3
        assert report.worst_nash_cost == 3

    def test_worst_routing_reaches_worst_cost(self, cx4_exp):
        report = measure_poa(cx4_exp)
        assert max(social_cost(cx4_exp, r) for r in report.nash_routings) == report.worst_nash_cost

    def test_ratios_serialize_as_text(self, cx4_exp):
        dumped = measure_poa(cx4_exp).model_dump(mode="json", exclude={"nash_routings"})
        assert dumped["poa"] == "3"
        assert dumped["pos"] == "2"


@pytest.mark.parametrize("length, edges", [(1, 1), (4, 13), (10, 100)])
def test_bound_value_positive(length, edges):
    assert bound_value(length, edges) == pytest.approx(math.log2(2 * length) * math.log2(2 * edges))
    assert bound_value(length, edges) > 0


@pytest.mark.parametrize("k", [3, 4, 5])
def test_nash_cost_band(k):
    """2^C <= max player cost <= L * 2^C on every Nash routing."""
    inst = gen_linear_counterexample(k, CostModel.expsum())
    for routing in enumerate_nash(inst).routings:
        top = social_cost(inst, routing)
        highest = max(player_cost(inst, routing, i).value for i in range(inst.player_count))
        assert 2**top <= highest <= inst.max_path_length * 2**top
