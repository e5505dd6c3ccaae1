import pytest

from bottleneck_arena.engine.chains import (
    band_stage,
    build_expansion_chain,
    classify_stages,
    cost_level,
    early_stage_check,
    find_support_set,
    is_self_sufficient,
)
from bottleneck_arena.engine.dynamics import run_brd
from bottleneck_arena.engine.equilibria import enumerate_nash
from bottleneck_arena.engine.game_model import exp_cost, first_strategies, raw_congestion
from bottleneck_arena.engine.generators import gen_parallel_links
from bottleneck_arena.engine.optimal_solver import min_bottleneck_routing
from bottleneck_arena.errors import NoSupportSetError, PreconditionError, SearchBudgetExceededError
from bottleneck_arena.models import CostModel, Graph, Instance, Path, Player, PlayerType, SupportMode
from bottleneck_arena.models.game import ExplicitPaths

# three players on e, the fourth on the first long path
NASH_A = (0, 0, 0, 1)
# two players on long paths, two on e
NASH_B = (1, 2, 0, 0)
# two players on e, two on long paths: costs 4 and 8 sit in different bands
NASH_SPLIT = (0, 0, 1, 2)


@pytest.fixture
def opt(cx4_exp):
    return min_bottleneck_routing(cx4_exp).witness


@pytest.mark.parametrize("value, level", [(8, 3), (9, 4), (2, 1), (1, 0), (0, 0)])
def test_cost_level(value, level):
    assert cost_level(value) == level


@pytest.mark.parametrize(
    "cost, c_hat, expected",
    [
        (8, 3, (1, False)),
        (5, 3, (1, True)),
        (4, 3, (2, False)),
        (3, 3, (3, True)),
        (2, 3, (0, False)),
        (9, 4, (1, True)),
        (5, 4, (3, True)),
    ],
)
def test_band_stage(cost, c_hat, expected):
    assert band_stage(cost, c_hat) == expected


class TestSelfSufficiency:
    def test_lone_player_leaves(self, cx4_exp, build_profile, opt):
        assert is_self_sufficient(cx4_exp, build_profile(cx4_exp, NASH_A), opt, [0]) == (False, [0])

    def test_every_player_stays(self, cx4_exp, build_profile, opt):
        assert is_self_sufficient(cx4_exp, build_profile(cx4_exp, NASH_A), opt, range(4)) == (True, [])

    def test_empty_set(self, cx4_exp, build_profile, opt):
        with pytest.raises(PreconditionError):
            is_self_sufficient(cx4_exp, build_profile(cx4_exp, NASH_A), opt, [])

    def test_unknown_player(self, cx4_exp, build_profile, opt):
        with pytest.raises(PreconditionError):
            is_self_sufficient(cx4_exp, build_profile(cx4_exp, NASH_A), opt, [7])

    def test_nash_equal_to_opt(self):
        inst = gen_parallel_links(1, 1, CostModel.expsum())
        routing = first_strategies(inst)
        assert is_self_sufficient(inst, routing, routing, [0])[0]


class TestSupportSets:
    @pytest.mark.parametrize("mode", list(SupportMode))
    def test_players_sharing_e(self, cx4_exp, build_profile, opt, mode):
        assert find_support_set(cx4_exp, build_profile(cx4_exp, NASH_A), opt, [0], mode) == (1, 2)

    def test_already_self_sufficient(self, cx4_exp, build_profile, opt):
        with pytest.raises(PreconditionError):
            find_support_set(cx4_exp, build_profile(cx4_exp, NASH_A), opt, range(4))

    @pytest.mark.parametrize("mode", list(SupportMode))
    def test_nobody_can_help(self, parallel_2x2, build_profile, mode):
        nash = build_profile(parallel_2x2, (0, 0))
        opt = build_profile(parallel_2x2, (1, 0))
        with pytest.raises(NoSupportSetError):
            find_support_set(parallel_2x2, nash, opt, [0], mode)


class TestExpansionChain:
    def test_two_stage_chain(self, cx4_exp, build_profile, opt):
        chain = build_expansion_chain(cx4_exp, build_profile(cx4_exp, NASH_B), opt, [0])
        assert chain.root == (0,)
        assert chain.expansions == ((2, 3),)
        assert chain.depth == 2
        first, second = chain.stages
        assert (first.band_stage, first.players, first.cost_low, first.cost_high) == (1, (0,), 8, 8)
        assert first.support_edges_used == ()
        assert (second.band_stage, second.players, second.cost_low, second.cost_high) == (2, (2, 3), 4, 4)
        assert second.support_edges_used == (0,)
        assert chain.self_sufficient_at == 2
        assert chain.dropped == ()
        assert chain.c_hat == 3
        assert chain.l_star == 2

    def test_self_sufficient_root(self, cx4_exp, build_profile, opt):
        chain = build_expansion_chain(cx4_exp, build_profile(cx4_exp, NASH_A), opt, range(4))
        assert chain.expansions == ()
        assert chain.depth == 1
        assert chain.self_sufficient_at == 1
        assert chain.players == (0, 1, 2, 3)

    def test_full_root_spanning_two_bands(self, cx4_exp, build_profile, opt):
        chain = build_expansion_chain(cx4_exp, build_profile(cx4_exp, NASH_SPLIT), opt, range(4))
        (only,) = chain.stages
        assert chain.root == only.players == (0, 1, 2, 3)
        assert (only.band_stage, only.cost_low, only.cost_high) == (1, 4, 8)
        assert chain.dropped == ()
        assert chain.expansions == ()
        assert chain.self_sufficient_at == 1

    def test_root_is_kept_whole(self, cx4_exp, build_profile, opt):
        chain = build_expansion_chain(cx4_exp, build_profile(cx4_exp, NASH_SPLIT), opt, [0, 2])
        assert chain.expansions == ((1,),)
        root, support = chain.stages
        assert (root.players, root.band_stage, root.cost_low, root.cost_high) == ((0, 2), 1, 4, 8)
        assert root.support_edges_used == (1, 2, 3, 4)
        assert (support.players, support.band_stage, support.cost_low, support.cost_high) == ((1,), 2, 4, 4)
        assert support.support_edges_used == (0,)
        assert chain.self_sufficient_at == 2
        assert chain.dropped == ()

    def test_exact_support_mode(self, cx4_exp, build_profile, opt):
        chain = build_expansion_chain(cx4_exp, build_profile(cx4_exp, NASH_A), opt, [0], SupportMode.EXACT)
        assert chain.expansions == ((1, 2),)
        assert chain.players == (0, 1, 2)
        assert [stage.players for stage in chain.stages] == [(0,), (1, 2)]

    def test_requires_nash(self, cx4_exp, build_profile, opt):
        with pytest.raises(PreconditionError):
            build_expansion_chain(cx4_exp, build_profile(cx4_exp, (0, 0, 0, 0)), opt, [0])

    def test_corpus_chains_end_self_sufficient(self, exp_corpus):
        for inst in exp_corpus[:10]:
            nash = run_brd(inst, first_strategies(inst)).final
            opt = min_bottleneck_routing(inst).witness
            chain = build_expansion_chain(inst, nash, opt, [0])
            assert is_self_sufficient(inst, nash, opt, chain.players)[0]
            assert chain.stages[0].players == (0,)
            assert 0 not in chain.dropped
            assert chain.self_sufficient_at == chain.depth


class TestClassification:
    def test_counterexample_types(self, cx4_exp, build_profile):
        result = classify_stages(cx4_exp, build_profile(cx4_exp, NASH_A), l_star=2)
        assert result.c_hat == 3
        assert result.stage_members(1) == (0, 1, 2, 3)
        assert [p.player_type for p in result.players] == [PlayerType.A] * 3 + [PlayerType.B]
        assert result.untyped == ()
        assert result.flagged == ()

    def test_single_edge_player_is_flagged(self):
        inst = gen_parallel_links(1, 1, CostModel.expsum())
        result = classify_stages(inst, first_strategies(inst), l_star=0)
        (player,) = result.players
        assert (player.stage, player.player_type, player.flagged) == (1, PlayerType.A, True)
        assert result.flagged == (0,)

    def test_cheap_player_is_untyped(self):
        # player 0: a fixed two-edge path; player 1: alone on a parallel edge
        graph = Graph.from_pairs(3, [(0, 1), (1, 2), (0, 1)])
        fixed = [((0, 1), 2), ((2,), 1)]
        players = tuple(
            Player(
                player_id=i,
                source=0,
                destination=dst,
                strategies=ExplicitPaths(paths=(Path(edge_seq=edges, source=0, destination=dst),)),
            )
            for i, (edges, dst) in enumerate(fixed)
        )
        inst = Instance(graph=graph, players=players, cost_model=CostModel.expsum())
        result = classify_stages(inst, first_strategies(inst), l_star=0)
        assert result.c_hat == 2
        top, cheap = result.players
        assert (top.cost, top.stage, top.player_type, top.flagged) == (4, 1, PlayerType.B, False)
        assert (cheap.cost, cheap.stage, cheap.player_type, cheap.flagged) == (2, 0, None, False)
        assert result.untyped == (1,)

    def test_needs_exponential_model(self, cx4_linear):
        with pytest.raises(PreconditionError):
            classify_stages(cx4_linear, first_strategies(cx4_linear), l_star=2)

    def test_needs_nash(self, cx4_exp):
        with pytest.raises(PreconditionError):
            classify_stages(cx4_exp, first_strategies(cx4_exp), l_star=2)

    def test_negative_l_star(self, cx4_exp, build_profile):
        with pytest.raises(PreconditionError):
            classify_stages(cx4_exp, build_profile(cx4_exp, NASH_A), l_star=-1)


class TestEarlyStageCheck:
    def test_small_cost_level_not_exercised(self, cx4_exp, build_profile, opt):
        check = early_stage_check(cx4_exp, build_profile(cx4_exp, NASH_A), opt)
        assert check.status == "not-exercised"
        assert check.threshold_stage == -10
        assert check.self_sufficient_sets == ()

    def test_forced_threshold_runs_the_search(self, cx4_exp, build_profile, opt):
        check = early_stage_check(cx4_exp, build_profile(cx4_exp, NASH_A), opt, threshold=1)
        assert check.status == "exercised"
        assert (check.c_star, check.c_hat, check.threshold_stage) == (1, 3, 1)
        assert check.checked_sets == 15
        # player 0 only stays on e when both other e-players are present
        assert check.self_sufficient_sets == (
            (1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (0, 1, 2), (1, 2, 3), (0, 1, 2, 3),
        )

    def test_forced_threshold_budget(self, cx4_exp, build_profile, opt):
        with pytest.raises(SearchBudgetExceededError):
            early_stage_check(cx4_exp, build_profile(cx4_exp, NASH_A), opt, subset_cap=5, threshold=1)

    def test_single_edge_optimum_not_exercised(self):
        inst = gen_parallel_links(1, 1, CostModel.expsum())
        routing = first_strategies(inst)
        check = early_stage_check(inst, routing, routing)
        assert check.status == "not-exercised"
        assert check.l1_star is None


def test_structure_over_every_nash_routing(cx4_exp, opt):
    """All 48 Nash routings of the k=4 counterexample."""
    nash_routings = enumerate_nash(cx4_exp).routings
    assert len(nash_routings) == 48
    for nash in nash_routings:
        assert is_self_sufficient(cx4_exp, nash, opt, range(4))[0]

        chain = build_expansion_chain(cx4_exp, nash, opt, [0])
        seen: list[int] = []
        for stage in chain.stages:
            assert not set(stage.players) & set(seen)
            seen.extend(stage.players)
            if stage.position < chain.self_sufficient_at:
                assert not is_self_sufficient(cx4_exp, nash, opt, seen)[0]
        assert is_self_sufficient(cx4_exp, nash, opt, seen)[0]

        classification = classify_stages(cx4_exp, nash, chain.l_star)
        for entry in classification.players:
            assert (entry.stage >= 1) == (entry.player_type is not None)


def _check_bands(inst, nash, classification):
    """Every player sits in its cost band, and A, B, D split each stage."""
    counts = raw_congestion(inst, nash.choice)
    c_hat, l_star = classification.c_hat, classification.l_star
    for entry in classification.players:
        path = nash[entry.player_id]
        cost = entry.cost
        assert cost == exp_cost(counts, path)
        if entry.stage == 0:
            assert cost < 3
            assert entry.player_type is None and not entry.flagged
            continue
        if entry.stage == 1:
            assert 2 ** (c_hat - 1) < cost <= 2**c_hat
            assert entry.flagged == (cost < 2 ** (c_hat - 1) + 2)
        else:
            high = 2 ** (c_hat - entry.stage + 1)
            assert 2 ** (c_hat - entry.stage) + 2 <= cost <= high + 1
            assert entry.flagged == (cost == high + 1)
        level = c_hat - entry.stage
        if len(path) == 1 and counts[path.edge_seq[0]] == level + 1:
            assert entry.player_type is PlayerType.A
        elif level >= max(counts[e] for e in path.edge_seq) > level - l_star - 1:
            assert entry.player_type is PlayerType.B
        else:
            assert entry.player_type is PlayerType.D


def test_bands_and_chains_on_seeded_corpus(exp_corpus):
    for inst in exp_corpus[:16]:
        nash = run_brd(inst, first_strategies(inst)).final
        optimum = min_bottleneck_routing(inst)
        classification = classify_stages(inst, nash, optimum.l_star_ceil)
        _check_bands(inst, nash, classification)

        chain = build_expansion_chain(inst, nash, optimum.witness, range(inst.player_count))
        assert chain.depth == 1
        assert chain.players == tuple(range(inst.player_count))
        assert chain.dropped == ()
