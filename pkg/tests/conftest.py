"""Shared fixtures: instance families, profile builders and fixture files."""

from pathlib import Path

import pytest

from bottleneck_arena.engine.game_model import strategy_paths
from bottleneck_arena.engine.generators import (
    Family,
    GenSpec,
    gen_linear_counterexample,
    gen_parallel_links,
    generate,
)
from bottleneck_arena.models import CostModel, Graph, Instance, Path as GamePath, Player, Routing
from bottleneck_arena.models.game import ExplicitPaths

FIXTURES = Path(__file__).parent / "fixtures"


def profile(inst: Instance, indices) -> Routing:
    """Routing picking strategy `indices[i]` for player i."""
    return Routing(choice=tuple(strategy_paths(inst, i)[idx] for i, idx in enumerate(indices)))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def build_profile():
    return profile


@pytest.fixture
def cx4_exp() -> Instance:
    return gen_linear_counterexample(4, CostModel.expsum())


@pytest.fixture
def cx4_linear() -> Instance:
    return gen_linear_counterexample(4, CostModel.linear())


@pytest.fixture
def parallel_2x2() -> Instance:
    return gen_parallel_links(2, 2, CostModel.expsum())


@pytest.fixture
def triangle() -> Graph:
    """0-1 (edge 0), 1-2 (edge 1), 0-2 (edge 2)."""
    return Graph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def triangle_single_player(triangle) -> Instance:
    """One player 0 -> 2 choosing the direct edge or the two-edge detour."""
    strategies = ExplicitPaths(
        paths=(
            GamePath(edge_seq=(2,), source=0, destination=2),
            GamePath(edge_seq=(0, 1), source=0, destination=2),
        )
    )
    return Instance(
        graph=triangle,
        players=(Player(player_id=0, source=0, destination=2, strategies=strategies),),
        cost_model=CostModel.expsum(),
    )


def seeded_corpus(count: int, model: CostModel) -> list[Instance]:
    """Alternating seeded grids and connected multigraphs."""
    corpus = []
    for seed in range(count):
        if seed % 2 == 0:
            spec = GenSpec(family=Family.GRID, rows=3, cols=3, players=3 + seed % 3, seed=seed, cost_model=model)
        else:
            spec = GenSpec(family=Family.RANDOM, nodes=6, edges=9, players=4, seed=seed, cost_model=model)
        corpus.append(generate(spec))
    return corpus


@pytest.fixture(scope="session")
def exp_corpus() -> list[Instance]:
    return seeded_corpus(50, CostModel.expsum())


@pytest.fixture
def corpus_factory():
    return seeded_corpus
