"""Deterministic instance families: the linear counterexample, parallel links,
seeded grids and seeded connected multigraphs."""

import logging
from enum import Enum
from typing import Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from ..errors import PreconditionError, RejectionFailureError
from ..models.game import AllPaths, CostModel, ExplicitPaths, Instance, Player
from ..models.graph import Edge, Graph, Path
from .graph_core import hop_distance, to_networkx
from .prng import Xorshift64Star

logger = logging.getLogger(__name__)


class Family(str, Enum):
    COUNTEREXAMPLE = "counterexample"
    PARALLEL = "parallel"
    GRID = "grid"
    RANDOM = "random"


_REQUIRED = {
    Family.COUNTEREXAMPLE: ("k",),
    Family.PARALLEL: ("players", "links"),
    Family.GRID: ("rows", "cols", "players"),
    Family.RANDOM: ("nodes", "edges", "players"),
}


class GenSpec(BaseModel):
    """Which family to build and its parameters."""

    model_config = ConfigDict(frozen=True)

    family: Family
    cost_model: CostModel = Field(default_factory=CostModel.expsum)
    k: Optional[int] = Field(default=None, ge=2)
    players: Optional[int] = Field(default=None, ge=1)
    links: Optional[int] = Field(default=None, ge=1)
    rows: Optional[int] = Field(default=None, ge=1)
    cols: Optional[int] = Field(default=None, ge=1)
    nodes: Optional[int] = Field(default=None, ge=2)
    edges: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    grid_slack: int = Field(default=4, ge=0)
    random_slack: int = Field(default=2, ge=0)
    max_draws: int = Field(default=100, ge=1)

    @model_validator(mode="after")
    def _family_parameters(self) -> "GenSpec":
        missing = [name for name in _REQUIRED[self.family] if getattr(self, name) is None]
        if missing:
            raise PreconditionError(
                f"family {self.family.value} needs {', '.join(missing)}", missing=missing
            )
        if self.family is Family.GRID and self.rows * self.cols < 2:
            raise PreconditionError("grid needs at least two nodes")
        return self


def gen_linear_counterexample(k: int, model: CostModel) -> Instance:
    """
    Nodes u=0 and v=1 joined by edge e (id 0) and by k-1 node-disjoint paths
    of k edges each; k players u->v choosing e or one of the long paths.
    Long path j runs through nodes 2 + j(k-1) + t and edges 1 + jk + t.
    """
    if k < 2:
        raise PreconditionError("k must be >= 2", k=k)
    edges = [Edge(edge_id=0, u=0, v=1)]
    long_paths = []
    for j in range(k - 1):
        chain = [0] + [2 + j * (k - 1) + t for t in range(k - 1)] + [1]
        ids = []
        for t in range(k):
            edge_id = 1 + j * k + t
            edges.append(Edge(edge_id=edge_id, u=chain[t], v=chain[t + 1]))
            ids.append(edge_id)
        long_paths.append(Path(edge_seq=tuple(ids), source=0, destination=1))
    graph = Graph(node_count=2 + (k - 1) ** 2, edges=tuple(edges))
    strategies = ExplicitPaths(paths=(Path(edge_seq=(0,), source=0, destination=1), *long_paths))
    players = tuple(Player(player_id=i, source=0, destination=1, strategies=strategies) for i in range(k))
    return Instance(graph=graph, players=players, cost_model=model)


def gen_parallel_links(players: int, links: int, model: CostModel) -> Instance:
    if players < 1 or links < 1:
        raise PreconditionError("players and links must be >= 1", players=players, links=links)
    graph = Graph.from_pairs(2, [(0, 1)] * links)
    strategies = ExplicitPaths(
        paths=tuple(Path(edge_seq=(e,), source=0, destination=1) for e in range(links))
    )
    return Instance(
        graph=graph,
        players=tuple(Player(player_id=i, source=0, destination=1, strategies=strategies) for i in range(players)),
        cost_model=model,
    )


def _draw_pair(rng: Xorshift64Star, node_count: int) -> tuple[int, int]:
    source = rng.randbelow(node_count)
    target = rng.randbelow(node_count - 1)
    if target >= source:
        target += 1
    return source, target


def _grid(spec: GenSpec, rng: Xorshift64Star) -> Instance:
    grid = nx.grid_2d_graph(spec.rows, spec.cols)
    index = {node: pos for pos, node in enumerate(sorted(grid.nodes))}
    pairs = sorted(tuple(sorted((index[a], index[b]))) for a, b in grid.edges)
    graph = Graph.from_pairs(len(index), pairs)
    max_len = spec.rows + spec.cols + spec.grid_slack
    players = []
    for i in range(spec.players):
        source, target = _draw_pair(rng, graph.node_count)
        players.append(
            Player(player_id=i, source=source, destination=target, strategies=AllPaths(max_len=max_len))
        )
    return Instance(graph=graph, players=tuple(players), cost_model=spec.cost_model)


class _Disconnected(Exception):
    pass


def _draw_connected(spec: GenSpec, rng: Xorshift64Star) -> Graph:
    pairs = [_draw_pair(rng, spec.nodes) for _ in range(spec.edges)]
    graph = Graph.from_pairs(spec.nodes, pairs)
    if not nx.is_connected(to_networkx(graph)):
        raise _Disconnected()
    return graph


def _random_graph(spec: GenSpec, rng: Xorshift64Star) -> Instance:
    if spec.edges < spec.nodes - 1:
        raise PreconditionError(
            f"{spec.edges} edges cannot connect {spec.nodes} nodes", nodes=spec.nodes, edges=spec.edges
        )
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(spec.max_draws),
            retry=retry_if_exception_type(_Disconnected),
        ):
            with attempt:
                graph = _draw_connected(spec, rng)
    except RetryError as exc:
        raise RejectionFailureError(
            f"no connected graph in {spec.max_draws} draws", draws=spec.max_draws, seed=spec.seed
        ) from exc
    logger.debug("Connected graph after %d draws", attempt.retry_state.attempt_number)

    players = []
    for i in range(spec.players):
        source, target = _draw_pair(rng, graph.node_count)
        distance = hop_distance(graph, source, target)
        players.append(
            Player(
                player_id=i,
                source=source,
                destination=target,
                strategies=AllPaths(max_len=distance + spec.random_slack),
            )
        )
    return Instance(graph=graph, players=tuple(players), cost_model=spec.cost_model)


def gen_random(spec: GenSpec) -> Instance:
    """Seeded grid or connected multigraph; the same spec gives the same instance."""
    rng = Xorshift64Star(spec.seed)
    if spec.family is Family.GRID:
        return _grid(spec, rng)
    if spec.family is Family.RANDOM:
        return _random_graph(spec, rng)
    raise PreconditionError(f"family {spec.family.value} is not random", family=spec.family.value)


def generate(spec: GenSpec) -> Instance:
    """Build any family from its spec."""
    if spec.family is Family.COUNTEREXAMPLE:
        inst = gen_linear_counterexample(spec.k, spec.cost_model)
    elif spec.family is Family.PARALLEL:
        inst = gen_parallel_links(spec.players, spec.links, spec.cost_model)
    else:
        inst = gen_random(spec)
    logger.info(
        "Generated %s instance: %d nodes, %d edges, %d players",
        spec.family.value, inst.graph.node_count, inst.graph.edge_count, inst.player_count,
    )
    return inst
