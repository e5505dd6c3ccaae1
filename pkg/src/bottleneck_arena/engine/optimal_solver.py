"""Optimal solver - exact minimum bottleneck congestion C* by binary search over a
backtracking feasibility oracle."""

import logging
import math

from ..errors import PreconditionError, SearchBudgetExceededError
from ..models.game import Instance, Routing
from ..models.graph import Path
from ..models.reports import OptimalResult
from .game_model import strategy_paths
from .graph_core import DEFAULT_PATH_CAP

logger = logging.getLogger(__name__)

DEFAULT_NODE_CAP = 10**7


class _CapSearch:
    """Backtracking over players, most constrained first, least loaded paths first."""

    def __init__(self, strategies: list[list[Path]], edge_count: int, cap: int, node_cap: int):
        self.strategies = strategies
        self.loads = [0] * edge_count
        self.cap = cap
        self.node_cap = node_cap
        self.nodes_explored = 0
        self.assignment: list[Path | None] = [None] * len(strategies)

    def _fits(self, path: Path) -> bool:
        return all(self.loads[e] < self.cap for e in path.edge_seq)

    def _place(self, path: Path, delta: int) -> None:
        for edge_id in path.edge_seq:
            self.loads[edge_id] += delta

    def solve(self, remaining: set[int]) -> bool:
        if not remaining:
            return True
        chosen, chosen_options = None, None
        for i in sorted(remaining):
            options = [idx for idx, path in enumerate(self.strategies[i]) if self._fits(path)]
            if not options:
                return False
            if chosen_options is None or len(options) < len(chosen_options):
                chosen, chosen_options = i, options
        paths = self.strategies[chosen]
        ordered = sorted(
            chosen_options,
            key=lambda idx: (max((self.loads[e] for e in paths[idx].edge_seq), default=0), idx),
        )
        remaining.discard(chosen)
        for idx in ordered:
            self.nodes_explored += 1
            if self.nodes_explored > self.node_cap:
                raise SearchBudgetExceededError(
                    f"feasibility search explored more than {self.node_cap} nodes",
                    cap=self.cap,
                    node_cap=self.node_cap,
                )
            path = paths[idx]
            self._place(path, 1)
            self.assignment[chosen] = path
            if self.solve(remaining):
                return True
            self._place(path, -1)
            self.assignment[chosen] = None
        remaining.add(chosen)
        return False


def _materialize(inst: Instance, path_cap: int) -> list[list[Path]]:
    return [strategy_paths(inst, i, path_cap) for i in range(inst.player_count)]


def _feasible(
    inst: Instance, strategies: list[list[Path]], cap: int, node_cap: int
) -> tuple[Routing | None, int]:
    search = _CapSearch(strategies, inst.graph.edge_count, cap, node_cap)
    found = search.solve(set(range(inst.player_count)))
    logger.debug("cap %d: feasible=%s after %d nodes", cap, found, search.nodes_explored)
    if not found:
        return None, search.nodes_explored
    return Routing(choice=tuple(search.assignment)), search.nodes_explored


def feasible_with_cap(
    inst: Instance,
    cap: int,
    node_cap: int = DEFAULT_NODE_CAP,
    path_cap: int = DEFAULT_PATH_CAP,
) -> Routing | None:
    """A routing with every edge congestion <= cap, or None when none exists."""
    if cap < 1:
        raise PreconditionError("cap must be >= 1", cap=cap)
    routing, _ = _feasible(inst, _materialize(inst, path_cap), cap, node_cap)
    return routing


def min_bottleneck_routing(
    inst: Instance,
    node_cap: int = DEFAULT_NODE_CAP,
    path_cap: int = DEFAULT_PATH_CAP,
) -> OptimalResult:
    """C* = smallest feasible cap in [1, N], with the witness found at that cap."""
    if inst.player_count < 1:
        raise PreconditionError("instance has no players")
    strategies = _materialize(inst, path_cap)
    explored = 0
    lo, hi = 1, inst.player_count
    witness: Routing | None = None
    while lo < hi:
        mid = (lo + hi) // 2
        routing, nodes = _feasible(inst, strategies, mid, node_cap)
        explored += nodes
        if routing is not None:
            hi, witness = mid, routing
        else:
            lo = mid + 1
    if witness is None:
        witness, nodes = _feasible(inst, strategies, lo, node_cap)
        explored += nodes
        assert witness is not None, "cap = N is always feasible"

    longest = max(len(p) for p in witness.choice)
    logger.info("C* = %d (L* = %d, %d search nodes)", lo, longest, explored)
    return OptimalResult(
        c_star=lo,
        witness=witness,
        longest_path=longest,
        l_star=math.log2(longest),
        l_star_ceil=(longest - 1).bit_length(),
        l1_star=math.log2(longest - 1) if longest >= 2 else None,
        nodes_explored=explored,
    )
