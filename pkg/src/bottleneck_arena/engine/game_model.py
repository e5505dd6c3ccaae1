"""Game model - congestion, the five player costs, social cost and the potential."""

import logging
from collections.abc import Iterable

from ..errors import InvalidRoutingError, PreconditionError
from ..models.game import (
    AllPaths,
    CongestionMap,
    CostModel,
    CostVariant,
    ExactCost,
    ExplicitPaths,
    Instance,
    Player,
    Routing,
)
from ..models.graph import Path
from .graph_core import DEFAULT_PATH_CAP, all_simple_paths, is_node_simple, validate_path

logger = logging.getLogger(__name__)


def in_strategy_set(inst: Instance, player: Player, path: Path) -> bool:
    """Membership of `path` in the player's strategy set."""
    if path.source != player.source or path.destination != player.destination:
        return False
    strategies = player.strategies
    if isinstance(strategies, ExplicitPaths):
        return any(path.edge_seq == candidate.edge_seq for candidate in strategies.paths)
    return (
        len(path) <= strategies.max_len
        and validate_path(inst.graph, path)
        and is_node_simple(inst.graph, path)
    )


def check_routing(inst: Instance, r: Routing) -> None:
    """Raise InvalidRoutingError unless every choice lies in its strategy set."""
    if len(r.choice) != inst.player_count:
        raise InvalidRoutingError(
            f"routing has {len(r.choice)} paths for {inst.player_count} players"
        )
    for player, path in zip(inst.players, r.choice):
        if not in_strategy_set(inst, player, path):
            raise InvalidRoutingError(
                f"path of player {player.player_id} is not in its strategy set",
                player_id=player.player_id,
                edge_seq=list(path.edge_seq),
            )


def strategy_paths(inst: Instance, player_id: int, path_cap: int = DEFAULT_PATH_CAP) -> list[Path]:
    """The player's strategy set as a concrete list (AllPaths is enumerated)."""
    player = inst.players[player_id]
    strategies = player.strategies
    if isinstance(strategies, ExplicitPaths):
        return list(strategies.paths)
    assert isinstance(strategies, AllPaths)
    return all_simple_paths(
        inst.graph, player.source, player.destination, strategies.max_len, cap=path_cap
    )


def _counts(edge_count: int, paths: Iterable[Path]) -> list[int]:
    counts = [0] * edge_count
    for path in paths:
        for edge_id in path.edge_seq:
            counts[edge_id] += 1
    return counts


def raw_congestion(inst: Instance, paths: Iterable[Path]) -> list[int]:
    """Edge counts for an arbitrary collection of paths (no strategy checks)."""
    return _counts(inst.graph.edge_count, paths)


def congestion(inst: Instance, r: Routing) -> CongestionMap:
    """C_e = number of chosen paths that use e."""
    check_routing(inst, r)
    return CongestionMap(counts=tuple(_counts(inst.graph.edge_count, r.choice)))


def path_cost_value(model: CostModel, counts: list[int] | tuple[int, ...], path: Path) -> int:
    """Ordering integer of a path's cost under fixed congestion counts."""
    if model.variant is CostVariant.BOTTLENECK_MAX:
        return max((counts[e] for e in path.edge_seq), default=0)
    return sum(model.edge_term(counts[e]) for e in path.edge_seq)


def deviation_cost_value(
    model: CostModel,
    counts: list[int] | tuple[int, ...],
    current: Path,
    candidate: Path,
) -> int:
    """
    Cost of moving from `current` to `candidate` with everyone else fixed;
    the mover adds itself on candidate edges it is not already using.
    """
    current_edges = current.edge_set
    loads = (counts[e] + (0 if e in current_edges else 1) for e in candidate.edge_seq)
    if model.variant is CostVariant.BOTTLENECK_MAX:
        return max(loads, default=0)
    return sum(model.edge_term(c) for c in loads)


def as_exact(model: CostModel, value: int) -> ExactCost:
    return ExactCost(value=value, log_scale=model.variant is CostVariant.LOG_EXP_SUM)


def player_cost(inst: Instance, r: Routing, i: int) -> ExactCost:
    """pc_i(p) under the instance cost model."""
    if not 0 <= i < inst.player_count:
        raise PreconditionError(f"player {i} out of range", player_id=i)
    counts = congestion(inst, r).counts
    return as_exact(inst.cost_model, path_cost_value(inst.cost_model, counts, r[i]))


def exp_cost(counts: list[int] | tuple[int, ...], path: Path) -> int:
    """Exponential cost sum_{e in path} 2^{C_e}, whatever the instance model."""
    return sum(1 << counts[e] for e in path.edge_seq)


def social_cost(inst: Instance, r: Routing) -> int:
    """SC = C, the maximum edge congestion."""
    return congestion(inst, r).max()


def potential(inst: Instance, r: Routing) -> int:
    """f(p) = sum over all edges of 2^{C_e}."""
    return sum(1 << c for c in congestion(inst, r).counts)


def first_strategies(inst: Instance, path_cap: int = DEFAULT_PATH_CAP) -> Routing:
    """The lexicographically first profile: every player takes its first strategy."""
    return Routing(choice=tuple(strategy_paths(inst, i, path_cap)[0] for i in range(inst.player_count)))
