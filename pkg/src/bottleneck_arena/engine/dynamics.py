"""Dynamics - best response, Nash verification and best response dynamics."""

import logging

from ..errors import PreconditionError
from ..models.game import CostVariant, ExactCost, ExplicitPaths, Instance, Routing
from ..models.graph import Path
from ..models.reports import BrdStep, BrdTrace, Schedule
from .game_model import (
    as_exact,
    check_routing,
    deviation_cost_value,
    path_cost_value,
    potential,
    raw_congestion,
    strategy_paths,
)
from .graph_core import DEFAULT_PATH_CAP, min_bottleneck_path, min_weight_path
from .prng import Xorshift64Star

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 10**6


def _best_response(inst: Instance, counts: list[int], r: Routing, i: int) -> tuple[Path, int]:
    """Best path for player i and its cost value; keeps the current path on ties."""
    model = inst.cost_model
    player = inst.players[i]
    current = r[i]
    current_value = path_cost_value(model, counts, current)
    strategies = player.strategies

    if isinstance(strategies, ExplicitPaths):
        best_key = None
        best_path = current
        for candidate in strategies.paths:
            value = deviation_cost_value(model, counts, current, candidate)
            key = (value, len(candidate), candidate.edge_seq)
            if best_key is None or key < best_key:
                best_key, best_path = key, candidate
        if best_key is not None and best_key[0] < current_value:
            return best_path, best_key[0]
        return current, current_value

    # AllPaths: reduce to a single path query over congestion without player i
    without = list(counts)
    for edge_id in current.edge_seq:
        without[edge_id] -= 1
    graph = inst.graph
    if model.variant is CostVariant.BOTTLENECK_MAX:
        candidate = min_bottleneck_path(
            graph, player.source, player.destination, without, max_len=strategies.max_len
        )
    else:
        weights = [model.edge_term(c + 1) for c in without]
        candidate = min_weight_path(
            graph, player.source, player.destination, weights, max_len=strategies.max_len
        )
    value = deviation_cost_value(model, counts, current, candidate)
    if value < current_value:
        return candidate, value
    return current, current_value


def best_response(inst: Instance, r: Routing, i: int) -> Path:
    """argmin of pc_i(p'_i; p_-i) over the strategy set; the current path wins ties."""
    check_routing(inst, r)
    if not 0 <= i < inst.player_count:
        raise PreconditionError(f"player {i} out of range", player_id=i)
    path, _ = _best_response(inst, raw_congestion(inst, r.choice), r, i)
    return path


def best_response_cost(inst: Instance, r: Routing, i: int) -> ExactCost:
    check_routing(inst, r)
    _, value = _best_response(inst, raw_congestion(inst, r.choice), r, i)
    return as_exact(inst.cost_model, value)


def improving_paths(
    inst: Instance, r: Routing, i: int, path_cap: int = DEFAULT_PATH_CAP
) -> list[Path]:
    """Every strategy of player i that is a greedy move (strictly cheaper)."""
    check_routing(inst, r)
    model = inst.cost_model
    counts = raw_congestion(inst, r.choice)
    current = r[i]
    current_value = path_cost_value(model, counts, current)
    return [
        candidate
        for candidate in strategy_paths(inst, i, path_cap)
        if deviation_cost_value(model, counts, current, candidate) < current_value
    ]


def greedy_moves(
    inst: Instance, r: Routing, path_cap: int = DEFAULT_PATH_CAP
) -> list[tuple[int, Path]]:
    """Every (player, path) pair that strictly lowers the mover's cost."""
    return [
        (i, path)
        for i in range(inst.player_count)
        for path in improving_paths(inst, r, i, path_cap)
    ]


def is_nash(inst: Instance, r: Routing) -> tuple[bool, list[tuple[int, Path]]]:
    """Nash check; on failure lists every player with its best improving path."""
    check_routing(inst, r)
    counts = raw_congestion(inst, r.choice)
    improving: list[tuple[int, Path]] = []
    for i in range(inst.player_count):
        path, _ = _best_response(inst, counts, r, i)
        if path.edge_seq != r[i].edge_seq:
            improving.append((i, path))
    return (not improving, improving)


def _round_robin_move(inst, counts, r, cursor) -> tuple[int, Path] | None:
    n = inst.player_count
    for offset in range(n):
        i = (cursor + offset) % n
        path, _ = _best_response(inst, counts, r, i)
        if path.edge_seq != r[i].edge_seq:
            return i, path
    return None


def _max_gain_move(inst, counts, r) -> tuple[int, Path] | None:
    best: tuple[int, int, Path] | None = None
    current_potential = sum(1 << c for c in counts)
    for i in range(inst.player_count):
        path, _ = _best_response(inst, counts, r, i)
        if path.edge_seq == r[i].edge_seq:
            continue
        drop = current_potential - sum(1 << c for c in _moved_counts(counts, r[i], path))
        if best is None or drop > best[0]:
            best = (drop, i, path)
    return None if best is None else (best[1], best[2])


def _random_move(inst, counts, r, rng: Xorshift64Star) -> tuple[int, Path] | None:
    moves = []
    for i in range(inst.player_count):
        path, _ = _best_response(inst, counts, r, i)
        if path.edge_seq != r[i].edge_seq:
            moves.append((i, path))
    if not moves:
        return None
    return rng.choice(moves)


def _moved_counts(counts: list[int], old: Path, new: Path) -> list[int]:
    moved = list(counts)
    for edge_id in old.edge_seq:
        moved[edge_id] -= 1
    for edge_id in new.edge_seq:
        moved[edge_id] += 1
    return moved


def run_brd(
    inst: Instance,
    start: Routing,
    schedule: Schedule = Schedule.ROUND_ROBIN,
    max_steps: int = DEFAULT_MAX_STEPS,
    seed: int = 0,
) -> BrdTrace:
    """
    Apply greedy moves chosen by `schedule` until no player improves
    (converged) or `max_steps` moves have been made (not converged).
    """
    if max_steps < 1:
        raise PreconditionError("max_steps must be >= 1", max_steps=max_steps)
    check_routing(inst, start)
    model = inst.cost_model
    routing = start
    counts = raw_congestion(inst, routing.choice)
    initial_potential = potential(inst, routing)
    rng = Xorshift64Star(seed)
    cursor = 0
    steps: list[BrdStep] = []
    converged = False

    while True:
        if schedule is Schedule.ROUND_ROBIN:
            move = _round_robin_move(inst, counts, routing, cursor)
        elif schedule is Schedule.MAX_GAIN:
            move = _max_gain_move(inst, counts, routing)
        else:
            move = _random_move(inst, counts, routing, rng)
        if move is None:
            converged = True
            break
        if len(steps) >= max_steps:
            break
        i, new_path = move
        old_path = routing[i]
        old_value = path_cost_value(model, counts, old_path)
        counts = _moved_counts(counts, old_path, new_path)
        routing = routing.replace(i, new_path)
        step = BrdStep(
            step_index=len(steps),
            player_id=i,
            old_path=old_path,
            new_path=new_path,
            old_cost=as_exact(model, old_value),
            new_cost=as_exact(model, path_cost_value(model, counts, new_path)),
            potential_after=sum(1 << c for c in counts),
        )
        steps.append(step)
        logger.debug(
            "step %d: player %d %s -> %s, potential %d",
            step.step_index, i, old_path.edge_seq, new_path.edge_seq, step.potential_after,
        )
        cursor = (i + 1) % inst.player_count

    if converged:
        logger.info("Best response dynamics converged after %d moves", len(steps))
    else:
        logger.warning("Best response dynamics stopped after %d moves without converging", len(steps))
    return BrdTrace(
        schedule=schedule,
        initial_potential=initial_potential,
        steps=tuple(steps),
        converged=converged,
        final=routing,
    )
