"""Equilibria - exhaustive pure Nash enumeration and PoA / PoS measurement."""

import logging
import math
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from ..models.game import CostModel, Instance, Routing
from ..models.graph import Path
from ..models.reports import EquilibriaReport, NashEnumeration
from .game_model import deviation_cost_value, path_cost_value, raw_congestion, strategy_paths
from .graph_core import DEFAULT_PATH_CAP
from .optimal_solver import DEFAULT_NODE_CAP, min_bottleneck_routing

logger = logging.getLogger(__name__)

DEFAULT_PROFILE_CAP = 10**7


def _decode(index: int, radices: list[int]) -> list[int]:
    """Mixed-radix digits of `index`, player 0 most significant."""
    digits = [0] * len(radices)
    for pos in range(len(radices) - 1, -1, -1):
        index, digits[pos] = divmod(index, radices[pos])
    return digits


def _profiles(radices: list[int], start: int, stop: int) -> Iterator[tuple[int, ...]]:
    digits = _decode(start, radices)
    for _ in range(start, stop):
        yield tuple(digits)
        pos = len(digits) - 1
        while pos >= 0:
            digits[pos] += 1
            if digits[pos] < radices[pos]:
                break
            digits[pos] = 0
            pos -= 1


def _profile_is_nash(model: CostModel, counts: list[int], strategies: list[list[Path]], paths) -> bool:
    for i, current in enumerate(paths):
        current_value = path_cost_value(model, counts, current)
        for candidate in strategies[i]:
            if deviation_cost_value(model, counts, current, candidate) < current_value:
                return False
    return True


def _scan_chunk(
    inst: Instance, strategies: list[list[Path]], start: int, stop: int
) -> list[tuple[int, ...]]:
    """Nash profiles (as strategy indices) among profile numbers [start, stop)."""
    radices = [len(options) for options in strategies]
    found = []
    for indices in _profiles(radices, start, stop):
        paths = [strategies[i][idx] for i, idx in enumerate(indices)]
        counts = raw_congestion(inst, paths)
        if _profile_is_nash(inst.cost_model, counts, strategies, paths):
            found.append(indices)
    logger.debug("chunk [%d, %d): %d Nash profiles", start, stop, len(found))
    return found


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    if total <= 0:
        return [(0, 0)]
    size = -(-total // parts)
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def enumerate_nash(
    inst: Instance,
    profile_cap: int = DEFAULT_PROFILE_CAP,
    workers: int = 1,
    path_cap: int = DEFAULT_PATH_CAP,
) -> NashEnumeration:
    """
    Scan the strategy-profile product in lexicographic order and keep the
    pure Nash routings; only the first `profile_cap` profiles are scanned.
    """
    strategies = [strategy_paths(inst, i, path_cap) for i in range(inst.player_count)]
    radices = [len(options) for options in strategies]
    space = math.prod(radices)
    scan = min(space, profile_cap)
    truncated = space > profile_cap
    if truncated:
        logger.warning("Profile space %d exceeds cap %d; scanning a prefix only", space, profile_cap)

    chunks = _chunks(scan, max(1, workers))
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_chunk, inst, strategies, lo, hi) for lo, hi in chunks]
            results = [future.result() for future in futures]
    else:
        results = [_scan_chunk(inst, strategies, lo, hi) for lo, hi in chunks]

    routings = tuple(
        Routing(choice=tuple(strategies[i][idx] for i, idx in enumerate(indices)))
        for chunk in results
        for indices in chunk
    )
    logger.info("Scanned %d of %d profiles, %d Nash routings", scan, space, len(routings))
    return NashEnumeration(
        routings=routings,
        truncated=truncated,
        profiles_scanned=scan,
        profile_space=space,
    )


def bound_value(max_path_length: int, edge_count: int) -> float:
    """log2(2L) * log2(2|E|), positive even for L = 1 or |E| = 1."""
    return math.log2(2 * max(1, max_path_length)) * math.log2(2 * max(1, edge_count))


def measure_poa(
    inst: Instance,
    profile_cap: int = DEFAULT_PROFILE_CAP,
    workers: int = 1,
    node_cap: int = DEFAULT_NODE_CAP,
    path_cap: int = DEFAULT_PATH_CAP,
) -> EquilibriaReport:
    """Worst and best Nash social cost over C*, as exact rationals."""
    enumeration = enumerate_nash(inst, profile_cap, workers, path_cap)
    optimum = min_bottleneck_routing(inst, node_cap, path_cap)
    c_star = optimum.c_star

    costs = [max(raw_congestion(inst, r.choice), default=0) for r in enumeration.routings]
    worst = max(costs, default=None)
    best = min(costs, default=None)
    if not costs:
        logger.warning("No pure Nash routing found under %s", inst.cost_model.label())

    poa = None if worst is None else Fraction(worst, c_star)
    pos = None if best is None else Fraction(best, c_star)
    length = inst.max_path_length
    edges = inst.graph.edge_count
    reference = bound_value(length, edges)
    return EquilibriaReport(
        nash_routings=enumeration.routings,
        nash_count=len(enumeration.routings),
        worst_nash_cost=worst,
        best_nash_cost=best,
        c_star=c_star,
        poa=poa,
        pos=pos,
        truncated=enumeration.truncated,
        max_path_length=length,
        edge_count=edges,
        bound_value=reference,
        bound_ratio=None if poa is None else float(poa) / reference,
    )
