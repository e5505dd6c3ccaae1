"""Chains - self-sufficiency, support sets, expansion chains and stage typing.

All costs used for cost levels are exponential sums (sum of 2^C_e over the
player's path), whatever the instance model. Self-sufficiency compares
player costs under the instance model.
"""

import logging
import math
from collections.abc import Iterable
from itertools import combinations
from typing import Optional

from ..errors import NoSupportSetError, PreconditionError, SearchBudgetExceededError
from ..models.game import Instance, Routing
from ..models.reports import (
    ChainReport,
    ChainStage,
    EarlyStageCheck,
    PlayerStage,
    PlayerType,
    StageClassification,
    SupportMode,
)
from .dynamics import is_nash
from .game_model import check_routing, exp_cost, path_cost_value, raw_congestion

logger = logging.getLogger(__name__)

DEFAULT_SUBSET_CAP = 10**5


def cost_level(max_cost: int) -> int:
    """C-hat = ceil(log2(max_i cost_i)), exact on big integers."""
    return (max_cost - 1).bit_length() if max_cost > 0 else 0


def band_stage(cost: int, c_hat: int) -> tuple[int, bool]:
    """Stage of an exponential cost relative to C-hat, and whether it sits off-band."""
    if c_hat < 1:
        return 0, False
    top = 1 << (c_hat - 1)
    if cost > top:
        return 1, cost < top + 2
    for stage in range(2, c_hat + 1):
        low = (1 << (c_hat - stage)) + 2
        high = (1 << (c_hat - stage + 1)) + 1
        if low <= cost <= high:
            return stage, cost == high
    return 0, False


def _player_set(inst: Instance, players: Iterable[int], what: str) -> frozenset[int]:
    members = frozenset(players)
    if not members:
        raise PreconditionError(f"{what} must be nonempty")
    outside = sorted(p for p in members if not 0 <= p < inst.player_count)
    if outside:
        raise PreconditionError(f"{what} has unknown players", players=outside)
    return members


def _violators(
    inst: Instance,
    nash: Routing,
    opt: Routing,
    present: frozenset[int],
    targets: Iterable[int],
    nash_costs: list[int],
) -> list[int]:
    """Targets that would rather take their optimal path with only `present` routed."""
    model = inst.cost_model
    found = []
    for i in sorted(targets):
        paths = [nash[j] for j in present if j != i]
        paths.append(opt[i])
        counts = raw_congestion(inst, paths)
        if path_cost_value(model, counts, opt[i]) < nash_costs[i]:
            found.append(i)
    return found


def _nash_costs(inst: Instance, nash: Routing) -> list[int]:
    counts = raw_congestion(inst, nash.choice)
    return [path_cost_value(inst.cost_model, counts, path) for path in nash.choice]


def is_self_sufficient(
    inst: Instance, nash: Routing, opt: Routing, s: Iterable[int]
) -> tuple[bool, list[int]]:
    """
    Each member i of `s`, moved alone to its optimal path while the rest of `s`
    keeps its Nash paths and everyone else is removed, must pay at least its
    Nash cost. The mover's own unit counts on its optimal path.
    """
    check_routing(inst, nash)
    check_routing(inst, opt)
    members = _player_set(inst, s, "player set")
    violators = _violators(inst, nash, opt, members, members, _nash_costs(inst, nash))
    return (not violators, violators)


def _greedy_support(inst, nash, opt, members, nash_costs) -> frozenset[int]:
    support: set[int] = set()
    while True:
        present = members | support
        violators = _violators(inst, nash, opt, present, members, nash_costs)
        if not violators:
            return frozenset(support)
        target_edges = [e for i in violators for e in opt[i].edge_seq]
        best, best_score = None, 0
        for j in range(inst.player_count):
            if j in present:
                continue
            edges = nash[j].edge_set
            score = sum(1 for e in target_edges if e in edges)
            if score > best_score:
                best, best_score = j, score
        if best is None:
            raise NoSupportSetError(
                "no remaining player raises congestion on the violated optimal paths",
                players=sorted(members),
                violators=violators,
            )
        logger.debug("support: add player %d (score %d)", best, best_score)
        support.add(best)


def _exact_support(inst, nash, opt, members, nash_costs, subset_cap) -> frozenset[int]:
    violators = _violators(inst, nash, opt, members, members, nash_costs)
    touched = {e for i in violators for e in opt[i].edge_seq}
    relevant = [
        j for j in range(inst.player_count)
        if j not in members and touched & nash[j].edge_set
    ]
    checked = 0
    for size in range(1, len(relevant) + 1):
        for subset in combinations(relevant, size):
            checked += 1
            if checked > subset_cap:
                raise SearchBudgetExceededError(
                    f"support search checked more than {subset_cap} subsets",
                    subset_cap=subset_cap,
                )
            present = members | frozenset(subset)
            if not _violators(inst, nash, opt, present, members, nash_costs):
                return frozenset(subset)
    raise NoSupportSetError(
        "even the full complement does not deter the set (routing is not a Nash routing)",
        players=sorted(members),
        violators=violators,
    )


def find_support_set(
    inst: Instance,
    nash: Routing,
    opt: Routing,
    s: Iterable[int],
    mode: SupportMode = SupportMode.GREEDY,
    subset_cap: int = DEFAULT_SUBSET_CAP,
) -> tuple[int, ...]:
    """Players outside `s` whose presence makes every member of `s` stay put."""
    check_routing(inst, nash)
    check_routing(inst, opt)
    members = _player_set(inst, s, "player set")
    nash_costs = _nash_costs(inst, nash)
    if not _violators(inst, nash, opt, members, members, nash_costs):
        raise PreconditionError("player set is already self-sufficient", players=sorted(members))
    if mode is SupportMode.EXACT:
        support = _exact_support(inst, nash, opt, members, nash_costs, subset_cap)
    else:
        support = _greedy_support(inst, nash, opt, members, nash_costs)
    return tuple(sorted(support))


def _require_nash(inst: Instance, nash: Routing) -> None:
    ok, improving = is_nash(inst, nash)
    if not ok:
        raise PreconditionError(
            "routing is not a Nash routing for the instance cost model",
            improving_players=[i for i, _ in improving],
        )


def _longest_ceil_log(opt: Routing) -> int:
    longest = max((len(p) for p in opt.choice), default=1)
    return (longest - 1).bit_length()


def build_expansion_chain(
    inst: Instance,
    nash: Routing,
    opt: Routing,
    root: Iterable[int],
    mode: SupportMode = SupportMode.GREEDY,
    subset_cap: int = DEFAULT_SUBSET_CAP,
) -> ChainReport:
    """
    Grow `root` by support sets until self-sufficient, then cut the chain.

    The root is always the first chain element, whole, with the band of its
    costliest player. Support players follow grouped by band, and the chain
    stops at the first self-sufficient prefix; only support players can be
    dropped.
    """
    _require_nash(inst, nash)
    check_routing(inst, opt)
    root_set = _player_set(inst, root, "root")
    nash_costs = _nash_costs(inst, nash)

    members = root_set
    expansions: list[tuple[int, ...]] = []
    while _violators(inst, nash, opt, members, members, nash_costs):
        support = find_support_set(inst, nash, opt, members, mode, subset_cap)
        expansions.append(support)
        members = members | frozenset(support)

    counts = raw_congestion(inst, nash.choice)
    costs = [exp_cost(counts, path) for path in nash.choice]
    c_hat = cost_level(max(costs, default=0))
    root_stage, _ = band_stage(max(costs[p] for p in root_set), c_hat)
    by_stage: dict[int, list[int]] = {}
    for player in sorted(members - root_set):
        stage, _ = band_stage(costs[player], c_hat)
        by_stage.setdefault(stage, []).append(player)
    # band 0 (below every band) trails the chain
    order = sorted(by_stage, key=lambda stage: (stage == 0, stage))
    groups = [(root_stage, tuple(sorted(root_set)))]
    groups += [(stage, tuple(by_stage[stage])) for stage in order]

    cut = len(groups)
    union: frozenset[int] = frozenset()
    for position, (_, players) in enumerate(groups, start=1):
        union = union | frozenset(players)
        if not _violators(inst, nash, opt, union, union, nash_costs):
            cut = position
            break
    kept = groups[:cut]
    dropped = tuple(p for _, players in groups[cut:] for p in players)
    chain_players = [p for _, players in kept for p in players]

    stages = []
    for position, (stage, players) in enumerate(kept, start=1):
        used = set()
        for p in players:
            others = {e for q in chain_players if q != p for e in opt[q].edge_seq}
            used |= nash[p].edge_set & others
        stages.append(
            ChainStage(
                position=position,
                band_stage=stage,
                players=players,
                cost_low=min(costs[p] for p in players),
                cost_high=max(costs[p] for p in players),
                support_edges_used=tuple(sorted(used)),
            )
        )
    logger.info(
        "Expansion chain: %d stages, %d expansions, %d dropped", len(stages), len(expansions), len(dropped)
    )
    return ChainReport(
        root=tuple(sorted(root_set)),
        stages=tuple(stages),
        expansions=tuple(expansions),
        self_sufficient_at=cut,
        dropped=dropped,
        c_hat=c_hat,
        l_star=_longest_ceil_log(opt),
    )


def classify_stages(inst: Instance, nash: Routing, l_star: int) -> StageClassification:
    """Stage and A/B/D type of every player of an exponential-cost Nash routing."""
    if not inst.cost_model.is_exponential:
        raise PreconditionError(
            "stage classification needs an exponential cost model",
            cost_model=inst.cost_model.label(),
        )
    if l_star < 0:
        raise PreconditionError("l_star must be nonnegative", l_star=l_star)
    _require_nash(inst, nash)
    counts = raw_congestion(inst, nash.choice)
    costs = [exp_cost(counts, path) for path in nash.choice]
    c_hat = cost_level(max(costs, default=0))

    entries = []
    for player, path in enumerate(nash.choice):
        stage, flagged = band_stage(costs[player], c_hat)
        kind = None
        if stage >= 1:
            top = max(counts[e] for e in path.edge_seq)
            if len(path) == 1 and counts[path.edge_seq[0]] == c_hat - stage + 1:
                kind = PlayerType.A
            elif c_hat - stage >= top > c_hat - stage - l_star - 1:
                kind = PlayerType.B
            else:
                kind = PlayerType.D
        entries.append(
            PlayerStage(player_id=player, cost=costs[player], stage=stage, player_type=kind, flagged=flagged)
        )
    untyped = tuple(e.player_id for e in entries if e.stage == 0)
    flagged = tuple(e.player_id for e in entries if e.flagged)
    if flagged:
        logger.warning("Players %s fall between cost bands and were assigned by convention", list(flagged))
    return StageClassification(
        players=tuple(entries), c_hat=c_hat, l_star=l_star, untyped=untyped, flagged=flagged
    )


def _early_threshold(c_hat: int, c_star: int, l1_star: float) -> int:
    if c_star == 1:
        return math.floor(c_hat - l1_star - 11)
    # largest k with c_hat - k > 8 * c_star + l1_star + 2
    return math.ceil(c_hat - 8 * c_star - l1_star - 2) - 1


def early_stage_check(
    inst: Instance,
    nash: Routing,
    opt: Routing,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    threshold: Optional[int] = None,
) -> EarlyStageCheck:
    """
    Look for self-sufficient sets made only of early-stage players. The
    expectation is that none exist; findings are reported, never asserted.

    `threshold` replaces the computed last early stage. The computed one only
    reaches stage 1 once C-hat exceeds C* by a dozen levels.
    """
    check_routing(inst, opt)
    c_star = max(raw_congestion(inst, opt.choice), default=0)
    longest = max((len(p) for p in opt.choice), default=1)
    counts = raw_congestion(inst, nash.choice)
    costs = [exp_cost(counts, path) for path in nash.choice]
    c_hat = cost_level(max(costs, default=0))

    def skipped(reason: str, l1_star=None, threshold=None) -> EarlyStageCheck:
        logger.warning("Early-stage check not exercised: %s", reason)
        return EarlyStageCheck(
            status="not-exercised",
            c_star=c_star,
            c_hat=c_hat,
            l1_star=l1_star,
            threshold_stage=threshold,
            reason=reason,
        )

    if longest < 2:
        return skipped("optimal paths are single edges")
    l1_star = math.log2(longest - 1)
    if threshold is None:
        threshold = _early_threshold(c_hat, c_star, l1_star)
    if threshold < 1:
        return skipped("cost level too small for any early stage", l1_star, threshold)

    classification = classify_stages(inst, nash, _longest_ceil_log(opt))
    early = [p.player_id for p in classification.players if 1 <= p.stage <= threshold]
    if not early:
        return skipped("no players in the early stages", l1_star, threshold)

    nash_costs = _nash_costs(inst, nash)
    checked = 0
    sufficient = []
    for size in range(1, len(early) + 1):
        for subset in combinations(early, size):
            checked += 1
            if checked > subset_cap:
                raise SearchBudgetExceededError(
                    f"early-stage check visited more than {subset_cap} sets", subset_cap=subset_cap
                )
            members = frozenset(subset)
            if not _violators(inst, nash, opt, members, members, nash_costs):
                sufficient.append(subset)
    if sufficient:
        logger.warning("%d early-stage sets are self-sufficient", len(sufficient))
    return EarlyStageCheck(
        status="exercised",
        c_star=c_star,
        c_hat=c_hat,
        l1_star=l1_star,
        threshold_stage=threshold,
        checked_sets=checked,
        self_sufficient_sets=tuple(sufficient),
    )
