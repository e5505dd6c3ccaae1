"""Workbench - control plane the CLI drives.

Turns parsed inputs into engine calls under the configured budgets and wraps
every result in a RunReport carrying the instance digest and seed.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Optional

from pydantic import ValidationError

from ..config.loader import Config
from ..engine.chains import build_expansion_chain, classify_stages, early_stage_check
from ..engine.dynamics import is_nash, run_brd
from ..engine.equilibria import enumerate_nash, measure_poa
from ..engine.game_model import (
    congestion,
    first_strategies,
    player_cost,
    potential,
    social_cost,
    strategy_paths,
)
from ..engine.generators import Family, GenSpec, generate
from ..engine.optimal_solver import min_bottleneck_routing
from ..engine.prng import Xorshift64Star
from ..errors import PreconditionError
from ..models.game import CostModel, Instance, Routing
from ..models.reports import (
    BrdTrace,
    ChainReport,
    EquilibriaReport,
    RunReport,
    Schedule,
    StageClassification,
    SupportMode,
)
from .serialization import diagnose_instance, instance_digest, serialize_instance

logger = logging.getLogger(__name__)


def _paths(routing: Routing) -> list[list[int]]:
    return [list(path.edge_seq) for path in routing.choice]


def poa_row(family: str, parameter: int, model: CostModel, report: EquilibriaReport) -> dict[str, Any]:
    """One sweep/poa CSV row."""
    return {
        "family": family,
        "k": parameter,
        "model": model.label(),
        "L": report.max_path_length,
        "E": report.edge_count,
        "c_star": report.c_star,
        "worst_nash": report.worst_nash_cost,
        "best_nash": report.best_nash_cost,
        "poa": None if report.poa is None else str(report.poa),
        "pos": None if report.pos is None else str(report.pos),
        "bound_value": report.bound_value,
        "bound_ratio": report.bound_ratio,
        "truncated": report.truncated,
    }


def _sweep_task(task: tuple[GenSpec, Config]) -> dict[str, Any]:
    spec, config = task
    budgets = config.budgets
    inst = generate(spec)
    report = measure_poa(
        inst,
        profile_cap=budgets.profile_cap,
        node_cap=budgets.search_node_cap,
        path_cap=budgets.path_cap,
    )
    parameter = spec.k if spec.family is Family.COUNTEREXAMPLE else spec.players
    return poa_row(spec.family.value, parameter, spec.cost_model, report)


class Workbench:
    """
    Runs one analysis command at a time over immutable instances.
    Holds no state between commands apart from the configuration.
    """

    def __init__(self, config: Config, command: tuple[str, ...] = (), timing: bool = False):
        self.config = config
        self.command = command
        self.timing = timing

    def _report(self, inst: Optional[Instance], compute: Callable[[], dict[str, Any]], seed=None) -> RunReport:
        started = time.perf_counter()
        payload = compute()
        elapsed = time.perf_counter() - started
        return RunReport(
            command=self.command,
            instance_digest=None if inst is None else instance_digest(inst),
            seed=self.config.dynamics.seed if seed is None else seed,
            timing=round(elapsed, 6) if self.timing else None,
            payload=payload,
        )

    # --- instances -------------------------------------------------------

    def generate(self, spec: GenSpec) -> str:
        """Canonical text of the generated instance."""
        return serialize_instance(generate(spec))

    def gen_spec(self, **params: Any) -> GenSpec:
        """GenSpec with slack and draw limits taken from the configuration."""
        gen = self.config.generators
        try:
            return GenSpec(
                grid_slack=gen.grid_slack,
                random_slack=gen.random_slack,
                max_draws=gen.max_draws,
                **params,
            )
        except ValidationError as exc:
            first = exc.errors(include_url=False)[0]
            where = ".".join(str(part) for part in first["loc"])
            raise PreconditionError(f"{where}: {first['msg']}") from exc

    def validate(self, text: str) -> RunReport:
        problems = diagnose_instance(text)
        payload = {"valid": not problems, "problems": problems}
        return RunReport(command=self.command, seed=self.config.dynamics.seed, payload=payload)

    # --- dynamics and verification -----------------------------------------

    def start_routing(self, inst: Instance, start: str) -> Routing:
        """'lexfirst' or 'random:SEED' (each player draws one of its strategies)."""
        path_cap = self.config.budgets.path_cap
        if start == "lexfirst":
            return first_strategies(inst, path_cap)
        if start.startswith("random:"):
            try:
                seed = int(start.split(":", 1)[1])
            except ValueError:
                raise PreconditionError(f"bad start {start!r}", start=start) from None
            rng = Xorshift64Star(seed)
            return Routing(
                choice=tuple(rng.choice(strategy_paths(inst, i, path_cap)) for i in range(inst.player_count))
            )
        raise PreconditionError(f"unknown start {start!r}; use lexfirst or random:SEED", start=start)

    def brd(
        self,
        inst: Instance,
        schedule: Optional[Schedule] = None,
        max_steps: Optional[int] = None,
        start: str = "lexfirst",
        seed: Optional[int] = None,
    ) -> tuple[RunReport, BrdTrace]:
        dynamics = self.config.dynamics
        schedule = schedule or dynamics.schedule
        max_steps = max_steps or dynamics.max_steps
        seed = dynamics.seed if seed is None else seed
        holder: dict[str, BrdTrace] = {}

        def compute() -> dict[str, Any]:
            trace = run_brd(inst, self.start_routing(inst, start), schedule, max_steps, seed)
            holder["trace"] = trace
            return {
                "schedule": schedule.value,
                "start": start,
                "converged": trace.converged,
                "steps": trace.step_count,
                "initial_potential": trace.initial_potential,
                "final_potential": potential(inst, trace.final),
                "final_social_cost": social_cost(inst, trace.final),
                "final": _paths(trace.final),
                "trace": [
                    {
                        "step": step.step_index,
                        "player": step.player_id,
                        "old_path": list(step.old_path.edge_seq),
                        "new_path": list(step.new_path.edge_seq),
                        "old_cost": step.old_cost.value,
                        "new_cost": step.new_cost.value,
                        "potential": step.potential_after,
                    }
                    for step in trace.steps
                ],
            }

        report = self._report(inst, compute, seed)
        return report, holder["trace"]

    def verify(self, inst: Instance, routing: Routing) -> RunReport:
        def compute() -> dict[str, Any]:
            ok, improving = is_nash(inst, routing)
            costs = [player_cost(inst, routing, i) for i in range(inst.player_count)]
            return {
                "nash": ok,
                "improving": [{"player": i, "path": list(path.edge_seq)} for i, path in improving],
                "player_costs": [cost.value for cost in costs],
                "congestion": list(congestion(inst, routing).counts),
                "social_cost": social_cost(inst, routing),
                "potential": potential(inst, routing),
            }

        return self._report(inst, compute)

    # --- optimum and equilibria --------------------------------------------

    def optimal(self, inst: Instance) -> RunReport:
        budgets = self.config.budgets

        def compute() -> dict[str, Any]:
            result = min_bottleneck_routing(inst, budgets.search_node_cap, budgets.path_cap)
            payload = result.model_dump(mode="json", exclude={"witness"})
            payload["witness"] = _paths(result.witness)
            return payload

        return self._report(inst, compute)

    def enumerate(self, inst: Instance, profile_cap: Optional[int] = None) -> RunReport:
        budgets = self.config.budgets

        def compute() -> dict[str, Any]:
            found = enumerate_nash(
                inst, profile_cap or budgets.profile_cap, self.config.workers, budgets.path_cap
            )
            return {
                "nash_count": len(found.routings),
                "routings": [_paths(r) for r in found.routings],
                "truncated": found.truncated,
                "profiles_scanned": found.profiles_scanned,
                "profile_space": found.profile_space,
            }

        return self._report(inst, compute)

    def poa(self, inst: Instance) -> tuple[RunReport, EquilibriaReport]:
        budgets = self.config.budgets
        holder: dict[str, EquilibriaReport] = {}

        def compute() -> dict[str, Any]:
            report = measure_poa(
                inst, budgets.profile_cap, self.config.workers, budgets.search_node_cap, budgets.path_cap
            )
            holder["report"] = report
            payload = report.model_dump(mode="json", exclude={"nash_routings"})
            payload["nash_routings"] = [_paths(r) for r in report.nash_routings]
            return payload

        return self._report(inst, compute), holder["report"]

    # --- chain analysis ------------------------------------------------------

    def nash_routing(self, inst: Instance, routing: Optional[Routing]) -> Routing:
        """The given routing, or the end point of dynamics from the lexfirst profile."""
        if routing is not None:
            return routing
        trace = run_brd(inst, self.start_routing(inst, "lexfirst"), max_steps=self.config.dynamics.max_steps)
        if not trace.converged:
            raise PreconditionError("dynamics did not reach a Nash routing; pass one explicitly")
        return trace.final

    def root_players(self, inst: Instance, nash: Routing, root: str) -> list[int]:
        """'top-cost' (lowest id among the costliest players) or a comma list of ids."""
        if root == "top-cost":
            costs = [player_cost(inst, nash, i) for i in range(inst.player_count)]
            if not costs:
                raise PreconditionError("instance has no players to root a chain at")
            top = max(costs)
            return [costs.index(top)]
        try:
            return [int(part) for part in root.split(",") if part.strip()]
        except ValueError:
            raise PreconditionError(f"bad root {root!r}", root=root) from None

    def chain(
        self,
        inst: Instance,
        nash: Optional[Routing] = None,
        opt: Optional[Routing] = None,
        root: str = "top-cost",
        support: SupportMode = SupportMode.GREEDY,
    ) -> tuple[RunReport, ChainReport]:
        budgets = self.config.budgets
        holder: dict[str, ChainReport] = {}

        def compute() -> dict[str, Any]:
            equilibrium = self.nash_routing(inst, nash)
            optimum = opt or min_bottleneck_routing(inst, budgets.search_node_cap, budgets.path_cap).witness
            report = build_expansion_chain(
                inst,
                equilibrium,
                optimum,
                self.root_players(inst, equilibrium, root),
                support,
                budgets.support_subset_cap,
            )
            holder["chain"] = report
            payload = report.model_dump(mode="json")
            payload["depth"] = report.depth
            payload["nash"] = _paths(equilibrium)
            payload["opt"] = _paths(optimum)
            return payload

        return self._report(inst, compute), holder["chain"]

    def classify(
        self, inst: Instance, nash: Optional[Routing] = None
    ) -> tuple[RunReport, StageClassification]:
        budgets = self.config.budgets
        holder: dict[str, StageClassification] = {}

        def compute() -> dict[str, Any]:
            equilibrium = self.nash_routing(inst, nash)
            optimum = min_bottleneck_routing(inst, budgets.search_node_cap, budgets.path_cap)
            classification = classify_stages(inst, equilibrium, optimum.l_star_ceil)
            holder["classification"] = classification
            early = early_stage_check(inst, equilibrium, optimum.witness, budgets.support_subset_cap)
            return {
                "classification": classification.model_dump(mode="json"),
                "early_stage_check": early.model_dump(mode="json"),
                "nash": _paths(equilibrium),
            }

        return self._report(inst, compute), holder["classification"]

    # --- experiments -----------------------------------------------------------

    def sweep(self, family: Family, values: list[int], models: list[CostModel], links: int = 2) -> list[dict[str, Any]]:
        """measure_poa over a family range, one row per (value, model), in input order."""
        specs = []
        for value in values:
            for model in models:
                if family is Family.COUNTEREXAMPLE:
                    specs.append(self.gen_spec(family=family, k=value, cost_model=model))
                elif family is Family.PARALLEL:
                    specs.append(self.gen_spec(family=family, players=value, links=links, cost_model=model))
                else:
                    raise PreconditionError(f"sweep supports counterexample and parallel, not {family.value}")
        tasks = [(spec, self.config) for spec in specs]
        logger.info("Sweep: %d instances over %d workers", len(tasks), self.config.workers)
        if self.config.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                return list(pool.map(_sweep_task, tasks))
        return [_sweep_task(task) for task in tasks]
