"""Result models produced by the engine and serialized by the workbench."""

from enum import Enum
from fractions import Fraction
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from .game import ExactCost, Routing
from .graph import Path


class Schedule(str, Enum):
    """Which player performs the next greedy move."""

    ROUND_ROBIN = "round-robin"
    MAX_GAIN = "max-gain"
    RANDOM = "random"


class SupportMode(str, Enum):
    GREEDY = "greedy"
    EXACT = "exact"


class PlayerType(str, Enum):
    A = "A"
    B = "B"
    D = "D"


class BrdStep(BaseModel):
    """One greedy move."""

    model_config = ConfigDict(frozen=True)

    step_index: int = Field(..., ge=0)
    player_id: int = Field(..., ge=0)
    old_path: Path
    new_path: Path
    old_cost: ExactCost
    new_cost: ExactCost
    potential_after: int


class BrdTrace(BaseModel):
    """Best response dynamics run; potential_after decreases strictly under ExpSum."""

    model_config = ConfigDict(frozen=True)

    schedule: Schedule
    initial_potential: int
    steps: tuple[BrdStep, ...] = Field(default_factory=tuple)
    converged: bool
    final: Routing

    @property
    def step_count(self) -> int:
        return len(self.steps)


class OptimalResult(BaseModel):
    """Coordinated optimum C* with its canonical witness p*."""

    model_config = ConfigDict(frozen=True)

    c_star: int = Field(..., ge=1)
    witness: Routing
    longest_path: int = Field(..., ge=1, description="L*, longest path length in the witness")
    l_star: float = Field(..., ge=0, description="log2(L*)")
    l_star_ceil: int = Field(..., ge=0, description="ceil(log2(L*)), used for stage typing")
    l1_star: Optional[float] = Field(default=None, description="log2(L* - 1); absent when L* = 1")
    nodes_explored: int = Field(0, ge=0)


class NashEnumeration(BaseModel):
    """Pure Nash routings found by scanning the strategy-profile product."""

    model_config = ConfigDict(frozen=True)

    routings: tuple[Routing, ...] = Field(default_factory=tuple)
    truncated: bool = False
    profiles_scanned: int = Field(0, ge=0)
    profile_space: int = Field(0, ge=0)


class EquilibriaReport(BaseModel):
    """Worst/best Nash social cost against C*, with the log(L)*log(|E|) reference value."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nash_routings: tuple[Routing, ...] = Field(default_factory=tuple)
    nash_count: int = Field(0, ge=0)
    worst_nash_cost: Optional[int] = None
    best_nash_cost: Optional[int] = None
    c_star: int = Field(..., ge=1)
    poa: Optional[Fraction] = None
    pos: Optional[Fraction] = None
    truncated: bool = False
    max_path_length: int = Field(..., ge=0)
    edge_count: int = Field(..., ge=0)
    bound_value: float
    bound_ratio: Optional[float] = None

    @field_serializer("poa", "pos")
    def _ratio_text(self, value: Optional[Fraction]) -> Optional[str]:
        return None if value is None else str(value)


class ChainStage(BaseModel):
    """One chain element: players sharing a cost band."""

    model_config = ConfigDict(frozen=True)

    position: int = Field(..., ge=1)
    band_stage: int = Field(..., ge=0, description="0 marks players below every band")
    players: tuple[int, ...]
    cost_low: int
    cost_high: int
    support_edges_used: tuple[int, ...] = Field(default_factory=tuple)


class ChainReport(BaseModel):
    """Expansion chain grown from a root set until self-sufficient."""

    model_config = ConfigDict(frozen=True)

    root: tuple[int, ...]
    stages: tuple[ChainStage, ...]
    expansions: tuple[tuple[int, ...], ...] = Field(
        default_factory=tuple, description="support sets in discovery order"
    )
    self_sufficient_at: int = Field(..., ge=1)
    dropped: tuple[int, ...] = Field(default_factory=tuple)
    c_hat: int = Field(..., ge=0)
    l_star: int = Field(..., ge=0)

    @property
    def depth(self) -> int:
        return len(self.stages)

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(sorted(p for stage in self.stages for p in stage.players))


class PlayerStage(BaseModel):
    model_config = ConfigDict(frozen=True)

    player_id: int
    cost: int
    stage: int = Field(..., ge=0)
    player_type: Optional[PlayerType] = None
    flagged: bool = False


class StageClassification(BaseModel):
    """Stage and A/B/D type of every player of a Nash routing."""

    model_config = ConfigDict(frozen=True)

    players: tuple[PlayerStage, ...]
    c_hat: int = Field(..., ge=0)
    l_star: int = Field(..., ge=0)
    untyped: tuple[int, ...] = Field(default_factory=tuple)
    flagged: tuple[int, ...] = Field(default_factory=tuple)

    def stage_members(self, stage: int) -> tuple[int, ...]:
        return tuple(p.player_id for p in self.players if p.stage == stage)


class EarlyStageCheck(BaseModel):
    """Observation of whether early-stage player sets are self-sufficient."""

    model_config = ConfigDict(frozen=True)

    status: Literal["exercised", "not-exercised"]
    c_star: int
    c_hat: int
    l1_star: Optional[float] = None
    threshold_stage: Optional[int] = None
    checked_sets: int = 0
    self_sufficient_sets: tuple[tuple[int, ...], ...] = Field(default_factory=tuple)
    reason: str = ""


class RunReport(BaseModel):
    """Envelope for every CLI result; timing stays out unless requested."""

    model_config = ConfigDict(frozen=True)

    command: tuple[str, ...]
    instance_digest: Optional[str] = None
    seed: Optional[int] = None
    timing: Optional[float] = None
    payload: dict[str, Any] = Field(default_factory=dict)
