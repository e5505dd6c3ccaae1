"""Routing game R = (G, N, P): players, strategies, cost models, routings."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import InvalidInstanceError, InvalidPathError, InvalidPlayerError
from .graph import Graph, Path


class CostVariant(str, Enum):
    """Player utility variants."""

    BOTTLENECK_MAX = "bottleneck"
    EXP_SUM = "expsum"
    LOG_EXP_SUM = "logexpsum"
    LINEAR_SUM = "linear"
    POLY_SUM = "poly"


class CostModel(BaseModel):
    """Selector for the player cost; `degree` only applies to PolySum."""

    model_config = ConfigDict(frozen=True)

    variant: CostVariant
    degree: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _degree_matches_variant(self) -> "CostModel":
        if self.variant is CostVariant.POLY_SUM and self.degree is None:
            raise InvalidInstanceError("poly cost model requires a degree")
        if self.variant is not CostVariant.POLY_SUM and self.degree is not None:
            raise InvalidInstanceError(f"degree is only valid for poly, not {self.variant.value}")
        return self

    @classmethod
    def bottleneck(cls) -> "CostModel":
        return cls(variant=CostVariant.BOTTLENECK_MAX)

    @classmethod
    def expsum(cls) -> "CostModel":
        return cls(variant=CostVariant.EXP_SUM)

    @classmethod
    def logexpsum(cls) -> "CostModel":
        return cls(variant=CostVariant.LOG_EXP_SUM)

    @classmethod
    def linear(cls) -> "CostModel":
        return cls(variant=CostVariant.LINEAR_SUM)

    @classmethod
    def poly(cls, degree: int) -> "CostModel":
        return cls(variant=CostVariant.POLY_SUM, degree=degree)

    @property
    def is_additive(self) -> bool:
        return self.variant is not CostVariant.BOTTLENECK_MAX

    @property
    def is_exponential(self) -> bool:
        return self.variant in (CostVariant.EXP_SUM, CostVariant.LOG_EXP_SUM)

    def edge_term(self, congestion: int) -> int:
        """Contribution of one path edge at the given congestion (additive models)."""
        variant = self.variant
        if variant in (CostVariant.EXP_SUM, CostVariant.LOG_EXP_SUM):
            return 1 << congestion
        if variant is CostVariant.LINEAR_SUM:
            return congestion
        if variant is CostVariant.POLY_SUM:
            return congestion ** self.degree
        raise InvalidInstanceError("bottleneck cost is not additive")

    def label(self) -> str:
        if self.variant is CostVariant.POLY_SUM:
            return f"poly{self.degree}"
        return self.variant.value

    @classmethod
    def from_label(cls, label: str) -> "CostModel":
        """Inverse of label(): 'expsum', 'linear', 'poly3', ..."""
        text = label.strip().lower()
        if text.startswith("poly") and text[4:].isdigit():
            return cls.poly(int(text[4:]))
        try:
            return cls(variant=CostVariant(text))
        except ValueError:
            raise InvalidInstanceError(f"unknown cost model {label!r}", cost_model=label) from None


@dataclass(frozen=True, order=True)
class ExactCost:
    """
    Exact player cost. Ordering always uses the integer `value`; for
    LogExpSum `value` is the underlying exponential sum and `reported`
    is its base-2 logarithm, so comparisons never round.
    """

    value: int
    log_scale: bool = field(default=False, compare=False)

    @property
    def reported(self) -> int | float:
        if self.log_scale:
            return math.log2(self.value) if self.value > 0 else float("-inf")
        return self.value


class ExplicitPaths(BaseModel):
    """Strategy set given as an explicit, nonempty list of paths."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["explicit"] = "explicit"
    paths: tuple[Path, ...] = Field(..., min_length=1)


class AllPaths(BaseModel):
    """Every node-simple source-destination path with at most `max_len` edges."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["all_paths"] = "all_paths"
    max_len: int = Field(..., ge=1)


Strategies = Annotated[Union[ExplicitPaths, AllPaths], Field(discriminator="kind")]


class Player(BaseModel):
    """A player pi_i routing one unit from source u_i to destination v_i."""

    model_config = ConfigDict(frozen=True)

    player_id: int = Field(..., ge=0)
    source: int = Field(..., ge=0)
    destination: int = Field(..., ge=0)
    strategies: Strategies


class Instance(BaseModel):
    """A routing game instance over an immutable graph."""

    model_config = ConfigDict(frozen=True)

    graph: Graph
    players: tuple[Player, ...] = Field(default_factory=tuple)
    cost_model: CostModel

    @model_validator(mode="after")
    def _validate_players(self) -> "Instance":
        from ..engine.graph_core import hop_distance, validate_path

        graph = self.graph
        for idx, player in enumerate(self.players):
            if player.player_id != idx:
                raise InvalidInstanceError(
                    f"player ids must be dense in [0, {len(self.players)})",
                    player_id=player.player_id,
                )
            if not graph.has_node(player.source) or not graph.has_node(player.destination):
                raise InvalidPlayerError(f"player {idx} has an endpoint outside the graph", player_id=idx)
            if player.source == player.destination:
                raise InvalidPlayerError(f"player {idx} has source equal to destination", player_id=idx)
            strategies = player.strategies
            if isinstance(strategies, ExplicitPaths):
                for path in strategies.paths:
                    if path.source != player.source or path.destination != player.destination:
                        raise InvalidPathError(
                            f"strategy path of player {idx} does not connect its endpoints",
                            player_id=idx,
                            edge_seq=list(path.edge_seq),
                        )
                    if not validate_path(graph, path):
                        raise InvalidPathError(
                            f"strategy path of player {idx} is not a valid path",
                            player_id=idx,
                            edge_seq=list(path.edge_seq),
                        )
            else:
                distance = hop_distance(graph, player.source, player.destination)
                if distance is None or distance > strategies.max_len:
                    raise InvalidPlayerError(
                        f"player {idx} has no path of length <= {strategies.max_len}",
                        player_id=idx,
                    )
        return self

    @property
    def player_count(self) -> int:
        return len(self.players)

    @property
    def max_path_length(self) -> int:
        """L(P): longest path length over all strategy sets."""
        longest = 0
        for player in self.players:
            strategies = player.strategies
            if isinstance(strategies, ExplicitPaths):
                longest = max(longest, max(len(p) for p in strategies.paths))
            else:
                longest = max(longest, strategies.max_len)
        return longest

    def with_cost_model(self, cost_model: CostModel) -> "Instance":
        return Instance(graph=self.graph, players=self.players, cost_model=cost_model)


class Routing(BaseModel):
    """A pure strategy profile: one path per player, indexed by player id."""

    model_config = ConfigDict(frozen=True)

    choice: tuple[Path, ...] = Field(default_factory=tuple)

    def __getitem__(self, player_id: int) -> Path:
        return self.choice[player_id]

    def replace(self, player_id: int, path: Path) -> "Routing":
        """(p'_i; p_-i)"""
        choice = list(self.choice)
        choice[player_id] = path
        return Routing(choice=tuple(choice))


class CongestionMap(BaseModel):
    """Per-edge congestion C_e indexed by edge id."""

    model_config = ConfigDict(frozen=True)

    counts: tuple[int, ...] = Field(default_factory=tuple)

    def __getitem__(self, edge_id: int) -> int:
        return self.counts[edge_id]

    def max(self) -> int:
        return max(self.counts, default=0)

    def total(self) -> int:
        return sum(self.counts)
