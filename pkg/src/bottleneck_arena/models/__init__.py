"""Data models for bottleneck routing games."""

from .graph import Edge, Graph, Path
from .game import (
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
from .reports import (
    BrdStep,
    BrdTrace,
    ChainReport,
    ChainStage,
    EarlyStageCheck,
    EquilibriaReport,
    NashEnumeration,
    OptimalResult,
    PlayerStage,
    PlayerType,
    RunReport,
    Schedule,
    StageClassification,
    SupportMode,
)

__all__ = [
    "Edge",
    "Graph",
    "Path",
    "AllPaths",
    "CongestionMap",
    "CostModel",
    "CostVariant",
    "ExactCost",
    "ExplicitPaths",
    "Instance",
    "Player",
    "Routing",
    "BrdStep",
    "BrdTrace",
    "ChainReport",
    "ChainStage",
    "EarlyStageCheck",
    "EquilibriaReport",
    "NashEnumeration",
    "OptimalResult",
    "PlayerStage",
    "PlayerType",
    "RunReport",
    "Schedule",
    "StageClassification",
    "SupportMode",
]
