"""CSV tables for sweeps, dynamics traces, chains and stage classifications."""

import pandas as pd

from ..models.reports import BrdTrace, ChainReport, StageClassification

SWEEP_COLUMNS = [
    "family",
    "k",
    "model",
    "L",
    "E",
    "c_star",
    "worst_nash",
    "best_nash",
    "poa",
    "pos",
    "bound_value",
    "bound_ratio",
    "truncated",
]


def _ids(values) -> str:
    return " ".join(str(v) for v in values)


def sweep_frame(rows: list[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def trace_frame(trace: BrdTrace) -> pd.DataFrame:
    # costs and potentials are exact and can exceed 64 bits, so they stay text
    return pd.DataFrame(
        [
            {
                "step": step.step_index,
                "player": step.player_id,
                "old_path": _ids(step.old_path.edge_seq),
                "new_path": _ids(step.new_path.edge_seq),
                "old_cost": str(step.old_cost.value),
                "new_cost": str(step.new_cost.value),
                "potential": str(step.potential_after),
            }
            for step in trace.steps
        ],
        columns=["step", "player", "old_path", "new_path", "old_cost", "new_cost", "potential"],
    )


def chain_frame(chain: ChainReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "position": stage.position,
                "band_stage": stage.band_stage,
                "players": _ids(stage.players),
                "cost_low": str(stage.cost_low),
                "cost_high": str(stage.cost_high),
                "support_edges_used": _ids(stage.support_edges_used),
            }
            for stage in chain.stages
        ],
        columns=["position", "band_stage", "players", "cost_low", "cost_high", "support_edges_used"],
    )


def classification_frame(classification: StageClassification) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "player": entry.player_id,
                "cost": str(entry.cost),
                "stage": entry.stage,
                "type": entry.player_type.value if entry.player_type else "",
                "flagged": entry.flagged,
            }
            for entry in classification.players
        ],
        columns=["player", "cost", "stage", "type", "flagged"],
    )


def frame_to_csv(frame: pd.DataFrame, float_digits: int = 6) -> str:
    return frame.to_csv(index=False, float_format=f"%.{float_digits}f", lineterminator="\n")
