"""Result tables built from episode rows."""

from typing import Any, Dict, List, Sequence

import pandas as pd

from ..scenario.config import CASE_LABELS

RESULTS_COLUMNS = [
    "case",
    "avoidable_collisions",
    "mean_basic",
    "sem_basic",
    "mean_sudden",
    "sem_sudden",
    "mean_reward",
    "sem_reward",
]
SWEEP_COLUMNS = ["case", "interval", "avoidable_collisions", "mean_reward", "sem_reward"]
EPISODE_COLUMNS = [
    "episode_index",
    "environment",
    "family",
    "case",
    "policy",
    "interval",
    "seed",
    "outcome",
    "steps",
    "basic_changes",
    "sudden_changes",
    "reward",
    "avoidable",
]


def episodes_frame(rows: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    """One row per episode, without the delegation trace."""
    return pd.DataFrame([{k: row.get(k) for k in EPISODE_COLUMNS} for row in rows], columns=EPISODE_COLUMNS)


def _sem(values: pd.Series) -> float:
    if len(values) < 2:
        return 0.0
    return float(values.sem())


def _ordered_cases(frame: pd.DataFrame) -> List[str]:
    present = list(dict.fromkeys(frame["case"]))
    return [c for c in CASE_LABELS if c in present] + [c for c in present if c not in CASE_LABELS]


def summarize_cases(rows: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    """Per case: avoidable collisions and mean/stderr of basic changes, sudden changes and reward."""
    frame = episodes_frame(rows)
    out = []
    for case in _ordered_cases(frame):
        group = frame[frame["case"] == case]
        out.append(
            {
                "case": case,
                "avoidable_collisions": int(group["avoidable"].astype(bool).sum()),
                "mean_basic": float(group["basic_changes"].mean()),
                "sem_basic": _sem(group["basic_changes"]),
                "mean_sudden": float(group["sudden_changes"].mean()),
                "sem_sudden": _sem(group["sudden_changes"]),
                "mean_reward": float(group["reward"].mean()),
                "sem_reward": _sem(group["reward"]),
            }
        )
    return pd.DataFrame(out, columns=RESULTS_COLUMNS)


def summarize_sweep(rows: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    """Per (case, interval): avoidable collisions and mean/stderr reward."""
    frame = episodes_frame(rows)
    out = []
    for case in _ordered_cases(frame):
        by_case = frame[frame["case"] == case]
        for interval in sorted(by_case["interval"].dropna().unique()):
            group = by_case[by_case["interval"] == interval]
            out.append(
                {
                    "case": case,
                    "interval": int(interval),
                    "avoidable_collisions": int(group["avoidable"].astype(bool).sum()),
                    "mean_reward": float(group["reward"].mean()),
                    "sem_reward": _sem(group["reward"]),
                }
            )
    return pd.DataFrame(out, columns=SWEEP_COLUMNS)


def format_results(table: pd.DataFrame) -> str:
    """Console rendering: mean±stderr per metric."""
    if table.empty:
        return "(no episodes)"
    lines = []
    for _, row in table.iterrows():
        lines.append(
            f"{row['case']:>4}  avoidable={int(row['avoidable_collisions']):3d}  "
            f"basic={row['mean_basic']:.1f}±{row['sem_basic']:.1f}  "
            f"sudden={row['mean_sudden']:.1f}±{row['sem_sudden']:.1f}  "
            f"reward={row['mean_reward']:.1f}±{row['sem_reward']:.1f}"
        )
    return "\n".join(lines)
