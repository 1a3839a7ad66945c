"""File outputs of a simulation run."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from .engine import SimulationSpec, TrialMatrix
from .sensitivity import SensitivityEntry
from .summary import OutcomeSummary


def report_dict(
    spec: SimulationSpec,
    summary: OutcomeSummary,
    sensitivity: list[SensitivityEntry],
    trials: TrialMatrix,
    manifest: dict[str, Any] | None = None,
) -> dict:
    return {
        "manifest": manifest or {},
        "model": spec.model,
        "horizon": spec.horizon,
        "trials": spec.trials,
        "seed": spec.seed,
        "summary": summary.to_dict(),
        "note": (
            "One outcome distribution has one mean; certainty levels report "
            "(low, high) bounds only."
        ),
        "clamped_negative_draws": {k: v for k, v in trials.clamped.items() if v},
        "sensitivity": [
            {
                "rank": i,
                "variable": e.variable,
                "day": e.day,
                "rank_correlation": e.rank_correlation,
                "contribution_pct": e.contribution,
                "constant": e.constant,
            }
            for i, e in enumerate(sensitivity, start=1)
        ],
    }


def write_json(path: str | Path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def write_trials_csv(path: str | Path, trials: TrialMatrix) -> None:
    """One row per (trial, day): outcome and every input value used."""
    variables = list(trials.draws)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "day", "outcome", "aborted", *variables])
        cols = [trials.draws[v] for v in variables]
        for t in range(trials.n_trials):
            ab = int(trials.aborted[t])
            for d in range(trials.horizon):
                w.writerow(
                    [t + 1, d + 1, repr(float(trials.outcomes[t, d])), ab,
                     *(repr(float(c[t, d])) for c in cols)]
                )


def write_histogram_csv(path: str | Path, summary: OutcomeSummary) -> None:
    edges = summary.histogram_edges
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in zip(edges, edges[1:], summary.histogram_counts):
            w.writerow([repr(lo), repr(hi), c])


def write_sensitivity_csv(path: str | Path, sensitivity: list[SensitivityEntry]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "variable", "day", "contribution_pct", "rank_correlation", "constant"])
        for i, e in enumerate(sensitivity, start=1):
            w.writerow([i, e.variable, e.day, repr(e.contribution), repr(e.rank_correlation), int(e.constant)])
