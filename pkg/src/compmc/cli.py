"""Command-line pipeline: ingest, forecast, simulate, rules, report.

Every command writes into ``--out-dir`` and leaves a ``manifest.<command>.json``
recording the inputs' digest, seed and tool version. All other outputs are a
pure function of the inputs and the seed, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import CompMCError, ConfigError, DataError
from .forecast import DEFAULT_CANDIDATES, forecast_series, save_model
from .fri import (
    DEFAULT_DISPLAY_THRESHOLD,
    annotate_and_filter,
    fit_fuzzy_model,
    write_rules,
    write_rules_json,
)
from .ingest import (
    DEFAULT_CORRELATION_THRESHOLD,
    DEFAULT_LAG,
    correlation_filter,
    is_rate_series,
    lag_embed_joint,
    load_csv,
)
from .inflection import TrendWeights, label_series, write_labeled_csv, write_scores_csv
from .simulate import load_config, run_simulation, sensitivity_chart
from .simulate.io import (
    report_dict,
    write_histogram_csv,
    write_json,
    write_sensitivity_csv,
    write_trials_csv,
)
from .simulate.sensitivity import SensitivityEntry

logger = logging.getLogger("compmc")

DEFAULT_SEED = 42
DEFAULT_HORIZON = 14

OUTPUTS = {
    "ingest": ("ingest_summary.json", "labeled.csv", "inflection_scores.csv"),
    "forecast": ("forecasts.csv", "ranking.csv"),
    "simulate": ("report.json", "trials.csv", "histogram.csv", "sensitivity.csv"),
    "rules": ("rules.txt", "rules.json"),
    "report": ("report.md",),
}


def packaged(name: str) -> Path:
    return Path(str(resources.files("compmc") / "data" / name))


def _digest(args: argparse.Namespace, files: Sequence[Path]) -> str:
    h = hashlib.sha256()
    # paths and verbosity do not change results; file contents are hashed below
    skip = ("func", "verbose", "out_dir", "input", "config", "forecasts", "labeled", "sensitivity")
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    h.update(json.dumps(params, sort_keys=True, default=str).encode())
    for f in files:
        h.update(f.name.encode())
        h.update(f.read_bytes())
    return h.hexdigest()


def _stable_manifest(command: str, args, files: Sequence[Path]) -> dict:
    """Manifest fields that do not change between identical runs."""
    return {
        "command": command,
        "config_digest": _digest(args, files),
        "seed": args.seed,
        "version": __version__,
        "inputs": [f.name for f in files],
    }


def _now() -> datetime:
    # SOURCE_DATE_EPOCH pins the clock so whole output trees can be compared byte for byte
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), timezone.utc)
    return datetime.now(timezone.utc)


def _write_manifest(out: Path, manifest: dict, started: datetime) -> None:
    doc = dict(manifest)
    doc["started_at"] = started.isoformat(timespec="seconds")
    doc["finished_at"] = _now().isoformat(timespec="seconds")
    doc["outputs"] = list(OUTPUTS[manifest["command"]])
    write_json(out / f"manifest.{manifest['command']}.json", doc)


def _require(path: Path) -> Path:
    if not path.is_file():
        raise DataError(f"missing input file {path}")
    return path


def _input_csv(args) -> Path:
    return _require(Path(args.input)) if args.input else packaged("synthetic_cdcp.csv")


# ---------------------------------------------------------------- ingest

def cmd_ingest(args) -> dict:
    out = Path(args.out_dir)
    src = _input_csv(args)
    series = load_csv(src)
    weights = TrendWeights(*args.weights)
    data, scores = label_series(series, weights)
    write_labeled_csv(out / "labeled.csv", data)
    write_scores_csv(out / "inflection_scores.csv", scores)

    names = list(series)
    first = series[names[0]]
    summary = {
        "manifest": _stable_manifest("ingest", args, [src]),
        "source": src.name,
        "days": len(first),
        "first_date": first.dates[0].isoformat(),
        "last_date": first.dates[-1].isoformat(),
        "series": names,
        "labeled_rows": len(data),
        "win_rows": int(data.y.sum()),
        "weights": [weights.w1, weights.w2, weights.w3],
    }
    if args.target:
        if args.target not in series:
            raise ConfigError(f"--target {args.target!r} is not a column of {src.name}")
        joint = lag_embed_joint([series[n] for n in names], args.target, args.lag)
        kept = correlation_filter(joint, args.threshold)
        summary["feature_selection"] = {
            "target": args.target,
            "lag": args.lag,
            "threshold": args.threshold,
            "kept": list(kept.feature_names),
            "dropped": [n for n in joint.feature_names if n not in kept.feature_names],
        }
    write_json(out / "ingest_summary.json", summary)
    return summary["manifest"]


# -------------------------------------------------------------- forecast

def _clip_forecast(name: str, values: Sequence[float]) -> list[float]:
    hi = 100.0 if is_rate_series(name) else math.inf
    clipped = [min(max(v, 0.0), hi) for v in values]
    if clipped != list(values):
        logger.warning("forecast of %s clipped to its valid range", name)
    return clipped


def cmd_forecast(args) -> dict:
    if args.horizon < 1:
        raise ConfigError(f"--horizon must be >= 1, got {args.horizon}")
    if args.lag < 1:
        raise ConfigError(f"--lag must be >= 1, got {args.lag}")
    out = Path(args.out_dir)
    src = _input_csv(args)
    series = load_csv(src)
    names = args.series.split(",") if args.series else list(series)
    for n in names:
        if n not in series:
            raise ConfigError(f"--series names unknown column {n!r}")
    (out / "models").mkdir(parents=True, exist_ok=True)

    columns: dict[str, list[float]] = {}
    ranking_rows = []
    for n in names:
        fc = forecast_series(series[n], args.horizon, args.lag, args.model, DEFAULT_CANDIDATES)
        columns[n] = _clip_forecast(n, fc.result.values)
        save_model(fc.model, out / "models" / f"{n}.json")
        for entry in fc.selection.ranking:
            ranking_rows.append(
                [n, entry.rank, entry.id, repr(entry.score), fc.selection.metric,
                 int(entry.id == fc.selection.winner), ""]
            )
        for cid, err in fc.selection.failures.items():
            ranking_rows.append([n, "", cid, "", fc.selection.metric, 0, err])

    last = series[names[0]].dates[-1]
    with (out / "forecasts.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["day", "date", *names])
        for d in range(args.horizon):
            day = last.fromordinal(last.toordinal() + d + 1)
            w.writerow([d + 1, day.isoformat(), *(repr(columns[n][d]) for n in names)])
    with (out / "ranking.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["series", "rank", "candidate", "score", "metric", "winner", "error"])
        w.writerows(ranking_rows)
    return _stable_manifest("forecast", args, [src])


def read_forecasts(path: Path) -> dict[str, list[float]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        names = [c for c in reader.fieldnames or [] if c not in ("day", "date")]
        cols: dict[str, list[float]] = {n: [] for n in names}
        for row in reader:
            for n in names:
                try:
                    cols[n].append(float(row[n]))
                except ValueError:
                    raise DataError(f"{path.name} line {reader.line_num}: bad value for {n}") from None
    return cols


# -------------------------------------------------------------- simulate

def cmd_simulate(args) -> dict:
    out = Path(args.out_dir)
    cfg = _require(Path(args.config)) if args.config else packaged("sim_config.json")
    fc_path = Path(args.forecasts) if args.forecasts else out / "forecasts.csv"
    files = [cfg]
    forecasts = None
    if fc_path.is_file():
        forecasts = read_forecasts(fc_path)
        files.append(fc_path)
    elif args.forecasts:
        raise DataError(f"missing input file {fc_path}")
    spec = load_config(
        cfg, forecasts, trials=args.trials, seed=args.seed, horizon=args.horizon,
        levels=args.levels,
    )
    trials, summary = run_simulation(spec, workers=args.workers)
    sens = sensitivity_chart(trials) if spec.trials >= 2 and trials.stochastic else []
    manifest = _stable_manifest("simulate", args, files)
    write_json(out / "report.json", report_dict(spec, summary, sens, trials, manifest))
    write_trials_csv(out / "trials.csv", trials)
    write_histogram_csv(out / "histogram.csv", summary)
    write_sensitivity_csv(out / "sensitivity.csv", sens)
    return manifest


def read_sensitivity(path: Path) -> list[SensitivityEntry]:
    with path.open(newline="", encoding="utf-8") as fh:
        return [
            SensitivityEntry(
                row["variable"], int(row["day"]), float(row["rank_correlation"]),
                float(row["contribution_pct"]), bool(int(row["constant"])),
            )
            for row in csv.DictReader(fh)
        ]


def read_labeled(path: Path):
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DataError(f"{path.name} is empty")
        start = 1 if header[0] == "date" else 0
        names, target = header[start:-1], header[-1]
        X, y = [], []
        for row in reader:
            try:
                X.append([float(v) for v in row[start:-1]])
                y.append(int(float(row[-1])))
            except (ValueError, IndexError):
                raise DataError(f"{path.name} line {reader.line_num}: malformed row") from None
    return np.asarray(X, dtype=float).reshape(len(y), len(names)), y, names, target


# ----------------------------------------------------------------- rules

def cmd_rules(args) -> dict:
    out = Path(args.out_dir)
    lab = _require(Path(args.labeled) if args.labeled else out / "labeled.csv")
    X, y, names, target = read_labeled(lab)
    files = [lab]
    sens_path = Path(args.sensitivity) if args.sensitivity else out / "sensitivity.csv"
    sens = []
    if sens_path.is_file():
        sens = read_sensitivity(sens_path)
        files.append(sens_path)
    elif args.sensitivity:
        raise DataError(f"missing input file {sens_path}")
    model, _ = fit_fuzzy_model(X, y, names, args.prune_fraction, args.split)
    shown = annotate_and_filter(model.rules, sens, args.threshold)
    if not shown:
        logger.warning("no rule reaches CF %.2f; listing is empty", args.threshold)
    write_rules(out / "rules.txt", shown, target)
    manifest = _stable_manifest("rules", args, files)
    write_rules_json(out / "rules.json", shown, model, target)
    doc = json.loads((out / "rules.json").read_text(encoding="utf-8"))
    doc["manifest"] = manifest
    doc["threshold"] = args.threshold
    (out / "rules.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


# ---------------------------------------------------------------- report

def _table(header: Sequence[str], rows) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return lines


def _read_rows(path: Path) -> list[dict]:
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def cmd_report(args) -> dict:
    out = Path(args.out_dir)
    needed = [
        out / "ingest_summary.json", out / "inflection_scores.csv", out / "forecasts.csv",
        out / "ranking.csv", out / "report.json", out / "trials.csv", out / "histogram.csv",
        out / "sensitivity.csv", out / "rules.txt",
    ]
    for p in needed:
        _require(p)
    ingest = json.loads(needed[0].read_text(encoding="utf-8"))
    sim = json.loads(needed[4].read_text(encoding="utf-8"))
    s = sim["summary"]

    lines = ["# Pipeline report", ""]
    lines += [f"Source `{ingest['source']}`: {ingest['days']} days, "
              f"{ingest['first_date']} to {ingest['last_date']}.", ""]

    lines += ["## Forecasts", ""]
    lines += _table(
        ["series", "rank", "candidate", "score", "metric", "winner"],
        [[r["series"], r["rank"], r["candidate"], r["score"], r["metric"], r["winner"]]
         for r in _read_rows(needed[3])],
    )
    fc = _read_rows(needed[2])
    lines += ["", "Forecast values:", ""]
    lines += _table(list(fc[0].keys()), [list(r.values()) for r in fc])

    lines += ["", "## Simulation", ""]
    lines += [f"Model `{sim['model']}`, {sim['trials']} trials, horizon {sim['horizon']} days, seed {sim['seed']}.", ""]
    lines += _table(["mean", "median", "stdev", "min", "max"],
                    [[s["mean"], s["median"], s["stdev"], s["min"], s["max"]]])
    lines += ["", "Certainty intervals:", ""]
    lines += _table(["level", "low", "high"],
                    [[c["level"], c["low"], c["high"]] for c in s["certainty_intervals"]])
    lines += ["", "Sensitivity chart (rank, value):", ""]
    lines += _table(["rank", "variable", "day", "contribution_pct"],
                    [[r["rank"], r["variable"], r["day"], r["contribution_pct"]]
                     for r in _read_rows(needed[7])])

    lines += ["", "## Rules", ""]
    rules = needed[8].read_text(encoding="utf-8").splitlines()
    lines += [f"    {r}" for r in rules] or ["(no rule reaches the display threshold)"]

    lines += ["", "## Inflection curves", ""]
    lines += _table(["date", "win_score", "lose_score", "label"],
                    [[r["date"], r["win_score"], r["lose_score"], r["label"]]
                     for r in _read_rows(needed[1])])
    (out / "report.md").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return _stable_manifest("report", args, needed)


# ------------------------------------------------------------------ main

def _level(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"level must be in (0, 1], got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default 42)")
    common.add_argument("--out-dir", default="out", help="output directory (default ./out)")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    p = argparse.ArgumentParser(prog="compmc", parents=[common], description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("ingest", parents=[common], help="validate data and build the labelled dataset")
    q.add_argument("--input", help="daily CSV (default: packaged synthetic data)")
    q.add_argument("--lag", type=int, default=DEFAULT_LAG)
    q.add_argument("--target", default="ndic", help="series for correlation-based feature selection ('' to skip)")
    q.add_argument("--threshold", type=float, default=DEFAULT_CORRELATION_THRESHOLD)
    q.add_argument("--weights", type=float, nargs=3, default=(0.1, 0.15, 0.25), metavar=("W1", "W2", "W3"))
    q.set_defaults(func=cmd_ingest)

    q = sub.add_parser("forecast", parents=[common], help="select forecasters and forecast each series")
    q.add_argument("--input", help="daily CSV (default: packaged synthetic data)")
    q.add_argument("--model", choices=("grooms", "pnn", "linreg"), default="grooms")
    q.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    q.add_argument("--lag", type=int, default=DEFAULT_LAG)
    q.add_argument("--series", help="comma-separated columns to forecast (default: all)")
    q.set_defaults(func=cmd_forecast)

    q = sub.add_parser("simulate", parents=[common], help="run the Monte Carlo cost model")
    q.add_argument("--config", help="simulation config JSON (default: packaged config)")
    q.add_argument("--forecasts", help="forecasts CSV (default: <out-dir>/forecasts.csv if present)")
    q.add_argument("--trials", type=int)
    q.add_argument("--horizon", type=int)
    q.add_argument("--levels", type=_level, nargs="+", help="extra certainty levels")
    q.add_argument("--workers", type=int, default=1)
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("rules", parents=[common], help="induce, annotate and list fuzzy rules")
    q.add_argument("--labeled", help="labelled CSV (default: <out-dir>/labeled.csv)")
    q.add_argument("--sensitivity", help="sensitivity CSV (default: <out-dir>/sensitivity.csv if present)")
    q.add_argument("--threshold", type=float, default=DEFAULT_DISPLAY_THRESHOLD)
    q.add_argument("--prune-fraction", type=float, default=1.0 / 3.0)
    q.add_argument("--split", choices=("chronological", "interleaved"), default="chronological")
    q.set_defaults(func=cmd_rules)

    q = sub.add_parser("report", parents=[common], help="combine all stage outputs into report.md")
    q.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    started = _now()
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        manifest = args.func(args)
    except CompMCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code
    _write_manifest(out, manifest, started)
    return 0


if __name__ == "__main__":
    sys.exit(main())
