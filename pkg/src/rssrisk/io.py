"""CSV and manifest writers.

All CSVs use a fixed column order, ``,`` separators, ``.`` decimals and LF
line endings. Floats go through ``%``-formatting, which ignores the locale.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .experiments import CampaignResult
from .rss_core import RiskBreakdown
from .simulator import ScenarioResult

TRACE_VEHICLE_COLUMNS = ("t", "vehicle_id", "x", "y", "v_x", "v_y", "a_x", "a_y")
PAIR_FIELDS = ("d_lon", "d_lat", "r_lon", "r_lat", "r")
EPISODE_COLUMNS = ("episode_id", "seed", "max_risk", "max_r_lon", "max_r_lat",
                   "min_d_lon", "min_d_lat", "collision", "t_collision")
SUMMARY_COLUMNS = ("experiment", "master_seed", "episodes", "collisions", "degenerate",
                   "point_biserial", "auc", "permutation_p")


def fmt(value, digits: int = 10) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    out = "%.*g" % (digits, value)
    return "0" if out == "-0" else out


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_risk_row(fh, br: RiskBreakdown) -> None:
    w = _writer(fh)
    w.writerow(RiskBreakdown.FIELDS)
    w.writerow([fmt(v, 9) for v in br.as_row()])


def write_trace(path: str | Path, result: ScenarioResult) -> None:
    if not result.trace:
        raise ValueError("result has no trace; run the scenario with keep_trace=True")
    keys = list(result.trace[0].pairs)
    header = list(TRACE_VEHICLE_COLUMNS)
    for a, b in keys:
        header += [f"pair_{a}_{b}_{f}" for f in PAIR_FIELDS]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(header)
        for sample in result.trace:
            pair_cols = []
            for key in keys:
                ps = sample.pairs[key]
                pair_cols += [fmt(ps.d_lon), fmt(ps.d_lat), fmt(ps.risk.r_lon),
                              fmt(ps.risk.r_lat), fmt(ps.risk.r)]
            for s in sample.states:
                w.writerow([fmt(sample.t), s.id, fmt(s.x), fmt(s.y), fmt(s.v_x), fmt(s.v_y),
                            fmt(s.a_x), fmt(s.a_y)] + pair_cols)


def write_episodes(path: str | Path, result: CampaignResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(EPISODE_COLUMNS)
        for r in result.records:
            w.writerow([fmt(r.episode_id), fmt(r.seed), fmt(r.max_risk), fmt(r.max_r_lon),
                        fmt(r.max_r_lat), fmt(r.min_d_lon), fmt(r.min_d_lat),
                        fmt(bool(r.collision)), fmt(r.t_collision)])


def write_summary(path: str | Path, result: CampaignResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        w.writerow([result.experiment, fmt(result.master_seed), fmt(result.episodes),
                    fmt(result.collisions), fmt(result.degenerate), fmt(result.point_biserial),
                    fmt(result.auc), fmt(result.permutation_p)])


def write_manifest(path: str | Path, manifest: dict) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
