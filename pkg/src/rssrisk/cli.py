"""Command-line entry point.

Exit codes: 0 success, 1 usage or config error, 2 simulation ended in a
collision, 3 verification found a counterexample.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config, load_config, parse_pair_state, read_yaml
from .experiments import randomize_scenario, run_campaign, verify_samples
from .io import write_episodes, write_manifest, write_risk_row, write_summary, write_trace
from .rss_core import risk_breakdown
from .simulator import ConfigError, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_COLLISION, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _load(args) -> Config:
    cfg = load_config(args.config)
    scenario = cfg.scenario
    if getattr(args, "dt", None) is not None:
        scenario = dataclasses.replace(scenario, dt=args.dt)
    if getattr(args, "strict_branches", False):
        scenario = dataclasses.replace(scenario, strict_branches=True)
    if scenario is not cfg.scenario:
        scenario.validate()
        cfg = dataclasses.replace(cfg, scenario=scenario)
    return cfg


def _manifest(cfg: Config, seed, started: str, outputs) -> dict:
    return {
        "tool_version": __version__,
        "config_checksum": cfg.checksum,
        "master_seed": seed,
        "started": started,
        "finished": _now(),
        "outputs": sorted(str(p) for p in outputs),
    }


def cmd_risk(args) -> int:
    doc, _ = read_yaml(args.state)
    lon_s, lat_s = parse_pair_state(doc)
    cfg = load_config(args.config)
    sc = cfg.scenario
    br = risk_breakdown(lon_s, lat_s, sc.lon, sc.lat, sc.risk,
                        strict=args.strict_branches or sc.strict_branches)
    write_risk_row(sys.stdout, br)
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = _now()
    cfg = _load(args)
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = randomize_scenario(cfg.scenario, np.random.default_rng(args.seed))
    result = run_scenario(scenario)
    trace = out / "trace.csv"
    write_trace(trace, result)
    write_manifest(out / "manifest.json", _manifest(cfg, args.seed, started, [trace]))
    print(f"status={result.status} samples={result.samples} max_risk={result.max_risk:.6g}")
    return EXIT_COLLISION if result.collided else EXIT_OK


def cmd_experiment(args) -> int:
    started = _now()
    cfg = _load(args)
    model = {"behavior": cfg.behavior, "state": cfg.noise, "none": None}[args.experiment]
    episodes = args.episodes if args.episodes is not None else cfg.episodes
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = run_campaign(cfg.scenario, model, episodes, args.seed, n_perms=cfg.n_perms)
    files = [out / "episodes.csv", out / "summary.csv"]
    write_episodes(files[0], result)
    write_summary(files[1], result)
    write_manifest(out / "manifest.json", _manifest(cfg, args.seed, started, files))
    if result.degenerate:
        print(f"episodes={result.episodes} collisions={result.collisions} statistics=degenerate")
    else:
        print(f"episodes={result.episodes} collisions={result.collisions} "
              f"point_biserial={result.point_biserial:.4f} auc={result.auc:.4f} "
              f"permutation_p={result.permutation_p:.4g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args)
    v = cfg.verify
    rep = verify_samples(cfg.scenario.lon, cfg.scenario.lat, cfg.scenario.risk, args.samples,
                         np.random.default_rng(args.seed), horizon=float(v["horizon"]),
                         grid_levels=int(v["grid_levels"]), dt=float(v["dt"]))
    print(f"samples={rep.samples} zero_risk={rep.zero_risk} verified={rep.verified} "
          f"counterexamples={len(rep.counterexamples)}")
    for a, b, res in rep.counterexamples:
        print(f"counterexample: {a} {b} contact at t={res.t_contact:.3g}")
    return EXIT_COUNTEREXAMPLE if rep.counterexamples else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rssrisk", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("risk", help="evaluate the risk indices for one vehicle pair")
    r.add_argument("--state", required=True, help="YAML file with longitudinal/lateral pair state")
    r.add_argument("--config", help="YAML file with rss and risk sections")
    r.add_argument("--strict-branches", action="store_true")
    r.set_defaults(func=cmd_risk)

    s = sub.add_parser("simulate", help="run one scenario and write trace.csv")
    s.add_argument("--config")
    s.add_argument("--out")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dt", type=float)
    s.add_argument("--strict-branches", action="store_true")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("experiment", help="run a Monte Carlo campaign")
    e.add_argument("--config")
    e.add_argument("--experiment", choices=("behavior", "state", "none"), required=True)
    e.add_argument("--episodes", type=int)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.add_argument("--dt", type=float)
    e.add_argument("--strict-branches", action="store_true")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="brute-force check that zero-risk states cannot collide")
    v.add_argument("--config")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--strict-branches", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"rssrisk: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
