"""Command-line runner: `run`, `sweep`, `selftest`.

Exit codes: 0 success, 1 scenario/config error, 2 runtime error,
3 selftest failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .report import render_summary_text, run_scenario, summarize_rows, write_reports
from .scenario import Scenario, ScenarioError, parse_scenario, with_key


def _load_scenario(path: Path, seed_override=None) -> Scenario:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    scenario = parse_scenario(text)
    if seed_override is not None:
        from dataclasses import replace

        scenario = replace(
            scenario, protocol=replace(scenario.protocol, seed=seed_override)
        )
        scenario.validate()
    return scenario


def _cmd_run(args) -> int:
    scenario = _load_scenario(Path(args.scenario), args.seed)
    out_dir = Path(args.out) if args.out else Path(scenario.output_path)
    rows = run_scenario(scenario, out_dir=out_dir, figures=not args.no_figures)
    print(render_summary_text(summarize_rows(rows)), end="")
    print(f"reports written to {out_dir}")
    return 0


def _cmd_sweep(args) -> int:
    base = _load_scenario(Path(args.scenario), args.seed)
    if "=" not in args.vary:
        raise ScenarioError("--vary expects key=v1,v2,...")
    key, raw_values = args.vary.split("=", 1)
    key = key.strip()
    values = [v.strip() for v in raw_values.split(",") if v.strip()]
    if not values:
        raise ScenarioError("--vary got an empty value list")
    variants = [(v, with_key(base, key, v)) for v in values]

    out_root = Path(args.out) if args.out else Path(base.output_path)
    all_rows = []
    labeled = []
    for v, scenario in variants:
        sub = out_root / f"{key}_{v}"
        rows = run_scenario(scenario, out_dir=sub, figures=not args.no_figures)
        all_rows.extend(rows)
        labeled.append((v, rows))

    summary = summarize_rows(all_rows)
    text = render_summary_text(summary)
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "sweep_summary.txt").write_text(text, encoding="utf-8")
    if not args.no_figures:
        from .figures import sweep_figure

        sweep_figure(key, labeled, out_root / "sweep.png")
    print(text, end="")
    print(f"sweep outputs written to {out_root}")
    return 0


def _cmd_selftest(_args) -> int:
    from .selftest import run_selftest

    return 0 if run_selftest() else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qssim",
        description="Singlet-based quantum secret sharing: protocol, attacks, detection.",
    )
    parser.add_argument("--version", action="version", version=f"qssim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario", help="path to a key=value scenario file")
    p_run.add_argument("--out", help="output directory (default: scenario output_path)")
    p_run.add_argument("--seed", type=int, help="override the scenario seed")
    p_run.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a scenario once per value of one key")
    p_sweep.add_argument("scenario", help="path to the base scenario file")
    p_sweep.add_argument("--vary", required=True, help="key=v1,v2,... to sweep")
    p_sweep.add_argument("--out", help="output root (default: scenario output_path)")
    p_sweep.add_argument("--seed", type=int, help="override the scenario seed")
    p_sweep.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_self = sub.add_parser("selftest", help="run the built-in invariant battery")
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
