"""Command-line front end.

Exit codes: 0 success, 1 scenario/validation problem, 2 compute or I/O
failure.  Progress and summaries go to stderr; machine-readable output
goes only to files in the chosen output directory (flag --out, or the
MISSIONLINK_OUT environment variable, default ./out).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .catalog import constellation_presets, terminal_presets
from .errors import CatalogError, MissionLinkError, ScenarioError
from .plots import emit_plots
from .reports import write_reports
from .runner import run_scenario
from .scenario import parse_scenario

_SUBCOMMAND_OUTPUTS = {
    "coverage": ("coverage", "plots"),
    "ecdf": ("ecdf", "plots"),
    "linkbudget": ("link", "plots"),
    "latency": ("latency",),
    "report": None,  # the scenario's own outputs list
}


def _say(args: argparse.Namespace, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="missionlink",
        description="Coverage, link-budget, and latency analysis for space missions "
        "served by broadband satellite constellations.",
    )
    parser.add_argument("--version", action="version", version=f"missionlink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    catalog = sub.add_parser("catalog", help="list bundled constellations and terminals")
    catalog.add_argument("-q", "--quiet", action="store_true", help=argparse.SUPPRESS)

    runnable = argparse.ArgumentParser(add_help=False)
    runnable.add_argument("scenario", type=Path, help="scenario TOML file")
    runnable.add_argument(
        "-o",
        "--out",
        type=Path,
        default=None,
        help="output directory (default: $MISSIONLINK_OUT or ./out)",
    )
    runnable.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a scenario value by dotted path, e.g. link.margin_db=1.0",
    )
    runnable.add_argument("--workers", type=int, default=1, help="parallel scan processes")
    runnable.add_argument("-q", "--quiet", action="store_true", help="suppress progress output")

    for name, help_text in [
        ("coverage", "access/outage intervals and coverage statistics"),
        ("ecdf", "per-satellite access-duration eCDF and usability fraction"),
        ("linkbudget", "slant range, Es/N0, and data-rate time series"),
        ("latency", "expected user latency for the mission altitude"),
        ("report", "run every output listed in the scenario"),
        ("validate", "parse and validate the scenario without computing"),
    ]:
        sub.add_parser(name, parents=[runnable], help=help_text)
    return parser


def _cmd_catalog(args: argparse.Namespace) -> int:
    _say(args, "constellations:")
    for name, c in sorted(constellation_presets().items()):
        _say(
            args,
            f"  {name}: {c.satellite_count} satellites, min elevation "
            f"{c.min_elevation_deg:g} deg"
            + (
                f", baseline latency {c.baseline_latency_ms:g} ms"
                if c.baseline_latency_ms is not None
                else ""
            ),
        )
    _say(args, "terminals:")
    for name, t in sorted(terminal_presets().items()):
        gt = f"{t.g_over_t_db_k:g} dB/K" if t.g_over_t_db_k is not None else "n/a"
        _say(
            args,
            f"  {name} [{t.band}]: EIRP {t.eirp_dbw:g} dBW, G/T {gt}, "
            f"{t.mass_kg:g} kg, {t.steering}",
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "catalog":
        return _cmd_catalog(args)

    try:
        text = args.scenario.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read scenario {args.scenario}: {exc}", file=sys.stderr)
        return 1
    try:
        scenario = parse_scenario(
            text, name=args.scenario.stem, overrides=tuple(args.overrides)
        )
    except (ScenarioError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        _say(args, f"{args.scenario}: valid scenario {scenario.name!r}")
        return 0

    outdir = args.out or Path(os.environ.get("MISSIONLINK_OUT", "out"))
    outputs = _SUBCOMMAND_OUTPUTS[args.command]
    try:
        bundle = run_scenario(
            scenario,
            outputs=outputs,
            workers=args.workers,
            progress=lambda msg: _say(args, msg),
        )
    except (ScenarioError, CatalogError) as exc:
        # configuration problems surfaced during resolution, e.g. a missing preset
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (MissionLinkError, ValueError) as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return 2

    effective_outputs = scenario.outputs if outputs is None else outputs
    try:
        plot_paths: list[Path] = []
        if "plots" in effective_outputs:
            # plots first so their skip warnings land in the report provenance
            plot_paths, plot_warnings = emit_plots(bundle, outdir)
            bundle.warnings.extend(plot_warnings)
        written = write_reports(bundle, outdir)
        written.extend(plot_paths)
    except (MissionLinkError, OSError) as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return 2
    for w in bundle.warnings:
        _say(args, f"warning: {w}")
    if bundle.coverage is not None:
        _say(
            args,
            f"total {bundle.coverage.total_access_s:.2f} s ({bundle.coverage.total_pct:.2f}%)",
        )
    _say(args, f"wrote {len(written)} file(s) to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
