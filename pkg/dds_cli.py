#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dual Dyson Command Line
=======================

    dualdyson <config.json> [--out DIR] [--seedless] [--verbose]

Runs one experiment and writes <experiment>.csv (plus companion tables),
<experiment>.json and plot.gp to the output directory. Identical
configurations give byte-identical files.

Exit status: 0 success, 1 unexpected failure, 2 configuration, 3 numerical, 4 I/O.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import structlog

from dds_api import DualDysonAPI, ExperimentResult, PlotSpec, Table
from dds_config import load_config
from dds_errors import DualDysonError, NumericalError, OutputError

logger = structlog.get_logger(__name__)


def configure_logging(verbose: bool = False):
    """Key/value log lines on stderr; DEBUG with --verbose, INFO otherwise."""
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.KeyValueRenderer(key_order=["level", "event"]),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(logging.DEBUG if verbose else logging.INFO),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def create_parser() -> argparse.ArgumentParser:
    """
    Create command-line argument parser.

    Returns:
        Configured ArgumentParser instance
    """
    parser = argparse.ArgumentParser(
        prog="dualdyson",
        description="Dyson and dual Dyson series experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Experiments (the "experiment" key of the configuration):
  jc-compare    series orders against the exact Jaynes-Cummings solution
  hhg-spectrum  dipole spectrum of a two-level atom in a strong field
  wkbj-demo     WKBJ against an adaptive reference solution
  sweep         hyper-Raman line centres across one field/atom parameter

Examples:
  dualdyson jc.json --out out/jc
  dualdyson hhg.json --verbose
        """,
    )
    parser.add_argument("config", type=Path, help="JSON configuration file")
    parser.add_argument("--out", type=Path, default=None,
                        help="Output directory (default: the config 'out' key, else ./out)")
    parser.add_argument("--seedless", action="store_true",
                        help="Accepted for compatibility; every run is deterministic")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    return parser


# ============================================================================
# ARTIFACT WRITERS
# ============================================================================

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            raise NumericalError(f"non-finite value {value} in table output")
        return format(value, ".17g")
    return str(value)


def render_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def render_plot(result: ExperimentResult) -> str:
    """gnuplot script drawing every panel the result declares."""
    lines = ["set datafile separator ','", "set key autotitle columnhead", "set terminal pngcairo size 900,600"]
    specs: List[PlotSpec] = result.plots()
    for i, spec in enumerate(specs):
        lines.append(f"set output '{result.experiment}-{i}.png'")
        lines.append(f"set title '{spec.title}'")
        lines.append("set logscale y" if spec.log_y else "unset logscale y")
        curves = ", ".join(f"'{spec.table}' using 1:{c} with lines" for c in spec.columns)
        lines.append(f"plot {curves}")
    return "\n".join(lines) + "\n"


def _write_text_atomic(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e


def write_artifacts(result: ExperimentResult, report: Dict[str, Any], out_dir: Path) -> List[Path]:
    """Render every artifact first, then write them; returns the written paths."""
    rendered = {name: render_csv(table) for name, table in result.tables().items()}
    rendered[f"{result.experiment}.json"] = json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    rendered["plot.gp"] = render_plot(result)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"cannot create output directory {out_dir}: {e}") from e
    written = []
    for name, text in rendered.items():
        path = out_dir / name
        _write_text_atomic(path, text)
        written.append(path)
    return written


# ============================================================================
# ENTRY POINT
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the process exit status."""
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    api = DualDysonAPI()
    try:
        config = load_config(args.config)
        out_dir = args.out if args.out is not None else Path(config.out)
        result = api.run(config)
        report = api.report(result, config, args.seedless)
        written = write_artifacts(result, report, out_dir)
    except DualDysonError as e:
        logger.error("run_failed", error=str(e), kind=type(e).__name__, exit_code=e.exit_code)
        return e.exit_code
    except Exception as e:
        logger.error("run_crashed", error=str(e), kind=type(e).__name__, exit_code=DualDysonError.exit_code)
        return DualDysonError.exit_code
    finally:
        api.close()

    logger.info("run_complete", experiment=config.experiment, out=str(out_dir),
                files=[p.name for p in written])
    return 0


if __name__ == "__main__":
    sys.exit(main())
