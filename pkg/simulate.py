"""
Photon-packet teleportation simulator — command-line runner.

Subcommands:
  teleport   one protocol round (EPR pair → joint measurement → phase correction)
  sweep      detuning sweep of the detector frequency away from the pump
  scheme     two-crystal optical scheme, with the χ-scaling fit
  check      invariant suite (completeness, no-information, oracle, …)

Usage:
  python simulate.py teleport
  python simulate.py teleport --seed 11 --format csv
  python simulate.py sweep --detuning-min 0 --detuning-max 2 --detuning-steps 5
  python simulate.py scheme --chi 0.01 --chi 0.02 --chi 0.04
  python simulate.py check --n-points 6
  python simulate.py check --config runs/small.json --truncate-time-grid

Data goes to stdout (or --out); log lines go to stderr.
Exit codes: 0 ok, 1 a check failed, 2 configuration or domain error.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional

# Make sure imports resolve from project root
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from pydantic import ValidationError

from analytics.checks import run_checks
from analytics.records import (
    DETECTOR_HEADER,
    DETUNING_HEADER,
    DISTRIBUTION_HEADER,
    SchemeRecord,
    csv_text,
    dumps,
    record_to_dict,
)
from core.config import Experiment, load_config
from core.errors import ConfigError, TeleportationError
from core.states import epr_state
from optics.scheme import SchemeConfig, chi_scaling_exponent, run_scheme, sweep_detector
from protocol.povm import outcome_distribution
from protocol.runner import detuning_sweep, teleport_once

log = logging.getLogger("simulate")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2

DEFAULT_FORMAT = {"teleport": "json", "sweep": "csv", "scheme": "json", "check": "json"}


# ── CLI ───────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description="Single-photon packet teleportation simulator")
    p.add_argument("command", choices=["teleport", "sweep", "scheme", "check"])
    p.add_argument("--config", type=str, default=None,
                   help="JSON run configuration (flags below override it)")
    p.add_argument("--out", type=str, default=None,
                   help="Write output here instead of stdout")
    p.add_argument("--format", choices=["csv", "json"], default=None,
                   help="Output format (default: json, csv for sweep)")
    p.add_argument("--seed", type=int, default=None,
                   help="Sample the measurement outcome with this seed")
    p.add_argument("--chi", type=float, action="append", default=None,
                   help="Coupling constant; repeat for the scaling fit")
    p.add_argument("--detuning-min", type=float, default=None)
    p.add_argument("--detuning-max", type=float, default=None)
    p.add_argument("--detuning-steps", type=int, default=None)
    p.add_argument("--n-points", type=int, default=None,
                   help="Override the number of frequency nodes")
    p.add_argument("--truncate-time-grid", action="store_true",
                   help="Sum the POVM over half the time nodes (completeness checks fail)")
    p.add_argument("--verbose", action="store_true",
                   help="Debug logging on stderr")
    return p


def overrides_from_args(args: argparse.Namespace) -> dict:
    """Flag values as a partial RunConfig tree; unset flags are left out."""
    out: dict = {}
    if args.n_points is not None:
        out["grid"] = {"n_points": args.n_points}
    if args.seed is not None:
        out["outcome"] = {"policy": "sample", "seed": args.seed}
    if args.chi:
        out["chi"] = args.chi
    sweep = {"detuning_min": args.detuning_min, "detuning_max": args.detuning_max,
             "steps": args.detuning_steps}
    sweep = {k: v for k, v in sweep.items() if v is not None}
    if sweep:
        out["sweep"] = sweep
    output = {"path": args.out, "format": args.format}
    output = {k: v for k, v in output.items() if v is not None}
    if output:
        out["output"] = output
    return out


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )


# ── Commands ──────────────────────────────────────────────────────────────────

def cmd_teleport(exp: Experiment, fmt: str) -> tuple[str, int]:
    run = teleport_once(exp.epr_spec, exp.packet, exp.policy)
    if fmt == "csv":
        dist = outcome_distribution(epr_state(exp.grid, exp.epr_spec), exp.packet)
        return csv_text(DISTRIBUTION_HEADER, dist.rows()), EXIT_OK
    return dumps(run.to_record()), EXIT_OK


def cmd_sweep(exp: Experiment, fmt: str) -> tuple[str, int]:
    rows = detuning_sweep(exp.epr_spec, exp.packet, exp.detunings, t=exp.config.sweep.t)
    if fmt == "json":
        return dumps(rows), EXIT_OK
    return csv_text(DETUNING_HEADER, rows), EXIT_OK


def cmd_scheme(exp: Experiment, fmt: str) -> tuple[str, int]:
    config = SchemeConfig(exp.grid, exp.chi[0], exp.pump, exp.packet, exp.detector)
    if fmt == "csv":
        rows = sweep_detector(config, exp.grid.sums.nodes)
        return csv_text(DETECTOR_HEADER, rows), EXIT_OK

    result = run_scheme(config)
    record = SchemeRecord(
        chi=exp.chi[0],
        pump=exp.pump,
        detector=config.detector,
        detection_weight=result.detection_weight,
        fidelity=result.fidelity,
    )
    # A single distinct χ leaves the exponent out of the record.
    if len(set(exp.chi)) >= 2:
        record.chi_values = list(exp.chi)
        record.chi_exponent = chi_scaling_exponent(config, exp.chi)
    return dumps(record), EXIT_OK


def cmd_check(exp: Experiment, fmt: str, truncate_time_grid: bool = False) -> tuple[str, int]:
    results = run_checks(exp, truncate_time_grid=truncate_time_grid)
    passed = all(r.passed for r in results)
    for r in results:
        if r.status == "skipped":
            log.warning("check %s skipped: %s", r.name, r.detail)
        elif not r.passed:
            log.error("check %s failed: value %s, tolerance %s %s", r.name, r.value, r.tolerance, r.detail)
    payload = {"passed": passed, "checks": [record_to_dict(r) for r in results]}
    return dumps(payload), EXIT_OK if passed else EXIT_CHECK_FAILED


COMMANDS = {
    "teleport": cmd_teleport,
    "sweep": cmd_sweep,
    "scheme": cmd_scheme,
    "check": cmd_check,
}


# ── Errors ────────────────────────────────────────────────────────────────────

def _validation_diagnostic(exc: ValidationError) -> dict:
    first = exc.errors()[0]
    return {
        "error": "ValidationError",
        "component": "cli",
        "field": ".".join(str(part) for part in first["loc"]),
        "message": first["msg"],
    }


def _emit_error(diagnostic: dict) -> int:
    sys.stdout.write(json.dumps(diagnostic) + "\n")
    log.error("%s in %s (%s): %s", diagnostic["error"], diagnostic["component"],
              diagnostic["field"], diagnostic["message"])
    return EXIT_ERROR


def _read_config(path: Optional[str], overrides: dict):
    try:
        return load_config(path, overrides)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {exc.filename}", field="config") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}", field="config") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}", field="config") from exc


def _write_output(text: str, path: Optional[str]) -> None:
    if not path:
        sys.stdout.write(text)
        return
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output to {path}: {exc.strerror}", field="output.path") from exc
    log.info("wrote %s", target)


# ── Entry point ───────────────────────────────────────────────────────────────

def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        config = _read_config(args.config, overrides_from_args(args))
        exp = config.build()
        log.info("grid %s, pump %.6g", exp.grid.describe(), exp.pump)
        fmt = config.output.format or DEFAULT_FORMAT[args.command]
        if args.command == "check":
            text, code = cmd_check(exp, fmt, truncate_time_grid=args.truncate_time_grid)
        else:
            text, code = COMMANDS[args.command](exp, fmt)
        _write_output(text, config.output.path)
    except ValidationError as exc:
        return _emit_error(_validation_diagnostic(exc))
    except TeleportationError as exc:
        return _emit_error(exc.to_dict())

    return code


if __name__ == "__main__":
    sys.exit(main())
