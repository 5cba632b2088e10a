"""Command-line front end.

Three commands:

* ``check CONFIG``    - load a config, run the hypothesis checks and the
  cycle certification, optionally build orbit certificates, and write a
  JSON report.  Exit 0 when a cycle is certified, 2 when not, 1 on error.
* ``example N``       - run the built-in system N (1, 2, 3) with
  certificates and emit trajectory CSVs for re-plotting.
* ``simulate CONFIG`` - event-detecting simulation from a given state;
  writes trajectory and events CSVs, optionally cross-checks the closed
  forms.

Reports are JSON with floats serialized by ``repr`` (shortest string that
round-trips the exact double), so a report parsed back compares equal.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import orbits
from .errors import ConfigError, HetcycleError
from .hybrid import (
    crosscheck_closed_forms,
    integrate_hybrid,
    write_events_csv,
    write_trajectory_csv,
)
from .model import (
    DEFAULT_TOL,
    CONFIG_KEYS,
    SystemParams,
    load_config,
    params_from_dict,
    params_to_dict,
    validate_hypotheses,
)
from .presets import example_params
from .verifier import certify


def _jsonable(obj):
    """Recursively convert report pieces to plain JSON types."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _hypotheses_dict(report):
    return {
        "h1_holds": report.h1_holds,
        "h2_holds": report.h2_holds,
        "h3_holds": report.h3_holds,
        "h3_details": [
            {"name": c.name, "passed": c.passed, "margin": c.margin}
            for c in report.h3_details
        ],
        "eigenvalues": [[e.real, e.imag] for e in report.eigenvalues],
        "spectral_type": report.spectral_type,
    }


def _verdict_dict(verdict):
    return {
        "theorem": verdict.theorem,
        "regime": verdict.regime,
        "subcase": verdict.subcase,
        "cycle_count": verdict.cycle_count,
        "connecting_points": [list(p) for p in verdict.connecting_points],
        "q0": list(verdict.q0) if verdict.q0 is not None else None,
        "v_star": list(verdict.v_star) if verdict.v_star is not None else None,
        "window": ({"x_minus": list(verdict.window[0]),
                    "x_plus": list(verdict.window[1])}
                   if verdict.window is not None else None),
        "evidence": [
            {"name": e.name, "value": e.value, "threshold": e.threshold,
             "passed": e.passed, "note": e.note}
            for e in verdict.evidence
        ],
    }


def _certificate_dict(cert):
    return {
        "containment_ok": cert.containment_ok,
        "endpoint_residuals": dict(cert.endpoint_residuals),
        "horizons": dict(cert.horizons),
        "segments": [
            {"role": s.role, "side": s.side, "n_points": int(len(s.ts)),
             "t_start": float(s.ts[0]), "t_end": float(s.ts[-1]),
             "containment_margin": s.containment_margin,
             "requirement": s.requirement}
            for s in cert.orbit_segments
        ],
    }


def build_run_report(params: SystemParams, tol: float, certify_orbits: bool,
                     t_back=None, t_fwd=None):
    """Run the full pipeline and return (report dict, verdict, certificates)."""
    timing = {}
    t0 = time.perf_counter()
    hyp = validate_hypotheses(params, tol)
    timing["hypotheses_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    verdict = certify(params, tol)
    timing["verify_s"] = time.perf_counter() - t0

    certificates = None
    if certify_orbits and verdict.certified:
        t0 = time.perf_counter()
        certificates = orbits.assemble_cycle(params, verdict,
                                             t_back=t_back, t_fwd=t_fwd)
        timing["certify_s"] = time.perf_counter() - t0

    report = {
        "params_echo": params_to_dict(params),
        "tolerance": tol,
        "hypothesis_report": _hypotheses_dict(hyp),
        "verdict": _verdict_dict(verdict),
        "certificates": ([_certificate_dict(c) for c in certificates]
                         if certificates is not None else None),
        "timing": timing,
    }
    return _jsonable(report), verdict, certificates


def _apply_sets(values: dict, set_args) -> dict:
    for item in set_args or ():
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"--set: unknown key {key!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise ConfigError(f"--set: invalid number for {key!r}: {val!r}")
    return values


def _emit_report(report: dict, out_path) -> None:
    text = json.dumps(report, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_segments(certificates, csv_path, csv_dir) -> None:
    segments = []
    seen = set()
    for cert in certificates or ():
        for seg in cert.orbit_segments:
            if id(seg) not in seen:
                seen.add(id(seg))
                segments.append(seg)
    if not segments:
        return
    if csv_path:
        orbits.write_segments_csv(segments, csv_path)
    if csv_dir:
        orbits.write_segments_csv_dir(segments, csv_dir)


def _cmd_check(args) -> int:
    values = params_to_dict(load_config(args.config))
    params = params_from_dict(_apply_sets(values, args.set))
    report, verdict, certs = build_run_report(
        params, args.tol, args.certify, args.tback, args.tfwd)
    _emit_report(report, args.out)
    _emit_segments(certs, args.csv, args.csv_dir)
    return 0 if verdict.certified else 2


def _cmd_example(args) -> int:
    params = example_params(args.n)
    if args.set:
        params = params_from_dict(_apply_sets(params_to_dict(params), args.set))
    report, verdict, certs = build_run_report(
        params, args.tol, True, args.tback, args.tfwd)
    _emit_report(report, args.out)
    csv_dir = args.csv_dir or f"example{args.n}_data"
    _emit_segments(certs, args.csv, csv_dir)
    return 0 if verdict.certified else 2


def _cmd_simulate(args) -> int:
    values = params_to_dict(load_config(args.config))
    params = params_from_dict(_apply_sets(values, args.set))
    try:
        x0 = tuple(float(v) for v in args.x0.split(","))
    except ValueError:
        raise ConfigError(f"--x0 expects three comma-separated numbers, got {args.x0!r}")
    if len(x0) != 3:
        raise ConfigError("--x0 expects exactly three components")
    traj = integrate_hybrid(params, x0, (args.t0, args.t1))
    write_trajectory_csv(traj, args.out_traj)
    write_events_csv(traj, args.out_events)
    report = {
        "params_echo": params_to_dict(params),
        "x0": list(x0),
        "t_span": [args.t0, args.t1],
        "n_samples": int(len(traj.ts)),
        "n_events": len(traj.events),
        "events": [{"t": e.t, "x": list(e.x), "direction": e.direction}
                   for e in traj.events],
        "trajectory_csv": args.out_traj,
        "events_csv": args.out_events,
    }
    if args.oracle:
        rep = crosscheck_closed_forms(params, args.oracle, seed=args.seed)
        report["oracle"] = {"trials": rep.trials, "max_error": rep.max_error,
                            "worst_trial": rep.worst_trial}
    _emit_report(_jsonable(report), args.out)
    return 0


def _add_common(p):
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config value (repeatable)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                   help="global tolerance for equality-type checks")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetcycle",
        description="Certify and construct heteroclinic cycles of the "
                    "two-zone piecewise-affine system.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="certify a config")
    p.add_argument("config")
    _add_common(p)
    p.add_argument("--certify", action="store_true",
                   help="also build orbit certificates")
    p.add_argument("--tback", type=float, default=None,
                   help="override backward horizons")
    p.add_argument("--tfwd", type=float, default=None,
                   help="override forward horizons")
    p.add_argument("--csv", help="write all orbit segments to one CSV")
    p.add_argument("--csv-dir", help="write one CSV per orbit segment")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("example", help="run a built-in example system")
    p.add_argument("n", type=int, choices=(1, 2, 3))
    _add_common(p)
    p.add_argument("--tback", type=float, default=None)
    p.add_argument("--tfwd", type=float, default=None)
    p.add_argument("--csv", help="write all orbit segments to one CSV")
    p.add_argument("--csv-dir",
                   help="per-segment CSV directory (default example<n>_data)")
    p.set_defaults(fn=_cmd_example)

    p = sub.add_parser("simulate", help="event-detecting simulation")
    p.add_argument("config")
    _add_common(p)
    p.add_argument("--x0", required=True, metavar="X1,X2,X3")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--out-traj", default="trajectory.csv")
    p.add_argument("--out-events", default="events.csv")
    p.add_argument("--oracle", type=int, default=0, metavar="N",
                   help="cross-check the closed forms with N random trials")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}),
              file=sys.stderr)
        return 1
    except HetcycleError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except ValueError as exc:
        print(json.dumps({"error": "ValueError", "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
