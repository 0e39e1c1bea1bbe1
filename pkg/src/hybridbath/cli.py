"""Command-line front end.

Commands::

    hybridbath run CONFIG
    hybridbath sweep CONFIG --knob NAME --values v1,v2,...
    hybridbath oracle-compare CONFIG [--tol X]
    hybridbath verify TRAJECTORY.csv --law cosine --lambda L --omega W --tol X
    hybridbath schema

Errors are reported on stderr as one ``key=value`` line starting with
``error``; the exit code is 2 for configuration problems, 3 for a
coefficient singularity, 4 for a resource guard and 5 for an integration
failure.  ``oracle-compare`` and ``verify`` exit 1 when the check fails.
"""

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .config import formats, load_config, oracle_settings, output_directory, schema
from .csvio import (CSV_SCHEMA_VERSION, fmt, read_trajectory, write_coefficients,
                    write_table, write_trajectory)
from .errors import ConfigError, HybridBathError, ResourceError, SingularityError
from .models import build_model, oracle_spec, run, sweep
from .oracle import compare_to_master, cutoff_sensitivity, oracle_evolve
from .plotting import plot_run, plot_sweep

MANIFEST = "manifest.json"


def _error_line(exc):
    parts = [f"error code={exc.exit_code}", f"kind={exc.kind}"]
    if isinstance(exc, ConfigError):
        parts.append(f"field={exc.field}")
        msg = exc.message
    elif isinstance(exc, SingularityError):
        parts += [f"time={fmt(exc.time)}", f"quantity={exc.quantity}"]
        msg = str(exc)
    else:
        msg = str(exc)
    parts.append("message=" + json.dumps(msg))
    return " ".join(parts)


def _sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _clear_manifest(directory):
    path = os.path.join(directory, MANIFEST)
    if os.path.exists(path):
        os.remove(path)


def _write_manifest(directory, command, cfg, artifacts, started, diagnostics):
    manifest = {
        "tool": "hybridbath",
        "version": __version__,
        "command": command,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "config": cfg,
        "artifacts": {name: _sha256(os.path.join(directory, name)) for name in artifacts},
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
        "diagnostics": diagnostics,
    }
    with open(os.path.join(directory, MANIFEST), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _spec_from(cfg):
    return build_model(cfg["model"], cfg["parameters"], cfg["grid"])


def _write_run(result, directory, want_svg):
    os.makedirs(directory, exist_ok=True)
    traj_csv = os.path.join(directory, "trajectory.csv")
    coeff_csv = os.path.join(directory, "coefficients.csv")
    write_trajectory(traj_csv, result.trajectory)
    write_coefficients(coeff_csv, result.coefficients)
    artifacts = ["trajectory.csv", "coefficients.csv"]
    if want_svg:
        plot_run(traj_csv, coeff_csv, os.path.join(directory, "plot.svg"))
        artifacts.append("plot.svg")
    return artifacts


def cmd_run(args):
    started = time.perf_counter()
    cfg = load_config(args.config)
    out = output_directory(cfg, args.output)
    os.makedirs(out, exist_ok=True)
    _clear_manifest(out)
    result = run(_spec_from(cfg))
    artifacts = _write_run(result, out, "svg" in formats(cfg))
    _write_manifest(out, "run", cfg, artifacts, started, result.diagnostics)
    print(f"run model={cfg['model']} steps={len(result.times) - 1} output={out}")
    return 0


def _half_life(times, coherence):
    if coherence[0] == 0:
        return float("nan")
    below = np.nonzero(coherence <= 0.5 * coherence[0])[0]
    return float(times[below[0]]) if below.size else float("nan")


def parse_values(text):
    items = [v.strip() for v in text.split(",")] if text is not None else []
    items = [v for v in items if v]
    if not items:
        raise ConfigError("values", "sweep needs at least one value")
    try:
        return [float(v) for v in items]
    except ValueError:
        raise ConfigError("values", f"not a list of numbers: {text!r}") from None


def cmd_sweep(args):
    started = time.perf_counter()
    values = parse_values(args.values)
    cfg = load_config(args.config)
    out = output_directory(cfg, args.output)
    os.makedirs(out, exist_ok=True)
    _clear_manifest(out)
    spec = _spec_from(cfg)
    results = sweep(spec, args.knob, values, workers=args.jobs, collect_errors=True)
    want_svg = "svg" in formats(cfg)

    rows, artifacts, traj_paths, failures = [], [], [], []
    for k, (value, res) in enumerate(zip(values, results)):
        sub = f"{k:02d}_{args.knob}={value!r}"
        if isinstance(res, HybridBathError):
            failures.append(res)
            print(f"sweep value={fmt(value)} " + _error_line(res), file=sys.stderr)
            rows.append([fmt(value), f"error:{res.kind}", "", "", "", "", ""])
            continue
        names = _write_run(res, os.path.join(out, sub), want_svg)
        artifacts += [f"{sub}/{n}" for n in names]
        traj_paths.append((value, os.path.join(out, sub, "trajectory.csv")))
        st, t = res.trajectory.states, res.times
        coh = np.abs(st[:, 0, 1])
        rows.append([fmt(value), "ok", fmt(t[-1]), fmt(st[-1, 0, 0].real),
                     fmt(st[-1, 1, 1].real), fmt(coh[-1]), fmt(_half_life(t, coh))])

    with open(os.path.join(out, "summary.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("value,status,t_final,rho11,rho22,abs_rho12,coherence_half_life\n")
        for r in rows:
            fh.write(",".join(r) + "\n")
    artifacts.append("summary.csv")
    if want_svg and traj_paths:
        plot_sweep(args.knob, [v for v, _ in traj_paths], [p for _, p in traj_paths],
                   os.path.join(out, "sweep.svg"))
        artifacts.append("sweep.svg")
    print(f"sweep knob={args.knob} values={len(values)} failed={len(failures)} output={out}")
    if failures:
        return failures[0].exit_code
    _write_manifest(out, "sweep", dict(cfg, sweep={"knob": args.knob, "values": values}),
                    artifacts, started, {"values": len(values)})
    return 0


def cmd_oracle_compare(args):
    started = time.perf_counter()
    cfg = load_config(args.config)
    settings = oracle_settings(cfg)
    tol = args.tol if args.tol is not None else settings["tol"]
    cutoff = args.cutoff if args.cutoff is not None else settings["boson_cutoff"]
    spec = _spec_from(cfg)
    total = oracle_spec(spec, cutoff)
    out = output_directory(cfg, args.output)
    os.makedirs(out, exist_ok=True)
    _clear_manifest(out)
    result = run(spec)
    exact = oracle_evolve(total, spec.horizon, spec.dt)
    report = compare_to_master(exact, result.trajectory)
    try:
        truncation = cutoff_sensitivity(total, spec.horizon, spec.dt, base=exact)
    except ResourceError:
        truncation = None  # doubled cutoff does not fit; reported as null
    write_table(os.path.join(out, "compare.csv"), ["t", "trace_distance"],
                [report.times, report.distances])
    ok = report.max_distance <= tol
    print(f"oracle-compare model={cfg['model']} max_distance={report.max_distance:.6g} "
          f"at_t={report.time_of_max:g} tol={tol:g} cutoff_check="
          f"{'skipped' if truncation is None else f'{truncation:.3g}'} "
          f"status={'pass' if ok else 'fail'}")
    _write_manifest(out, "oracle-compare", cfg, ["compare.csv"], started,
                    {"max_distance": report.max_distance, "tol": tol, "pass": ok,
                     "cutoff_doubling_distance": truncation,
                     "oracle": exact.diagnostics, "generator": result.diagnostics["generator"]})
    return 0 if ok else 1


def cmd_verify(args):
    times, states = read_trajectory(args.trajectory)
    if states.shape[1] != 2:
        raise ConfigError("trajectory", "cosine law applies to a single qubit (2x2) trajectory")
    rho21 = states[:, 1, 0]
    law = rho21[0] * np.exp(1j * args.omega * times) * np.cos(np.sqrt(2) * args.lam * times)
    err = float(np.max(np.abs(rho21 - law)))
    ok = err <= args.tol
    print(f"verify law={args.law} max_error={err:.6g} tol={args.tol:g} "
          f"status={'pass' if ok else 'fail'}")
    return 0 if ok else 1


def cmd_schema(args):
    print(json.dumps(schema(), indent=2, sort_keys=True))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hybridbath",
        description="Non-Markovian dynamics of qubits and quantum dots in hybrid "
                    "bosonic/fermionic baths.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one configuration")
    p.add_argument("config")
    p.add_argument("--output", help="output directory (overrides config and environment)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run one configuration over several knob values")
    p.add_argument("config")
    p.add_argument("--knob", required=True,
                   help="c_f, c_b, kappa_b, omega, epsilon or kernels.<name>.<param>")
    p.add_argument("--values", required=True, help="comma-separated list")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-compare", help="compare against the exact total-system oracle")
    p.add_argument("config")
    p.add_argument("--tol", type=float)
    p.add_argument("--cutoff", type=int, help="boson Fock cutoff")
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("verify", help="check a trajectory against an analytic law")
    p.add_argument("trajectory")
    p.add_argument("--law", choices=["cosine"], default="cosine")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("schema", help="print the configuration JSON schema")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HybridBathError as exc:
        print(_error_line(exc), file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error code=2 kind=input message={json.dumps(str(exc))}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
