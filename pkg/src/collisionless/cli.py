"""Command-line interface: solve, scan, export, and regression-check models."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from .cauchy import cauchy_matrix
from .closed_form import SOLVERS
from .critical import (
    asymptotic_grid,
    c0_sampling_study,
    critical_limit,
    solve_critical,
)
from .errors import (
    CollisionlessError,
    ConvergenceError,
    NoExistenceError,
    NoRootError,
)
from .impact import GridSpec, scan_contour
from .model import BUILTIN_MODELS, builtin_model, load_model, n2_spectrum
from .pipeline import pick_records, solve_model
from .reference import REFERENCE, TOLERANCES, compare_reference
from .spectral import analyze
from .trajectory import (
    ValidatorTolerances,
    synthesize,
    to_csv,
    to_json,
    to_svg,
    trajectory_from_json,
    validate,
)

EXIT_OK = 0
EXIT_NO_EXISTENCE = 2
EXIT_NO_ROOT = 3
EXIT_VALIDATION_FAILED = 4
EXIT_REFERENCE_MISMATCH = 5
EXIT_USAGE = 64

_current_argv: list = []


class _Parser(argparse.ArgumentParser):
    # keep exit code 2 reserved for the existence gate
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(prefix, command, config, outputs, started, seed=None, inputs=()):
    manifest = {
        "command": command,
        "argv": list(_current_argv),
        "config": config,
        "version": __version__,
        "seed": seed,
        "input_hashes": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "wall_time_s": time.perf_counter() - started,
    }
    path = f"{prefix}.manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def _add_model_args(parser):
    parser.add_argument("--model", default=None, help="built-in model name")
    parser.add_argument("--config", default=None, help="path to a JSON model file")


def _resolve_model(args):
    if args.config:
        return load_model(args.config), [args.config]
    name = args.model or "armed-biped"
    return builtin_model(name), []


def _add_grid_args(parser):
    parser.add_argument("--o-n-max", type=float, default=4 * np.pi)
    parser.add_argument("--o-p-max", type=float, default=2 * np.pi)
    parser.add_argument("--o-n-min", type=float, default=0.0)
    parser.add_argument("--o-p-min", type=float, default=0.0)
    parser.add_argument("--grid-step", type=float, default=0.05)


def _grid_from_args(args):
    return GridSpec(
        o_n_max=args.o_n_max,
        o_p_max=args.o_p_max,
        step=args.grid_step,
        o_n_min=args.o_n_min,
        o_p_min=args.o_p_min,
    )


def _tolerances_from_args(args):
    factor = getattr(args, "tol", 1.0)
    if factor == 1.0:
        return None
    base = ValidatorTolerances()
    return ValidatorTolerances(
        velocity=base.velocity * factor,
        acceleration=base.acceleration * factor,
        continuity=base.continuity * factor,
        energy=base.energy * factor,
        contact=base.contact * factor,
    )


def _parse_pick(text):
    if text in ("lowest-row", "all"):
        return text
    if text.startswith("nearest="):
        parts = text[len("nearest=") :].split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError("nearest expects nearest=O_N,O_PRIME")
        return ("nearest", (float(parts[0]), float(parts[1])))
    raise argparse.ArgumentTypeError(f"unknown pick strategy {text!r}")


def _parse_branches(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _record_to_dict(record):
    return {
        **record.solution.to_dict(),
        "row": record.row,
        "col": record.col,
        "validation": record.report.to_dict(),
    }


def _emit(payload, args, outputs, prefix=None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if prefix is not None:
        path = f"{prefix}.json"
        with open(path, "w") as fh:
            fh.write(text + "\n")
        outputs.append(path)
    if getattr(args, "json", False) or prefix is None:
        print(text)


# ------------------------------------------------------------------- commands

def _cmd_list_models(args):
    for name in sorted(BUILTIN_MODELS):
        print(name)
    print("n2 families: hopper, juggler, rimless, rocker (see 'analytic2')")
    return EXIT_OK


def _cmd_solve(args):
    started = time.perf_counter()
    model, inputs = _resolve_model(args)
    try:
        run = solve_model(model, _grid_from_args(args), tolerances=_tolerances_from_args(args))
    except NoExistenceError as exc:
        print(f"no solution exists: {exc}", file=sys.stderr)
        return EXIT_NO_EXISTENCE
    except ConvergenceError as exc:
        print(f"no converged root: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    picked = pick_records(run, args.pick)
    if not picked:
        print("all converged roots failed physical validation", file=sys.stderr)
        return EXIT_VALIDATION_FAILED
    payload = {
        "model": model.name,
        "pick": str(args.pick),
        "solutions": [_record_to_dict(r) for r in picked],
        "spurious_roots": run.spurious_roots,
        "failed_seeds": run.failed_seeds,
    }
    outputs = []
    _emit(payload, args, outputs, args.out)
    if args.out:
        outputs.append(_write_manifest(args.out, "solve", model.to_config(), outputs, started, inputs=inputs))
    return EXIT_OK


def _cmd_contour(args):
    started = time.perf_counter()
    model, inputs = _resolve_model(args)
    spectral = analyze(model)
    field = scan_contour(spectral.spectra, _grid_from_args(args))
    crosses = None
    if args.asymptotes:
        try:
            crosses = asymptotic_grid(spectral.spectra, _parse_branches(args.asymptotes))
        except CollisionlessError as exc:
            print(f"asymptote overlay skipped: {exc}", file=sys.stderr)
    outputs = []
    if args.format in ("all", "csv"):
        path = f"{args.out}.csv"
        field.to_csv(path)
        outputs.append(path)
    if args.format in ("all", "svg"):
        path = f"{args.out}.svg"
        field.to_svg(path, asymptotes=crosses)
        outputs.append(path)
    outputs.append(_write_manifest(args.out, "contour", model.to_config(), outputs, started, inputs=inputs))
    print(f"{field.seeds.shape[0]} seed cells; wrote {', '.join(outputs)}")
    return EXIT_OK


def _cmd_trajectory(args):
    started = time.perf_counter()
    model, inputs = _resolve_model(args)
    try:
        run = solve_model(model, _grid_from_args(args), samples_per_phase=args.samples,
                          tolerances=_tolerances_from_args(args))
    except NoExistenceError as exc:
        print(f"no solution exists: {exc}", file=sys.stderr)
        return EXIT_NO_EXISTENCE
    except ConvergenceError as exc:
        print(f"no converged root: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    picked = pick_records(run, args.pick)
    if not picked:
        print("all converged roots failed physical validation", file=sys.stderr)
        return EXIT_VALIDATION_FAILED
    record = picked[0]
    traj = synthesize(run.spectral, record.solution, args.samples)
    outputs = []
    if args.format in ("all", "csv"):
        to_csv(traj, f"{args.out}.csv")
        outputs.append(f"{args.out}.csv")
    if args.format in ("all", "json"):
        to_json(traj, f"{args.out}.json")
        outputs.append(f"{args.out}.json")
    if args.format in ("all", "svg"):
        to_svg(traj, f"{args.out}.svg")
        outputs.append(f"{args.out}.svg")
    outputs.append(_write_manifest(args.out, "trajectory", model.to_config(), outputs, started, inputs=inputs))
    print(f"tau={record.solution.times.tau:.6g} tau'={record.solution.times.tau_prime:.6g}; wrote {', '.join(outputs)}")
    return EXIT_OK


def _cmd_validate(args):
    model, _ = _resolve_model(args)
    traj = trajectory_from_json(args.trajectory)
    report = validate(traj, model, tolerances=_tolerances_from_args(args))
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED


def _cmd_analytic2(args):
    solver = SOLVERS[args.family]
    rows = []
    for n in _parse_branches(args.n):
        kwargs = {"omega2": args.omega2, "omega1p": args.omega1p, "n": n}
        if args.family in ("rimless", "rocker"):
            kwargs["nu1"] = args.nu1
        try:
            sol = solver(**kwargs)
        except NoRootError as exc:
            rows.append({"n": n, "error": str(exc)})
            continue
        rows.append(
            {
                "n": n,
                "o_2": sol.o_2,
                "o_prime_1": sol.o_prime_1,
                "tau": sol.tau,
                "tau_prime": sol.tau_prime,
                "mu": sol.mu,
            }
        )
    payload = {"family": args.family, "branches": rows}
    outputs = []
    _emit(payload, args, outputs, args.out)
    if args.out:
        _write_manifest(args.out, "analytic2", vars(args).copy(), outputs, time.perf_counter())
    return EXIT_OK


def _spectra_for_critical(args):
    if args.config or args.model:
        model, inputs = _resolve_model(args)
        return analyze(model).spectra, inputs
    if args.family:
        return (
            n2_spectrum(args.family, nu1=args.nu1, omega2=args.omega2, omega1p=args.omega1p),
            [],
        )
    raise NoRootError("critical needs --model/--config, --family, or --study-c0")


def _cmd_critical(args):
    started = time.perf_counter()
    if args.study_c0:
        summary = c0_sampling_study(args.samples, args.n_dof, args.seed)
        payload = summary.to_dict()
        outputs = []
        _emit(payload, args, outputs, args.out)
        if args.out:
            _write_manifest(args.out, "critical", payload, outputs, started, seed=args.seed)
        return EXIT_OK
    spectra, inputs = _spectra_for_critical(args)
    limit = critical_limit(spectra)
    tau_c, c0 = solve_critical(limit)
    payload = {"tau_critical": tau_c, "c0": c0}
    if args.branches:
        pts = asymptotic_grid(spectra, _parse_branches(args.branches))
        payload["asymptotic_grid"] = [
            {"n": int(n), "o_n": float(p[0]), "o_prime": float(p[1])}
            for n, p in zip(_parse_branches(args.branches), pts)
        ]
    outputs = []
    _emit(payload, args, outputs, args.out)
    if args.out:
        _write_manifest(args.out, "critical", payload, outputs, started, inputs=inputs)
    return EXIT_OK


def _cmd_reproduce(args):
    model = builtin_model("armed-biped")
    spectral = analyze(model)
    run = solve_model(model)
    record = pick_records(run, "lowest-row")[0]
    solution = record.solution
    computed = {
        "lam": spectral.lam,
        "lam_prime": spectral.lam_prime,
        "norm_const": spectral.norm_const,
        "cauchy": cauchy_matrix(spectral.lam, spectral.lam_prime),
        "mode_matrix": spectral.mode_matrix,
        "mode_matrix_prime": spectral.mode_matrix_prime,
        "tau": solution.times.tau,
        "tau_prime": solution.times.tau_prime,
        "q": solution.q,
        "q_prime": solution.q_prime,
    }
    reference = REFERENCE
    tolerances = TOLERANCES
    if args.fixtures:
        with open(args.fixtures) as fh:
            raw = json.load(fh)
        reference = {k: np.asarray(v) for k, v in raw.items()}
    rows = compare_reference(computed, reference, tolerances)
    if args.json:
        payload = {
            "rows": [vars(r) for r in rows],
            "passed": all(r.passed for r in rows),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        width = max(len(r.name) for r in rows)
        for r in rows:
            status = "pass" if r.passed else "FAIL"
            print(f"{r.name:<{width}}  max diff {r.max_diff:11.4e}  tol {r.tolerance:8.1e} ({r.mode})  {status}")
        print("all quantities reproduced" if all(r.passed for r in rows) else "MISMATCH")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_REFERENCE_MISMATCH


def build_parser():
    parser = _Parser(prog="collisionless", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-models", help="list built-in models").set_defaults(func=_cmd_list_models)

    p = sub.add_parser("solve", help="find and validate impact-time roots")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--pick", type=_parse_pick, default="lowest-row")
    p.add_argument("--tol", type=float, default=1.0,
                   help="scale factor on the physical-validation tolerances")
    p.add_argument("--out", default=None, help="output prefix (writes PREFIX.json + manifest)")
    p.add_argument("--json", action="store_true", help="print the JSON payload")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("contour", help="export the determinant zero contours")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--format", choices=("all", "csv", "svg"), default="all")
    p.add_argument("--asymptotes", default=None, help="overlay branches, e.g. 3..6")
    p.set_defaults(func=_cmd_contour)

    p = sub.add_parser("trajectory", help="solve and export a trajectory")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--pick", type=_parse_pick, default="lowest-row")
    p.add_argument("--tol", type=float, default=1.0,
                   help="scale factor on the physical-validation tolerances")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("all", "csv", "json", "svg"), default="all")
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("validate", help="validate an exported trajectory JSON")
    _add_model_args(p)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--tol", type=float, default=1.0,
                   help="scale factor on the physical-validation tolerances")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("analytic2", help="closed-form branches of the 2-DOF families")
    p.add_argument("--family", choices=sorted(SOLVERS), required=True)
    p.add_argument("--nu1", type=float, default=None)
    p.add_argument("--omega2", type=float, required=True)
    p.add_argument("--omega1p", type=float, required=True)
    p.add_argument("--n", default="1..5", help="branch or range, e.g. 2 or 1..5")
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_analytic2)

    p = sub.add_parser("critical", help="critical-region report or c0 sampling study")
    _add_model_args(p)
    p.add_argument("--family", choices=sorted(SOLVERS), default=None)
    p.add_argument("--nu1", type=float, default=None)
    p.add_argument("--omega2", type=float, default=None)
    p.add_argument("--omega1p", type=float, default=None)
    p.add_argument("--branches", default=None, help="asymptotic branches, e.g. 3..6")
    p.add_argument("--study-c0", action="store_true")
    p.add_argument("--n", dest="n_dof", type=int, default=3)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_critical)

    p = sub.add_parser("reproduce", help="recompute the golden armed-biped values")
    p.add_argument("--target", choices=("armed-biped",), default="armed-biped")
    p.add_argument("--json", action="store_true")
    p.add_argument("--fixtures", default=None, help="override the golden table (JSON)")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    global _current_argv
    _current_argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CollisionlessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
