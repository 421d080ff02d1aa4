"""Command-line front end: fit, predict, convergence, generate, report.

Exit codes: 0 success, 2 input/validation error, 3 numerical failure.  All
commands are deterministic given their inputs, flags, and seed.  The
environment variable FRF_THREADS caps internal (BLAS) parallelism; 0 or unset
means automatic.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from functools import partial

import numpy as np

from . import baselines, bench, hybrid, interpolate, io
from .errors import (
    FoldFailedError,
    FrfitError,
    OptimizationFailedError,
    SingularSystemError,
)

EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _apply_thread_cap():
    raw = os.environ.get("FRF_THREADS", "0")
    try:
        limit = int(raw)
    except ValueError:
        raise io.InputFormatError(f"FRF_THREADS must be an integer, got {raw!r}")
    if limit > 0:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=limit)


def _parse_range(text: str):
    try:
        lo, hi = text.split(":")
        lo, hi = float(lo), float(hi)
    except ValueError:
        raise io.InputFormatError(f"range must look like min:max, got {text!r}")
    if not hi > lo:
        raise io.InputFormatError(f"range must be increasing, got {text!r}")
    return lo, hi


def _parse_n_list(text: str):
    values = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            parts = chunk.split("..")
            if len(parts) == 2:
                a, b, step = int(parts[0]), int(parts[1]), 1
            elif len(parts) == 3:
                a, b, step = int(parts[0]), int(parts[1]), int(parts[2])
            else:
                raise io.InputFormatError(f"bad count spec {chunk!r}")
            values.extend(range(a, b + 1, step))
        else:
            values.append(int(chunk))
    if not values or any(v < 1 for v in values):
        raise io.InputFormatError(f"bad count spec {text!r}")
    return values


def _resolve_target(text: str, range_arg):
    """Return (reference callable or None, training set or None, default range)."""
    if text == "frat":
        return bench.f_rat, None, (0.0, 1.0)
    if text.startswith("frat-beta:"):
        beta = float(text.split(":", 1)[1])
        return partial(bench.f_rat_beta, beta=beta), None, (0.0, 1.0)
    if text.startswith("circuit:"):
        parts = text.split(":")
        seed = int(parts[1])
        dominant = len(parts) > 2 and parts[2] == "dominant"
        spec = bench.sample_random_circuit(1000, seed, with_dominant=dominant)

        def reference(w):
            return bench.circuit_admittance(spec, 1j * np.asarray(w, dtype=float))

        return reference, None, (bench.CIRCUIT_OMEGA_MIN, bench.CIRCUIT_OMEGA_MAX)
    if text.endswith(".csv"):
        ts = io.read_samples_csv(text)
        wmin, wmax = float(np.min(ts.omega)), float(np.max(ts.omega))
        return None, ts, (wmin, wmax)
    raise io.InputFormatError(f"unknown target {text!r}")


def cmd_fit(args) -> int:
    ts = io.read_samples_csv(args.input)
    if args.kernel == "se-separate" and args.symmetric:
        raise io.InputFormatError("--symmetric does not apply to se-separate")
    if args.hybrid and (args.kernel != "szego" or not args.symmetric):
        raise io.InputFormatError("--hybrid requires --kernel szego --symmetric")
    selection = None
    if args.kernel == "se-separate":
        model = baselines.separate_se_fit(ts, seed=args.seed)
        resid = np.max(
            np.abs(model.predict_at_omega(ts.omega) - ts.y)
        ) / max(np.max(np.abs(ts.y)), 1e-300)
        chosen_k = 0
        alpha = sigma2 = float("nan")
    else:
        ts = interpolate.validate_training(ts, symmetric=args.symmetric)
        if args.hybrid:
            model, selection = hybrid.fit_hybrid(ts, seed=args.seed)
            hp = selection.chosen().hyperparams
            chosen_k = selection.chosen_k
        else:
            hp = hybrid.optimize_hyperparams(
                ts,
                0,
                rng=np.random.default_rng(args.seed),
                kernel=args.kernel,
                symmetric=args.symmetric,
            )
            model = hybrid.fit_kernel_model(ts, hp, args.kernel, args.symmetric)
            chosen_k = 0
        alpha, sigma2 = hp.alpha, hp.sigma2
        resid = np.max(np.abs(model.predict_at_omega(ts.omega) - ts.y)) / max(
            np.max(np.abs(ts.y)), 1e-300
        )
    doc = io.model_to_dict(
        model, args.kernel, args.symmetric, seed=args.seed, selection=selection
    )
    io.save_model(args.out, doc)
    print(f"kernel: {args.kernel}")
    print(f"chosen K: {chosen_k}")
    print(f"alpha: {_fmt(alpha)}")
    print(f"sigma2: {_fmt(sigma2)}")
    print(f"max training residual (relative): {_fmt(resid)}")
    print(f"model written to {args.out}")
    return 0


def cmd_predict(args) -> int:
    model, *_ = io.load_model(args.model)
    if args.grid:
        try:
            lo, hi, count = args.grid.split(":")
            w = np.linspace(float(lo), float(hi), int(count))
        except ValueError:
            raise io.InputFormatError(f"--grid must look like min:max:count, got {args.grid!r}")
    elif args.at:
        w = np.array([float(v) for v in args.at])
    else:
        raise io.InputFormatError("one of --grid or --at is required")
    values = model.predict_at_omega(w)
    io.write_output(io.format_samples_csv(w, values), args.out)
    return 0


def _file_target_study(method, ts, n_list, seed):
    """Convergence rows for an ingested CSV: subsets of the file's own grid."""
    if method == "chebyshev":
        raise io.InputFormatError("chebyshev needs an analytic target, not a CSV file")
    order = np.argsort(ts.omega)
    omega, y = ts.omega[order], ts.y[order]
    rows = []
    children = np.random.SeedSequence(seed).spawn(len(n_list))
    for n, child in zip(n_list, children):
        sub_seed = int(child.generate_state(1)[0])
        try:
            if n > len(omega):
                raise io.InputFormatError(f"file has only {len(omega)} rows, need {n}")
            idx = np.unique(np.round(np.linspace(0, len(omega) - 1, n)).astype(int))
            sub = interpolate.TrainingSet(omega[idx], y[idx])
            grid = bench.Grid(float(omega[0]), float(omega[-1]), max(len(omega), 2))
            predictor = bench._fit_predictor(method, sub, None, grid, sub_seed)
            pred = np.asarray(predictor(omega), dtype=complex)
            err = float(np.sqrt(np.mean(np.abs(pred - y) ** 2)))
            rows.append(bench.ConvergenceRow(n, err))
        except Exception as exc:  # noqa: BLE001 - recorded per row
            rows.append(bench.ConvergenceRow(n, float("nan"), str(exc)))
    return rows


def cmd_convergence(args) -> int:
    method = args.method
    if method == "szego" and not args.symmetric:
        method = "szego-c0"
    reference, file_ts, default_range = _resolve_target(args.target, args.range)
    n_list = _parse_n_list(args.n)
    if file_ts is not None:
        rows = _file_target_study(method, file_ts, n_list, args.seed)
    else:
        lo, hi = _parse_range(args.range) if args.range else default_range
        grid = bench.Grid(lo, hi, bench.DEFAULT_GRID_SIZE)
        rows = bench.convergence_study(method, reference, n_list, grid, seed=args.seed)
    lines = ["N,RMSE"]
    for row in rows:
        value = "NaN" if not np.isfinite(row.rmse) else _fmt(row.rmse)
        lines.append(f"{row.n},{value}")
        if row.note:
            print(f"n={row.n}: {row.note}", file=sys.stderr)
    io.write_output("\n".join(lines) + "\n", args.out)
    return 0


def cmd_generate(args) -> int:
    if args.circuit is not None:
        spec = bench.sample_random_circuit(args.circuit, args.seed, with_dominant=args.dominant)
        doc = {
            "schema_version": io.SCHEMA_VERSION,
            "kind": "circuit",
            "seed": args.seed,
            "dominant": bool(args.dominant),
            "branches": [
                {"R": float(r), "L": float(l), "C": float(c)}
                for r, l, c in zip(spec.R, spec.L, spec.C)
            ],
        }
        io.write_output(json.dumps(doc, indent=1) + "\n", args.out)
        return 0
    if args.samples is not None:
        reference, file_ts, default_range = _resolve_target(args.samples, args.range)
        if reference is None:
            raise io.InputFormatError("--samples needs an analytic target")
        if args.n is None:
            raise io.InputFormatError("--samples requires --n")
        lo, hi = _parse_range(args.range) if args.range else default_range
        ts = bench.equidistant_samples(reference, args.n, lo, hi)
        io.write_output(io.format_samples_csv(ts.omega, ts.y), args.out)
        return 0
    raise io.InputFormatError("one of --circuit or --samples is required")


def cmd_report(args) -> int:
    _, _, _, seed, selection = io.load_model(args.model)
    if selection is None:
        raise io.InputFormatError("model has no selection report (not a hybrid fit)")
    print(f"seed: {seed}")
    print(f"lambda: {_fmt(selection.lambda_)}")
    print(f"chosen K: {selection.chosen_k}")
    print(f"{'K':>3} {'eps_loo':>14} {'eps_loo_stab':>14} {'alpha':>12} {'sigma2':>12}  chosen")
    for e in selection.per_k:
        mark = "*" if e.K == selection.chosen_k else ""
        print(
            f"{e.K:>3} {e.eps_loo:>14.6e} {e.eps_loo_stab:>14.6e} "
            f"{e.hyperparams.alpha:>12.5g} {e.hyperparams.sigma2:>12.5g}  {mark}"
        )
    if selection.elimination_trace:
        print("eliminated poles (in removal order):")
        for p in selection.elimination_trace:
            print(f"  {p.real:.6g} {p.imag:+.6g}i")
    for note in selection.notes:
        print(f"note: {note}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frfit",
        description="Kernel and rational interpolation of frequency response functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to a training CSV")
    p.add_argument("input", help="training CSV with header omega,re,im")
    p.add_argument(
        "--kernel", choices=["szego", "stable-spline", "se-separate"], default="szego"
    )
    p.add_argument("--symmetric", action="store_true", help="use the symmetry pseudo-kernel")
    p.add_argument("--hybrid", action="store_true", help="add the adaptive rational mean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output model JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a saved model")
    p.add_argument("model", help="model JSON path")
    p.add_argument("--grid", help="min:max:count evaluation grid")
    p.add_argument("--at", nargs="+", help="explicit frequencies")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("convergence", help="RMSE convergence study")
    p.add_argument(
        "--method",
        required=True,
        choices=["szego", "szego-rat", "aaa", "se-separate", "chebyshev"],
    )
    p.add_argument("--target", required=True, help="frat | frat-beta:B | circuit:SEED[:dominant] | file.csv")
    p.add_argument("--n", required=True, help="training sizes, e.g. 5..40 or 5,10,20")
    p.add_argument("--range", help="frequency window min:max")
    p.add_argument("--symmetric", action="store_true", default=True)
    p.add_argument(
        "--no-symmetric", dest="symmetric", action="store_false",
        help="use a vanishing pseudo-kernel for --method szego",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("generate", help="generate benchmark fixtures")
    p.add_argument("--circuit", type=int, help="number of random branches")
    p.add_argument("--dominant", action="store_true", help="append the two weakly damped branches")
    p.add_argument("--samples", help="analytic target to sample")
    p.add_argument("--n", type=int, help="number of samples")
    p.add_argument("--range", help="frequency window min:max")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("report", help="print a model's selection report")
    p.add_argument("model", help="model JSON path")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_thread_cap()
        return args.func(args)
    except (OptimizationFailedError, FoldFailedError, SingularSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (FrfitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
