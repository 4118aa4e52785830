"""Command-line interface.

Subcommands:

* ``fit``         fit a model, write it plus a report and an error-curve figure
* ``error-curve`` write the error-versus-order table (and figure)
* ``verify``      re-check a saved model against data, exit 4 on failure
* ``project``     project signals onto a saved model

Exit codes: 0 success, 1 numerical failure, 2 parse error, 3 configuration
error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from math import sqrt
from pathlib import Path

import numpy as np

from . import io, model as mdl, subspace
from .io import ConfigError, ParseError, RunConfig, fmt
from .transform import fiberize

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_PARSE = 2
EXIT_CONFIG = 3
EXIT_VERIFY = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="delimited signal table")
    parser.add_argument("--axes", required=True,
                        help="grid lengths, e.g. 128 or 16,16")
    parser.add_argument("--phases", required=True,
                        help="offsets per axis, e.g. 4 or 4,4 (each must divide the axis)")
    parser.add_argument("--complex", action="store_true",
                        help="columns come in re/im pairs")
    parser.add_argument("--rank-tol", type=float, default=1e-10,
                        help="relative eigenvalue threshold for fiber ranks")
    parser.add_argument("--gap-tol", type=float, default=1e-8,
                        help="relative spectral-gap threshold for uniqueness")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sisfit",
        description="Fit optimal shift-invariant subspace models to sampled signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model and write it to disk")
    _add_common(p_fit)
    p_fit.add_argument("--gens", type=int, required=True,
                       help="number of generators to fit")
    p_fit.add_argument("--weights", help="one positive weight per signal")
    p_fit.add_argument("--gamma", type=float,
                       help="order penalty; reports the cost-minimizing order")
    p_fit.add_argument("--out", required=True, help="model file to write")
    p_fit.add_argument("--no-plot", action="store_true",
                       help="skip the error-curve figure")

    p_curve = sub.add_parser("error-curve",
                             help="write the error-versus-order table")
    _add_common(p_curve)
    p_curve.add_argument("--weights", help="one positive weight per signal")
    p_curve.add_argument("--gamma", type=float,
                         help="order penalty; adds a cost column and selects an order")
    p_curve.add_argument("--out", required=True, help="table file to write")
    p_curve.add_argument("--no-plot", action="store_true",
                         help="skip the error-curve figure")

    p_verify = sub.add_parser("verify",
                              help="re-check a saved model against signal data")
    _add_common(p_verify)
    p_verify.add_argument("--model", required=True, help="model file to check")

    p_project = sub.add_parser("project",
                               help="project signals onto a saved model")
    _add_common(p_project)
    p_project.add_argument("--model", required=True, help="model file to use")
    p_project.add_argument("--out", required=True,
                           help="projection table to write (re/im pairs)")
    return parser


def _load_inputs(args):
    config = RunConfig.from_args(args)
    signals = io.parse_signals(args.input, config)
    weights = None
    if getattr(args, "weights", None):
        weights = io.load_weights(args.weights, signals.count)
    return config, signals, weights


def _cmd_fit(args) -> int:
    config, signals, weights = _load_inputs(args)
    if args.gens < 0:
        raise ConfigError("--gens must be >= 0")
    if args.gamma is not None and args.gamma < 0:
        raise ConfigError("--gamma must be >= 0")
    fitted, report = mdl.fit(
        signals, args.gens, weights=weights,
        rank_rel=config.rank_tol, gap_rel=config.gap_tol, gamma=args.gamma,
    )
    out = Path(args.out)
    io.save_model(out, fitted)
    report_path = out.with_name(out.stem + "_report.txt")
    report_path.write_text(io.format_report(report))
    print(f"model order {fitted.n}, error {fmt(report.error)}")
    print(f"wrote {out} and {report_path}")
    if not args.no_plot:
        prepared = signals if weights is None else mdl.apply_weights(signals, weights)
        profile = mdl.spectral_profile(mdl.gramian(fiberize(prepared)),
                                       rank_rel=config.rank_tol)
        figure_path = out.with_name(out.stem + "_curve.png")
        from .plots import render_report_figure

        render_report_figure(figure_path, report.curve, profile.eigenvalues,
                             gamma=args.gamma, selected_n=report.selected_n)
        print(f"wrote {figure_path}")
    return EXIT_OK


def _cmd_error_curve(args) -> int:
    config, signals, weights = _load_inputs(args)
    if args.gamma is not None and args.gamma < 0:
        raise ConfigError("--gamma must be >= 0")
    prepared = signals if weights is None else mdl.apply_weights(signals, weights)
    report = mdl.error_curve(prepared, gamma=args.gamma,
                             rank_rel=config.rank_tol, gap_rel=config.gap_tol,
                             weighted=weights is not None)
    io.write_curve(args.out, report.curve, gamma=args.gamma)
    if args.gamma is not None:
        print(f"selected order {report.selected_n}, error {fmt(report.error)}")
    print(f"wrote {args.out}")
    if not args.no_plot:
        out = Path(args.out)
        profile = mdl.spectral_profile(mdl.gramian(fiberize(prepared)),
                                       rank_rel=config.rank_tol)
        figure_path = out.with_name(out.stem + ".png")
        from .plots import render_report_figure

        render_report_figure(figure_path, report.curve, profile.eigenvalues,
                             gamma=args.gamma, selected_n=report.selected_n)
        print(f"wrote {figure_path}")
    return EXIT_OK


def _check(name: str, ok: bool, detail: str, failures: list[str]) -> None:
    print(f"{'pass' if ok else 'FAIL'}  {name}  {detail}")
    if not ok:
        failures.append(name)


def _cmd_verify(args) -> int:
    config = RunConfig.from_args(args)
    loaded = io.load_model(args.model)
    signals = io.parse_signals(args.input, config)
    if signals.grid != loaded.grid:
        raise ConfigError(
            f"data grid {signals.grid.axes}/{signals.grid.phases} does not match "
            f"model grid {loaded.grid.axes}/{loaded.grid.phases}"
        )
    failures: list[str] = []
    p = loaded.grid.translate_count

    lo, hi = mdl.verify_parseval(loaded, trials=50)
    _check("parseval-bounds", abs(lo - 1.0) <= 1e-9 and abs(hi - 1.0) <= 1e-9,
           f"bounds [{fmt(lo)}, {fmt(hi)}]", failures)

    cg = mdl.fiber_cross_gram(loaded)
    if loaded.n:
        eye = np.eye(loaded.n)
        off_max = float(np.max(np.abs(cg * (1.0 - eye)[None])))
    else:
        off_max = 0.0
    _check("fiber-orthogonality", off_max <= 1e-10,
           f"max off-diagonal {fmt(off_max)}", failures)

    if loaded.unique_flag and loaded.n:
        dev = float(np.max(np.abs(p * cg - np.eye(loaded.n)[None])))
        _check("translate-orthonormality", dev <= 1e-8,
               f"max |P*G - I| {fmt(dev)}", failures)

    # containment: every generator fiber must lie in the span of the data
    # fibers at the same offset (true by construction for a fresh fit)
    fibers = fiberize(signals)
    if loaded.n:
        res_total = 0.0
        for w in range(p):
            res_total += subspace.residual(loaded.fibers[:, w, :],
                                           fibers.data[w].T)
        gen_energy = float(np.sum(np.abs(loaded.fibers) ** 2))
        rel = sqrt(res_total) / (1.0 + sqrt(gen_energy))
        _check("fiber-containment", rel <= 1e-10,
               f"relative residual {fmt(rel)}", failures)

    m = signals.count
    profile = mdl.spectral_profile(mdl.gramian(fibers), rank_rel=config.rank_tol)
    n_eff = min(loaded.n, m)
    ef = mdl.error_formula(profile, n_eff)
    direct = mdl.direct_error(loaded, signals)
    _check("error-formula-vs-direct", abs(ef - direct) <= 1e-9 * (1.0 + direct),
           f"formula {fmt(ef)} direct {fmt(direct)}", failures)

    if failures:
        print(f"{len(failures)} check(s) failed: {', '.join(failures)}")
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


def _cmd_project(args) -> int:
    config = RunConfig.from_args(args)
    loaded = io.load_model(args.model)
    signals = io.parse_signals(args.input, config)
    if signals.grid != loaded.grid:
        raise ConfigError(
            f"data grid {signals.grid.axes}/{signals.grid.phases} does not match "
            f"model grid {loaded.grid.axes}/{loaded.grid.phases}"
        )
    projections = np.stack([mdl.project(loaded, row) for row in signals.samples]) \
        if signals.count else np.zeros((0, loaded.grid.size), dtype=np.complex128)
    io.write_signals(args.out, projections)
    for i, row in enumerate(signals.samples):
        res = sqrt(float(np.sum(np.abs(row - projections[i]) ** 2)))
        print(f"signal {i}: residual norm {fmt(res)}")
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "fit": _cmd_fit,
    "error-curve": _cmd_error_curve,
    "verify": _cmd_verify,
    "project": _cmd_project,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the parse-error code
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
