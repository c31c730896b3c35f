"""Command-line front end: ``cubicmetric {ccdf,mse,analytic,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .errors import NumericalFailure
from .montecarlo import (
    DEFAULT_REF_OVERSAMPLE,
    DEFAULT_TRIALS,
    empirical_ccdf,
    estimate_mse,
    run_sweep,
    simulate_xi,
)
from .ofdm import SUPPORTED_ORDERS, OfdmConfig, PowerNorm

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

DEFAULT_VERIFY_N = (2, 4, 8, 64, 256, 1024)


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: OfdmConfig
    trials: int = DEFAULT_TRIALS
    output_path: str | None = None
    ref_oversample: float = DEFAULT_REF_OVERSAMPLE
    oversamples: tuple[float, ...] = ()
    workers: int = 1
    n_list: tuple[int, ...] = DEFAULT_VERIFY_N
    perturb: float = 0.0
    thresholds_db: tuple[float, ...] | None = field(default=None)


def _fmt(x) -> str:
    # repr of a Python float is locale independent and round-trips
    return repr(float(x))


@contextlib.contextmanager
def _open_output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _write_csv(path: str | None, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    with _open_output(path) as fh:
        fh.write(buf.getvalue())


def _default_thresholds(xi: np.ndarray, step: float = 0.05) -> np.ndarray:
    db = 10.0 * np.log10(xi)
    lo = math.floor(db.min() / step) * step
    hi = math.ceil(db.max() / step) * step
    count = int(round((hi - lo) / step)) + 1
    return np.round(lo + step * np.arange(count), 10)


def cmd_ccdf(manifest: RunManifest) -> int:
    config = manifest.config
    xi = simulate_xi(config, manifest.trials, [config.oversample], manifest.workers)[0]
    if manifest.thresholds_db is not None:
        thresholds = np.asarray(manifest.thresholds_db, dtype=float)
    else:
        thresholds = _default_thresholds(xi)
    sim = empirical_ccdf(xi, thresholds)
    ctx = analytic.AnalyticContext(config.n_subcarriers, config.oversample)
    ana = analytic.ccdf_rcm_db(thresholds, math.sqrt(analytic.sigma_l_sq(ctx)))
    rows = [[a, p, q] for a, p, q in zip(thresholds, sim.probabilities, ana)]
    _write_csv(manifest.output_path, ["threshold_db", "ccdf_simulated", "ccdf_analytic"], rows)
    return EXIT_OK


def cmd_mse(manifest: RunManifest) -> int:
    config = manifest.config
    batches = run_sweep(config, manifest.oversamples, manifest.trials,
                        manifest.ref_oversample, manifest.workers)
    rows = []
    for batch in batches:
        est = estimate_mse(batch)
        ctx = analytic.AnalyticContext(config.n_subcarriers, batch.config.oversample)
        m_rcm = analytic.mse_rcm(ctx)
        rows.append([ctx.effective_oversample, est.mse_xi_hat, analytic.mse_xi(ctx),
                     est.mse_rcm_hat, m_rcm, m_rcm / analytic.XI_MEAN])
    _write_csv(manifest.output_path,
               ["oversample_effective", "mse_xi_sim", "mse_xi_analytic",
                "mse_rcm_sim", "mse_rcm_analytic", "normalized_mse_rcm_analytic"], rows)
    return EXIT_OK


def cmd_analytic(manifest: RunManifest) -> int:
    n = manifest.config.n_subcarriers
    rows = []
    for L in manifest.oversamples or (manifest.config.oversample,):
        rep = analytic.analytic_report(analytic.AnalyticContext(n, L))
        rows.append([str(n), rep.effective_oversample, rep.sigma_l_sq, rep.sigma_inf_sq,
                     rep.corr, rep.mse_xi, rep.mse_rcm, rep.normalized_mse_rcm])
    _write_csv(manifest.output_path,
               ["n", "oversample_effective", "sigma_l_sq", "sigma_inf_sq", "corr",
                "mse_xi", "mse_rcm", "normalized_mse_rcm"], rows)
    return EXIT_OK


def verification_checks(n_list=DEFAULT_VERIFY_N, perturb: float = 0.0):
    """Yield ``(name, error, tolerance)`` for each oracle cross-check.

    ``perturb`` scales the closed forms by ``1 + perturb``; it exists so the
    checks can be shown to fail.
    """
    scale = 1.0 + perturb
    for n in n_list:
        closed = analytic.sigma_inf_sq(n) * scale
        quad = analytic.sigma_inf_sq_quadrature(n)
        yield f"sigma_inf_sq closed vs quadrature N={n}", abs(closed - quad) / abs(quad), 1e-8
        for r in (2, 4, 6):
            closed = analytic.sinc_ratio_integral(n, r) * scale
            quad = analytic.sinc_ratio_quadrature(n, r)
            yield f"sinc_ratio_integral r={r} N={n}", abs(closed - quad) / abs(quad), 1e-8
        pinned = analytic.sigma_l_sq(analytic.AnalyticContext(n, 1.0)) * scale
        yield f"sigma_l_sq(L=1) = 684/N N={n}", abs(pinned - 684.0 / n), 0.0
    worst = 0.0
    for rho in np.linspace(-0.999, 0.999, 52)[1:-1]:
        jm = analytic.joint_moment_w(1, 1, float(rho))
        worst = max(worst, abs(jm - 36.0 - analytic.cov_w(float(rho)) * scale))
    yield "joint moment (2F1) vs covariance polynomial, 50 rho", worst, 1e-6
    yield "E[w] = 6", abs(analytic.weibull_moment(1) * scale - 6.0), 0.0
    yield "E[w^2] = 720", abs(analytic.weibull_moment(2) * scale - 720.0), 0.0
    yield "Var(w) = 684", abs(analytic.w_variance() * scale - 684.0), 0.0


def cmd_verify(manifest: RunManifest) -> int:
    failed = 0
    lines = []
    for name, err, tol in verification_checks(manifest.n_list, manifest.perturb):
        ok = err <= tol
        failed += not ok
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}  error={err:.3e}  tol={tol:.0e}")
    lines.append(f"{'all checks passed' if not failed else f'{failed} check(s) failed'}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if manifest.output_path:
        with _open_output(manifest.output_path) as fh:
            fh.write(text)
    return EXIT_OK if not failed else EXIT_VERIFY


COMMANDS = {"ccdf": cmd_ccdf, "mse": cmd_mse, "analytic": cmd_analytic, "verify": cmd_verify}


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubicmetric",
                                     description="Cubic metric statistics of OFDM signals.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=1024, help="number of subcarriers N")
    common.add_argument("--oversample", type=_float_list, default=(1.0,),
                        help="oversampling factor L (comma list for mse/analytic)")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--ref-oversample", type=float, default=DEFAULT_REF_OVERSAMPLE,
                        help="oversampling factor standing in for the continuous signal")
    common.add_argument("--constellation", type=int, default=16, choices=SUPPORTED_ORDERS)
    common.add_argument("--power-norm", default="frame", choices=[m.value for m in PowerNorm])
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-o", "--output", default=None, help="output path (default stdout)")

    sub.add_parser("ccdf", parents=[common], help="simulated vs analytic CCDF of RCM in dB")
    sub.add_parser("mse", parents=[common], help="simulated vs analytic MSE over a list of L")
    sub.add_parser("analytic", parents=[common], help="closed-form report for (N, L)")
    verify = sub.add_parser("verify", parents=[common], help="run oracle cross-checks")
    verify.add_argument("--n-list", type=_int_list, default=DEFAULT_VERIFY_N)
    verify.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def manifest_from_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RunManifest:
    oversamples = args.oversample
    if args.command == "ccdf" and len(oversamples) != 1:
        parser.error("ccdf takes a single --oversample value")
    if args.trials < (2 if args.command == "mse" else 1):
        parser.error("--trials is too small")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    if any(L > args.ref_oversample for L in oversamples) and args.command == "mse":
        parser.error("--ref-oversample must be >= every --oversample")
    try:
        config = OfdmConfig(n_subcarriers=args.n, oversample=oversamples[0],
                            constellation_order=args.constellation,
                            power_norm=args.power_norm, seed=args.seed)
        for L in oversamples:
            analytic.AnalyticContext(args.n, L)
    except ValueError as exc:
        parser.error(str(exc))
    return RunManifest(command=args.command, config=config, trials=args.trials,
                       output_path=args.output, ref_oversample=args.ref_oversample,
                       oversamples=oversamples, workers=args.workers,
                       n_list=getattr(args, "n_list", DEFAULT_VERIFY_N),
                       perturb=getattr(args, "perturb", 0.0))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = manifest_from_args(parser, args)
    try:
        return COMMANDS[manifest.command](manifest)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
