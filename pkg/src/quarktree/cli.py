"""Command-line driver: ``quarktree {coeffs,approximate,bench,certify}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import FUNCTIONS, TestFunction, run_experiment
from .indices import IndexRangeError
from .local_errors import CoefficientErrors, CoefficientSequence
from .nearbest import brute_force_sigma, certify, nearbest_tree, trim
from .solver import SolverConfig, adaptive_coefficients

log = logging.getLogger("quarktree")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_coeffs(path: str) -> CoefficientSequence:
    return CoefficientSequence.from_csv(Path(path).read_text())


def cmd_coeffs(args) -> int:
    tf = TestFunction(args.function)
    report = adaptive_coefficients(tf, args.jmax, args.pmax, SolverConfig(tol=args.tol))
    _write(args.out, report.coefficients.to_csv())
    if args.log:
        _write(args.log, report.log_csv())
    if not report.converged:
        log.warning("solver did not reach tol=%g (final residual %.3e)", args.tol, report.residuals[-1])
    return 0


def cmd_approximate(args) -> int:
    coeffs = _load_coeffs(args.coeffs)
    run = nearbest_tree(CoefficientErrors(coeffs), args.steps, args.jmax)
    T = trim(run)
    _write(args.out_tree, T.to_json(indent=1) + "\n")
    if args.out_csv:
        _write(args.out_csv, run.log_csv())
    if run.exhausted:
        log.warning("stopped after %d steps: no error left to reduce", run.N)
    return 0


def cmd_bench(args) -> int:
    tf = TestFunction(args.function)
    p_max = 0 if args.wavelet_only else args.pmax
    exp = run_experiment(tf, args.jmax, p_max, args.steps, config=SolverConfig(tol=args.tol))
    _write(args.out, exp.to_csv())
    if not exp.converged:
        log.warning("coefficient solve did not converge; see the records with care")
    return 0


def cmd_certify(args) -> int:
    coeffs = _load_coeffs(args.coeffs)
    oracle = CoefficientErrors(coeffs)
    run = nearbest_tree(oracle, args.steps, args.jmax)
    sigma = brute_force_sigma(oracle, args.n, args.depth_bound, max(args.n - 1, 0))
    cert = certify(run, trim(run), args.n, sigma)
    _write(args.out, cert.to_json() + "\n")
    return 0 if cert.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quarktree", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="quarklet coefficients of a test function")
    p.add_argument("--function", choices=FUNCTIONS, required=True)
    p.add_argument("--jmax", type=int, default=10)
    p.add_argument("--pmax", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default="-")
    p.add_argument("--log", help="write the solver log CSV here")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("approximate", help="NEARBEST_TREE + TRIM on a coefficient file")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--jmax", type=int, help="maximal level (default: unbounded)")
    p.add_argument("--out-tree", default="-")
    p.add_argument("--out-csv")
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("bench", help="convergence records for a test function")
    p.add_argument("--function", choices=FUNCTIONS, required=True)
    p.add_argument("--wavelet-only", action="store_true")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--jmax", type=int, default=10)
    p.add_argument("--pmax", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("certify", help="check the near-best bounds against the exact best tree")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth-bound", type=int, required=True)
    p.add_argument("--jmax", type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, IndexRangeError, MemoryError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
