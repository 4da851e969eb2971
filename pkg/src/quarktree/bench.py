"""Test functions, convergence experiments and rate fits."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import beta as beta_fn

from .haar import WeightRule, l2_error
from .indices import QuarkletTree, quarklet_cardinality
from .local_errors import CoefficientErrors, global_error
from .nearbest import cardinality_check, nearbest_steps, trim
from .solver import SolveReport, SolverConfig, adaptive_coefficients

logger = logging.getLogger(__name__)

FUNCTIONS = ("singularity", "reflected", "boundary_layer", "spike")


@dataclass(frozen=True)
class TestFunction:
    """One of the four benchmark targets on [0, 1].

    ``singularity`` is ``x**alpha``, ``reflected`` is ``(1-x)**alpha``,
    ``boundary_layer`` has a steep gradient at 1 controlled by ``a`` and
    ``spike`` peaks at 1/3.
    """

    __test__ = False  # not a pytest class

    name: str
    alpha: float = 0.75
    a: float = 5.0

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown test function {self.name!r}; choose from {FUNCTIONS}")
        if self.name in ("singularity", "reflected") and not self.alpha > 0.5:
            raise ValueError("alpha must exceed 1/2")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.name == "singularity":
            return np.abs(x) ** self.alpha
        if self.name == "reflected":
            return np.abs(1.0 - x) ** self.alpha
        if self.name == "boundary_layer":
            e = np.expm1(self.a * x) / math.expm1(self.a)
            return 4.0 * e * (1.0 - e)
        return x * (1.0 - x) / (1.0 + 1e4 * (x - 1.0 / 3.0) ** 2)

    @property
    def singularities(self) -> tuple[float, ...]:
        return {"singularity": (0.0,), "reflected": (1.0,)}.get(self.name, ())

    def exact_moment(self, left: float, width: float, p: int):
        """``int f(x) u**p dx`` over a cell touching the singular point, else ``None``."""
        if self.name == "singularity" and left == 0.0:
            return width ** (self.alpha + 1) / (self.alpha + p + 1)
        if self.name == "reflected" and left + width == 1.0:
            return width ** (self.alpha + 1) * float(beta_fn(p + 1, self.alpha + 1))
        return None


def test_function_eval(tf: TestFunction, x):
    return tf(x)


test_function_eval.__test__ = False


@dataclass(frozen=True)
class ExperimentRecord:
    N: int
    dofs: int
    l2_error: float
    estimator: float
    qN: float


@dataclass
class Experiment:
    function: str
    j_max: int
    p_max: int
    records: list[ExperimentRecord]
    solve: SolveReport
    trees: list[QuarkletTree] = field(default_factory=list)
    exhausted: bool = False
    cardinality_ok: bool = True
    work_ok: bool = True

    @property
    def converged(self) -> bool:
        return self.solve.converged

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "dofs", "l2_error", "estimator", "qN"])
        for r in self.records:
            writer.writerow([r.N, r.dofs, repr(r.l2_error), repr(r.estimator), repr(r.qN)])
        return buf.getvalue()


def run_experiment(
    tf: TestFunction,
    j_max: int = 10,
    p_max: int = 5,
    n_max: int = 50,
    rule: WeightRule = WeightRule(),
    config: SolverConfig = SolverConfig(),
    solve: SolveReport | None = None,
) -> Experiment:
    """Coefficients, then NEARBEST_TREE + TRIM for every ``N <= n_max``.

    With ``p_max = 0`` this is the wavelet-only baseline: degrees above 0 are
    unavailable to the oracle, so every trimmed tree keeps degree 0.  A
    precomputed ``solve`` may be passed to skip the coefficient phase.
    """
    if solve is None:
        solve = adaptive_coefficients(tf, j_max, p_max, config, rule)
    if not solve.converged:
        logger.warning("coefficient solve for %s did not converge; records are still produced", tf.name)
    coeffs = solve.coefficients
    oracle = CoefficientErrors(coeffs, degree_cap=0 if p_max == 0 else None)
    records, trees = [], []
    card_ok = work_ok = True
    run = None
    for run in nearbest_steps(oracle, n_max, j_max):
        T = trim(run)
        trees.append(T)
        est = global_error(T, oracle)
        work_ok = work_ok and run.work == sum(st.r + 1 for st in run.nodes.values())
        if run.N >= 1:
            card_ok = card_ok and cardinality_check(T, run.N)
        records.append(
            ExperimentRecord(
                N=run.N,
                dofs=quarklet_cardinality(T),
                l2_error=l2_error(tf, coeffs.restrict(T), rule),
                estimator=math.sqrt(est),
                qN=run.qN,
            )
        )
    return Experiment(tf.name, j_max, p_max, records, solve, trees, run.exhausted, card_ok, work_ok)


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of ``log(error)``.

    ``exponential``: ``error ~ C exp(-beta n**gamma)``; ``algebraic``:
    ``error ~ C n**-s``.  ``r2`` is the coefficient of determination of the
    linearized fit.
    """

    model: str
    C: float
    r2: float
    n_points: int
    beta: float | None = None
    gamma: float | None = None
    s: float | None = None


GAMMA_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    A = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_res = float(np.sum((y - a - b * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return float(a), float(b), 1.0 - ss_res / ss_tot


def fit_rate(records, model: str = "exponential", value: str = "l2_error") -> RateFit:
    """Fit the decay of ``value`` (``l2_error`` or ``estimator``) against dofs.

    ``records`` are :class:`ExperimentRecord` objects or ``(n, error)`` pairs.
    """
    pairs = [(r.dofs, getattr(r, value)) if isinstance(r, ExperimentRecord) else tuple(r) for r in records]
    n = np.array([p[0] for p in pairs], dtype=float)
    err = np.array([p[1] for p in pairs], dtype=float)
    if len(pairs) < 8:
        raise ValueError("a rate fit needs at least 8 records")
    if np.any(err <= 0.0) or np.any(n <= 0.0) or not np.all(np.isfinite(err)):
        raise ValueError("errors and dofs must be positive and finite")
    y = np.log(err)
    if np.ptp(y) == 0.0 or np.ptp(n) == 0.0:
        raise ValueError("degenerate data: constant errors or dofs")
    if model == "algebraic":
        a, b, r2 = _linfit(np.log(n), y)
        return RateFit("algebraic", C=math.exp(a), r2=r2, n_points=len(n), s=-b)
    if model != "exponential":
        raise ValueError(f"unknown model {model!r}")
    best = None
    for gamma in GAMMA_GRID:
        a, b, r2 = _linfit(n**gamma, y)
        if best is None or r2 > best[0]:
            best = (r2, gamma, a, b)
    r2, gamma, a, b = best
    return RateFit("exponential", C=math.exp(a), r2=r2, n_points=len(n), beta=-b, gamma=gamma)


@dataclass
class Comparison:
    """Quarklet run against the wavelet-only baseline."""

    quarklet: Experiment
    wavelet: Experiment
    common_dofs: int = field(init=False)
    quarklet_error: float = field(init=False)
    wavelet_error: float = field(init=False)

    def __post_init__(self):
        top = min(max(r.dofs for r in self.quarklet.records), max(r.dofs for r in self.wavelet.records))
        self.common_dofs = top
        self.quarklet_error = _error_at(self.quarklet.records, top)
        self.wavelet_error = _error_at(self.wavelet.records, top)


def _error_at(records, dofs: int) -> float:
    """Smallest error among records using at most ``dofs`` degrees of freedom."""
    return min(r.l2_error for r in records if r.dofs <= dofs)
