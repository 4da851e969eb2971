"""Quarklet coefficients of a target function by damped Richardson iteration.

The Gramian of a quarklet system is badly conditioned (and singular in
redundant settings), so the coefficients are grown adaptively: solve on a
small active index set, zero-extend, inspect the full residual and activate
the indices where it is largest.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .haar import WeightRule, assemble_gramian, assemble_rhs, full_index_set
from .indices import QuarkletIndex, WaveletIndex, ancestors, children
from .local_errors import CoefficientSequence

logger = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    omega: float | None = None  # None: 1/lambda_max(G) by power iteration
    tol: float = 1e-6
    max_iter: int = 2000
    batch: int = 10
    initial_level: int = 2
    max_rounds: int = 400
    stagnation: float = 1e-3
    power_steps: int = 50
    seed: int = 0
    initial_degree: int | None = None  # None: every degree up to p_max


@dataclass
class SolveReport:
    coefficients: CoefficientSequence
    residuals: list[float] = field(default_factory=list)
    active_sizes: list[int] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    def log_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["round", "active_size", "residual"])
        for i, (n, r) in enumerate(zip(self.active_sizes, self.residuals)):
            writer.writerow([i, n, repr(r)])
        return buf.getvalue()


def residual_norm(G, c, b) -> float:
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    if G.shape[1] != c.shape[0] or G.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: G {G.shape}, c {c.shape}, b {b.shape}")
    return float(np.linalg.norm(G @ c - b))


def lambda_max(G, steps: int = 50, seed: int = 0) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration."""
    n = G.shape[0]
    if n == 0:
        return 0.0
    v = np.random.default_rng(seed).standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(steps):
        w = G @ v
        lam = float(v @ w)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
    # Rayleigh quotients approach from below; pad slightly
    return max(lam, float(np.linalg.norm(G @ v)))


def spectral_norm(G) -> float:
    """``||G||_2`` of a symmetric matrix (dense eigensolver or Lanczos)."""
    if G.shape[0] == 0:
        return 0.0
    if sparse.issparse(G) and G.shape[0] > 500:
        val = eigsh(G, k=1, which="LA", return_eigenvectors=False)
        return float(abs(val[0]))
    dense = G.toarray() if sparse.issparse(G) else np.asarray(G, dtype=float)
    return float(np.abs(np.linalg.eigvalsh(dense)).max())


def richardson(G, b, config: SolverConfig = SolverConfig(), c0=None, history: list | None = None):
    """Damped Richardson iteration ``c <- c + omega (b - G c)``.

    Returns ``(c, converged)``.  ``history`` receives the residual norm of
    every iterate, starting with ``c0``.
    """
    b = np.asarray(b, dtype=float)
    c = np.zeros_like(b) if c0 is None else np.array(c0, dtype=float)
    omega = config.omega
    if omega is None:
        lmax = lambda_max(G, config.power_steps, config.seed)
        omega = 1.0 / lmax if lmax > 0 else 1.0
    else:
        norm2 = spectral_norm(G)
        if omega <= 0.0 or (norm2 > 0.0 and omega >= 2.0 / norm2):
            raise ValueError(f"omega={omega} outside (0, 2/||G||_2) with ||G||_2={norm2:.6g}")
    r = b - G @ c
    res = float(np.linalg.norm(r))
    if history is not None:
        history.append(res)
    for _ in range(config.max_iter):
        if res <= config.tol:
            return c, True
        c = c + omega * r
        r = b - G @ c
        res = float(np.linalg.norm(r))
        if history is not None:
            history.append(res)
    return c, res <= config.tol


def _closure(idx: QuarkletIndex, active: set) -> list[QuarkletIndex]:
    """Indices to add with ``idx`` so the active set stays a complete tree
    with complete degrees (root generator slots travel with the root)."""
    node = idx.wavelet
    add = []
    for q in range(idx.p + 1):
        add.append(QuarkletIndex(q, node.j, node.k))
        if node.j == 0:
            add.append(QuarkletIndex(q, -1, 0))
    for mu in [node, *ancestors(node)]:
        if mu.j > 0:
            for sib in children(WaveletIndex(mu.j - 1, mu.k // 2)):
                add.append(QuarkletIndex(0, sib.j, sib.k))
        add.append(QuarkletIndex(0, mu.j, mu.k))
    add.append(QuarkletIndex(0, -1, 0))
    return [a for a in add if a not in active]


def initial_active(level: int, j_max: int, degree: int = 0) -> list[QuarkletIndex]:
    out = [QuarkletIndex(p, -1, 0) for p in range(degree + 1)]
    for j in range(min(level, j_max) + 1):
        out.extend(QuarkletIndex(p, j, k) for k in range(2**j) for p in range(degree + 1))
    return out


def adaptive_coefficients(
    f: Callable,
    j_max: int,
    p_max: int,
    config: SolverConfig = SolverConfig(),
    rule: WeightRule = WeightRule(),
) -> SolveReport:
    """Grow an active index set by residual size and solve on it.

    Stops when the full residual drops below ``config.tol``, when the index
    set is exhausted, or when a round reduces the residual by less than the
    ``config.stagnation`` fraction.
    """
    full = full_index_set(j_max, p_max)
    where = {idx: i for i, idx in enumerate(full)}
    G = assemble_gramian(full, rule, as_sparse=True)
    b = assemble_rhs(f, full, rule)
    c = np.zeros(len(full))
    report = SolveReport(CoefficientSequence())
    b_norm = float(np.linalg.norm(b))
    if b_norm <= config.tol:
        report.residuals.append(b_norm)
        report.active_sizes.append(0)
        report.converged = True
        return report

    degree = p_max if config.initial_degree is None else min(config.initial_degree, p_max)
    active: set[QuarkletIndex] = set(initial_active(config.initial_level, j_max, degree))
    inner = SolverConfig(**{**config.__dict__})
    prev = np.inf
    for rnd in range(config.max_rounds):
        pos = np.array(sorted(where[i] for i in active))
        Ga = G[pos][:, pos]
        res_hist: list[float] = []
        inner.tol = 0.1 * config.tol
        ca, _ = richardson(Ga, b[pos], inner, c0=c[pos], history=res_hist)
        report.iterations += len(res_hist) - 1
        c[:] = 0.0
        c[pos] = ca
        r = b - G @ c
        res = float(np.linalg.norm(r))
        report.residuals.append(res)
        report.active_sizes.append(len(active))
        logger.debug("round %d: active=%d residual=%.3e", rnd, len(active), res)
        if res <= config.tol:
            report.converged = True
            break
        if len(active) == len(full):
            break
        if prev < np.inf and (prev - res) < config.stagnation * prev:
            logger.warning("coefficient growth stagnated at residual %.3e", res)
            break
        prev = res
        mask = np.ones(len(full), dtype=bool)
        mask[pos] = False
        cand = np.nonzero(mask)[0]
        order = cand[np.argsort(-np.abs(r[cand]), kind="stable")][: config.batch]
        for i in order:
            new = full[i]
            if new in active:
                continue
            active.update(_closure(new, active))
            active.add(new)
    report.coefficients = CoefficientSequence({full[i]: c[i] for i in sorted(where[a] for a in active)})
    return report
