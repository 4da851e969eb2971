"""Haar quarks and quarklets on [0, 1], exact Gramians and load vectors.

For the Haar case the ``p``-th quark is ``x**p`` on ``[0, 1)`` and the
``p``-th quarklet is ``(2x)**p`` on ``[0, 1/2)`` and ``-(2x-1)**p`` on
``[1/2, 1)``.  Every quarklet is a monomial in a local variable on each of
its two half-cells, which is what all exact integrals below rely on.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.special import comb, roots_legendre

from .indices import QuarkletIndex
from .local_errors import CoefficientSequence


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightRule:
    """Frame weights ``w_p = (p+1)**-delta``; ``delta > 1/2`` keeps them admissible."""

    delta: float = 1.0

    def __post_init__(self):
        if self.delta <= 0.5:
            raise ValueError("delta must exceed 1/2 for a frame")

    def weight(self, p):
        return (np.asarray(p, dtype=float) + 1.0) ** -self.delta


def weight(p: int, rule: WeightRule = WeightRule()) -> float:
    return float(rule.weight(p))


def quark_eval(p: int, x):
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x < 1.0)
    return np.where(inside, np.where(inside, x, 0.0) ** p, 0.0)


def quarklet_eval(p: int, j: int, k: int, x):
    x = np.asarray(x, dtype=float)
    if j == -1:
        return quark_eval(p, x - k)
    t = 2.0**j * x - k
    return 2.0 ** (j / 2) * (quark_eval(p, 2 * t) - quark_eval(p, 2 * t - 1))


def pieces(idx: QuarkletIndex) -> list[tuple[float, float, float]]:
    """``(left, width, factor)`` with the function equal to ``factor * u**p`` there.

    ``u`` is the local variable ``(x - left) / width`` of the piece.
    """
    p, j, k = idx
    if j == -1:
        return [(float(k), 1.0, 1.0)]
    w = 2.0 ** (-j - 1)
    s = 2.0 ** (j / 2)
    return [(2 * k * w, w, s), ((2 * k + 1) * w, w, -s)]


@lru_cache(maxsize=None)
def _moment_table(n: int) -> np.ndarray:
    """``M[i, q] = int_0^1 t**i psi_q(t) dt`` for ``i, q < n``, exact rationals."""
    M = np.zeros((n, n))
    for i in range(n):
        for q in range(n):
            s = sum(Fraction(math.comb(i, l), l + q + 1) for l in range(i))
            M[i, q] = float(-s / 2 ** (i + 1))
    return M


def _coarse_on_fine(p: int, alpha: float, beta: float, q_fine: Sequence[int]) -> np.ndarray:
    """``int_0^1 (alpha + beta t)**p psi_q(t) dt`` for each ``q`` in ``q_fine``.

    ``alpha >= 0`` and all moments share one sign, so the binomial sum has
    no cancellation.
    """
    q_fine = np.asarray(q_fine, dtype=int)
    n = max(p + 1, int(q_fine.max()) + 1)
    M = _moment_table(n)
    i = np.arange(p + 1)
    coef = comb(p, i) * alpha ** (p - i) * beta**i
    return coef @ M[: p + 1][:, q_fine]


def _support(idx: QuarkletIndex) -> tuple[float, float]:
    p, j, k = idx
    if j == -1:
        return float(k), float(k + 1)
    return k * 2.0**-j, (k + 1) * 2.0**-j


def inner_product(lam, mu) -> float:
    """Exact L2(0, 1) inner product of two unweighted quarklets."""
    lam, mu = QuarkletIndex(*lam), QuarkletIndex(*mu)
    if (lam.j, lam.k) == (mu.j, mu.k):
        return 1.0 / (lam.p + mu.p + 1)
    # let lam be the coarser one
    if _level(lam) > _level(mu):
        lam, mu = mu, lam
    a0, a1 = _support(lam)
    b0, b1 = _support(mu)
    if b0 < a0 or b1 > a1:
        return 0.0
    if mu.j == -1:
        return 0.0
    for left, width, factor in pieces(lam):
        if left <= b0 and b1 <= left + width:
            alpha = (b0 - left) / width
            beta = (b1 - b0) / width
            scale = factor * 2.0 ** (-mu.j / 2)
            return float(scale * _coarse_on_fine(lam.p, alpha, beta, [mu.p])[0])
    return 0.0


def _level(idx: QuarkletIndex) -> int:
    return idx.j


def _gramian_coo(indices: Sequence[QuarkletIndex]):
    """Nonzero pattern and values of the unweighted Gramian (upper + lower)."""
    idx = [QuarkletIndex(*i) for i in indices]
    by_node: dict[tuple[int, int], list[int]] = {}
    for pos, (p, j, k) in enumerate(idx):
        by_node.setdefault((j, k), []).append(pos)
    rows, cols, vals = [], [], []
    deg = np.array([i.p for i in idx])

    def emit(r, c, block, symmetric):
        rr, cc = np.meshgrid(r, c, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(block.ravel())
        if symmetric:
            rows.append(cc.ravel())
            cols.append(rr.ravel())
            vals.append(block.ravel())

    for (j, k), pos in by_node.items():
        pos = np.array(pos)
        dp = deg[pos]
        emit(pos, pos, 1.0 / (dp[:, None] + dp[None, :] + 1.0), False)
        if j < 0:
            continue
        # coarser nodes containing this one: strict ancestors and the generator
        b0 = k * 2.0**-j
        bw = 2.0**-j
        anc = [(j - d, k >> d) for d in range(1, j + 1)] + [(-1, 0)]
        for node in anc:
            apos = by_node.get(node)
            if apos is None:
                continue
            apos = np.array(apos)
            left, width, factor = _piece_containing(node, b0)
            alpha = (b0 - left) / width
            beta = bw / width
            scale = factor * 2.0 ** (-j / 2)
            block = np.array([scale * _coarse_on_fine(int(p), alpha, beta, dp) for p in deg[apos]])
            emit(apos, pos, block, True)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def _piece_containing(node, x0):
    j, k = node
    for left, width, factor in pieces(QuarkletIndex(0, j, k)):
        if left <= x0 < left + width:
            return left, width, factor
    raise AssertionError("point outside support")


def assemble_gramian(indices: Sequence, rule: WeightRule = WeightRule(), as_sparse: bool = False):
    """Weighted Gramian ``w_p w_q <psi_lam, psi_mu>`` over the ordered index list."""
    rows, cols, vals = _gramian_coo(indices)
    w = rule.weight([QuarkletIndex(*i).p for i in indices])
    vals = vals * (w[rows] * w[cols])  # w_r w_c == w_c w_r bitwise: exact symmetry
    n = len(indices)
    G = sparse.coo_array((vals, (rows, cols)), shape=(n, n)).tocsr()
    G.eliminate_zeros()
    return G if as_sparse else G.toarray()


# --- load vectors -----------------------------------------------------------

_GL_LOW, _GL_HIGH = 24, 36


def _gl(n: int):
    x, w = roots_legendre(n)
    return (x + 1) / 2, w / 2


def _cell_moments(f: Callable, left: np.ndarray, width: np.ndarray, p_max: int, n: int) -> np.ndarray:
    """Gauss-Legendre ``int f(x) u**p dx`` on each cell, shape ``(cells, p_max+1)``."""
    t, w = _gl(n)
    x = left[:, None] + width[:, None] * t[None, :]
    fx = np.asarray(f(x), dtype=float) * w[None, :]
    powers = t[None, :] ** np.arange(p_max + 1)[:, None]
    return (fx @ powers.T) * width[:, None]


def _adaptive_moments(f, left, width, p_max, tol, depth=0, max_depth=48):
    lo = _cell_moments(f, left, width, p_max, _GL_LOW)
    hi = _cell_moments(f, left, width, p_max, _GL_HIGH)
    scale = np.maximum(np.abs(hi).max(axis=1), 1e-300)
    bad = np.abs(hi - lo).max(axis=1) > tol * np.maximum(scale, width)
    if not bad.any():
        return hi
    if depth >= max_depth:
        raise QuadratureError(f"no convergence on cell [{left[bad][0]}, {left[bad][0] + width[bad][0]})")
    # split the failing cells; local monomials transform binomially to the halves
    l, w = left[bad], width[bad]
    halves = _adaptive_moments(
        f, np.concatenate([l, l + w / 2]), np.concatenate([w / 2, w / 2]), p_max, tol, depth + 1, max_depth
    )
    m = len(l)
    hi[bad] = _merge_halves(halves[:m], halves[m:], p_max)
    return hi


def _merge_halves(left_m: np.ndarray, right_m: np.ndarray, p_max: int) -> np.ndarray:
    """Moments of a cell from moments of its halves (``u = v/2`` resp. ``(1+v)/2``)."""
    out = np.empty_like(left_m)
    for p in range(p_max + 1):
        i = np.arange(p + 1)
        c = comb(p, i) / 2.0**p
        out[:, p] = left_m[:, p] / 2.0**p + right_m[:, : p + 1] @ c
    return out


def cell_moments(f: Callable, level: int, p_max: int, tol: float = 1e-13) -> np.ndarray:
    """``int_{I_{level,k}} f(x) u**p dx`` for all cells of a level, shape ``(2**level, p_max+1)``.

    Targets may provide ``exact_moment(left, width, p)`` returning the exact
    value or ``None``; it is used for every cell where it is available (for
    singular power functions this is the cell touching the singularity).
    """
    n = 2**level
    left = np.arange(n) * 2.0**-level
    width = np.full(n, 2.0**-level)
    exact = getattr(f, "exact_moment", None)
    special = np.zeros(n, dtype=bool)
    out = np.empty((n, p_max + 1))
    if exact is not None:
        for c in range(n):
            vals = [exact(left[c], width[c], p) for p in range(p_max + 1)]
            if all(v is not None for v in vals):
                out[c] = vals
                special[c] = True
    rest = ~special
    if rest.any():
        out[rest] = _adaptive_moments(f, left[rest], width[rest], p_max, tol)
    return out


def assemble_rhs(f: Callable, indices: Sequence, rule: WeightRule = WeightRule(), tol: float = 1e-13) -> np.ndarray:
    """Weighted load vector ``w_p <f, psi_lam>``."""
    idx = [QuarkletIndex(*i) for i in indices]
    if not idx:
        return np.zeros(0)
    p_max = max(i.p for i in idx)
    needed = sorted({i.j + 1 for i in idx if i.j >= 0} | ({0} if any(i.j == -1 for i in idx) else set()))
    moments = {L: cell_moments(f, L, p_max, tol) for L in needed}
    b = np.empty(len(idx))
    for pos, (p, j, k) in enumerate(idx):
        if j == -1:
            b[pos] = moments[0][0, p]
        else:
            m = moments[j + 1]
            b[pos] = 2.0 ** (j / 2) * (m[2 * k, p] - m[2 * k + 1, p])
    return b * rule.weight([i.p for i in idx])


@dataclass
class GramianSystem:
    indices: list[QuarkletIndex]
    G: np.ndarray
    b: np.ndarray

    @classmethod
    def assemble(cls, f: Callable, indices: Sequence, rule: WeightRule = WeightRule()) -> "GramianSystem":
        indices = [QuarkletIndex(*i) for i in indices]
        return cls(indices, assemble_gramian(indices, rule), assemble_rhs(f, indices, rule))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row"] + [f"{p}:{j}:{k}" for p, j, k in self.indices] + ["rhs"])
        G = self.G.toarray() if sparse.issparse(self.G) else np.asarray(self.G)
        for (p, j, k), row, bi in zip(self.indices, G, self.b):
            writer.writerow([f"{p}:{j}:{k}"] + [repr(float(v)) for v in row] + [repr(float(bi))])
        return buf.getvalue()


def full_index_set(j_max: int, p_max: int) -> list[QuarkletIndex]:
    """The truncated index set on [0, 1], ordered by level, shift, degree."""
    out = [QuarkletIndex(p, -1, 0) for p in range(p_max + 1)]
    for j in range(j_max + 1):
        for k in range(2**j):
            out.extend(QuarkletIndex(p, j, k) for p in range(p_max + 1))
    return out


# --- synthesis and errors ----------------------------------------------------


def synthesize(c: CoefficientSequence, rule: WeightRule, x):
    """Pointwise value of ``sum c_lam w_p psi_lam`` (right-limit at breakpoints)."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    order = np.argsort(flat, kind="stable")
    xs = flat[order]
    out = np.zeros_like(xs)
    for idx, val in c.items():
        if val == 0.0:
            continue
        for left, width, factor in pieces(idx):
            lo, hi = np.searchsorted(xs, [left, left + width], side="left")
            if lo == hi:
                continue
            u = (xs[lo:hi] - left) / width
            out[lo:hi] += val * weight(idx.p, rule) * factor * u**idx.p
    result = np.empty_like(flat)
    result[order] = out
    return result.reshape(x.shape)


def _graded_cells(left, width, point, levels=50):
    """Split a cell geometrically toward an endpoint singularity."""
    if point == left:
        edges = left + width * 2.0 ** -np.arange(levels, -1, -1.0)
        edges = np.concatenate([[left], edges])
    else:
        edges = left + width - width * 2.0 ** -np.arange(0, levels + 1.0)
        edges = np.concatenate([edges, [left + width]])
    return edges[:-1], np.diff(edges)


def l2_error(f: Callable, c: CoefficientSequence, rule: WeightRule = WeightRule(), n_points: int = 20, tol: float = 1e-10) -> float:
    """``||f - synthesize(c)||_{L2(0,1)}`` by composite Gauss-Legendre.

    Cells are the finest dyadic cells carrying breakpoints of the active
    quarklets; cells touching a declared singularity of ``f`` are graded
    geometrically, and cells where ``n_points`` and ``2*n_points`` rules
    disagree are bisected.
    """
    active = [i for i, v in c.items() if v != 0.0]
    level = max([i.j + 1 for i in active if i.j >= 0], default=0)
    n = 2**level
    left = np.arange(n) * 2.0**-level
    width = np.full(n, 2.0**-level)
    sing = tuple(getattr(f, "singularities", ()))
    plain = np.ones(n, dtype=bool)
    lefts, widths = [], []
    for s in sing:
        for cidx in np.nonzero((left <= s) & (s <= left + width))[0]:
            if plain[cidx] and s in (left[cidx], left[cidx] + width[cidx]):
                plain[cidx] = False
                gl, gw = _graded_cells(left[cidx], width[cidx], s)
                lefts.append(gl)
                widths.append(gw)
    lefts.append(left[plain])
    widths.append(width[plain])
    left = np.concatenate(lefts)
    width = np.concatenate(widths)

    def sq_err(x):
        fx = np.asarray(f(x), dtype=float)
        sx = synthesize(c, rule, x)
        # second value: size of the terms, to bound cancellation noise
        return (fx - sx) ** 2, fx * fx + sx * sx

    total = _adaptive_integral(sq_err, left, width, n_points, tol, None)
    return math.sqrt(max(total, 0.0))


def _adaptive_integral(g, left, width, n, tol, atol, depth=0, max_depth=30, max_cells=2_000_000):
    """Integrate ``g(x)[0]``; ``g(x)[1]`` is a magnitude used for the noise floor."""
    if len(left) > max_cells:
        raise QuadratureError("L2 error quadrature needs too many cells")
    t1, w1 = _gl(n)
    t2, w2 = _gl(2 * n)
    x1 = left[:, None] + width[:, None] * t1[None, :]
    x2 = left[:, None] + width[:, None] * t2[None, :]
    v1 = (g(x1)[0] * w1).sum(axis=1) * width
    g2, m2 = g(x2)
    v2 = (g2 * w2).sum(axis=1) * width
    if atol is None:
        scale = math.fsum((m2 * w2).sum(axis=1) * width)
        atol = max(tol * abs(math.fsum(v2)), 1e-13 * scale) + 1e-300
    bad = np.abs(v1 - v2) > atol * width
    if not bad.any():
        return math.fsum(v2)
    if depth >= max_depth:
        raise QuadratureError("L2 error quadrature did not converge")
    l, w = left[bad], width[bad]
    return math.fsum(v2[~bad]) + _adaptive_integral(
        g, np.concatenate([l, l + w / 2]), np.concatenate([w / 2, w / 2]), n, tol, atol, depth + 1, max_depth
    )


def sample_csv(g: Callable, n: int = 1025) -> str:
    """``x,value`` samples of ``g`` on a uniform grid of [0, 1]."""
    x = np.linspace(0.0, 1.0, n)
    y = g(x)
    lines = ["x,value"] + [f"{xi!r},{float(yi)!r}" for xi, yi in zip(x.tolist(), np.ravel(y))]
    return "\n".join(lines) + "\n"
