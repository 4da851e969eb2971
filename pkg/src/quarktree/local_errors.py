"""Coefficient-based local errors and the penalized error recursions.

The local error of a node ``lam`` at degree ``p`` is the squared coefficient
mass that a quarklet tree with leaf ``lam`` of degree ``p`` leaves out: all
degrees above ``p`` on the :func:`~quarktree.indices.upsilon` chain of
``lam`` plus everything strictly below ``lam``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol

import numpy as np

from .indices import (
    ROOT,
    IndexRangeError,
    QuarkletIndex,
    QuarkletTree,
    WaveletIndex,
    ancestors,
    is_descendant,
    upsilon,
)


class CoefficientSequence:
    """Finitely supported map ``QuarkletIndex -> float``.

    Root generator slots use ``j = -1, k = 0``.  Zero entries are kept so the
    support of a solver output survives a CSV round trip.
    """

    def __init__(self, values: Mapping | Iterable = ()):
        items = values.items() if isinstance(values, Mapping) else values
        self._c: dict[QuarkletIndex, float] = {}
        for idx, val in items:
            idx = QuarkletIndex(*idx)
            if idx.p < 0 or idx.j < -1 or (idx.j == -1 and idx.k != 0):
                raise IndexRangeError(f"invalid quarklet index {tuple(idx)}")
            if idx.j >= 0 and not 0 <= idx.k <= max(0, 2**idx.j - 1):
                raise IndexRangeError(f"invalid quarklet index {tuple(idx)}")
            self._c[idx] = self._c.get(idx, 0.0) + float(val)

    def __getitem__(self, idx) -> float:
        return self._c.get(QuarkletIndex(*idx), 0.0)

    def __len__(self) -> int:
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoefficientSequence) and self._c == other._c

    def items(self):
        return self._c.items()

    def __add__(self, other: "CoefficientSequence") -> "CoefficientSequence":
        return CoefficientSequence(list(self.items()) + list(other.items()))

    def scaled(self, factor: float) -> "CoefficientSequence":
        return CoefficientSequence({i: factor * v for i, v in self.items()})

    @property
    def j_max(self) -> int:
        return max((i.j for i in self._c), default=0)

    @property
    def p_max(self) -> int:
        return max((i.p for i in self._c), default=0)

    def squared_norm(self) -> float:
        return math.fsum(v * v for v in self._c.values())

    def restrict(self, T: QuarkletTree) -> "CoefficientSequence":
        """Coefficients of the quarklets contained in ``T``."""
        keep = set(T.quarklet_indices())
        return CoefficientSequence({i: v for i, v in self.items() if i in keep})

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "j", "k", "c"])
        for idx in sorted(self._c, key=lambda i: (i.j, i.k, i.p)):
            writer.writerow([idx.p, idx.j, idx.k, repr(self._c[idx])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoefficientSequence":
        rows = csv.reader(io.StringIO(text))
        out = []
        for row in rows:
            if not row or row[0].strip() == "p":
                continue
            p, j, k, c = row
            out.append(((int(p), int(j), int(k)), float(c)))
        return cls(out)


class LocalErrorOracle(Protocol):
    def local_error(self, lam: WaveletIndex, p: int) -> float: ...


def _node_of(idx: QuarkletIndex) -> WaveletIndex:
    return idx.wavelet


def local_error(lam: WaveletIndex, p: int, coeffs: CoefficientSequence) -> float:
    """Direct summation of the local error (reference path, O(#coeffs))."""
    lam = WaveletIndex(*lam)
    chain = set(upsilon(lam))
    total = []
    for idx, c in coeffs.items():
        mu = _node_of(idx)
        if (mu in chain and idx.p > p) or is_descendant(mu, lam):
            total.append(c * c)
    return math.fsum(total)


class CoefficientErrors:
    """Local error oracle over a coefficient sequence.

    Per-node degree tails and descendant masses are tabulated once, so each
    query costs ``O(j)``.  With ``degree_cap`` set, degrees above the cap are
    unavailable and report an infinite error; :func:`~quarktree.nearbest.trim`
    then never assigns them.
    """

    def __init__(self, coeffs: CoefficientSequence, degree_cap: int | None = None):
        self.coeffs = coeffs
        self.degree_cap = degree_cap
        npd = coeffs.p_max + 1
        mass: dict[WaveletIndex, np.ndarray] = {}
        for idx, c in coeffs.items():
            mu = _node_of(idx)
            row = mass.setdefault(mu, np.zeros(npd))
            row[idx.p] += c * c
        # tail[mu][p] = sum of masses with degree > p
        self._tail = {
            mu: np.concatenate((np.cumsum(row[::-1])[::-1][1:], [0.0])) for mu, row in mass.items()
        }
        below: dict[WaveletIndex, float] = {}
        for mu, row in mass.items():
            total = row.sum()
            for nu in ancestors(mu):
                below[nu] = below.get(nu, 0.0) + total
        self._below = below
        self._cache: dict[tuple, float] = {}
        self.calls = 0

    def descendant_mass(self, lam: WaveletIndex) -> float:
        return self._below.get(lam, 0.0)

    def local_error(self, lam: WaveletIndex, p: int) -> float:
        key = (lam, p)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.calls += 1
        if self.degree_cap is not None and p > self.degree_cap:
            val = math.inf
        else:
            val = self._below.get(lam, 0.0)
            for mu in upsilon(lam):
                tail = self._tail.get(mu)
                if tail is not None and p < len(tail):
                    val += tail[p]
            val = float(val)
        self._cache[key] = val
        return val


def tilde_e(e_lambda: float, tilde_e_parent: float | None = None) -> float:
    """Penalized local error; pass ``None`` as parent value at the root."""
    if tilde_e_parent is None:
        return e_lambda
    return _harmonic(e_lambda, tilde_e_parent)


def combine_E(E_child1: float, E_child2: float, e_r: float) -> float:
    return min(E_child1 + E_child2, e_r)


def combine_tilde_E(E_j: float, tilde_E_prev: float) -> float:
    return _harmonic(E_j, tilde_E_prev)


def _harmonic(a: float, b: float) -> float:
    if a + b == 0.0:
        return 0.0
    if math.isinf(a):
        return b
    if math.isinf(b):
        return a
    return a * b / (a + b)


def combine_q_s(q1: float, s1, q2: float, s2, tilde_E_r: float):
    """Threshold and pointer of an inner node; ties go to the first child."""
    q, s = (q1, s1) if q1 >= q2 else (q2, s2)
    return min(q, tilde_E_r), s


def global_error(T: QuarkletTree, oracle: LocalErrorOracle) -> float:
    return math.fsum(oracle.local_error(lam, p) for lam, p in T.leaf_degrees().items())


@dataclass(slots=True)
class NodeState:
    """Bookkeeping of one node during a NEARBEST_TREE run.

    ``e_r`` caches ``e_{r}(lam)`` for the current ``r`` so trimming needs no
    oracle calls.
    """

    e: float
    tilde_e: float
    r: int
    E: float
    tilde_E: float
    q: float
    s: WaveletIndex
    e_r: float

    @classmethod
    def leaf(cls, lam: WaveletIndex, e: float, te: float) -> "NodeState":
        return cls(e=e, tilde_e=te, r=0, E=e, tilde_E=te, q=te, s=lam, e_r=e)


__all__ = [
    "ROOT",
    "CoefficientErrors",
    "CoefficientSequence",
    "LocalErrorOracle",
    "NodeState",
    "combine_E",
    "combine_q_s",
    "combine_tilde_E",
    "global_error",
    "local_error",
    "tilde_e",
]
