"""Incremental NEARBEST_TREE, trimming, exact best-tree errors and certificates."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterator

from .indices import (
    ROOT,
    IndexRangeError,
    QuarkletTree,
    WaveletIndex,
    WaveletTree,
    children,
    parent,
    quarklet_cardinality,
    upsilon,
)
from .local_errors import (
    LocalErrorOracle,
    NodeState,
    combine_E,
    combine_q_s,
    combine_tilde_E,
    global_error,
    tilde_e,
)


@dataclass
class StepLog:
    N: int
    lam: WaveletIndex
    qN: float
    E_root: float
    tie: bool = False


@dataclass
class RunState:
    oracle: LocalErrorOracle
    nodes: dict[WaveletIndex, NodeState]
    j_max: int | None = None
    N: int = 0
    work: int = 0
    log: list[StepLog] = field(default_factory=list)
    exhausted: bool = False

    @property
    def tree(self) -> WaveletTree:
        return WaveletTree._trusted(frozenset(self.nodes))

    @property
    def qN(self) -> float:
        return self.nodes[ROOT].q

    def log_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "lambda_j", "lambda_k", "qN", "EN_root", "tie"])
        for row in self.log:
            writer.writerow([row.N, row.lam.j, row.lam.k, repr(row.qN), repr(row.E_root), int(row.tie)])
        return buf.getvalue()


def _new_leaf(run: RunState, lam: WaveletIndex, te_parent: float | None) -> NodeState:
    e = run.oracle.local_error(lam, 0)
    st = NodeState.leaf(lam, e, tilde_e(e, te_parent))
    if run.j_max is not None and lam.j >= run.j_max:
        # cannot be subdivided: keep it out of the selection
        st.q = 0.0
    run.work += 1
    return st


def nearbest_steps(oracle: LocalErrorOracle, n_max: int, j_max: int | None = None) -> Iterator[RunState]:
    """Run NEARBEST_TREE, yielding the (mutated) state after every step.

    The first yielded state is the initialization (``N = 0``).  The run stops
    before ``n_max`` once the threshold at the root is exactly zero.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if j_max is not None and n_max > 2**j_max - 1:
        raise IndexRangeError(f"{n_max} subdivisions do not fit below level j_max={j_max}")
    run = RunState(oracle=oracle, nodes={}, j_max=j_max)
    run.nodes[ROOT] = _new_leaf(run, ROOT, None)
    yield run
    for N in range(1, n_max + 1):
        if run.nodes[ROOT].q == 0.0:
            run.exhausted = True
            return
        lam_n = run.nodes[ROOT].s
        te_n = run.nodes[lam_n].tilde_e
        for eta in children(lam_n):
            run.nodes[eta] = _new_leaf(run, eta, te_n)
        tie = False
        lam = lam_n
        while lam is not None:
            st = run.nodes[lam]
            st.r += 1
            st.e_r = oracle.local_error(lam, st.r)
            c0, c1 = children(lam)
            a, b = run.nodes[c0], run.nodes[c1]
            st.E = combine_E(a.E, b.E, st.e_r)
            st.tilde_E = combine_tilde_E(st.E, st.tilde_E)
            st.q, st.s = combine_q_s(a.q, a.s, b.q, b.s, st.tilde_E)
            tie = tie or (a.q == 0.0 and b.q == 0.0)
            run.work += 1
            lam = parent(lam)
        run.N = N
        root = run.nodes[ROOT]
        run.log.append(StepLog(N, lam_n, root.q, root.E, tie))
        yield run


def nearbest_tree(oracle: LocalErrorOracle, n_max: int, j_max: int | None = None) -> RunState:
    run = None
    for run in nearbest_steps(oracle, n_max, j_max):
        pass
    return run


def trim(run: RunState) -> QuarkletTree:
    """Cut the grown tree where polynomial enrichment beats subdivision.

    Only the stored ``E`` and ``e_r`` values are consulted; degrees on the
    kept leaves are their refinement counts in the grown tree.
    """
    degrees = {}
    stack = [ROOT]
    kept = []
    while stack:
        lam = stack.pop()
        kept.append(lam)
        st = run.nodes[lam]
        if st.E == st.e_r:
            degrees[lam] = st.r
        else:
            stack.extend(children(lam))
    return QuarkletTree.from_leaf_degrees(WaveletTree._trusted(frozenset(kept)), degrees)


def brute_force_sigma(
    oracle: LocalErrorOracle,
    n: int,
    j_bound: int,
    p_bound: int,
    node_budget: int = 2_000_000,
) -> float:
    """Exact best global error over quarklet trees with ``#T <= n``.

    Trees are restricted to levels ``<= j_bound`` and degrees ``<= p_bound``.
    The cardinality splits additively into one unit per node plus
    ``p * |upsilon(leaf)|`` per leaf, which makes an exact recursion over
    (node, budget) possible.
    """
    if n < 1:
        raise ValueError("n must be positive")
    work = 2 ** (j_bound + 1) * n * n
    if work > node_budget:
        raise MemoryError(f"search space {work} exceeds node budget {node_budget}")

    @lru_cache(maxsize=None)
    def best(lam: WaveletIndex, budget: int) -> float:
        val = math.inf
        chain = len(upsilon(lam))
        for p in range(p_bound + 1):
            if 1 + p * chain > budget:
                break
            val = min(val, oracle.local_error(lam, p))
        if lam.j < j_bound and budget >= 3:
            c0, c1 = children(lam)
            for b0 in range(1, budget - 1):
                val = min(val, best(c0, b0) + best(c1, budget - 1 - b0))
        return val

    return best(ROOT, n)


def sigma_bounds_for(n: int) -> tuple[int, int]:
    """Level and degree bounds that make :func:`brute_force_sigma` exact for ``n``."""
    return max(0, (n - 1) // 2), max(0, n - 1)


@dataclass
class Certificate:
    N: int
    n: int
    global_error: float
    sigma_n: float
    bound: float
    qN: float
    lower: float
    upper: float
    nearbest_ok: bool
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.nearbest_ok and self.lower_ok and self.upper_ok

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def certify(run: RunState, T_N: QuarkletTree, n: int, sigma_n: float, rtol: float = 1e-9) -> Certificate:
    N = run.N
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    err = global_error(T_N, run.oracle)
    qN = run.qN
    bound = (2 * N + 1) / (N - n + 1) * sigma_n
    lower = qN * (N - n + 1)
    upper = qN * (2 * N + 1)
    return Certificate(
        N=N,
        n=n,
        global_error=err,
        sigma_n=sigma_n,
        bound=bound,
        qN=qN,
        lower=lower,
        upper=upper,
        nearbest_ok=err <= bound * (1 + rtol),
        lower_ok=sigma_n >= lower * (1 - rtol),
        upper_ok=err <= upper * (1 + rtol),
    )


def cardinality_check(T_N: QuarkletTree, N: int) -> bool:
    card = quarklet_cardinality(T_N)
    depth = T_N.base.depth()
    return N + 1 <= card and 4 * card <= N * N + 6 * N + 5 and card <= (depth + 1) * N + 1
