"""Independent oracles shared by the unit tests and the acceptance suite."""
from __future__ import annotations

import itertools
import math

import numpy as np

from quarktree.indices import ROOT, QuarkletTree, WaveletIndex, WaveletTree, children, parent, upsilon
from quarktree.local_errors import CoefficientErrors, global_error
from quarktree.nearbest import brute_force_sigma, certify, nearbest_steps, sigma_bounds_for, trim

from conftest import complete_trees, random_sequence


def rel_close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def geq(a: float, b: float, rtol: float) -> bool:
    """``a >= b`` up to relative slack."""
    return a >= b - rtol * max(abs(a), abs(b))


# --- axioms -----------------------------------------------------------------


def axiom_violations(n_seqs: int = 1000, j_max: int = 4, p_max: int = 3, seed: int = 2024) -> dict:
    """Check subadditivity, degree monotonicity and both harmonic identities
    on random coefficient sequences.  Returns violation and check counts."""
    rng = np.random.default_rng(seed)
    out = dict.fromkeys(["subadditivity", "monotonicity", "harmonic", "telescoped"], 0)
    checks = dict.fromkeys(out, 0)
    nodes = [WaveletIndex(j, k) for j in range(j_max + 1) for k in range(2**j)]
    for _ in range(n_seqs):
        oracle = CoefficientErrors(random_sequence(rng, j_max, p_max))
        e = oracle.local_error
        for lam in nodes:
            if lam.j < j_max:
                c0, c1 = children(lam)
                checks["subadditivity"] += 1
                if not geq(e(lam, 0), e(c0, 0) + e(c1, 0), 1e-12):
                    out["subadditivity"] += 1
            for p in range(p_max + 1):
                checks["monotonicity"] += 1
                if not geq(e(lam, p), e(lam, p + 1), 1e-12):
                    out["monotonicity"] += 1

        history: dict[WaveletIndex, list[float]] = {}
        for run in nearbest_steps(oracle, 2**j_max - 1, j_max):
            for lam, st in run.nodes.items():
                hist = history.setdefault(lam, [st.E])
                if st.r == len(hist):
                    hist.append(st.E)
            for lam, st in run.nodes.items():
                path = [lam, *_strict_ancestors(lam)]
                es = [e(mu, 0) for mu in path]
                if min(es) <= 0.0:
                    continue
                checks["harmonic"] += 1
                if not rel_close(1.0 / st.tilde_e, math.fsum(1.0 / x for x in es), 1e-10):
                    out["harmonic"] += 1
                Es = history[lam]
                if min(Es) <= 0.0:
                    continue
                checks["telescoped"] += 1
                rhs = math.fsum([*(1.0 / x for x in Es), *(1.0 / x for x in es[1:])])
                if not rel_close(1.0 / st.tilde_E, rhs, 1e-10):
                    out["telescoped"] += 1
    return {"violations": out, "checks": checks}


def _strict_ancestors(lam: WaveletIndex):
    lam = parent(lam)
    while lam is not None:
        yield lam
        lam = parent(lam)


# --- near-best theorem ------------------------------------------------------


def nearbest_violations(n_oracles: int = 200, j_max: int = 3, p_max: int = 2, n_steps: int = 6, seed: int = 7):
    """All three certificate inequalities for every N <= n_steps, 1 <= n <= N."""
    rng = np.random.default_rng(seed)
    violations = checks = 0
    for _ in range(n_oracles):
        oracle = CoefficientErrors(random_sequence(rng, j_max, p_max, density=rng.uniform(0.3, 1.0)))
        sigma = {}
        for n in range(1, n_steps + 1):
            jb, pb = sigma_bounds_for(n)
            sigma[n] = brute_force_sigma(oracle, n, jb, pb)
        for run in nearbest_steps(oracle, n_steps):
            T = trim(run)
            for n in range(1, run.N + 1):
                checks += 1
                if not certify(run, T, n, sigma[n]).ok:
                    violations += 1
    return violations, checks


# --- explicit enumeration of quarklet trees --------------------------------


def enumerate_sigma(oracle, n: int, depth: int, p_bound: int) -> float:
    """Best global error by listing every (tree, leaf degrees) pair."""
    best = math.inf
    for nodes in complete_trees(max_nodes=2 * n + 1, max_depth=depth):
        tree = WaveletTree(nodes)
        leaves = tree.leaves()
        for degs in itertools.product(range(p_bound + 1), repeat=len(leaves)):
            T = QuarkletTree.from_leaf_degrees(tree, dict(zip(leaves, degs)))
            card = len(tree) + sum(p * len(upsilon(lam)) for lam, p in zip(leaves, degs))
            if card <= n:
                best = min(best, global_error(T, oracle))
    return best


# --- straightforward NEARBEST_TREE ------------------------------------------


def _hm(a: float, b: float) -> float:
    if a + b == 0.0:
        return 0.0
    if a == math.inf:
        return b
    if b == math.inf:
        return a
    return a * b / (a + b)


def reference_run(oracle, n_max: int, j_max: int | None = None):
    """NEARBEST_TREE with no incremental state.

    Every step rebuilds all node values from the list of grown trees.
    Yields ``(tree_nodes, states)`` after each step, ``states`` mapping a node
    to ``(e, tilde_e, r, E, tilde_E, q, s, e_r)``.
    """
    e = oracle.local_error
    history = [frozenset([ROOT])]

    def subtree_r(nodes, lam):
        return sum(1 for mu in nodes if mu == lam or _below(mu, lam)) // 2

    def E_of(nodes, lam):
        c0, c1 = children(lam)
        if c0 not in nodes:
            return e(lam, 0)
        return min(E_of(nodes, c0) + E_of(nodes, c1), e(lam, subtree_r(nodes, lam)))

    def states(nodes):
        out = {}

        def visit(lam, te_parent):
            te = e(lam, 0) if te_parent is None else _hm(e(lam, 0), te_parent)
            r = subtree_r(nodes, lam)
            # E_k(lam) for k = 1..r, evaluated on the tree where r first reached k
            tE = te
            for k in range(1, r + 1):
                t = next(t for t in history if lam in t and subtree_r(t, lam) == k)
                tE = _hm(E_of(t, lam), tE)
            c0, c1 = children(lam)
            if c0 in nodes:
                visit(c0, te)
                visit(c1, te)
                q0, s0 = out[c0][5], out[c0][6]
                q1, s1 = out[c1][5], out[c1][6]
                q, s = (q0, s0) if q0 >= q1 else (q1, s1)
                q = min(q, tE)
            else:
                q, s = te, lam
                if j_max is not None and lam.j >= j_max:
                    q = 0.0
            out[lam] = (e(lam, 0), te, r, E_of(nodes, lam), tE, q, s, e(lam, r))

        visit(ROOT, None)
        return out

    st = states(history[-1])
    yield history[-1], st
    for _ in range(n_max):
        if st[ROOT][5] == 0.0:
            return
        lam = st[ROOT][6]
        history.append(history[-1] | set(children(lam)))
        st = states(history[-1])
        yield history[-1], st


def _below(mu: WaveletIndex, lam: WaveletIndex) -> bool:
    return mu.j > lam.j and (mu.k >> (mu.j - lam.j)) == lam.k
