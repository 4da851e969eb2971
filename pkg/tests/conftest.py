import math

import numpy as np
import pytest

from quarktree.indices import ROOT, QuarkletIndex, WaveletIndex, children
from quarktree.local_errors import CoefficientSequence

# squared coefficients of the three-node example sequence
W_SQUARES = {
    (0, -1, 0): 1.0,
    (0, 0, 0): 1.0,
    (0, 1, 0): 0.25,
    (0, 1, 1): 0.25,
    (1, -1, 0): 0.5,
    (1, 0, 0): 0.5,
    (1, 1, 0): 0.1,
    (1, 1, 1): 0.1,
}


def w_sequence() -> CoefficientSequence:
    return CoefficientSequence({idx: math.sqrt(v) for idx, v in W_SQUARES.items()})


@pytest.fixture
def W():
    return w_sequence()


def random_sequence(rng, j_max: int, p_max: int, density: float = 0.7) -> CoefficientSequence:
    """Random coefficients on the full index set, some entries dropped."""
    out = {}
    for p in range(p_max + 1):
        if rng.random() < density:
            out[(p, -1, 0)] = rng.standard_normal()
        for j in range(j_max + 1):
            for k in range(2**j):
                if rng.random() < density:
                    out[(p, j, k)] = rng.standard_normal() * 2.0 ** (-j * rng.random())
    return CoefficientSequence(out)


def complete_trees(max_nodes: int, max_depth: int):
    """Every complete binary tree rooted at ROOT within the given limits."""
    seen = set()
    stack = [frozenset([ROOT])]
    while stack:
        nodes = stack.pop()
        if nodes in seen:
            continue
        seen.add(nodes)
        if len(nodes) + 2 > max_nodes:
            continue
        for lam in nodes:
            c0, c1 = children(lam)
            if c0 not in nodes and lam.j < max_depth:
                stack.append(nodes | {c0, c1})
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def leaf_of(nodes, lam: WaveletIndex) -> bool:
    return children(lam)[0] not in nodes


class Singularity:
    """x**(3/4) with its exact moment on the cell at 0."""

    singularities = (0.0,)

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** 0.75

    def exact_moment(self, left, width, p):
        if left == 0.0:
            return width**1.75 / (1.75 + p)
        return None


@pytest.fixture(scope="session")
def singularity_runs():
    """Quarklet run and wavelet baseline for x**(3/4), j_max=10, p_max=5, N <= 50."""
    import time

    from quarktree.bench import TestFunction, run_experiment

    tf = TestFunction("singularity")
    t0 = time.perf_counter()
    quarklet = run_experiment(tf, j_max=10, p_max=5, n_max=50)
    wavelet = run_experiment(tf, j_max=10, p_max=0, n_max=50)
    return {"quarklet": quarklet, "wavelet": wavelet, "seconds": time.perf_counter() - t0}


def index(p, j, k):
    return QuarkletIndex(p, j, k)
