import math

import numpy as np
import pytest

from quarktree.indices import ROOT, QuarkletTree, WaveletIndex, WaveletTree
from quarktree.local_errors import (
    CoefficientErrors,
    CoefficientSequence,
    combine_E,
    combine_q_s,
    combine_tilde_E,
    global_error,
    local_error,
    tilde_e,
)

from conftest import random_sequence
from helpers import axiom_violations

L10, L11 = WaveletIndex(1, 0), WaveletIndex(1, 1)
THREE = WaveletTree([ROOT, L10, L11])


@pytest.mark.parametrize(
    "lam, p, expected", [(ROOT, 0, 1.7), (ROOT, 1, 0.7), (L10, 0, 1.1), (L11, 0, 0.1), (L10, 1, 0.0), (L11, 1, 0.0)]
)
def test_local_error_on_W(W, lam, p, expected):
    assert local_error(lam, p, W) == pytest.approx(expected, rel=1e-12, abs=1e-15)
    assert CoefficientErrors(W).local_error(lam, p) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_tilde_e_examples():
    assert tilde_e(0.0, 0.0) == 0.0
    assert tilde_e(1.1, 1.7) == pytest.approx(1.87 / 2.8, rel=1e-12)
    assert tilde_e(0.1, 1.7) == pytest.approx(0.09444, abs=1e-5)
    assert tilde_e(1.7) == 1.7


def test_combine_E_examples():
    assert combine_E(1.1, 0.1, 0.7) == pytest.approx(0.7)
    assert combine_E(0.0, 0.0, 0.0) == 0.0
    assert combine_E(0.2, 0.3, 0.9) == pytest.approx(0.5)


def test_combine_tilde_E_examples():
    assert combine_tilde_E(0.7, 1.7) == pytest.approx(0.495833, abs=1e-6)
    assert combine_tilde_E(0.0, 0.0) == 0.0
    assert combine_tilde_E(2.0, 2.0) == 1.0


def test_combine_q_s_examples():
    a, b = WaveletIndex(2, 0), WaveletIndex(2, 1)
    q, s = combine_q_s(0.66786, L10, 0.09444, L11, 0.49583)
    assert (q, s) == (0.49583, L10)
    assert combine_q_s(0.3, a, 0.3, b, 1.0) == (0.3, a)
    assert combine_q_s(0.5, a, 0.2, b, 0.7) == (0.5, a)


def test_global_error_examples(W):
    oracle = CoefficientErrors(W)
    assert global_error(QuarkletTree({ROOT: 0}), oracle) == pytest.approx(1.7)
    assert global_error(QuarkletTree({ROOT: 1}), oracle) == pytest.approx(0.7)
    T = QuarkletTree.from_leaf_degrees(THREE, {L10: 0, L11: 0})
    assert global_error(T, oracle) == pytest.approx(1.2)


def test_empty_sequence_has_zero_errors():
    oracle = CoefficientErrors(CoefficientSequence())
    assert oracle.local_error(ROOT, 0) == 0.0
    assert local_error(WaveletIndex(3, 2), 1, CoefficientSequence()) == 0.0


def test_degree_cap_blocks_higher_degrees(W):
    oracle = CoefficientErrors(W, degree_cap=0)
    assert oracle.local_error(ROOT, 0) == pytest.approx(1.7)
    assert oracle.local_error(ROOT, 1) == math.inf


def test_tabulated_matches_direct_summation():
    rng = np.random.default_rng(11)
    for _ in range(50):
        c = random_sequence(rng, 4, 3)
        oracle = CoefficientErrors(c)
        for j in range(6):
            for k in range(2**j):
                lam = WaveletIndex(j, k)
                for p in range(5):
                    assert oracle.local_error(lam, p) == pytest.approx(local_error(lam, p, c), rel=1e-12, abs=1e-300)


def test_oracle_memoizes(W):
    oracle = CoefficientErrors(W)
    oracle.local_error(ROOT, 0)
    oracle.local_error(ROOT, 0)
    assert oracle.calls == 1


def test_csv_round_trip():
    c = random_sequence(np.random.default_rng(3), 3, 2)
    text = c.to_csv()
    assert text.splitlines()[0] == "p,j,k,c"
    assert CoefficientSequence.from_csv(text) == c
    assert CoefficientSequence.from_csv(text).to_csv() == text


def test_axiom_suite_small():
    result = axiom_violations(n_seqs=60, seed=5)
    assert all(v == 0 for v in result["violations"].values()), result
    assert all(n > 0 for n in result["checks"].values())
