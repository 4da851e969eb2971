import math

import numpy as np
import pytest

from quarktree.bench import (
    FUNCTIONS,
    Comparison,
    ExperimentRecord,
    TestFunction,
    fit_rate,
    run_experiment,
    test_function_eval,
)
from quarktree.solver import SolverConfig


def test_function_values():
    assert test_function_eval(TestFunction("singularity"), 1.0) == 1.0
    assert test_function_eval(TestFunction("reflected"), 0.0) == 1.0
    bl = TestFunction("boundary_layer")
    assert bl(0.0) == 0.0
    assert abs(bl(1.0)) < 1e-15
    assert TestFunction("spike")(1 / 3) == pytest.approx(2 / 9, rel=1e-15)


def test_function_validation():
    with pytest.raises(ValueError):
        TestFunction("nope")
    with pytest.raises(ValueError):
        TestFunction("singularity", alpha=0.5)


@pytest.mark.parametrize("name", ["singularity", "reflected"])
def test_exact_moments_match_quadrature(name):
    from scipy.integrate import quad

    tf = TestFunction(name)
    left = 0.0 if name == "singularity" else 0.75
    for p in range(4):
        exact = tf.exact_moment(left, 0.25, p)
        ref, _ = quad(lambda x: tf(x) * ((x - left) / 0.25) ** p, left, left + 0.25, epsabs=1e-14)
        assert exact == pytest.approx(ref, rel=1e-10)
    assert tf.exact_moment(0.25, 0.25, 0) is None


def _synthetic(err_fn, n=range(2, 60, 3)):
    return [(k, err_fn(k)) for k in n]


def test_fit_exponential_recovers_exact_model():
    fit = fit_rate(_synthetic(lambda n: math.exp(-0.5 * n**0.5)))
    assert fit.gamma == 0.5
    assert fit.beta == pytest.approx(0.5, rel=1e-10)
    assert fit.r2 > 0.999


def test_fit_algebraic_recovers_exact_model():
    fit = fit_rate(_synthetic(lambda n: 1.0 / n), model="algebraic")
    assert fit.s == pytest.approx(1.0, rel=1e-10)
    assert fit.r2 > 0.999


def test_fit_selects_benchmark_exponent():
    fit = fit_rate(_synthetic(lambda n: math.exp(-2 * math.log(2) * n**0.2), n=range(1, 200, 7)))
    assert fit.gamma == 0.2


def test_fit_rejects_bad_data():
    with pytest.raises(ValueError):
        fit_rate([(n, 1.0) for n in range(1, 12)])
    with pytest.raises(ValueError):
        fit_rate([(n, 0.0) for n in range(1, 12)])
    with pytest.raises(ValueError):
        fit_rate([(n, 1.0 / n) for n in range(1, 8)])
    with pytest.raises(ValueError):
        fit_rate(_synthetic(lambda n: 1.0 / n), model="cubic")


def test_fit_accepts_records():
    recs = [ExperimentRecord(N=n, dofs=n + 1, l2_error=1.0 / (n + 1), estimator=2.0 / (n + 1), qN=0.0) for n in range(10)]
    assert fit_rate(recs, "algebraic").s == pytest.approx(1.0)
    assert fit_rate(recs, "algebraic", value="estimator").C == pytest.approx(2.0)


SMALL = dict(j_max=5, p_max=3, config=SolverConfig(max_rounds=30))


def test_single_record_for_zero_steps():
    exp = run_experiment(TestFunction("spike"), n_max=0, **SMALL)
    assert len(exp.records) == 1
    rec = exp.records[0]
    assert rec.N == 0 and rec.dofs == 1
    assert exp.trees[0].pmax == {exp.trees[0].base.leaves()[0]: 0}


@pytest.mark.parametrize("name", FUNCTIONS)
def test_small_experiments_obey_structural_laws(name):
    exp = run_experiment(TestFunction(name), n_max=12, **SMALL)
    assert exp.cardinality_ok and exp.work_ok
    assert [r.N for r in exp.records] == list(range(len(exp.records)))
    assert all(r.l2_error >= 0 and r.estimator >= 0 for r in exp.records)


def test_wavelet_baseline_keeps_degree_zero():
    exp = run_experiment(TestFunction("boundary_layer"), j_max=5, p_max=0, n_max=20)
    assert all(set(T.pmax.values()) == {0} for T in exp.trees)


def test_csv_is_reproducible():
    a = run_experiment(TestFunction("reflected"), n_max=10, **SMALL).to_csv()
    b = run_experiment(TestFunction("reflected"), n_max=10, **SMALL).to_csv()
    assert a == b
    assert a.splitlines()[0] == "N,dofs,l2_error,estimator,qN"


def test_singularity_records(singularity_runs):
    q, w = singularity_runs["quarklet"], singularity_runs["wavelet"]
    for exp in (q, w):
        assert exp.cardinality_ok and exp.work_ok
        assert len(exp.records) == 51
    est = [r.estimator for r in q.records]
    assert all(b <= a for a, b in zip(est, est[1:]))
    assert all(set(T.pmax.values()) == {0} for T in w.trees)
    cmp = Comparison(q, w)
    assert cmp.common_dofs == min(max(r.dofs for r in q.records), max(r.dofs for r in w.records))
    assert np.isfinite(cmp.quarklet_error) and np.isfinite(cmp.wavelet_error)
