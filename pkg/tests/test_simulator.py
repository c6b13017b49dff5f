import math

import numpy as np
import pytest

from seriesdesign import (ContractViolation, DesignGrid, OrthonormalBasis, SimulationConfig, brownian,
                          covariance, exponential, fourier_coefficients, integrated_squared_error,
                          model_from_name, reconstruct, run_mise, sample_gp, span_model)
from seriesdesign.basis import constant
from seriesdesign.estimator import SeriesEstimator
from seriesdesign.simulator import gp_factor, replicate_rng
from seriesdesign.kernel import covariance_matrix

COS3 = OrthonormalBasis(3, "cosine")
QUAD = model_from_name("4t(t-1)")


def test_brownian_origin_exact():
    d = DesignGrid([0, 0.3, 1])
    Y = sample_gp(brownian(), constant(0.0), d, np.random.default_rng(0), size=500)
    assert np.all(Y[:, 0] == 0.0)


def test_exponential_unit_variance_and_correlation():
    L = 2.0
    d = DesignGrid([0.0, 0.2, 0.5, 1.0])
    Y = sample_gp(exponential(L), constant(0.0), d, np.random.default_rng(1), size=20000)
    var = Y.var(axis=0, ddof=1)
    se_var = math.sqrt(2 / 19999)
    assert np.all(np.abs(var - 1.0) <= 3 * se_var)
    rho = np.corrcoef(Y[:, 1], Y[:, 2])[0, 1]
    target = math.exp(-0.3 * L)
    se_rho = (1 - target**2) / math.sqrt(20000)
    assert abs(rho - target) <= 3 * se_rho


def test_doob_increment_variance():
    k = exponential(1.0)
    d = DesignGrid([0, 0.1, 0.4, 0.45, 1])
    L = gp_factor(k, d.points)
    v = k.v(d.points)
    D = (np.diff(np.eye(5), axis=0) * 0 + np.diff(np.diag(1 / v), axis=0))
    cov = D @ (L @ L.T) @ D.T
    q = np.exp(2 * d.points)
    np.testing.assert_allclose(np.diag(cov), np.diff(q), rtol=1e-10)
    np.testing.assert_allclose(cov - np.diag(np.diag(cov)), 0, atol=1e-10)


def test_factor_reproduces_covariance():
    pts = np.array([0, 0.05, 0.3, 0.31, 0.8, 1.0])
    for k in (brownian(), exponential(1.0), exponential(5.0)):
        L = gp_factor(k, pts)
        np.testing.assert_allclose(L @ L.T, covariance_matrix(k, pts), atol=1e-12)


def test_ise_examples():
    assert integrated_squared_error(QUAD.f, QUAD) == pytest.approx(0.0, abs=1e-12)
    assert integrated_squared_error(lambda t: QUAD.f(t) + 1, QUAD) == pytest.approx(1.0, abs=1e-12)
    f3 = reconstruct(COS3, fourier_coefficients(COS3, QUAD))
    tail = sum((2 * math.sqrt(2) / (math.pi**2 * k**2)) ** 2 for k in range(3, 200000))
    assert integrated_squared_error(f3, QUAD) == pytest.approx(tail, rel=1e-6)
    assert integrated_squared_error(f3, QUAD) == pytest.approx(1.63e-3, abs=5e-6)


def _cfg(**kw):
    base = dict(kernel=brownian(), basis=COS3, model=QUAD, design=DesignGrid([0, 0.25, 0.47, 1]), S=300, seed=4)
    base.update(kw)
    return SimulationConfig(**base)


def test_run_mise_deterministic_and_schedule_independent():
    a = run_mise(_cfg())
    b = run_mise(_cfg(), threads=4, chunk=37)
    for name in ("shrunk", "blue"):
        assert a.results[name].mise == b.results[name].mise
        assert a.results[name].stderr == b.results[name].stderr


def test_run_mise_reports():
    r = run_mise(_cfg(estimators=("shrunk", "blue", "riemann")))
    assert set(r.results) == {"shrunk", "blue", "riemann"}
    assert all(v.mise >= 0 and v.stderr > 0 for v in r.results.values())
    d = r.to_dict()
    assert d["S"] == 300 and d["seed"] == 4 and d["design_points"] == [0, 0.25, 0.47, 1]


def test_config_validation():
    with pytest.raises(ContractViolation, match="estimators"):
        _cfg(estimators=())
    with pytest.raises(ContractViolation, match="unknown"):
        _cfg(estimators=("shrunk", "median"))
    with pytest.raises(ContractViolation):
        _cfg(S=0)


def test_zero_function_shrinkage_helps():
    r = run_mise(_cfg(kernel=exponential(1.0), model=constant(0.0), design=DesignGrid([0, .25, .52, 1]), S=2000))
    assert r.results["shrunk"].mise < r.results["blue"].mise


def test_mc_calibration_against_exact_variance():
    k = exponential(1.0)
    d = DesignGrid([0, 0.25, 0.52, 1])
    f = span_model(COS3, [0.2, -0.5, 0.1])
    r = run_mise(SimulationConfig(kernel=k, basis=COS3, model=f, design=d, estimators=("blue",), S=4000, seed=2))
    A = SeriesEstimator(k, COS3, d).A
    exact = float(np.trace(A @ covariance_matrix(k, d.points) @ A.T))
    res = r.results["blue"]
    assert abs(res.mise - exact) <= 4 * res.stderr


def test_replicate_streams_independent_of_order():
    a = replicate_rng(7, 3).standard_normal(4)
    replicate_rng(7, 2).standard_normal(10)
    b = replicate_rng(7, 3).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, replicate_rng(7, 4).standard_normal(4))


def test_covariance_consistency():
    assert covariance(exponential(1.0), 0.2, 0.5) == pytest.approx(math.exp(-0.3))
