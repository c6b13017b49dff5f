import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from seriesdesign import (ContractViolation, DesignGrid, OrthonormalBasis, Sample, SeriesEstimator,
                          UnderdeterminedDesignError, blue_estimate, brownian, estimate_functions,
                          exponential, reconstruct, riemann_estimate, shrink_estimate)
from seriesdesign.estimator import blue_operator
from seriesdesign.simulator import replicate_rng, sample_gp
from seriesdesign.basis import constant, phi

R2 = math.sqrt(2.0)
COS3 = OrthonormalBasis(3, "cosine")
EXP_GRID = DesignGrid([0.0, 0.25, 0.52, 1.0])
BROWN_GRID = DesignGrid([0.0, 0.25, 0.47, 1.0])


def _noiseless(basis, design, theta):
    return reconstruct(basis, theta)(design.points)


def test_blue_exponential_noiseless_phi2():
    y = _noiseless(COS3, EXP_GRID, [0, 1, 0])
    np.testing.assert_allclose(blue_estimate(Sample(EXP_GRID, y), exponential(1.0), COS3), [0, 1, 0], atol=1e-9)


def test_blue_brownian_noiseless_phi2():
    y = R2 * np.cos(2 * np.pi * BROWN_GRID.points)
    np.testing.assert_allclose(blue_estimate(Sample(BROWN_GRID, y), brownian(), COS3), [0, 1, 0], atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(arrays(float, 3, elements=st.floats(-5, 5)),
       st.sampled_from([(exponential(1.0), EXP_GRID), (exponential(5.0), DesignGrid([0, .2, .4, .7, 1])),
                        (brownian(), BROWN_GRID), (brownian(), DesignGrid([0, .1, .3, .5, .8, 1]))]))
def test_blue_in_span_exactness(theta, setup):
    kernel, design = setup
    A = blue_operator(kernel, COS3, design)
    np.testing.assert_allclose(A @ _noiseless(COS3, design, theta), theta, atol=1e-8)


def test_blue_trig_basis_exponential():
    b = OrthonormalBasis(4, "trig")
    d = DesignGrid([0, 0.15, 0.4, 0.6, 0.85, 1])
    theta = np.array([0.5, -1.0, 0.3, 2.0])
    np.testing.assert_allclose(blue_operator(exponential(2.0), b, d) @ _noiseless(b, d, theta), theta, atol=1e-8)


def test_blue_unbiased_under_pure_noise():
    est = SeriesEstimator(exponential(1.0), COS3, EXP_GRID)
    zero = constant(0.0)
    Y = np.stack([sample_gp(exponential(1.0), zero, EXP_GRID, replicate_rng(9, i)) for i in range(2000)])
    th = est.blue(Y)
    se = th.std(axis=0, ddof=1) / math.sqrt(len(th))
    assert np.all(np.abs(th.mean(axis=0)) <= 3 * se)


def test_underdetermined_design():
    with pytest.raises(UnderdeterminedDesignError, match="increase n"):
        blue_operator(exponential(1.0), COS3, DesignGrid([0, 0.5, 1]))
    with pytest.raises(UnderdeterminedDesignError, match="increase n"):
        blue_operator(brownian(), COS3, DesignGrid.equidistant(4))


def test_shrink_zero():
    r = shrink_estimate(np.zeros(3), exponential(1.0), COS3)
    assert r.shrink_factor == 0.0 and not r.theta_shrunk.any()


def test_shrink_J1_exponential():
    r = shrink_estimate([1.0], exponential(1.0), OrthonormalBasis(1))
    assert r.c_or_m == pytest.approx(1.5)
    np.testing.assert_allclose(r.theta_shrunk, [0.6])
    assert r.case == "A"


@settings(max_examples=100, deadline=None)
@given(arrays(float, 3, elements=st.floats(-5, 5)), st.sampled_from([exponential(1.0), brownian()]))
def test_shrink_contracts(theta, kernel):
    r = shrink_estimate(theta, kernel, COS3, y0=0.0)
    assert r.theta_shrunk.tolist() == (r.shrink_factor * r.theta_blue).tolist()
    assert r.shrink_factor == pytest.approx(r.c_or_m / (1 + r.c_or_m))
    assert 0.0 <= r.shrink_factor < 1.0
    if np.linalg.norm(theta) > 0 and r.c_or_m > 0:
        assert np.linalg.norm(r.theta_shrunk) < np.linalg.norm(theta)


def test_shrink_brownian_case_b_uses_M():
    from seriesdesign import build_M
    theta = np.array([0.1, 0.2, 0.3])
    r = shrink_estimate(theta, brownian(), COS3, y0=0.0)
    assert r.case == "B"
    assert r.c_or_m == pytest.approx(theta @ build_M(brownian(), COS3) @ theta)


def test_shrink_case_c_unshrunk():
    r = shrink_estimate([1.0, 0.2, 0.0], brownian(), COS3, y0=1.0)
    assert r.case == "C" and r.shrink_factor == 1.0 and math.isinf(r.c_or_m)
    np.testing.assert_array_equal(r.theta_shrunk, r.theta_blue)


def test_vectorized_matches_scalar():
    est = SeriesEstimator(brownian(), COS3, BROWN_GRID)
    rng = np.random.default_rng(0)
    Y = rng.normal(size=(5, 4))
    Y[:3, 0] = 0.0
    batch = est.shrunk(Y)
    for k in range(5):
        np.testing.assert_allclose(batch[k], est.estimate(Y[k]).theta_shrunk, rtol=1e-13)


def test_shrink_rejects_bad_theta():
    with pytest.raises(ContractViolation):
        shrink_estimate([np.nan, 0, 0], exponential(1.0), COS3)
    with pytest.raises(ContractViolation):
        shrink_estimate([1.0, 0.0], exponential(1.0), COS3)


def test_riemann_constant():
    d = DesignGrid.equidistant(101)
    th = riemann_estimate(Sample(d, np.ones(101)), COS3)
    assert th[0] == pytest.approx(1.0, abs=1 / 101)


def test_riemann_phi2():
    d = DesignGrid.equidistant(1001)
    y = R2 * np.cos(2 * np.pi * d.points)
    assert abs(riemann_estimate(Sample(d, y), COS3)[1] - 1.0) < 5e-3


def test_riemann_two_points():
    d = DesignGrid([0.0, 1.0])
    np.testing.assert_allclose(riemann_estimate(Sample(d, [2.0, 7.0]), COS3), phi(COS3, 0.0)[0] * 2.0)


def test_estimate_functions():
    res = shrink_estimate([0.0, 1.0, 0.0], exponential(1.0), COS3)
    fhat, fcheck = estimate_functions(res, COS3)
    assert fcheck(0.0) == pytest.approx(R2)
    t = np.linspace(0, 1, 9)
    np.testing.assert_allclose(fcheck(t) - fhat(t), (1 - res.shrink_factor) * reconstruct(COS3, res.theta_blue)(t),
                               atol=1e-14)
    zero = shrink_estimate(np.zeros(3), exponential(1.0), COS3)
    assert not np.any(estimate_functions(zero, COS3)[0](t))


def test_sample_validation():
    with pytest.raises(ContractViolation):
        Sample(EXP_GRID, [1.0, 2.0])
    with pytest.raises(ContractViolation):
        Sample(EXP_GRID, [1.0, np.inf, 0, 0])
