import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from seriesdesign import (ContractViolation, DomainError, OrthonormalBasis, constant, fourier_coefficients,
                          gram_check, model_from_name, phi, reconstruct, span_model)
from seriesdesign.basis import basis_from_config

R2 = math.sqrt(2.0)
THETA_QUAD = np.array([-2 / 3, 2 * R2 / math.pi**2, 2 * R2 / (4 * math.pi**2)])


def test_cosine_at_zero():
    val, der = phi(OrthonormalBasis(3, "cosine"), 0.0)
    np.testing.assert_allclose(val, [1, R2, R2])
    np.testing.assert_allclose(der, [0, 0, 0])


def test_trig_full_at_zero():
    val, _ = phi(OrthonormalBasis(3, "trig"), 0.0)
    np.testing.assert_allclose(val, [1, R2, 0], atol=1e-15)


def test_trig_full_alias():
    assert basis_from_config({"kind": "trig-full", "J": 4}).kind == "trig"


@pytest.mark.parametrize("kind", ["cosine", "trig"])
def test_first_function_constant(kind):
    t = np.linspace(0, 1, 17)
    val, der = phi(OrthonormalBasis(4, kind), t)
    assert val.shape == (17, 4)
    assert np.all(val[:, 0] == 1.0) and np.all(der[:, 0] == 0.0)


def test_phi_domain():
    with pytest.raises(DomainError):
        phi(OrthonormalBasis(2), 1.5)


def test_fourier_of_basis_function():
    b = OrthonormalBasis(3, "cosine")
    theta = fourier_coefficients(b, lambda t: R2 * np.cos(2 * np.pi * t))
    np.testing.assert_allclose(theta, [0, 1, 0], atol=1e-10)


def test_fourier_of_quadratic():
    theta = fourier_coefficients(OrthonormalBasis(3, "cosine"), model_from_name("4t(t-1)"))
    np.testing.assert_allclose(theta, THETA_QUAD, atol=1e-12)
    assert theta[1] == pytest.approx(0.286582, abs=5e-6)
    assert theta[2] == pytest.approx(0.0716455, abs=1e-6)


def test_fourier_of_constant():
    np.testing.assert_allclose(fourier_coefficients(OrthonormalBasis(3), constant(1.0)), [1, 0, 0], atol=1e-14)


def test_gram_cosine_and_trig():
    assert gram_check(OrthonormalBasis(5, "cosine")) < 1e-10
    assert gram_check(OrthonormalBasis(7, "trig")) < 1e-10


def test_gram_custom_non_orthonormal():
    b = OrthonormalBasis(2, "custom",
                         funcs=lambda t: np.stack([np.ones_like(t), t], axis=-1),
                         derivs=lambda t: np.stack([np.zeros_like(t), np.ones_like(t)], axis=-1))
    # the (1, t) Gram matrix is [[1, 1/2], [1/2, 1/3]]
    assert gram_check(b) == pytest.approx(2 / 3, abs=1e-12)


def test_reconstruct_e1_constant():
    f = reconstruct(OrthonormalBasis(3), [1, 0, 0])
    np.testing.assert_allclose(f(np.linspace(0, 1, 5)), 1.0)


def test_reconstruct_quadratic_at_half():
    # Phi(0.5) = (1, -sqrt2, sqrt2) so the value is -2/3 - 3/pi^2
    f3 = reconstruct(OrthonormalBasis(3), THETA_QUAD)
    assert f3(0.5) == pytest.approx(-2 / 3 - 3 / math.pi**2, abs=1e-12)


def test_reconstruct_length_mismatch():
    with pytest.raises(ContractViolation):
        reconstruct(OrthonormalBasis(3), [1.0, 2.0])


@settings(max_examples=50, deadline=None)
@given(arrays(float, 5, elements=st.floats(-10, 10)), st.sampled_from(["cosine", "trig"]))
def test_round_trip_and_parseval(theta, kind):
    b = OrthonormalBasis(5, kind)
    f = reconstruct(b, theta)
    np.testing.assert_allclose(fourier_coefficients(b, f), theta, atol=1e-9)
    from seriesdesign import integrate
    assert integrate(lambda t: f(t) ** 2, 0, 1) == pytest.approx(float(theta @ theta), abs=1e-9)


@pytest.mark.parametrize("kind", ["cosine", "trig"])
def test_derivatives_match_finite_differences(kind):
    b = OrthonormalBasis(6, kind)
    t = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    fd = (phi(b, t + h)[0] - phi(b, t - h)[0]) / (2 * h)
    np.testing.assert_allclose(phi(b, t)[1], fd, atol=1e-6)


def test_models():
    q = model_from_name("4t(t-1)")
    assert q.smooth and q(0.5) == pytest.approx(-1.0)
    assert q.df(1.0) == 4.0 and float(q.d2f(0.3)) == 8.0
    s = model_from_name("sqrt(t(1-t))")
    assert not s.smooth
    assert s(0.0) == 0.0 and s(1.0) == 0.0 and s(0.5) == pytest.approx(0.5)
    assert model_from_name("const(2.5)")(0.1) == 2.5
    with pytest.raises(ContractViolation):
        model_from_name("sqrt(t(t-1))")


def test_span_model_second_derivative():
    b = OrthonormalBasis(3)
    m = span_model(b, [0.2, -1.0, 0.5])
    t, h = 0.3, 1e-4
    fd = (m.f(t + h) - 2 * m.f(t) + m.f(t - h)) / h**2
    assert float(m.d2f(t)) == pytest.approx(float(fd), rel=1e-5)
