"""Optimal continuous-time linear oracle for a single Fourier coefficient.

For a triangular kernel and a C^2 regression function f the MSE-optimal signed
measure is ``theta_j / (1 + c) * (P0 delta_0 + P1 delta_1 + p(t) dt)``.  Writing
N = f'v - f v' and D = u'v - u v' (so that d/dt[f/v] = N / v^2 and q' = D / v^2):

    c   = integral N^2 / (v^2 D) dt  [+ f(0)^2 / (u(0) v(0)) if u(0) != 0]
    P0  = (f(0) u'(0) - f'(0) u(0)) / (u(0) D(0))     (zero when u(0) = 0)
    P1  = N(1) / (v(1) D(1))
    p   = -(d/dt [N / D]) / v
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .basis import FunctionModel
from .errors import ContractViolation, OracleError
from .kernel import CASE_A, CASE_B, CASE_C, TriangularKernel, case_tag
from .numerics import DEFAULT_RULE, QuadratureRule, integrate


@dataclass(frozen=True)
class OracleMeasure:
    case: str
    c: float
    P0: float
    P1: float
    p: Callable
    theta_j: float = 1.0

    @property
    def scale(self) -> float:
        return self.theta_j / (1.0 + self.c)

    def with_theta(self, theta_j: float) -> "OracleMeasure":
        return replace(self, theta_j=float(theta_j))


def _parts(kernel: TriangularKernel, f: FunctionModel, t):
    t = np.asarray(t, dtype=float)
    u, du, d2u = kernel.u(t), kernel.du(t), kernel.d2u(t)
    v, dv, d2v = kernel.v(t), kernel.dv(t), kernel.d2v(t)
    F, dF, d2F = f.f(t), f.df(t), f.d2f(t)
    N = dF * v - F * dv
    dN = d2F * v - F * d2v
    D = du * v - u * dv
    dD = d2u * v - u * d2v
    return dict(u=u, du=du, v=v, F=F, dF=dF, N=N, dN=dN, D=D, dD=dD)


def oracle_measure(kernel: TriangularKernel, f: FunctionModel, theta_j: float = 1.0,
                   rule: QuadratureRule = DEFAULT_RULE, zero_tol: float = 1e-9) -> OracleMeasure:
    if not f.smooth:
        raise OracleError(f"oracle requires C2 model; {f.name!r} has unbounded second derivative")
    f0 = float(f.f(np.float64(0.0)))
    case = case_tag(kernel, f0, zero_tol)
    if case == CASE_C:
        return OracleMeasure(CASE_C, 0.0, 1.0 / f0, 0.0, lambda t: np.zeros_like(np.asarray(t, float)),
                             float(theta_j))

    def energy(t):
        q = _parts(kernel, f, t)
        return q["N"] ** 2 / (q["v"] ** 2 * q["D"])

    c = float(integrate(energy, 0.0, 1.0, rule))
    at0 = _parts(kernel, f, np.float64(0.0))
    at1 = _parts(kernel, f, np.float64(1.0))
    if case == CASE_A:
        c += float(at0["F"] ** 2 / (at0["u"] * at0["v"]))
        P0 = float((at0["F"] * at0["du"] - at0["dF"] * at0["u"]) / (at0["u"] * at0["D"]))
    else:
        P0 = 0.0
    P1 = float(at1["N"] / (at1["v"] * at1["D"]))

    def density(t):
        q = _parts(kernel, f, t)
        dh = (q["dN"] * q["D"] - q["N"] * q["dD"]) / q["D"] ** 2
        return -dh / q["v"]

    return OracleMeasure(case, c, P0, P1, density, float(theta_j))


def oracle_mise(kernel: TriangularKernel, f: FunctionModel, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """MISE of the oracle series estimator: integral f^2 / (1 + c); zero in case C."""
    m = oracle_measure(kernel, f, rule=rule)
    if m.case == CASE_C:
        return 0.0
    energy = float(integrate(lambda t: f.f(t) ** 2, 0.0, 1.0, rule))
    return energy / (1.0 + m.c)


def integrate_against(measure: OracleMeasure, g: Callable, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """integral of g with respect to the (scaled) oracle measure."""
    g0 = float(g(np.float64(0.0)))
    g1 = float(g(np.float64(1.0)))
    body = float(integrate(lambda t: g(t) * measure.p(t), 0.0, 1.0, rule))
    return measure.scale * (measure.P0 * g0 + measure.P1 * g1 + body)


def kernel_potential(measure: OracleMeasure, kernel: TriangularKernel, t: float,
                     rule: QuadratureRule = DEFAULT_RULE) -> float:
    """integral K(s, t) xi(ds), with the density integral split at s = t."""
    t = float(t)
    ut, vt = float(kernel.u(np.float64(t))), float(kernel.v(np.float64(t)))
    atoms = measure.P0 * float(kernel.u(np.float64(0.0))) * vt + measure.P1 * ut * float(kernel.v(np.float64(1.0)))
    left = right = 0.0
    if t > 0.0:
        left = vt * float(integrate(lambda s: kernel.u(s) * measure.p(s), 0.0, t, rule))
    if t < 1.0:
        right = ut * float(integrate(lambda s: kernel.v(s) * measure.p(s), t, 1.0, rule))
    return measure.scale * (atoms + left + right)


def verify_optimality(measure: OracleMeasure, kernel: TriangularKernel, f: FunctionModel, grid,
                      rule: QuadratureRule = DEFAULT_RULE) -> float:
    """max over ``grid`` of |integral K(s, t) xi(ds) - theta_j f(t) / (1 + c)|."""
    if measure.case == CASE_C:
        raise OracleError("optimality identity is not available in case C")
    grid = np.asarray(grid, dtype=float)
    target = measure.scale * f.f(grid)
    got = np.array([kernel_potential(measure, kernel, t, rule) for t in grid])
    return float(np.max(np.abs(got - target)))


def tsybakov_comparison(theta_bar) -> tuple[float, float]:
    """MISE of the joint oracle S / (1 + S) versus the coordinatewise one sum x / (1 + x).

    ``theta_bar`` holds the derivative's Fourier coefficients; the inputs are
    squared before use.
    """
    sq = np.asarray(theta_bar, dtype=float) ** 2
    if np.any(~np.isfinite(sq)):
        raise ContractViolation("coefficients must be finite")
    total = math.fsum(sq)
    star = total / (1.0 + total)
    tilde = math.fsum(sq / (1.0 + sq))
    return star, tilde
