"""Coefficient estimators computable from discrete data.

All three coefficient estimators are linear in the observations, so each is
represented by a J x n operator built once per (kernel, basis, design); the
shrinkage step on top of the unbiased estimate is the only nonlinear part.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from .basis import OrthonormalBasis, phi, reconstruct
from .design import DesignGrid, build_betas_B, build_C, build_M, degenerate_components
from .errors import ContractViolation, UnderdeterminedDesignError
from .kernel import CASE_A, CASE_B, CASE_C, TriangularKernel, q_funcs
from .numerics import DEFAULT_RULE, QuadratureRule, psd_solve_or_ginverse, structural_zero_indices

Y0_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Sample:
    design: DesignGrid
    observations: np.ndarray

    def __post_init__(self):
        y = np.array(self.observations, dtype=float)
        if y.shape != (self.design.n,):
            raise ContractViolation(f"expected {self.design.n} observations, got shape {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ContractViolation("observations must be finite")
        y.setflags(write=False)
        object.__setattr__(self, "observations", y)


@dataclass(frozen=True, eq=False)
class EstimateResult:
    theta_blue: np.ndarray
    shrink_factor: float
    theta_shrunk: np.ndarray
    case: str
    c_or_m: float   # inf in case C, where no shrinkage is applied


def _increment_operator(kernel: TriangularKernel, design: DesignGrid) -> np.ndarray:
    """(n-1) x n matrix mapping Y to Y_i / v(t_i) - Y_{i-1} / v(t_{i-1})."""
    t = design.points
    inv_v = 1.0 / kernel.v(t)
    n = design.n
    D = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    D[idx, idx] = -inv_v[:-1]
    D[idx, idx + 1] = inv_v[1:]
    return D


def blue_operator(kernel: TriangularKernel, basis: OrthonormalBasis, design: DesignGrid,
                  rule: QuadratureRule = DEFAULT_RULE, M: Optional[np.ndarray] = None) -> np.ndarray:
    """J x n matrix A with theta_check = A @ Y.

    u(0) != 0:  A = C^{-1} (M B^{-1} W + Phi(0) e_1^T / (u(0) v(0)))
    u(0) == 0:  rows outside the structurally zero set use B~^{-1} W restricted to
                that block; a single structurally zero row (constant phi_j / v) is
                recovered from the errorless first observation Y_0.
    where W Y = sum_i beta_i (Y_i / v_i - Y_{i-1} / v_{i-1}) / sqrt(q_i - q_{i-1}).
    """
    if M is None:
        M = build_M(kernel, basis, rule)
    J, n = basis.J, design.n
    betas, B = build_betas_B(kernel, basis, design)
    dq = np.diff(q_funcs(kernel, design.points)[0])
    W = (betas / np.sqrt(dq)[:, None]).T @ _increment_operator(kernel, design)
    u0, v0 = kernel.u0v0()
    p0 = phi(basis, np.float64(0.0))[0]

    if u0 != 0.0:
        G, rank = psd_solve_or_ginverse(B)
        if rank < J:
            raise UnderdeterminedDesignError(
                f"design underdetermines theta: increase n (rank of B is {rank} < J = {J})")
        C = build_C(kernel, basis, rule, M)
        e0 = np.zeros(n)
        e0[0] = 1.0 / (u0 * v0)
        rhs = M @ G @ W + np.outer(p0, e0)
        try:
            return linalg.solve(C, rhs, assume_a="pos")
        except (linalg.LinAlgError, ValueError):
            raise UnderdeterminedDesignError("design underdetermines theta: C is singular") from None

    zero = degenerate_components(kernel, basis)
    zero_rows = structural_zero_indices(B)
    if not np.array_equal(np.sort(zero_rows), zero):
        raise UnderdeterminedDesignError(
            "design underdetermines theta: increase n (B is singular beyond its structural zero rows)")
    keep = np.setdiff1d(np.arange(J), zero)
    A = np.zeros((J, n))
    if keep.size:
        Bt = B[np.ix_(keep, keep)]
        Gt, rank = psd_solve_or_ginverse(Bt)
        if rank < keep.size:
            raise UnderdeterminedDesignError(
                f"design underdetermines theta: increase n (rank {rank} < {keep.size})")
        A[keep] = Gt @ W[keep]
    if zero.size > 1 or (zero.size == 1 and p0[zero[0]] == 0.0):
        raise UnderdeterminedDesignError(
            "design underdetermines theta: several constant components cannot be recovered from Y_0")
    if zero.size == 1:
        d = zero[0]
        row = -p0[keep] @ A[keep]
        row[0] += 1.0
        A[d] = row / p0[d]
    return A


def riemann_operator(basis: OrthonormalBasis, design: DesignGrid) -> np.ndarray:
    """J x n matrix of the left Riemann sum sum_i (t_i - t_{i-1}) phi_j(t_{i-1}) Y_{i-1}."""
    t = design.points
    R = np.zeros((basis.J, design.n))
    R[:, :-1] = (phi(basis, t[:-1])[0] * np.diff(t)[:, None]).T
    return R


class SeriesEstimator:
    """Precomputed unbiased and shrinkage estimators for a fixed design."""

    def __init__(self, kernel: TriangularKernel, basis: OrthonormalBasis, design: DesignGrid,
                 rule: QuadratureRule = DEFAULT_RULE):
        self.kernel, self.basis, self.design = kernel, basis, design
        self.M = build_M(kernel, basis, rule)
        self.u0 = kernel.u0v0()[0]
        self.C = build_C(kernel, basis, rule, self.M) if self.u0 != 0.0 else None
        self.A = blue_operator(kernel, basis, design, rule, self.M)
        self.R = riemann_operator(basis, design)

    def blue(self, Y: np.ndarray) -> np.ndarray:
        """Rows of ``Y`` are samples; returns one coefficient vector per row."""
        return np.asarray(Y, dtype=float) @ self.A.T

    def riemann(self, Y: np.ndarray) -> np.ndarray:
        return np.asarray(Y, dtype=float) @ self.R.T

    def shrink_factors(self, theta: np.ndarray, y0=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized factor, c or m, and case per row of ``theta``."""
        theta = np.atleast_2d(theta)
        S = theta.shape[0]
        if self.u0 != 0.0:
            cm = np.einsum("si,ij,sj->s", theta, self.C, theta)
            return cm / (1.0 + cm), cm, np.full(S, CASE_A)
        cm = np.einsum("si,ij,sj->s", theta, self.M, theta)
        factor = cm / (1.0 + cm)
        cases = np.full(S, CASE_B)
        if y0 is not None:
            exact = np.abs(np.broadcast_to(np.asarray(y0, float), (S,))) > Y0_TOL
            factor = np.where(exact, 1.0, factor)
            cm = np.where(exact, np.inf, cm)
            cases = np.where(exact, CASE_C, cases)
        return factor, cm, cases

    def shrunk(self, Y: np.ndarray) -> np.ndarray:
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        theta = self.blue(Y)
        factor, _, _ = self.shrink_factors(theta, Y[:, 0])
        return factor[:, None] * theta

    def estimate(self, Y) -> EstimateResult:
        Y = np.asarray(Y, dtype=float)
        theta = self.blue(Y)
        return shrink_estimate(theta, self.kernel, self.basis, y0=float(Y[0]), M=self.M, C=self.C)


def blue_estimate(sample: Sample, kernel: TriangularKernel, basis: OrthonormalBasis,
                  rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    return blue_operator(kernel, basis, sample.design, rule) @ sample.observations


def shrink_estimate(theta_blue, kernel: TriangularKernel, basis: OrthonormalBasis, y0: Optional[float] = None,
                    rule: QuadratureRule = DEFAULT_RULE, M: Optional[np.ndarray] = None,
                    C: Optional[np.ndarray] = None) -> EstimateResult:
    """Shrink the unbiased estimate by c/(1+c) with c = theta^T C theta (u(0) != 0) or
    theta^T M theta (u(0) = 0, errorless Y_0 = 0). With u(0) = 0 and |Y_0| above
    tolerance no shrinkage is applied.
    """
    theta = np.asarray(theta_blue, dtype=float)
    if theta.shape != (basis.J,) or not np.all(np.isfinite(theta)):
        raise ContractViolation("theta_blue must be a finite vector of length J")
    u0 = kernel.u0v0()[0]
    if u0 == 0.0 and y0 is not None and abs(y0) > Y0_TOL:
        return EstimateResult(theta.copy(), 1.0, theta.copy(), CASE_C, math.inf)
    if M is None:
        M = build_M(kernel, basis, rule)
    if u0 != 0.0:
        Q = C if C is not None else build_C(kernel, basis, rule, M)
        case = CASE_A
    else:
        Q, case = M, CASE_B
    cm = float(theta @ Q @ theta)
    factor = cm / (1.0 + cm)
    return EstimateResult(theta.copy(), factor, factor * theta, case, cm)


def riemann_estimate(sample: Sample, basis: OrthonormalBasis) -> np.ndarray:
    return riemann_operator(basis, sample.design) @ sample.observations


def estimate_functions(result: EstimateResult, basis: OrthonormalBasis) -> tuple[Callable, Callable]:
    """(f_hat, f_check): reconstructions from the shrunk and the unbiased coefficients."""
    return reconstruct(basis, result.theta_shrunk), reconstruct(basis, result.theta_blue)
