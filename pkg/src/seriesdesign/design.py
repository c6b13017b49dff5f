"""Moment matrices, optimal discretization weights and the design criterion tr(M B^- M)."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .basis import FunctionModel, OrthonormalBasis, fourier_coefficients, phi
from .errors import ContractViolation, DegenerateKernelError, SeriesDesignError
from .kernel import CASE_A, TriangularKernel, case_tag, q_funcs
from .numerics import (DEFAULT_RULE, PsoConfig, QuadratureRule, integrate, pso_minimize,
                       psd_solve_or_ginverse, symmetrize)

log = logging.getLogger(__name__)

COMPARATIVE_DESIGNS = {
    "comparative-n4": (0.0, 0.45, 0.90, 1.0),
    "comparative-n7": (0.0, 0.18, 0.36, 0.54, 0.72, 0.90, 1.0),
}


@dataclass(frozen=True, eq=False)
class DesignGrid:
    points: np.ndarray
    min_gap: float = 0.0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ContractViolation("a design needs at least two points")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise ContractViolation(f"design must start at 0 and end at 1, got {pts[0]} .. {pts[-1]}")
        gaps = np.diff(pts)
        if np.any(gaps <= 0):
            raise ContractViolation("design points must be strictly increasing")
        if np.any(gaps < self.min_gap):
            raise ContractViolation(f"consecutive gap below min_gap={self.min_gap}")

    @property
    def n(self) -> int:
        return int(self.points.size)

    @classmethod
    def equidistant(cls, n: int) -> "DesignGrid":
        return cls(np.linspace(0.0, 1.0, n))

    @classmethod
    def from_interior(cls, interior, min_gap: float = 0.0) -> "DesignGrid":
        return cls(np.concatenate(([0.0], np.sort(np.asarray(interior, float)), [1.0])), min_gap)

    def mirrored(self) -> "DesignGrid":
        return DesignGrid(1.0 - self.points[::-1], self.min_gap)


def named_design(name: str) -> DesignGrid:
    try:
        return DesignGrid(COMPARATIVE_DESIGNS[name])
    except KeyError:
        raise ContractViolation(f"unknown named design {name!r}") from None


@dataclass
class MomentMatrices:
    M: np.ndarray
    C: Optional[np.ndarray]
    B: np.ndarray
    B_ginv: np.ndarray
    betas: np.ndarray
    rank: int


@dataclass
class WeightSet:
    gammas: np.ndarray   # (n - 1, J), row i-2 holds gamma_i
    mus: np.ndarray


@dataclass
class L2Distance:
    variance: float
    bias: float
    k: float

    @property
    def total(self) -> float:
        return self.k * (self.variance + self.bias)


def scaled_derivative(kernel: TriangularKernel, basis: OrthonormalBasis, t) -> np.ndarray:
    """d/dt [Phi(t) / v(t)], trailing axis over basis index."""
    t = np.asarray(t, dtype=float)
    val, der = phi(basis, t)
    v, dv = kernel.v(t)[..., None], kernel.dv(t)[..., None]
    return (der * v - val * dv) / v**2


def degenerate_components(kernel: TriangularKernel, basis: OrthonormalBasis,
                          grid_size: int = 64, tol: float = 1e-12) -> np.ndarray:
    """Indices j for which phi_j / v is constant, i.e. d/dt[phi_j / v] vanishes on a grid."""
    t = np.linspace(0.0, 1.0, grid_size)
    d = scaled_derivative(kernel, basis, t)
    return np.flatnonzero(np.all(np.abs(d) <= tol, axis=0))


def build_M(kernel: TriangularKernel, basis: OrthonormalBasis, rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    def integrand(t):
        _, dq, _ = q_funcs(kernel, t)
        if np.any(dq <= 0):
            raise DegenerateKernelError("q' is not positive on [0, 1]")
        d = scaled_derivative(kernel, basis, t)
        return d[:, :, None] * d[:, None, :] / dq[:, None, None]
    return symmetrize(integrate(integrand, 0.0, 1.0, rule))


def build_C(kernel: TriangularKernel, basis: OrthonormalBasis, rule: QuadratureRule = DEFAULT_RULE,
            M: Optional[np.ndarray] = None) -> np.ndarray:
    u0, v0 = kernel.u0v0()
    if u0 == 0.0:
        raise ContractViolation("case B/C: C undefined, use M (u(0) = 0)")
    if M is None:
        M = build_M(kernel, basis, rule)
    p0 = phi(basis, np.float64(0.0))[0]
    return symmetrize(M + np.outer(p0, p0) / (u0 * v0))


def build_betas_B(kernel: TriangularKernel, basis: OrthonormalBasis, design: DesignGrid):
    """beta_i = (Phi/v (t_i) - Phi/v (t_{i-1})) / sqrt(q(t_i) - q(t_{i-1})) and B = sum beta beta^T."""
    t = design.points
    G = phi(basis, t)[0] / kernel.v(t)[:, None]
    q = q_funcs(kernel, t)[0]
    dq = np.diff(q)
    if np.any(dq <= 0):
        raise DegenerateKernelError("zero or negative q-increment between consecutive design points")
    betas = np.diff(G, axis=0) / np.sqrt(dq)[:, None]
    return betas, symmetrize(betas.T @ betas)


def moment_matrices(kernel: TriangularKernel, basis: OrthonormalBasis, design: DesignGrid,
                    rule: QuadratureRule = DEFAULT_RULE, M: Optional[np.ndarray] = None) -> MomentMatrices:
    if M is None:
        M = build_M(kernel, basis, rule)
    C = build_C(kernel, basis, rule, M) if kernel.u0v0()[0] != 0.0 else None
    betas, B = build_betas_B(kernel, basis, design)
    G, rank = psd_solve_or_ginverse(B)
    return MomentMatrices(M, C, B, G, betas, rank)


def optimal_weights(M: np.ndarray, betas: np.ndarray, B_ginv: np.ndarray, design: DesignGrid,
                    kernel: TriangularKernel) -> WeightSet:
    """gamma_i = M B^- beta_i and mu_i = gamma_i / sqrt(q(t_i) - q(t_{i-1}))."""
    betas = np.asarray(betas, dtype=float)
    J = M.shape[0]
    if betas.shape != (design.n - 1, J) or B_ginv.shape != (J, J):
        raise ContractViolation("inconsistent shapes between M, betas, B^- and the design")
    gammas = betas @ (M @ B_ginv).T
    dq = np.diff(q_funcs(kernel, design.points)[0])
    return WeightSet(gammas, gammas / np.sqrt(dq)[:, None])


def criterion(kernel: TriangularKernel, basis: OrthonormalBasis, design: DesignGrid,
              rule: QuadratureRule = DEFAULT_RULE, M: Optional[np.ndarray] = None) -> float:
    """tr(M B^- M) for the given design."""
    if M is None:
        M = build_M(kernel, basis, rule)
    _, B = build_betas_B(kernel, basis, design)
    G, _ = psd_solve_or_ginverse(B)
    return float(np.trace(M @ G @ M))


def psi(gammas: np.ndarray, M: np.ndarray) -> float:
    """-tr(M) + sum_i gamma_i^T gamma_i (discretization loss for given weights)."""
    return float(-np.trace(M) + np.sum(np.asarray(gammas) ** 2))


def optimize_design(kernel: TriangularKernel, basis: OrthonormalBasis, n: int,
                    pso: PsoConfig = PsoConfig(), min_gap: float = 1e-3,
                    rule: QuadratureRule = DEFAULT_RULE) -> tuple[DesignGrid, float]:
    """Minimize the criterion over the n - 2 interior points by particle swarm.

    Particles are sorted before evaluation and scored +inf when two points are
    closer than ``min_gap`` or when B is rank deficient beyond its structurally
    zero rows (theta would not be identifiable). The criterion is invariant under t -> 1 - t for
    reflection-symmetric problems, so when the mirrored design scores the same
    the lexicographically smaller one is returned.
    """
    n = int(n)
    if n < 3:
        raise ContractViolation("optimize_design needs n >= 3")
    if (n - 1) * min_gap >= 1.0 or min_gap < 0:
        raise ContractViolation(f"infeasible combination n={n}, min_gap={min_gap}")
    if kernel.u0v0()[0] != 0.0 and n < basis.J + 1:
        raise ContractViolation(f"need n >= J + 1 = {basis.J + 1} for a nonsingular B")
    M = build_M(kernel, basis, rule)
    # designs that leave theta unidentifiable get a spuriously small pseudoinverse score
    full_rank = basis.J - degenerate_components(kernel, basis).size

    def objective(x):
        pts = np.concatenate(([0.0], np.sort(x), [1.0]))
        if np.min(np.diff(pts)) < min_gap:
            return np.inf
        _, B = build_betas_B(kernel, basis, DesignGrid(pts))
        G, rank = psd_solve_or_ginverse(B, warn=False)
        if rank < full_rank:
            return np.inf
        return float(np.trace(M @ G @ M))

    lo, hi = min_gap, 1.0 - min_gap
    x, value = pso_minimize(objective, n - 2, np.full(n - 2, lo), np.full(n - 2, hi), pso)
    best = DesignGrid.from_interior(x, min_gap)
    try:
        mirror = best.mirrored()
        mval = criterion(kernel, basis, mirror, rule, M)
    except SeriesDesignError:
        return best, float(value)
    if abs(mval - value) <= 1e-9 * abs(value) and tuple(mirror.points) < tuple(best.points):
        return mirror, float(mval)
    return best, float(value)


def expected_l2_distance(kernel: TriangularKernel, basis: OrthonormalBasis, f: FunctionModel,
                         design: DesignGrid, weights: WeightSet,
                         rule: QuadratureRule = DEFAULT_RULE, zero_tol: float = 1e-9) -> L2Distance:
    """Variance and bias parts of E||theta_oracle - theta_discrete||^2 and the factor k.

    ``rule`` is applied on every design interval separately.
    """
    mus = np.asarray(weights.mus, dtype=float)
    if mus.shape != (design.n - 1, basis.J):
        raise ContractViolation("weights do not match the design")
    t = design.points
    variance = 0.0
    bias_vec = np.zeros(basis.J)

    def a_of(s):
        return scaled_derivative(kernel, basis, s) / q_funcs(kernel, s)[1][:, None]

    def gf(s):
        v, dv = kernel.v(s), kernel.dv(s)
        return (f.df(s) * v - f.f(s) * dv) / v**2

    for i in range(design.n - 1):
        mu = mus[i]
        lo, hi = t[i], t[i + 1]
        variance += float(integrate(
            lambda s: np.sum((a_of(s) - mu) ** 2, axis=1) * q_funcs(kernel, s)[1], lo, hi, rule))
        bias_vec += integrate(lambda s: (a_of(s) - mu) * gf(s)[:, None], lo, hi, rule)

    theta = fourier_coefficients(basis, f, rule)
    M = build_M(kernel, basis, rule)
    case = case_tag(kernel, float(f.f(np.float64(0.0))), zero_tol)
    A = build_C(kernel, basis, rule, M) if case == CASE_A else M
    cj = float(theta @ A @ theta)
    k = float(np.sum(theta**2) ** 2 / (1.0 + cj) ** 2)
    return L2Distance(variance, float(bias_vec @ bias_vec), k)
