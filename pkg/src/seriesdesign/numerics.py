"""Quadrature, PSD generalized inverses and a seeded particle swarm minimizer."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg

from .errors import ContractViolation, NotPSDError, QuadratureError

log = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _reference_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule: ``order`` nodes on each of ``panels`` equal panels."""

    order: int = 16
    panels: int = 16

    def __post_init__(self):
        if int(self.order) < 1 or int(self.panels) < 1:
            raise ContractViolation("quadrature order and panels must be positive integers")

    def nodes_weights(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        x, w = _reference_rule(int(self.order))
        edges = np.linspace(a, b, int(self.panels) + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return nodes, weights


DEFAULT_RULE = QuadratureRule()


def integrate(f: Callable, a: float, b: float, rule: QuadratureRule = DEFAULT_RULE):
    """Integrate ``f`` over [a, b] with a composite Gauss-Legendre rule.

    ``f`` is called once with the array of all nodes and may return either one
    value per node or an array whose leading axis runs over the nodes
    (vector- and matrix-valued integrands are integrated componentwise).
    """
    if not a < b:
        raise ContractViolation(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    nodes, weights = rule.nodes_weights(a, b)
    values = np.asarray(f(nodes), dtype=float)
    if values.ndim == 0:
        values = np.full(nodes.shape, float(values))
    if values.shape[0] != nodes.shape[0]:
        raise ContractViolation("integrand must return one value per quadrature node")
    finite = np.isfinite(values.reshape(values.shape[0], -1)).all(axis=1)
    if not finite.all():
        bad = nodes[np.argmin(finite)]
        raise QuadratureError(f"non-integrable sample: integrand is not finite at node t={bad!r}")
    return np.tensordot(weights, values, axes=(0, 0))


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return ``(a + a.T) / 2``; used to keep accumulated Gram matrices exactly symmetric."""
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def structural_zero_indices(B: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Indices whose whole row (and column) is below ``rel_tol`` times the largest diagonal."""
    B = np.asarray(B, dtype=float)
    scale = np.max(np.abs(np.diag(B))) if B.size else 0.0
    if scale == 0.0:
        return np.arange(B.shape[0])
    return np.flatnonzero(np.all(np.abs(B) <= rel_tol * scale, axis=1))


def psd_solve_or_ginverse(B: np.ndarray, rel_tol: float = 1e-10,
                          warn: bool = True) -> tuple[np.ndarray, int]:
    """Inverse of a symmetric PSD matrix, or a generalized inverse when it is singular.

    Three branches, tried in order:

    * positive definite: the ordinary inverse;
    * rows/columns that are identically zero (relative to the largest diagonal
      entry) with a positive definite complement: zero block on those indices and
      the inverse of the complementary principal submatrix elsewhere;
    * anything else: the spectral pseudoinverse with eigenvalues below
      ``rel_tol * lambda_max`` dropped (a warning is logged).

    Returns the inverse-like matrix and the numerical rank. ``warn=False``
    silences the warning (used by optimizers that reject such matrices anyway).
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {B.shape}")
    if not rel_tol > 0:
        raise ContractViolation("rel_tol must be positive")
    J = B.shape[0]
    scale = float(np.max(np.abs(B))) if B.size else 0.0
    if np.max(np.abs(B - B.T), initial=0.0) > 1e-10 * max(scale, 1e-300):
        raise ContractViolation("matrix is not symmetric")
    B = symmetrize(B)
    if scale == 0.0:
        return np.zeros_like(B), 0

    eig = np.linalg.eigvalsh(B)
    lam_max = float(eig[-1])
    if eig[0] < -rel_tol * max(lam_max, scale):
        raise NotPSDError(f"matrix is not PSD: smallest eigenvalue {eig[0]:.3e}, largest {lam_max:.3e}")

    diag_scale = float(np.max(np.abs(np.diag(B))))
    zero = np.all(np.abs(B) <= rel_tol * diag_scale, axis=1)
    keep = ~zero
    if not zero.any():
        sub_eig = eig
    elif keep.any():
        sub_eig = np.linalg.eigvalsh(B[np.ix_(keep, keep)])
    else:
        sub_eig = None
    if sub_eig is not None and sub_eig[0] > rel_tol * sub_eig[-1]:
        sub = B[np.ix_(keep, keep)] if zero.any() else B
        try:
            factor = linalg.cho_factor(sub, lower=True, check_finite=False)
        except linalg.LinAlgError:
            pass
        else:
            inv = symmetrize(linalg.cho_solve(factor, np.eye(sub.shape[0]), check_finite=False))
            if not zero.any():
                return inv, J
            G = np.zeros_like(B)
            G[np.ix_(keep, keep)] = inv
            return G, int(keep.sum())

    w, V = np.linalg.eigh(B)
    mask = w > rel_tol * lam_max
    if warn:
        log.warning("matrix is rank deficient beyond structural zero rows; using spectral pseudoinverse "
                    "(rank %d of %d)", int(mask.sum()), J)
    G = (V[:, mask] / w[mask]) @ V[:, mask].T
    return symmetrize(G), int(mask.sum())


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 40
    iterations: int = 300
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ContractViolation("swarm_size must be at least 2")
        if self.iterations < 1:
            raise ContractViolation("iterations must be at least 1")
        if not 0.0 < self.inertia < 1.0:
            raise ContractViolation("inertia must lie in (0, 1)")
        if self.cognitive <= 0 or self.social <= 0:
            raise ContractViolation("cognitive and social coefficients must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ContractViolation("seed must be an unsigned 64-bit integer")


def _evaluate(objective, x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        try:
            val = float(objective(x[i].copy()))
        except (ArithmeticError, np.linalg.LinAlgError):
            val = np.inf
        out[i] = val if np.isfinite(val) else np.inf
    return out


def pso_minimize(objective: Callable[[np.ndarray], float], dim: int, lower, upper,
                 config: PsoConfig = PsoConfig()) -> tuple[np.ndarray, float]:
    """Global-best particle swarm minimization over the box [lower, upper].

    Positions leaving the box are clipped back onto it and the offending velocity
    component is zeroed. Non-finite objective values count as +inf. Particles are
    evaluated in index order, so results are bitwise reproducible for a seed.
    """
    if dim < 1:
        raise ContractViolation("pso_minimize needs dim >= 1")
    lower = np.broadcast_to(np.asarray(lower, dtype=float), (dim,)).copy()
    upper = np.broadcast_to(np.asarray(upper, dtype=float), (dim,)).copy()
    if not np.all(lower < upper):
        raise ContractViolation("lower must be strictly below upper in every coordinate")

    rng = np.random.default_rng(int(config.seed))
    span = upper - lower
    S = config.swarm_size
    x = lower + span * rng.random((S, dim))
    vel = span * (rng.random((S, dim)) - 0.5)
    vmax = span

    fx = _evaluate(objective, x)
    pbest, pbest_f = x.copy(), fx.copy()
    g = int(np.argmin(pbest_f))
    gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])

    for _ in range(config.iterations):
        r1 = rng.random((S, dim))
        r2 = rng.random((S, dim))
        vel = (config.inertia * vel
               + config.cognitive * r1 * (pbest - x)
               + config.social * r2 * (gbest - x))
        np.clip(vel, -vmax, vmax, out=vel)
        x = x + vel
        out = (x < lower) | (x > upper)
        vel[out] = 0.0
        np.clip(x, lower, upper, out=x)

        fx = _evaluate(objective, x)
        better = fx < pbest_f
        pbest[better] = x[better]
        pbest_f[better] = fx[better]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])

    return gbest, gbest_f
