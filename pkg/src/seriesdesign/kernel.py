"""Triangular (Markovian) covariance kernels K(s, t) = u(min(s, t)) v(max(s, t))."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractViolation, DegenerateKernelError, DomainError

Func = Callable[[np.ndarray], np.ndarray]

CASE_A, CASE_B, CASE_C = "A", "B", "C"


def _as_time(t, name="t") -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0) or np.any(np.isnan(t)):
        raise DomainError(f"{name} must lie in [0, 1], got {t!r}")
    return t


@dataclass(frozen=True)
class TriangularKernel:
    """Kernel defined by u, v and their first two derivatives (all vectorized)."""

    name: str
    u: Func
    du: Func
    d2u: Func
    v: Func
    dv: Func
    d2v: Func
    params: tuple = field(default_factory=tuple)

    def u0v0(self) -> tuple[float, float]:
        return float(self.u(np.float64(0.0))), float(self.v(np.float64(0.0)))

    def to_config(self) -> dict:
        if self.name == "exponential":
            return {"type": "exponential", "L": float(self.params[0])}
        if self.name == "brownian":
            return {"type": "brownian"}
        return {"type": self.name, "params": list(self.params)}


def exponential(L: float = 1.0) -> TriangularKernel:
    """K(s, t) = exp(-L |s - t|): u = exp(L t), v = exp(-L t), q = exp(2 L t)."""
    L = float(L)
    if not L > 0:
        raise ContractViolation("exponential kernel needs L > 0")
    return TriangularKernel(
        name="exponential",
        u=lambda t: np.exp(L * np.asarray(t, dtype=float)),
        du=lambda t: L * np.exp(L * np.asarray(t, dtype=float)),
        d2u=lambda t: L * L * np.exp(L * np.asarray(t, dtype=float)),
        v=lambda t: np.exp(-L * np.asarray(t, dtype=float)),
        dv=lambda t: -L * np.exp(-L * np.asarray(t, dtype=float)),
        d2v=lambda t: L * L * np.exp(-L * np.asarray(t, dtype=float)),
        params=(L,),
    )


def brownian() -> TriangularKernel:
    """Brownian motion, K(s, t) = min(s, t)."""
    return TriangularKernel(
        name="brownian",
        u=lambda t: np.asarray(t, dtype=float) * 1.0,
        du=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        d2u=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        v=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        dv=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        d2v=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
    )


def kernel_from_config(spec: dict) -> TriangularKernel:
    kind = spec.get("type")
    if kind == "exponential":
        return exponential(spec.get("L", 1.0))
    if kind == "brownian":
        return brownian()
    raise ContractViolation(f"unknown kernel type {kind!r}")


def covariance(kernel: TriangularKernel, s, t):
    s = _as_time(s, "s")
    t = _as_time(t, "t")
    lo, hi = np.minimum(s, t), np.maximum(s, t)
    out = kernel.u(lo) * kernel.v(hi)
    return float(out) if np.ndim(out) == 0 else out


def covariance_matrix(kernel: TriangularKernel, points) -> np.ndarray:
    t = _as_time(points, "points")
    lo = np.minimum(t[:, None], t[None, :])
    hi = np.maximum(t[:, None], t[None, :])
    return kernel.u(lo) * kernel.v(hi)


def q_funcs(kernel: TriangularKernel, t):
    """q = u / v together with its first and second derivatives."""
    t = _as_time(t)
    u, du, d2u = kernel.u(t), kernel.du(t), kernel.d2u(t)
    v, dv, d2v = kernel.v(t), kernel.dv(t), kernel.d2v(t)
    if np.any(v == 0):
        raise DegenerateKernelError(f"v vanishes at t={t[v == 0] if np.ndim(t) else t}")
    wronskian = du * v - u * dv
    q = u / v
    dq = wronskian / v**2
    d2q = (d2u * v - u * d2v) / v**2 - 2.0 * dv * wronskian / v**3
    return q, dq, d2q


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def validate(kernel: TriangularKernel, grid_size: int = 201) -> ValidationReport:
    """Check v != 0, strict increase of q and PSD of K on a uniform grid.

    Violations are collected, never raised.
    """
    if grid_size < 2:
        raise ContractViolation("grid_size must be at least 2")
    t = np.linspace(0.0, 1.0, grid_size)
    violations, notes = [], []
    v = kernel.v(t)
    if np.any(~np.isfinite(v)) or np.any(v == 0):
        violations.append("v vanishes on the grid")
        return ValidationReport(False, violations, notes)
    q, dq, _ = q_funcs(kernel, t)
    if np.any(np.diff(q) <= 0) or np.any(dq <= 0):
        violations.append("q not increasing")
    K = covariance_matrix(kernel, t)
    diag = np.diag(K)
    if np.any(diag < -1e-12):
        violations.append("negative variance K(t,t)")
    zero = diag < 1e-12
    if zero.any():
        where = ", ".join(f"{x:g}" for x in t[zero])
        notes.append(f"u(0)=0, zero-variance at t={where}" if zero[0] and zero.sum() == 1
                     else f"zero variance at t={where}")
    sub = K[np.ix_(~zero, ~zero)]
    if sub.size:
        try:
            np.linalg.cholesky(sub)
        except np.linalg.LinAlgError:
            eig = np.linalg.eigvalsh(sub)
            if eig[0] < -1e-10 * max(eig[-1], 1.0):
                violations.append("covariance matrix not PSD on grid")
            else:
                notes.append("covariance matrix is PSD but numerically singular on grid")
    return ValidationReport(not violations, violations, notes)


def case_tag(kernel: TriangularKernel, f0: float, zero_tol: float = 1e-9) -> str:
    """Case A if u(0) != 0, else B if f(0) = 0, else C (tolerance ``zero_tol``)."""
    if zero_tol < 0:
        raise ContractViolation("zero_tol must be non-negative")
    u0, _ = kernel.u0v0()
    if abs(u0) > zero_tol:
        return CASE_A
    return CASE_B if abs(f0) <= zero_tol else CASE_C
