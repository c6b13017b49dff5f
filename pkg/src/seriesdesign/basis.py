"""Orthonormal systems on [0, 1], regression-function models and Fourier coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation, DomainError
from .numerics import DEFAULT_RULE, QuadratureRule, integrate

SQRT2 = np.sqrt(2.0)
KINDS = ("trig", "cosine", "custom")


@dataclass(frozen=True)
class OrthonormalBasis:
    """First ``J`` functions of an orthonormal system.

    ``kind="trig"``: 1, sqrt2 cos(2 pi k t), sqrt2 sin(2 pi k t), ... interleaved.
    ``kind="cosine"``: 1, sqrt2 cos(2 pi (j-1) t).
    ``kind="custom"``: user-supplied ``funcs`` and ``derivs`` mapping t (shape s)
    to arrays of shape s + (J,).
    """

    J: int
    kind: str = "cosine"
    funcs: Optional[Callable] = None
    derivs: Optional[Callable] = None

    def __post_init__(self):
        if int(self.J) < 1:
            raise ContractViolation("J must be a positive integer")
        if self.kind not in KINDS:
            raise ContractViolation(f"unknown basis kind {self.kind!r}")
        if self.kind == "custom" and (self.funcs is None or self.derivs is None):
            raise ContractViolation("custom basis needs funcs and derivs")

    def _freq_and_phase(self):
        j = np.arange(self.J)
        if self.kind == "cosine":
            return j.astype(float), np.zeros(self.J, dtype=bool)
        k = (j + 1) // 2
        return k.astype(float), (j % 2 == 0) & (j > 0)

    def __call__(self, t) -> tuple[np.ndarray, np.ndarray]:
        return phi(self, t)

    def to_config(self) -> dict:
        return {"kind": self.kind, "J": int(self.J)}


def basis_from_config(spec: dict) -> OrthonormalBasis:
    kind = spec.get("kind", "cosine")
    if kind == "trig-full":
        kind = "trig"
    return OrthonormalBasis(int(spec.get("J", 3)), kind)


def phi(basis: OrthonormalBasis, t) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of the basis; trailing axis runs over j = 1..J."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0) or np.any(np.isnan(t)):
        raise DomainError(f"basis evaluated outside [0, 1]: {t!r}")
    if basis.kind == "custom":
        return np.asarray(basis.funcs(t), float), np.asarray(basis.derivs(t), float)
    k, is_sin = basis._freq_and_phase()
    w = 2.0 * np.pi * k
    arg = t[..., None] * w
    c, s = np.cos(arg), np.sin(arg)
    val = np.where(is_sin, SQRT2 * s, SQRT2 * c)
    der = np.where(is_sin, SQRT2 * w * c, -SQRT2 * w * s)
    val[..., 0] = 1.0
    der[..., 0] = 0.0
    return val, der


def gram_check(basis: OrthonormalBasis, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Largest entry of |integral(Phi Phi^T) - I|; never raises for non-orthonormal input."""
    def outer(t):
        v = phi(basis, t)[0]
        return v[:, :, None] * v[:, None, :]
    G = integrate(outer, 0.0, 1.0, rule)
    return float(np.max(np.abs(G - np.eye(basis.J))))


def reconstruct(basis: OrthonormalBasis, theta) -> Callable:
    """Return t -> Phi(t)^T theta."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (basis.J,):
        raise ContractViolation(f"expected {basis.J} coefficients, got shape {theta.shape}")

    def f(t):
        out = phi(basis, t)[0] @ theta
        return float(out) if np.ndim(out) == 0 else out
    return f


@dataclass(frozen=True)
class FunctionModel:
    """Regression function with analytic first and second derivatives.

    ``smooth`` is False when f'' is unbounded on [0, 1]; the oracle refuses such
    models, the simulator does not care.
    """

    name: str
    f: Callable
    df: Callable
    d2f: Callable
    smooth: bool = True

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))


def _quadratic() -> FunctionModel:
    return FunctionModel(
        "4t(t-1)",
        f=lambda t: 4.0 * t * (t - 1.0),
        df=lambda t: 8.0 * t - 4.0,
        d2f=lambda t: np.full_like(np.asarray(t, dtype=float), 8.0),
    )


def _sqrt_arc() -> FunctionModel:
    # derivatives blow up at t = 0 and t = 1
    def f(t):
        return np.sqrt(np.clip(t * (1.0 - t), 0.0, None))

    def df(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return (1.0 - 2.0 * t) / (2.0 * np.sqrt(t * (1.0 - t)))

    def d2f(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -1.0 / (4.0 * (t * (1.0 - t)) ** 1.5)

    return FunctionModel("sqrt(t(1-t))", f, df, d2f, smooth=False)


def constant(value: float) -> FunctionModel:
    value = float(value)
    return FunctionModel(
        f"const({value:g})",
        f=lambda t: np.full_like(np.asarray(t, dtype=float), value),
        df=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        d2f=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
    )


def span_model(basis: OrthonormalBasis, theta, name: str = "span") -> FunctionModel:
    """f = Phi^T theta for a built-in basis; second derivative obtained analytically."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (basis.J,):
        raise ContractViolation(f"expected {basis.J} coefficients")
    if basis.kind == "custom":
        raise ContractViolation("span_model needs a built-in basis")
    k, _ = basis._freq_and_phase()
    w2 = (2.0 * np.pi * k) ** 2

    return FunctionModel(
        name,
        f=lambda t: phi(basis, t)[0] @ theta,
        df=lambda t: phi(basis, t)[1] @ theta,
        d2f=lambda t: (phi(basis, t)[0] * -w2) @ theta,
    )


MODELS = {
    "4t(t-1)": _quadratic,
    "sqrt(t(1-t))": _sqrt_arc,
}


def model_from_name(name: str) -> FunctionModel:
    """Built-in model by name; ``const(<number>)`` gives a constant function."""
    if name in MODELS:
        return MODELS[name]()
    if name.startswith("const(") and name.endswith(")"):
        try:
            return constant(float(name[6:-1]))
        except ValueError:
            pass
    raise ContractViolation(f"unknown model {name!r}; choose from {sorted(MODELS)} or const(<value>)")


def fourier_coefficients(basis: OrthonormalBasis, f, rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    """theta_j = integral of f * phi_j over [0, 1]."""
    fn = f.f if isinstance(f, FunctionModel) else f
    return integrate(lambda t: phi(basis, t)[0] * np.asarray(fn(t), float)[:, None], 0.0, 1.0, rule)
