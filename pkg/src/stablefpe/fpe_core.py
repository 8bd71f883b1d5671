"""Grids, the u = |sigma|^alpha p transform, coefficient fields, and pointwise
quadrature evaluation of the generator and its adjoints.

The quadrature routines are the operator-level reference used to test the
finite-difference schemes; they are not used by the schemes themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .model import StableNoiseModel, evaluate
from .special_functions import c_alpha, c_sym, riemann_zeta

__all__ = [
    "Grid1D",
    "DensityState",
    "CoefficientField",
    "QuadConfig",
    "transform",
    "build_coefficients",
    "apply_generator",
    "apply_adjoint_sym",
    "apply_generator_asym",
    "apply_adjoint_asym",
    "inner_product",
]


# ---------------------------------------------------------------------------
# grids and states


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid x_j = j h, j = -J..J.

    ``absorbing``: domain (-1, 1), h = 1/J, density pinned to zero at |x| >= 1.
    The kernel offsets of the nonlocal sum span the extended range
    [-2J, 2J] (``j_min``/``j_max``).
    ``natural``: truncated line (-L, L) with J = L/h.
    """

    h: float
    J: int
    kind: str

    def __post_init__(self):
        if self.kind not in ("absorbing", "natural"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.J < 1 or self.h <= 0.0:
            raise ValueError("grid needs J >= 1 and h > 0")
        if self.kind == "absorbing" and abs(self.h * self.J - 1.0) > 1e-14:
            raise ValueError("absorbing grid requires h = 1/J")

    @classmethod
    def absorbing(cls, J: int) -> "Grid1D":
        return cls(h=1.0 / J, J=int(J), kind="absorbing")

    @classmethod
    def natural(cls, L_tilde: float, h: float) -> "Grid1D":
        ratio = L_tilde / h
        J = int(round(ratio))
        if J < 1 or abs(ratio - J) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"L_tilde/h must be a positive integer, got {ratio!r}")
        return cls(h=float(h), J=J, kind="natural")

    @property
    def L(self) -> float:
        return self.J * self.h

    @property
    def j_min(self) -> int:
        return -2 * self.J if self.kind == "absorbing" else -self.J

    @property
    def j_max(self) -> int:
        return 2 * self.J if self.kind == "absorbing" else self.J

    @property
    def index(self) -> np.ndarray:
        return np.arange(-self.J, self.J + 1)

    @property
    def x(self) -> np.ndarray:
        return self.index * self.h

    @property
    def n(self) -> int:
        return 2 * self.J + 1

    @property
    def active(self) -> np.ndarray:
        """Mask of nodes carried as unknowns (absorbing: |j| < J)."""
        mask = np.ones(self.n, dtype=bool)
        if self.kind == "absorbing":
            mask[0] = mask[-1] = False
        return mask

    def trapezoid(self, values) -> float:
        values = np.asarray(values, dtype=float)
        return float(self.h * (values.sum(axis=-1) - 0.5 * (values[..., 0] + values[..., -1])))


@dataclass
class DensityState:
    """Grid values of p or u = |sigma|^alpha p at one time."""

    values: np.ndarray
    grid: Grid1D
    representation: str = "p"
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValueError(f"state has shape {self.values.shape}, grid has {self.grid.n} nodes")
        if self.representation not in ("p", "u"):
            raise ValueError(f"representation must be 'p' or 'u', got {self.representation!r}")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def mass(self) -> float:
        return self.grid.trapezoid(self.values)


def transform(state: DensityState, model: StableNoiseModel, target: str) -> DensityState:
    """Convert between p and u = |sigma|^alpha p node-wise."""
    if target not in ("p", "u"):
        raise ValueError(f"target must be 'p' or 'u', got {target!r}")
    if target == state.representation:
        return DensityState(state.values.copy(), state.grid, target, state.time)
    s = model.sigma_abs_alpha(state.grid.x)
    values = state.values * s if target == "u" else state.values / s
    return DensityState(values, state.grid, target, state.time)


# ---------------------------------------------------------------------------
# coefficient fields


@dataclass
class CoefficientField:
    """Node-wise coefficients of the u-equation.

    u_t = C_h u_xx + M u_x + N u + |sigma|^alpha * (nonlocal part).
    ``N_tilde`` adds the analytic loss through the absorbing boundary and is
    NaN at the pinned nodes |x| = 1 (and everywhere on natural grids).
    """

    x: np.ndarray
    M: np.ndarray
    N: np.ndarray
    N_tilde: np.ndarray
    C_h: np.ndarray
    sigma_abs_alpha: np.ndarray
    g2_half: np.ndarray


def _quotient_derivs(model: StableNoiseModel, x: np.ndarray):
    """(g^2/s)', (g^2/s)'', (f/s)' with s = |sigma|^alpha."""
    s = model.sigma_abs_alpha(x)
    s1 = model.sigma_abs_alpha_d1(x)
    s2 = model.sigma_abs_alpha_d2(x)
    g = model.gauss(x)
    g1 = model.gauss_d1(x)
    g2 = model.gauss_d2(x)
    a = g * g
    a1 = 2.0 * g * g1
    a2 = 2.0 * g1 * g1 + 2.0 * g * g2
    q1 = (a1 * s - a * s1) / s**2
    q2 = a2 / s - 2.0 * a1 * s1 / s**2 - a * s2 / s**2 + 2.0 * a * s1**2 / s**3
    f = model.drift(x)
    f1 = model.drift_d1(x)
    r1 = (f1 * s - f * s1) / s**2
    return s, q1, q2, r1


def build_coefficients(model: StableNoiseModel, grid: Grid1D) -> CoefficientField:
    x = grid.x
    s, q1, q2, r1 = _quotient_derivs(model, x)
    g = model.gauss(x)
    f = model.drift(x)
    alpha = model.alpha
    c = c_sym(alpha)
    M = s * q1 - f
    N = 0.5 * s * q2 - s * r1
    N_tilde = np.full_like(x, np.nan)
    if grid.kind == "absorbing":
        inner = grid.active
        xi = x[inner]
        N_tilde[inner] = N[inner] - c * s[inner] / alpha * ((1.0 + xi) ** -alpha + (1.0 - xi) ** -alpha)
    C_h = 0.5 * g * g - c * riemann_zeta(alpha - 1.0) * s * grid.h ** (2.0 - alpha)
    return CoefficientField(x=x, M=M, N=N, N_tilde=N_tilde, C_h=C_h, sigma_abs_alpha=s, g2_half=0.5 * g * g)


# ---------------------------------------------------------------------------
# pointwise operator quadrature


@dataclass(frozen=True)
class QuadConfig:
    """Principal-value quadrature settings.

    The radial integral over z > 0 is split into [0, eps] (second-order
    Taylor term), [eps, Z] (composite Gauss-Legendre on geometrically graded
    panels up to ``panel_width``, uniform panels beyond) and [Z, inf)
    (closed form, test function vanishes there). ``support`` is the interval
    outside which the test function is zero; Z is derived from it per point
    unless ``z_max`` is given.
    """

    support: Optional[tuple[float, float]] = None
    z_max: Optional[float] = None
    eps: float = 1e-5
    panel_width: float = 0.05
    order: int = 12
    fd_step: float = 1e-3

    def refined(self, factor: int = 10) -> "QuadConfig":
        from dataclasses import replace

        return replace(self, eps=self.eps / factor, panel_width=self.panel_width / factor)

    def window(self, x: float) -> float:
        need = None
        if self.support is not None:
            a, b = self.support
            need = max(b - x, x - a, 0.0)
        if self.z_max is not None:
            if need is not None and self.z_max < need:
                raise ValueError(
                    f"quadrature window z_max={self.z_max} smaller than the support reach {need:.4g}"
                )
            return float(self.z_max)
        if need is None:
            raise ValueError("QuadConfig needs either support or z_max")
        return max(need, 10.0 * self.eps)


@lru_cache(maxsize=32)
def _gl(order: int):
    return np.polynomial.legendre.leggauss(order)


def _zrule(q: QuadConfig, Z: float, breaks=()) -> tuple[np.ndarray, np.ndarray]:
    edges = [q.eps]
    e = q.eps
    while e * 2.0 < min(q.panel_width, Z):
        e *= 2.0
        edges.append(e)
    start = edges[-1]
    if Z > start:
        n_uniform = max(1, int(math.ceil((Z - start) / q.panel_width)))
        edges.extend(np.linspace(start, Z, n_uniform + 1)[1:].tolist())
    edges = np.asarray(edges)
    extra = [b for b in breaks if edges[0] < b < edges[-1]]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
    t, wt = _gl(q.order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * t[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * wt[None, :]
    return nodes.ravel(), weights.ravel()


def _fd2(fn, x, step):
    return (
        -evaluate(fn, x + 2 * step)
        + 16 * evaluate(fn, x + step)
        - 30 * evaluate(fn, x)
        + 16 * evaluate(fn, x - step)
        - evaluate(fn, x - 2 * step)
    ) / (12 * step**2)


def _fd3(fn, x, step):
    return (
        evaluate(fn, x + 2 * step)
        - 2 * evaluate(fn, x + step)
        + 2 * evaluate(fn, x - step)
        - evaluate(fn, x - 2 * step)
    ) / (2 * step**3)


def _even_integral(w, x: float, w0: float, w2: float, alpha: float, q: QuadConfig) -> float:
    """P.V. int_0^inf [w(x+z) + w(x-z) - 2 w(x)] z^{-1-alpha} dz."""
    Z = q.window(x)
    z, wq = _zrule(q, Z)
    core = np.sum(wq * (evaluate(w, x + z) + evaluate(w, x - z) - 2.0 * w0) * z ** (-1.0 - alpha))
    inner = w2 * q.eps ** (2.0 - alpha) / (2.0 - alpha)
    tail = -2.0 * w0 * Z ** (-alpha) / alpha
    return float(core + inner + tail)


def _odd_integral(w, x: float, w1: float, w3: float, r: float, alpha: float, q: QuadConfig) -> float:
    """int_0^inf [w(x+z) - w(x-z) - 2 z w'(x) 1{z<r}] z^{-1-alpha} dz."""
    Z = q.window(x)
    z, wq = _zrule(q, Z, breaks=(r,))
    comp = np.where(z < r, 2.0 * z * w1, 0.0)
    core = np.sum(wq * (evaluate(w, x + z) - evaluate(w, x - z) - comp) * z ** (-1.0 - alpha))
    inner = w3 * q.eps ** (3.0 - alpha) / (3.0 * (3.0 - alpha))
    tail = 0.0
    if r > Z:
        if alpha == 1.0:
            tail = -2.0 * w1 * math.log(r / Z)
        else:
            tail = -2.0 * w1 * (r ** (1.0 - alpha) - Z ** (1.0 - alpha)) / (1.0 - alpha)
    return float(core + inner + tail)


def _as_points(x):
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    return arr, np.ndim(x) == 0


def _deriv_or_fd(fn_d, fn, x, step, order):
    if fn_d is not None:
        return evaluate(fn_d, x)
    return _fd2(fn, x, step) if order == 2 else _fd3(fn, x, step)


def apply_generator(
    phi: Callable,
    phi_d1: Callable,
    phi_d2: Optional[Callable],
    x,
    model: StableNoiseModel,
    quad: QuadConfig,
):
    """Generator of the symmetric-noise SDE applied to phi at x (scalar or array).

    A phi = f phi' + g^2 phi''/2 + |sigma(x)|^alpha c(1,alpha) P.V. int [phi(x+z) - phi(x)] |z|^{-1-alpha} dz.
    """
    pts, scalar = _as_points(x)
    alpha = model.alpha
    c = c_sym(alpha)
    d1 = evaluate(phi_d1, pts)
    d2 = _deriv_or_fd(phi_d2, phi, pts, quad.fd_step, 2)
    g = model.gauss(pts)
    s = model.sigma_abs_alpha(pts)
    f0 = evaluate(phi, pts)
    out = model.drift(pts) * d1 + 0.5 * g * g * d2
    nonlocal_ = np.array([_even_integral(phi, xi, f0[i], d2[i], alpha, quad) for i, xi in enumerate(pts)])
    out = out + s * c * nonlocal_
    return float(out[0]) if scalar else out


def _weighted(v, model: StableNoiseModel):
    return lambda y: model.sigma_abs_alpha(y) * evaluate(v, y)


def _local_adjoint(v, v_d1, v_d2, pts, model: StableNoiseModel):
    """-(f v)' + (g^2 v)''/2."""
    v0 = evaluate(v, pts)
    v1 = evaluate(v_d1, pts)
    g = model.gauss(pts)
    g1 = model.gauss_d1(pts)
    g2 = model.gauss_d2(pts)
    out = -(model.drift_d1(pts) * v0 + model.drift(pts) * v1)
    if np.any(g != 0.0) or np.any(g1 != 0.0):
        v2 = v_d2
        a = g * g
        a1 = 2.0 * g * g1
        a2 = 2.0 * g1 * g1 + 2.0 * g * g2
        out = out + 0.5 * (a2 * v0 + 2.0 * a1 * v1 + a * v2)
    return out


def apply_adjoint_sym(
    v: Callable,
    v_d1: Callable,
    x,
    model: StableNoiseModel,
    quad: QuadConfig,
    v_d2: Optional[Callable] = None,
):
    """Adjoint A* v = -(f v)' + (g^2 v)''/2 + P.V. int [w(x+z) - w(x)] nu(dz), w = |sigma|^alpha v."""
    pts, scalar = _as_points(x)
    alpha = model.alpha
    c = c_sym(alpha)
    w = _weighted(v, model)
    w0 = evaluate(w, pts)
    w2 = _fd2(w, pts, quad.fd_step)
    v2 = _deriv_or_fd(v_d2, v, pts, quad.fd_step, 2)
    out = _local_adjoint(v, v_d1, v2, pts, model)
    nonlocal_ = np.array([_even_integral(w, xi, w0[i], w2[i], alpha, quad) for i, xi in enumerate(pts)])
    out = out + c * nonlocal_
    return float(out[0]) if scalar else out


def _check_one_sign(sig: np.ndarray) -> None:
    if np.any(sig == 0.0) or (np.any(sig > 0) and np.any(sig < 0)):
        raise ValueError("sigma must keep one sign on the evaluation window")


def apply_generator_asym(
    phi: Callable,
    phi_d1: Callable,
    phi_d2: Optional[Callable],
    x,
    model: StableNoiseModel,
    quad: QuadConfig,
):
    """Generator with beta-skewed noise.

    After z = sigma(x) y the jump kernel becomes |sigma|^alpha nu_{alpha, beta sgn sigma}
    with compensator window |z| < |sigma(x)|.
    """
    pts, scalar = _as_points(x)
    alpha, beta = model.alpha, model.beta
    ca = c_alpha(alpha)
    sig = model.noise(pts)
    _check_one_sign(sig)
    d1 = evaluate(phi_d1, pts)
    d2 = _deriv_or_fd(phi_d2, phi, pts, quad.fd_step, 2)
    d3 = _fd3(phi, pts, 10 * quad.fd_step)
    f0 = evaluate(phi, pts)
    g = model.gauss(pts)
    s = np.abs(sig) ** alpha
    out = model.drift(pts) * d1 + 0.5 * g * g * d2
    vals = np.empty_like(pts)
    for i, xi in enumerate(pts):
        b = beta * np.sign(sig[i])
        even = _even_integral(phi, xi, f0[i], d2[i], alpha, quad)
        odd = _odd_integral(phi, xi, d1[i], d3[i], abs(sig[i]), alpha, quad)
        vals[i] = 0.5 * ca * even + 0.5 * b * ca * odd
    out = out + s * vals
    return float(out[0]) if scalar else out


def apply_adjoint_asym(
    v: Callable,
    v_d1: Callable,
    x,
    model: StableNoiseModel,
    quad: QuadConfig,
    v_d2: Optional[Callable] = None,
):
    """Adjoint of the beta-skewed generator.

    Q* v = int [w(x+z) - w(x) - w'(x) z 1{|z|<|sigma(x)|}] nu~(dz) + beta C_alpha v sigma',
    w = |sigma|^alpha v. The measure nu~ is nu_{alpha,-beta} for positive sigma and
    nu_{alpha,beta} for negative sigma (for the declared monotone branches this is
    the increasing/positive vs decreasing/negative split).
    """
    if model.sigma_monotone is None:
        raise ValueError("asymmetric adjoint requires a declared sigma_monotone")
    pts, scalar = _as_points(x)
    alpha, beta = model.alpha, model.beta
    ca = c_alpha(alpha)
    sig = model.noise(pts)
    _check_one_sign(sig)
    w = _weighted(v, model)
    w0 = evaluate(w, pts)
    s1 = model.sigma_abs_alpha_d1(pts)
    w1 = s1 * evaluate(v, pts) + model.sigma_abs_alpha(pts) * evaluate(v_d1, pts)
    w2 = _fd2(w, pts, quad.fd_step)
    w3 = _fd3(w, pts, 10 * quad.fd_step)
    v2 = _deriv_or_fd(v_d2, v, pts, quad.fd_step, 2)
    out = _local_adjoint(v, v_d1, v2, pts, model)
    out = out + beta * ca * evaluate(v, pts) * model.noise_d1(pts)
    vals = np.empty_like(pts)
    for i, xi in enumerate(pts):
        b = -beta * np.sign(sig[i])
        even = _even_integral(w, xi, w0[i], w2[i], alpha, quad)
        odd = _odd_integral(w, xi, w1[i], w3[i], abs(sig[i]), alpha, quad)
        vals[i] = 0.5 * ca * even + 0.5 * b * ca * odd
    out = out + vals
    return float(out[0]) if scalar else out


def inner_product(a: Callable, b: Callable, support: tuple[float, float], panels: int = 40, order: int = 16) -> float:
    """int_support a(x) b(x) dx by composite Gauss-Legendre."""
    lo, hi = support
    edges = np.linspace(lo, hi, panels + 1)
    t, wt = _gl(order)
    x = (0.5 * (edges[1:, None] - edges[:-1, None]) * t + 0.5 * (edges[1:, None] + edges[:-1, None])).ravel()
    w = (0.5 * (edges[1:, None] - edges[:-1, None]) * wt).ravel()
    return float(np.sum(w * evaluate(a, x) * evaluate(b, x)))


def quadrature_points(support: tuple[float, float], panels: int = 40, order: int = 16):
    """Nodes and weights matching :func:`inner_product`."""
    lo, hi = support
    edges = np.linspace(lo, hi, panels + 1)
    t, wt = _gl(order)
    x = (0.5 * (edges[1:, None] - edges[:-1, None]) * t + 0.5 * (edges[1:, None] + edges[:-1, None])).ravel()
    w = (0.5 * (edges[1:, None] - edges[:-1, None]) * wt).ravel()
    return x, w
