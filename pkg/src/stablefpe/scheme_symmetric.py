"""Finite-difference solver for the symmetric-noise Fokker-Planck equation.

The equation is assembled in u = |sigma|^alpha p:

    dU_j/dt = C_h (U_{j-1} - 2U_j + U_{j+1})/h^2 + M_j delta_u U_j + N~_j U_j
              + c(1,alpha) h |sigma_j|^alpha sum'_k (U_{j+k} - U_j)/|x_k|^{1+alpha}

where the sum runs over all grid nodes except k = 0 with both end terms
halved, and C_h carries the zeta-function correction for the omitted
singular cell. Natural (far-field) grids use N instead of N~.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .fpe_core import CoefficientField, DensityState, Grid1D, build_coefficients, transform
from .model import StableNoiseModel
from .special_functions import c_sym, riemann_zeta

log = logging.getLogger(__name__)

__all__ = [
    "IntegrationError",
    "SemiDiscreteOperator",
    "StabilityBound",
    "Trajectory",
    "MaxPrincipleReport",
    "nonlocal_kernel",
    "local_operator",
    "assemble",
    "stability_bound",
    "step_explicit",
    "step_implicit",
    "solve",
    "check_max_principle",
]


class IntegrationError(RuntimeError):
    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


@dataclass(eq=False)
class SemiDiscreteOperator:
    """Dense matrix acting on the active (non-pinned) nodes of ``grid``."""

    matrix: np.ndarray
    grid: Grid1D
    boundary: str
    alpha: float
    sigma_abs_alpha: np.ndarray
    _lu_cache: dict = field(default_factory=dict, repr=False)

    @property
    def active(self) -> np.ndarray:
        return self.grid.active

    def apply(self, values: np.ndarray) -> np.ndarray:
        """R applied to full-grid values; pinned nodes return 0."""
        out = np.zeros_like(values, dtype=float)
        out[self.active] = self.matrix @ values[self.active]
        return out

    def lu(self, dt: float):
        """Cached LU factors of (I - dt R)."""
        key = float(dt)
        if key not in self._lu_cache:
            a = np.eye(self.matrix.shape[0]) - dt * self.matrix
            lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
            if np.any(np.abs(np.diag(lu)) < 1e-300):
                raise np.linalg.LinAlgError("I - dt R is singular")
            self._lu_cache[key] = (lu, piv)
        return self._lu_cache[key]

    def in_p(self) -> np.ndarray:
        """The same operator expressed on p = u / |sigma|^alpha: S^{-1} R S."""
        s = self.sigma_abs_alpha[self.active]
        return self.matrix * s[None, :] / s[:, None]


@dataclass(frozen=True)
class StabilityBound:
    dt_max: float
    alpha: float
    h: float
    M_tilde: float


def stability_bound(alpha: float, h: float, M_tilde: float) -> StabilityBound:
    """Largest explicit step preserving the discrete maximum principle (f = g = 0)."""
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha!r}")
    if h <= 0.0 or M_tilde <= 0.0:
        raise ValueError("h and M_tilde must be positive")
    bracket = 1.0 + 1.0 / alpha - riemann_zeta(alpha - 1.0)
    dt_max = h**alpha / (2.0 * M_tilde**alpha * c_sym(alpha) * bracket)
    return StabilityBound(dt_max=dt_max, alpha=alpha, h=h, M_tilde=M_tilde)


def nonlocal_kernel(grid: Grid1D, alpha: float) -> np.ndarray:
    """Trapezoidal weights K[j, i] = h^{-alpha} |i - j|^{-1-alpha}, end nodes halved.

    Over the full node range -J..J; the diagonal is zero.
    """
    idx = grid.index
    dist = np.abs(idx[:, None] - idx[None, :]).astype(float)
    K = np.zeros_like(dist)
    off = dist > 0
    K[off] = grid.h ** (-alpha) * dist[off] ** (-1.0 - alpha)
    endpoint = np.ones(grid.n)
    endpoint[0] = endpoint[-1] = 0.5
    return K * endpoint[None, :]


def local_operator(C_h: np.ndarray, M: np.ndarray, reaction: np.ndarray, h: float) -> np.ndarray:
    """Central second difference, upwind first difference, reaction; full node range.

    Upwind rule: M < 0 backward, M >= 0 forward (M = 0 ties to forward).
    Neighbours outside the node range are zero.
    """
    n = len(C_h)
    A = np.zeros((n, n))
    i = np.arange(n)
    A[i, i] += -2.0 * C_h / h**2 + reaction
    A[i[1:], i[:-1]] += C_h[1:] / h**2
    A[i[:-1], i[1:]] += C_h[:-1] / h**2
    back = M < 0
    fwd = ~back
    A[i, i] += np.where(back, M / h, -M / h)
    rows = i[back & (i > 0)]
    A[rows, rows - 1] += -M[rows] / h
    rows = i[fwd & (i < n - 1)]
    A[rows, rows + 1] += M[rows] / h
    return A


def _nonlocal_rows(K: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """weight_j * (sum_i K[j,i] U_i - (sum_i K[j,i]) U_j) as a matrix."""
    B = K * weight[:, None]
    B[np.diag_indices_from(B)] -= B.sum(axis=1)
    return B


def assemble(
    model: StableNoiseModel, grid: Grid1D, coeffs: Optional[CoefficientField] = None
) -> SemiDiscreteOperator:
    if coeffs is None:
        coeffs = build_coefficients(model, grid)
    if len(coeffs.M) != grid.n or not np.allclose(coeffs.x, grid.x, rtol=0, atol=1e-14):
        raise ValueError("coefficient field does not match the grid")
    alpha = model.alpha
    if grid.kind == "absorbing":
        reaction = np.where(grid.active, coeffs.N_tilde, 0.0)
    else:
        reaction = coeffs.N
    full = local_operator(coeffs.C_h, coeffs.M, reaction, grid.h)
    full += _nonlocal_rows(nonlocal_kernel(grid, alpha), c_sym(alpha) * coeffs.sigma_abs_alpha)
    act = grid.active
    R = np.ascontiguousarray(full[np.ix_(act, act)])
    return SemiDiscreteOperator(
        matrix=R, grid=grid, boundary=grid.kind, alpha=alpha, sigma_abs_alpha=coeffs.sigma_abs_alpha
    )


# ---------------------------------------------------------------------------
# time stepping


def _check_finite(values: np.ndarray, step: Optional[int]) -> None:
    if not np.all(np.isfinite(values)):
        raise IntegrationError("non-finite value in solution", step)


def step_explicit(U: DensityState, R: SemiDiscreteOperator, dt: float, step: Optional[int] = None) -> DensityState:
    """U <- U + dt R U; pinned nodes stay at zero."""
    if U.representation != "u":
        raise ValueError("stepping acts on the u representation")
    out = np.zeros_like(U.values)
    act = R.active
    out[act] = U.values[act] + dt * (R.matrix @ U.values[act])
    _check_finite(out, step)
    return DensityState(out, U.grid, "u", U.time + dt)


def step_implicit(U: DensityState, R: SemiDiscreteOperator, dt: float, step: Optional[int] = None) -> DensityState:
    """Solve (I - dt R) U_next = U by cached dense LU."""
    if U.representation != "u":
        raise ValueError("stepping acts on the u representation")
    out = np.zeros_like(U.values)
    act = R.active
    out[act] = scipy.linalg.lu_solve(R.lu(dt), U.values[act])
    _check_finite(out, step)
    return DensityState(out, U.grid, "u", U.time + dt)


@dataclass
class Trajectory:
    """Snapshots of p on a grid."""

    times: np.ndarray
    grid: Grid1D
    p: np.ndarray
    sigma_abs_alpha: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def u(self) -> np.ndarray:
        return self.p * self.sigma_abs_alpha[None, :]

    def state(self, i: int, representation: str = "p") -> DensityState:
        values = self.p[i] if representation == "p" else self.u[i]
        return DensityState(values.copy(), self.grid, representation, float(self.times[i]))

    def masses(self) -> np.ndarray:
        return np.array([self.grid.trapezoid(row) for row in self.p])

    def __len__(self) -> int:
        return len(self.times)


def _n_steps(t0: float, t1: float, dt: float) -> tuple[int, float]:
    if dt <= 0 or t1 < t0:
        raise ValueError("need dt > 0 and t1 >= t0")
    n = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
    return n, (t1 - t0) / n


def march(
    R: SemiDiscreteOperator,
    u0: DensityState,
    t0: float,
    t1: float,
    dt: float,
    stepper: str = "explicit",
    snapshots: Optional[Sequence[float]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance u from t0 to t1; returns (times, u snapshots). Every step is kept when snapshots is None."""
    n, dt_eff = _n_steps(t0, t1, dt)
    if stepper not in ("explicit", "implicit"):
        raise ValueError(f"unknown stepper {stepper!r}")
    step = step_explicit if stepper == "explicit" else step_implicit
    if snapshots is None:
        keep = set(range(n + 1))
    else:
        keep = {int(round((t - t0) / dt_eff)) for t in snapshots}
        if any(k < 0 or k > n for k in keep):
            raise ValueError("snapshot time outside [t0, t1]")
    U = DensityState(u0.values.copy(), u0.grid, "u", t0)
    times, frames = [], []
    if 0 in keep:
        times.append(t0)
        frames.append(U.values.copy())
    for k in range(1, n + 1):
        U = step(U, R, dt_eff, k)
        if k in keep:
            times.append(t0 + k * dt_eff)
            frames.append(U.values.copy())
    return np.asarray(times), np.asarray(frames)


def solve(
    model: StableNoiseModel,
    grid: Grid1D,
    init: DensityState,
    t0: float,
    t1: float,
    dt: float,
    stepper: str = "explicit",
    snapshots: Optional[Sequence[float]] = None,
    operator: Optional[SemiDiscreteOperator] = None,
) -> Trajectory:
    """March p from t0 to t1 (p -> u, step, u -> p)."""
    R = operator if operator is not None else assemble(model, grid)
    u0 = transform(init, model, "u")
    if grid.kind == "absorbing":
        u0.values[~grid.active] = 0.0
    times, frames = march(R, u0, t0, t1, dt, stepper, snapshots)
    s = R.sigma_abs_alpha
    return Trajectory(
        times=times,
        grid=grid,
        p=frames / s[None, :],
        sigma_abs_alpha=s,
        meta={"alpha": model.alpha, "beta": 0.0, "h": grid.h, "dt": dt, "boundary": grid.kind, "stepper": stepper},
    )


# ---------------------------------------------------------------------------
# maximum-principle audit


@dataclass
class MaxPrincipleReport:
    lower: float
    upper: float
    minimum: float
    maximum: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_max_principle(
    series,
    init_bounds: Optional[tuple[float, float]] = None,
    representation: str = "u",
    slack: float = 1e-12,
) -> MaxPrincipleReport:
    """Compare space-time extrema with the initial bounds.

    ``series`` is a :class:`Trajectory` or an array of frames (time x node).
    Violations are (time index, node index, value) triples.
    """
    if isinstance(series, Trajectory):
        frames = series.u if representation == "u" else series.p
    else:
        frames = np.asarray(series, dtype=float)
    if init_bounds is None:
        init_bounds = (float(frames[0].min()), float(frames[0].max()))
    lo, hi = init_bounds
    bad = (frames < lo - slack) | (frames > hi + slack)
    violations = [(int(t), int(j), float(frames[t, j])) for t, j in zip(*np.nonzero(bad))]
    return MaxPrincipleReport(
        lower=lo, upper=hi, minimum=float(frames.min()), maximum=float(frames.max()), violations=violations
    )
