"""Backward-Euler solver for the skewed-noise Fokker-Planck equation on (-1, 1).

Only the absorbing condition is supported. The nonlocal term splits into a
symmetric-kernel part weighted by ``c1`` and a one-sided part weighted by
``c2`` whose first-order compensator acts on z in (0, |sigma|). Per node the
one-sided integral takes one of two shapes:

* wide (|sigma| + x >= 1): compensated over the whole of (0, 1 - x); the
  part of the compensator beyond the domain moves into the drift M_hat;
* narrow (|sigma| + x < 1): compensated sum up to x_j + m h with
  m = floor(|sigma|/h), uncompensated tail afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fpe_core import DensityState, Grid1D, build_coefficients, transform
from .model import StableNoiseModel
from .scheme_symmetric import (
    SemiDiscreteOperator,
    Trajectory,
    local_operator,
    march,
    nonlocal_kernel,
)
from .special_functions import stable_constants

__all__ = [
    "AsymCoefficients",
    "AsymMaxPrincipleReport",
    "build_asym_coefficients",
    "assemble_A",
    "assemble_B",
    "assemble_asym",
    "solve_asym",
    "check_max_principle_asym",
    "wide_drift_correction",
    "COMPENSATORS",
]


@dataclass(frozen=True, eq=False)
class AsymCoefficients:
    """Node-wise coefficients over the full absorbing grid (pinned end nodes included).

    ``wide`` marks nodes with |sigma| + x >= 1; ``m`` is floor(|sigma|/h)
    on narrow nodes and -1 on wide ones.
    """

    x: np.ndarray
    h: float
    alpha: float
    beta: float
    c1: np.ndarray
    c2: np.ndarray
    c1_neg: np.ndarray
    M_hat: np.ndarray
    N_hat: np.ndarray
    C_h: np.ndarray
    sigma_abs: np.ndarray
    sigma_abs_alpha: np.ndarray
    wide: np.ndarray
    m: np.ndarray

    @property
    def case_flag(self) -> np.ndarray:
        return np.where(self.wide, "wide", "narrow")


def wide_drift_correction(sigma_abs: np.ndarray, x: np.ndarray, alpha: float) -> np.ndarray:
    """(|sigma|^{1-alpha} - (1-x)^{1-alpha}) / (1-alpha), with its log limit at alpha = 1."""
    la = np.log(sigma_abs)
    lb = np.log1p(-x)
    eps = 1.0 - alpha
    if eps == 0.0:
        return la - lb
    # b^eps (e^{eps (ln a - ln b)} - 1) / eps keeps full precision near alpha = 1
    return np.exp(eps * lb) * np.expm1(eps * (la - lb)) / eps


def build_asym_coefficients(model: StableNoiseModel, grid: Grid1D) -> AsymCoefficients:
    if grid.kind != "absorbing":
        raise ValueError("the skewed-noise scheme supports the absorbing grid only")
    x = grid.x
    alpha, beta = model.alpha, model.beta
    k = stable_constants(alpha, beta)
    sig = model.noise(x)
    if np.any(sig == 0.0):
        raise ValueError("sigma vanishes on the grid")
    if np.any(sig > 0) and np.any(sig < 0):
        raise ValueError("sigma changes sign on the grid; a one-signed sigma is required")
    pos = sig > 0
    # c(1,alpha) = C_alpha/2, so C_p = c(1+beta), C_n = c(1-beta); writing them this
    # way makes beta = 0 reproduce the symmetric coefficients bit for bit
    c_p, c_n = k.c_sym * (1.0 + beta), k.c_sym * (1.0 - beta)
    c1 = np.where(pos, c_p, c_n)
    c1_neg = np.where(pos, c_n, c_p)
    c2 = np.where(pos, -beta * k.c_alpha, beta * k.c_alpha)

    base = build_coefficients(model, grid)
    s = base.sigma_abs_alpha
    sabs = np.abs(sig)
    wide = sabs + x >= 1.0
    m = np.where(wide, -1, np.floor(sabs / grid.h).astype(int))

    inner = grid.active
    M_hat = base.M.copy()
    N_hat = np.zeros_like(x)
    xi = x[inner]
    corr = np.zeros_like(x)
    w = inner & wide
    corr[w] = wide_drift_correction(sabs[w], x[w], alpha)
    M_hat -= s * c2 * corr
    # N_tilde already removes c(1,alpha) s/alpha [(1+x)^-alpha + (1-x)^-alpha]
    N_hat[inner] = (
        base.N_tilde[inner]
        + beta * k.c_alpha * model.noise_d1(xi)
        - s[inner] * (c1_neg[inner] - k.c_sym) / alpha * (1.0 - xi) ** (-alpha)
        - s[inner] * (c1[inner] - k.c_sym) / alpha * (1.0 + xi) ** (-alpha)
    )
    # the zeta correction carries C_alpha/2 = c(1,alpha): identical to the symmetric C_h
    C_h = base.C_h
    return AsymCoefficients(
        x=x,
        h=grid.h,
        alpha=alpha,
        beta=beta,
        c1=c1,
        c2=c2,
        c1_neg=c1_neg,
        M_hat=M_hat,
        N_hat=N_hat,
        C_h=C_h,
        sigma_abs=sabs,
        sigma_abs_alpha=s,
        wide=wide,
        m=m,
    )


def _check_dims(coeffs: AsymCoefficients, grid: Grid1D) -> None:
    if len(coeffs.x) != grid.n or abs(coeffs.h - grid.h) > 1e-15:
        raise ValueError("coefficients do not match the grid")


def assemble_A(coeffs: AsymCoefficients, grid: Grid1D) -> np.ndarray:
    """Local operator on the full node range; rows/columns of pinned nodes are cut by the caller."""
    _check_dims(coeffs, grid)
    return local_operator(coeffs.C_h, coeffs.M_hat, coeffs.N_hat, grid.h)


def _one_sided_row(j: int, wide: bool, m: int, J: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Offsets d = k - j, trapezoid weights and compensator flags of the c2 sum for row j.

    Node indices are absolute, j in (-J, J); k runs up to J.
    """
    top = J - j
    if wide:
        d = np.arange(1, top + 1)
        wt = np.ones(len(d))
        wt[-1] = 0.5
        return d, wt, np.ones(len(d), dtype=bool)
    m = min(m, top)
    d_c = np.arange(1, m + 1)
    w_c = np.ones(m)
    if m:
        w_c[-1] = 0.5
    d_t = np.arange(m, top + 1)
    w_t = np.ones(len(d_t))
    w_t[0] = w_t[-1] = 0.5
    if m == 0:
        # the k = j end of the tail is the excluded singular point
        d_t, w_t = d_t[1:], w_t[1:]
    d = np.concatenate([d_c, d_t])
    wt = np.concatenate([w_c, w_t])
    comp = np.concatenate([np.ones(len(d_c), dtype=bool), np.zeros(len(d_t), dtype=bool)])
    return d, wt, comp


COMPENSATORS = ("upwind", "backward")


def assemble_B(coeffs: AsymCoefficients, grid: Grid1D, compensator: str = "upwind") -> np.ndarray:
    """Nonlocal operator on the full node range (rows of pinned nodes are zero).

    The first-order compensator -z u_x of the one-sided integral is a drift
    with coefficient of the sign of -c2. ``"backward"`` always differences it
    as (U_j - U_{j-1})/h; that is upwind only for c2 >= 0 and turns unstable
    for c2 < 0 once alpha <= 1 and h is small. ``"upwind"`` switches to
    (U_{j+1} - U_j)/h where c2 < 0, which keeps every off-diagonal entry
    nonnegative because c1 + c2 = c1_neg >= 0.
    """
    if compensator not in COMPENSATORS:
        raise ValueError(f"compensator must be one of {COMPENSATORS}")
    _check_dims(coeffs, grid)
    alpha, h, J = coeffs.alpha, grid.h, grid.J
    n = grid.n
    s = coeffs.sigma_abs_alpha
    K = nonlocal_kernel(grid, alpha)
    B = K * (coeffs.c1 * s)[:, None]
    B[np.diag_indices(n)] -= B.sum(axis=1)
    for row in np.nonzero(grid.active)[0]:
        j = int(grid.index[row])
        if coeffs.c2[row] == 0.0:
            continue
        d, wt, comp = _one_sided_row(j, bool(coeffs.wide[row]), int(coeffs.m[row]), J)
        g = coeffs.c2[row] * s[row] * h ** (-alpha) * wt * d ** (-1.0 - alpha)
        # d = m appears in both the corrected and the tail part, so accumulate
        np.add.at(B[row], row + d, g)
        B[row, row] -= g.sum()
        # compensator -t * (difference quotient of U at j) * h
        t = np.sum(g[comp] * d[comp])
        if compensator == "upwind" and t < 0.0:
            B[row, row] += t
            B[row, row + 1] -= t
        else:
            B[row, row] -= t
            if row > 0:
                B[row, row - 1] += t
    B[~grid.active, :] = 0.0
    return B


def assemble_asym(
    model: StableNoiseModel,
    grid: Grid1D,
    coeffs: Optional[AsymCoefficients] = None,
    compensator: str = "upwind",
) -> SemiDiscreteOperator:
    """A + B restricted to the unknowns |j| < J."""
    if coeffs is None:
        coeffs = build_asym_coefficients(model, grid)
    full = assemble_A(coeffs, grid) + assemble_B(coeffs, grid, compensator)
    act = grid.active
    return SemiDiscreteOperator(
        matrix=np.ascontiguousarray(full[np.ix_(act, act)]),
        grid=grid,
        boundary="absorbing",
        alpha=coeffs.alpha,
        sigma_abs_alpha=coeffs.sigma_abs_alpha,
    )


def solve_asym(
    model: StableNoiseModel,
    grid: Grid1D,
    init: DensityState,
    t0: float,
    t1: float,
    dt: float,
    snapshots: Optional[Sequence[float]] = None,
    operator: Optional[SemiDiscreteOperator] = None,
) -> Trajectory:
    """Backward Euler march of p from t0 to t1."""
    R = operator if operator is not None else assemble_asym(model, grid)
    u0 = transform(init, model, "u")
    u0.values[~grid.active] = 0.0
    times, frames = march(R, u0, t0, t1, dt, "implicit", snapshots)
    s = R.sigma_abs_alpha
    return Trajectory(
        times=times,
        grid=grid,
        p=frames / s[None, :],
        sigma_abs_alpha=s,
        meta={"alpha": model.alpha, "beta": model.beta, "h": grid.h, "dt": dt, "boundary": "absorbing", "stepper": "implicit"},
    )


@dataclass
class AsymMaxPrincipleReport:
    n_hat_nonpositive: bool
    c2_nonnegative: bool
    interior_max: float
    interior_min: float
    boundary_max: float
    boundary_min: float
    slack: float = 1e-12
    failing_nodes: list = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return self.n_hat_nonpositive and self.c2_nonnegative

    @property
    def extrema_on_boundary(self) -> bool:
        return (
            self.interior_max <= self.boundary_max + self.slack
            and self.interior_min >= self.boundary_min - self.slack
        )

    @property
    def ok(self) -> Optional[bool]:
        """True/False when the hypotheses hold; None when they do not (nothing is asserted)."""
        return self.extrema_on_boundary if self.hypotheses_hold else None


def check_max_principle_asym(series, coeffs: AsymCoefficients, slack: float = 1e-12) -> AsymMaxPrincipleReport:
    """Check the hypotheses N_hat <= 0, c2 >= 0 on unknown nodes, and where u attains its extrema.

    The parabolic boundary is the initial frame plus the pinned nodes (value 0).
    """
    frames = series.u if isinstance(series, Trajectory) else np.asarray(series, dtype=float)
    interior = np.ones(len(coeffs.x), dtype=bool)
    interior[0] = interior[-1] = False
    n_ok = coeffs.N_hat[interior] <= 0.0
    c_ok = coeffs.c2[interior] >= 0.0
    bnd = np.concatenate([frames[0], frames[1:, 0], frames[1:, -1]]) if len(frames) > 1 else frames[0]
    inner = frames[1:, interior] if len(frames) > 1 else np.zeros((0,))
    failing = [int(i) for i in np.nonzero(~(n_ok & c_ok))[0] + 1]
    return AsymMaxPrincipleReport(
        n_hat_nonpositive=bool(n_ok.all()),
        c2_nonnegative=bool(c_ok.all()),
        interior_max=float(inner.max()) if inner.size else -math.inf,
        interior_min=float(inner.min()) if inner.size else math.inf,
        boundary_max=float(bnd.max()),
        boundary_min=float(bnd.min()),
        slack=slack,
        failing_nodes=failing,
    )
