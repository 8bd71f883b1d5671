"""Reusable experiment drivers shared by the CLI, the scripts and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import presets
from .fpe_core import Grid1D
from .model import StableNoiseModel
from .scheme_symmetric import assemble, solve, stability_bound
from .stable_process import empirical_density, simulate_paths
from .zakai import ObservationRecord, SignalObservationModel, run_filter, simulate_twin

__all__ = [
    "sup_abs_sigma",
    "ConvergenceResult",
    "convergence_study",
    "MaxPrincipleAudit",
    "max_principle_audit",
    "MonteCarloComparison",
    "monte_carlo_comparison",
    "TrackingOutcome",
    "tracking_experiment",
]


def sup_abs_sigma(model: StableNoiseModel, grid: Grid1D) -> float:
    """max |sigma| over the grid nodes, the default M~ for the stability bound."""
    return float(np.max(np.abs(model.noise(grid.x))))


# ---------------------------------------------------------------------------
# self-convergence


@dataclass
class ConvergenceResult:
    h: np.ndarray
    dt: np.ndarray
    errors: np.ndarray
    h_ref: float
    dt_ref: float
    slope: float
    window: float

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.errors) < 0))

    @property
    def rates(self) -> np.ndarray:
        """Observed order between consecutive levels."""
        return np.log2(self.errors[:-1] / self.errors[1:])


def convergence_study(
    model: StableNoiseModel,
    L_tilde: float = 10.0,
    h0: float = 0.125,
    levels: int = 3,
    dt0: Optional[float] = None,
    t0: float = presets.INIT_TIME,
    t1: float = 0.2,
    stepper: str = "explicit",
    M_tilde: Optional[float] = None,
) -> ConvergenceResult:
    """Errors of p(t1) on [-L/2, L/2] for h0/2^k, k < levels, against a run at h0/2^levels.

    dt shrinks by 4 per halving of h (dt ~ h^2 keeps the time error below
    the space error and stays under the explicit bound for every alpha < 2).
    """
    if levels < 2:
        raise ValueError("need at least two levels")
    if M_tilde is None:
        M_tilde = sup_abs_sigma(model, Grid1D.natural(L_tilde, h0))
    if dt0 is None:
        dt0 = 0.9 * stability_bound(model.alpha, h0, M_tilde).dt_max
    window = 0.5 * L_tilde

    def run(h, dt):
        grid = Grid1D.natural(L_tilde, h)
        tr = solve(model, grid, presets.narrow_gaussian(grid), t0, t1, dt, stepper, snapshots=[t1])
        return grid.x, tr.p[-1]

    h_ref = h0 / 2**levels
    dt_ref = dt0 / 4**levels
    x_ref, p_ref = run(h_ref, dt_ref)
    hs, dts, errs = [], [], []
    for k in range(levels):
        h, dt = h0 / 2**k, dt0 / 4**k
        x, p = run(h, dt)
        stride = 2 ** (levels - k)
        ref_on_coarse = p_ref[::stride]
        assert np.allclose(x_ref[::stride], x)
        inside = np.abs(x) <= window + 1e-12
        hs.append(h)
        dts.append(dt)
        errs.append(float(np.max(np.abs(p[inside] - ref_on_coarse[inside]))))
    hs, errs = np.asarray(hs), np.asarray(errs)
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    return ConvergenceResult(hs, np.asarray(dts), errs, h_ref, dt_ref, slope, window)


# ---------------------------------------------------------------------------
# maximum principle


@dataclass
class MaxPrincipleAudit:
    alpha: float
    boundary: str
    dt: float
    dt_max: float
    n_inits: int
    n_steps: int
    minimum: float
    max_overshoot: float
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def max_principle_audit(
    model: StableNoiseModel,
    grid: Grid1D,
    n_inits: int = 100,
    n_steps: int = 200,
    dt_fraction: float = 0.9,
    M_tilde: Optional[float] = None,
    seed: int = 0,
    slack: float = 1e-12,
) -> MaxPrincipleAudit:
    """Explicit stepping of random u0 in [0, 1] (batched as matrix columns).

    Every state is checked against [-slack, max(u0) + slack].
    """
    if M_tilde is None:
        M_tilde = sup_abs_sigma(model, grid)
    bound = stability_bound(model.alpha, grid.h, M_tilde).dt_max
    dt = dt_fraction * bound
    R = assemble(model, grid).matrix
    rng = np.random.default_rng(seed)
    U = rng.random((R.shape[0], n_inits))
    hi = U.max(axis=0)
    viol = 0
    lo_seen = float(U.min())
    over = -math.inf
    for _ in range(n_steps):
        U = U + dt * (R @ U)
        viol += int(np.count_nonzero(U < -slack) + np.count_nonzero(U > hi + slack))
        lo_seen = min(lo_seen, float(U.min()))
        over = max(over, float((U - hi).max()))
    return MaxPrincipleAudit(model.alpha, grid.kind, dt, bound, n_inits, n_steps, lo_seen, over, viol)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloComparison:
    x: np.ndarray
    p_pde: np.ndarray
    p_mc: np.ndarray
    l1: float
    mass_pde: float
    survival_mc: float
    ensemble: object = field(repr=False, default=None)


def monte_carlo_comparison(
    model: StableNoiseModel,
    J: int = 32,
    n_paths: int = 100_000,
    dt_mc: float = 1e-4,
    dt_pde: float = 2e-5,
    t1: float = 0.2,
    seed: int = 0,
) -> MonteCarloComparison:
    """Absorbing PDE density on (-1, 1) at t1 versus killed Euler-Maruyama paths.

    Paths start from the PDE's initial Gaussian at t = 0.01 and are killed on
    first exit. L1 = h sum |p_pde - p_mc| over nodes.
    """
    grid = Grid1D.absorbing(J)
    init = presets.narrow_gaussian(grid)
    tr = solve(model, grid, init, init.time, t1, dt_pde, "implicit", snapshots=[t1])
    p_pde = tr.p[-1]
    ss = np.random.SeedSequence(seed)
    start_ss, path_ss = ss.spawn(2)
    # the initial Gaussian sqrt(40/pi) exp(-40 x^2) has variance 1/80
    x0 = np.random.default_rng(start_ss).normal(0.0, math.sqrt(1.0 / 80.0), n_paths)
    seed_int = int(path_ss.generate_state(1)[0])
    ens = simulate_paths(model, x0, dt_mc, t1, n_paths, seed=seed_int, domain=(-1.0, 1.0), t_start=init.time)
    emp = empirical_density(ens, grid, absorbing=True)
    l1 = float(grid.h * np.sum(np.abs(emp.values - p_pde)))
    return MonteCarloComparison(grid.x, p_pde, emp.values, l1, grid.trapezoid(p_pde), float(ens.alive.mean()), ens)


# ---------------------------------------------------------------------------
# filter tracking


@dataclass
class TrackingOutcome:
    seed: int
    filter_error: float
    prior_error: float
    n_jumps: int

    @property
    def filter_wins(self) -> bool:
        return self.filter_error < self.prior_error


def tracking_experiment(
    model: SignalObservationModel,
    seeds: Sequence[int],
    h: float = 1.0 / 32.0,
    L_tilde: float = 4.0,
    dt: float = 5e-4,
    T: float = 5.0,
    t_from: float = 1.0,
    keep_every: int = 10,
) -> list[TrackingOutcome]:
    """Paired comparison: filter mean vs observation-free prior mean, time-averaged |error| on [t_from, T]."""
    grid = Grid1D.natural(L_tilde, h)
    A = assemble(model.signal, grid)
    init = presets.narrow_gaussian(grid)
    init.time = 0.0
    n = int(round(T / dt))
    kappa = np.linspace(0.0, T, n + 1)
    # with no jumps chi is constant in x, so the normalized output is the prior evolution
    prior = run_filter(
        model, grid, init, kappa, ObservationRecord(np.zeros(0), np.zeros(0)), operator=A, keep_every=keep_every
    )
    out = []
    for seed in seeds:
        times, X, rec = simulate_twin(model, 0.0, dt, T, seed=seed)
        res = run_filter(model, grid, init, kappa, rec, operator=A, keep_every=keep_every)
        Xs = X[::keep_every]
        sel = res.times >= t_from - 1e-12
        fe = float(np.mean(np.abs(res.means[sel] - Xs[sel])))
        pe = float(np.mean(np.abs(prior.means[sel] - Xs[sel])))
        out.append(TrackingOutcome(int(seed), fe, pe, len(rec.jump_times)))
    return out
