"""Zakai filter for a stable-noise signal observed through a marked Poisson process.

Splitting recursion over windows [t_i, t_{i+1}]:

    (I - delta_i A*) p_{i+1} = chi_i p_i,
    chi_i(x) = exp{ -sum_k ln(1 - theta(t_i, x, z_k)) - delta_i int theta(t_i, x, z) nu(dz) }

with the sum over observed jumps in the window. Since chi_i is diagonal the
recursion is carried in u = |sigma|^alpha p, where A* is the symmetric
semi-discrete operator with g = 0 on a natural grid.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .fpe_core import DensityState, Grid1D
from .model import StableNoiseModel
from .scheme_symmetric import SemiDiscreteOperator, assemble
from .stable_process import simulate_paths

log = logging.getLogger(__name__)

__all__ = [
    "FilterDegeneracyError",
    "MarkMeasure",
    "SignalObservationModel",
    "ObservationRecord",
    "FilterState",
    "FilterResult",
    "simulate_twin",
    "chi_weight",
    "chi_log_weight",
    "zakai_step",
    "normalize",
    "run_filter",
]


class FilterDegeneracyError(RuntimeError):
    pass


_LOG_CHI_CAP = 50.0


@dataclass(frozen=True, eq=False)
class MarkMeasure:
    """Finite mark measure nu = rate * (probability law with the given sampler).

    ``nodes``/``weights`` integrate against nu itself (weights sum to rate).
    """

    rate: float
    nodes: np.ndarray
    weights: np.ndarray
    sampler: Callable[[np.random.Generator, int], np.ndarray]

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError(f"mark rate must be positive and finite, got {self.rate!r}")

    @classmethod
    def gaussian(cls, rate: float = 1.0, mean: float = 0.0, std: float = 1.0, n_nodes: int = 60) -> "MarkMeasure":
        z, w = np.polynomial.hermite_e.hermegauss(n_nodes)
        w = w / w.sum() * rate
        return cls(rate, mean + std * z, w, lambda rng, size: rng.normal(mean, std, size))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Sum over the last axis of values sampled at ``nodes``."""
        return values @ self.weights


@dataclass(frozen=True, eq=False)
class SignalObservationModel:
    """Signal dX = f dt + sigma dL; observation dY = f2 dt + int gamma N~(dt, dz).

    ``theta(t, x, z)`` must broadcast over x and z arrays. ``sample_mark``
    (t, x, rng) -> z draws a mark given the signal state when marks carry
    signal information; without it marks are i.i.d. from the mark law.
    ``theta_integral(t, x)`` overrides the quadrature of int theta nu(dz)
    when the compensating measure itself depends on x. ``log_one_minus_theta``
    (t, x, z) supplies ln(1 - theta) directly where theta is too close to 1
    for 1 - theta to survive rounding.
    """

    signal: StableNoiseModel
    f2: Callable
    gamma_fn: Callable
    marks: MarkMeasure
    theta: Callable
    f2_bound: float = math.inf
    sample_mark: Optional[Callable] = None
    theta_integral: Optional[Callable] = None
    log_one_minus_theta: Optional[Callable] = None
    drift_scheme: str = "implicit"

    def __post_init__(self):
        if self.signal.g is not None:
            raise ValueError("the filter signal carries no Brownian term (g must be None)")

    def theta_nu(self, t: float, x: np.ndarray) -> np.ndarray:
        if self.theta_integral is not None:
            return np.broadcast_to(np.asarray(self.theta_integral(t, x), dtype=float), np.shape(x))
        vals = np.asarray(self.theta(t, np.asarray(x)[..., None], self.marks.nodes[None, :]), dtype=float)
        vals = np.broadcast_to(vals, np.shape(x) + (len(self.marks.nodes),))
        return self.marks.integrate(vals)


@dataclass
class ObservationRecord:
    jump_times: np.ndarray
    marks: np.ndarray
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    drift_path: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.jump_times = np.asarray(self.jump_times, dtype=float)
        self.marks = np.asarray(self.marks, dtype=float)
        if self.jump_times.shape != self.marks.shape:
            raise ValueError("jump_times and marks differ in length")
        if np.any(np.diff(self.jump_times) <= 0):
            raise ValueError("jump times must be strictly increasing")

    def in_window(self, t0: float, t1: float) -> np.ndarray:
        """Marks of jumps with t0 < tau <= t1."""
        lo = np.searchsorted(self.jump_times, t0, side="right")
        hi = np.searchsorted(self.jump_times, t1, side="right")
        return self.marks[lo:hi]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "z"])
            for t, z in zip(self.jump_times, self.marks):
                w.writerow([f"{t:.17g}", f"{z:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "ObservationRecord":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["t", "z"]:
            raise ValueError(f"{path}: expected header 't,z'")
        data = []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            try:
                data.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: bad row {row!r}") from exc
        arr = np.array(data, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])


def simulate_twin(
    model: SignalObservationModel, x0: float, dt: float, T: float, seed: Optional[int] = None
) -> tuple[np.ndarray, np.ndarray, ObservationRecord]:
    """Signal path on the dt grid plus a Poisson-clock observation record.

    Marks at a jump are drawn given the signal at the last grid time before
    it (the left limit of the Euler path). The observation path Y is kept
    for diagnostics only; the filter consumes (times, marks).
    """
    sig_ss, obs_ss = np.random.SeedSequence(seed).spawn(2)
    ens = simulate_paths(
        model.signal,
        x0,
        dt,
        T,
        1,
        rng=np.random.default_rng(sig_ss),
        record_stride=1,
        drift_scheme=model.drift_scheme,
    )
    times, X = ens.times, ens.paths[0]
    if not np.all(np.isfinite(X)):
        raise FloatingPointError("signal path left the floating-point range")
    rng = np.random.default_rng(obs_ss)
    lam = model.marks.rate
    n_jumps = rng.poisson(lam * T)
    jt = np.sort(rng.uniform(0.0, T, n_jumps))
    slot = np.clip(np.searchsorted(times, jt, side="left") - 1, 0, len(times) - 1)
    if model.sample_mark is None:
        z = model.marks.sampler(rng, n_jumps)
    else:
        z = np.array([model.sample_mark(t, X[k], rng) for t, k in zip(jt, slot)], dtype=float)
    # Y: drift, jumps, minus the nu-compensator of gamma
    Y = np.zeros_like(times)
    gam = np.asarray(model.gamma_fn(times[:-1, None], X[:-1, None], model.marks.nodes[None, :]), dtype=float)
    comp = model.marks.integrate(np.broadcast_to(gam, (len(times) - 1, len(model.marks.nodes))))
    dY = (np.asarray(model.f2(times[:-1], X[:-1]), dtype=float) - comp) * np.diff(times)
    jumps = np.zeros(len(times))
    if n_jumps:
        np.add.at(jumps, slot + 1, np.asarray(model.gamma_fn(jt, X[slot], z), dtype=float))
    Y[1:] = np.cumsum(dY) + np.cumsum(jumps[1:])
    return times, X, ObservationRecord(jt, z, times, Y)


def chi_weight(x, window: tuple[float, float], record: ObservationRecord, model: SignalObservationModel) -> np.ndarray:
    """Measure-change weight of one window at the points x."""
    return np.exp(chi_log_weight(x, window, record, model))


def chi_log_weight(x, window: tuple[float, float], record: ObservationRecord, model: SignalObservationModel) -> np.ndarray:
    """ln chi; see :func:`chi_weight`."""
    t0, t1 = window
    x = np.asarray(x, dtype=float)
    log_chi = -(t1 - t0) * model.theta_nu(t0, x)
    for z in record.in_window(t0, t1):
        if model.log_one_minus_theta is not None:
            l1m = np.broadcast_to(np.asarray(model.log_one_minus_theta(t0, x, z), dtype=float), x.shape)
            if not np.all(np.isfinite(l1m)):
                raise ValueError(f"ln(1 - theta) not finite at observed mark z={z!r}")
        else:
            th = np.broadcast_to(np.asarray(model.theta(t0, x, z), dtype=float), x.shape)
            if np.any(th >= 1.0):
                raise ValueError(f"theta >= 1 at observed mark z={z!r}; the measure change is undefined")
            l1m = np.log1p(-th)
        log_chi = log_chi - l1m
    return log_chi


@dataclass
class FilterState:
    """Unnormalized density (u representation internally) after ``window_index`` windows."""

    p_unnormalized: DensityState
    window_index: int
    times: np.ndarray
    clip_defect: float = 0.0


def zakai_step(
    state: FilterState, chi: np.ndarray, A_star: SemiDiscreteOperator, delta: float
) -> FilterState:
    """Solve (I - delta A*) p_next = chi p; negative round-off is clipped and logged."""
    u = state.p_unnormalized
    if u.representation != "u":
        raise ValueError("filter state is carried in the u representation")
    rhs = np.asarray(chi, dtype=float) * u.values
    act = A_star.active
    out = np.zeros_like(rhs)
    if delta == 0.0:
        out[act] = rhs[act]
    else:
        out[act] = scipy.linalg.lu_solve(A_star.lu(delta), rhs[act])
    if not np.all(np.isfinite(out)):
        raise FloatingPointError(f"non-finite filter density in window {state.window_index + 1}")
    neg = out < 0
    defect = float(-out[neg].min()) if neg.any() else 0.0
    if defect:
        if defect > 1e-10 * max(out.max(), 1e-300):
            log.warning("clipped negative filter density %.3e in window %d", defect, state.window_index + 1)
        out[neg] = 0.0
    return FilterState(
        DensityState(out, u.grid, "u", u.time + delta),
        state.window_index + 1,
        state.times,
        max(state.clip_defect, defect),
    )


def normalize(p: DensityState) -> tuple[DensityState, float]:
    """Unit-mass density (trapezoid rule) and its mean."""
    if p.representation != "p":
        raise ValueError("normalize expects the p representation")
    mass = p.grid.trapezoid(p.values)
    if not (mass > 0 and math.isfinite(mass)):
        raise FilterDegeneracyError(f"filter mass is {mass!r}; cannot normalize")
    dens = p.values / mass
    return DensityState(dens, p.grid, "p", p.time), float(p.grid.trapezoid(p.grid.x * dens))


@dataclass
class FilterResult:
    times: np.ndarray
    x: np.ndarray
    p_unnormalized: np.ndarray
    p_normalized: np.ndarray
    means: np.ndarray
    clip_defect: float
    log_scale: float = 0.0
    grid: Optional[Grid1D] = None

    @property
    def masses(self) -> np.ndarray:
        return np.array([self.grid.trapezoid(row) for row in self.p_unnormalized])

    @property
    def normalized_masses(self) -> np.ndarray:
        return np.array([self.grid.trapezoid(row) for row in self.p_normalized])


def run_filter(
    model: SignalObservationModel,
    grid: Grid1D,
    init: DensityState,
    partition: Sequence[float],
    record: ObservationRecord,
    operator: Optional[SemiDiscreteOperator] = None,
    keep_every: int = 1,
) -> FilterResult:
    """Run the splitting recursion over ``partition``; snapshot every ``keep_every`` windows and at the end.

    When a window's weight would exceed e^50 it is divided by its maximum;
    the true unnormalized density is ``p_unnormalized * exp(log_scale)``
    from that window on.
    """
    if grid.kind != "natural":
        log.info("filter on an absorbing grid: boundary nodes pinned to 0")
    A = operator if operator is not None else assemble(model.signal, grid)
    kappa = np.asarray(partition, dtype=float)
    if kappa.ndim != 1 or len(kappa) < 2 or np.any(np.diff(kappa) <= 0):
        raise ValueError("partition must be strictly increasing with at least two points")
    s = A.sigma_abs_alpha
    u0 = init.values * s if init.representation == "p" else init.values.copy()
    if grid.kind == "absorbing":
        u0[~grid.active] = 0.0
    state = FilterState(DensityState(u0, grid, "u", float(kappa[0])), 0, kappa)

    times, unnorm, norm, means = [], [], [], []

    def record_snapshot(st: FilterState):
        p = DensityState(st.p_unnormalized.values / s, grid, "p", st.p_unnormalized.time)
        pn, mean = normalize(p)
        times.append(p.time)
        unnorm.append(p.values)
        norm.append(pn.values)
        means.append(mean)

    record_snapshot(state)
    deltas = np.diff(kappa)
    if np.allclose(deltas, deltas[0], rtol=1e-9, atol=0.0):
        # one factorization for a uniform partition despite round-off in the grid
        deltas = np.full_like(deltas, deltas[0])
    n = len(kappa) - 1
    log_scale = 0.0
    for i in range(n):
        t0, t1 = float(kappa[i]), float(kappa[i + 1])
        log_chi = chi_log_weight(grid.x, (t0, t1), record, model)
        top = float(log_chi.max())
        if top > _LOG_CHI_CAP:
            # a constant factor drops out after normalization; keep it in log_scale
            log_chi = log_chi - top
            log_scale += top
        state = zakai_step(state, np.exp(log_chi), A, float(deltas[i]))
        state.p_unnormalized.time = t1
        if (i + 1) % keep_every == 0 or i == n - 1:
            record_snapshot(state)
    return FilterResult(
        times=np.asarray(times),
        x=grid.x,
        p_unnormalized=np.asarray(unnorm),
        p_normalized=np.asarray(norm),
        means=np.asarray(means),
        clip_defect=state.clip_defect,
        log_scale=log_scale,
        grid=grid,
    )
