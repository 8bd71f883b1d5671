"""Monte-Carlo oracle: stable variates, Euler-Maruyama paths, histogram densities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .fpe_core import DensityState, Grid1D
from .model import StableNoiseModel

__all__ = [
    "sample_stable",
    "PathEnsemble",
    "simulate_paths",
    "empirical_density",
    "write_terminal_csv",
]

BLOCK = 8192


def sample_stable(alpha: float, beta: float, rng: np.random.Generator, size=None):
    """Standard alpha-stable variates by the Chambers-Mallows-Stuck transform.

    Parameterization: characteristic function exp(-|u|^a (1 - i b sgn(u) tan(pi a/2)))
    for a != 1, so b = 0 gives exp(-|u|^a) and a = 2 gives N(0, 2).
    """
    if not (math.isfinite(alpha) and 0.0 < alpha <= 2.0):
        raise ValueError(f"alpha must lie in (0, 2], got {alpha!r}")
    if not (math.isfinite(beta) and -1.0 <= beta <= 1.0):
        raise ValueError(f"beta must lie in [-1, 1], got {beta!r}")
    V = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    W = rng.standard_exponential(size)
    if alpha == 1.0:
        half = 0.5 * math.pi
        bv = half + beta * V
        return (bv * np.tan(V) - beta * np.log(half * W * np.cos(V) / bv)) / half
    t = beta * math.tan(0.5 * math.pi * alpha)
    shift = math.atan(t) / alpha
    scale = (1.0 + t * t) ** (0.5 / alpha)
    a = alpha * (V + shift)
    return (
        scale
        * np.sin(a)
        / np.cos(V) ** (1.0 / alpha)
        * (np.cos(V - a) / W) ** ((1.0 - alpha) / alpha)
    )


@dataclass
class PathEnsemble:
    """Recorded positions (paths x records). NaN marks a killed or escaped path."""

    times: np.ndarray
    paths: np.ndarray
    dt: float
    t_final: float
    seed: Optional[int]
    killed: np.ndarray
    escaped: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    @property
    def terminal(self) -> np.ndarray:
        return self.paths[:, -1]

    @property
    def alive(self) -> np.ndarray:
        return ~(self.killed | self.escaped)


DRIFT_SCHEMES = ("explicit", "tamed", "implicit")


def _implicit_drift(model: StableNoiseModel, x: np.ndarray, dt: float) -> np.ndarray:
    """Solve y - dt f(y) = x by Newton's method; returns the increment y - x."""
    y = x.copy()
    for _ in range(60):
        F = y - dt * model.drift(y) - x
        dF = 1.0 - dt * model.drift_d1(y)
        if np.any(dF <= 0):
            raise FloatingPointError("drift-implicit step is not monotone; reduce dt")
        y = y - F / dF
        if np.all(np.abs(F) <= 1e-13 * (1.0 + np.abs(x))):
            break
    return y - x


def _block_run(model, x0, n_steps, dt, stride, rng, domain, drift_scheme):
    n = len(x0)
    X = x0.astype(float).copy()
    killed = np.zeros(n, dtype=bool)
    escaped = np.zeros(n, dtype=bool)
    n_rec = n_steps // stride + (1 if n_steps % stride else 0) + 1
    rec = np.empty((n, n_rec))
    rec[:, 0] = X
    col = 1
    sq = math.sqrt(dt)
    jump_scale = dt ** (1.0 / model.alpha)
    use_gauss = model.g is not None
    if domain is not None:
        lo, hi = domain
        out0 = (X <= lo) | (X >= hi)
        killed |= out0
        X[out0] = np.nan
    for k in range(1, n_steps + 1):
        live = ~(killed | escaped)
        xs = X[live]
        m = len(xs)
        if drift_scheme == "implicit":
            inc = _implicit_drift(model, xs, dt)
        else:
            drift = model.drift(xs)
            inc = drift * dt
            if drift_scheme == "tamed":
                inc = inc / (1.0 + dt * np.abs(drift))
        if use_gauss:
            inc = inc + model.gauss(xs) * sq * rng.standard_normal(m)
        L = sample_stable(model.alpha, model.beta, rng, m)
        xs = xs + inc + model.noise(xs) * jump_scale * L
        bad = ~np.isfinite(xs)
        idx = np.nonzero(live)[0]
        if bad.any():
            escaped[idx[bad]] = True
            xs[bad] = np.nan
        if domain is not None:
            out = ~bad & ((xs <= lo) | (xs >= hi))
            killed[idx[out]] = True
            xs[out] = np.nan
        X[idx] = xs
        if k % stride == 0 or k == n_steps:
            rec[:, col] = X
            col += 1
    return rec, killed, escaped


def simulate_paths(
    model: StableNoiseModel,
    x0: Union[float, np.ndarray],
    dt: float,
    t_final: float,
    n_paths: int,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    record_stride: Optional[int] = None,
    domain: Optional[tuple[float, float]] = None,
    drift_scheme: str = "explicit",
    t_start: float = 0.0,
) -> PathEnsemble:
    """Euler-Maruyama ensemble of dX = f dt + g dB + sigma(X-) dL from t_start to t_final.

    Paths are simulated in blocks of ``BLOCK``; each block draws from its own
    child of SeedSequence(seed), so results do not depend on how blocks are
    scheduled. Passing ``rng`` instead uses that single stream for everything.
    ``x0`` may be a scalar or one start point per path. ``domain`` kills
    paths on first exit from the open interval (absorbing comparison).
    ``drift_scheme`` "tamed" replaces f dt with f dt / (1 + dt |f|);
    "implicit" takes the drift part of the step implicitly (Newton on
    y - dt f(y) = x), which keeps strongly dissipative drifts after large
    jumps on their true fast return.
    ``record_stride`` = None keeps only the start and end points.
    """
    if dt <= 0 or not math.isfinite(dt):
        raise ValueError("dt must be positive")
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    duration = t_final - t_start
    if duration < 0:
        raise ValueError("t_final precedes t_start")
    n_steps = int(math.floor(duration / dt + 1e-9))
    stride = max(n_steps, 1) if record_stride is None else int(record_stride)
    if stride < 1:
        raise ValueError("record_stride must be >= 1")
    if drift_scheme not in DRIFT_SCHEMES:
        raise ValueError(f"drift_scheme must be one of {DRIFT_SCHEMES}")
    starts = np.broadcast_to(np.asarray(x0, dtype=float), (n_paths,))

    blocks = range(0, n_paths, BLOCK)
    if rng is None:
        children = np.random.SeedSequence(seed).spawn(len(blocks))
        rngs = [np.random.default_rng(c) for c in children]
    else:
        rngs = [rng] * len(blocks)
    parts = [
        _block_run(model, starts[b : b + BLOCK], n_steps, dt, stride, r, domain, drift_scheme)
        for b, r in zip(blocks, rngs)
    ]
    paths = np.concatenate([p[0] for p in parts])
    killed = np.concatenate([p[1] for p in parts])
    escaped = np.concatenate([p[2] for p in parts])
    steps = list(range(0, n_steps + 1, stride))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    times = t_start + dt * np.asarray(steps, dtype=float)
    return PathEnsemble(times, paths, dt, t_final, seed, killed, escaped)


def empirical_density(ensemble: PathEnsemble, grid: Grid1D, absorbing: bool = False) -> DensityState:
    """Histogram of terminal positions on node-centred bins [x_j - h/2, x_j + h/2).

    Bin masses are divided by the total number of paths, so with
    ``absorbing`` the density carries the surviving fraction. Otherwise only
    escaped paths are excluded from the count and the mass is 1 up to what
    falls off the grid.
    """
    if ensemble.n_paths == 0:
        raise ValueError("empty ensemble")
    pts = ensemble.terminal
    finite = np.isfinite(pts)
    total = ensemble.n_paths if absorbing else int(np.count_nonzero(~ensemble.escaped))
    if total == 0:
        raise ValueError("no usable paths in ensemble")
    h = grid.h
    edges = np.concatenate([grid.x - 0.5 * h, [grid.x[-1] + 0.5 * h]])
    counts, _ = np.histogram(pts[finite], bins=edges)
    return DensityState(counts / (total * h), grid, "p", float(ensemble.times[-1]))


def write_terminal_csv(ensemble: PathEnsemble, path) -> None:
    """One terminal position per line; killed/escaped paths are written as nan."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in ensemble.terminal:
            fh.write(f"{v:.17g}\n")
