"""Built-in models: the two Fokker-Planck examples and the bistable filtering example."""

from __future__ import annotations

import math
import numpy as np

from .fpe_core import DensityState, Grid1D
from .model import StableNoiseModel
from .zakai import MarkMeasure, SignalObservationModel

__all__ = [
    "INIT_TIME",
    "narrow_gaussian",
    "example1",
    "example2",
    "example2_negative",
    "bistable_signal",
    "filter_constant_theta",
    "filter_informative",
]

INIT_TIME = 0.01


def narrow_gaussian(grid: Grid1D, width: float = 40.0, centre: float = 0.0) -> DensityState:
    """p(x, 0.01) = sqrt(width/pi) exp(-width (x - centre)^2), a stand-in for a point mass."""
    x = grid.x
    return DensityState(math.sqrt(width / math.pi) * np.exp(-width * (x - centre) ** 2), grid, "p", INIT_TIME)


def _const(c: float):
    return lambda x: np.full_like(np.asarray(x, dtype=float), c)


def example1(alpha: float = 1.5, g: float = 0.0) -> StableNoiseModel:
    """f = -0.2 x, sigma = 2 + sin x, constant Brownian intensity g."""
    return StableNoiseModel(
        f=lambda x: -0.2 * x,
        f_prime=_const(-0.2),
        g=None if g == 0.0 else _const(g),
        g_deriv1=_const(0.0),
        g_deriv2=_const(0.0),
        sigma=lambda x: 2.0 + np.sin(x),
        sigma_deriv1=np.cos,
        sigma_deriv2=lambda x: -np.sin(x),
        alpha=alpha,
        name=f"example1(alpha={alpha}, g={g})",
    )


def example2(alpha: float = 1.5, beta: float = 0.5, g: float = 0.0) -> StableNoiseModel:
    """f = -0.2 x, sigma = pi + arctan x (positive, increasing), skewness beta."""
    return StableNoiseModel(
        f=lambda x: -0.2 * x,
        f_prime=_const(-0.2),
        g=None if g == 0.0 else _const(g),
        g_deriv1=_const(0.0),
        g_deriv2=_const(0.0),
        sigma=lambda x: math.pi + np.arctan(x),
        sigma_deriv1=lambda x: 1.0 / (1.0 + x * x),
        sigma_deriv2=lambda x: -2.0 * x / (1.0 + x * x) ** 2,
        alpha=alpha,
        beta=beta,
        sigma_monotone="increasing",
        name=f"example2(alpha={alpha}, beta={beta}, g={g})",
    )


def example2_negative(alpha: float = 1.5, beta: float = 0.5, g: float = 0.0) -> StableNoiseModel:
    """Mirror of example2 with sigma = -pi - arctan x (negative, decreasing)."""
    return StableNoiseModel(
        f=lambda x: -0.2 * x,
        f_prime=_const(-0.2),
        g=None if g == 0.0 else _const(g),
        g_deriv1=_const(0.0),
        g_deriv2=_const(0.0),
        sigma=lambda x: -math.pi - np.arctan(x),
        sigma_deriv1=lambda x: -1.0 / (1.0 + x * x),
        sigma_deriv2=lambda x: 2.0 * x / (1.0 + x * x) ** 2,
        alpha=alpha,
        beta=beta,
        sigma_monotone="decreasing",
        name=f"example2_negative(alpha={alpha}, beta={beta}, g={g})",
    )


def bistable_signal(alpha: float = 0.5) -> StableNoiseModel:
    """Gradient flow of V = -x^2/2 + x^4/4 with noise intensity 2 + sin x."""
    return StableNoiseModel(
        f=lambda x: x - x**3,
        f_prime=lambda x: 1.0 - 3.0 * x**2,
        sigma=lambda x: 2.0 + np.sin(x),
        sigma_deriv1=np.cos,
        sigma_deriv2=lambda x: -np.sin(x),
        alpha=alpha,
        name=f"bistable(alpha={alpha})",
    )


def _obs_drift(t, x):
    return np.cos(x) / (2.0 * math.sqrt(2.0))


def _obs_jump(t, x, z):
    return np.cos(x) * np.exp(-0.5 * np.asarray(z) ** 2)


def filter_constant_theta(alpha: float = 0.5, theta: float = 0.5) -> SignalObservationModel:
    """Bistable signal, Gaussian marks at rate 1, constant theta.

    With constant theta the weight chi does not depend on x, so the
    normalized filter coincides with the prior evolution.
    """
    return SignalObservationModel(
        signal=bistable_signal(alpha),
        f2=_obs_drift,
        gamma_fn=_obs_jump,
        marks=MarkMeasure.gaussian(rate=1.0),
        theta=lambda t, x, z: np.full(np.broadcast(np.asarray(x), np.asarray(z)).shape, theta),
        f2_bound=1.0 / (2.0 * math.sqrt(2.0)),
    )


def filter_informative(alpha: float = 0.5, gain: float = 2.5, rate: float = 1.0) -> SignalObservationModel:
    """Marks distributed N(gain * x, 1) given the signal x.

    theta = 1 - exp(m^2/2 - m z) with m = gain * x makes 1/(1 - theta) the
    likelihood ratio of N(m, 1) against N(0, 1) and int theta nu(dz) = 0, so
    chi is the exact mark likelihood.
    """

    def theta(t, x, z):
        return -np.expm1(log_one_minus_theta(t, x, z))

    def log_one_minus_theta(t, x, z):
        m = gain * np.asarray(x, dtype=float)
        return 0.5 * m * m - m * np.asarray(z, dtype=float)

    def sample_mark(t, x, rng: np.random.Generator):
        return rng.normal(gain * x, 1.0)

    return SignalObservationModel(
        signal=bistable_signal(alpha),
        f2=_obs_drift,
        gamma_fn=_obs_jump,
        marks=MarkMeasure.gaussian(rate=rate),
        theta=theta,
        f2_bound=1.0 / (2.0 * math.sqrt(2.0)),
        sample_mark=sample_mark,
        theta_integral=lambda t, x: np.zeros(np.shape(x)),
        log_one_minus_theta=log_one_minus_theta,
    )
