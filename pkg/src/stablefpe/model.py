"""SDE coefficient bundle dX = f dt + g dB + sigma(X-) dL^{alpha,beta}."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Fn = Callable[[np.ndarray], np.ndarray]

__all__ = ["StableNoiseModel", "evaluate", "central_d1", "central_d2"]


def evaluate(fn: Optional[Fn], x) -> np.ndarray:
    """Evaluate a callback on an array, broadcasting constant returns. None means zero."""
    x = np.asarray(x, dtype=float)
    if fn is None:
        return np.zeros_like(x)
    return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape).copy()


def central_d1(fn: Fn, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    step = 1e-5 * (1.0 + np.abs(x))
    return (evaluate(fn, x + step) - evaluate(fn, x - step)) / (2.0 * step)


def central_d2(fn: Fn, x) -> np.ndarray:
    # larger step than d1: roundoff scales like eps / step^2
    x = np.asarray(x, dtype=float)
    step = 1e-4 * (1.0 + np.abs(x))
    return (evaluate(fn, x + step) - 2.0 * evaluate(fn, x) + evaluate(fn, x - step)) / step**2


@dataclass(frozen=True, eq=False)
class StableNoiseModel:
    """Drift f, Gaussian intensity g, stable intensity sigma, index alpha, skewness beta.

    Callbacks take and return numpy arrays. Missing derivative callbacks fall
    back to central finite differences when ``fd_fallback`` is set. ``g=None``
    means no Brownian forcing.

    ``sigma_monotone`` ("increasing" / "decreasing") declares the monotone
    branch of sigma; the asymmetric operators require it.
    Nowhere-zero sigma is a precondition; ``allow_degenerate`` lifts the
    check for test models with sigma == 0.
    """

    f: Fn
    sigma: Fn
    alpha: float
    beta: float = 0.0
    g: Optional[Fn] = None
    f_prime: Optional[Fn] = None
    g_deriv1: Optional[Fn] = None
    g_deriv2: Optional[Fn] = None
    sigma_deriv1: Optional[Fn] = None
    sigma_deriv2: Optional[Fn] = None
    sigma_alpha_deriv1: Optional[Fn] = None
    sigma_alpha_deriv2: Optional[Fn] = None
    sigma_monotone: Optional[str] = None
    fd_fallback: bool = True
    allow_degenerate: bool = False
    name: str = "custom"

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha!r}")
        if not (-1.0 < self.beta < 1.0):
            raise ValueError(f"beta must lie in (-1, 1), got {self.beta!r}")
        if self.sigma_monotone not in (None, "increasing", "decreasing"):
            raise ValueError("sigma_monotone must be 'increasing', 'decreasing' or None")

    def _deriv(self, given: Optional[Fn], base: Optional[Fn], x, order: int) -> np.ndarray:
        if given is not None:
            return evaluate(given, x)
        if base is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        if not self.fd_fallback:
            raise ValueError("derivative callback missing and finite-difference fallback disabled")
        return central_d1(base, x) if order == 1 else central_d2(base, x)

    # values -------------------------------------------------------------
    def drift(self, x) -> np.ndarray:
        return evaluate(self.f, x)

    def drift_d1(self, x) -> np.ndarray:
        return self._deriv(self.f_prime, self.f, x, 1)

    def gauss(self, x) -> np.ndarray:
        return evaluate(self.g, x)

    def gauss_d1(self, x) -> np.ndarray:
        return self._deriv(self.g_deriv1, self.g, x, 1)

    def gauss_d2(self, x) -> np.ndarray:
        return self._deriv(self.g_deriv2, self.g, x, 2)

    def noise(self, x) -> np.ndarray:
        return evaluate(self.sigma, x)

    def noise_d1(self, x) -> np.ndarray:
        return self._deriv(self.sigma_deriv1, self.sigma, x, 1)

    def noise_d2(self, x) -> np.ndarray:
        return self._deriv(self.sigma_deriv2, self.sigma, x, 2)

    def sigma_abs_alpha(self, x) -> np.ndarray:
        """|sigma(x)|^alpha; raises when sigma vanishes."""
        s = np.abs(self.noise(x))
        if not self.allow_degenerate and np.any(s == 0.0):
            raise ValueError("sigma vanishes at an evaluation point (nowhere-zero sigma required)")
        return s**self.alpha

    def sigma_abs_alpha_d1(self, x) -> np.ndarray:
        if self.sigma_alpha_deriv1 is not None:
            return evaluate(self.sigma_alpha_deriv1, x)
        if self.sigma_deriv1 is None and not self.fd_fallback:
            raise ValueError("derivative of |sigma|^alpha unavailable")
        if self.sigma_deriv1 is None:
            return central_d1(lambda y: np.abs(evaluate(self.sigma, y)) ** self.alpha, x)
        s = self.noise(x)
        a = self.alpha
        return a * np.abs(s) ** (a - 1.0) * np.sign(s) * self.noise_d1(x)

    def sigma_abs_alpha_d2(self, x) -> np.ndarray:
        if self.sigma_alpha_deriv2 is not None:
            return evaluate(self.sigma_alpha_deriv2, x)
        if self.sigma_deriv1 is None or self.sigma_deriv2 is None:
            if not self.fd_fallback:
                raise ValueError("second derivative of |sigma|^alpha unavailable")
            return central_d2(lambda y: np.abs(evaluate(self.sigma, y)) ** self.alpha, x)
        s = self.noise(x)
        a = self.alpha
        d1 = self.noise_d1(x)
        return a * (a - 1.0) * np.abs(s) ** (a - 2.0) * d1**2 + a * np.abs(s) ** (a - 1.0) * np.sign(
            s
        ) * self.noise_d2(x)

    def replace(self, **changes) -> "StableNoiseModel":
        from dataclasses import replace

        return replace(self, **changes)
