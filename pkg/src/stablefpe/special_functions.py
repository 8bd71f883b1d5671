"""Gamma, Riemann zeta on (-3, 1) and the alpha-stable Levy-measure constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "BERNOULLI_B2",
    "StableConstants",
    "gamma",
    "riemann_zeta",
    "dirichlet_eta",
    "stable_constants",
    "c_sym",
    "c_alpha",
]

BERNOULLI_B2 = 1.0 / 6.0

_ETA_TERMS = 40


def gamma(x: float) -> float:
    """Gamma function for finite x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"gamma: argument must be finite and positive, got {x!r}")
    return math.gamma(x)


@lru_cache(maxsize=None)
def _borwein_d(n: int) -> tuple[float, ...]:
    # d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    d = []
    acc = 0.0
    for i in range(n + 1):
        acc += n * math.factorial(n + i - 1) * 4.0**i / (math.factorial(n - i) * math.factorial(2 * i))
        d.append(acc)
    return tuple(d)


def dirichlet_eta(s: float, n: int = _ETA_TERMS) -> float:
    """Alternating zeta sum_{k>=1} (-1)^{k-1} k^{-s} for s > 0 (Borwein acceleration).

    Error is below 3 (3 + sqrt 8)^{-n}; n=40 is far beyond double precision.
    """
    if not s > 0.0:
        raise ValueError(f"dirichlet_eta: need s > 0, got {s!r}")
    d = _borwein_d(n)
    dn = d[n]
    total = 0.0
    for k in range(n):
        total += (-1.0) ** k * (d[k] - dn) / (k + 1.0) ** s
    return -total / dn


def _sin_over_one_minus_pow2(s: float) -> float:
    # sin(pi s / 2) / (1 - 2^s); both vanish at s = 0.
    if s == 0.0:
        return -math.pi / (2.0 * math.log(2.0))
    return math.sin(0.5 * math.pi * s) / -math.expm1(s * math.log(2.0))


def riemann_zeta(s: float) -> float:
    """Riemann zeta at real s in (-3, 1).

    Uses the reflection formula with zeta(1-s) written through the eta
    function, zeta(1-s) = eta(1-s) / (1 - 2^s), so the removable 0/0 at
    s = 0 becomes an explicit limit.
    """
    s = float(s)
    if not math.isfinite(s) or not (-3.0 < s < 1.0):
        raise ValueError(f"riemann_zeta: s must lie in (-3, 1), got {s!r}")
    r = 1.0 - s
    return (
        2.0**s
        * math.pi ** (s - 1.0)
        * math.gamma(r)
        * dirichlet_eta(r)
        * _sin_over_one_minus_pow2(s)
    )


def c_sym(alpha: float) -> float:
    """Symmetric Levy-measure constant c(1, alpha) (generator is -(-Delta)^{alpha/2})."""
    _check_alpha(alpha)
    return (
        alpha
        * math.gamma(0.5 * (1.0 + alpha))
        / (2.0 ** (1.0 - alpha) * math.sqrt(math.pi) * math.gamma(1.0 - 0.5 * alpha))
    )


def c_alpha(alpha: float) -> float:
    """Total tail constant C_alpha of the skewed stable Levy measure."""
    _check_alpha(alpha)
    if alpha == 1.0:
        return 2.0 / math.pi
    # (1 - a) / cos(pi a / 2) == eps / sin(pi eps / 2) with eps = 1 - a, stable near a = 1
    eps = 1.0 - alpha
    return alpha * eps / (math.gamma(2.0 - alpha) * math.sin(0.5 * math.pi * eps))


def _check_alpha(alpha: float) -> None:
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and 0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (0, 2), got {alpha!r}")


@dataclass(frozen=True)
class StableConstants:
    alpha: float
    beta: float
    c_sym: float
    c_alpha: float
    c_p: float
    c_n: float


def stable_constants(alpha: float, beta: float = 0.0) -> StableConstants:
    """Constants of the symmetric and beta-skewed alpha-stable Levy measures."""
    _check_alpha(alpha)
    if not (math.isfinite(beta) and -1.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (-1, 1), got {beta!r}")
    ca = c_alpha(alpha)
    return StableConstants(
        alpha=float(alpha),
        beta=float(beta),
        c_sym=c_sym(alpha),
        c_alpha=ca,
        c_p=ca * (1.0 + beta) / 2.0,
        c_n=ca * (1.0 - beta) / 2.0,
    )
