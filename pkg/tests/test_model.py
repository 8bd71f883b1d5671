import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablefpe import presets
from stablefpe.model import StableNoiseModel, central_d1, central_d2, evaluate


def test_evaluate_broadcasts_constants_and_none():
    x = np.linspace(-1, 1, 5)
    assert np.array_equal(evaluate(None, x), np.zeros(5))
    assert np.array_equal(evaluate(lambda y: 3.0, x), np.full(5, 3.0))


def test_finite_difference_helpers_on_sine():
    x = np.linspace(-2, 2, 11)
    assert np.allclose(central_d1(np.sin, x), np.cos(x), atol=1e-8)
    assert np.allclose(central_d2(np.sin, x), -np.sin(x), atol=1e-5)


@pytest.mark.parametrize("kw", [dict(alpha=0.0), dict(alpha=2.0), dict(alpha=1.0, beta=1.0), dict(alpha=1.0, sigma_monotone="up")])
def test_invalid_parameters_rejected(kw):
    with pytest.raises(ValueError):
        StableNoiseModel(f=lambda x: 0 * x, sigma=lambda x: 1 + 0 * x, **kw)


def test_vanishing_sigma_rejected_unless_allowed():
    m = StableNoiseModel(f=lambda x: 0 * x, sigma=lambda x: x, alpha=1.5)
    with pytest.raises(ValueError):
        m.sigma_abs_alpha(np.array([0.0, 1.0]))
    ok = m.replace(allow_degenerate=True)
    assert ok.sigma_abs_alpha(np.array([0.0]))[0] == 0.0


def test_missing_derivative_without_fallback_raises():
    m = StableNoiseModel(f=np.sin, sigma=lambda x: 2 + 0 * x, alpha=1.0, fd_fallback=False)
    with pytest.raises(ValueError):
        m.drift_d1(np.zeros(3))


@given(st.floats(min_value=0.1, max_value=1.9), st.floats(min_value=-3, max_value=3))
def test_sigma_power_derivatives_match_fd(alpha, x):
    m = presets.example1(alpha)
    fd = m.replace(sigma_deriv1=None, sigma_deriv2=None)
    pts = np.array([x])
    assert m.sigma_abs_alpha_d1(pts)[0] == pytest.approx(fd.sigma_abs_alpha_d1(pts)[0], rel=1e-6, abs=1e-8)
    assert m.sigma_abs_alpha_d2(pts)[0] == pytest.approx(fd.sigma_abs_alpha_d2(pts)[0], rel=1e-4, abs=1e-5)


def test_negative_sigma_power_derivative():
    m = presets.example2_negative(1.5, 0.0)
    x = np.linspace(-1, 1, 7)
    expected = 1.5 * (np.pi + np.arctan(x)) ** 0.5 / (1 + x * x)
    assert np.allclose(m.sigma_abs_alpha_d1(x), expected, rtol=1e-13)
