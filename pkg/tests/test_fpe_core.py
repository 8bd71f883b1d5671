import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from stablefpe import presets
from stablefpe.fpe_core import (
    DensityState,
    Grid1D,
    QuadConfig,
    apply_adjoint_asym,
    apply_adjoint_sym,
    apply_generator,
    apply_generator_asym,
    build_coefficients,
    inner_product,
    quadrature_points,
    transform,
)
from stablefpe.model import StableNoiseModel
from stablefpe.special_functions import c_sym, riemann_zeta


def unit_model(alpha, beta=0.0, sigma=1.0):
    return StableNoiseModel(
        f=lambda x: 0 * x,
        sigma=lambda x: sigma + 0 * x,
        sigma_deriv1=lambda x: 0 * x,
        sigma_deriv2=lambda x: 0 * x,
        alpha=alpha,
        beta=beta,
        sigma_monotone="increasing",
    )


def gauss(x):
    return np.exp(-0.5 * np.asarray(x) ** 2)


def gauss_d1(x):
    return -np.asarray(x) * gauss(x)


def gauss_d2(x):
    x = np.asarray(x)
    return (x * x - 1) * gauss(x)


def fourier_generator_of_gauss(alpha, x):
    # symbol -|xi|^alpha applied to exp(-x^2/2), evaluated by scipy quad
    val, _ = integrate.quad(lambda k: k**alpha * math.exp(-0.5 * k * k) * math.cos(k * x), 0, math.inf, limit=200)
    return -math.sqrt(2 * math.pi) / math.pi * val


class TestGrid:
    def test_absorbing_layout(self):
        g = Grid1D.absorbing(4)
        assert g.h == 0.25 and g.n == 9
        assert np.allclose(g.x, np.linspace(-1, 1, 9))
        assert g.active.tolist() == [False] + [True] * 7 + [False]
        assert (g.j_min, g.j_max) == (-8, 8)

    def test_natural_layout(self):
        g = Grid1D.natural(2.0, 0.25)
        assert g.J == 8 and g.active.all() and g.x[0] == -2.0

    @pytest.mark.parametrize("args", [(1.0, 0.3), (0.0, 0.1)])
    def test_natural_rejects_non_integer_ratio(self, args):
        with pytest.raises(ValueError):
            Grid1D.natural(*args)

    def test_trapezoid_exact_for_linear(self):
        g = Grid1D.natural(1.0, 0.1)
        assert g.trapezoid(1 + g.x) == pytest.approx(2.0, abs=1e-14)


def test_density_state_validates_shape_and_representation():
    g = Grid1D.absorbing(4)
    with pytest.raises(ValueError):
        DensityState(np.zeros(3), g)
    with pytest.raises(ValueError):
        DensityState(np.zeros(9), g, "q")


@given(st.floats(min_value=0.1, max_value=1.9))
def test_transform_round_trip(alpha):
    g = Grid1D.natural(3.0, 0.25)
    m = presets.example1(alpha)
    p = presets.narrow_gaussian(g)
    back = transform(transform(p, m, "u"), m, "p")
    assert np.allclose(back.values, p.values, rtol=1e-14, atol=0)


def test_coefficients_for_example1_closed_form():
    alpha, gval = 1.5, 0.5
    g = Grid1D.absorbing(16)
    m = presets.example1(alpha, gval)
    cf = build_coefficients(m, g)
    x = g.x
    s = (2 + np.sin(x)) ** alpha
    s1 = alpha * (2 + np.sin(x)) ** (alpha - 1) * np.cos(x)
    # with constant g: M = -g^2 s'/s + 0.2x
    assert np.allclose(cf.M, -gval**2 * s1 / s + 0.2 * x, rtol=1e-12, atol=1e-13)
    assert np.isnan(cf.N_tilde[0]) and np.isnan(cf.N_tilde[-1])
    c = c_sym(alpha)
    i = g.active
    extra = c * s[i] / alpha * ((1 + x[i]) ** -alpha + (1 - x[i]) ** -alpha)
    assert np.allclose(cf.N[i] - cf.N_tilde[i], extra, rtol=1e-13)
    Ch = 0.5 * gval**2 - c * riemann_zeta(alpha - 1) * s * g.h ** (2 - alpha)
    assert np.allclose(cf.C_h, Ch, rtol=1e-14)


def test_reaction_term_against_fd_of_quotient():
    m = presets.example1(0.8, 0.0)
    g = Grid1D.natural(2.0, 0.25)
    cf = build_coefficients(m, g)
    # g = 0: N = -s (f/s)'
    q = lambda y: -0.2 * y / (2 + np.sin(y)) ** 0.8
    eps = 1e-6
    fd = (q(g.x + eps) - q(g.x - eps)) / (2 * eps)
    assert np.allclose(cf.N, -cf.sigma_abs_alpha * fd, atol=1e-8)


class TestGeneratorQuadrature:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    @pytest.mark.parametrize("x", [0.0, 0.7, 2.5])
    def test_symmetric_generator_matches_fourier_symbol(self, alpha, x):
        quad = QuadConfig(support=(-40.0, 40.0))
        got = apply_generator(gauss, gauss_d1, gauss_d2, x, unit_model(alpha), quad)
        assert got == pytest.approx(fourier_generator_of_gauss(alpha, x), rel=1e-6, abs=1e-8)

    def test_asym_generator_reduces_to_symmetric_at_beta_zero(self):
        quad = QuadConfig(support=(-40.0, 40.0))
        m = presets.example2(1.2, 0.0)
        xs = np.array([-0.5, 0.0, 0.9])
        a = apply_generator_asym(gauss, gauss_d1, gauss_d2, xs, m, quad)
        b = apply_generator(gauss, gauss_d1, gauss_d2, xs, m, quad)
        assert np.allclose(a, b, rtol=1e-9, atol=1e-10)

    def test_adjoint_of_constant_sigma_is_generator(self):
        # with f = g = 0 and constant sigma the operator is self-adjoint
        quad = QuadConfig(support=(-40.0, 40.0))
        m = unit_model(0.7, sigma=1.3)
        xs = np.array([0.0, 1.1])
        assert np.allclose(
            apply_adjoint_sym(gauss, gauss_d1, xs, m, quad, gauss_d2),
            apply_generator(gauss, gauss_d1, gauss_d2, xs, m, quad),
            rtol=1e-10,
        )

    def test_asym_adjoint_requires_monotone_declaration(self):
        m = presets.example1(1.5)
        with pytest.raises(ValueError):
            apply_adjoint_asym(gauss, gauss_d1, 0.0, m, QuadConfig(support=(-9, 9)))

    def test_sign_change_rejected(self):
        m = StableNoiseModel(f=lambda x: 0 * x, sigma=lambda x: x + 0.5, alpha=1.5, beta=0.3, sigma_monotone="increasing")
        with pytest.raises(ValueError):
            apply_generator_asym(gauss, gauss_d1, gauss_d2, np.array([-1.0, 0.0]), m, QuadConfig(support=(-9, 9)))

    def test_quad_window_validation(self):
        with pytest.raises(ValueError):
            QuadConfig().window(0.0)
        with pytest.raises(ValueError):
            QuadConfig(support=(-5, 5), z_max=1.0).window(0.0)


def test_inner_product_and_points_agree():
    val = inner_product(np.cos, np.cos, (0.0, math.pi))
    x, w = quadrature_points((0.0, math.pi))
    assert val == pytest.approx(math.pi / 2, rel=1e-14)
    assert np.sum(w * np.cos(x) ** 2) == pytest.approx(val, rel=1e-14)


def test_adjointness_quick():
    # coarse version of the acceptance check for one symmetric and one skewed model
    def bump(c, s):
        f = lambda x: np.exp(-0.5 * ((np.asarray(x) - c) / s) ** 2)
        d1 = lambda x: -(np.asarray(x) - c) / s**2 * f(x)
        d2 = lambda x: (((np.asarray(x) - c) / s) ** 2 - 1) / s**2 * f(x)
        return f, d1, d2, (c - 9 * s, c + 9 * s)

    phi, p1, p2, sp = bump(0.2, 0.25)
    v, v1, v2, sv = bump(-0.1, 0.3)
    for model, gen, adj in [
        (presets.example1(1.5), apply_generator, apply_adjoint_sym),
        (presets.example2(0.5, 0.5), apply_generator_asym, apply_adjoint_asym),
    ]:
        xs, ws = quadrature_points(sv, 24, 12)
        lhs = np.sum(ws * gen(phi, p1, p2, xs, model, QuadConfig(support=sp)) * v(xs))
        xs, ws = quadrature_points(sp, 24, 12)
        rhs = np.sum(ws * phi(xs) * adj(v, v1, xs, model, QuadConfig(support=sv), v2))
        assert abs(lhs - rhs) / (abs(lhs) + 1) <= 1e-4
