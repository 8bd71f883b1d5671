import math

import numpy as np
import pytest
import scipy.stats as ss

from stablefpe import presets
from stablefpe.fpe_core import Grid1D
from stablefpe.model import StableNoiseModel
from stablefpe.stable_process import (
    BLOCK,
    PathEnsemble,
    empirical_density,
    sample_stable,
    simulate_paths,
    write_terminal_csv,
)

CDF_POINTS = np.array([-5.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0, 5.0])


def cdf_zscores(sample, cdf_values):
    n = len(sample)
    emp = (sample[:, None] <= CDF_POINTS).mean(axis=0)
    return np.abs(emp - cdf_values) / np.sqrt(cdf_values * (1 - cdf_values) / n)


class TestSampler:
    def test_gaussian_limit_variance(self):
        x = sample_stable(2.0, 0.0, np.random.default_rng(0), 1_000_000)
        assert abs(x.var() - 2.0) <= 0.05 * 2.0

    def test_cauchy_symmetry(self):
        x = sample_stable(1.0, 0.0, np.random.default_rng(1), 1_000_000)
        assert abs(np.mean(x <= 0) - 0.5) <= 0.002

    def test_median_half(self):
        x = sample_stable(0.5, 0.0, np.random.default_rng(2), 1_000_000)
        assert abs(np.median(x)) <= 0.01

    def test_gaussian_limit_matches_normal(self):
        x = sample_stable(2.0, 0.7, np.random.default_rng(3), 200_000)
        z = cdf_zscores(x, ss.norm(scale=math.sqrt(2)).cdf(CDF_POINTS))
        assert z.max() < 5

    @pytest.mark.parametrize("alpha,beta", [(0.5, 0.0), (0.5, 0.8), (1.0, 0.5), (0.8, -0.7), (1.5, 0.5), (1.9, 0.3)])
    def test_cdf_matches_scipy_levy_stable(self, alpha, beta, monkeypatch):
        monkeypatch.setattr(ss.levy_stable, "parameterization", "S1")
        x = sample_stable(alpha, beta, np.random.default_rng(4), 200_000)
        z = cdf_zscores(x, ss.levy_stable(alpha, beta).cdf(CDF_POINTS))
        assert z.max() < 5

    @pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (2.1, 0.0), (1.0, 1.5), (float("nan"), 0.0)])
    def test_domain(self, alpha, beta):
        with pytest.raises(ValueError):
            sample_stable(alpha, beta, np.random.default_rng(0), 3)


def frozen_model():
    return StableNoiseModel(f=lambda x: 0 * x, sigma=lambda x: 0 * x, alpha=1.5, allow_degenerate=True)


class TestPaths:
    def test_no_dynamics_keeps_paths_constant(self):
        ens = simulate_paths(frozen_model(), 0.3, 1e-2, 1.0, 50, seed=0, record_stride=10)
        assert np.all(ens.paths == 0.3)
        assert ens.paths.shape == (50, 11)

    def test_ode_limit(self):
        m = StableNoiseModel(f=lambda x: -x, sigma=lambda x: 0 * x, alpha=1.5, allow_degenerate=True)
        ens = simulate_paths(m, 1.0, 1e-4, 1.0, 4, seed=0)
        assert np.allclose(ens.terminal, math.exp(-1), atol=1e-3)

    @pytest.mark.parametrize("scheme", ["tamed", "implicit"])
    def test_drift_schemes_share_ode_limit(self, scheme):
        m = StableNoiseModel(f=lambda x: -x, f_prime=lambda x: -1 + 0 * x, sigma=lambda x: 0 * x, alpha=1.5, allow_degenerate=True)
        ens = simulate_paths(m, 1.0, 1e-4, 1.0, 2, seed=0, drift_scheme=scheme)
        assert np.allclose(ens.terminal, math.exp(-1), atol=1e-3)

    def test_seeded_determinism_bitwise(self):
        m = presets.example1(1.5, 0.5)
        a = simulate_paths(m, 0.0, 1e-3, 0.1, BLOCK + 10, seed=42)
        b = simulate_paths(m, 0.0, 1e-3, 0.1, BLOCK + 10, seed=42)
        assert np.array_equal(a.paths, b.paths)
        c = simulate_paths(m, 0.0, 1e-3, 0.1, BLOCK + 10, seed=43)
        assert not np.array_equal(a.paths, c.paths)

    def test_domain_kills_and_records_nan(self):
        ens = simulate_paths(presets.example1(1.5), 0.0, 1e-3, 0.2, 2000, seed=1, domain=(-1.0, 1.0))
        assert ens.killed.any() and ens.alive.any()
        assert np.all(np.isnan(ens.terminal[ens.killed]))
        assert np.all(np.abs(ens.terminal[ens.alive]) < 1)

    def test_non_finite_state_flagged_as_escaped(self):
        m = StableNoiseModel(f=lambda x: x**3, sigma=lambda x: 1 + 0 * x, alpha=1.5)
        with np.errstate(over="ignore", invalid="ignore"):
            ens = simulate_paths(m, np.array([0.0, 1e200]), 1.0, 2.0, 2, seed=0)
        assert ens.escaped[1] and np.isnan(ens.terminal[1])

    def test_record_times(self):
        ens = simulate_paths(frozen_model(), 0.0, 0.1, 1.0, 3, seed=0, record_stride=3, t_start=0.5)
        assert np.allclose(ens.times, [0.5, 0.8, 1.0])

    @pytest.mark.parametrize("kw", [dict(dt=0.0), dict(n_paths=0), dict(t_final=-1.0), dict(drift_scheme="rk4"), dict(record_stride=0)])
    def test_argument_validation(self, kw):
        args = dict(model=frozen_model(), x0=0.0, dt=0.1, t_final=1.0, n_paths=2)
        args.update(kw)
        with pytest.raises(ValueError):
            simulate_paths(**args)

    def test_shift_equivariance(self):
        shift = 0.7
        base = presets.example1(1.5)
        moved = StableNoiseModel(
            f=lambda x: -0.2 * (x - shift), sigma=lambda x: 2 + np.sin(x - shift), alpha=1.5
        )
        a = simulate_paths(base, 0.0, 1e-3, 0.2, 50_000, seed=9).terminal
        b = simulate_paths(moved, shift, 1e-3, 0.2, 50_000, seed=10).terminal - shift
        grid = Grid1D.natural(3.0, 0.1)
        pa = empirical_density(PathEnsemble(np.array([0.0, 0.2]), a[:, None], 1e-3, 0.2, None, np.zeros(len(a), bool), np.zeros(len(a), bool)), grid)
        pb = empirical_density(PathEnsemble(np.array([0.0, 0.2]), b[:, None], 1e-3, 0.2, None, np.zeros(len(b), bool), np.zeros(len(b), bool)), grid)
        # two independent 5e4-path histograms: L1 distance of pure noise is ~0.05
        assert grid.h * np.abs(pa.values - pb.values).sum() < 0.1


def ensemble_from(points, killed=None):
    points = np.asarray(points, dtype=float)
    n = len(points)
    killed = np.zeros(n, bool) if killed is None else killed
    return PathEnsemble(np.array([0.0, 1.0]), np.column_stack([np.zeros(n), points]), 1.0, 1.0, None, killed, np.zeros(n, bool))


class TestEmpiricalDensity:
    def test_point_mass(self):
        grid = Grid1D.natural(1.0, 0.1)
        d = empirical_density(ensemble_from(np.zeros(100)), grid)
        assert d.values[grid.J] == pytest.approx(1 / grid.h)
        assert np.count_nonzero(d.values) == 1

    def test_half_absorbed_mass(self):
        grid = Grid1D.absorbing(20)
        n = 10_000
        rng = np.random.default_rng(0)
        pts = rng.uniform(-0.9, 0.9, n)
        killed = np.arange(n) % 2 == 0
        pts[killed] = np.nan
        d = empirical_density(ensemble_from(pts, killed), grid, absorbing=True)
        assert abs(d.values.sum() * grid.h - 0.5) <= 1 / math.sqrt(n)

    def test_normal_sample_l1(self):
        grid = Grid1D.natural(6.0, 0.05)
        pts = np.random.default_rng(5).standard_normal(1_000_000)
        d = empirical_density(ensemble_from(pts), grid)
        ref = ss.norm.pdf(grid.x)
        assert grid.h * np.abs(d.values - ref).sum() <= 0.02

    def test_empty_ensemble(self):
        with pytest.raises(ValueError):
            empirical_density(ensemble_from([]), Grid1D.absorbing(4))


def test_terminal_csv(tmp_path):
    ens = ensemble_from([0.25, np.nan])
    path = tmp_path / "t.csv"
    write_terminal_csv(ens, path)
    assert path.read_text().split() == ["0.25", "nan"]
