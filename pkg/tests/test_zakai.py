import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablefpe import presets
from stablefpe.fpe_core import DensityState, Grid1D
from stablefpe.scheme_symmetric import assemble, solve
from stablefpe.zakai import (
    FilterDegeneracyError,
    FilterState,
    MarkMeasure,
    ObservationRecord,
    SignalObservationModel,
    chi_log_weight,
    chi_weight,
    normalize,
    run_filter,
    simulate_twin,
    zakai_step,
)


def constant_theta_model(theta, alpha=0.5):
    return presets.filter_constant_theta(alpha, theta)


def empty_record():
    return ObservationRecord(np.zeros(0), np.zeros(0))


class TestMarkMeasure:
    def test_gaussian_quadrature_moments(self):
        nu = MarkMeasure.gaussian(rate=2.0, mean=1.0, std=0.5)
        assert nu.integrate(np.ones_like(nu.nodes)) == pytest.approx(2.0, rel=1e-14)
        assert nu.integrate(nu.nodes) == pytest.approx(2.0, rel=1e-13)
        assert nu.integrate((nu.nodes - 1) ** 2) == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("rate", [0.0, -1.0, float("inf")])
    def test_rate_must_be_positive(self, rate):
        with pytest.raises(ValueError):
            MarkMeasure.gaussian(rate=rate)


def test_signal_must_be_pure_jump():
    base = presets.filter_constant_theta()
    with pytest.raises(ValueError):
        SignalObservationModel(
            signal=presets.example1(0.5, 0.5), f2=base.f2, gamma_fn=base.gamma_fn, marks=base.marks, theta=base.theta
        )


class TestChi:
    x = np.linspace(-1, 1, 5)

    def test_theta_zero_gives_one(self):
        rec = ObservationRecord([0.1, 0.2], [0.3, -1.0])
        assert np.all(chi_weight(self.x, (0.0, 0.5), rec, constant_theta_model(0.0)) == 1.0)

    def test_no_jump_window(self):
        chi = chi_weight(self.x, (0.0, 5e-4), empty_record(), constant_theta_model(0.5))
        assert np.allclose(chi, math.exp(-2.5e-4), rtol=1e-14)

    def test_one_jump_window(self):
        rec = ObservationRecord([3e-4], [0.2])
        chi = chi_weight(self.x, (0.0, 5e-4), rec, constant_theta_model(0.5))
        assert np.allclose(chi, 2 * math.exp(-2.5e-4), rtol=1e-14)

    def test_window_is_left_open(self):
        rec = ObservationRecord([0.0, 5e-4], [0.2, 0.1])
        assert len(rec.in_window(0.0, 5e-4)) == 1

    def test_theta_at_least_one_rejected(self):
        rec = ObservationRecord([1e-4], [0.0])
        with pytest.raises(ValueError):
            chi_weight(self.x, (0.0, 5e-4), rec, constant_theta_model(1.0))

    @given(st.lists(st.floats(-3, 3), min_size=0, max_size=5), st.floats(-2, 2))
    def test_informative_chi_is_likelihood_ratio(self, marks, xv):
        # chi = prod_k N(z_k; g x, 1) / N(z_k; 0, 1) when int theta nu = 0
        model = presets.filter_informative(gain=2.5)
        rec = ObservationRecord(np.linspace(0.1, 0.4, len(marks)), marks)
        got = chi_log_weight(np.array([xv]), (0.0, 0.5), rec, model)[0]
        m = 2.5 * xv
        ref = sum(m * z - 0.5 * m * m for z in marks)
        assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_quadrature_theta_integral(self):
        model = constant_theta_model(0.3)
        assert np.allclose(model.theta_nu(0.0, self.x), 0.3, rtol=1e-14)


class TestRecord:
    def test_csv_round_trip(self, tmp_path):
        rec = ObservationRecord([0.125, 1.0 / 3.0], [-0.5, 2.0 / 7.0])
        path = tmp_path / "obs.csv"
        rec.to_csv(path)
        back = ObservationRecord.from_csv(path)
        assert np.array_equal(back.jump_times, rec.jump_times) and np.array_equal(back.marks, rec.marks)

    def test_bad_csv(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            ObservationRecord.from_csv(path)
        path.write_text("t,z\n1,oops\n")
        with pytest.raises(ValueError):
            ObservationRecord.from_csv(path)

    def test_validation(self):
        with pytest.raises(ValueError):
            ObservationRecord([0.2, 0.1], [0.0, 0.0])
        with pytest.raises(ValueError):
            ObservationRecord([0.1], [0.0, 1.0])


class TestTwin:
    def test_jump_count_statistics(self):
        model = constant_theta_model(0.5)
        _, _, rec = simulate_twin(model, 0.0, 5e-4, 5.0, seed=0)
        assert abs(len(rec.jump_times) - 5) <= 3 * math.sqrt(5)
        counts = [len(simulate_twin(model, 0.0, 0.1, 5.0, seed=s)[2].jump_times) for s in range(300)]
        assert abs(np.mean(counts) - 5.0) < 3 * math.sqrt(5.0 / 300)

    def test_determinism(self):
        model = presets.filter_informative()
        a = simulate_twin(model, 0.0, 5e-3, 2.0, seed=7)
        b = simulate_twin(model, 0.0, 5e-3, 2.0, seed=7)
        assert np.array_equal(a[1], b[1])
        assert np.array_equal(a[2].jump_times, b[2].jump_times) and np.array_equal(a[2].marks, b[2].marks)

    def test_zero_jump_coefficient_leaves_drift_only(self):
        base = constant_theta_model(0.5)
        model = SignalObservationModel(
            signal=base.signal,
            f2=base.f2,
            gamma_fn=lambda t, x, z: np.zeros(np.broadcast(np.asarray(x), np.asarray(z)).shape),
            marks=base.marks,
            theta=base.theta,
        )
        times, X, rec = simulate_twin(model, 0.0, 1e-2, 1.0, seed=3)
        ref = np.concatenate([[0.0], np.cumsum(np.cos(X[:-1]) / (2 * math.sqrt(2)) * np.diff(times))])
        assert np.allclose(rec.drift_path, ref, atol=1e-13)

    def test_bistable_drift_vanishes_at_one(self):
        sig = presets.bistable_signal()
        assert sig.drift(np.array([1.0, -1.0, 0.0])).tolist() == [0.0, 0.0, 0.0]


class TestStep:
    def setup_method(self):
        self.grid = Grid1D.natural(2.0, 0.125)
        self.A = assemble(presets.bistable_signal(), self.grid)
        u = presets.narrow_gaussian(self.grid).values * self.A.sigma_abs_alpha
        self.state = FilterState(DensityState(u, self.grid, "u"), 0, np.array([0.0, 1.0]))

    def test_zero_delta_multiplies(self):
        chi = np.linspace(0.5, 2.0, self.grid.n)
        out = zakai_step(self.state, chi, self.A, 0.0)
        assert np.array_equal(out.p_unnormalized.values, chi * self.state.p_unnormalized.values)

    def test_unit_chi_is_backward_euler(self):
        from stablefpe.scheme_symmetric import step_implicit

        out = zakai_step(self.state, np.ones(self.grid.n), self.A, 1e-3)
        ref = step_implicit(self.state.p_unnormalized, self.A, 1e-3)
        assert np.allclose(out.p_unnormalized.values, ref.values, rtol=1e-14, atol=1e-300)

    def test_rejects_p_representation(self):
        bad = FilterState(DensityState(self.state.p_unnormalized.values, self.grid, "p"), 0, np.zeros(2))
        with pytest.raises(ValueError):
            zakai_step(bad, np.ones(self.grid.n), self.A, 1e-3)


class TestNormalize:
    def test_symmetric_density_has_zero_mean(self):
        grid = Grid1D.natural(2.0, 1 / 32)
        p = presets.narrow_gaussian(grid)
        p.values = 3.0 * p.values
        pn, mean = normalize(p)
        assert grid.trapezoid(pn.values) == pytest.approx(1.0, abs=1e-14)
        assert abs(mean) <= 1e-12

    def test_narrow_bump_mean(self):
        grid = Grid1D.natural(2.0, 1 / 32)
        _, mean = normalize(presets.narrow_gaussian(grid, centre=0.4))
        assert abs(mean - 0.4) <= grid.h

    def test_zero_mass_is_degenerate(self):
        grid = Grid1D.natural(1.0, 0.25)
        with pytest.raises(FilterDegeneracyError):
            normalize(DensityState(np.zeros(grid.n), grid, "p"))


class TestRunFilter:
    def test_theta_zero_equals_fpe(self):
        grid = Grid1D.natural(2.0, 1 / 16)
        model = constant_theta_model(0.0)
        init = presets.narrow_gaussian(grid)
        init.time = 0.0
        kappa = np.linspace(0.0, 0.1, 201)
        rec = ObservationRecord([0.01, 0.05], [0.3, -0.2])
        res = run_filter(model, grid, init, kappa, rec)
        ref = solve(model.signal, grid, init, 0.0, 0.1, 5e-4, "implicit", snapshots=[0.1])
        assert np.max(np.abs(res.p_unnormalized[-1] - ref.p[-1])) <= 1e-10

    def test_constant_theta_equals_prior_after_normalization(self):
        grid = Grid1D.natural(2.0, 1 / 16)
        init = presets.narrow_gaussian(grid)
        kappa = np.linspace(0.0, 0.2, 41)
        rec = ObservationRecord([0.03, 0.11], [0.3, -0.2])
        a = run_filter(constant_theta_model(0.5), grid, init, kappa, rec)
        b = run_filter(constant_theta_model(0.0), grid, init, kappa, empty_record())
        assert np.allclose(a.p_normalized, b.p_normalized, rtol=1e-10, atol=1e-12)

    def test_normalized_mass_and_snapshots(self):
        grid = Grid1D.natural(4.0, 1 / 8)
        model = presets.filter_informative()
        _, _, rec = simulate_twin(model, 0.0, 5e-4, 1.0, seed=1)
        res = run_filter(model, grid, presets.narrow_gaussian(grid), np.linspace(0, 1, 2001), rec, keep_every=100)
        assert len(res.times) == 21
        assert np.allclose(res.normalized_masses, 1.0, atol=1e-12)
        assert res.p_normalized.min() >= 0

    def test_large_weights_are_rescaled(self):
        grid = Grid1D.natural(4.0, 1 / 8)
        model = presets.filter_informative(gain=2.5)
        marks = np.full(12, 8.0)
        rec = ObservationRecord(np.linspace(0.011, 0.014, 12), marks)
        res = run_filter(model, grid, presets.narrow_gaussian(grid), np.linspace(0, 0.2, 41), rec)
        assert res.log_scale > 0
        assert np.all(np.isfinite(res.p_unnormalized))
        assert res.means[-1] > 1.5

    def test_partition_validation(self):
        grid = Grid1D.natural(1.0, 0.25)
        with pytest.raises(ValueError):
            run_filter(constant_theta_model(0.5), grid, presets.narrow_gaussian(grid), [0.0, 0.0, 1.0], empty_record())
