"""Tests for method-of-steps trajectories, energies, and rate fits."""
from __future__ import annotations

import numpy as np
import pytest

from thermodelay import (
    EnergySeries,
    HistoryFn,
    HistoryKind,
    InitialData,
    SystemSpec,
    Variant,
    default_initial,
    energy,
    energy_series,
    fit_exponential_rate,
    fit_polynomial_order,
    kernel_name,
    simulate,
)


class TestHistoryFn:
    def test_zero_history(self):
        h = HistoryFn.zero()
        assert h.kind is HistoryKind.CONSTANT_ZERO
        vals = h.values(3, np.array([-1.0, -0.25, 0.0]))
        assert np.array_equal(vals, np.zeros(3, dtype=complex))

    def test_constant_history_per_mode(self):
        h = HistoryFn.constant([1 + 2j, 3.0])
        assert h.value(0, -0.5) == 1 + 2j
        vals = h.values(1, np.array([-0.75, -0.1]))
        assert np.array_equal(vals, np.array([3.0 + 0j, 3.0 + 0j]))

    def test_constant_history_missing_mode(self):
        h = HistoryFn.constant([1.0])
        with pytest.raises(ValueError):
            h.values(1, np.array([-0.5]))

    def test_callable_history(self):
        h = HistoryFn.from_callable(lambda j, t: j + 1j * t)
        vals = h.values(2, np.array([-0.25, -1.0]))
        assert np.allclose(vals, [2 - 0.25j, 2 - 1.0j], rtol=0, atol=0)

    def test_callable_history_without_fn(self):
        h = HistoryFn(HistoryKind.CALLABLE)
        with pytest.raises(ValueError):
            h.values(0, np.array([-0.5]))


class TestDefaultInitial:
    def test_states_and_trace_consistency_heat(self, heat_spec):
        mus = [4.0, 16.0]
        init = default_initial(heat_spec, mus)
        assert np.allclose(init.states[:, 0], [0.25, 0.0625], rtol=1e-15)
        assert np.array_equal(init.states[:, 1], np.zeros(2))
        assert np.allclose(init.states[:, 2], [0.25, 0.0625], rtol=1e-15)
        # constant history equals the t=0 trace of the delayed quantity
        expected = np.array(mus) ** (heat_spec.alpha / 2.0) * init.states[:, 2]
        assert np.allclose(init.history.coefficients, expected, rtol=1e-15)

    def test_states_and_trace_consistency_elastic(self, elastic_spec):
        init = default_initial(elastic_spec, [9.0])
        assert init.history.value(0, -0.3) == pytest.approx(3.0 / 9.0, rel=1e-15)


class TestSimulateValidation:
    def test_step_above_an_eighth_of_the_delay(self, heat_spec):
        with pytest.raises(ValueError):
            simulate(heat_spec, [1.0], None, T=4.0, dt=0.2)

    def test_nonpositive_step(self, heat_spec):
        with pytest.raises(ValueError):
            simulate(heat_spec, [1.0], None, T=4.0, dt=0.0)

    def test_short_horizon(self, heat_spec):
        with pytest.raises(ValueError):
            simulate(heat_spec, [1.0], None, T=1.5, dt=0.1)

    def test_empty_mode_list(self, heat_spec):
        with pytest.raises(ValueError):
            simulate(heat_spec, [], None, T=4.0, dt=0.1)

    def test_history_trace_mismatch_warns(self, heat_spec):
        states = np.zeros((1, 3), dtype=complex)
        states[0, 2] = 1.0
        init = InitialData(states=states, history=HistoryFn.constant([0.0]))
        with pytest.warns(UserWarning, match="mismatch"):
            simulate(heat_spec, [4.0], init, T=2.0, dt=0.125)


class TestTrajectory:
    def test_kernel_name_is_known(self):
        assert kernel_name() in ("compiled", "python")

    def test_zero_data_stays_zero(self, heat_spec):
        init = InitialData(states=np.zeros((2, 3), dtype=complex), history=HistoryFn.zero())
        traj = simulate(heat_spec, [1.0, 4.0], init, T=2.0, dt=0.125)
        assert traj.n_modes == 2
        assert not traj.blew_up
        assert np.all(traj.states == 0)
        assert np.all(traj.traces == 0)
        assert energy(traj, traj.times[-1], heat_spec.xi) == 0.0

    def test_sample_index(self, heat_spec):
        traj = simulate(heat_spec, [4.0], None, T=2.0, dt=0.125)
        assert traj.sample_index(0.0) == 0
        assert traj.sample_index(3 * traj.dt) == 3
        with pytest.raises(ValueError):
            traj.sample_index(0.5 * traj.dt)
        with pytest.raises(ValueError):
            traj.sample_index(traj.times[-1] + traj.dt)
        with pytest.raises(ValueError):
            traj.sample_index(-traj.dt)

    def test_delayed_trace_reads_history_for_negative_times(self, heat_spec):
        init = default_initial(heat_spec, [4.0])
        traj = simulate(heat_spec, [4.0], init, T=2.0, dt=0.125)
        h = init.history.value(0, -0.5)
        vals = traj.delayed_trace(0, np.array([-0.9, -0.5, -1e-9]))
        assert np.allclose(vals, h, rtol=1e-15)

    def test_delayed_trace_matches_samples_on_grid(self, heat_spec):
        traj = simulate(heat_spec, [4.0, 16.0], None, T=2.0, dt=0.125)
        ts = traj.times[:: len(traj.times) // 8]
        for j in range(2):
            vals = traj.delayed_trace(j, ts)
            ks = np.array([traj.sample_index(t) for t in ts])
            assert np.allclose(vals, traj.traces[j, ks], rtol=1e-12, atol=1e-15)

    def test_linearity_in_the_data(self, heat_spec, rng):
        mus = [1.0, 9.0]
        states = (rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))) * 0.5
        traces = np.array(mus) ** (heat_spec.alpha / 2.0) * states[:, 2]
        init1 = InitialData(states=states, history=HistoryFn.constant(traces))
        init2 = InitialData(states=2.0 * states, history=HistoryFn.constant(2.0 * traces))
        t1 = simulate(heat_spec, mus, init1, T=2.0, dt=0.125)
        t2 = simulate(heat_spec, mus, init2, T=2.0, dt=0.125)
        assert np.allclose(t2.states, 2.0 * t1.states, rtol=1e-12, atol=1e-15)
        e1 = energy(t1, t1.times[-1], heat_spec.xi)
        e2 = energy(t2, t2.times[-1], heat_spec.xi)
        assert e2 == pytest.approx(4.0 * e1, rel=1e-12)

    def test_blow_up_guard_sets_flag(self):
        # undamped delayed feedback has a right-half-plane root, so the
        # magnitude passes the 1e12 guard well before the horizon
        spec = SystemSpec.probe(Variant.DELAY_ELASTIC, 0.5, 0.5, a=0.0, tau=1.0, xi=1.0)
        traj = simulate(spec, [1.0], None, T=400.0, dt=0.125)
        assert traj.blew_up
        assert traj.times[-1] < 400.0
        assert np.max(np.abs(traj.states[0, -1])) > 1e12


class TestEnergy:
    def test_constant_history_closed_form(self, heat_spec):
        # u = v = 0 and a flat, trace-consistent history make the energy
        # at t=0 exactly half of |theta|^2 + xi |h|^2
        mu, h = 9.0, 0.8
        theta0 = h / mu ** (heat_spec.alpha / 2.0)
        states = np.zeros((1, 3), dtype=complex)
        states[0, 2] = theta0
        init = InitialData(states=states, history=HistoryFn.constant([h]))
        traj = simulate(heat_spec, [mu], init, T=2.0, dt=0.125)
        expected = 0.5 * (abs(theta0) ** 2 + heat_spec.xi * h**2)
        assert energy(traj, 0.0, heat_spec.xi) == pytest.approx(expected, rel=1e-12)

    def test_quadrature_against_dense_trapezoid(self, heat_spec, rng):
        mus = [1.0, 9.0]
        states = (rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))) * 0.5
        traces = np.array(mus) ** (heat_spec.alpha / 2.0) * states[:, 2]
        init = InitialData(states=states, history=HistoryFn.constant(traces))
        traj = simulate(heat_spec, mus, init, T=3.0, dt=0.125)
        t = 2.0
        k = traj.sample_index(t)
        rho = np.linspace(0.0, 1.0, 10_001)
        total = 0.0
        for j, mu in enumerate(mus):
            u, v, th = traj.states[j, k]
            total += mu * abs(u) ** 2 + abs(v) ** 2 + abs(th) ** 2
            vals = traj.delayed_trace(j, t - heat_spec.tau * rho)
            total += heat_spec.xi * float(np.trapezoid(np.abs(vals) ** 2, rho))
        assert energy(traj, t, heat_spec.xi) == pytest.approx(0.5 * total, rel=1e-6)

    def test_series_matches_pointwise_energy(self, heat_spec):
        traj = simulate(heat_spec, [4.0], None, T=2.0, dt=0.125)
        series = energy_series(traj, stride=4)
        assert np.array_equal(series.times, traj.times[::4])
        assert series.tau == heat_spec.tau
        for t, val in zip(series.times, series.values):
            assert val == pytest.approx(energy(traj, t, heat_spec.xi), rel=1e-13)

    def test_heat_energy_never_increases(self, heat_spec):
        # interior history weight, so the generator is dissipative and the
        # discrete energy is monotone up to quadrature noise
        traj = simulate(heat_spec, [1.0, 16.0], None, T=10.0, dt=0.125)
        series = energy_series(traj)
        e = series.values
        assert np.all(e[1:] <= e[:-1] * (1.0 + 1e-9))

    def test_elastic_energy_decays(self, elastic_spec):
        traj = simulate(elastic_spec, [1.0, 4.0], None, T=20.0, dt=0.125)
        series = energy_series(traj)
        assert series.values[-1] < 0.5 * series.values[0]

    def test_terminal_energy_converges_at_fourth_order(self, heat_spec):
        es = []
        for dt in (0.125, 0.0625, 0.03125, 0.015625):
            traj = simulate(heat_spec, [4.0], None, T=2.0, dt=dt)
            es.append(energy(traj, 2.0, heat_spec.xi))
        d1, d2, d3 = (abs(es[i] - es[i + 1]) for i in range(3))
        assert 8.0 <= d1 / d2 <= 40.0
        assert 8.0 <= d2 / d3 <= 40.0
        assert d3 <= 2e-6 * es[-1]

    def test_adaptive_agrees_with_a_fine_fixed_run(self, heat_spec):
        adaptive = simulate(heat_spec, [1.0, 9.0], None, T=2.0, dt=0.125, adaptive=True)
        fine = simulate(heat_spec, [1.0, 9.0], None, T=2.0, dt=1.0 / 512.0)
        ea = energy(adaptive, 2.0, heat_spec.xi)
        ef = energy(fine, 2.0, heat_spec.xi)
        assert adaptive.dt <= 0.125
        assert ea == pytest.approx(ef, rel=1e-5)


class TestRateFits:
    def test_exponential_fit_recovers_synthetic_rate(self):
        t = np.linspace(0.0, 8.0, 161)
        series = EnergySeries(times=t, values=3.0 * np.exp(-0.7 * t), tau=1.0)
        fit = fit_exponential_rate(series, (0.0, 8.0))
        assert fit.w == pytest.approx(0.7, abs=1e-12)
        assert fit.C == pytest.approx(3.0, rel=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_exponential_fit_window_too_short(self):
        t = np.linspace(0.0, 8.0, 161)
        series = EnergySeries(times=t, values=np.exp(-t), tau=1.0)
        with pytest.raises(ValueError):
            fit_exponential_rate(series, (0.0, 3.0))

    def test_exponential_fit_too_few_samples(self):
        series = EnergySeries(times=np.array([0.0, 12.0]), values=np.ones(2), tau=1.0)
        with pytest.raises(ValueError):
            fit_exponential_rate(series, (0.0, 12.0))

    def test_exponential_fit_rejects_nonpositive_energy(self):
        t = np.linspace(0.0, 8.0, 17)
        vals = np.exp(-t)
        vals[5] = 0.0
        series = EnergySeries(times=t, values=vals, tau=1.0)
        with pytest.raises(ValueError):
            fit_exponential_rate(series, (0.0, 8.0))

    def test_polynomial_fit_recovers_synthetic_order(self):
        t = np.linspace(1.0, 9.0, 200)
        series = EnergySeries(times=t, values=5.0 * t**-2.0, tau=1.0)
        fit = fit_polynomial_order(series, (1.0, 9.0))
        assert fit.p == pytest.approx(2.0, abs=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)
        assert fit.truncation_limited

    def test_polynomial_fit_needs_positive_start(self):
        t = np.linspace(0.0, 9.0, 200)
        series = EnergySeries(times=t, values=np.exp(-t), tau=1.0)
        with pytest.raises(ValueError):
            fit_polynomial_order(series, (0.0, 9.0))
