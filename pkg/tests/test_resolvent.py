"""Resolvent norms: dual engines, sweeps, peaks, growth-exponent fits."""
from __future__ import annotations

import math

import numpy as np
import pytest

from thermodelay.chareq import ModeSystem, strip_roots
from thermodelay.generator import (
    build_grid,
    build_mode_generator,
    random_state,
)
from thermodelay.generator import energy_norm_sq as modal_energy_norm_sq
from thermodelay.model import SystemSpec, Variant
from thermodelay.resolvent import (
    GrowthFit,
    InsufficientSpanError,
    NearSingularError,
    ResolventSample,
    energy_weights,
    envelope,
    growth_exponent_fit,
    loglog_slope,
    mode_peak,
    mode_resolvent_norm,
    mode_resolvent_norm_reduced,
    peak_samples,
    resolvent_norm_lower_bound,
    resolvent_sweep,
)

VOLTERRA_SLACK = 1.0 / math.sqrt(2.0)  # tau/sqrt(2) at tau=1, see reduced engine


@pytest.fixture
def heat_gen(heat_spec):
    return build_mode_generator(ModeSystem(heat_spec, 16.0), build_grid(48))


class TestEnergyWeights:
    def test_weighted_norm_equals_modal_energy(self, heat_spec, elastic_spec, rng):
        # the eliminated inflow node's quadrature mass rides on the trace
        # carrier, so the diagonal weights reproduce the full energy norm
        grid = build_grid(16)
        for spec, mu in [(heat_spec, 16.0), (elastic_spec, 9.0)]:
            mode = ModeSystem(spec, mu)
            gen = build_mode_generator(mode, grid)
            wt = energy_weights(gen)
            assert wt.shape == (gen.dim,)
            assert np.all(wt > 0)
            for _ in range(20):
                state = random_state(mode, grid, rng)
                packed = state.packed()
                weighted = float(np.real(np.conj(packed) @ (wt * packed)))
                direct = modal_energy_norm_sq(spec, mode, state, grid)
                assert weighted == pytest.approx(direct, rel=1e-10)


class TestModeResolventNorm:
    def test_positive_and_finite(self, heat_gen):
        for w in (0.0, 0.5, 4.0, 40.0):
            v = mode_resolvent_norm(heat_gen, w)
            assert v > 0 and np.isfinite(v)

    def test_omega_symmetry(self, heat_gen):
        for w in (0.3, 1.7, 12.0):
            assert mode_resolvent_norm(heat_gen, -w) == pytest.approx(
                mode_resolvent_norm(heat_gen, w), rel=1e-9
            )

    def test_zero_frequency_equals_inverse_norm(self, heat_gen):
        # at omega = 0 the resolvent is -M^{-1}; dual route via the
        # explicit inverse in the scaled norm
        wt = np.sqrt(energy_weights(heat_gen))
        scaled = (wt[:, None] * heat_gen.matrix) / wt[None, :]
        direct = float(np.linalg.norm(np.linalg.inv(scaled), 2))
        assert mode_resolvent_norm(heat_gen, 0.0) == pytest.approx(direct, rel=1e-10)

    def test_high_frequency_decay(self, heat_spec):
        # norm falls like 1/omega far above every mode frequency
        gen = build_mode_generator(ModeSystem(heat_spec, 16.0), build_grid(32))
        w0 = 1e3 * math.sqrt(16.0)
        v0 = mode_resolvent_norm(gen, w0)
        v1 = mode_resolvent_norm(gen, 2 * w0)
        assert v0 <= 2.0 / w0
        assert v1 / v0 == pytest.approx(0.5, rel=0.2)

    def test_near_singular_reported(self):
        # kappa = 0 decouples the delayed feedback and chi(0) = 0 exactly,
        # so the generator is singular and omega = 0 must be refused
        probe = SystemSpec.probe(Variant.DELAY_HEAT, 0.5, 0.5, a=0.0, kappa=0.0)
        gen = build_mode_generator(ModeSystem(probe, 4.0), build_grid(16))
        with pytest.raises(NearSingularError) as err:
            mode_resolvent_norm(gen, 0.0)
        assert err.value.omega == 0.0
        assert err.value.sigma_min < 1e-13


class TestEngineAgreement:
    @pytest.mark.parametrize("mu", [1.0, 16.0])
    def test_reduced_engine_tracks_matrix_engine(self, heat_spec, elastic_spec, mu):
        # the reduced engine eliminates the transport exactly but omits the
        # Volterra history response, bounded by tau/sqrt(2); agreement is
        # therefore relative plus that additive slack
        grid = build_grid(48)
        for spec in (heat_spec, elastic_spec):
            mode = ModeSystem(spec, mu)
            gen = build_mode_generator(mode, grid)
            for w in (0.2, 1.0, math.sqrt(mu), 2.0 * math.sqrt(mu)):
                full = mode_resolvent_norm(gen, w)
                reduced = mode_resolvent_norm_reduced(mode, w)
                assert abs(full - reduced) <= 0.08 * max(full, reduced) + VOLTERRA_SLACK

    def test_agreement_at_the_peak(self, heat_spec):
        mode = ModeSystem(heat_spec, 16.0)
        gen = build_mode_generator(mode, build_grid(48))
        w_peak, v_peak = mode_peak(mode, polish=True)
        full = mode_resolvent_norm(gen, w_peak)
        assert v_peak == pytest.approx(full, rel=0.08)


class TestLowerBound:
    def test_is_a_bound_and_spot_check_tight(self, heat_gen):
        for w in (0.5, 4.56):
            truth = mode_resolvent_norm(heat_gen, w)
            bound = resolvent_norm_lower_bound(heat_gen, w, samples=100, seed=0)
            assert bound <= truth * (1 + 1e-9)
            assert truth <= 1.05 * bound

    def test_deterministic_in_seed(self, heat_gen):
        a = resolvent_norm_lower_bound(heat_gen, 1.0, samples=20, seed=7)
        b = resolvent_norm_lower_bound(heat_gen, 1.0, samples=20, seed=7)
        assert a == b


class TestResolventSweep:
    def test_grid_rows_and_tagging(self, heat_spec):
        omegas = [0.5, 1.0, 2.0, 4.0]
        samples = resolvent_sweep(heat_spec, [1.0, 16.0], omegas, n=24, refine=False)
        assert len(samples) == 8
        assert [s.mode_index for s in samples] == [0] * 4 + [1] * 4
        for s in samples:
            assert s.omega in omegas
            assert s.norm > 0

    def test_refinement_adds_peak_samples(self, heat_spec):
        omegas = list(np.geomspace(0.5, 20, 25))
        coarse = resolvent_sweep(heat_spec, [16.0], omegas, n=24, refine=False)
        fine = resolvent_sweep(heat_spec, [16.0], omegas, n=24, refine=True)
        assert len(fine) > len(coarse)
        assert max(s.norm for s in fine) >= max(s.norm for s in coarse)

    def test_thread_count_does_not_change_output(self, heat_spec):
        omegas = list(np.geomspace(0.5, 20, 15))
        one = resolvent_sweep(heat_spec, [1.0, 16.0, 81.0], omegas, n=16, threads=1)
        four = resolvent_sweep(heat_spec, [1.0, 16.0, 81.0], omegas, n=16, threads=4)
        assert one == four

    def test_empty_inputs_rejected(self, heat_spec):
        with pytest.raises(ValueError):
            resolvent_sweep(heat_spec, [], [1.0], n=16)
        with pytest.raises(ValueError):
            resolvent_sweep(heat_spec, [1.0], [], n=16)

    def test_monotone_truncation(self, heat_spec):
        # adding modes never decreases the per-omega envelope
        omegas = list(np.geomspace(0.5, 30, 20))
        few = resolvent_sweep(heat_spec, [1.0, 16.0], omegas, n=24, refine=False)
        more = resolvent_sweep(heat_spec, [1.0, 16.0, 81.0], omegas, n=24, refine=False)
        env_few = dict(envelope(few))
        env_more = dict(envelope(more))
        for w, v in env_few.items():
            assert env_more[w] >= v - 1e-12


class TestEnvelopeAndPeaks:
    def test_envelope_is_per_omega_max(self):
        samples = [
            ResolventSample(1.0, 0, 2.0),
            ResolventSample(1.0, 1, 5.0),
            ResolventSample(2.0, 0, 3.0),
        ]
        assert envelope(samples) == [(1.0, 5.0), (2.0, 3.0)]

    def test_peak_samples_one_per_mode(self):
        samples = [
            ResolventSample(1.0, 1, 2.0),
            ResolventSample(3.0, 1, 7.0),
            ResolventSample(2.0, 0, 4.0),
        ]
        peaks = peak_samples(samples)
        assert [s.mode_index for s in peaks] == [0, 1]
        assert peaks[1].norm == 7.0

    def test_mode_peak_dominates_background(self, heat_spec):
        mode = ModeSystem(heat_spec, 16.0)
        w_peak, v_peak = mode_peak(mode)
        assert w_peak > 0
        hi = 3.0 * mode.mu_sqrt + 20.0 / mode.tau
        background = max(
            mode_resolvent_norm_reduced(mode, float(w))
            for w in np.geomspace(1e-2, hi, 40)
        )
        assert v_peak >= background - 1e-12

    def test_mode_peak_accepts_precomputed_roots(self, heat_spec):
        mode = ModeSystem(heat_spec, 16.0)
        found = strip_roots(mode)
        direct = mode_peak(mode)
        reused = mode_peak(mode, roots=found)
        assert reused == direct


class TestGrowthFit:
    def synthetic(self, exponent: float, coeff: float = 3.0) -> list[ResolventSample]:
        omegas = np.geomspace(0.1, 100, 12)
        return [
            ResolventSample(float(w), j, coeff * float(w) ** exponent)
            for j, w in enumerate(omegas)
        ]

    def test_exact_power_law(self):
        fit = growth_exponent_fit(self.synthetic(2.0))
        assert isinstance(fit, GrowthFit)
        assert fit.gamma_hat == pytest.approx(2.0, abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.samples_used == 12
        assert fit.window[0] == pytest.approx(0.1)
        assert fit.window[1] == pytest.approx(100.0)

    def test_too_few_peaks_rejected(self):
        with pytest.raises(InsufficientSpanError):
            growth_exponent_fit(self.synthetic(1.0)[:5])

    def test_narrow_span_rejected(self):
        samples = [
            ResolventSample(1.0 + 0.01 * j, j, 2.0) for j in range(8)
        ]
        with pytest.raises(InsufficientSpanError):
            growth_exponent_fit(samples)

    def test_zero_frequency_peaks_dropped(self):
        samples = self.synthetic(1.0)
        samples.append(ResolventSample(0.0, 99, 1e9))
        fit = growth_exponent_fit(samples)
        assert fit.samples_used == 12
        assert fit.gamma_hat == pytest.approx(1.0, abs=1e-10)

    def test_polynomial_point_measures_order_two(self):
        # (beta, alpha) = (0, 1) sits deep in S1 with predicted order
        # 2*(alpha - 2*beta) = 2; the measured exponent lands nearby
        spec = SystemSpec(Variant.DELAY_HEAT, 0.0, 1.0, a=2.0, kappa=1.0, tau=1.0, xi=2.0)
        samples = []
        for j in range(1, 13):
            mu = float(j**4)
            mode = ModeSystem(spec, mu)
            w, v = mode_peak(mode)
            samples.append(ResolventSample(w, j, v))
        fit = growth_exponent_fit(samples)
        assert 1.6 <= fit.gamma_hat <= 2.4
        assert fit.r_squared >= 0.9

    def test_s1_peak_frequency_scales_like_sqrt_mu(self):
        spec = SystemSpec(Variant.DELAY_HEAT, 0.0, 1.0, a=2.0, kappa=1.0, tau=1.0, xi=2.0)
        mus = [float(j**4) for j in range(1, 13)]
        peak_ws = [mode_peak(ModeSystem(spec, mu))[0] for mu in mus]
        fit = loglog_slope(np.array(mus), np.array(peak_ws))
        assert 0.45 <= fit.slope <= 0.55


class TestLogLogSlope:
    def test_exact_line(self):
        x = np.geomspace(1, 1e3, 20)
        fit = loglog_slope(x, 5.0 * x**-1.5)
        assert fit.slope == pytest.approx(-1.5, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_r_squared_clamped(self, rng):
        x = np.geomspace(1, 10, 30)
        y = np.exp(rng.standard_normal(30))
        fit = loglog_slope(x, y)
        assert 0.0 <= fit.r_squared <= 1.0
