"""Tests for predicted-versus-measured stability classification."""
from __future__ import annotations

import numpy as np
import pytest

from thermodelay import (
    Budget,
    Evidence,
    Measured,
    MeasuredKind,
    PredictedVerdict,
    RegionLabel,
    RegionVerdict,
    SystemSpec,
    Variant,
    classify_point_numeric,
    default_ladder,
    predict,
    sweep_grid,
)
from thermodelay.regions import (
    VERDICT_CSV_HEADER,
    is_boundary_point,
    verdict_csv_row,
)


class TestPredict:
    def test_elastic_damped_is_exponential(self):
        pred = predict(Variant.DELAY_ELASTIC, 0.5, 0.5, a=1.0)
        assert pred.kind is MeasuredKind.EXPONENTIAL
        assert pred.label is RegionLabel.S
        assert pred.gamma is None
        assert pred.tag == "elastic-damped-Q"

    def test_heat_flat_region_is_exponential(self):
        pred = predict(Variant.DELAY_HEAT, 0.5, 0.5, a=2.0, kappa=1.0)
        assert pred.kind is MeasuredKind.EXPONENTIAL
        assert pred.tag == "exponential-S"

    def test_heat_upper_tail_is_polynomial(self):
        pred = predict(Variant.DELAY_HEAT, 0.0, 1.0, a=2.0, kappa=1.0)
        assert pred.kind is MeasuredKind.POLYNOMIAL
        assert pred.label is RegionLabel.S1
        assert pred.gamma == pytest.approx(2.0, abs=0)
        assert isinstance(pred.gamma, float)
        assert pred.tag == "polynomial-S1"

    def test_heat_lower_tail_is_polynomial(self):
        pred = predict(Variant.DELAY_HEAT, 0.0, 0.25, a=2.0, kappa=1.0)
        assert pred.kind is MeasuredKind.POLYNOMIAL
        assert pred.label is RegionLabel.S2
        assert pred.gamma == pytest.approx(1.5, abs=0)
        assert pred.tag == "polynomial-S2"

    def test_outside_scope_is_skipped(self):
        pred = predict(Variant.DELAY_HEAT, 1.0, 0.5, a=2.0)
        assert pred.kind is MeasuredKind.SKIPPED
        assert pred.label is RegionLabel.OUTSIDE_Q
        assert pred.tag == "outside-scope"

    def test_undamped_is_unstable(self):
        for variant in Variant:
            pred = predict(variant, 0.5, 0.5, a=0.0)
            assert pred.kind is MeasuredKind.UNSTABLE
            assert pred.tag == "undamped-unstable"

    def test_heat_weak_damping_is_skipped(self):
        pred = predict(Variant.DELAY_HEAT, 0.5, 0.5, a=0.5, kappa=1.0)
        assert pred.kind is MeasuredKind.SKIPPED
        assert pred.tag == "hypotheses-unmet"


class TestDefaultLadder:
    def test_fourth_powers(self):
        assert default_ladder(4) == [1.0, 16.0, 81.0, 256.0]


class TestIsBoundaryPoint:
    @pytest.mark.parametrize(
        "beta, alpha",
        [(0.25, 0.5), (0.3, 0.4), (0.75, 0.5), (0.0, 0.0), (0.0, 1.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)],
    )
    def test_points_on_dividing_lines(self, beta, alpha):
        assert is_boundary_point(beta, alpha)

    @pytest.mark.parametrize("beta, alpha", [(0.5, 0.6), (0.0, 0.5), (0.3, 0.7), (0.25, 0.25)])
    def test_points_off_dividing_lines(self, beta, alpha):
        assert not is_boundary_point(beta, alpha)

    def test_float_noise_snaps_to_the_line(self):
        assert is_boundary_point(0.1 + 0.2, 0.6000000000000001)


class TestBudget:
    def test_presets(self):
        assert Budget.FAST.label == "fast"
        assert Budget.FAST.modes == 8
        assert not Budget.FAST.polish
        assert Budget.THOROUGH.label == "thorough"
        assert Budget.THOROUGH.modes == 20
        assert Budget.THOROUGH.points_per_decade > Budget.FAST.points_per_decade
        assert Budget.THOROUGH.polish


class TestClassifyPointNumeric:
    def test_undamped_point_measures_unstable(self):
        spec = SystemSpec.probe(Variant.DELAY_ELASTIC, 0.5, 0.5, a=0.0, tau=1.0, xi=1.0)
        measured, evidence = classify_point_numeric(spec, [1.0, 16.0])
        assert measured.kind is MeasuredKind.UNSTABLE
        assert evidence.abscissa > 1e-6
        assert evidence.witness_mode in (0, 1)

    def test_flat_region_measures_exponential(self, heat_spec):
        measured, evidence = classify_point_numeric(heat_spec, default_ladder(6))
        assert measured.kind is MeasuredKind.EXPONENTIAL
        assert measured.gamma_hat < 0.15
        assert evidence.envelope_bound > 0
        assert evidence.abscissa < 0

    def test_upper_tail_measures_polynomial(self):
        spec = SystemSpec(
            variant=Variant.DELAY_HEAT, beta=0.0, alpha=1.0, a=2.0, kappa=1.0,
            tau=1.0, xi=2.0,
        )
        measured, evidence = classify_point_numeric(spec, default_ladder(12))
        assert measured.kind is MeasuredKind.POLYNOMIAL
        assert 1.6 <= measured.gamma_hat <= 2.4
        assert evidence.r_squared >= 0.8

    def test_empty_ladder_rejected(self, heat_spec):
        with pytest.raises(ValueError):
            classify_point_numeric(heat_spec, [])


class TestSweepGrid:
    def test_three_by_three_bookkeeping(self):
        summary = sweep_grid(Variant.DELAY_HEAT, 3, a=2.0, kappa=1.0, tau=1.0)
        assert summary.n_points == 9
        assert summary.n_skipped == 2
        assert summary.n_boundary == 5
        assert summary.n_eligible + summary.n_inconclusive == 2
        assert summary.agreement == 1.0
        # lexicographic order over the lattice
        coords = [(r.beta, r.alpha) for r in summary.rows]
        assert coords == sorted(coords)
        assert coords[0] == (0.0, 0.0)
        # the two outside-scope points carry no numerics
        skipped = [r for r in summary.rows if r.predicted.kind is MeasuredKind.SKIPPED]
        assert {(r.beta, r.alpha) for r in skipped} == {(1.0, 0.0), (1.0, 0.5)}
        for r in skipped:
            assert r.measured.kind is MeasuredKind.SKIPPED
            assert r.evidence == Evidence()

    def test_interior_points_agree(self):
        summary = sweep_grid(Variant.DELAY_HEAT, 3, a=2.0, kappa=1.0, tau=1.0)
        by_coord = {(r.beta, r.alpha): r for r in summary.rows}
        flat = by_coord[(0.5, 0.5)]
        assert flat.predicted.kind is MeasuredKind.EXPONENTIAL
        assert flat.measured.kind is MeasuredKind.EXPONENTIAL
        tail = by_coord[(0.0, 0.5)]
        assert tail.predicted.kind is MeasuredKind.POLYNOMIAL
        assert tail.predicted.gamma == pytest.approx(1.0, abs=0)

    def test_thread_count_does_not_change_results(self):
        points = [(0.5, 0.5), (0.0, 1.0), (1.0, 0.25)]
        one = sweep_grid(Variant.DELAY_HEAT, points, a=2.0, threads=1)
        four = sweep_grid(Variant.DELAY_HEAT, points, a=2.0, threads=4)
        assert one.rows == four.rows
        assert one.agreement == four.agreement

    def test_explicit_points_snap_to_rationals(self):
        summary = sweep_grid(Variant.DELAY_HEAT, [(0.1 + 0.2, 0.6000000000000001)], a=2.0)
        row = summary.rows[0]
        assert (row.beta, row.alpha) == (0.3, 0.6)
        assert summary.n_boundary == 1
        assert summary.n_eligible == 0
        assert summary.agreement == 1.0

    def test_bad_grids_rejected(self):
        with pytest.raises(ValueError):
            sweep_grid(Variant.DELAY_HEAT, 1, a=2.0)
        with pytest.raises(ValueError):
            sweep_grid(Variant.DELAY_HEAT, [], a=2.0)


class TestVerdictCsv:
    def test_row_flattening(self):
        pred = PredictedVerdict(RegionLabel.S, MeasuredKind.EXPONENTIAL, None, "exponential-S")
        verdict = RegionVerdict(
            beta=0.5,
            alpha=0.5,
            predicted=pred,
            measured=Measured(MeasuredKind.EXPONENTIAL, gamma_hat=0.01),
            evidence=Evidence(abscissa=-0.25, witness_mode=2, gamma_hat=0.01),
        )
        row = verdict_csv_row(verdict)
        assert len(row) == len(VERDICT_CSV_HEADER)
        assert row[0] == "0.5"
        assert row[2] == "exponential"
        assert row[3] == "exponential"
        assert row[4] == "0.01"
        assert row[5] == "-0.25"
        assert row[6] == "2"

    def test_missing_evidence_is_blank(self):
        pred = PredictedVerdict(RegionLabel.OUTSIDE_Q, MeasuredKind.SKIPPED, None, "outside-scope")
        verdict = RegionVerdict(
            beta=1.0, alpha=0.0, predicted=pred,
            measured=Measured(MeasuredKind.SKIPPED), evidence=Evidence(),
        )
        row = verdict_csv_row(verdict)
        assert row[4:] == ["", "", ""]
