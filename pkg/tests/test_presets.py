"""Tests for the named benchmark configurations."""
from __future__ import annotations

import math

import numpy as np
import pytest

from thermodelay import (
    MeasuredKind,
    PresetName,
    Variant,
    list_presets,
    make_preset,
    preset_expectation,
)


class TestLadders:
    def test_interval_second_order_ladder(self):
        p = make_preset(PresetName.STRING_KV, L=math.pi, j_max=5)
        assert np.allclose(p.eigenvalues, [1.0, 4.0, 9.0, 16.0, 25.0], rtol=1e-12)

    def test_interval_fourth_order_ladder(self):
        p = make_preset(PresetName.BEAM1, L=math.pi, j_max=4)
        assert np.allclose(p.eigenvalues, [1.0, 16.0, 81.0, 256.0], rtol=1e-12)

    def test_plate_interval_ladder_is_fourth_order(self):
        p = make_preset(PresetName.PLATE_DELAY, L=math.pi, j_max=3)
        assert np.allclose(p.eigenvalues, [1.0, 16.0, 81.0], rtol=1e-12)

    def test_square_plate_ladder(self):
        # k^2 + l^2 over pairs: 2, 5, 5, 8, 10, ... squared afterwards
        p = make_preset(PresetName.PLATE_DELAY, L=math.pi, j_max=5, geometry="square")
        assert np.allclose(p.eigenvalues, [4.0, 25.0, 25.0, 64.0, 100.0], rtol=1e-12)

    def test_length_scaling(self):
        p = make_preset(PresetName.STRING_KV, L=2.0 * math.pi, j_max=2)
        assert np.allclose(p.eigenvalues, [0.25, 1.0], rtol=1e-12)

    def test_ladders_are_increasing(self):
        for name in list_presets():
            p = make_preset(name, j_max=12)
            lam = np.array(p.eigenvalues)
            assert np.all(np.diff(lam) >= 0)
            assert lam[0] > 0


class TestDefaults:
    def test_elastic_defaults(self):
        for name in (PresetName.PLATE_DELAY, PresetName.STRING_KV):
            spec = make_preset(name).spec
            assert spec.variant is Variant.DELAY_ELASTIC
            assert spec.a == 1.0
            assert spec.tau == 1.0
            assert spec.xi == 2.0
            assert spec.admissible

    def test_heat_defaults(self):
        for name in (PresetName.BEAM1, PresetName.BEAM2, PresetName.STRING_HEAT_DELAY):
            spec = make_preset(name).spec
            assert spec.variant is Variant.DELAY_HEAT
            assert spec.a == 2.0
            assert spec.kappa == 1.0
            assert spec.xi == 2.0
            assert spec.xi_interval().contains_interior(spec.xi)
            assert spec.admissible

    def test_exponent_assignments(self):
        cases = {
            PresetName.PLATE_DELAY: (0.5, 0.5),
            PresetName.STRING_KV: (0.5, 1.0),
            PresetName.BEAM1: (0.5, 0.5),
            PresetName.BEAM2: (0.0, 0.5),
            PresetName.STRING_HEAT_DELAY: (0.5, 1.0),
        }
        for name, (beta, alpha) in cases.items():
            spec = make_preset(name).spec
            assert (spec.beta, spec.alpha) == (beta, alpha)

    def test_parameter_overrides(self):
        p = make_preset(PresetName.BEAM1, a=3.0, kappa=0.5, tau=0.5, j_max=2)
        assert p.spec.a == 3.0
        assert p.spec.kappa == 0.5
        assert p.spec.xi == 1.5
        assert p.spec.admissible

    def test_name_accepts_string(self):
        p = make_preset("beam2", j_max=1)
        assert p.name is PresetName.BEAM2


class TestValidation:
    def test_square_geometry_restricted_to_plate(self):
        with pytest.raises(ValueError):
            make_preset(PresetName.BEAM1, geometry="square")

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            make_preset(PresetName.BEAM1, L=0.0)
        with pytest.raises(ValueError):
            make_preset(PresetName.BEAM1, j_max=0)
        with pytest.raises(ValueError):
            make_preset("no-such-preset")


class TestExpectation:
    def test_exponential_presets(self):
        for name in (
            PresetName.PLATE_DELAY,
            PresetName.STRING_KV,
            PresetName.BEAM1,
            PresetName.STRING_HEAT_DELAY,
        ):
            exp = preset_expectation(name)
            assert exp.kind is MeasuredKind.EXPONENTIAL
            assert exp.gamma is None
            assert exp.hypotheses

    def test_polynomial_preset(self):
        exp = preset_expectation(PresetName.BEAM2)
        assert exp.kind is MeasuredKind.POLYNOMIAL
        assert exp.gamma == pytest.approx(1.0, abs=1e-15)

    def test_listing(self):
        names = list_presets()
        assert len(names) == 5
        assert names[0] is PresetName.PLATE_DELAY
        assert {n.value for n in names} == {
            "plate-delay",
            "string-kv",
            "beam1",
            "beam2",
            "string-heat-delay",
        }
