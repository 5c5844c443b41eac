"""Spectral and time-domain stability toolkit for delayed thermoelastic systems.

Two abstract second-order/first-order coupled families share one delay
mechanism: a wave-type equation whose elastic or thermal feedback acts
after a fixed lag, diagonalized over the eigenvalues of a positive
operator.  Per mode, the package locates characteristic roots by argument-
principle counting plus Newton refinement, discretizes the delay line by
Chebyshev collocation into a generator matrix, measures resolvent norms
on the imaginary axis with both a matrix engine and an exact reduced
engine, integrates trajectories by the method of steps with dense Hermite
history, and classifies (beta, alpha) parameter maps against the exact
region arithmetic that predicts exponential decay, polynomial decay, or
instability.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .chareq import (
    AbscissaResult,
    ContourTooCloseError,
    ModeSystem,
    RefinedRoot,
    RootSet,
    char_deriv,
    char_fn,
    count_roots,
    refine_root,
    rightmost_root,
    roots_in_box,
    spectral_abscissa,
    strip_roots,
    undelayed_cubic,
    undelayed_roots,
)
from .generator import (
    CollocationGrid,
    ModeGenerator,
    ModeState,
    build_grid,
    build_mode_generator,
    dissipativity_form,
    energy_norm_sq,
    mode_eigenvalues,
    random_state,
    trace_value,
)
from .model import (
    Interval,
    RegionLabel,
    SystemSpec,
    UnionCheckResult,
    Variant,
    coercivity_margin,
    poly_exponent,
    region_classify,
    shift_m,
    union_identity_check,
    xi_interval_system2,
    xi_min_system1,
)
from .presets import Expectation, Preset, PresetName, list_presets, make_preset, preset_expectation
from .regions import (
    Budget,
    Evidence,
    Measured,
    MeasuredKind,
    PredictedVerdict,
    RegionVerdict,
    SweepSummary,
    classify_point_numeric,
    default_ladder,
    predict,
    sweep_grid,
)
from .resolvent import (
    GrowthFit,
    InsufficientSpanError,
    NearSingularError,
    ResolventSample,
    energy_weights,
    envelope,
    growth_exponent_fit,
    mode_peak,
    mode_resolvent_norm,
    mode_resolvent_norm_reduced,
    peak_samples,
    resolvent_norm_lower_bound,
    resolvent_sweep,
)
from .timesim import (
    COMPILED_KERNEL,
    EnergySeries,
    ExpFit,
    HistoryFn,
    HistoryKind,
    InitialData,
    PolyFit,
    Trajectory,
    default_initial,
    energy,
    energy_series,
    fit_exponential_rate,
    fit_polynomial_order,
    kernel_name,
    simulate,
)

__all__ = [
    "__version__",
    "AbscissaResult",
    "Budget",
    "COMPILED_KERNEL",
    "CollocationGrid",
    "ContourTooCloseError",
    "EnergySeries",
    "Evidence",
    "Expectation",
    "ExpFit",
    "GrowthFit",
    "HistoryFn",
    "HistoryKind",
    "InitialData",
    "InsufficientSpanError",
    "Interval",
    "Measured",
    "MeasuredKind",
    "ModeGenerator",
    "ModeState",
    "ModeSystem",
    "NearSingularError",
    "PolyFit",
    "PredictedVerdict",
    "Preset",
    "PresetName",
    "RefinedRoot",
    "RegionLabel",
    "RegionVerdict",
    "ResolventSample",
    "RootSet",
    "SweepSummary",
    "SystemSpec",
    "Trajectory",
    "UnionCheckResult",
    "Variant",
    "build_grid",
    "build_mode_generator",
    "char_deriv",
    "char_fn",
    "classify_point_numeric",
    "coercivity_margin",
    "count_roots",
    "default_initial",
    "default_ladder",
    "dissipativity_form",
    "energy",
    "energy_norm_sq",
    "energy_series",
    "energy_weights",
    "envelope",
    "fit_exponential_rate",
    "fit_polynomial_order",
    "growth_exponent_fit",
    "kernel_name",
    "list_presets",
    "make_preset",
    "mode_eigenvalues",
    "mode_peak",
    "mode_resolvent_norm",
    "mode_resolvent_norm_reduced",
    "peak_samples",
    "poly_exponent",
    "predict",
    "preset_expectation",
    "random_state",
    "refine_root",
    "region_classify",
    "resolvent_norm_lower_bound",
    "resolvent_sweep",
    "rightmost_root",
    "roots_in_box",
    "shift_m",
    "simulate",
    "spectral_abscissa",
    "strip_roots",
    "sweep_grid",
    "trace_value",
    "undelayed_cubic",
    "undelayed_roots",
    "union_identity_check",
    "xi_interval_system2",
    "xi_min_system1",
]
