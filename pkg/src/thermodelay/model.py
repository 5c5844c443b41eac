"""Parameter records and the scalar quantities the stability theory hinges on.

Two delayed thermoelastic variants are covered by one parameter record.  The
``DelayElastic`` variant delays the elastic restoring term and damps the
elastic equation (Kelvin-Voigt); the ``DelayHeat`` variant delays and damps
the heat equation.  Both couple an abstract wave equation to an abstract heat
equation through fractional powers of one positive operator, so a point
``(beta, alpha)`` in the unit square fixes the coupling and damping strength.

This module holds the pure value types plus the region predicates on
``(beta, alpha)``, the admissibility thresholds for the damping/delay gains,
and the coercivity margin used to certify that the imaginary axis stays free
of spectrum.  Everything here is exact arithmetic on scalars; no linear
algebra.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

Real = Union[int, float, Fraction]

__all__ = [
    "Variant",
    "RegionLabel",
    "Interval",
    "SystemSpec",
    "region_classify",
    "union_identity_check",
    "UnionCheckResult",
    "xi_min_system1",
    "shift_m",
    "xi_interval_system2",
    "coercivity_margin",
    "poly_exponent",
]


class Variant(enum.Enum):
    """Which equation carries the delay."""

    DELAY_ELASTIC = "delay-elastic"
    DELAY_HEAT = "delay-heat"


class RegionLabel(enum.Enum):
    """Disjoint labels partitioning the (beta, alpha) unit square."""

    S = "S"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    BOUNDARY_Q = "BoundaryQ"
    OUTSIDE_Q = "OutsideQ"


@dataclass(frozen=True)
class Interval:
    """Closed real interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interior(self, x: float) -> bool:
        return self.lo < x < self.hi

    def is_singleton(self) -> bool:
        return self.lo == self.hi


def _check_unit(name: str, value: Real) -> None:
    if not 0 <= value <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _check_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class SystemSpec:
    """Full parameter set of one delayed thermoelastic system.

    Parameters
    ----------
    variant : Variant
        Which equation carries the delay.
    beta, alpha : float
        Coupling and damping exponents, each in [0, 1].  Construction
        requires membership in the well-posedness region Q, i.e.
        ``2*beta - alpha <= 1``.
    a : float
        Damping gain.  Must be positive for regular specs; the ``probe``
        constructor admits ``a = 0`` for instability experiments.
    kappa : float
        Gain of the delayed term.  Only ``DELAY_HEAT`` reads it; the
        delayed elastic term has unit gain and ``kappa`` is stored
        untouched for that variant.
    tau : float
        Delay length, in time units.
    xi : float
        Weight of the delay-history term in the energy norm.

    Notes
    -----
    ``admissible`` records whether the parameters satisfy the hypotheses
    under which the stability theory applies: ``a >= tau`` for the elastic
    variant, ``a >= kappa`` with ``xi`` inside the admissible interval for
    the heat variant.  Specs built by ``probe`` skip validation and are
    never admissible.
    """

    variant: Variant
    beta: float
    alpha: float
    a: float
    kappa: float
    tau: float
    xi: float
    is_probe: bool = False
    admissible: bool = field(init=False)

    def __post_init__(self) -> None:
        _check_unit("beta", self.beta)
        _check_unit("alpha", self.alpha)
        _check_positive("tau", self.tau)
        _check_positive("xi", self.xi)
        if not self.is_probe:
            _check_positive("a", self.a)
            _check_positive("kappa", self.kappa)
            if 2 * self.beta - self.alpha > 1:
                raise ValueError(
                    f"(beta, alpha)=({self.beta}, {self.alpha}) lies outside "
                    "the well-posedness region (2*beta - alpha > 1)"
                )
        elif self.a < 0 or self.kappa < 0:
            raise ValueError("probe gains must be nonnegative")
        object.__setattr__(self, "admissible", self._admissible())

    def _admissible(self) -> bool:
        if self.is_probe:
            return False
        if self.variant is Variant.DELAY_ELASTIC:
            return self.a >= self.tau
        if self.a < self.kappa:
            return False
        return self.xi_interval().contains(self.xi)

    @classmethod
    def probe(
        cls,
        variant: Variant,
        beta: float,
        alpha: float,
        a: float = 0.0,
        kappa: float = 1.0,
        tau: float = 1.0,
        xi: float = 1.0,
    ) -> "SystemSpec":
        """Build an unvalidated spec for instability experiments.

        Skips the region-Q membership check and allows ``a = 0`` (no
        damping).  The result is flagged ``is_probe`` and is never
        ``admissible``.
        """
        return cls(variant, beta, alpha, a, kappa, tau, xi, is_probe=True)

    def xi_interval(self) -> Interval:
        """Admissible history-weight interval (heat variant only)."""
        if self.variant is not Variant.DELAY_HEAT:
            raise ValueError("xi interval applies to the heat variant only")
        return xi_interval_system2(self.a, self.kappa, self.tau)

    def region(self) -> RegionLabel:
        return region_classify(self.beta, self.alpha)


def region_classify(beta: Real, alpha: Real) -> RegionLabel:
    """Classify a point of the (beta, alpha) unit square.

    The comparisons use only integer constants, so exact inputs
    (``fractions.Fraction``) are classified exactly.  The closed region S
    takes precedence; S1 and S2 use strict inequalities as defined; points
    of Q caught by none of them get ``BOUNDARY_Q`` (the partition proof
    leaves that set empty, the label exists for completeness).

    Parameters
    ----------
    beta, alpha : real
        Coordinates in [0, 1]; int, float and Fraction all work.

    Returns
    -------
    RegionLabel
    """
    _check_unit("beta", beta)
    _check_unit("alpha", alpha)
    two_beta = 2 * beta
    if two_beta - alpha > 1:
        return RegionLabel.OUTSIDE_Q
    if max(1 - two_beta, two_beta - 1) <= alpha <= two_beta:
        return RegionLabel.S
    if 2 * alpha > 1 and alpha > two_beta:
        return RegionLabel.S1
    if alpha < 1 - two_beta and 2 * alpha <= 1:
        return RegionLabel.S2
    if 0 < alpha < two_beta - 1:
        return RegionLabel.S3
    return RegionLabel.BOUNDARY_Q


@dataclass(frozen=True)
class UnionCheckResult:
    """Outcome of the region union identity check; truthy iff it holds."""

    ok: bool
    counterexamples: tuple

    def __bool__(self) -> bool:
        return self.ok


def union_identity_check(grid_step: Real) -> UnionCheckResult:
    """Verify that S, S1 and S2 cover the whole region Q on a rational grid.

    Every grid point of Q must be labeled S, S1, S2 or BoundaryQ, never S3,
    and any BoundaryQ points must lie on the closure lines of S1/S2 (the
    lines ``alpha = 2*beta``, ``alpha = 1 - 2*beta``, ``alpha = 1/2``).
    Evaluation is exact rational arithmetic.

    Parameters
    ----------
    grid_step : real
        Grid spacing, in (0, 0.5].  Rationalized via
        ``Fraction(grid_step).limit_denominator(10**6)``.

    Returns
    -------
    UnionCheckResult
        Truthy when the identity holds; counterexamples otherwise.
    """
    step = Fraction(grid_step).limit_denominator(10**6)
    if not 0 < step <= Fraction(1, 2):
        raise ValueError(f"grid_step must lie in (0, 0.5], got {grid_step}")
    npts = int(1 / step) + 1
    bad = []
    for i in range(npts):
        beta = i * step
        if beta > 1:
            continue
        for k in range(npts):
            alpha = k * step
            if alpha > 1:
                continue
            label = region_classify(beta, alpha)
            if label is RegionLabel.OUTSIDE_Q:
                continue
            if label is RegionLabel.S3:
                bad.append((beta, alpha, label))
            elif label is RegionLabel.BOUNDARY_Q:
                on_lines = (
                    alpha == 2 * beta
                    or alpha == 1 - 2 * beta
                    or 2 * alpha == 1
                )
                if not on_lines:
                    bad.append((beta, alpha, label))
    return UnionCheckResult(ok=not bad, counterexamples=tuple(bad))


def xi_min_system1(a: float, tau: float) -> float:
    """Smallest admissible history weight for the elastic variant, 2*tau/a."""
    _check_positive("a", a)
    _check_positive("tau", tau)
    return 2.0 * tau / a


def shift_m(a: float, xi: float, tau: float) -> float:
    """Dissipativity shift 1/a + xi/(2*tau) for the elastic variant.

    The elastic generator minus ``shift_m`` times the identity is
    dissipative once ``xi >= xi_min_system1(a, tau)``.
    """
    _check_positive("a", a)
    _check_positive("xi", xi)
    _check_positive("tau", tau)
    return 1.0 / a + xi / (2.0 * tau)


def xi_interval_system2(a: float, kappa: float, tau: float) -> Interval:
    """Admissible history-weight interval for the heat variant.

    Parameters
    ----------
    a, kappa, tau : float
        Damping gain, delay gain and delay; requires ``a >= kappa > 0``.

    Returns
    -------
    Interval
        ``[tau*(a - sqrt(a^2 - kappa^2)), tau*(a + sqrt(a^2 - kappa^2))]``,
        a singleton exactly when ``a == kappa``; its midpoint is ``tau*a``.
    """
    _check_positive("kappa", kappa)
    _check_positive("tau", tau)
    if a < kappa:
        raise ValueError(
            f"inadmissible gains: a={a} < kappa={kappa} leaves no real "
            "history weight"
        )
    root = math.sqrt(a * a - kappa * kappa)
    return Interval(tau * (a - root), tau * (a + root))


def _sinc(x: float) -> float:
    # series below 1e-4 avoids the 0/0 and keeps full precision
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def coercivity_margin(lam: complex, a: float, tau: float) -> float:
    """Margin Re(conj(lam)*exp(-lam*tau)) + |lam|^2 * a.

    Strict positivity of this quantity for all ``lam != 0`` with
    ``Re lam >= 0`` is what keeps the closed right half-plane free of
    spectrum; it holds whenever ``a >= tau`` and can fail otherwise.

    Evaluated in the cancellation-free rearrangement

        exp(-r*tau)*r*cos(s*tau) + r^2*a + s^2*(a - tau*exp(-r*tau)*sinc(s*tau))

    with ``lam = r + i*s``, which agrees with the defining expression
    algebraically but stays accurate near ``a == tau``, ``lam -> 0``, where
    the two terms cancel to fourth order.

    Parameters
    ----------
    lam : complex
    a, tau : float
        Positive gains.

    Returns
    -------
    float
    """
    _check_positive("a", a)
    _check_positive("tau", tau)
    lam = complex(lam)
    r, s = lam.real, lam.imag
    decay = math.exp(-r * tau)
    return decay * r * math.cos(s * tau) + r * r * a + s * s * (
        a - tau * decay * _sinc(s * tau)
    )


def poly_exponent(beta: Real, alpha: Real) -> float | None:
    """Predicted resolvent growth exponent for the heat variant.

    Returns ``2*(alpha - 2*beta)`` on S1 and ``2 - 2*(alpha + 2*beta)`` on
    S2; ``None`` on S (exponential regime, no polynomial exponent) and for
    points outside Q.

    Parameters
    ----------
    beta, alpha : real

    Returns
    -------
    float or None
    """
    label = region_classify(beta, alpha)
    if label is RegionLabel.S1:
        return float(2 * (alpha - 2 * beta))
    if label is RegionLabel.S2:
        return float(2 - 2 * (alpha + 2 * beta))
    return None
