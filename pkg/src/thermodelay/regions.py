"""Stability-map classification: theory prediction versus measured verdict.

For each parameter point (beta, alpha) the exact region arithmetic yields a
predicted verdict (exponential, polynomial with a stated resolvent growth
order, unstable without damping, or out of scope).  The numerical verdict
is measured from the truncated family: rightmost characteristic roots
decide instability, and the log-log slope of per-mode resolvent peaks
against peak frequency separates bounded envelopes (exponential) from
polynomial growth.  A sweep runs the comparison over a lattice and reports
an agreement rate over points where both sides commit, excluding the exact
dividing lines where the prediction changes discontinuously.
"""
from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import chareq
from .chareq import ModeSystem
from .model import RegionLabel, SystemSpec, Variant, poly_exponent, region_classify
from .resolvent import (
    InsufficientSpanError,
    ResolventSample,
    growth_exponent_fit,
    loglog_slope,
    mode_peak,
    peak_samples,
)

__all__ = [
    "MeasuredKind",
    "Measured",
    "PredictedVerdict",
    "Evidence",
    "RegionVerdict",
    "Budget",
    "SweepSummary",
    "predict",
    "classify_point_numeric",
    "sweep_grid",
    "default_ladder",
    "is_boundary_point",
    "verdict_csv_row",
    "VERDICT_CSV_HEADER",
]

GAMMA_EXPONENTIAL_CUTOFF = 0.15
R_SQUARED_CUTOFF = 0.8
UNSTABLE_RE_CUTOFF = 1e-6


class MeasuredKind(enum.Enum):
    """Verdict kinds, shared by predictions and measurements."""

    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Measured:
    """Numerically measured verdict for one parameter point."""

    kind: MeasuredKind
    gamma_hat: Optional[float] = None


@dataclass(frozen=True)
class PredictedVerdict:
    """Theory-side verdict from exact region membership.

    ``gamma`` is the predicted resolvent growth order on the imaginary
    axis for polynomial points, ``None`` otherwise.  ``tag`` names the
    statement the verdict instantiates.
    """

    label: RegionLabel
    kind: MeasuredKind
    gamma: Optional[float]
    tag: str


@dataclass(frozen=True)
class Evidence:
    """Numerical backing for a measured verdict."""

    abscissa: Optional[float] = None
    witness_mode: Optional[int] = None
    gamma_hat: Optional[float] = None
    r_squared: Optional[float] = None
    envelope_bound: Optional[float] = None
    used_fallback_fit: bool = False


@dataclass(frozen=True)
class RegionVerdict:
    """One sweep row: a parameter point with both verdicts and evidence."""

    beta: float
    alpha: float
    predicted: PredictedVerdict
    measured: Measured
    evidence: Evidence


class Budget(enum.Enum):
    """Effort presets for numerical classification.

    ``modes`` is the default ladder length, ``points_per_decade`` sizes the
    background frequency scan, ``polish`` switches on final peak bisection.
    """

    FAST = ("fast", 8, 20, False)
    THOROUGH = ("thorough", 20, 40, True)

    def __init__(
        self, label: str, modes: int, points_per_decade: int, polish: bool
    ) -> None:
        self.label = label
        self.modes = modes
        self.points_per_decade = points_per_decade
        self.polish = polish


@dataclass(frozen=True)
class SweepSummary:
    """All sweep rows plus the prediction/measurement agreement tally.

    Agreement is counted over rows where the prediction commits (not
    skipped), the measurement commits (not inconclusive or skipped), and
    the point is off the exact dividing lines.
    """

    rows: tuple[RegionVerdict, ...]
    n_points: int
    n_skipped: int
    n_boundary: int
    n_inconclusive: int
    n_eligible: int
    n_agree: int
    agreement: float
    confusion: dict[tuple[str, str], int] = field(default_factory=dict)


def predict(
    variant: Variant,
    beta: float,
    alpha: float,
    a: float = 1.0,
    kappa: float = 1.0,
) -> PredictedVerdict:
    """Theory verdict for a parameter point, by exact region arithmetic.

    Points outside the coupling-admissible set are out of scope, as are
    heat points whose damping cannot dominate the delayed feedback
    (``a < kappa``).  Undamped points (``a = 0``) are predicted unstable.
    Damped elastic points in scope are exponential; damped heat points are
    exponential on the flat region and polynomial with the stated growth
    order on the two tail regions.

    Parameters
    ----------
    variant : Variant
    beta, alpha : float
        Coupling and damping exponents in [0, 1].
    a : float
        Frictional (elastic) or auxiliary thermal (heat) damping.
    kappa : float
        Delayed-feedback gain; only the heat variant uses it.

    Returns
    -------
    PredictedVerdict
    """
    label = region_classify(beta, alpha)
    if label is RegionLabel.OUTSIDE_Q:
        return PredictedVerdict(label, MeasuredKind.SKIPPED, None, "outside-scope")
    if a == 0:
        return PredictedVerdict(
            label, MeasuredKind.UNSTABLE, None, "undamped-unstable"
        )
    if variant is Variant.DELAY_ELASTIC:
        return PredictedVerdict(
            label, MeasuredKind.EXPONENTIAL, None, "elastic-damped-Q"
        )
    if a < kappa:
        return PredictedVerdict(label, MeasuredKind.SKIPPED, None, "hypotheses-unmet")
    if label is RegionLabel.S:
        return PredictedVerdict(label, MeasuredKind.EXPONENTIAL, None, "exponential-S")
    gamma = poly_exponent(beta, alpha)
    gamma = None if gamma is None else float(gamma)
    if label is RegionLabel.S1:
        return PredictedVerdict(label, MeasuredKind.POLYNOMIAL, gamma, "polynomial-S1")
    if label is RegionLabel.S2:
        return PredictedVerdict(label, MeasuredKind.POLYNOMIAL, gamma, "polynomial-S2")
    # S3 and the residual label cannot intersect the admissible set.
    return PredictedVerdict(label, MeasuredKind.SKIPPED, None, "outside-scope")


def _background_points(budget: Budget, mode: ModeSystem) -> int:
    hi = 3.0 * mode.mu_sqrt + 20.0 / mode.tau
    decades = math.log10(hi / 1e-2)
    return max(16, int(math.ceil(budget.points_per_decade * decades)))


def classify_point_numeric(
    spec: SystemSpec,
    eigenvalues: Sequence[float],
    budget: Budget = Budget.FAST,
) -> tuple[Measured, Evidence]:
    """Measure the stability verdict of one spec over a modal ladder.

    Any characteristic root with real part above 1e-6 is an instability
    verdict.  Otherwise per-mode resolvent peaks are fitted log-log
    against peak frequency: slope below 0.15 reads as a bounded envelope
    (exponential decay), a larger slope with fit quality r^2 >= 0.8 as
    polynomial growth, and a larger slope with a poor fit as inconclusive.
    When the peaks span under two decades the fit falls back to the square
    root of the operator eigenvalue as the frequency proxy and is flagged.

    Parameters
    ----------
    spec : SystemSpec
    eigenvalues : sequence of float
        Operator eigenvalues; the budget does not trim this ladder.
    budget : Budget

    Returns
    -------
    (Measured, Evidence)
    """
    mus = [float(mu) for mu in eigenvalues]
    if not mus:
        raise ValueError("need at least one operator eigenvalue")
    modes = [ModeSystem(spec, mu) for mu in mus]
    root_sets = [chareq.strip_roots(mode) for mode in modes]
    abscissa: Optional[float] = None
    witness: Optional[int] = None
    for j, rs in enumerate(root_sets):
        r = rs.rightmost()
        if r is not None and (abscissa is None or r.real > abscissa):
            abscissa, witness = r.real, j
    if abscissa is not None and abscissa > UNSTABLE_RE_CUTOFF:
        return (
            Measured(MeasuredKind.UNSTABLE),
            Evidence(abscissa=abscissa, witness_mode=witness),
        )
    samples = []
    for j, mode in enumerate(modes):
        w, v = mode_peak(
            mode,
            background_points=_background_points(budget, mode),
            polish=budget.polish,
            roots=root_sets[j],
        )
        samples.append(ResolventSample(omega=w, mode_index=j, norm=v))
    env_bound = max(s.norm for s in samples)
    used_fallback = False
    try:
        fit = growth_exponent_fit(samples)
        gamma_hat, r_squared = fit.gamma_hat, fit.r_squared
    except InsufficientSpanError:
        peaks = peak_samples(samples)
        if len(peaks) < 2:
            return (
                Measured(MeasuredKind.INCONCLUSIVE),
                Evidence(abscissa=abscissa, witness_mode=witness,
                         envelope_bound=env_bound),
            )
        used_fallback = True
        x = [math.sqrt(mus[s.mode_index]) for s in peaks]
        y = [s.norm for s in peaks]
        lf = loglog_slope(x, y)
        gamma_hat, r_squared = lf.slope, lf.r_squared
    if gamma_hat < GAMMA_EXPONENTIAL_CUTOFF:
        kind = MeasuredKind.EXPONENTIAL
    elif r_squared >= R_SQUARED_CUTOFF:
        kind = MeasuredKind.POLYNOMIAL
    else:
        kind = MeasuredKind.INCONCLUSIVE
    return (
        Measured(kind, gamma_hat=gamma_hat),
        Evidence(
            abscissa=abscissa,
            witness_mode=witness,
            gamma_hat=gamma_hat,
            r_squared=r_squared,
            envelope_bound=env_bound,
            used_fallback_fit=used_fallback,
        ),
    )


def default_ladder(n_modes: int) -> list[float]:
    """Fourth-power modal ladder, the sweep default (beam-like spacing)."""
    return [float(j**4) for j in range(1, n_modes + 1)]


def is_boundary_point(beta: float, alpha: float) -> bool:
    """Whether (beta, alpha) sits on an exact verdict-dividing line.

    The lines are ``alpha = 2*beta``, ``alpha = 1 - 2*beta``, and
    ``2*beta - alpha = 1``, tested in exact rational arithmetic.
    """
    fb = Fraction(beta).limit_denominator(10**6)
    fa = Fraction(alpha).limit_denominator(10**6)
    return fa == 2 * fb or fa == 1 - 2 * fb or 2 * fb - fa == 1


def _default_xi(variant: Variant, a: float, kappa: float, tau: float) -> float:
    if a == 0:
        return 1.0
    if variant is Variant.DELAY_ELASTIC:
        return 2.0 * tau / a
    return tau * a


def _point_spec(
    variant: Variant,
    beta: float,
    alpha: float,
    a: float,
    kappa: float,
    tau: float,
    xi: Optional[float],
) -> SystemSpec:
    if xi is None:
        xi = _default_xi(variant, a, kappa, tau)
    if a == 0:
        return SystemSpec.probe(
            variant, beta=beta, alpha=alpha, a=0.0, kappa=kappa, tau=tau, xi=xi
        )
    return SystemSpec(
        variant=variant, beta=beta, alpha=alpha, a=a, kappa=kappa, tau=tau, xi=xi
    )


GridArg = Union[int, Iterable[tuple[float, float]]]


def sweep_grid(
    variant: Variant,
    grid: GridArg,
    a: float,
    kappa: float = 1.0,
    tau: float = 1.0,
    xi: Optional[float] = None,
    budget: Budget = Budget.FAST,
    threads: int = 1,
) -> SweepSummary:
    """Classify every lattice point and tally prediction agreement.

    An integer grid means an n-by-n uniform lattice over
    ``[0, 1] x [0, 1]`` in (beta, alpha); otherwise pass explicit points.
    Out-of-scope points are recorded as skipped without numerics; a point
    whose numerics fail becomes an inconclusive row (with a warning)
    rather than aborting the sweep.  Rows are ordered lexicographically by
    (beta, alpha) and results do not depend on the thread count.

    Parameters
    ----------
    variant : Variant
    grid : int or iterable of (beta, alpha)
    a, kappa, tau : float
        Shared physical parameters for every point.
    xi : float, optional
        History weight; defaults to the variant's canonical choice.
    budget : Budget
        Also sets the modal ladder length.
    threads : int

    Returns
    -------
    SweepSummary
    """
    if isinstance(grid, int):
        if grid < 2:
            raise ValueError("integer grid must be at least 2 points per side")
        vals = [Fraction(i, grid - 1) for i in range(grid)]
        points = [(b, al) for b in vals for al in vals]
    else:
        # snap explicit floats to rationals so line membership is exact
        points = [
            (
                Fraction(b).limit_denominator(10**6),
                Fraction(al).limit_denominator(10**6),
            )
            for b, al in grid
        ]
        if not points:
            raise ValueError("empty point list")
    ladder = default_ladder(budget.modes)

    def run_point(point: tuple[Fraction, Fraction]) -> RegionVerdict:
        frac_beta, frac_alpha = point
        beta, alpha = float(frac_beta), float(frac_alpha)
        pred = predict(variant, frac_beta, frac_alpha, a=a, kappa=kappa)
        if pred.kind is MeasuredKind.SKIPPED:
            return RegionVerdict(
                beta, alpha, pred, Measured(MeasuredKind.SKIPPED), Evidence()
            )
        try:
            spec = _point_spec(variant, beta, alpha, a, kappa, tau, xi)
            measured, evidence = classify_point_numeric(spec, ladder, budget)
        except Exception as exc:  # a single bad point must not kill the sweep
            warnings.warn(
                f"classification failed at (beta={beta}, alpha={alpha}): {exc}",
                stacklevel=2,
            )
            return RegionVerdict(
                beta, alpha, pred, Measured(MeasuredKind.INCONCLUSIVE), Evidence()
            )
        return RegionVerdict(beta, alpha, pred, measured, evidence)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(run_point, points))
    else:
        rows = tuple(run_point(p) for p in points)

    n_skipped = sum(1 for r in rows if r.measured.kind is MeasuredKind.SKIPPED)
    n_inconclusive = sum(
        1 for r in rows if r.measured.kind is MeasuredKind.INCONCLUSIVE
    )
    n_boundary = 0
    n_eligible = 0
    n_agree = 0
    confusion: dict[tuple[str, str], int] = {}
    for r in rows:
        key = (r.predicted.kind.value, r.measured.kind.value)
        confusion[key] = confusion.get(key, 0) + 1
        if r.predicted.kind is MeasuredKind.SKIPPED:
            continue
        if is_boundary_point(r.beta, r.alpha):
            n_boundary += 1
            continue
        if r.measured.kind in (MeasuredKind.INCONCLUSIVE, MeasuredKind.SKIPPED):
            continue
        n_eligible += 1
        if r.measured.kind is r.predicted.kind:
            n_agree += 1
    return SweepSummary(
        rows=rows,
        n_points=len(rows),
        n_skipped=n_skipped,
        n_boundary=n_boundary,
        n_inconclusive=n_inconclusive,
        n_eligible=n_eligible,
        n_agree=n_agree,
        agreement=n_agree / n_eligible if n_eligible else 1.0,
        confusion=confusion,
    )


VERDICT_CSV_HEADER = [
    "beta",
    "alpha",
    "predicted",
    "measured",
    "gamma_hat",
    "abscissa",
    "witness_mode",
]


def verdict_csv_row(v: RegionVerdict) -> list[str]:
    """Flatten a sweep row to strings matching ``VERDICT_CSV_HEADER``."""
    ev = v.evidence
    return [
        repr(v.beta),
        repr(v.alpha),
        v.predicted.kind.value,
        v.measured.kind.value,
        "" if ev.gamma_hat is None else repr(ev.gamma_hat),
        "" if ev.abscissa is None else repr(ev.abscissa),
        "" if ev.witness_mode is None else str(ev.witness_mode),
    ]
