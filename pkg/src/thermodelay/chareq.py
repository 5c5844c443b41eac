"""Per-mode characteristic functions and root finding in the complex plane.

Projecting either system variant onto one eigenvector of the operator (with
eigenvalue ``lambda_j``) leaves a three-field linear delay system whose
spectrum is the zero set of a scalar characteristic function ``chi``.  Both
variants give ``chi(lam) = A(lam) + B(lam) * exp(-lam*tau)`` with polynomial
``A`` and ``B``, so root counting reduces to the argument principle on
rectangles.

Far left of the imaginary axis ``exp(-lam*tau)`` overflows double precision,
so the contour machinery never forms ``chi`` directly: it carries a
mantissa/log-magnitude pair ``(m, p)`` with ``chi = m * exp(p)``.  Winding
numbers only need phase increments of ``m`` and root-proximity tests only
need ``log|m| + p``, so the count stays exact at any depth.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .model import SystemSpec, Variant

__all__ = [
    "Box",
    "ModeSystem",
    "RefinedRoot",
    "RootSet",
    "AbscissaResult",
    "ContourTooCloseError",
    "char_fn",
    "char_deriv",
    "undelayed_cubic",
    "undelayed_roots",
    "count_roots",
    "refine_root",
    "roots_in_box",
    "rightmost_root",
    "strip_roots",
    "spectral_abscissa",
    "residual_scale",
]

Box = tuple[float, float, float, float]


class ContourTooCloseError(RuntimeError):
    """A root sits too close to every rectangle the counter tried."""


@dataclass(frozen=True)
class ModeSystem:
    """One modal projection: a system spec restricted to one eigenvalue.

    Carries the fractional powers of ``lambda_j`` precomputed, since every
    characteristic-function evaluation needs them.

    Parameters
    ----------
    spec : SystemSpec
    lambda_j : float
        Operator eigenvalue, positive.
    """

    spec: SystemSpec
    lambda_j: float
    mu_sqrt: float = dataclasses.field(init=False)
    mu_alpha: float = dataclasses.field(init=False)
    mu_alpha_half: float = dataclasses.field(init=False)
    mu_beta: float = dataclasses.field(init=False)
    mu_beta2: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        if not self.lambda_j > 0:
            raise ValueError(f"lambda_j must be positive, got {self.lambda_j}")
        mu = self.lambda_j
        set_ = object.__setattr__
        set_(self, "mu_sqrt", math.sqrt(mu))
        set_(self, "mu_alpha", mu**self.spec.alpha)
        set_(self, "mu_alpha_half", mu ** (self.spec.alpha / 2.0))
        set_(self, "mu_beta", mu**self.spec.beta)
        set_(self, "mu_beta2", mu ** (2.0 * self.spec.beta))

    @property
    def mu(self) -> float:
        return self.lambda_j

    @property
    def variant(self) -> Variant:
        return self.spec.variant

    @property
    def beta(self) -> float:
        return self.spec.beta

    @property
    def alpha(self) -> float:
        return self.spec.alpha

    @property
    def a(self) -> float:
        return self.spec.a

    @property
    def kappa(self) -> float:
        return self.spec.kappa

    @property
    def tau(self) -> float:
        return self.spec.tau


@dataclass(frozen=True)
class RefinedRoot:
    """Newton-refined root with its residual; kept even when not converged."""

    root: complex
    residual: float
    converged: bool


@dataclass(frozen=True)
class RootSet:
    """All roots found inside one rectangle."""

    box: Box
    roots: tuple[complex, ...]
    residual: float

    def __len__(self) -> int:
        return len(self.roots)

    def rightmost(self) -> Optional[complex]:
        if not self.roots:
            return None
        return max(self.roots, key=lambda z: z.real)


@dataclass(frozen=True)
class AbscissaResult:
    """Spectral abscissa over a family of modes, with the attaining mode.

    A max over finitely many modes is a lower bound for the abscissa of
    the full system; callers should treat it as such.
    """

    value: float
    witness_mode: int
    witness_root: complex


def _char_parts(
    mode: ModeSystem,
) -> tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]:
    """Split chi into A + B*exp(-lam*tau) with polynomial A, B."""
    mu, a, kappa = mode.mu, mode.a, mode.kappa
    ah, bh2 = mode.mu_alpha, mode.mu_beta2
    if mode.variant is Variant.DELAY_ELASTIC:

        def poly_a(lam):
            return (lam * lam + a * mu * lam) * (lam + ah) + lam * bh2

        def poly_b(lam):
            return mu * (lam + ah)

    else:

        def poly_a(lam):
            return (lam + a * ah) * (lam * lam + mu) + lam * bh2

        def poly_b(lam):
            return kappa * ah * (lam * lam + mu)

    return poly_a, poly_b


def char_fn(mode: ModeSystem, lam):
    """Characteristic function value(s) at ``lam``.

    Accepts a scalar or an array of complex arguments.  This direct form
    overflows once ``Re(lam) * tau < -709``; the root-finding internals use
    the mantissa representation instead and stay finite everywhere.

    Parameters
    ----------
    mode : ModeSystem
    lam : complex or array_like

    Returns
    -------
    complex or ndarray
    """
    poly_a, poly_b = _char_parts(mode)
    arr = np.asarray(lam, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        out = poly_a(arr) + poly_b(arr) * np.exp(-arr * mode.tau)
    if arr.ndim == 0:
        return complex(out)
    return out


def char_deriv(mode: ModeSystem, lam):
    """Derivative of the characteristic function at ``lam``.

    Parameters
    ----------
    mode : ModeSystem
    lam : complex or array_like

    Returns
    -------
    complex or ndarray
    """
    mu, a, kappa, tau = mode.mu, mode.a, mode.kappa, mode.tau
    ah, bh2 = mode.mu_alpha, mode.mu_beta2
    arr = np.asarray(lam, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        decay = np.exp(-arr * tau)
        if mode.variant is Variant.DELAY_ELASTIC:
            inner = arr * arr + mu * decay + a * mu * arr
            inner_d = 2.0 * arr - tau * mu * decay + a * mu
            out = inner_d * (arr + ah) + inner + bh2
        else:
            out = (1.0 - kappa * tau * decay * ah) * (arr * arr + mu) + (
                arr + (kappa * decay + a) * ah
            ) * 2.0 * arr + bh2
    if arr.ndim == 0:
        return complex(out)
    return out


def undelayed_cubic(mode: ModeSystem) -> np.ndarray:
    """Cubic coefficients (descending) of chi with the delay set to zero.

    At ``tau = 0`` the transcendental factor drops and chi collapses to an
    ordinary cubic; its roots anchor continuation and small-delay checks.
    """
    mu, a, kappa = mode.mu, mode.a, mode.kappa
    ah, bh2 = mode.mu_alpha, mode.mu_beta2
    if mode.variant is Variant.DELAY_ELASTIC:
        return np.array([1.0, ah + a * mu, mu + a * mu * ah + bh2, mu * ah])
    gain = kappa + a
    return np.array([1.0, gain * ah, mu + bh2, gain * ah * mu])


def undelayed_roots(mode: ModeSystem) -> np.ndarray:
    """Roots of the undelayed cubic, sorted by descending real part."""
    roots = np.roots(undelayed_cubic(mode))
    return roots[np.argsort(-roots.real)]


def residual_scale(mode: ModeSystem, lam: complex) -> float:
    """Natural size of chi near ``lam``; residual tolerances scale by this."""
    return max(1.0, abs(lam) ** 3 + mode.mu ** (1.0 + mode.alpha))


def _scale_log(mode: ModeSystem, lam: np.ndarray) -> np.ndarray:
    return np.log(
        np.maximum(1.0, np.abs(lam) ** 3 + mode.mu ** (1.0 + mode.alpha))
    )


def _chi_mantissa(mode: ModeSystem, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate chi as (m, p) with chi = m * exp(p), p real.

    Whichever of A and B*exp(-lam*tau) dominates in log magnitude gets
    factored out; the other enters as a ratio with its exponential clipped,
    so nothing overflows and the phase of ``m`` is exact.
    """
    lam = np.asarray(lam, dtype=complex)
    poly_a, poly_b = _char_parts(mode)
    a_val, b_val = poly_a(lam), poly_b(lam)
    x = -lam.real * mode.tau
    phase = np.exp(-1j * lam.imag * mode.tau)
    log_a = np.where(a_val != 0, np.log(np.maximum(np.abs(a_val), 1e-300)), -745.0)
    log_b = np.where(b_val != 0, np.log(np.maximum(np.abs(b_val), 1e-300)), -745.0)
    big = log_b + x > log_a
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        ratio_big = (
            np.where(b_val != 0, a_val / np.where(b_val == 0, 1, b_val), 0.0)
            * np.exp(np.clip(-x, -745, 709))
            / phase
        )
        m_big = b_val * phase * (
            1.0 + np.where(np.abs(ratio_big) < 1.0, ratio_big, 0.0)
        )
        ratio_small = (
            np.where(a_val != 0, b_val / np.where(a_val == 0, 1, a_val), 0.0)
            * phase
            * np.exp(np.clip(x, -745, 709))
        )
        m_small = a_val * (
            1.0 + np.where(np.abs(ratio_small) < 1.0, ratio_small, 0.0)
        )
    m = np.where(big, m_big, m_small)
    p = np.where(big, x, 0.0)
    return m, p


def _check_box(box: Box) -> Box:
    re_lo, re_hi, im_lo, im_hi = (float(v) for v in box)
    if not (re_lo < re_hi and im_lo < im_hi):
        raise ValueError(f"degenerate box {box}: need re_lo < re_hi, im_lo < im_hi")
    return re_lo, re_hi, im_lo, im_hi


def count_roots(mode: ModeSystem, box: Box, max_pts: int = 60000) -> int:
    """Count characteristic roots inside a rectangle by winding number.

    The contour is sampled adaptively until consecutive phase increments
    all stay below pi/2 and the winding sum lands within 0.2 of an integer.
    If a root sits on or next to the contour the rectangle is inflated
    slightly (factors 1.37 / 1.29, incommensurate with root spacings) and
    the count is retried; the returned count then refers to the inflated
    rectangle.  Three inflations without success raise
    ``ContourTooCloseError``.

    Parameters
    ----------
    mode : ModeSystem
    box : (re_lo, re_hi, im_lo, im_hi)
        Nondegenerate rectangle.
    max_pts : int
        Cap on adaptive contour samples per attempt.

    Returns
    -------
    int
    """
    re_lo, re_hi, im_lo, im_hi = _check_box(box)
    for _attempt in range(4):
        corners = np.array(
            [
                re_lo + 1j * im_lo,
                re_hi + 1j * im_lo,
                re_hi + 1j * im_hi,
                re_lo + 1j * im_hi,
            ],
            dtype=complex,
        )

        def pts_of(t_arr: np.ndarray) -> np.ndarray:
            idx = np.floor(t_arr).astype(int) % 4
            frac = t_arr - np.floor(t_arr)
            return corners[idx] + frac * (corners[(idx + 1) % 4] - corners[idx])

        t = np.linspace(0.0, 4.0, 129)[:-1]
        pts = pts_of(t)
        m, p = _chi_mantissa(mode, pts)
        for _round in range(48):
            logmag = np.log(np.maximum(np.abs(m), 1e-300)) + p
            if np.min(logmag - _scale_log(mode, pts)) < math.log(1e-12):
                break  # a root (to working precision) lies on the contour
            m_next = np.roll(m, -1)
            with np.errstate(invalid="ignore"):
                dphi = np.angle(m_next / m)
            bad = ~(np.abs(dphi) < np.pi / 2)
            if not bad.any():
                winding = dphi.sum() / (2.0 * np.pi)
                n = int(np.round(winding))
                if abs(winding - n) <= 0.2:
                    return n
                break
            if len(t) > max_pts:
                break
            t_next = np.roll(t, -1).copy()
            t_next[-1] += 4.0
            mid = (t[bad] + t_next[bad]) / 2.0
            mid_pts = pts_of(mid % 4.0)
            mid_m, mid_p = _chi_mantissa(mode, mid_pts)
            order = np.argsort(np.concatenate([t, mid]))
            t = np.concatenate([t, mid])[order]
            pts = np.concatenate([pts, mid_pts])[order]
            m = np.concatenate([m, mid_m])[order]
            p = np.concatenate([p, mid_p])[order]
        center_re = (re_lo + re_hi) / 2.0
        center_im = (im_lo + im_hi) / 2.0
        half_re = (re_hi - re_lo) / 2.0 * 1.37
        half_im = (im_hi - im_lo) / 2.0 * 1.29
        re_lo, re_hi = center_re - half_re, center_re + half_re
        im_lo, im_hi = center_im - half_im, center_im + half_im
    raise ContourTooCloseError(
        f"could not resolve the winding number over {box}; a root appears "
        "to track every inflated contour"
    )


def refine_root(
    mode: ModeSystem, guess: complex, tol: float = 1e-10, max_iter: int = 50
) -> RefinedRoot:
    """Newton-refine one root from ``guess``.

    Convergence means the residual drops below ``tol`` times the local
    characteristic-function scale.  A vanishing derivative nudges the
    iterate instead of aborting; non-finite values abort.  The last finite
    iterate and its residual are returned even on failure, flagged not
    converged.

    Parameters
    ----------
    mode : ModeSystem
    guess : complex
    tol : float
        Relative residual target.
    max_iter : int

    Returns
    -------
    RefinedRoot
    """
    lam = complex(guess)
    for _ in range(max_iter):
        val = char_fn(mode, lam)
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            return RefinedRoot(lam, math.inf, False)
        if abs(val) <= tol * residual_scale(mode, lam):
            return RefinedRoot(lam, abs(val), True)
        deriv = char_deriv(mode, lam)
        if deriv == 0:
            lam += 1e-8 * (1.0 + abs(lam))
            continue
        step = val / deriv
        if not (math.isfinite(step.real) and math.isfinite(step.imag)):
            return RefinedRoot(lam, abs(val), False)
        lam -= step
    val = char_fn(mode, lam)
    residual = abs(val)
    return RefinedRoot(lam, residual, residual <= 1e2 * tol * residual_scale(mode, lam))


def _dedupe(roots: list[complex]) -> list[complex]:
    out: list[complex] = []
    for lam in roots:
        if not any(abs(lam - other) < 1e-6 * (1.0 + abs(lam)) for other in out):
            out.append(lam)
    return out


def _root_set(mode: ModeSystem, box: Box, roots: Sequence[complex]) -> RootSet:
    if not roots:
        return RootSet(box, (), 0.0)
    residual = max(abs(char_fn(mode, r)) for r in roots)
    return RootSet(box, tuple(roots), residual)


def roots_in_box(mode: ModeSystem, box: Box, _depth: int = 0) -> RootSet:
    """Locate all characteristic roots inside a rectangle.

    Counts by winding number, then either harvests by Newton from a handful
    of interior seeds (when the count is small) or bisects the longer side
    and recurses.  Roots are deduplicated at relative tolerance 1e-6; the
    result's ``residual`` is the worst |chi| over the returned roots.

    Parameters
    ----------
    mode : ModeSystem
    box : (re_lo, re_hi, im_lo, im_hi)

    Returns
    -------
    RootSet
    """
    box = _check_box(box)
    n = count_roots(mode, box)
    if n == 0:
        return RootSet(box, (), 0.0)
    re_lo, re_hi, im_lo, im_hi = box
    small = (re_hi - re_lo) + (im_hi - im_lo) < 1e-6
    if (n <= 3 and _depth >= 2) or small or _depth > 22:
        found: list[complex] = []
        seeds = [complex((re_lo + re_hi) / 2.0, (im_lo + im_hi) / 2.0)]
        seeds += [
            complex(re_lo + (re_hi - re_lo) * x, im_lo + (im_hi - im_lo) * y)
            for x, y in [(0.3, 0.3), (0.7, 0.7), (0.3, 0.7), (0.7, 0.3)]
        ]
        for seed in seeds:
            ref = refine_root(mode, seed)
            lam = ref.root
            inside = (
                re_lo - 1e-9 <= lam.real <= re_hi + 1e-9
                and im_lo - 1e-9 <= lam.imag <= im_hi + 1e-9
            )
            if ref.converged and inside:
                if not any(
                    abs(lam - other) < 1e-6 * (1.0 + abs(lam)) for other in found
                ):
                    found.append(lam)
            if len(found) == n:
                return _root_set(mode, box, found)
        if len(found) == n or small or _depth > 22:
            return _root_set(mode, box, found)
    if im_hi - im_lo >= re_hi - re_lo:
        mid = (im_lo + im_hi) / 2.0
        lower = roots_in_box(mode, (re_lo, re_hi, im_lo, mid), _depth + 1)
        upper = roots_in_box(mode, (re_lo, re_hi, mid, im_hi), _depth + 1)
        merged = _dedupe(list(lower.roots) + list(upper.roots))
    else:
        mid = (re_lo + re_hi) / 2.0
        left = roots_in_box(mode, (re_lo, mid, im_lo, im_hi), _depth + 1)
        right = roots_in_box(mode, (mid, re_hi, im_lo, im_hi), _depth + 1)
        merged = _dedupe(list(left.roots) + list(right.roots))
    return _root_set(mode, box, merged)


def _default_im_max(mode: ModeSystem) -> float:
    return 2.0 * mode.mu_sqrt + 10.0 / mode.tau


def _default_re_lo(mode: ModeSystem) -> float:
    return -max(10.0, 2.0 * mode.a * mode.mu)


def _strip_breakpoints(re_lo: float) -> list[float]:
    # fixed ladder near the axis, then geometric; final entry exactly re_lo
    bps = [1.0, 1e-3, 0.0, -1e-3, -0.01, -0.1, -0.5, -1.0, -2.0, -4.0]
    floor = re_lo - 1.0
    x = -4.0
    while x > floor:
        x *= 2.0
        bps.append(max(x, floor))
    bps[-1] = floor
    return bps


def strip_roots(mode: ModeSystem, search: Optional[Box] = None) -> RootSet:
    """Roots of the rightmost populated vertical strip.

    Walks vertical strips from right to left (fine near the imaginary
    axis, geometric further out) and returns every root of the first strip
    that contains any, i.e. the rightmost cluster of the spectrum.  If a
    found root hugs the top or bottom edge the strip is re-searched with
    the imaginary range doubled.

    Parameters
    ----------
    mode : ModeSystem
    search : Box, optional
        Restrict to this rectangle instead of walking strips.

    Returns
    -------
    RootSet
        Empty when the searched region is root-free.
    """
    if search is not None:
        return roots_in_box(mode, search)
    im_max = _default_im_max(mode)
    bps = _strip_breakpoints(_default_re_lo(mode))
    for k in range(len(bps) - 1):
        re_hi, re_lo = bps[k], bps[k + 1]
        strip: Box = (re_lo, re_hi, -im_max, im_max)
        if count_roots(mode, strip) == 0:
            continue
        found = roots_in_box(mode, strip)
        if found.roots and max(abs(r.imag) for r in found.roots) > 0.95 * im_max:
            wide: Box = (re_lo, re_hi, -2.0 * im_max, 2.0 * im_max)
            found = roots_in_box(mode, wide)
        if found.roots:
            return found
    full: Box = (bps[-1], bps[0], -im_max, im_max)
    return RootSet(full, (), 0.0)


def rightmost_root(mode: ModeSystem, search: Optional[Box] = None) -> Optional[complex]:
    """Root of largest real part, or ``None`` if the region is root-free.

    Parameters
    ----------
    mode : ModeSystem
    search : Box, optional
        Rectangle to search; defaults to a strip walk sized from ``mode``.

    Returns
    -------
    complex or None
    """
    return strip_roots(mode, search).rightmost()


def spectral_abscissa(
    spec: SystemSpec,
    eigenvalues: Sequence[float],
    search: Optional[Box] = None,
) -> AbscissaResult:
    """Largest root real part across a family of modes, with its witness.

    The result is a truncation lower bound: modes beyond the supplied list
    could in principle reach further right.

    Parameters
    ----------
    spec : SystemSpec
    eigenvalues : sequence of float
        Operator eigenvalues, one mode each.
    search : Box, optional
        Forwarded to ``rightmost_root`` per mode.

    Returns
    -------
    AbscissaResult

    Raises
    ------
    ValueError
        If no mode has any root inside its searched region.
    """
    if len(eigenvalues) == 0:
        raise ValueError("need at least one operator eigenvalue")
    best: Optional[tuple[float, int, complex]] = None
    for j, mu in enumerate(eigenvalues):
        mode = ModeSystem(spec, float(mu))
        root = rightmost_root(mode, search)
        if root is None:
            continue
        if best is None or root.real > best[0]:
            best = (root.real, j, root)
    if best is None:
        raise ValueError("no characteristic roots found in the searched region")
    return AbscissaResult(value=best[0], witness_mode=best[1], witness_root=best[2])
