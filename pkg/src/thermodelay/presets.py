"""Named benchmark configurations with explicit modal ladders.

Each preset fixes a variant, exponent pair, and operator eigenvalue ladder
for a familiar 1-D (or square, for the plate) geometry, so tests and the
command line can refer to a reproducible setup by name.  Eigenvalues are
the exact Dirichlet values for the stated geometry; no discretization is
involved.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .model import SystemSpec, Variant
from .regions import MeasuredKind, predict

__all__ = [
    "PresetName",
    "Preset",
    "Expectation",
    "make_preset",
    "preset_expectation",
    "list_presets",
]


class PresetName(enum.Enum):
    PLATE_DELAY = "plate-delay"
    STRING_KV = "string-kv"
    BEAM1 = "beam1"
    BEAM2 = "beam2"
    STRING_HEAT_DELAY = "string-heat-delay"


@dataclass(frozen=True)
class Preset:
    """A named spec plus its exact modal ladder and provenance note."""

    name: PresetName
    spec: SystemSpec
    eigenvalues: tuple[float, ...]
    geometry: str
    length: float
    notes: str


class Expectation(NamedTuple):
    """What the theory asserts for a preset under its default parameters."""

    kind: MeasuredKind
    gamma: Optional[float]
    hypotheses: str


_EXPONENTS = {
    PresetName.PLATE_DELAY: (Variant.DELAY_ELASTIC, 0.5, 0.5),
    PresetName.STRING_KV: (Variant.DELAY_ELASTIC, 0.5, 1.0),
    PresetName.BEAM1: (Variant.DELAY_HEAT, 0.5, 0.5),
    PresetName.BEAM2: (Variant.DELAY_HEAT, 0.0, 0.5),
    PresetName.STRING_HEAT_DELAY: (Variant.DELAY_HEAT, 0.5, 1.0),
}

_FOURTH_ORDER = {PresetName.PLATE_DELAY, PresetName.BEAM1, PresetName.BEAM2}


def _interval_ladder(L: float, j_max: int, fourth_order: bool) -> list[float]:
    base = [(j * math.pi / L) ** 2 for j in range(1, j_max + 1)]
    return [mu * mu for mu in base] if fourth_order else base


def _square_plate_ladder(L: float, j_max: int) -> list[float]:
    k_max = int(math.ceil(math.sqrt(j_max))) + 2
    mus = sorted(
        (math.pi / L) ** 2 * (k * k + l * l)
        for k in range(1, k_max + 1)
        for l in range(1, k_max + 1)
    )
    return [mu * mu for mu in mus[:j_max]]


def make_preset(
    name: PresetName,
    L: float = math.pi,
    j_max: int = 20,
    a: Optional[float] = None,
    kappa: float = 1.0,
    tau: float = 1.0,
    geometry: str = "interval",
) -> Preset:
    """Build a named benchmark configuration.

    Defaults put every preset inside its theory's hypotheses: damping
    ``a = 1`` with weight ``xi = 2*tau/a`` for the elastic presets, and
    ``a = 2`` (dominating ``kappa = 1``) with the admissible-interval
    midpoint ``xi = tau*a`` for the heat presets.

    Parameters
    ----------
    name : PresetName
    L : float
        Domain length (side length for the square plate).
    j_max : int
        Number of modes, smallest eigenvalues first.
    a : float, optional
        Damping coefficient; ``None`` picks the variant default.
    kappa : float
        Delayed-feedback gain (heat variant).
    tau : float
        Delay.
    geometry : str
        ``"interval"`` for all presets; ``"square"`` additionally allowed
        for the plate, switching to the two-index eigenvalue ladder.

    Returns
    -------
    Preset
    """
    if isinstance(name, str):
        name = PresetName(name)
    variant, beta, alpha = _EXPONENTS[name]
    if L <= 0 or j_max < 1:
        raise ValueError("need L > 0 and j_max >= 1")
    if a is None:
        a = 1.0 if variant is Variant.DELAY_ELASTIC else 2.0
    xi = 2.0 * tau / a if variant is Variant.DELAY_ELASTIC else tau * a
    spec = SystemSpec(
        variant=variant, beta=beta, alpha=alpha, a=a, kappa=kappa, tau=tau, xi=xi
    )
    fourth = name in _FOURTH_ORDER
    if geometry == "interval":
        lam = _interval_ladder(L, j_max, fourth)
        order = "(j*pi/L)^4" if fourth else "(j*pi/L)^2"
        notes = f"Dirichlet interval ladder lambda_j = {order}, L = {L:g}"
    elif geometry == "square" and name is PresetName.PLATE_DELAY:
        lam = _square_plate_ladder(L, j_max)
        notes = (
            "Dirichlet square-plate ladder lambda = "
            f"((pi/L)^2 (k^2 + l^2))^2, L = {L:g}"
        )
    else:
        raise ValueError(f"geometry {geometry!r} is not defined for {name.value}")
    return Preset(
        name=name,
        spec=spec,
        eigenvalues=tuple(lam),
        geometry=geometry,
        length=L,
        notes=notes,
    )


def preset_expectation(name: PresetName) -> Expectation:
    """The predicted verdict for a preset under its default parameters."""
    if isinstance(name, str):
        name = PresetName(name)
    preset = make_preset(name, j_max=1)
    spec = preset.spec
    pred = predict(spec.variant, spec.beta, spec.alpha, a=spec.a, kappa=spec.kappa)
    if spec.variant is Variant.DELAY_ELASTIC:
        hypotheses = "a > 0, xi >= 2*tau/a, exponents in the admissible set"
    else:
        hypotheses = "a >= kappa > 0, xi inside the admissible interval"
    return Expectation(kind=pred.kind, gamma=pred.gamma, hypotheses=hypotheses)


def list_presets() -> list[PresetName]:
    """All preset names, in declaration order."""
    return list(PresetName)
