"""Command-line front end: argument parsing, dispatch, and file emission.

Subcommands: ``spectrum`` (per-mode eigenvalues, optionally Newton-refined
to characteristic roots), ``resolvent`` (frequency sweep), ``simulate``
(time integration and energy), ``sweep`` (stability-map classification),
``presets`` (named configurations), and ``check`` (randomized property
suites).  CSV is the canonical tabular format; every file-producing run
also writes a ``<out>.manifest.json`` sidecar recording the configuration,
library versions, seed, and output digests, with no timestamps, so equal
configurations produce identical bytes.

Exit codes: 0 on success (inconclusive sweep verdicts included), 1 on
validation errors, 2 on numerical failures or property-suite violations.
The only environment variable read is ``THERMODELAY_THREADS``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy

from . import __version__, chareq, timesim
from .generator import (
    build_grid,
    build_mode_generator,
    dissipativity_form,
    energy_norm_sq,
    mode_eigenvalues,
    random_state,
)
from .model import (
    SystemSpec,
    Variant,
    coercivity_margin,
    region_classify,
    RegionLabel,
    shift_m,
    union_identity_check,
    xi_interval_system2,
)
from .presets import PresetName, list_presets, make_preset, preset_expectation
from .regions import (
    Budget,
    VERDICT_CSV_HEADER,
    default_ladder,
    sweep_grid,
    verdict_csv_row,
)
from .resolvent import resolvent_sweep

__all__ = ["main", "parse_and_dispatch"]


class _ValidationError(Exception):
    """Bad configuration detected before any computation; exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would sys.exit(2)
        raise _ValidationError(message)


def _threads() -> int:
    raw = os.environ.get("THERMODELAY_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise _ValidationError(
            f"THERMODELAY_THREADS must be an integer, got {raw!r}"
        ) from None
    return max(1, n)


def _read_config_file(path: str) -> list[str]:
    """Expand a KEY=VALUE file into flag tokens (booleans toggle flags)."""
    tokens: list[str] = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _ValidationError(f"cannot read config file {path!r}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _ValidationError(f"{path}:{lineno}: expected KEY=VALUE, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "1") and key not in ("grid", "seed"):
            tokens.append(flag)
        elif value.lower() in ("false", "no"):
            continue
        else:
            tokens.extend([flag, value])
    return tokens


def _expand_config(argv: list[str]) -> list[str]:
    """Splice config-file tokens right after the subcommand.

    Flags given on the command line come later and therefore override the
    file (last occurrence wins in argparse).
    """
    out: list[str] = []
    expansions: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--config":
            if i + 1 >= len(argv):
                raise _ValidationError("--config needs a file path")
            expansions.extend(_read_config_file(argv[i + 1]))
            i += 2
            continue
        if tok.startswith("--config="):
            expansions.extend(_read_config_file(tok.split("=", 1)[1]))
            i += 1
            continue
        out.append(tok)
        i += 1
    if expansions:
        if not out or out[0].startswith("-"):
            raise _ValidationError("--config requires a subcommand")
        out = [out[0]] + expansions + out[1:]
    return out


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for randomized parts")
    p.add_argument(
        "--json-errors",
        action="store_true",
        help="emit errors as JSON on stderr",
    )
    p.add_argument(
        "--config",
        metavar="FILE",
        help="KEY=VALUE file of defaults; explicit flags override it",
    )
    p.add_argument("-o", "--out", metavar="FILE", help="output file path")


def _spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--preset",
        choices=[name.value for name in PresetName],
        help="named configuration; overrides the explicit spec flags",
    )
    p.add_argument(
        "--variant",
        choices=[v.value for v in Variant],
        help="system family when no preset is given",
    )
    p.add_argument("--beta", type=float, help="coupling exponent in [0, 1]")
    p.add_argument("--alpha", type=float, help="damping exponent in [0, 1]")
    p.add_argument("--a", type=float, default=None, help="damping coefficient")
    p.add_argument("--kappa", type=float, default=1.0, help="delayed-feedback gain")
    p.add_argument("--tau", type=float, default=1.0, help="delay")
    p.add_argument("--xi", type=float, default=None, help="history weight")
    p.add_argument("--L", type=float, default=math.pi, help="domain length")
    p.add_argument("--j-max", type=int, default=20, help="number of modes")
    p.add_argument(
        "--geometry",
        default="interval",
        help="eigenvalue geometry for presets (interval, or square for the plate)",
    )


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="thermodelay",
        description="Spectral and time-domain stability toolkit for delayed "
        "thermoelastic mode families.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser(
        "spectrum",
        formatter_class=fmt,
        help="per-mode generator eigenvalues, optionally refined to "
        "characteristic roots",
    )
    _spec_flags(p)
    _common_flags(p)
    p.add_argument("--n-rho", type=int, default=32, help="collocation size")
    p.add_argument(
        "--refine",
        action="store_true",
        help="Newton-refine eigenvalues with Re above --re-min",
    )
    p.add_argument(
        "--re-min",
        type=float,
        default=-5.0,
        help="refinement threshold on the real part",
    )

    p = sub.add_parser(
        "resolvent",
        formatter_class=fmt,
        help="per-mode resolvent norms along the imaginary axis",
    )
    _spec_flags(p)
    _common_flags(p)
    p.add_argument("--n-rho", type=int, default=48, help="collocation size")
    p.add_argument("--omega-min", type=float, default=0.1, help="lowest frequency")
    p.add_argument(
        "--omega-max",
        type=float,
        default=None,
        help="highest frequency (default 1e3 * sqrt(largest eigenvalue))",
    )
    p.add_argument(
        "--omega-decades",
        type=float,
        default=None,
        help="span above --omega-min; ignored when --omega-max is given",
    )
    p.add_argument("--ppd", type=int, default=40, help="grid points per decade")
    p.add_argument(
        "--no-refine",
        action="store_true",
        help="skip automatic peak refinement",
    )

    p = sub.add_parser(
        "simulate",
        formatter_class=fmt,
        help="integrate the truncated system and report energy over time",
    )
    _spec_flags(p)
    _common_flags(p)
    p.add_argument("--T", type=float, required=True, help="horizon (at least 2*tau)")
    p.add_argument("--dt", type=float, required=True, help="step (at most tau/8)")
    p.add_argument(
        "--adaptive", action="store_true", help="halve dt until the energy settles"
    )
    p.add_argument("--stride", type=int, default=1, help="energy sampling stride")
    p.add_argument(
        "--states-out", metavar="FILE", help="also write per-mode state samples"
    )

    p = sub.add_parser(
        "sweep",
        formatter_class=fmt,
        help="classify a (beta, alpha) lattice and compare with predictions",
    )
    _common_flags(p)
    p.add_argument(
        "--variant",
        choices=[v.value for v in Variant],
        required=True,
    )
    p.add_argument("--grid", type=int, default=11, help="lattice points per side")
    p.add_argument("--a", type=float, default=None, help="damping coefficient")
    p.add_argument("--kappa", type=float, default=1.0, help="delayed-feedback gain")
    p.add_argument("--tau", type=float, default=1.0, help="delay")
    p.add_argument("--xi", type=float, default=None, help="history weight")
    p.add_argument(
        "--budget",
        choices=[b.label for b in Budget],
        default="fast",
        help="effort preset",
    )

    p = sub.add_parser(
        "presets", formatter_class=fmt, help="named benchmark configurations"
    )
    p.add_argument("action", nargs="?", default="list", choices=["list"])
    _common_flags(p)

    p = sub.add_parser(
        "check", formatter_class=fmt, help="randomized property suites"
    )
    p.add_argument(
        "--suite",
        required=True,
        choices=["dissipativity", "coercivity", "regions"],
    )
    _common_flags(p)
    return parser


def _default_a(variant: Variant) -> float:
    return 1.0 if variant is Variant.DELAY_ELASTIC else 2.0


def _default_xi(variant: Variant, a: float, tau: float) -> float:
    if a == 0:
        return 1.0
    return 2.0 * tau / a if variant is Variant.DELAY_ELASTIC else tau * a


def _resolve_setup(args: argparse.Namespace) -> tuple[SystemSpec, list[float], dict]:
    """Spec plus modal ladder from either a preset or explicit flags."""
    if args.preset:
        preset = make_preset(
            PresetName(args.preset),
            L=args.L,
            j_max=args.j_max,
            a=args.a,
            kappa=args.kappa,
            tau=args.tau,
            geometry=args.geometry,
        )
        spec = preset.spec
        if args.xi is not None:
            spec = replace(spec, xi=args.xi)
        desc = {
            "preset": preset.name.value,
            "geometry": preset.geometry,
            "L": args.L,
            "j_max": args.j_max,
        }
        return spec, list(preset.eigenvalues), desc
    if args.variant is None or args.beta is None or args.alpha is None:
        raise _ValidationError(
            "either --preset or all of --variant/--beta/--alpha are required"
        )
    variant = Variant(args.variant)
    a = _default_a(variant) if args.a is None else args.a
    xi = _default_xi(variant, a, args.tau) if args.xi is None else args.xi
    try:
        if a == 0:
            spec = SystemSpec.probe(
                variant,
                beta=args.beta,
                alpha=args.alpha,
                a=0.0,
                kappa=args.kappa,
                tau=args.tau,
                xi=xi,
            )
        else:
            spec = SystemSpec(
                variant=variant,
                beta=args.beta,
                alpha=args.alpha,
                a=a,
                kappa=args.kappa,
                tau=args.tau,
                xi=xi,
            )
    except ValueError as exc:
        raise _ValidationError(str(exc)) from None
    desc = {"ladder": "j^4", "j_max": args.j_max}
    return spec, default_ladder(args.j_max), desc


def _spec_dict(spec: SystemSpec) -> dict:
    return {
        "variant": spec.variant.value,
        "beta": spec.beta,
        "alpha": spec.alpha,
        "a": spec.a,
        "kappa": spec.kappa,
        "tau": spec.tau,
        "xi": spec.xi,
        "is_probe": spec.is_probe,
    }


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_manifest(
    out: Path, command: str, config: dict, seed: int, outputs: list[Path]
) -> None:
    digests = []
    for p in sorted(outputs, key=lambda q: q.name):
        digests.append(
            {"file": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest()}
        )
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "versions": {
            "thermodelay": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "outputs": digests,
    }
    _write_json(Path(str(out) + ".manifest.json"), manifest)


def _fmt(x: float) -> str:
    return repr(float(x))


def _require_out(args: argparse.Namespace) -> Path:
    if not args.out:
        raise _ValidationError("this command requires -o/--out")
    return Path(args.out)


def _cmd_spectrum(args: argparse.Namespace) -> int:
    out = _require_out(args)
    spec, mus, desc = _resolve_setup(args)
    grid = build_grid(args.n_rho)
    rows: list[list[str]] = []
    for j, mu in enumerate(mus):
        mode = chareq.ModeSystem(spec, float(mu))
        gen = build_mode_generator(mode, grid)
        for lam in mode_eigenvalues(gen):
            lam = complex(lam)
            refined = None
            if args.refine and lam.real > args.re_min:
                refined = chareq.refine_root(mode, lam)
            if refined is not None and refined.converged:
                lam, residual = refined.root, refined.residual
            else:
                residual = abs(chareq.char_fn(mode, lam)) / chareq.residual_scale(
                    mode, lam
                )
            rows.append([str(j), _fmt(mu), _fmt(lam.real), _fmt(lam.imag),
                         _fmt(residual)])
    _write_csv(out, ["mode", "lambda_j", "re", "im", "residual"], rows)
    config = {
        "spec": _spec_dict(spec),
        "setup": desc,
        "n_rho": args.n_rho,
        "refine": bool(args.refine),
        "re_min": args.re_min,
    }
    _write_manifest(out, "spectrum", config, args.seed, [out])
    return 0


def _cmd_resolvent(args: argparse.Namespace) -> int:
    out = _require_out(args)
    spec, mus, desc = _resolve_setup(args)
    omega_min = args.omega_min
    if omega_min <= 0:
        raise _ValidationError("--omega-min must be positive")
    if args.omega_max is not None:
        omega_max = args.omega_max
    elif args.omega_decades is not None:
        omega_max = omega_min * 10.0**args.omega_decades
    else:
        omega_max = 1e3 * math.sqrt(max(mus))
    if omega_max <= omega_min:
        raise _ValidationError("frequency window is empty")
    decades = math.log10(omega_max / omega_min)
    npts = max(2, int(math.ceil(args.ppd * decades)))
    omegas = np.geomspace(omega_min, omega_max, npts)
    samples = resolvent_sweep(
        spec,
        mus,
        omegas,
        n=args.n_rho,
        refine=not args.no_refine,
        threads=_threads(),
    )
    rows = [
        [str(s.mode_index), _fmt(mus[s.mode_index]), _fmt(s.omega), _fmt(s.norm)]
        for s in samples
    ]
    _write_csv(out, ["mode", "lambda_j", "omega", "norm"], rows)
    config = {
        "spec": _spec_dict(spec),
        "setup": desc,
        "n_rho": args.n_rho,
        "omega_min": omega_min,
        "omega_max": omega_max,
        "ppd": args.ppd,
        "refine": not args.no_refine,
    }
    _write_manifest(out, "resolvent", config, args.seed, [out])
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    out = _require_out(args)
    spec, mus, desc = _resolve_setup(args)
    if not 0 < args.dt <= spec.tau / 8.0:
        raise _ValidationError(
            f"--dt must lie in (0, tau/8] = (0, {spec.tau / 8.0:g}]"
        )
    if args.T < 2.0 * spec.tau:
        raise _ValidationError(f"--T must be at least 2*tau = {2.0 * spec.tau:g}")
    if args.stride < 1:
        raise _ValidationError("--stride must be at least 1")
    traj = timesim.simulate(spec, mus, None, args.T, args.dt, adaptive=args.adaptive)
    series = timesim.energy_series(traj, spec.xi, stride=args.stride)
    rows = [[_fmt(t), _fmt(e)] for t, e in zip(series.times, series.values)]
    _write_csv(out, ["t", "E"], rows)
    outputs = [out]
    if args.states_out:
        spath = Path(args.states_out)
        srows = []
        for k in range(0, len(traj.times), args.stride):
            t = traj.times[k]
            for j in range(traj.n_modes):
                u, v, th = traj.states[j, k]
                srows.append(
                    [_fmt(t), str(j), repr(complex(u)), repr(complex(v)),
                     repr(complex(th))]
                )
        _write_csv(spath, ["t", "j", "u", "v", "theta"], srows)
        outputs.append(spath)
    config = {
        "spec": _spec_dict(spec),
        "setup": desc,
        "eigenvalues": [float(mu) for mu in mus],
        "T": args.T,
        "dt_requested": args.dt,
        "dt_actual": traj.dt,
        "adaptive": bool(args.adaptive),
        "stride": args.stride,
        "blew_up": traj.blew_up,
        "kernel": timesim.kernel_name(),
    }
    _write_manifest(out, "simulate", config, args.seed, outputs)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    out = _require_out(args)
    variant = Variant(args.variant)
    a = _default_a(variant) if args.a is None else args.a
    budget = Budget.FAST if args.budget == "fast" else Budget.THOROUGH
    if args.grid < 2:
        raise _ValidationError("--grid must be at least 2")
    summary = sweep_grid(
        variant,
        args.grid,
        a=a,
        kappa=args.kappa,
        tau=args.tau,
        xi=args.xi,
        budget=budget,
        threads=_threads(),
    )
    _write_csv(out, VERDICT_CSV_HEADER, [verdict_csv_row(r) for r in summary.rows])
    spath = Path(str(out) + ".summary.json")
    _write_json(
        spath,
        {
            "n_points": summary.n_points,
            "n_skipped": summary.n_skipped,
            "n_boundary": summary.n_boundary,
            "n_inconclusive": summary.n_inconclusive,
            "n_eligible": summary.n_eligible,
            "n_agree": summary.n_agree,
            "agreement": summary.agreement,
            "confusion": {
                f"{pred}->{meas}": count
                for (pred, meas), count in sorted(summary.confusion.items())
            },
        },
    )
    config = {
        "variant": variant.value,
        "grid": args.grid,
        "a": a,
        "kappa": args.kappa,
        "tau": args.tau,
        "xi": args.xi,
        "budget": budget.label,
        "modes": budget.modes,
    }
    _write_manifest(out, "sweep", config, args.seed, [out, spath])
    return 0


def _cmd_presets(args: argparse.Namespace) -> int:
    header = ["name", "variant", "beta", "alpha", "expected", "gamma", "hypotheses"]
    rows = []
    for name in list_presets():
        preset = make_preset(name, j_max=1)
        exp = preset_expectation(name)
        rows.append(
            [
                name.value,
                preset.spec.variant.value,
                _fmt(preset.spec.beta),
                _fmt(preset.spec.alpha),
                exp.kind.value,
                "" if exp.gamma is None else _fmt(exp.gamma),
                exp.hypotheses,
            ]
        )
    if args.out:
        out = Path(args.out)
        _write_csv(out, header, rows)
        _write_manifest(out, "presets", {}, args.seed, [out])
    else:
        widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
        for r in [header] + rows:
            print("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    return 0


def _suite_dissipativity(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    grid = build_grid(16)
    n_specs_per_variant = 5
    states_per_spec = 1000
    checked = {"heat": 0, "elastic": 0}
    passed = {"heat": 0, "elastic": 0}
    worst = 0.0
    for variant in (Variant.DELAY_HEAT, Variant.DELAY_ELASTIC):
        for _ in range(n_specs_per_variant):
            beta = rng.uniform(0.0, 1.0)
            alpha = rng.uniform(max(0.0, 2.0 * beta - 1.0), 1.0)
            tau = rng.uniform(0.5, 2.0)
            if variant is Variant.DELAY_HEAT:
                kappa = rng.uniform(0.5, 1.5)
                a = kappa * (1.0 + rng.uniform(0.1, 1.0))
                window = xi_interval_system2(a, kappa, tau)
                half = 0.5 * (window.hi - window.lo)
                xi = window.midpoint + rng.uniform(-0.4, 0.4) * half
            else:
                kappa = 1.0
                a = rng.uniform(0.5, 2.0)
                xi = (2.0 * tau / a) * (1.0 + rng.uniform(0.0, 1.0))
            spec = SystemSpec(
                variant=variant, beta=beta, alpha=alpha, a=a, kappa=kappa,
                tau=tau, xi=xi,
            )
            key = "heat" if variant is Variant.DELAY_HEAT else "elastic"
            for _ in range(states_per_spec):
                mu = 10.0 ** rng.uniform(0.0, 4.0)
                mode = chareq.ModeSystem(spec, mu)
                state = random_state(mode, grid, rng)
                value = dissipativity_form(spec, mode, state, grid)
                bound = 1e-12 * energy_norm_sq(spec, mode, state, grid)
                if variant is Variant.DELAY_ELASTIC:
                    value -= shift_m(a, xi, tau) * mu * abs(state.u) ** 2
                checked[key] += 1
                if value <= bound:
                    passed[key] += 1
                else:
                    worst = max(worst, float(value - bound))
    report = {
        "suite": "dissipativity",
        "seed": seed,
        "specs": 2 * n_specs_per_variant,
        "states_per_spec": states_per_spec,
        "properties": {
            "heat-form-nonpositive": {
                "checked": checked["heat"],
                "passed": passed["heat"],
            },
            "elastic-shifted-form-nonpositive": {
                "checked": checked["elastic"],
                "passed": passed["elastic"],
            },
        },
        "worst_excess": worst,
    }
    return report


def _suite_coercivity(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    checked = passed = 0
    per_config = 25000
    for a in (1.0, 2.0):
        for factor in (1.0, 0.5):
            tau = a * factor
            mags = 10.0 ** rng.uniform(-8.0, 3.0, size=per_config)
            angles = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size=per_config)
            lams = mags * np.exp(1j * angles)
            for lam in lams:
                checked += 1
                if coercivity_margin(complex(lam), a, tau) > 0:
                    passed += 1
    witness = None
    a_w, tau_w = 1.0, 2.0
    for t in np.geomspace(1e-3, 10.0, 400):
        margin = coercivity_margin(1j * float(t), a_w, tau_w)
        if margin < 0:
            witness = {"a": a_w, "tau": tau_w, "lambda_im": float(t), "margin": margin}
            break
    report = {
        "suite": "coercivity",
        "seed": seed,
        "properties": {
            "margin-positive-when-a-at-least-tau-factor": {
                "checked": checked,
                "passed": passed,
            },
            "negative-witness-when-a-half-tau": {
                "checked": 1,
                "passed": 1 if witness is not None else 0,
            },
        },
        "witness": witness,
    }
    return report


def _suite_regions(seed: int) -> dict:
    step = Fraction(1, 20)
    checked = passed = 0
    s3_checked = s3_ok = 0
    for i in range(21):
        for k in range(21):
            beta, alpha = i * step, k * step
            label = region_classify(beta, alpha)
            in_q = 2 * beta - alpha <= 1
            in_s = max(1 - 2 * beta, 2 * beta - 1) <= alpha <= 2 * beta
            in_s1 = alpha > 2 * beta and 2 * alpha > 1
            in_s2 = alpha < 1 - 2 * beta and 2 * alpha <= 1
            in_s3 = 0 < alpha < 2 * beta - 1
            checked += 1
            if in_q:
                expected = (
                    RegionLabel.S
                    if in_s
                    else RegionLabel.S1
                    if in_s1
                    else RegionLabel.S2
                    if in_s2
                    else None
                )
                ok = expected is not None and label is expected
            else:
                ok = label is RegionLabel.OUTSIDE_Q
            if ok:
                passed += 1
            s3_checked += 1
            if not (in_s3 and in_q):
                s3_ok += 1
    union = union_identity_check(1.0 / 20.0)
    report = {
        "suite": "regions",
        "seed": seed,
        "grid": 21,
        "properties": {
            "label-matches-membership": {"checked": checked, "passed": passed},
            "s3-disjoint-from-scope": {"checked": s3_checked, "passed": s3_ok},
            "union-identity": {"checked": 1, "passed": 1 if union.ok else 0},
        },
    }
    return report


def _cmd_check(args: argparse.Namespace) -> int:
    suites = {
        "dissipativity": _suite_dissipativity,
        "coercivity": _suite_coercivity,
        "regions": _suite_regions,
    }
    report = suites[args.suite](args.seed)
    ok = all(
        prop["passed"] == prop["checked"] for prop in report["properties"].values()
    )
    report["ok"] = ok
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        _write_manifest(out, "check", {"suite": args.suite}, args.seed, [out])
    else:
        sys.stdout.write(text)
    return 0 if ok else 2


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "resolvent": _cmd_resolvent,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "presets": _cmd_presets,
    "check": _cmd_check,
}


def _emit_error(kind: str, message: str, as_json: bool) -> None:
    if as_json:
        sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    else:
        sys.stderr.write(f"error: {message}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand, and return the exit code.

    0 on success (an inconclusive sweep still succeeds), 1 on validation
    errors, 2 on numerical failures or check-suite violations.
    """
    raw = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json-errors" in raw
    try:
        expanded = _expand_config(raw)
        args = _build_parser().parse_args(expanded)
    except _ValidationError as exc:
        _emit_error("validation", str(exc), as_json)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](args)
    except _ValidationError as exc:
        _emit_error("validation", str(exc), args.json_errors)
        return 1
    except Exception as exc:
        _emit_error(type(exc).__name__, str(exc), args.json_errors)
        return 2


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Alias for ``main``."""
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
