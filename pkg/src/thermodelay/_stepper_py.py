"""Pure-Python reference kernel for the method-of-steps RK4 integrator.

Mirrors the compiled extension ``_stepper`` exactly; ``timesim`` picks
whichever is importable.  The kernel advances one modal projection with the
delayed trace read from the already-computed trace history: grid and
midpoint delay queries land exactly on stored values (the step divides the
delay), interior midpoints use the cubic Hermite two-point formula.
"""
from __future__ import annotations

import math

COMPILED = False


def run_mode(
    variant_code: int,
    mu: float,
    beta: float,
    alpha: float,
    a: float,
    kappa: float,
    tau: float,
    dt: float,
    nsteps: int,
    m: int,
    y0,
    hist_grid,
    hist_mid,
    out_states,
    out_tr,
    out_trp,
) -> int:
    """Integrate one mode over ``nsteps`` RK4 steps of size ``dt = tau/m``.

    ``hist_grid[i]`` holds the delayed quantity at ``(i-m)*dt`` for
    ``i <= m`` and ``hist_mid[i]`` at ``(i-m+0.5)*dt``; outputs are written
    in place (states, trace, trace rate per grid time).  Returns the number
    of completed steps, short of ``nsteps`` only when a state magnitude
    exceeds 1e12 (divergence guard).
    """
    sq = math.sqrt(mu)
    ah = mu**alpha
    ahh = mu ** (alpha / 2.0)
    bh = mu**beta
    amu = a * mu
    aah = a * ah
    kahh = kappa * ahh
    elastic = variant_code == 0
    u = complex(y0[0])
    v = complex(y0[1])
    th = complex(y0[2])
    out_states[0, 0] = u
    out_states[0, 1] = v
    out_states[0, 2] = th
    if elastic:
        out_tr[0] = sq * u
        out_trp[0] = sq * v
    else:
        out_tr[0] = ahh * th
        out_trp[0] = ahh * (-kahh * hist_grid[0] - aah * th - bh * v)
    for k in range(nsteps):
        kk = k - m
        e0 = hist_grid[k] if kk < 0 else out_tr[kk]
        if kk + 1 < 0:
            e1 = hist_grid[k + 1]
        else:
            e1 = out_tr[kk + 1]
        if kk + 1 <= 0:
            eh = hist_mid[k]
        else:
            eh = 0.5 * (out_tr[kk] + out_tr[kk + 1]) + dt * (
                out_trp[kk] - out_trp[kk + 1]
            ) / 8.0
        if elastic:
            du1 = v
            dv1 = -sq * e0 - amu * v + bh * th
            dth1 = -ah * th - bh * v
            u2 = u + 0.5 * dt * du1
            v2 = v + 0.5 * dt * dv1
            th2 = th + 0.5 * dt * dth1
            du2 = v2
            dv2 = -sq * eh - amu * v2 + bh * th2
            dth2 = -ah * th2 - bh * v2
            u3 = u + 0.5 * dt * du2
            v3 = v + 0.5 * dt * dv2
            th3 = th + 0.5 * dt * dth2
            du3 = v3
            dv3 = -sq * eh - amu * v3 + bh * th3
            dth3 = -ah * th3 - bh * v3
            u4 = u + dt * du3
            v4 = v + dt * dv3
            th4 = th + dt * dth3
            du4 = v4
            dv4 = -sq * e1 - amu * v4 + bh * th4
            dth4 = -ah * th4 - bh * v4
        else:
            du1 = v
            dv1 = -mu * u + bh * th
            dth1 = -kahh * e0 - aah * th - bh * v
            u2 = u + 0.5 * dt * du1
            v2 = v + 0.5 * dt * dv1
            th2 = th + 0.5 * dt * dth1
            du2 = v2
            dv2 = -mu * u2 + bh * th2
            dth2 = -kahh * eh - aah * th2 - bh * v2
            u3 = u + 0.5 * dt * du2
            v3 = v + 0.5 * dt * dv2
            th3 = th + 0.5 * dt * dth2
            du3 = v3
            dv3 = -mu * u3 + bh * th3
            dth3 = -kahh * eh - aah * th3 - bh * v3
            u4 = u + dt * du3
            v4 = v + dt * dv3
            th4 = th + dt * dth3
            du4 = v4
            dv4 = -mu * u4 + bh * th4
            dth4 = -kahh * e1 - aah * th4 - bh * v4
        u = u + dt / 6.0 * (du1 + 2.0 * du2 + 2.0 * du3 + du4)
        v = v + dt / 6.0 * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4)
        th = th + dt / 6.0 * (dth1 + 2.0 * dth2 + 2.0 * dth3 + dth4)
        out_states[k + 1, 0] = u
        out_states[k + 1, 1] = v
        out_states[k + 1, 2] = th
        if elastic:
            out_tr[k + 1] = sq * u
            out_trp[k + 1] = sq * v
        else:
            out_tr[k + 1] = ahh * th
            out_trp[k + 1] = ahh * (-kahh * e1 - aah * th - bh * v)
        if max(abs(u), abs(v), abs(th)) > 1e12:
            return k + 1
    return nsteps
