# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the method-of-steps RK4 integrator.

Same contract as ``_stepper_py.run_mode``; selected by ``timesim`` when the
extension built.
"""
from libc.math cimport sqrt

COMPILED = True


def run_mode(
    int variant_code,
    double mu,
    double beta,
    double alpha,
    double a,
    double kappa,
    double tau,
    double dt,
    Py_ssize_t nsteps,
    Py_ssize_t m,
    double complex[::1] y0,
    double complex[::1] hist_grid,
    double complex[::1] hist_mid,
    double complex[:, ::1] out_states,
    double complex[::1] out_tr,
    double complex[::1] out_trp,
):
    """Integrate one mode over ``nsteps`` RK4 steps of size ``dt = tau/m``.

    See ``_stepper_py.run_mode`` for the full contract.
    """
    cdef double sq = sqrt(mu)
    cdef double ah = mu ** alpha
    cdef double ahh = mu ** (alpha / 2.0)
    cdef double bh = mu ** beta
    cdef double amu = a * mu
    cdef double aah = a * ah
    cdef double kahh = kappa * ahh
    cdef bint elastic = variant_code == 0
    cdef double complex u = y0[0]
    cdef double complex v = y0[1]
    cdef double complex th = y0[2]
    cdef double complex e0, eh, e1
    cdef double complex du1, dv1, dth1, du2, dv2, dth2
    cdef double complex du3, dv3, dth3, du4, dv4, dth4
    cdef double complex u2, v2, th2, u3, v3, th3, u4, v4, th4
    cdef Py_ssize_t k, kk

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
        if kk < 0:
            e0 = hist_grid[k]
        else:
            e0 = out_tr[kk]
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
        if abs(u) > 1e12 or abs(v) > 1e12 or abs(th) > 1e12:
            return k + 1
    return nsteps
