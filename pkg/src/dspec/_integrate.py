"""Adaptive RKF45 kernels for -y'' + (V(x) - lambda) y = 0 on (0, pi).

V(x) = q(x) + lf2/x^2 + lF2/(pi-x)^2 with lf2 = l_f(l_f+1), lF2 = l_F(l_F+1).
The state (y, y') is renormalized whenever its magnitude leaves [1e-8, 1e8];
the accumulated log of the scale factors rides along so true values are
y * exp(logscale).  Everything here is numba-jitted; keep the surface dumb
(flat float arrays in, flat float arrays out).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

PI = math.pi

# potential encodings
QK_ZERO, QK_CONST, QK_COS, QK_POLY, QK_SPLINE = 0, 1, 2, 3, 4

_RENORM_HI = 1.0e8
_RENORM_LO = 1.0e-8
_MAX_STEPS = 4_000_000


@njit(cache=True)
def _veval(x, qkind, qpar, qknots, qcoefs, lf2, lF2):
    if qkind == QK_ZERO:
        q = 0.0
    elif qkind == QK_CONST:
        q = qpar[0]
    elif qkind == QK_COS:
        q = qpar[0] * math.cos(qpar[1] * x)
    elif qkind == QK_POLY:
        q = 0.0
        for i in range(qpar.shape[0] - 1, -1, -1):
            q = q * x + qpar[i]
    else:
        m = qknots.shape[0]
        j = np.searchsorted(qknots, x) - 1
        if j < 0:
            j = 0
        elif j > m - 2:
            j = m - 2
        dx = x - qknots[j]
        q = ((qcoefs[0, j] * dx + qcoefs[1, j]) * dx + qcoefs[2, j]) * dx + qcoefs[3, j]
    if lf2 != 0.0:
        q += lf2 / (x * x)
    if lF2 != 0.0:
        d = PI - x
        q += lF2 / (d * d)
    return q


@njit(cache=True)
def _integrate_one(lam, x0, y0, z0, ls0, xs,
                   qkind, qpar, qknots, qcoefs, lf2, lF2,
                   rtol, atol, ys, zs, lss):
    """March from x0 through the targets xs (monotone toward xs[-1]).

    Fills ys/zs/lss at each target.  Returns 0 on success, 1 on step underflow,
    2 on step-count blowup.
    """
    x = x0
    y = y0
    z = z0
    ls = ls0
    T = xs.shape[0]
    if T == 0:
        return 0
    direction = 1.0 if xs[T - 1] >= x0 else -1.0
    span = abs(xs[T - 1] - x0)
    if span == 0.0:
        span = 1.0
    hnat = min(1.0e-4, 0.1 * span)
    nsteps = 0
    for j in range(T):
        xt = xs[j]
        while (xt - x) * direction > 1e-15 * (1.0 + abs(x)):
            nsteps += 1
            if nsteps > _MAX_STEPS:
                return 2
            dist = abs(xt - x)
            h = hnat
            clipped = False
            if h >= dist:
                h = dist
                clipped = True
            hs = h * direction

            # RKF45 stages
            k1y = z
            k1z = (_veval(x, qkind, qpar, qknots, qcoefs, lf2, lF2) - lam) * y

            xa = x + 0.25 * hs
            ya = y + hs * 0.25 * k1y
            za = z + hs * 0.25 * k1z
            k2y = za
            k2z = (_veval(xa, qkind, qpar, qknots, qcoefs, lf2, lF2) - lam) * ya

            xa = x + 0.375 * hs
            ya = y + hs * (3.0 / 32.0 * k1y + 9.0 / 32.0 * k2y)
            za = z + hs * (3.0 / 32.0 * k1z + 9.0 / 32.0 * k2z)
            k3y = za
            k3z = (_veval(xa, qkind, qpar, qknots, qcoefs, lf2, lF2) - lam) * ya

            xa = x + (12.0 / 13.0) * hs
            ya = y + hs * (1932.0 / 2197.0 * k1y - 7200.0 / 2197.0 * k2y + 7296.0 / 2197.0 * k3y)
            za = z + hs * (1932.0 / 2197.0 * k1z - 7200.0 / 2197.0 * k2z + 7296.0 / 2197.0 * k3z)
            k4y = za
            k4z = (_veval(xa, qkind, qpar, qknots, qcoefs, lf2, lF2) - lam) * ya

            xa = x + hs
            ya = y + hs * (439.0 / 216.0 * k1y - 8.0 * k2y + 3680.0 / 513.0 * k3y - 845.0 / 4104.0 * k4y)
            za = z + hs * (439.0 / 216.0 * k1z - 8.0 * k2z + 3680.0 / 513.0 * k3z - 845.0 / 4104.0 * k4z)
            k5y = za
            k5z = (_veval(xa, qkind, qpar, qknots, qcoefs, lf2, lF2) - lam) * ya

            xa = x + 0.5 * hs
            ya = y + hs * (-8.0 / 27.0 * k1y + 2.0 * k2y - 3544.0 / 2565.0 * k3y
                           + 1859.0 / 4104.0 * k4y - 11.0 / 40.0 * k5y)
            za = z + hs * (-8.0 / 27.0 * k1z + 2.0 * k2z - 3544.0 / 2565.0 * k3z
                           + 1859.0 / 4104.0 * k4z - 11.0 / 40.0 * k5z)
            k6y = za
            k6z = (_veval(xa, qkind, qpar, qknots, qcoefs, lf2, lF2) - lam) * ya

            y5 = y + hs * (16.0 / 135.0 * k1y + 6656.0 / 12825.0 * k3y
                           + 28561.0 / 56430.0 * k4y - 9.0 / 50.0 * k5y + 2.0 / 55.0 * k6y)
            z5 = z + hs * (16.0 / 135.0 * k1z + 6656.0 / 12825.0 * k3z
                           + 28561.0 / 56430.0 * k4z - 9.0 / 50.0 * k5z + 2.0 / 55.0 * k6z)

            ey = hs * (1.0 / 360.0 * k1y - 128.0 / 4275.0 * k3y - 2197.0 / 75240.0 * k4y
                       + 1.0 / 50.0 * k5y + 2.0 / 55.0 * k6y)
            ez = hs * (1.0 / 360.0 * k1z - 128.0 / 4275.0 * k3z - 2197.0 / 75240.0 * k4z
                       + 1.0 / 50.0 * k5z + 2.0 / 55.0 * k6z)

            sy = atol + rtol * max(abs(y), abs(y5))
            sz = atol + rtol * max(abs(z), abs(z5))
            err = max(abs(ey) / sy, abs(ez) / sz)

            if err <= 1.0:
                x = x + hs
                y = y5
                z = z5
                s = max(abs(y), abs(z))
                if s > _RENORM_HI or (0.0 < s < _RENORM_LO):
                    y /= s
                    z /= s
                    ls += math.log(s)
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = 0.9 * err ** -0.2
                    if fac > 5.0:
                        fac = 5.0
                    elif fac < 0.2:
                        fac = 0.2
                if not clipped:
                    hnat = h * fac
            else:
                fac = 0.9 * err ** -0.2
                if fac < 0.1:
                    fac = 0.1
                hnat = h * fac
                if hnat < 1e-14 * (1.0 + abs(x)):
                    return 1
        ys[j] = y
        zs[j] = z
        lss[j] = ls
    return 0


@njit(cache=True)
def integrate_batch(lams, x0, y0s, z0s, ls0s, xs,
                    qkind, qpar, qknots, qcoefs, lf2, lF2, rtol, atol):
    """Independent adaptive integrations for each lambda in the batch."""
    B = lams.shape[0]
    T = xs.shape[0]
    ys = np.empty((B, T))
    zs = np.empty((B, T))
    lss = np.empty((B, T))
    status = np.zeros(B, dtype=np.int64)
    for b in range(B):
        status[b] = _integrate_one(lams[b], x0, y0s[b], z0s[b], ls0s[b], xs,
                                   qkind, qpar, qknots, qcoefs, lf2, lF2,
                                   rtol, atol, ys[b], zs[b], lss[b])
    return ys, zs, lss, status
