"""Fused pointwise kernels for the solver hot path.

The numpy implementations in material.py / hpr_system.py stay the semantic
reference; these numba kernels compute identical quantities in one pass per
node and are cross-checked against the numpy path in the test suite.  When
numba is unavailable the solver transparently falls back to numpy.
"""

from __future__ import annotations

import math

import numpy as np

try:
    import numba as nb

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @nb.njit(cache=True, parallel=True, fastmath=False)
    def hpr_flux_source(qn, gamma, cv, rho0, cs, alpha, T0, tau1, tau2, k0,
                        stiffened, need_flux, need_source):
        """Per-node fluxes F_x, F_y and relaxation source of the HPR system.

        qn: (N, 17) conserved states, C-contiguous.  Disabled outputs are
        returned as zeros without being computed.
        """
        N = qn.shape[0]
        Fx = np.zeros_like(qn)
        Fy = np.zeros_like(qn)
        S = np.zeros_like(qn)
        cs2 = cs * cs
        al2 = alpha * alpha
        gm1 = gamma - 1.0
        do_a = need_source and math.isfinite(tau1)
        do_j = need_source and math.isfinite(tau2) and alpha > 0.0
        for n in nb.prange(N):
            q = qn[n]
            rho = q[0]
            ir = 1.0 / rho
            u = q[1] * ir
            v = q[2] * ir
            w = q[3] * ir
            a11 = q[5]
            a12 = q[6]
            a13 = q[7]
            a21 = q[8]
            a22 = q[9]
            a23 = q[10]
            a31 = q[11]
            a32 = q[12]
            a33 = q[13]
            j1 = q[14] * ir
            j2 = q[15] * ir
            j3 = q[16] * ir
            # G = A^T A (symmetric), devG = G - tr(G)/3 I
            g11 = a11 * a11 + a21 * a21 + a31 * a31
            g12 = a11 * a12 + a21 * a22 + a31 * a32
            g13 = a11 * a13 + a21 * a23 + a31 * a33
            g22 = a12 * a12 + a22 * a22 + a32 * a32
            g23 = a12 * a13 + a22 * a23 + a32 * a33
            g33 = a13 * a13 + a23 * a23 + a33 * a33
            trg3 = (g11 + g22 + g33) / 3.0
            d11 = g11 - trg3
            d22 = g22 - trg3
            d33 = g33 - trg3
            if need_flux or do_j:
                devnorm = (d11 * d11 + d22 * d22 + d33 * d33
                           + 2.0 * (g12 * g12 + g13 * g13 + g23 * g23))
                E2 = 0.25 * cs2 * devnorm + 0.5 * al2 * (j1 * j1 + j2 * j2
                                                         + j3 * j3)
                E3 = 0.5 * (u * u + v * v + w * w)
                E1 = q[4] * ir - E2 - E3
                if stiffened:
                    core = E1 - k0 * ir
                    p = gm1 * rho * core - k0
                    T = core / cv
                else:
                    p = gm1 * rho * E1
                    T = E1 / cv
            else:
                p = 0.0
                T = 0.0
            if need_flux:
                rc = -rho * cs2
                s11 = rc * (g11 * d11 + g12 * g12 + g13 * g13)
                s12 = rc * (g11 * g12 + g12 * d22 + g13 * g23)
                s13 = rc * (g11 * g13 + g12 * g23 + g13 * d33)
                s22 = rc * (g12 * g12 + g22 * d22 + g23 * g23)
                s23 = rc * (g12 * g13 + g22 * g23 + g23 * d33)
                av1 = a11 * u + a12 * v + a13 * w
                av2 = a21 * u + a22 * v + a23 * w
                av3 = a31 * u + a32 * v + a33 * w
                Fx[n, 0] = q[1]
                Fx[n, 1] = q[1] * u + p - s11
                Fx[n, 2] = q[2] * u - s12
                Fx[n, 3] = q[3] * u - s13
                Fx[n, 4] = (u * (q[4] + p) - (u * s11 + v * s12 + w * s13)
                            + al2 * T * j1)
                Fx[n, 5] = av1
                Fx[n, 8] = av2
                Fx[n, 11] = av3
                Fx[n, 14] = q[14] * u + T
                Fx[n, 15] = q[15] * u
                Fx[n, 16] = q[16] * u
                Fy[n, 0] = q[2]
                Fy[n, 1] = q[1] * v - s12
                Fy[n, 2] = q[2] * v + p - s22
                Fy[n, 3] = q[3] * v - s23
                Fy[n, 4] = (v * (q[4] + p) - (u * s12 + v * s22 + w * s23)
                            + al2 * T * j2)
                Fy[n, 6] = av1
                Fy[n, 9] = av2
                Fy[n, 12] = av3
                Fy[n, 14] = q[14] * v
                Fy[n, 15] = q[15] * v + T
                Fy[n, 16] = q[16] * v
            if do_a:
                det = (a11 * (a22 * a33 - a23 * a32)
                       - a12 * (a21 * a33 - a23 * a31)
                       + a13 * (a21 * a32 - a22 * a31))
                fac = -3.0 / tau1 * det ** (5.0 / 3.0)
                S[n, 5] = fac * (a11 * d11 + a12 * g12 + a13 * g13)
                S[n, 6] = fac * (a11 * g12 + a12 * d22 + a13 * g23)
                S[n, 7] = fac * (a11 * g13 + a12 * g23 + a13 * d33)
                S[n, 8] = fac * (a21 * d11 + a22 * g12 + a23 * g13)
                S[n, 9] = fac * (a21 * g12 + a22 * d22 + a23 * g23)
                S[n, 10] = fac * (a21 * g13 + a22 * g23 + a23 * d33)
                S[n, 11] = fac * (a31 * d11 + a32 * g12 + a33 * g13)
                S[n, 12] = fac * (a31 * g12 + a32 * d22 + a33 * g23)
                S[n, 13] = fac * (a31 * g13 + a32 * g23 + a33 * d33)
            if do_j:
                cj = -(T / T0) * rho0 / tau2
                S[n, 14] = cj * j1
                S[n, 15] = cj * j2
                S[n, 16] = cj * j3
        return Fx, Fy, S


if HAVE_NUMBA:

    @nb.njit(cache=True, parallel=True, fastmath=False)
    def hpr_predictor_rhs(qh, D, idx, idy, gamma, cv, rho0, cs, alpha, T0,
                          tau1, tau2, k0, stiffened, with_source,
                          emit_flux, FxG, FyG):
        """rhs = -(dFx/dx + dFy/dy + B grad q) [+ S] at all space-time nodes.

        qh: (17, C, nt, n, n).  When emit_flux, the nodal fluxes are also
        written to the preallocated FxG/FyG (same shape as qh).
        """
        V, C, nt, n, _ = qh.shape
        rhs = np.empty_like(qh)
        cs2 = cs * cs
        al2 = alpha * alpha
        gm1 = gamma - 1.0
        do_a = with_source and math.isfinite(tau1)
        do_j = with_source and math.isfinite(tau2) and alpha > 0.0
        fxC = np.empty((C, nt, n, n, 17))
        fyC = np.empty((C, nt, n, n, 17))
        velC = np.empty((C, nt, n, n, 3))
        srcC = np.zeros((C, nt, n, n, 17))
        for c in nb.prange(C):
            fx = fxC[c]
            fy = fyC[c]
            vel = velC[c]
            src = srcC[c]
            for a in range(nt):
                for i in range(n):
                    for e in range(n):
                        rho = qh[0, c, a, i, e]
                        ir = 1.0 / rho
                        m1 = qh[1, c, a, i, e]
                        m2 = qh[2, c, a, i, e]
                        m3 = qh[3, c, a, i, e]
                        En = qh[4, c, a, i, e]
                        u = m1 * ir
                        v = m2 * ir
                        w = m3 * ir
                        a11 = qh[5, c, a, i, e]
                        a12 = qh[6, c, a, i, e]
                        a13 = qh[7, c, a, i, e]
                        a21 = qh[8, c, a, i, e]
                        a22 = qh[9, c, a, i, e]
                        a23 = qh[10, c, a, i, e]
                        a31 = qh[11, c, a, i, e]
                        a32 = qh[12, c, a, i, e]
                        a33 = qh[13, c, a, i, e]
                        rj1 = qh[14, c, a, i, e]
                        rj2 = qh[15, c, a, i, e]
                        rj3 = qh[16, c, a, i, e]
                        j1 = rj1 * ir
                        j2 = rj2 * ir
                        j3 = rj3 * ir
                        vel[a, i, e, 0] = u
                        vel[a, i, e, 1] = v
                        vel[a, i, e, 2] = w
                        g11 = a11 * a11 + a21 * a21 + a31 * a31
                        g12 = a11 * a12 + a21 * a22 + a31 * a32
                        g13 = a11 * a13 + a21 * a23 + a31 * a33
                        g22 = a12 * a12 + a22 * a22 + a32 * a32
                        g23 = a12 * a13 + a22 * a23 + a32 * a33
                        g33 = a13 * a13 + a23 * a23 + a33 * a33
                        trg3 = (g11 + g22 + g33) / 3.0
                        d11 = g11 - trg3
                        d22 = g22 - trg3
                        d33 = g33 - trg3
                        devnorm = (d11 * d11 + d22 * d22 + d33 * d33
                                   + 2.0 * (g12 * g12 + g13 * g13
                                            + g23 * g23))
                        E2 = (0.25 * cs2 * devnorm
                              + 0.5 * al2 * (j1 * j1 + j2 * j2 + j3 * j3))
                        E3 = 0.5 * (u * u + v * v + w * w)
                        E1 = En * ir - E2 - E3
                        if stiffened:
                            core = E1 - k0 * ir
                            p = gm1 * rho * core - k0
                            T = core / cv
                        else:
                            p = gm1 * rho * E1
                            T = E1 / cv
                        rc = -rho * cs2
                        s11 = rc * (g11 * d11 + g12 * g12 + g13 * g13)
                        s12 = rc * (g11 * g12 + g12 * d22 + g13 * g23)
                        s13 = rc * (g11 * g13 + g12 * g23 + g13 * d33)
                        s22 = rc * (g12 * g12 + g22 * d22 + g23 * g23)
                        s23 = rc * (g12 * g13 + g22 * g23 + g23 * d33)
                        av1 = a11 * u + a12 * v + a13 * w
                        av2 = a21 * u + a22 * v + a23 * w
                        av3 = a31 * u + a32 * v + a33 * w
                        fx[a, i, e, 0] = m1
                        fx[a, i, e, 1] = m1 * u + p - s11
                        fx[a, i, e, 2] = m2 * u - s12
                        fx[a, i, e, 3] = m3 * u - s13
                        fx[a, i, e, 4] = (u * (En + p)
                                          - (u * s11 + v * s12 + w * s13)
                                          + al2 * T * j1)
                        fx[a, i, e, 5] = av1
                        fx[a, i, e, 6] = 0.0
                        fx[a, i, e, 7] = 0.0
                        fx[a, i, e, 8] = av2
                        fx[a, i, e, 9] = 0.0
                        fx[a, i, e, 10] = 0.0
                        fx[a, i, e, 11] = av3
                        fx[a, i, e, 12] = 0.0
                        fx[a, i, e, 13] = 0.0
                        fx[a, i, e, 14] = rj1 * u + T
                        fx[a, i, e, 15] = rj2 * u
                        fx[a, i, e, 16] = rj3 * u
                        fy[a, i, e, 0] = m2
                        fy[a, i, e, 1] = m1 * v - s12
                        fy[a, i, e, 2] = m2 * v + p - s22
                        fy[a, i, e, 3] = m3 * v - s23
                        fy[a, i, e, 4] = (v * (En + p)
                                          - (u * s12 + v * s22 + w * s23)
                                          + al2 * T * j2)
                        fy[a, i, e, 5] = 0.0
                        fy[a, i, e, 6] = av1
                        fy[a, i, e, 7] = 0.0
                        fy[a, i, e, 8] = 0.0
                        fy[a, i, e, 9] = av2
                        fy[a, i, e, 10] = 0.0
                        fy[a, i, e, 11] = 0.0
                        fy[a, i, e, 12] = av3
                        fy[a, i, e, 13] = 0.0
                        fy[a, i, e, 14] = rj1 * v
                        fy[a, i, e, 15] = rj2 * v + T
                        fy[a, i, e, 16] = rj3 * v
                        if do_a:
                            det = (a11 * (a22 * a33 - a23 * a32)
                                   - a12 * (a21 * a33 - a23 * a31)
                                   + a13 * (a21 * a32 - a22 * a31))
                            fac = -3.0 / tau1 * det ** (5.0 / 3.0)
                            src[a, i, e, 5] = fac * (a11 * d11 + a12 * g12
                                                     + a13 * g13)
                            src[a, i, e, 6] = fac * (a11 * g12 + a12 * d22
                                                     + a13 * g23)
                            src[a, i, e, 7] = fac * (a11 * g13 + a12 * g23
                                                     + a13 * d33)
                            src[a, i, e, 8] = fac * (a21 * d11 + a22 * g12
                                                     + a23 * g13)
                            src[a, i, e, 9] = fac * (a21 * g12 + a22 * d22
                                                     + a23 * g23)
                            src[a, i, e, 10] = fac * (a21 * g13 + a22 * g23
                                                      + a23 * d33)
                            src[a, i, e, 11] = fac * (a31 * d11 + a32 * g12
                                                      + a33 * g13)
                            src[a, i, e, 12] = fac * (a31 * g12 + a32 * d22
                                                      + a33 * g23)
                            src[a, i, e, 13] = fac * (a31 * g13 + a32 * g23
                                                      + a33 * d33)
                        if do_j:
                            cj = -(T / T0) * rho0 / tau2
                            src[a, i, e, 14] = cj * j1
                            src[a, i, e, 15] = cj * j2
                            src[a, i, e, 16] = cj * j3
            if emit_flux:
                for a in range(nt):
                    for i in range(n):
                        for e in range(n):
                            for r in range(17):
                                FxG[r, c, a, i, e] = fx[a, i, e, r]
                                FyG[r, c, a, i, e] = fy[a, i, e, r]
            for a in range(nt):
                for i in range(n):
                    for e in range(n):
                        u = vel[a, i, e, 0]
                        v = vel[a, i, e, 1]
                        w = vel[a, i, e, 2]
                        for r in range(17):
                            acc = 0.0
                            for m in range(n):
                                acc += (D[i, m] * fx[a, m, e, r] * idx
                                        + D[e, m] * fy[a, i, m, r] * idy)
                            rhs[r, c, a, i, e] = -acc + src[a, i, e, r]
                        # non-conservative bracket on the A rows
                        for irow in range(3):
                            gx0 = 0.0
                            gx1 = 0.0
                            gx2 = 0.0
                            gy0 = 0.0
                            gy1 = 0.0
                            gy2 = 0.0
                            for m in range(n):
                                gx0 += D[i, m] * qh[5 + 3 * irow, c, a, m, e]
                                gx1 += D[i, m] * qh[6 + 3 * irow, c, a, m, e]
                                gx2 += D[i, m] * qh[7 + 3 * irow, c, a, m, e]
                                gy0 += D[e, m] * qh[5 + 3 * irow, c, a, i, m]
                                gy1 += D[e, m] * qh[6 + 3 * irow, c, a, i, m]
                                gy2 += D[e, m] * qh[7 + 3 * irow, c, a, i, m]
                            gx0 *= idx
                            gx1 *= idx
                            gx2 *= idx
                            gy0 *= idy
                            gy1 *= idy
                            gy2 *= idy
                            sx = u * gx0 + v * gx1 + w * gx2
                            sy = u * gy0 + v * gy1 + w * gy2
                            base = 5 + 3 * irow
                            rhs[base, c, a, i, e] -= (u * gx0 - sx) + v * gy0
                            rhs[base + 1, c, a, i, e] -= u * gx1 + (v * gy1
                                                                    - sy)
                            rhs[base + 2, c, a, i, e] -= u * gx2 + v * gy2
        return rhs

    @nb.njit(cache=True, parallel=True, fastmath=False)
    def hpr_newton_residual(q, b, KW, dt, gamma, cv, rho0, cs, alpha, T0,
                            tau1, tau2, k0, stiffened):
        """R = q[5:17] - dt KW (x) S(q)[5:17] - b[5:17] per cell.

        q, b: (17, C, nt, n, n); returns (12, C, nt, n, n) plus max |R|.
        """
        V, C, nt, n, _ = q.shape
        R = np.empty((12, C, nt, n, n))
        cs2 = cs * cs
        al2 = alpha * alpha
        gm1 = gamma - 1.0
        do_a = math.isfinite(tau1)
        do_j = math.isfinite(tau2) and alpha > 0.0
        rmax_arr = np.zeros(C)
        srcC = np.zeros((C, nt, n, n, 12))
        for c in nb.prange(C):
            src = srcC[c]
            for a in range(nt):
                for i in range(n):
                    for e in range(n):
                        rho = q[0, c, a, i, e]
                        ir = 1.0 / rho
                        a11 = q[5, c, a, i, e]
                        a12 = q[6, c, a, i, e]
                        a13 = q[7, c, a, i, e]
                        a21 = q[8, c, a, i, e]
                        a22 = q[9, c, a, i, e]
                        a23 = q[10, c, a, i, e]
                        a31 = q[11, c, a, i, e]
                        a32 = q[12, c, a, i, e]
                        a33 = q[13, c, a, i, e]
                        g11 = a11 * a11 + a21 * a21 + a31 * a31
                        g12 = a11 * a12 + a21 * a22 + a31 * a32
                        g13 = a11 * a13 + a21 * a23 + a31 * a33
                        g22 = a12 * a12 + a22 * a22 + a32 * a32
                        g23 = a12 * a13 + a22 * a23 + a32 * a33
                        g33 = a13 * a13 + a23 * a23 + a33 * a33
                        trg3 = (g11 + g22 + g33) / 3.0
                        d11 = g11 - trg3
                        d22 = g22 - trg3
                        d33 = g33 - trg3
                        if do_a:
                            det = (a11 * (a22 * a33 - a23 * a32)
                                   - a12 * (a21 * a33 - a23 * a31)
                                   + a13 * (a21 * a32 - a22 * a31))
                            fac = -3.0 / tau1 * det ** (5.0 / 3.0)
                            src[a, i, e, 0] = fac * (a11 * d11 + a12 * g12
                                                     + a13 * g13)
                            src[a, i, e, 1] = fac * (a11 * g12 + a12 * d22
                                                     + a13 * g23)
                            src[a, i, e, 2] = fac * (a11 * g13 + a12 * g23
                                                     + a13 * d33)
                            src[a, i, e, 3] = fac * (a21 * d11 + a22 * g12
                                                     + a23 * g13)
                            src[a, i, e, 4] = fac * (a21 * g12 + a22 * d22
                                                     + a23 * g23)
                            src[a, i, e, 5] = fac * (a21 * g13 + a22 * g23
                                                     + a23 * d33)
                            src[a, i, e, 6] = fac * (a31 * d11 + a32 * g12
                                                     + a33 * g13)
                            src[a, i, e, 7] = fac * (a31 * g12 + a32 * d22
                                                     + a33 * g23)
                            src[a, i, e, 8] = fac * (a31 * g13 + a32 * g23
                                                     + a33 * d33)
                        if do_j:
                            j1 = q[14, c, a, i, e] * ir
                            j2 = q[15, c, a, i, e] * ir
                            j3 = q[16, c, a, i, e] * ir
                            devnorm = (d11 * d11 + d22 * d22 + d33 * d33
                                       + 2.0 * (g12 * g12 + g13 * g13
                                                + g23 * g23))
                            E2 = (0.25 * cs2 * devnorm
                                  + 0.5 * al2 * (j1 * j1 + j2 * j2
                                                 + j3 * j3))
                            u = q[1, c, a, i, e] * ir
                            v = q[2, c, a, i, e] * ir
                            w = q[3, c, a, i, e] * ir
                            E1 = (q[4, c, a, i, e] * ir
                                  - E2 - 0.5 * (u * u + v * v + w * w))
                            if stiffened:
                                T = (E1 - k0 * ir) / cv
                            else:
                                T = E1 / cv
                            cj = -(T / T0) * rho0 / tau2
                            src[a, i, e, 9] = cj * j1
                            src[a, i, e, 10] = cj * j2
                            src[a, i, e, 11] = cj * j3
            cmax = 0.0
            for a in range(nt):
                for i in range(n):
                    for e in range(n):
                        for r in range(12):
                            acc = 0.0
                            for bb in range(nt):
                                acc += KW[a, bb] * src[bb, i, e, r]
                            val = (q[5 + r, c, a, i, e] - dt * acc
                                   - b[5 + r, c, a, i, e])
                            R[r, c, a, i, e] = val
                            if abs(val) > cmax:
                                cmax = abs(val)
            rmax_arr[c] = cmax
        return R, rmax_arr

    @nb.njit(cache=True, parallel=True, fastmath=False)
    def hpr_mode_solve(R, Vre, Vim, Wre, Wim, invre, invim):
        """dX = (V (I - dt kappa Jbar)^-1 V^-1) R on the source rows.

        R: (12, C, nt, n, n); invre/invim: (nt, C, 12, 12) per-mode inverses;
        Vre/Vim, Wre/Wim: (nt, nt) eigenvector matrix of KW and its inverse.
        """
        V12, C, nt, n, _ = R.shape
        dX = np.empty_like(R)
        yreC = np.empty((C, nt, 12))
        yimC = np.empty((C, nt, 12))
        zreC = np.empty((C, nt, 12))
        zimC = np.empty((C, nt, 12))
        for c in nb.prange(C):
            yre = yreC[c]
            yim = yimC[c]
            zre = zreC[c]
            zim = zimC[c]
            for i in range(n):
                for e in range(n):
                    for a in range(nt):
                        for r in range(12):
                            sre = 0.0
                            sim = 0.0
                            for bb in range(nt):
                                rv = R[r, c, bb, i, e]
                                sre += Wre[a, bb] * rv
                                sim += Wim[a, bb] * rv
                            yre[a, r] = sre
                            yim[a, r] = sim
                    for a in range(nt):
                        for r in range(12):
                            sre = 0.0
                            sim = 0.0
                            for s in range(12):
                                are = invre[a, c, r, s]
                                aim = invim[a, c, r, s]
                                sre += are * yre[a, s] - aim * yim[a, s]
                                sim += are * yim[a, s] + aim * yre[a, s]
                            zre[a, r] = sre
                            zim[a, r] = sim
                    for a in range(nt):
                        for r in range(12):
                            acc = 0.0
                            for bb in range(nt):
                                acc += (Vre[a, bb] * zre[bb, r]
                                        - Vim[a, bb] * zim[bb, r])
                            dX[r, c, a, i, e] = acc
        return dX
