"""Fused numba kernel for the augmented Lagrangian and its vertex gradient.

Mirrors :func:`tgv_normal.admm.lagrangian._lagrangian_numpy` line by line;
the two are checked against each other in the test suite.  Returns a status
code instead of raising: 0 ok, 1 degenerate triangle, 2 antipodal normals,
3 an edge whose bending angle turned by more than ``max_turn``.
"""

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

OK, DEGENERATE, ANTIPODAL, FOLD = 0, 1, 2, 3


def _fused(x, data, tri, edge_tris, edge_local, tri_edge_sign, tri_edges, plus_sign,
           coeff, d0, lam0, ref_n, ref_plus, z_tri, k_tri, g_edge, k_edge,
           ref_theta, max_turn, tau, edge_weight, rho0, rho1, rho2, tv_mode, need_grad,
           degeneracy, antipodal):
    F = tri.shape[0]
    E = edge_tris.shape[0]
    V = x.shape[0]
    grad = np.zeros((V, 3))

    P = np.empty((F, 3, 3))
    A2 = np.empty(F)
    n = np.empty((F, 3))
    L = np.empty((F, 3))
    eh = np.empty((F, 3, 3))
    mu = np.empty((F, 3, 3))
    cot = np.empty((F, 3))
    sumL2 = 0.0
    for f in range(F):
        for k in range(3):
            for i in range(3):
                P[f, k, i] = x[tri[f, k], i]
        ux = P[f, 1, 0] - P[f, 0, 0]
        uy = P[f, 1, 1] - P[f, 0, 1]
        uz = P[f, 1, 2] - P[f, 0, 2]
        wx = P[f, 2, 0] - P[f, 0, 0]
        wy = P[f, 2, 1] - P[f, 0, 1]
        wz = P[f, 2, 2] - P[f, 0, 2]
        Nx = uy * wz - uz * wy
        Ny = uz * wx - ux * wz
        Nz = ux * wy - uy * wx
        a2 = np.sqrt(Nx * Nx + Ny * Ny + Nz * Nz)
        A2[f] = a2
        if a2 == 0.0:
            return DEGENERATE, 0.0, grad
        n[f, 0] = Nx / a2
        n[f, 1] = Ny / a2
        n[f, 2] = Nz / a2
        for k in range(3):
            k1 = (k + 1) % 3
            k2 = (k + 2) % 3
            ln = 0.0
            for i in range(3):
                e = P[f, k2, i] - P[f, k1, i]
                eh[f, k, i] = e
                ln += e * e
            ln = np.sqrt(ln)
            L[f, k] = ln
            sumL2 += ln * ln
            for i in range(3):
                eh[f, k, i] /= ln
            mu[f, k, 0] = eh[f, k, 1] * n[f, 2] - eh[f, k, 2] * n[f, 1]
            mu[f, k, 1] = eh[f, k, 2] * n[f, 0] - eh[f, k, 0] * n[f, 2]
            mu[f, k, 2] = eh[f, k, 0] * n[f, 1] - eh[f, k, 1] * n[f, 0]
            d = 0.0
            for i in range(3):
                d += (P[f, k1, i] - P[f, k, i]) * (P[f, k2, i] - P[f, k, i])
            cot[f, k] = d / a2
    meanL2 = sumL2 / (3.0 * F)
    for f in range(F):
        if not (0.5 * A2[f] >= degeneracy * meanL2):
            return DEGENERATE, 0.0, grad
    lo = -1.0 + antipodal
    for e in range(E):
        tp = edge_tris[e, 0]
        tm = edge_tris[e, 1]
        c = n[tp, 0] * n[tm, 0] + n[tp, 1] * n[tm, 1] + n[tp, 2] * n[tm, 2]
        if c < lo:
            return ANTIPODAL, 0.0, grad
        s = n[tm, 0] * mu[tp, edge_local[e, 0], 0] + n[tm, 1] * mu[tp, edge_local[e, 0], 1] \
            + n[tm, 2] * mu[tp, edge_local[e, 0], 2]
        if abs(np.arctan2(s, c) - ref_theta[e]) > max_turn:
            return FOLD, 0.0, grad
        if not tv_mode:
            c = n[tp, 0] * ref_plus[e, 0] + n[tp, 1] * ref_plus[e, 1] + n[tp, 2] * ref_plus[e, 2]
            if c < lo:
                return ANTIPODAL, 0.0, grad
    if not tv_mode:
        for f in range(F):
            c = n[f, 0] * ref_n[f, 0] + n[f, 1] * ref_n[f, 1] + n[f, 2] * ref_n[f, 2]
            if c < lo:
                return ANTIPODAL, 0.0, grad

    g_A2 = np.zeros(F)
    g_n = np.zeros((F, 3))
    g_L = np.zeros((F, 3))
    g_eh = np.zeros((F, 3, 3))
    g_mu = np.zeros((F, 3, 3))
    g_cot = np.zeros((F, 3))
    g_P = np.zeros((F, 3, 3))

    val = 0.0
    for v in range(V):
        for i in range(3):
            dlt = x[v, i] - data[v, i]
            val += 0.5 * dlt * dlt
            grad[v, i] = dlt
    for f in range(F):
        val += tau * 2.0 / A2[f]
        g_A2[f] = -2.0 * tau / (A2[f] * A2[f])

    # ---- first-order edge term -------------------------------------------
    for e in range(E):
        tp = edge_tris[e, 0]
        tm = edge_tris[e, 1]
        kp = edge_local[e, 0]
        km = edge_local[e, 1]
        lenE = L[tp, kp]
        s = 0.0
        c = 0.0
        for i in range(3):
            s += n[tm, i] * mu[tp, kp, i]
            c += n[tm, i] * n[tp, i]
        theta = np.arctan2(s, c)
        c1 = coeff[e, 0]
        R0 = theta + c1 * 0.5 * (cot[tp, kp] + cot[tm, km]) - d0[e]
        br = edge_weight * abs(d0[e]) + lam0[e] * R0 + 0.5 * rho0 * R0 * R0
        val += lenE * br
        g_L[tp, kp] += br
        g_r0 = lenE * (lam0[e] + rho0 * R0)
        den = s * s + c * c
        g_s = g_r0 * c / den
        g_c = -g_r0 * s / den
        for i in range(3):
            g_n[tm, i] += g_s * mu[tp, kp, i] + g_c * n[tp, i]
            g_n[tp, i] += g_c * n[tm, i]
            g_mu[tp, kp, i] += g_s * n[tm, i]
        g_cot[tp, kp] += 0.5 * g_r0 * c1
        g_cot[tm, km] += 0.5 * g_r0 * c1

    if not tv_mode:
        # ---- per-triangle vectors, Jacobian term, half-edge values ----------
        vv = np.empty((F, 3, 3))
        tc1 = np.empty((F, 3))
        tc2 = np.empty((F, 3))
        w = np.zeros((F, 3, 2, 3))
        Q = np.empty((F, 3, 2, 3))
        g_v = np.zeros((F, 3, 3))
        for f in range(F):
            for k in range(3):
                ed = tri_edges[f, k]
                tc1[f, k] = coeff[ed, 0]
                tc2[f, k] = tri_edge_sign[f, k] * coeff[ed, 1]
                for i in range(3):
                    vv[f, k, i] = tc1[f, k] * mu[f, k, i] + tc2[f, k] * eh[f, k, i]
            a0 = vv[f, 0, 0] + vv[f, 1, 0] + vv[f, 2, 0]
            a1 = vv[f, 0, 1] + vv[f, 1, 1] + vv[f, 2, 1]
            a2_ = vv[f, 0, 2] + vv[f, 1, 2] + vv[f, 2, 2]
            rT = 1.0 + n[f, 0] * ref_n[f, 0] + n[f, 1] * ref_n[f, 1] + n[f, 2] * ref_n[f, 2]
            qT = n[f, 0] * z_tri[f, 0] + n[f, 1] * z_tri[f, 1] + n[f, 2] * z_tri[f, 2]
            Mz0 = z_tri[f, 0] - (n[f, 0] + ref_n[f, 0]) * qT / rT
            Mz1 = z_tri[f, 1] - (n[f, 1] + ref_n[f, 1]) * qT / rT
            Mz2 = z_tri[f, 2] - (n[f, 2] + ref_n[f, 2]) * qT / rT
            aa = a0 * a0 + a1 * a1 + a2_ * a2_
            val += 0.5 * (a0 * Mz0 + a1 * Mz1 + a2_ * Mz2) + 0.5 * rho1 * aa / A2[f] \
                + 0.5 * A2[f] * k_tri[f]
            # backward of the triangle term
            ga0 = 0.5 * Mz0 + rho1 * a0 / A2[f]
            ga1 = 0.5 * Mz1 + rho1 * a1 / A2[f]
            ga2 = 0.5 * Mz2 + rho1 * a2_ / A2[f]
            g_A2[f] += -0.5 * rho1 * aa / (A2[f] * A2[f]) + 0.5 * k_tri[f]
            go0 = 0.5 * a0
            go1 = 0.5 * a1
            go2 = 0.5 * a2_
            go_u = go0 * (n[f, 0] + ref_n[f, 0]) + go1 * (n[f, 1] + ref_n[f, 1]) \
                + go2 * (n[f, 2] + ref_n[f, 2])
            cq = qT / rT
            cu = go_u / rT
            cr = go_u * qT / (rT * rT)
            g_n[f, 0] += -go0 * cq - z_tri[f, 0] * cu + ref_n[f, 0] * cr
            g_n[f, 1] += -go1 * cq - z_tri[f, 1] * cu + ref_n[f, 1] * cr
            g_n[f, 2] += -go2 * cq - z_tri[f, 2] * cu + ref_n[f, 2] * cr
            for k in range(3):
                g_v[f, k, 0] += ga0
                g_v[f, k, 1] += ga1
                g_v[f, k, 2] += ga2
            for j in range(3):
                for m in range(2):
                    cj = (j + 1 + m) % 3
                    for k in range(3):
                        q = 0.0
                        for i in range(3):
                            q += (P[f, cj, i] - P[f, k, i]) * eh[f, j, i]
                        Q[f, j, m, k] = q
                        for i in range(3):
                            w[f, j, m, i] += vv[f, k, i] * q / A2[f]

        # ---- jumps ----------------------------------------------------------
        g_w = np.zeros((F, 3, 2, 3))
        wp = np.empty(3)
        wm = np.empty(3)
        J = np.empty(3)
        gE = np.empty(3)
        gJ = np.empty(3)
        for e in range(E):
            tp = edge_tris[e, 0]
            tm = edge_tris[e, 1]
            kp = edge_local[e, 0]
            km = edge_local[e, 1]
            sp = plus_sign[e]
            sm = -sp
            lenE = L[tp, kp]
            rE = 1.0 + n[tp, 0] * ref_plus[e, 0] + n[tp, 1] * ref_plus[e, 1] \
                + n[tp, 2] * ref_plus[e, 2]
            gn_u0 = 0.0
            gn_u1 = 0.0
            gn_u2 = 0.0
            g_r = 0.0
            gq_y0 = 0.0
            gq_y1 = 0.0
            gq_y2 = 0.0
            gmm0 = 0.0
            gmm1 = 0.0
            gmm2 = 0.0
            gmp0 = 0.0
            gmp1 = 0.0
            gmp2 = 0.0
            for ii in range(2):
                mp = ii if sp > 0 else 1 - ii
                mm = ii if sm > 0 else 1 - ii
                alpha = 0.0
                for i in range(3):
                    wp[i] = sp * w[tp, kp, mp, i]
                    wm[i] = sm * w[tm, km, mm, i]
                    alpha += wm[i] * mu[tm, km, i]
                qE = 0.0
                for i in range(3):
                    J[i] = wm[i] - alpha * (mu[tm, km, i] + mu[tp, kp, i]) - wp[i]
                    qE += n[tp, i] * g_edge[e, ii, i]
                gJdot = 0.0
                JJ = 0.0
                for i in range(3):
                    gE[i] = g_edge[e, ii, i] - (n[tp, i] + ref_plus[e, i]) * qE / rE
                    gJdot += gE[i] * J[i]
                    JJ += J[i] * J[i]
                br = gJdot + 0.5 * rho2 * JJ + k_edge[e, ii]
                val += 0.5 * lenE * br
                g_L[tp, kp] += 0.5 * br
                # transport backward (g_gE = lenE/2 * J)
                go_u = 0.0
                for i in range(3):
                    go_u += 0.5 * lenE * J[i] * (n[tp, i] + ref_plus[e, i])
                gn_u0 += -0.5 * lenE * J[0] * qE / rE
                gn_u1 += -0.5 * lenE * J[1] * qE / rE
                gn_u2 += -0.5 * lenE * J[2] * qE / rE
                gq_y0 += -go_u / rE * g_edge[e, ii, 0]
                gq_y1 += -go_u / rE * g_edge[e, ii, 1]
                gq_y2 += -go_u / rE * g_edge[e, ii, 2]
                g_r += go_u * qE / (rE * rE)
                # jump backward
                S = 0.0
                for i in range(3):
                    gJ[i] = 0.5 * lenE * (gE[i] + rho2 * J[i])
                    S += gJ[i] * (mu[tm, km, i] + mu[tp, kp, i])
                for i in range(3):
                    g_w[tp, kp, mp, i] += sp * (-gJ[i])
                    g_w[tm, km, mm, i] += sm * (gJ[i] - S * mu[tm, km, i])
                gmm0 += -alpha * gJ[0] - S * wm[0]
                gmm1 += -alpha * gJ[1] - S * wm[1]
                gmm2 += -alpha * gJ[2] - S * wm[2]
                gmp0 += -alpha * gJ[0]
                gmp1 += -alpha * gJ[1]
                gmp2 += -alpha * gJ[2]
            g_n[tp, 0] += gn_u0 + gq_y0 + g_r * ref_plus[e, 0]
            g_n[tp, 1] += gn_u1 + gq_y1 + g_r * ref_plus[e, 1]
            g_n[tp, 2] += gn_u2 + gq_y2 + g_r * ref_plus[e, 2]
            g_mu[tm, km, 0] += gmm0
            g_mu[tm, km, 1] += gmm1
            g_mu[tm, km, 2] += gmm2
            g_mu[tp, kp, 0] += gmp0
            g_mu[tp, kp, 1] += gmp1
            g_mu[tp, kp, 2] += gmp2

        # ---- backward of half-edge values -----------------------------------
        for f in range(F):
            ia2 = 1.0 / A2[f]
            for j in range(3):
                for m in range(2):
                    cj = (j + 1 + m) % 3
                    gww = 0.0
                    for i in range(3):
                        gww += g_w[f, j, m, i] * w[f, j, m, i]
                    g_A2[f] -= gww * ia2
                    for k in range(3):
                        gq = 0.0
                        for i in range(3):
                            g_v[f, k, i] += g_w[f, j, m, i] * Q[f, j, m, k] * ia2
                            gq += g_w[f, j, m, i] * vv[f, k, i]
                        gq *= ia2
                        for i in range(3):
                            g_P[f, cj, i] += gq * eh[f, j, i]
                            g_P[f, k, i] -= gq * eh[f, j, i]
                            g_eh[f, j, i] += gq * (P[f, cj, i] - P[f, k, i])
            for k in range(3):
                for i in range(3):
                    g_mu[f, k, i] += tc1[f, k] * g_v[f, k, i]
                    g_eh[f, k, i] += tc2[f, k] * g_v[f, k, i]

    if not need_grad:
        return OK, val, grad

    # ---- backward through the triangle frames --------------------------------
    for f in range(F):
        a2 = A2[f]
        gn0 = g_n[f, 0]
        gn1 = g_n[f, 1]
        gn2 = g_n[f, 2]
        ga2 = g_A2[f]
        for k in range(3):
            # mu = eh x n
            gm0 = g_mu[f, k, 0]
            gm1 = g_mu[f, k, 1]
            gm2 = g_mu[f, k, 2]
            e0 = eh[f, k, 0]
            e1 = eh[f, k, 1]
            e2 = eh[f, k, 2]
            ge0 = g_eh[f, k, 0] + n[f, 1] * gm2 - n[f, 2] * gm1
            ge1 = g_eh[f, k, 1] + n[f, 2] * gm0 - n[f, 0] * gm2
            ge2 = g_eh[f, k, 2] + n[f, 0] * gm1 - n[f, 1] * gm0
            gn0 += gm1 * e2 - gm2 * e1
            gn1 += gm2 * e0 - gm0 * e2
            gn2 += gm0 * e1 - gm1 * e0
            # cot
            k1 = (k + 1) % 3
            k2 = (k + 2) % 3
            gc = g_cot[f, k] / a2
            for i in range(3):
                u = P[f, k1, i] - P[f, k, i]
                ww = P[f, k2, i] - P[f, k, i]
                g_P[f, k1, i] += gc * ww
                g_P[f, k2, i] += gc * u
                g_P[f, k, i] -= gc * (u + ww)
            ga2 -= g_cot[f, k] * cot[f, k] / a2
            # eh = e / L
            dot = e0 * ge0 + e1 * ge1 + e2 * ge2
            ln = L[f, k]
            gl = g_L[f, k]
            gv0 = (ge0 - e0 * dot) / ln + e0 * gl
            gv1 = (ge1 - e1 * dot) / ln + e1 * gl
            gv2 = (ge2 - e2 * dot) / ln + e2 * gl
            g_P[f, k2, 0] += gv0
            g_P[f, k2, 1] += gv1
            g_P[f, k2, 2] += gv2
            g_P[f, k1, 0] -= gv0
            g_P[f, k1, 1] -= gv1
            g_P[f, k1, 2] -= gv2
        # n = N / A2
        dot = n[f, 0] * gn0 + n[f, 1] * gn1 + n[f, 2] * gn2
        gN0 = (gn0 - n[f, 0] * dot) / a2 + n[f, 0] * ga2
        gN1 = (gn1 - n[f, 1] * dot) / a2 + n[f, 1] * ga2
        gN2 = (gn2 - n[f, 2] * dot) / a2 + n[f, 2] * ga2
        U0 = P[f, 1, 0] - P[f, 0, 0]
        U1 = P[f, 1, 1] - P[f, 0, 1]
        U2 = P[f, 1, 2] - P[f, 0, 2]
        W0 = P[f, 2, 0] - P[f, 0, 0]
        W1 = P[f, 2, 1] - P[f, 0, 1]
        W2 = P[f, 2, 2] - P[f, 0, 2]
        gU0 = W1 * gN2 - W2 * gN1
        gU1 = W2 * gN0 - W0 * gN2
        gU2 = W0 * gN1 - W1 * gN0
        gW0 = gN1 * U2 - gN2 * U1
        gW1 = gN2 * U0 - gN0 * U2
        gW2 = gN0 * U1 - gN1 * U0
        g_P[f, 1, 0] += gU0
        g_P[f, 1, 1] += gU1
        g_P[f, 1, 2] += gU2
        g_P[f, 2, 0] += gW0
        g_P[f, 2, 1] += gW1
        g_P[f, 2, 2] += gW2
        g_P[f, 0, 0] -= gU0 + gW0
        g_P[f, 0, 1] -= gU1 + gW1
        g_P[f, 0, 2] -= gU2 + gW2
        for k in range(3):
            vtx = tri[f, k]
            for i in range(3):
                grad[vtx, i] += g_P[f, k, i]
    return OK, val, grad


fused_lagrangian = numba.njit(cache=True)(_fused) if numba is not None else None
