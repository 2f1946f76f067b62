"""Compiled element kernels.

States are flat ``u[n, d + 4]`` arrays; ``prim`` caches per-node quantities
(column layout below) so that two-point fluxes only combine them. Element
loops are parallel over elements and each iteration writes only its own
DOFs, so results do not depend on the thread count.
"""

import numba
import numpy as np
from numba import njit, prange

# skip probing an outdated TBB runtime, which only produces a warning
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

CP, EC = 0, 1
SURF_HLLC, SURF_CP, SURF_EC = 0, 1, 2
LOG_MEAN_SWITCH = 1e-4

# prim columns: rho, v (d), p, Gamma, Pi, rhoE, log rho, z, log z, 1/Gamma, p_inf, c


@njit(cache=True)
def _log_mean(a, b, la, lb):
    if abs(b / a - 1.0) < LOG_MEAN_SWITCH:
        f = (b - a) / (a + b)
        u = f * f
        return 0.5 * (a + b) / (1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u / 7.0)))
    return (b - a) / (lb - la)


@njit(cache=True, parallel=True)
def primitives(u, d):
    n = u.shape[0]
    out = np.empty((n, d + 11))
    for m in prange(n):
        rho = u[m, 0]
        ke = 0.0
        for a in range(d):
            v = u[m, 1 + a] / rho
            out[m, 1 + a] = v
            ke += u[m, 1 + a] * v
        rhoE = u[m, d + 1]
        G = u[m, d + 2]
        Pi = u[m, d + 3]
        rhoe = rhoE - 0.5 * ke
        p = (rhoe - Pi) / G
        pinf = Pi / (G + 1.0)
        w = G / rho * (p + pinf)
        z = 1.0 / w
        gamma = (G + 1.0) / G
        out[m, 0] = rho
        out[m, d + 1] = p
        out[m, d + 2] = G
        out[m, d + 3] = Pi
        out[m, d + 4] = rhoE
        out[m, d + 5] = np.log(rho)
        out[m, d + 6] = z
        out[m, d + 7] = np.log(z)
        out[m, d + 8] = 1.0 / G
        out[m, d + 9] = pinf
        out[m, d + 10] = np.sqrt(gamma * (p + pinf) / rho)
    return out


# {{{ two-point fluxes

@njit(cache=True)
def _two_point(flavor, qa, qb, nrm, d, h):
    """Symmetric conservative flux ``h(a, b, n)`` into ``h[0:d+2]``."""
    vn = 0.0
    for a in range(d):
        vn += 0.5 * (qa[1 + a] + qb[1 + a]) * nrm[a]
    if flavor == CP:
        rho = 0.5 * (qa[0] + qb[0])
        p = 0.5 * (qa[d + 1] + qb[d + 1])
        E = 0.5 * (qa[d + 4] + qb[d + 4])
        h[0] = rho * vn
        for a in range(d):
            h[1 + a] = h[0] * 0.5 * (qa[1 + a] + qb[1 + a]) + p * nrm[a]
        h[d + 1] = (E + p) * vn
    else:
        rho_hat = _log_mean(qa[0], qb[0], qa[d + 5], qb[d + 5])
        z_hat = _log_mean(qa[d + 6], qb[d + 6], qa[d + 7], qb[d + 7])
        pbar = (0.5 * (qa[0] + qb[0]) * 0.5 * (qa[d + 8] + qb[d + 8])
                / (0.5 * (qa[d + 6] + qb[d + 6])))
        pinf = 0.5 * (qa[d + 9] + qb[d + 9])
        h[0] = rho_hat * vn
        vv = 0.0
        for a in range(d):
            h[1 + a] = h[0] * 0.5 * (qa[1 + a] + qb[1 + a]) + (pbar - pinf) * nrm[a]
            vv += qa[1 + a] * qb[1 + a]
        h[d + 1] = (1.0 / z_hat + 0.5 * vv) * h[0] + pbar * vn


@njit(cache=True)
def _phys_flux(q, nrm, d, f):
    vn = 0.0
    for a in range(d):
        vn += q[1 + a] * nrm[a]
    f[0] = q[0] * vn
    for a in range(d):
        f[1 + a] = f[0] * q[1 + a] + q[d + 1] * nrm[a]
    f[d + 1] = (q[d + 4] + q[d + 1]) * vn
    f[d + 2] = 0.0
    f[d + 3] = 0.0


@njit(cache=True)
def _add_pair(R, ra, rb, ca, cb, qa, qb, nrm, d, h):
    """Add ``ca * Dtilde(a, b)`` to row ``ra`` and ``cb * Dtilde(b, a)`` to row ``rb``."""
    for m in range(d + 2):
        R[ra, m] += ca * 2.0 * h[m]
        R[rb, m] += cb * 2.0 * h[m]
    vna = 0.0
    vnb = 0.0
    for a in range(d):
        vna += qa[1 + a] * nrm[a]
        vnb += qb[1 + a] * nrm[a]
    dG = qb[d + 2] - qa[d + 2]
    dP = qb[d + 3] - qa[d + 3]
    R[ra, d + 2] += ca * vna * dG
    R[ra, d + 3] += ca * vna * dP
    R[rb, d + 2] -= cb * vnb * dG
    R[rb, d + 3] -= cb * vnb * dP

# }}}


# {{{ volume terms

@njit(cache=True, parallel=True)
def volume_1d(prim, D, w, flavor, K, P, R):
    d = 1
    for e in prange(K):
        h = np.empty(d + 2)
        nrm = np.ones(1)
        base = e * P
        for i in range(P):
            for k in range(i, P):
                _two_point(flavor, prim[base + i], prim[base + k], nrm, d, h)
                if k == i:
                    _add_pair(R, base + i, base + i, w[i] * D[i, i], 0.0,
                              prim[base + i], prim[base + i], nrm, d, h)
                else:
                    _add_pair(R, base + i, base + k, w[i] * D[i, k], w[k] * D[k, i],
                              prim[base + i], prim[base + k], nrm, d, h)


@njit(cache=True, parallel=True)
def volume_2d(prim, D, w, ja_xi, ja_eta, flavor, K, P, R):
    d = 2
    for e in prange(K):
        h = np.empty(d + 2)
        nrm = np.empty(2)
        base = e * P * P
        for j in range(P):
            for i in range(P):
                ra = base + i * P + j
                for k in range(i, P):
                    rb = base + k * P + j
                    nrm[0] = 0.5 * (ja_xi[e, i, j, 0] + ja_xi[e, k, j, 0])
                    nrm[1] = 0.5 * (ja_xi[e, i, j, 1] + ja_xi[e, k, j, 1])
                    _two_point(flavor, prim[ra], prim[rb], nrm, d, h)
                    if k == i:
                        _add_pair(R, ra, ra, w[i] * w[j] * D[i, i], 0.0,
                                  prim[ra], prim[ra], nrm, d, h)
                    else:
                        _add_pair(R, ra, rb, w[i] * w[j] * D[i, k], w[k] * w[j] * D[k, i],
                                  prim[ra], prim[rb], nrm, d, h)
        for i in range(P):
            for j in range(P):
                ra = base + i * P + j
                for k in range(j, P):
                    rb = base + i * P + k
                    nrm[0] = 0.5 * (ja_eta[e, i, j, 0] + ja_eta[e, i, k, 0])
                    nrm[1] = 0.5 * (ja_eta[e, i, j, 1] + ja_eta[e, i, k, 1])
                    _two_point(flavor, prim[ra], prim[rb], nrm, d, h)
                    if k == j:
                        _add_pair(R, ra, ra, w[i] * w[j] * D[j, j], 0.0,
                                  prim[ra], prim[ra], nrm, d, h)
                    else:
                        _add_pair(R, ra, rb, w[i] * w[j] * D[j, k], w[i] * w[k] * D[k, j],
                                  prim[ra], prim[rb], nrm, d, h)

# }}}


# {{{ interface terms

@njit(cache=True)
def ghost_state(u_in, bc, nrm, farfield, d, out):
    """Exterior state for boundary code ``bc`` (1 inflow, 2 copy, 3 symmetry)."""
    if bc == 1:
        for m in range(d + 4):
            out[m] = farfield[m]
        return
    for m in range(d + 4):
        out[m] = u_in[m]
    if bc == 3:
        mn = 0.0
        for a in range(d):
            mn += u_in[1 + a] * nrm[a]
        for a in range(d):
            out[1 + a] = u_in[1 + a] - 2.0 * mn * nrm[a]


@njit(cache=True)
def _prim_one(u, d, q):
    rho = u[0]
    ke = 0.0
    for a in range(d):
        q[1 + a] = u[1 + a] / rho
        ke += u[1 + a] * q[1 + a]
    G = u[d + 2]
    Pi = u[d + 3]
    p = (u[d + 1] - 0.5 * ke - Pi) / G
    pinf = Pi / (G + 1.0)
    z = rho / (G * (p + pinf))
    q[0] = rho
    q[d + 1] = p
    q[d + 2] = G
    q[d + 3] = Pi
    q[d + 4] = u[d + 1]
    q[d + 5] = np.log(rho)
    q[d + 6] = z
    q[d + 7] = np.log(z)
    q[d + 8] = 1.0 / G
    q[d + 9] = pinf
    q[d + 10] = np.sqrt((G + 1.0) / G * (p + pinf) / rho)


@njit(cache=True)
def wave_speeds(qL, qR, nrm, d):
    """``(sL, sR, s*)`` with the direct estimates and the HLLC contact speed."""
    unL = 0.0
    unR = 0.0
    for a in range(d):
        unL += qL[1 + a] * nrm[a]
        unR += qR[1 + a] * nrm[a]
    rL, pL = qL[0], qL[d + 1]
    rR, pR = qR[0], qR[d + 1]
    gL = (qL[d + 2] + 1.0) / qL[d + 2]
    gR = (qR[d + 2] + 1.0) / qR[d + 2]
    gam = max(gL, gR)
    cL = np.sqrt(gam * (pL + qL[d + 9]) / rL)
    cR = np.sqrt(gam * (pR + qR[d + 9]) / rR)
    k = 0.5 * (gam + 1.0)
    du = unL - unR
    if pR >= pL:
        ctL = cL + k * max((pR - pL) / (rR * cR) + du, 0.0)
        ctR = cR + k * max((pL - pR) / (rL * ctL) + du, 0.0)
    else:
        ctR = cR + k * max((pL - pR) / (rL * cL) + du, 0.0)
        ctL = cL + k * max((pR - pL) / (rR * ctR) + du, 0.0)
    sL = unL - ctL
    sR = unR + ctR
    QL = rL * (unL - sL)
    QR = rR * (sR - unR)
    Q = QL + QR
    if Q < 1e-12 * max(abs(QL), abs(QR)) + 1e-300:
        ss = 0.5 * (unL + unR)
    else:
        ss = (QL * unL + QR * unR + pL - pR) / Q
    return sL, sR, ss


@njit(cache=True)
def hllc_dminus(uL, uR, qL, qR, nrm, d, out, fL, fR):
    """HLLC ``D-(uL, uR, n)``."""
    sL, sR, ss = wave_speeds(qL, qR, nrm, d)
    for m in range(d + 4):
        out[m] = 0.0
    if sL >= 0.0:
        return
    unL = 0.0
    unR = 0.0
    for a in range(d):
        unL += qL[1 + a] * nrm[a]
        unR += qR[1 + a] * nrm[a]
    if ss >= 0.0:
        # sL (u*_L - u_L)
        QL = qL[0] * (unL - sL)
        rs = qL[0] * (unL - sL) / (ss - sL)
        Es = qL[d + 4] / qL[0] + (ss - unL) * (ss - qL[d + 1] / QL)
        out[0] = sL * (rs - uL[0])
        for a in range(d):
            out[1 + a] = sL * (rs * (qL[1 + a] + (ss - unL) * nrm[a]) - uL[1 + a])
        out[d + 1] = sL * (rs * Es - uL[d + 1])
        return
    _phys_flux(qL, nrm, d, fL)
    _phys_flux(qR, nrm, d, fR)
    for m in range(d + 2):
        out[m] = fR[m] - fL[m]
    out[d + 2] = ss * (uR[d + 2] - uL[d + 2])
    out[d + 3] = ss * (uR[d + 3] - uL[d + 3])
    if sR > 0.0:
        QR = qR[0] * (sR - unR)
        rs = qR[0] * (unR - sR) / (ss - sR)
        Es = qR[d + 4] / qR[0] + (ss - unR) * (ss + qR[d + 1] / QR)
        out[0] -= sR * (uR[0] - rs)
        for a in range(d):
            out[1 + a] -= sR * (uR[1 + a] - rs * (qR[1 + a] + (ss - unR) * nrm[a]))
        out[d + 1] -= sR * (uR[d + 1] - rs * Es)


@njit(cache=True)
def two_point_dminus(flavor, qL, qR, nrm, d, out, fL, h):
    """``D-(uL, uR, n) = h - f(uL).n + d-`` for a two-point flux."""
    _two_point(flavor, qL, qR, nrm, d, h)
    _phys_flux(qL, nrm, d, fL)
    for m in range(d + 2):
        out[m] = h[m] - fL[m]
    vn = 0.0
    for a in range(d):
        vn += qL[1 + a] * nrm[a]
    out[d + 2] = 0.5 * vn * (qR[d + 2] - qL[d + 2])
    out[d + 3] = 0.5 * vn * (qR[d + 3] - qL[d + 3])


@njit(cache=True, parallel=True)
def surface(u, prim, fn_in, fn_ext, fn_bc, fn_n, fn_w, farfield, surf, d, R):
    K, nfe = fn_in.shape
    nv = d + 4
    for e in prange(K):
        ug = np.empty(nv)
        qg = np.empty(d + 11)
        out = np.empty(nv)
        f1 = np.empty(nv)
        f2 = np.empty(nv)
        for s in range(nfe):
            a = fn_in[e, s]
            b = fn_ext[e, s]
            nrm = fn_n[e, s]
            if b >= 0:
                ub = u[b]
                qb = prim[b]
            else:
                ghost_state(u[a], fn_bc[e, s], nrm, farfield, d, ug)
                _prim_one(ug, d, qg)
                ub = ug
                qb = qg
            if surf == SURF_HLLC:
                hllc_dminus(u[a], ub, prim[a], qb, nrm, d, out, f1, f2)
            else:
                two_point_dminus(surf - 1, prim[a], qb, nrm, d, out, f1, f2)
            for m in range(nv):
                R[a, m] += fn_w[e, s] * out[m]

# }}}


# {{{ time step

@njit(cache=True, parallel=True)
def dt_conditions(u, prim, fn_in, fn_ext, fn_ext_elem, fn_bc, fn_n, fn_w, fn_ratio,
                  farfield, d, P, lam_factor, volB):
    """Return ``(max rate of condition A, per-node rate of condition B, lambda*)``.

    ``volB`` holds the volume part of condition B per node; the interface
    part is added here.
    """
    K, nfe = fn_in.shape
    npe = u.shape[0] // K
    lam = np.zeros(K)
    for e in prange(K):
        ug = np.empty(d + 4)
        qg = np.empty(d + 11)
        m = 0.0
        for r in range(e * npe, (e + 1) * npe):
            vv = 0.0
            for a in range(d):
                vv += prim[r, 1 + a] ** 2
            m = max(m, np.sqrt(vv) + prim[r, d + 10])
        for s in range(nfe):
            b = fn_ext[e, s]
            if b >= 0:
                qb = prim[b]
            else:
                ghost_state(u[fn_in[e, s]], fn_bc[e, s], fn_n[e, s], farfield, d, ug)
                _prim_one(ug, d, qg)
                qb = qg
            vv = 0.0
            for a in range(d):
                vv += qb[1 + a] ** 2
            m = max(m, np.sqrt(vv) + qb[d + 10])
        lam[e] = lam_factor * m

    rateA = np.zeros(K)
    surfB = np.zeros(u.shape[0])
    for e in prange(K):
        ug = np.empty(d + 4)
        qg = np.empty(d + 11)
        ra = 0.0
        for s in range(nfe):
            a = fn_in[e, s]
            b = fn_ext[e, s]
            nrm = fn_n[e, s]
            lam_out = 0.0
            if b >= 0:
                qb = prim[b]
                lam_out = lam[fn_ext_elem[e, s]]
            else:
                ghost_state(u[a], fn_bc[e, s], nrm, farfield, d, ug)
                _prim_one(ug, d, qg)
                qb = qg
            sL, sR, ss = wave_speeds(prim[a], qb, nrm, d)
            speed = max(max(abs(sL), abs(sR)), max(lam[e], lam_out))
            ra = max(ra, fn_ratio[e, s] * speed)
            surfB[a] -= fn_w[e, s] * min(ss, 0.0)
        rateA[e] = ra
    return rateA, surfB, lam


@njit(cache=True, parallel=True)
def volume_B_1d(prim, D, w, K, P, out):
    for e in prange(K):
        base = e * P
        for i in range(P):
            acc = 0.0
            for k in range(P):
                acc += w[k] * D[k, i] * prim[base + k, 1]
            out[base + i] = acc


@njit(cache=True, parallel=True)
def volume_B_2d(prim, D, w, ja_xi, ja_eta, K, P, out):
    for e in prange(K):
        base = e * P * P
        for i in range(P):
            for j in range(P):
                acc = 0.0
                for k in range(P):
                    r = base + k * P + j
                    n0 = 0.5 * (ja_xi[e, i, j, 0] + ja_xi[e, k, j, 0])
                    n1 = 0.5 * (ja_xi[e, i, j, 1] + ja_xi[e, k, j, 1])
                    acc += w[k] * w[j] * D[k, i] * (prim[r, 1] * n0 + prim[r, 2] * n1)
                    r = base + i * P + k
                    n0 = 0.5 * (ja_eta[e, i, j, 0] + ja_eta[e, i, k, 0])
                    n1 = 0.5 * (ja_eta[e, i, j, 1] + ja_eta[e, i, k, 1])
                    acc += w[k] * w[i] * D[k, j] * (prim[r, 1] * n0 + prim[r, 2] * n1)
                out[base + i * P + j] = acc

# }}}


# {{{ limiter

@njit(cache=True)
def _scale(u, avg, lo, hi, col, theta):
    for r in range(lo, hi):
        u[r, col] = avg[col] + theta * (u[r, col] - avg[col])


@njit(cache=True)
def _scale_steps(u, avg, lo, hi, col, theta, joint):
    if joint:
        for m in range(u.shape[1]):
            _scale(u, avg, lo, hi, m, theta)
    else:
        _scale(u, avg, lo, hi, col, theta)


@njit(cache=True, parallel=True)
def limit(u, mass, K, d, eps, mG, MG, mP, MP, tol, joint, thetas, status):
    """Scaling limiters in the order rho, Gamma, Pi, rho e.

    With ``joint`` the density and EOS-parameter steps scale every
    component, which keeps uniform pressure and velocity uniform.

    ``thetas[e]`` receives the four coefficients; ``status[e]`` is nonzero
    when the cell average itself violates a bound (1 rho, 2 Gamma, 3 Pi,
    4 rho e).
    """
    npe = u.shape[0] // K
    nv = d + 4
    for e in prange(K):
        lo = e * npe
        hi = lo + npe
        avg = np.zeros(nv)
        vol = 0.0
        for r in range(lo, hi):
            vol += mass[r]
            for m in range(nv):
                avg[m] += mass[r] * u[r, m]
        for m in range(nv):
            avg[m] /= vol
        for t in range(4):
            thetas[e, t] = 1.0
        status[e] = 0

        # density
        if not avg[0] > eps:
            status[e] = 1
            continue
        rmin = u[lo, 0]
        for r in range(lo, hi):
            rmin = min(rmin, u[r, 0])
        if rmin < eps:
            th = min((avg[0] - eps) / (avg[0] - rmin), 1.0)
            thetas[e, 0] = th
            _scale_steps(u, avg, lo, hi, 0, th, joint)

        # Gamma and Pi
        for t, col, mY, MY in ((1, d + 2, mG, MG), (2, d + 3, mP, MP)):
            A = avg[col]
            slack = tol * max(1.0, abs(MY))
            if A < mY - slack or A > MY + slack:
                status[e] = 1 + t
                break
            if A < mY or A > MY:
                # average on a bound up to round-off: project onto it
                Ac = min(max(A, mY), MY)
                thetas[e, t] = 0.0
                for r in range(lo, hi):
                    u[r, col] = Ac
                avg[col] = Ac
                continue
            ymin = u[lo, col]
            ymax = u[lo, col]
            for r in range(lo, hi):
                ymin = min(ymin, u[r, col])
                ymax = max(ymax, u[r, col])
            th = 1.0
            if ymin < mY:
                th = min(th, max(A - mY, 0.0) / (A - ymin))
            if ymax > MY:
                th = min(th, max(MY - A, 0.0) / (ymax - A))
            if th < 1.0:
                thetas[e, t] = th
                _scale_steps(u, avg, lo, hi, col, th, joint)
            if ymin < mY or ymax > MY:
                # theta may round to 1 for tiny violations
                for r in range(lo, hi):
                    u[r, col] = min(max(u[r, col], mY), MY)
        if status[e] != 0:
            continue

        # internal energy, with p_inf from the limited Gamma and Pi
        ke = 0.0
        for a in range(d):
            ke += avg[1 + a] * avg[1 + a]
        rhoe_avg = avg[d + 1] - 0.5 * ke / avg[0]
        th = 1.0
        for r in range(lo, hi):
            pinf = u[r, d + 3] / (u[r, d + 2] + 1.0)
            ke = 0.0
            for a in range(d):
                ke += u[r, 1 + a] * u[r, 1 + a]
            rhoe = u[r, d + 1] - 0.5 * ke / u[r, 0]
            if rhoe < pinf + eps:
                num = rhoe_avg - pinf - eps
                if num < 0.0:
                    status[e] = 4
                    break
                th = min(th, num / (rhoe_avg - rhoe))
        if status[e] != 0:
            continue
        if th < 1.0:
            thetas[e, 3] = th
            for col in range(d + 2):
                _scale(u, avg, lo, hi, col, th)

# }}}
