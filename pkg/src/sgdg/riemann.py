"""
Interface Riemann solvers
-------------------------

HLLC with fluctuations for the nonconservative Gamma/Pi transport, the direct
wave-speed estimates that bound the exact fan for stiffened gases, a Rusanov
flux and an exact two-stiffened-gas Riemann solver used as a reference.

All HLLC routines broadcast over leading axes; states carry ``d + 4``
components and ``n`` is a unit normal.

.. autoclass:: HllcBreakdown
.. autofunction:: wave_speed_estimates
.. autofunction:: hllc_breakdown
.. autofunction:: hllc_fluctuations
.. autofunction:: rusanov_flux
.. autoclass:: ExactRiemannSolution
.. autofunction:: exact_riemann
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sgdg.errors import AdmissibilityError, InterlacingError, VacuumError
from sgdg.fluctuations import FluctuationPair
from sgdg.thermo import (
    check_admissible, conserved_from_primitive, gamma_pinf, internal_energy,
    physical_flux_normal, unpack)


def _normal_fields(u, n):
    rho, mom, rhoE, Gamma, Pi = unpack(u)
    vel = mom / rho[..., None]
    p = (internal_energy(u) - Pi) / Gamma
    gamma, pinf = gamma_pinf(Gamma, Pi)
    un = np.sum(vel * n, axis=-1)
    return rho, vel, un, p, rhoE, gamma, pinf


def wave_speed_estimates(uL, uR, n, check: bool = True):
    """Direct estimates ``(sL, sR)`` bounding the exact wave fan."""
    uL, uR, n = (np.asarray(a, dtype=float) for a in (uL, uR, n))
    if check:
        check_admissible(uL, "uL")
        check_admissible(uR, "uR")
    rL, _, unL, pL, _, gL, piL = _normal_fields(uL, n)
    rR, _, unR, pR, _, gR, piR = _normal_fields(uR, n)
    gam = np.maximum(gL, gR)
    cL = np.sqrt(gam * (pL + piL) / rL)
    cR = np.sqrt(gam * (pR + piR) / rR)
    k = 0.5 * (gam + 1.0)
    du = unL - unR

    # branch p_R >= p_L: inflate the left speed first
    ctL_a = cL + k * np.maximum((pR - pL) / (rR * cR) + du, 0.0)
    ctR_a = cR + k * np.maximum((pL - pR) / (rL * ctL_a) + du, 0.0)
    # otherwise: right speed first
    ctR_b = cR + k * np.maximum((pL - pR) / (rL * cL) + du, 0.0)
    ctL_b = cL + k * np.maximum((pR - pL) / (rR * ctR_b) + du, 0.0)

    first = pR >= pL
    ctL = np.where(first, ctL_a, ctL_b)
    ctR = np.where(first, ctR_a, ctR_b)
    if np.any(~np.isfinite(ctL)) or np.any(~np.isfinite(ctR)):
        raise AdmissibilityError("non-finite wave speed estimate")
    return unL - ctL, unR + ctR


@dataclass(frozen=True)
class HllcBreakdown:
    sL: np.ndarray
    sStar: np.ndarray
    sR: np.ndarray
    pStar: np.ndarray
    QL: np.ndarray
    QR: np.ndarray
    starL: np.ndarray
    starR: np.ndarray


def hllc_breakdown(uL, uR, n, check: bool = True) -> HllcBreakdown:
    """Signal speeds, star pressure, mass fluxes and the two star states."""
    uL, uR, n = (np.asarray(a, dtype=float) for a in (uL, uR, n))
    sL, sR = wave_speed_estimates(uL, uR, n, check=check)
    rL, vL, unL, pL, EL, _, _ = _normal_fields(uL, n)
    rR, vR, unR, pR, ER, _, _ = _normal_fields(uR, n)
    QL = rL * (unL - sL)
    QR = rR * (sR - unR)
    Q = QL + QR

    degenerate = Q < 1e-12 * np.maximum(np.abs(QL), np.abs(QR)) + 1e-300
    Qs = np.where(degenerate, 1.0, Q)
    pstar = np.where(degenerate, 0.5 * (pL + pR),
                     (QL * pR + QR * pL + QR * QL * (unL - unR)) / Qs)
    sstar = np.where(degenerate, 0.5 * (unL + unR),
                     (QL * unL + QR * unR + pL - pR) / Qs)

    if check and not (np.all(sL < sstar) and np.all(sstar < sR)):
        raise InterlacingError("HLLC speeds violate sL < s* < sR")

    d = vL.shape[-1]
    shape = np.broadcast_shapes(uL.shape, uR.shape, n.shape[:-1] + (d + 4,))

    def star(u, r, v, un, p, E_vol, s, Qx, sign):
        rs = r * (un - s) / (sstar - s)
        Es = E_vol / r + (sstar - un) * (sstar + sign * p / Qx)
        vs = v + (sstar - un)[..., None] * n
        out = np.empty(shape)
        out[..., 0] = rs
        out[..., 1:d + 1] = rs[..., None] * vs
        out[..., d + 1] = rs * Es
        out[..., d + 2:] = np.broadcast_to(u[..., d + 2:], shape[:-1] + (2,))
        return out

    starL = star(uL, rL, vL, unL, pL, EL, sL, QL, -1.0)
    starR = star(uR, rR, vR, unR, pR, ER, sR, QR, +1.0)
    return HllcBreakdown(sL=sL, sStar=sstar, sR=sR, pStar=pstar, QL=QL, QR=QR,
                         starL=starL, starR=starR)


def hllc_fluctuations(uL, uR, n, check: bool = True,
                      breakdown: HllcBreakdown | None = None) -> FluctuationPair:
    """HLLC fluctuations ``(D-, D+)`` from the four-branch case split."""
    uL, uR, n = (np.asarray(a, dtype=float) for a in (uL, uR, n))
    b = breakdown if breakdown is not None else hllc_breakdown(uL, uR, n, check=check)
    d = uL.shape[-1] - 4
    fL = physical_flux_normal(uL, n)
    fR = physical_flux_normal(uR, n)
    shape = np.broadcast_shapes(fL.shape, fR.shape)

    nc = np.zeros(shape)
    nc[..., d + 2] = b.sStar * (uR[..., d + 2] - uL[..., d + 2])
    nc[..., d + 3] = b.sStar * (uR[..., d + 3] - uL[..., d + 3])

    sL, ss, sR = (x[..., None] for x in (b.sL, b.sStar, b.sR))
    jumpL = sL * (b.starL - uL)           # f*_L - f_L
    jumpR = sR * (uR - b.starR)           # f_R - f*_R
    full = fR - fL + nc

    zero = np.zeros(shape)
    b1, b2, b3 = sL >= 0.0, ss >= 0.0, sR > 0.0
    dminus = np.where(b1, zero, np.where(b2, jumpL, np.where(b3, full - jumpR, full)))
    dplus = np.where(b1, full, np.where(b2, full - jumpL, np.where(b3, jumpR, zero)))
    return FluctuationPair(dminus=dminus, dplus=dplus)


def rusanov_flux(uL, uR, n, lam) -> np.ndarray:
    """Local Lax-Friedrichs flux on the conservative rows; Gamma/Pi rows are zero."""
    uL, uR, n = (np.asarray(a, dtype=float) for a in (uL, uR, n))
    check_admissible(uL, "uL")
    check_admissible(uR, "uR")
    d = uL.shape[-1] - 4
    flux = 0.5 * (physical_flux_normal(uL, n) + physical_flux_normal(uR, n))
    flux[..., :d + 2] -= 0.5 * np.asarray(lam)[..., None] * (uR - uL)[..., :d + 2]
    return flux


# {{{ exact solver

@dataclass(frozen=True)
class _Side:
    rho: float
    u: float
    vt: np.ndarray
    p: float
    gamma: float
    pinf: float
    Gamma: float
    Pi: float

    @property
    def P(self):
        return self.p + self.pinf

    @property
    def c(self):
        return np.sqrt(self.gamma * self.P / self.rho)

    def wave(self, p):
        """Velocity change function and its derivative for a star pressure ``p``."""
        g, P, Ps = self.gamma, self.P, p + self.pinf
        if Ps > P:
            A = 2.0 / ((g + 1.0) * self.rho)
            B = (g - 1.0) / (g + 1.0) * P
            root = np.sqrt(A / (Ps + B))
            return (Ps - P) * root, root * (1.0 - 0.5 * (Ps - P) / (Ps + B))
        ratio = max(Ps / P, 0.0)
        f = 2.0 * self.c / (g - 1.0) * (ratio ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = ratio ** (-(g + 1.0) / (2.0 * g)) / (self.rho * self.c) if ratio > 0 else np.inf
        return f, df


def _side(u, n) -> _Side:
    rho, vel, un, p, _, gamma, pinf = _normal_fields(u, n)
    Gamma, Pi = u[-2], u[-1]
    return _Side(float(rho), float(un), vel - un * n, float(p), float(gamma),
                 float(pinf), float(Gamma), float(Pi))


@dataclass(frozen=True)
class ExactRiemannSolution:
    """Self-similar solution of a two-stiffened-gas Riemann problem along ``n``."""

    left: _Side
    right: _Side
    n: np.ndarray
    pstar: float
    ustar: float

    def sample(self, xi) -> np.ndarray:
        """Conservative states at similarity coordinates ``xi = x/t``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        d = self.n.shape[0]
        out = np.empty(xi.shape + (d + 4,))
        for m, s in enumerate(xi):
            out[m] = self._state(s)
        return out

    def _state(self, s):
        if s <= self.ustar:
            side, sign = self.left, 1.0
        else:
            side, sign = self.right, -1.0
        rho, u, P = self._sample_side(side, s, sign)
        vel = side.vt + u * self.n
        return conserved_from_primitive(rho, vel, P - side.pinf, side.Gamma, side.Pi)

    def _sample_side(self, K: _Side, s, sign):
        # sign = +1 for the left wave, -1 for the right wave (mirror)
        g, P, c = K.gamma, K.P, K.c
        Ps = self.pstar + K.pinf
        gm, gp = g - 1.0, g + 1.0
        if Ps > P:
            speed = K.u - sign * c * np.sqrt(gp / (2 * g) * Ps / P + gm / (2 * g))
            if sign * (s - speed) <= 0:
                return K.rho, K.u, P
            r = Ps / P
            return K.rho * (r + gm / gp) / (gm / gp * r + 1.0), self.ustar, Ps
        head = K.u - sign * c
        cs = c * (Ps / P) ** (gm / (2 * g))
        tail = self.ustar - sign * cs
        if sign * (s - head) <= 0:
            return K.rho, K.u, P
        if sign * (s - tail) >= 0:
            return K.rho * (Ps / P) ** (1.0 / g), self.ustar, Ps
        cf = 2.0 / gp * (c + sign * 0.5 * gm * (K.u - s))
        uf = 2.0 / gp * (sign * c + 0.5 * gm * K.u + s)
        return K.rho * (cf / c) ** (2.0 / gm), uf, P * (cf / c) ** (2.0 * g / gm)


def exact_riemann(uL, uR, n, tol: float = 1e-12, maxiter: int = 100) -> ExactRiemannSolution:
    """Solve the Riemann problem exactly; each side keeps its own ``(gamma, p_inf)``."""
    uL, uR, n = (np.asarray(a, dtype=float) for a in (uL, uR, n))
    check_admissible(uL, "uL")
    check_admissible(uR, "uR")
    L, R = _side(uL, n), _side(uR, n)
    du = R.u - L.u

    def F(p):
        fl, dfl = L.wave(p)
        fr, dfr = R.wave(p)
        return fl + fr + du, dfl + dfr

    lo = -min(L.pinf, R.pinf)
    if F(lo)[0] >= 0.0:
        raise VacuumError("Riemann data generate a vacuum (cavitation) region")
    hi = max(L.p, R.p, lo + 1.0)
    while F(hi)[0] < 0.0:
        hi = lo + 2.0 * (hi - lo)
    p = max(min(0.5 * (L.p + R.p), hi), lo + 1e-3 * (hi - lo))
    for _ in range(maxiter):
        f, df = F(p)
        if f == 0.0:
            break
        if f < 0:
            lo = p
        else:
            hi = p
        step = p - f / df
        p_new = step if lo <= step <= hi else 0.5 * (lo + hi)
        if abs(p_new - p) <= tol * max(abs(p_new) + max(L.pinf, R.pinf), 1e-300):
            p = p_new
            break
        p = p_new
    fl, _ = L.wave(p)
    fr, _ = R.wave(p)
    ustar = 0.5 * (L.u + R.u) + 0.5 * (fr - fl)
    return ExactRiemannSolution(left=L, right=R, n=n, pstar=p, ustar=ustar)

# }}}
