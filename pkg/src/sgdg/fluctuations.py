r"""
Two-point volume fluxes and fluctuations
----------------------------------------

Volume fluctuations take the form

.. math::

    \mathbf{D}^-_X = \mathbf{h}_X - \mathbf{f}(\mathbf{u}^-)\cdot\mathbf{n} + \mathbf{d}^-_X,
    \qquad
    \mathbf{D}^+_X = \mathbf{f}(\mathbf{u}^+)\cdot\mathbf{n} - \mathbf{h}_X + \mathbf{d}^+_X,

with a symmetric conservative flux :math:`\mathbf{h}_X` and nonconservative
parts :math:`\mathbf{d}^\pm_X = \tfrac12 (\mathbf{v}^\pm\cdot\mathbf{n})
(0, \dots, 0, [\![\Gamma]\!], [\![\Pi]\!])`. Two flavors are provided:
contact preserving (``"cp"``) and entropy conservative (``"ec"``).

All functions are linear in ``n``; the public entry points check that ``n``
is a unit vector, while :func:`volume_tilde` also accepts the scaled
metric normals used inside elements.

.. autoclass:: FluctuationPair
.. autofunction:: physical_flux
.. autofunction:: mean_jump
.. autofunction:: log_mean
.. autofunction:: cp_fluctuations
.. autofunction:: ec_fluctuations
.. autofunction:: volume_tilde
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sgdg.errors import DomainError
from sgdg.thermo import check_admissible, internal_energy, physical_flux_normal, unpack

FLAVORS = ("cp", "ec")

#: relative spacing below which the log mean switches to its series
LOG_MEAN_SWITCH = 1e-4


@dataclass(frozen=True)
class FluctuationPair:
    dminus: np.ndarray
    dplus: np.ndarray


def _check_unit(n: np.ndarray, tol: float = 1e-12) -> None:
    norm = np.sqrt(np.sum(np.asarray(n) ** 2, axis=-1))
    if np.any(np.abs(norm - 1.0) > tol):
        raise ValueError("normal must be a unit vector")


def physical_flux(u: np.ndarray, n: np.ndarray) -> np.ndarray:
    """``(rho v.n, rho v (v.n) + p n, (rho E + p) v.n, 0, 0)``."""
    u = np.asarray(u, dtype=float)
    n = np.asarray(n, dtype=float)
    _check_unit(n)
    check_admissible(u)
    return physical_flux_normal(u, n)


def mean_jump(a_minus, a_plus):
    """Arithmetic mean and jump ``a+ - a-``."""
    a_minus = np.asarray(a_minus, dtype=float)
    a_plus = np.asarray(a_plus, dtype=float)
    return 0.5 * (a_minus + a_plus), a_plus - a_minus


def log_mean(a_minus, a_plus):
    """Logarithmic mean ``(a+ - a-) / (ln a+ - ln a-)`` of positive numbers."""
    a = np.asarray(a_minus, dtype=float)
    b = np.asarray(a_plus, dtype=float)
    if np.any(~(a > 0)) or np.any(~(b > 0)):
        raise DomainError("log mean needs strictly positive arguments")
    f = (b - a) / (a + b)
    u = f * f
    near = np.abs(b / a - 1.0) < LOG_MEAN_SWITCH
    series = 0.5 * (a + b) / (1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u / 7.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = (b - a) / (np.log(b) - np.log(a))
    return np.where(near, series, exact)


# {{{ flux building blocks

def _fields(u):
    rho, mom, rhoE, Gamma, Pi = unpack(u)
    vel = mom / rho[..., None]
    p = (internal_energy(u) - Pi) / Gamma
    return rho, vel, rhoE, p, Gamma, Pi


def _assemble(h_rho, h_mom, h_E, shape):
    d = h_mom.shape[-1]
    h = np.zeros(shape)
    h[..., 0] = h_rho
    h[..., 1:d + 1] = h_mom
    h[..., d + 1] = h_E
    return h


def _broadcast_shape(um, up, n):
    return np.broadcast_shapes(um.shape, up.shape, np.shape(n)[:-1] + (um.shape[-1],))


def cp_flux(u_minus, u_plus, n) -> np.ndarray:
    """Contact-preserving conservative flux built from arithmetic means."""
    rm, vm, Em, pm, _, _ = _fields(u_minus)
    rp, vp, Ep, pp, _, _ = _fields(u_plus)
    rho, vel, rhoE, p = 0.5 * (rm + rp), 0.5 * (vm + vp), 0.5 * (Em + Ep), 0.5 * (pm + pp)
    vn = np.sum(vel * n, axis=-1)
    h_rho = rho * vn
    h_mom = h_rho[..., None] * vel + p[..., None] * n
    h_E = (rhoE + p) * vn
    return _assemble(h_rho, h_mom, h_E, _broadcast_shape(u_minus, u_plus, n))


def _w(rho, p, Gamma, Pi):
    # cv / zeta = (Gamma / rho) (p + Pi / (Gamma + 1)), free of cv
    return Gamma / rho * (p + Pi / (Gamma + 1.0))


def ec_flux(u_minus, u_plus, n) -> np.ndarray:
    """Entropy-conservative conservative flux.

    With ``w = cv/zeta``, the pressure-like term is
    ``mean(rho) mean(1/Gamma) / mean(1/w) - mean(p_inf)`` and the energy term
    carries ``1 / log_mean(1/w)``; this is the choice for which the entropy-conservation
    condition holds exactly in pure phases.
    """
    rm, vm, _, pm, Gm, Pm = _fields(u_minus)
    rp, vp, _, pp, Gp, Pp = _fields(u_plus)
    zm, zp = 1.0 / _w(rm, pm, Gm, Pm), 1.0 / _w(rp, pp, Gp, Pp)
    rho_hat = log_mean(rm, rp)
    z_hat = log_mean(zm, zp)
    vel = 0.5 * (vm + vp)
    vn = np.sum(vel * n, axis=-1)
    pinf = 0.5 * (Pm / (Gm + 1.0) + Pp / (Gp + 1.0))
    pbar = 0.5 * (rm + rp) * 0.5 * (1.0 / Gm + 1.0 / Gp) / (0.5 * (zm + zp))
    h_rho = rho_hat * vn
    h_mom = h_rho[..., None] * vel + (pbar - pinf)[..., None] * n
    h_E = (1.0 / z_hat + 0.5 * np.sum(vm * vp, axis=-1)) * h_rho + pbar * vn
    return _assemble(h_rho, h_mom, h_E, _broadcast_shape(u_minus, u_plus, n))


def nonconservative_parts(u_minus, u_plus, n):
    """``(d-, d+)`` with ``d± = (v±.n)/2 * (0, ..., [[Gamma]], [[Pi]])``."""
    rm, mm, _, Gm, Pm = unpack(u_minus)
    rp, mp, _, Gp, Pp = unpack(u_plus)
    d = mm.shape[-1]
    shape = _broadcast_shape(u_minus, u_plus, n)
    vnm = np.sum(mm / rm[..., None] * n, axis=-1)
    vnp = np.sum(mp / rp[..., None] * n, axis=-1)
    jump = np.zeros(shape)
    jump[..., d + 2] = Gp - Gm
    jump[..., d + 3] = Pp - Pm
    return 0.5 * vnm[..., None] * jump, 0.5 * vnp[..., None] * jump


_FLUX = {"cp": cp_flux, "ec": ec_flux}


def conservative_flux(u_minus, u_plus, n, flavor: str) -> np.ndarray:
    try:
        return _FLUX[flavor](u_minus, u_plus, n)
    except KeyError:
        raise ValueError(f"unknown flavor {flavor!r}, expected one of {FLAVORS}") from None

# }}}


def fluctuations(u_minus, u_plus, n, flavor: str) -> FluctuationPair:
    u_minus = np.asarray(u_minus, dtype=float)
    u_plus = np.asarray(u_plus, dtype=float)
    n = np.asarray(n, dtype=float)
    _check_unit(n)
    check_admissible(u_minus, "u-")
    check_admissible(u_plus, "u+")
    h = conservative_flux(u_minus, u_plus, n, flavor)
    dm, dp = nonconservative_parts(u_minus, u_plus, n)
    return FluctuationPair(
        dminus=h - physical_flux_normal(u_minus, n) + dm,
        dplus=physical_flux_normal(u_plus, n) - h + dp)


def cp_fluctuations(u_minus, u_plus, n) -> FluctuationPair:
    """Contact-preserving fluctuations ``(D-, D+)``."""
    return fluctuations(u_minus, u_plus, n, "cp")


def ec_fluctuations(u_minus, u_plus, n) -> FluctuationPair:
    """Entropy-conservative fluctuations ``(D-, D+)``."""
    return fluctuations(u_minus, u_plus, n, "ec")


def volume_tilde(u_minus, u_plus, n, flavor: str) -> np.ndarray:
    """Symmetrized volume fluctuation ``D-(u-, u+) - D+(u+, u-)``.

    ``n`` need not be normalized.
    """
    u_minus = np.asarray(u_minus, dtype=float)
    u_plus = np.asarray(u_plus, dtype=float)
    n = np.asarray(n, dtype=float)
    check_admissible(u_minus, "u-")
    check_admissible(u_plus, "u+")
    h_mp = conservative_flux(u_minus, u_plus, n, flavor)
    h_pm = conservative_flux(u_plus, u_minus, n, flavor)
    dm, _ = nonconservative_parts(u_minus, u_plus, n)
    _, dp_swapped = nonconservative_parts(u_plus, u_minus, n)
    return h_mp + h_pm + dm - dp_swapped
