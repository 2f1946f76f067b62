r"""
Stiffened-gas mixture thermodynamics
------------------------------------

States are stored as numpy arrays whose last axis holds the ``d + 4``
conservative components

.. math::

    \mathbf{u} = (\rho, \rho\mathbf{v}, \rho E, \Gamma, \Pi),

with the mixture closure :math:`p\Gamma + \Pi = \rho e`. The ratio of specific
heats and stiffness pressure are recovered pointwise as
:math:`\gamma = (\Gamma + 1)/\Gamma` and :math:`p_\infty = \Pi/(\Gamma + 1)`.
Every function broadcasts over leading axes.

.. autoclass:: SpeciesTable
.. autoclass:: PrimitiveState
.. autoclass:: EntropyEval

.. autofunction:: mixture_pressure
.. autofunction:: sound_speed
.. autofunction:: gamma_pi_mix
.. autofunction:: specific_entropy
.. autofunction:: entropy_variables
.. autofunction:: is_admissible
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sgdg.errors import AdmissibilityError, ConfigError


def ndim_of(u: np.ndarray) -> int:
    d = u.shape[-1] - 4
    if d < 1:
        raise ValueError(f"state vector too short: {u.shape[-1]} components")
    return d


def unpack(u: np.ndarray):
    """Split a state array into ``(rho, mom, rhoE, Gamma, Pi)``."""
    d = ndim_of(u)
    return u[..., 0], u[..., 1:d + 1], u[..., d + 1], u[..., d + 2], u[..., d + 3]


def gamma_pinf(Gamma, Pi):
    """Recover (gamma, p_inf) from the EOS parameters."""
    Gamma = np.asarray(Gamma)
    return (Gamma + 1.0) / Gamma, Pi / (Gamma + 1.0)


def internal_energy(u: np.ndarray) -> np.ndarray:
    """Internal energy per unit volume, ``rhoE - |mom|^2 / (2 rho)``."""
    rho, mom, rhoE, _, _ = unpack(u)
    return rhoE - 0.5 * np.sum(mom * mom, axis=-1) / rho


# {{{ admissibility

_CONDITIONS = ("rho", "Gamma", "Pi", "rho_e")


def _violations(u: np.ndarray):
    rho, mom, rhoE, Gamma, Pi = unpack(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        rhoe = rhoE - 0.5 * np.sum(mom * mom, axis=-1) / rho
        pinf = Pi / (Gamma + 1.0)
        checks = (rho > 0, Gamma > 0, Pi >= 0, rhoe > pinf)
    return checks


def admissible_mask(u: np.ndarray) -> np.ndarray:
    """Boolean array, true where the state lies in the admissible set."""
    ok = np.ones(u.shape[:-1], dtype=bool)
    for c in _violations(u):
        ok &= c
    return ok


def is_admissible(u: np.ndarray) -> tuple[bool, str | None]:
    """Check one state (or a batch) and name the first violated condition.

    The test is ``rho > 0``, ``Gamma > 0``, ``Pi >= 0`` and
    ``rho e > Pi/(Gamma+1)``, all strict except the one on ``Pi``.
    """
    for name, c in zip(_CONDITIONS, _violations(np.asarray(u, dtype=float))):
        if not np.all(c):
            return False, name
    return True, None


def check_admissible(u: np.ndarray, what: str = "state") -> None:
    """Raise :class:`AdmissibilityError` locating the first bad entry."""
    for name, c in zip(_CONDITIONS, _violations(u)):
        if not np.all(c):
            idx = np.unravel_index(np.argmin(c), c.shape) if c.ndim else ()
            raise AdmissibilityError(
                f"{what} inadmissible: condition '{name}' violated at index {idx}")

# }}}


# {{{ pressure, sound speed, conversions

def mixture_pressure(u: np.ndarray, check: bool = True) -> np.ndarray:
    """Pressure from the mixture closure ``p = (rho e - Pi) / Gamma``."""
    u = np.asarray(u, dtype=float)
    if check:
        check_admissible(u)
    _, _, _, Gamma, Pi = unpack(u)
    return (internal_energy(u) - Pi) / Gamma


def sound_speed(u: np.ndarray, check: bool = True) -> np.ndarray:
    """Mixture sound speed ``sqrt(gamma (gamma - 1) (rho e - p_inf) / rho)``."""
    u = np.asarray(u, dtype=float)
    if check:
        check_admissible(u)
    rho, _, _, Gamma, Pi = unpack(u)
    gamma, pinf = gamma_pinf(Gamma, Pi)
    c2 = gamma * (gamma - 1.0) * (internal_energy(u) - pinf) / rho
    if np.any(~(c2 > 0)):
        raise AdmissibilityError("non-positive squared sound speed")
    return np.sqrt(c2)


@dataclass(frozen=True)
class PrimitiveState:
    rho: np.ndarray
    vel: np.ndarray
    p: np.ndarray
    Gamma: np.ndarray
    Pi: np.ndarray


def conserved_from_primitive(rho, vel, p, Gamma, Pi) -> np.ndarray:
    """Assemble ``(rho, rho v, rho E, Gamma, Pi)``; ``vel`` has a trailing axis of size d."""
    rho = np.asarray(rho, dtype=float)
    vel = np.asarray(vel, dtype=float)
    p = np.asarray(p, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)
    Pi = np.asarray(Pi, dtype=float)
    shape = np.broadcast_shapes(rho.shape, vel.shape[:-1], p.shape, Gamma.shape, Pi.shape)
    d = vel.shape[-1]
    u = np.empty(shape + (d + 4,))
    u[..., 0] = rho
    u[..., 1:d + 1] = rho[..., None] * vel
    u[..., d + 1] = Gamma * p + Pi + 0.5 * rho * np.sum(vel * vel, axis=-1)
    u[..., d + 2] = Gamma
    u[..., d + 3] = Pi
    return u


def primitive_from_conserved(u: np.ndarray, check: bool = True) -> PrimitiveState:
    u = np.asarray(u, dtype=float)
    p = mixture_pressure(u, check=check)
    rho, mom, _, Gamma, Pi = unpack(u)
    return PrimitiveState(rho.copy(), mom / rho[..., None], p, Gamma.copy(), Pi.copy())


def physical_flux_normal(u: np.ndarray, n: np.ndarray) -> np.ndarray:
    """``f(u) . n`` with zero Gamma and Pi rows (no admissibility check)."""
    rho, mom, rhoE, Gamma, Pi = unpack(u)
    d = mom.shape[-1]
    vel = mom / rho[..., None]
    p = (internal_energy(u) - Pi) / Gamma
    vn = np.sum(vel * n, axis=-1)
    f = np.zeros(np.broadcast_shapes(u.shape, np.shape(n)[:-1] + (d + 4,)))
    f[..., 0] = rho * vn
    f[..., 1:d + 1] = mom * vn[..., None] + p[..., None] * n
    f[..., d + 1] = (rhoE + p) * vn
    return f

# }}}


# {{{ species

@dataclass(frozen=True)
class SpeciesTable:
    """Per-component stiffened-gas constants ``(gamma_i, pinf_i, cv_i)``."""

    gammas: tuple[float, ...]
    pinfs: tuple[float, ...]
    cvs: tuple[float, ...]

    def __post_init__(self):
        n = len(self.gammas)
        if n == 0:
            raise ConfigError("species table is empty")
        if len(self.pinfs) != n or len(self.cvs) != n:
            raise ConfigError("species table columns have different lengths")
        if any(g <= 1 for g in self.gammas):
            raise ConfigError("every species needs gamma > 1")
        if any(p < 0 for p in self.pinfs):
            raise ConfigError("every species needs pinf >= 0")
        if any(c <= 0 for c in self.cvs):
            raise ConfigError("every species needs cv > 0")

    @classmethod
    def from_dict(cls, data: dict) -> SpeciesTable:
        try:
            gammas = tuple(float(g) for g in data["gamma"])
            n = len(gammas)
            pinfs = tuple(float(p) for p in data.get("pinf", [0.0] * n))
            cvs = tuple(float(c) for c in data.get("cv", [1.0] * n))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad species table: {exc}") from exc
        return cls(gammas, pinfs, cvs)

    def to_dict(self) -> dict:
        return {"gamma": list(self.gammas), "pinf": list(self.pinfs), "cv": list(self.cvs)}

    @property
    def nspecies(self) -> int:
        return len(self.gammas)

    @property
    def Gamma_i(self) -> np.ndarray:
        return 1.0 / (np.array(self.gammas) - 1.0)

    @property
    def Pi_i(self) -> np.ndarray:
        g = np.array(self.gammas)
        return g * np.array(self.pinfs) / (g - 1.0)

    @property
    def gamma_bounds(self) -> tuple[float, float]:
        """``(m_Gamma, M_Gamma)``."""
        return float(self.Gamma_i.min()), float(self.Gamma_i.max())

    @property
    def pi_bounds(self) -> tuple[float, float]:
        """``(m_Pi, M_Pi)``."""
        return float(self.Pi_i.min()), float(self.Pi_i.max())

    def alpha1_from_gamma(self, Gamma):
        """Invert the two-species mixing rule for the first void fraction."""
        if self.nspecies != 2:
            raise ConfigError("alpha_1 reconstruction needs exactly two species")
        G1, G2 = self.Gamma_i
        if G1 == G2:
            raise ConfigError("species share Gamma; alpha_1 is not recoverable")
        return (np.asarray(Gamma) - G2) / (G1 - G2)


def gamma_pi_mix(alphas, species: SpeciesTable, tol: float = 1e-12):
    """Mixture parameters from void fractions; ``alphas`` has a trailing species axis."""
    alphas = np.asarray(alphas, dtype=float)
    if alphas.shape[-1] != species.nspecies:
        raise ConfigError(
            f"got {alphas.shape[-1]} void fractions for {species.nspecies} species")
    if np.any(alphas < -tol) or np.any(alphas > 1 + tol):
        raise ConfigError("void fractions must lie in [0, 1]")
    if np.any(np.abs(alphas.sum(axis=-1) - 1.0) > tol):
        raise ConfigError("void fractions violate the saturation condition")
    Gamma = alphas @ species.Gamma_i
    Pi = alphas @ species.Pi_i
    return Gamma, Pi

# }}}


# {{{ entropy

@dataclass(frozen=True)
class EntropyEval:
    eta: np.ndarray
    q: np.ndarray
    theta: np.ndarray
    zeta: np.ndarray


def specific_entropy(u: np.ndarray, cv, form: str = "pressure") -> np.ndarray:
    """Specific entropy of a (locally pure-phase) state.

    ``form="pressure"`` evaluates ``cv ln((p + p_inf) / rho^gamma)``;
    ``form="energy"`` evaluates ``cv (ln(e - Pi tau/(Gamma+1)) + ln(tau)/Gamma - ln Gamma)``.
    """
    u = np.asarray(u, dtype=float)
    check_admissible(u)
    rho, _, _, Gamma, Pi = unpack(u)
    if form == "pressure":
        gamma, pinf = gamma_pinf(Gamma, Pi)
        p = (internal_energy(u) - Pi) / Gamma
        return cv * (np.log(p + pinf) - gamma * np.log(rho))
    if form == "energy":
        tau = 1.0 / rho
        e = internal_energy(u) * tau
        return cv * (np.log(e - Pi * tau / (Gamma + 1.0)) + np.log(tau) / Gamma - np.log(Gamma))
    raise ValueError(f"unknown entropy form {form!r}")


def entropy_variables(u: np.ndarray, cv) -> EntropyEval:
    """Entropy pair ``(-rho s, -rho s v)`` and its entropy variables."""
    u = np.asarray(u, dtype=float)
    s = specific_entropy(u, cv)
    rho, mom, _, Gamma, Pi = unpack(u)
    d = mom.shape[-1]
    vel = mom / rho[..., None]
    gamma, pinf = gamma_pinf(Gamma, Pi)
    p = (internal_energy(u) - Pi) / Gamma
    zeta = (gamma - 1.0) * cv * rho / (p + pinf)
    theta = np.zeros_like(u)
    theta[..., 0] = gamma * cv - s - 0.5 * zeta * np.sum(vel * vel, axis=-1)
    theta[..., 1:d + 1] = zeta[..., None] * vel
    theta[..., d + 1] = -zeta
    eta = -rho * s
    return EntropyEval(eta=eta, q=eta[..., None] * vel, theta=theta, zeta=zeta)

# }}}
