r"""
Time stepping
-------------

The step size follows two conditions. Condition A bounds
:math:`\Delta t` by the interface wave speeds and an element speed
:math:`\lambda^\star_\kappa` weighted by
:math:`\omega_k J_e^k / \min(\tilde\omega J)`; condition B bounds the
volume and contact-speed contributions at each node. Here
:math:`\lambda^\star_\kappa` is replaced by ``lambda_factor`` times the
largest :math:`|v| + c` over the element and its exterior face traces.

Stages of the three-stage SSP Runge-Kutta scheme are forward Euler steps
followed by the limiter.

.. autoclass:: StepReport
.. autofunction:: compute_dt
.. autofunction:: euler_step
.. autofunction:: ssprk3_step
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from sgdg import _kernels as kern
from sgdg.errors import AdmissibilityError, StepError
from sgdg.limiter import Limiter, LimiterReport
from sgdg.solver import Scheme
from sgdg.thermo import internal_energy, is_admissible

log = logging.getLogger(__name__)

#: default safety factors on conditions A and B
SAFETY_A = 0.9
SAFETY_B = 1.0
LAMBDA_FACTOR = 1.5


@dataclass(frozen=True)
class StepReport:
    """Step size, binding condition and post-step diagnostics."""

    dt: float
    dt_A: float
    dt_B: float
    binding: str
    limiter_active: tuple = ()
    min_density: float = np.nan
    min_internal_energy: float = np.nan

    def __post_init__(self):
        if not self.dt > 0:
            raise StepError(f"non-positive time step {self.dt}")


def _volume_B(scheme: Scheme, prim):
    op = scheme.mesh.op
    K, P = scheme.mesh.nelements, op.npoints
    out = np.zeros(prim.shape[0])
    if scheme.dim == 1:
        kern.volume_B_1d(prim, op.D, op.weights, K, P, out)
    else:
        kern.volume_B_2d(prim, op.D, op.weights, scheme.mesh.ja_xi, scheme.mesh.ja_eta,
                         K, P, out)
    return out


def step_limits(u: np.ndarray, scheme: Scheme, lambda_factor: float = LAMBDA_FACTOR):
    """Unscaled ``(dt_A, dt_B)`` and the element speeds ``lambda*``."""
    scheme.check(u)
    uf, prim = scheme.flat_primitives(u)
    f = scheme.faces
    volB = _volume_B(scheme, prim)
    rateA, surfB, lam = kern.dt_conditions(
        uf, prim, f.inner, f.outer, f.outer_elem, f.bc, f.normal, f.weight, f.ratio,
        scheme._farfield(), scheme.dim, scheme.mesh.p + 1, lambda_factor, volB)
    if not (np.all(np.isfinite(rateA)) and np.all(np.isfinite(surfB))):
        raise AdmissibilityError("non-finite wave speeds in the time-step estimate")
    rateB = (volB + surfB) / scheme.mass.reshape(-1)
    a, b = rateA.max(), rateB.max()
    dt_A = 0.5 / a if a > 0 else np.inf
    dt_B = 1.0 / b if b > 0 else np.inf
    return dt_A, dt_B, lam


def compute_dt(u: np.ndarray, scheme: Scheme, safety: float = SAFETY_A,
               safety_B: float = SAFETY_B, lambda_factor: float = LAMBDA_FACTOR) -> StepReport:
    """Largest admissible step: ``min(safety * dt_A, safety_B * dt_B)``."""
    dt_A, dt_B, _ = step_limits(u, scheme, lambda_factor)
    a, b = safety * dt_A, safety_B * dt_B
    binding = "A" if a <= b else "B"
    if binding == "B":
        log.info("time-step condition B binds: dt_B=%.6e < dt_A=%.6e", b, a)
    dt = min(a, b)
    if not np.isfinite(dt):
        raise StepError("no finite time step: the state is at rest with no wave speeds")
    return StepReport(dt=dt, dt_A=dt_A, dt_B=dt_B, binding=binding)


def _check_averages(scheme: Scheme, u_new, bounds=None):
    avg = scheme.cell_averages(u_new)
    ok, cond = is_admissible(avg)
    if not ok:
        raise StepError(f"cell average violates the '{cond}' condition; reduce the CFL number")
    if bounds is not None:
        d = scheme.dim
        for col, name, (lo, hi) in ((d + 2, "Gamma", bounds[0]), (d + 3, "Pi", bounds[1])):
            slack = 1e-12 * max(1.0, abs(hi))
            if avg[:, col].min() < lo - slack or avg[:, col].max() > hi + slack:
                raise StepError(f"cell average of {name} left [{lo}, {hi}]")
    return avg


def euler_step(u: np.ndarray, dt: float, scheme: Scheme, rate=None, eos_bounds=None) -> np.ndarray:
    """``U + dt * (-R / (omega omega J))``; checks the new cell averages.

    ``rate`` is a precomputed time derivative; ``eos_bounds = ((m_Gamma, M_Gamma), (m_Pi, M_Pi))`` adds the maximum
    principle on the EOS parameters to the checks.
    """
    k = scheme.rhs(u) if rate is None else rate
    u_new = u + dt * k
    _check_averages(scheme, u_new, eos_bounds)
    return u_new


def ssprk3_step(u: np.ndarray, dt: float, scheme: Scheme, limiter: Limiter | None = None,
                report: StepReport | None = None, rhs=None):
    """Three-stage SSP Runge-Kutta step with limiting after every stage.

    ``rhs`` may replace the semi-discrete operator (used for ODE checks).
    Returns ``(u_new, StepReport)``.
    """
    f = scheme.rhs if rhs is None else rhs
    bounds = None
    if limiter is not None:
        mG, MG, mP, MP = limiter.bounds
        bounds = ((mG, MG), (mP, MP))
    active = []

    def stage(v, w0=None, a=0.0):
        v1 = v + dt * f(v)
        _check_averages(scheme, v1, bounds)
        if w0 is not None:
            v1 = a * w0 + (1.0 - a) * v1
        if limiter is not None:
            v1, rep = limiter(v1, scheme.mass)
            active.append(tuple(int(c) for c in rep.active))
        return v1

    u1 = stage(u)
    u2 = stage(u1, u, 0.75)
    u3 = stage(u2, u, 1.0 / 3.0)

    d = scheme.dim
    rep = report if report is not None else StepReport(dt, np.nan, np.nan, "fixed")
    margin = internal_energy(u3) - u3[..., d + 3] / (u3[..., d + 2] + 1.0)
    rep = replace(rep, dt=dt, limiter_active=tuple(active),
                  min_density=float(u3[..., 0].min()),
                  min_internal_energy=float(margin.min()))
    return u3, rep


__all__ = ["StepReport", "compute_dt", "step_limits", "euler_step", "ssprk3_step",
           "LimiterReport"]
