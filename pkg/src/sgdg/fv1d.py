r"""
Three-point finite volumes
--------------------------

First-order scheme in fluctuation form,

.. math::

    U_j^{n+1} = U_j^n - \frac{\Delta t}{h}\Big(D^-(U_j^n, U_{j+1}^n) + D^+(U_{j-1}^n, U_j^n)\Big),

with HLLC fluctuations and two copied ghost cells on each side.

.. autoclass:: Fv1dGrid
.. autofunction:: make_grid
.. autofunction:: max_dt
.. autofunction:: step_3pt
.. autofunction:: run_3pt
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from sgdg.errors import ConfigError, StepError
from sgdg.riemann import hllc_fluctuations, wave_speed_estimates
from sgdg.thermo import check_admissible

NGHOST = 2
UNIT = np.array([1.0])


@dataclass(frozen=True)
class Fv1dGrid:
    """Cell averages ``u[N, 5]`` on a uniform grid of ``[a, a + N h]``."""

    u: np.ndarray
    a: float
    h: float
    t: float = 0.0

    @property
    def ncells(self) -> int:
        return self.u.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.a + self.h * (np.arange(self.ncells) + 0.5)


def make_grid(a: float, b: float, ncells: int, initial) -> Fv1dGrid:
    """Sample ``initial(x) -> u[..., 5]`` at cell centers."""
    if ncells < 1 or not b > a:
        raise ConfigError("need a non-empty interval and at least one cell")
    h = (b - a) / ncells
    x = a + h * (np.arange(ncells) + 0.5)
    u = np.asarray(initial(x), dtype=float)
    check_admissible(u, "initial cell")
    return Fv1dGrid(u=u, a=a, h=h)


def _padded(u):
    return np.concatenate([np.repeat(u[:1], NGHOST, axis=0), u,
                           np.repeat(u[-1:], NGHOST, axis=0)])


def _max_speed(u):
    up = _padded(u)
    sL, sR = wave_speed_estimates(up[:-1], up[1:], UNIT, check=False)
    return float(np.maximum(np.abs(sL), np.abs(sR)).max())


def max_dt(grid: Fv1dGrid, cfl: float = 0.45) -> float:
    """``cfl * h / max(|sL|, |sR|)``; the scheme needs ``cfl <= 1/2``."""
    return cfl * grid.h / _max_speed(grid.u)


def step_3pt(grid: Fv1dGrid, dt: float) -> Fv1dGrid:
    u = grid.u
    smax = _max_speed(u)
    if dt * smax / grid.h > 0.5 * (1.0 + 1e-12):
        raise StepError(f"CFL {dt * smax / grid.h:.3f} exceeds 1/2")
    up = _padded(u)
    fl = hllc_fluctuations(up[:-1], up[1:], UNIT)
    # interface m sits between padded cells m and m + 1
    j = np.arange(u.shape[0]) + NGHOST
    u_new = u - dt / grid.h * (fl.dminus[j] + fl.dplus[j - 1])
    return replace(grid, u=u_new, t=grid.t + dt)


def run_3pt(grid: Fv1dGrid, t_end: float, cfl: float = 0.45, callback=None) -> Fv1dGrid:
    """March to ``t_end`` with the last step clipped; ``callback(old, new)`` after each step."""
    if not t_end > grid.t:
        raise ConfigError("end time must exceed the current time")
    while grid.t < t_end * (1 - 1e-14):
        dt = min(max_dt(grid, cfl), t_end - grid.t)
        new = step_3pt(grid, dt)
        check_admissible(new.u, "cell")
        if callback is not None:
            callback(grid, new)
        grid = new
    return grid
