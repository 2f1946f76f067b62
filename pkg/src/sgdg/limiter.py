r"""
Scaling limiters
----------------

DOFs of every element are scaled around the cell average,
:math:`\tilde U = \langle u\rangle + \theta (U - \langle u\rangle)`, in the
order density, :math:`\Gamma`, :math:`\Pi` and internal energy. By default
the density, :math:`\Gamma` and :math:`\Pi` steps scale the whole state
vector with their coefficient: every conserved variable and the EOS
parameters are affine in each other at uniform pressure and velocity, so
this keeps those fields uniform across material interfaces. With
``joint=False`` only the limited component is scaled. The energy
step scales :math:`(\rho, \rho\mathbf{v}, \rho E)` jointly and relies on
the concavity of :math:`\rho e` to reach :math:`\rho e \geq p_\infty + \epsilon`
at every DOF, with :math:`p_\infty` recomputed from the limited
:math:`\Gamma, \Pi`.

.. autoclass:: LimiterReport
.. autoclass:: Limiter
.. autofunction:: limit_element
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sgdg import _kernels as kern
from sgdg.errors import LimiterError
from sgdg.thermo import SpeciesTable

#: default positivity margin
EPS = 1e-8

_NAMES = {1: "density", 2: "Gamma", 3: "Pi", 4: "internal energy"}


@dataclass(frozen=True)
class LimiterReport:
    """``theta[e] = (theta_rho, theta_Gamma, theta_Pi, theta_rhoe)``."""

    theta: np.ndarray

    @property
    def active(self) -> np.ndarray:
        """Number of elements where each limiter acted."""
        return np.sum(self.theta < 1.0, axis=0)

    @property
    def nactive(self) -> int:
        return int(np.any(self.theta < 1.0, axis=1).sum())


@dataclass(frozen=True)
class Limiter:
    """Limiter bound to a species table.

    ``tol`` is the relative slack accepted on cell averages of
    :math:`\\Gamma, \\Pi` that sit on a bound up to round-off.
    """

    species: SpeciesTable
    eps: float = EPS
    tol: float = 1e-12
    joint: bool = True

    @property
    def bounds(self):
        return self.species.gamma_bounds + self.species.pi_bounds

    def __call__(self, u: np.ndarray, mass: np.ndarray) -> tuple[np.ndarray, LimiterReport]:
        """Limit ``u[K, (P,)*d, nv]`` in place with nodal masses ``omega omega J``."""
        K = u.shape[0]
        d = u.shape[-1] - 4
        uf = (u if u.flags.c_contiguous else np.ascontiguousarray(u)).reshape(-1, d + 4)
        mG, MG, mP, MP = self.bounds
        theta = np.ones((K, 4))
        status = np.zeros(K, dtype=np.int64)
        kern.limit(uf, np.ascontiguousarray(mass.reshape(-1)), K, d, self.eps,
                   mG, MG, mP, MP, self.tol, self.joint, theta, status)
        bad = np.flatnonzero(status)
        if bad.size:
            e = bad[0]
            raise LimiterError(
                f"cell average of element {e} violates the {_NAMES[int(status[e])]} bound")
        if not np.shares_memory(uf, u):
            u[...] = uf.reshape(u.shape)
        return u, LimiterReport(theta)


def limit_element(dofs, averages=None, species: SpeciesTable | None = None,
                  eps: float = EPS, weights=None, joint: bool = True):
    """Limit the DOFs of a single element.

    ``dofs`` has shape ``(n_nodes, nv)`` (any node layout flattened) and
    ``weights`` are the nodal quadrature masses, uniform by default.
    ``averages`` is only used as a consistency check against the weighted
    mean. Returns ``(limited copy, LimiterReport)``.
    """
    if species is None:
        raise ValueError("a species table is required for the EOS bounds")
    u = np.array(dofs, dtype=float).reshape(1, -1, np.shape(dofs)[-1])
    m = np.ones(u.shape[1]) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    if averages is not None:
        mean = m @ u[0] / m.sum()
        if not np.allclose(mean, averages, rtol=1e-12, atol=1e-14):
            raise ValueError("given averages do not match the weighted DOF mean")
    u, rep = Limiter(species, eps, joint=joint)(u, m[None])
    return u[0].reshape(np.shape(dofs)), rep
