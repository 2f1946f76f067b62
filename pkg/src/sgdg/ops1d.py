r"""
Gauss-Lobatto collocation operators on :math:`[-1, 1]`.

The nodes are the roots of :math:`(1 - \xi^2) L_p'(\xi)`, the weights are
:math:`\omega_k = 2 / (p(p+1) L_p(\xi_k)^2)` and the difference matrix is
:math:`D_{kl} = \ell_l'(\xi_k)`. Together they satisfy the summation-by-parts
identity

.. math::

    \omega_k D_{kl} + \omega_l D_{lk} = \delta_{kp}\delta_{lp} - \delta_{k0}\delta_{l0}.

.. autoclass:: LobattoOperator
.. autofunction:: lobatto_operator
.. autofunction:: interpolate
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from sgdg.errors import ConfigError

MAX_DEGREE = 10


def legendre_with_derivatives(p: int, x):
    """Return ``(L_p, L_p', L_p'')`` at ``x`` using the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    l0, l1 = np.ones_like(x), x.copy()
    if p == 0:
        return l0, np.zeros_like(x), np.zeros_like(x)
    for k in range(2, p + 1):
        l0, l1 = l1, ((2 * k - 1) * x * l1 - (k - 1) * l0) / k
    # (1 - x^2) L' = p (L_{p-1} - x L_p) and the Legendre ODE for L''
    with np.errstate(divide="ignore", invalid="ignore"):
        dl = p * (l0 - x * l1) / (1.0 - x * x)
        d2l = (2.0 * x * dl - p * (p + 1) * l1) / (1.0 - x * x)
    return l1, dl, d2l


def _lobatto_nodes(p: int, tol: float = 1e-15, maxiter: int = 100) -> np.ndarray:
    x = -np.cos(np.pi * np.arange(p + 1) / p)
    inner = x[1:-1].copy()
    for _ in range(maxiter):
        _, dl, d2l = legendre_with_derivatives(p, inner)
        dx = dl / d2l
        inner -= dx
        if np.all(np.abs(dx) < tol):
            break
    x[1:-1] = inner
    x = 0.5 * (x - x[::-1])
    return x


@dataclass(frozen=True)
class LobattoOperator:
    """Nodes, weights, barycentric weights and difference matrix of degree ``p``."""

    p: int
    nodes: np.ndarray
    weights: np.ndarray
    bary: np.ndarray
    D: np.ndarray

    @property
    def npoints(self) -> int:
        return self.p + 1

    def sbp_residual(self) -> float:
        """Largest entry of ``W D + (W D)^T - B``."""
        Q = self.weights[:, None] * self.D
        B = np.zeros_like(Q)
        B[0, 0], B[-1, -1] = -1.0, 1.0
        return float(np.abs(Q + Q.T - B).max())

    def rowsum_residual(self) -> float:
        return float(np.abs(self.D.sum(axis=1)).max())

    def interpolation_matrix(self, xi) -> np.ndarray:
        """Rows of Lagrange basis values ``ell_l(xi_m)``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        diff = xi[:, None] - self.nodes[None, :]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = self.bary[None, :] / diff
            L = t / t.sum(axis=1, keepdims=True)
        # on a node, or so close that bary/diff overflows: the basis is a Kronecker delta
        rows = ~np.isfinite(L).all(axis=1)
        exact = np.abs(diff) == np.abs(diff).min(axis=1, keepdims=True)
        L[rows] = exact[rows].astype(float)
        return L


@lru_cache(maxsize=None)
def lobatto_operator(p: int) -> LobattoOperator:
    """Build the degree-``p`` Gauss-Lobatto operator, ``1 <= p <= 10``."""
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= MAX_DEGREE:
        raise ConfigError(f"polynomial degree must be in 1..{MAX_DEGREE}, got {p!r}")
    p = int(p)
    x = _lobatto_nodes(p)
    lp, _, _ = legendre_with_derivatives(p, x)
    w = 2.0 / (p * (p + 1) * lp**2)

    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / diff.prod(axis=1)

    D = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))

    for a in (x, w, bary, D):
        a.setflags(write=False)
    return LobattoOperator(p=p, nodes=x, weights=w, bary=bary, D=D)


def interpolate(op: LobattoOperator, values, xi):
    """Evaluate the Lagrange interpolant of nodal ``values`` (first axis) at ``xi``."""
    values = np.asarray(values, dtype=float)
    L = op.interpolation_matrix(xi)
    out = np.tensordot(L, values, axes=(1, 0))
    return out[0] if np.ndim(xi) == 0 else out
