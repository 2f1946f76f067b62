"""
Error norms
-----------

Discrete norms use the nodal quadrature masses ``omega_i omega_j J``, so
the L1 and L2 norms approximate integrals over the domain.

.. autoclass:: ErrorReport
.. autofunction:: error_norms
.. autofunction:: observed_orders
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ErrorReport:
    """Errors of one variable on one mesh; ``h`` is a representative size."""

    l1: float
    l2: float
    linf: float
    h: float = np.nan

    def as_dict(self) -> dict:
        return {"h": self.h, "L1": self.l1, "L2": self.l2, "Linf": self.linf}


def error_norms(numeric, reference, mass, component: int = 0, h: float = np.nan) -> ErrorReport:
    """L1, L2 and max norms of ``numeric - reference`` in one conserved component.

    ``mass`` has the node shape of the fields (without the variable axis).
    """
    e = np.abs(np.asarray(numeric)[..., component] - np.asarray(reference)[..., component])
    m = np.broadcast_to(mass, e.shape)
    return ErrorReport(l1=float(np.sum(m * e)), l2=float(np.sqrt(np.sum(m * e * e))),
                       linf=float(e.max()), h=float(h))


def observed_orders(reports, norm: str = "l1") -> np.ndarray:
    """``log(e_k / e_{k+1}) / log(h_k / h_{k+1})`` for consecutive meshes."""
    e = np.array([getattr(r, norm) for r in reports])
    h = np.array([r.h for r in reports])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])
