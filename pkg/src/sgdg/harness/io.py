"""
Output files
------------

1D solutions are written as CSV with columns ``x, rho, u, p, Gamma, Pi, s``
at 17 significant digits. 2D solutions are legacy-ASCII VTK unstructured
grids where every element is split into ``p * p`` sub-quadrangles; point
data are density, velocity, pressure, the EOS parameters, the void
fraction and a Schlieren indicator ``exp(|grad rho| / max |grad rho|)``.

.. autofunction:: write_csv
.. autofunction:: read_csv
.. autofunction:: write_vtk
.. autofunction:: schlieren
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from sgdg.thermo import SpeciesTable, gamma_pinf, internal_energy

CSV_COLUMNS = ("x", "rho", "u", "p", "Gamma", "Pi", "s")
VTK_QUAD = 9


def _pressure(u):
    return (internal_energy(u) - u[..., -1]) / u[..., -2]


def _entropy(u, cv):
    gamma, pinf = gamma_pinf(u[..., -2], u[..., -1])
    return cv * (np.log(_pressure(u) + pinf) - gamma * np.log(u[..., 0]))


def write_csv(path, x: np.ndarray, u: np.ndarray, cv: float = 1.0) -> None:
    """Write 1D data at points ``x``; ``s`` uses the specific heat ``cv``."""
    x = np.asarray(x).reshape(-1)
    uf = u.reshape(-1, u.shape[-1])
    cols = np.column_stack([x, uf[:, 0], uf[:, 1] / uf[:, 0], _pressure(uf),
                            uf[:, 3], uf[:, 4], _entropy(uf, cv)])
    np.savetxt(path, cols, fmt="%.17g", delimiter=",", header=",".join(CSV_COLUMNS),
               comments="")


def read_csv(path) -> dict:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, k] for k, name in enumerate(CSV_COLUMNS)}


def density_gradient(mesh, rho: np.ndarray) -> np.ndarray:
    """Nodal ``|grad rho|`` from the element polynomial and the metric terms."""
    D = mesh.op.D
    dxi = np.einsum("ik,ekj->eij", D, rho)
    deta = np.einsum("jk,eik->eij", D, rho)
    g = (mesh.ja_xi * dxi[..., None] + mesh.ja_eta * deta[..., None]) / mesh.J[..., None]
    return np.linalg.norm(g, axis=-1)


def schlieren(mesh, rho: np.ndarray) -> np.ndarray:
    g = density_gradient(mesh, rho)
    gmax = g.max()
    return np.exp(g / gmax) if gmax > 0 else np.ones_like(g)


def write_vtk(path, mesh, u: np.ndarray, species: SpeciesTable, t: float = 0.0) -> None:
    """Write a 2D state as a legacy VTK unstructured grid."""
    K, P = mesh.nelements, mesh.p + 1
    pts = mesh.x.reshape(-1, 2)
    idx = np.arange(K * P * P).reshape(K, P, P)
    quads = np.stack([idx[:, :-1, :-1], idx[:, 1:, :-1], idx[:, 1:, 1:], idx[:, :-1, 1:]],
                     axis=-1).reshape(-1, 4)
    uf = u.reshape(-1, u.shape[-1])
    rho = uf[:, 0]
    vel = np.zeros((rho.size, 3))
    vel[:, :2] = uf[:, 1:3] / rho[:, None]
    alpha1 = species.alpha1_from_gamma(uf[:, 4]) if species.nspecies > 1 else np.ones_like(rho)
    fields = {"rho": rho, "p": _pressure(uf), "Gamma": uf[:, 4], "Pi": uf[:, 5],
              "alpha1": alpha1, "schlieren": schlieren(mesh, u[..., 0]).reshape(-1)}
    lines = ["# vtk DataFile Version 3.0", f"sgdg solution t={t!r}", "ASCII",
             "DATASET UNSTRUCTURED_GRID", f"POINTS {len(pts)} double"]
    lines += [f"{a!r} {b!r} 0.0" for a, b in pts.tolist()]
    lines.append(f"CELLS {len(quads)} {5 * len(quads)}")
    lines += ["4 " + " ".join(map(str, q)) for q in quads.tolist()]
    lines.append(f"CELL_TYPES {len(quads)}")
    lines += [str(VTK_QUAD)] * len(quads)
    lines.append(f"POINT_DATA {len(pts)}")
    lines.append("VECTORS velocity double")
    lines += [" ".join(repr(c) for c in v) for v in vel.tolist()]
    for name, val in fields.items():
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [repr(c) for c in val.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def write_checkpoint(path, u: np.ndarray, t: float) -> None:
    np.savez(path, u=u, t=t)


def read_checkpoint(path):
    with np.load(path) as f:
        return f["u"], float(f["t"])
