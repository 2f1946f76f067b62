r"""
Semi-discrete residual
----------------------

For every collocation node the residual is

.. math::

    R^{ij}_\kappa = \omega_i\omega_j \sum_k \Big( D_{ik}\tilde{D}_X(U^{ij}, U^{kj}, n_{(i,k)j})
        + D_{jk}\tilde{D}_X(U^{ij}, U^{ik}, n_{i(j,k)}) \Big)
        + \sum_{e, k} \phi^{ij}_\kappa(x_e^k)\, \omega_k J_e^k D^-(U^{ij}, u^+, n_e^k),

and the nodal time derivative is :math:`-R^{ij}_\kappa / (\omega_i\omega_j J^{ij}_\kappa)`.
Boundary conditions enter through ghost exterior states.

Arrays hold conserved states with the node axes in front: ``u[K, P, nv]`` in
one dimension and ``u[K, P, P, nv]`` in two.

.. autoclass:: FieldState
.. autoclass:: Scheme
.. autofunction:: make_scheme
.. autofunction:: residual
.. autofunction:: cell_average
.. autofunction:: entropy_balance
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sgdg import _kernels as kern
from sgdg.errors import ConfigError, DomainError
from sgdg.fluctuations import FLAVORS, fluctuations
from sgdg.mesh import NFACES, Mesh1D, Mesh2D, face_node_ij
from sgdg.riemann import hllc_fluctuations
from sgdg.thermo import check_admissible, entropy_variables

SURFACES = ("hllc", "cp", "ec")


@dataclass
class FieldState:
    """Nodal DOFs and time."""

    u: np.ndarray
    t: float = 0.0

    def copy(self) -> FieldState:
        return FieldState(self.u.copy(), self.t)


@dataclass(frozen=True)
class FaceNodes:
    """Per-element list of face quadrature nodes.

    ``inner``/``outer`` are flat DOF indices (``outer = -1`` on boundaries),
    ``weight = omega_k J_e^k`` and ``ratio`` is the geometric factor of the
    time-step condition A.
    """

    inner: np.ndarray
    outer: np.ndarray
    outer_elem: np.ndarray
    bc: np.ndarray
    normal: np.ndarray
    weight: np.ndarray
    ratio: np.ndarray


def _face_nodes_1d(mesh: Mesh1D) -> FaceNodes:
    K, P = mesh.nelements, mesh.p + 1
    e = np.arange(K)
    inner = np.stack([e * P + P - 1, e * P], axis=1)
    right, left = e + 1, e - 1
    bcr, bcl = mesh.bc_codes
    if mesh.periodic:
        right, left = right % K, left % K
    outer = np.stack([right * P, left * P + P - 1], axis=1)
    oe = np.stack([right, left], axis=1)
    bad = (oe < 0) | (oe >= K)
    outer[bad] = -1
    oe[bad] = -1
    bc = np.zeros((K, 2), dtype=np.int64)
    bc[:, 0] = np.where(bad[:, 0], bcr, 0)
    bc[:, 1] = np.where(bad[:, 1], bcl, 0)
    normal = np.zeros((K, 2, 1))
    normal[:, 0, 0], normal[:, 1, 0] = 1.0, -1.0
    weight = np.ones((K, 2))
    # omega_tilde J at an end node is omega_0 h/2 on both sides for uniform segments
    wJ = mesh.op.weights[0] * mesh.J[:, 0]
    wJo = np.where(oe >= 0, wJ[np.maximum(oe, 0)], np.inf)
    ratio = weight / np.minimum(wJ[:, None], wJo)
    return FaceNodes(inner, outer, oe, bc, normal, weight, ratio)


def _omega_tilde_2d(w):
    """``omega_i omega_j / 2`` at vertices and ``omega_i omega_j`` elsewhere."""
    wt = np.outer(w, w)
    for i in (0, -1):
        for j in (0, -1):
            wt[i, j] *= 0.5
    return wt


def _face_nodes_2d(mesh: Mesh2D) -> FaceNodes:
    K, p = mesh.nelements, mesh.p
    P = p + 1
    w = mesh.op.weights
    k = np.arange(P)
    trace = mesh.trace_index()
    wtJ = _omega_tilde_2d(w)[None] * mesh.J
    inner = np.empty((K, NFACES * P), dtype=np.int64)
    bc = np.zeros((K, NFACES * P), dtype=np.int64)
    oe = np.repeat(mesh.nbr, P, axis=1)
    normal = mesh.face_n.reshape(K, NFACES * P, 2).copy()
    weight = (w[None, None, :] * mesh.face_J).reshape(K, NFACES * P)
    wt_in = np.empty((K, NFACES * P))
    for f in range(NFACES):
        i, j = np.broadcast_arrays(*face_node_ij(f, k, p))
        sl = slice(f * P, (f + 1) * P)
        inner[:, sl] = (np.arange(K)[:, None] * P + i[None]) * P + j[None]
        bc[:, sl] = mesh.bc[:, f][:, None]
        wt_in[:, sl] = wtJ[:, i, j]
    outer = trace.reshape(K, NFACES * P)
    flat_wt = wtJ.reshape(-1)
    wt_out = np.where(outer >= 0, flat_wt[np.maximum(outer, 0)], np.inf)
    ratio = weight / np.minimum(wt_in, wt_out)
    return FaceNodes(inner, outer, oe, bc, normal, weight, ratio)


@dataclass(frozen=True)
class Scheme:
    """A mesh with the volume/interface fluctuation choice and boundary data.

    ``surface`` selects the interface fluctuation: ``"hllc"`` (default) or a
    two-point flavor, the latter only for entropy-conservation checks.
    ``farfield`` is the prescribed exterior state of supersonic inflow faces.
    """

    mesh: Mesh1D | Mesh2D
    flavor: str = "cp"
    surface: str = "hllc"
    farfield: np.ndarray | None = None
    faces: FaceNodes = field(init=False, repr=False)
    mass: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ConfigError(f"unknown volume flavor {self.flavor!r}, expected one of {FLAVORS}")
        if self.surface not in SURFACES:
            raise ConfigError(f"unknown interface solver {self.surface!r}, expected one of {SURFACES}")
        faces = (_face_nodes_1d(self.mesh) if self.dim == 1 else _face_nodes_2d(self.mesh))
        if np.any(faces.bc == 1) and self.farfield is None:
            raise ConfigError("supersonic-inflow boundary needs a far-field state")
        w = self.mesh.op.weights
        if self.dim == 1:
            mass = w[None, :] * self.mesh.J
        else:
            mass = np.outer(w, w)[None] * self.mesh.J
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "mass", mass)

    @property
    def dim(self) -> int:
        return 1 if isinstance(self.mesh, Mesh1D) else 2

    @property
    def nv(self) -> int:
        return self.dim + 4

    @property
    def node_shape(self) -> tuple:
        P = self.mesh.p + 1
        return (self.mesh.nelements,) + (P,) * self.dim

    def _farfield(self):
        if self.farfield is None:
            return np.zeros(self.nv)
        return np.asarray(self.farfield, dtype=float).reshape(self.nv)

    def check(self, u: np.ndarray) -> None:
        if u.shape != self.node_shape + (self.nv,):
            raise ValueError(f"state shape {u.shape} does not match {self.node_shape + (self.nv,)}")
        check_admissible(u, "DOF (element, node)")

    def flat_primitives(self, u):
        uf = np.ascontiguousarray(u.reshape(-1, self.nv))
        return uf, kern.primitives(uf, self.dim)

    def residual(self, u: np.ndarray, check: bool = True) -> np.ndarray:
        if check:
            self.check(u)
        uf, prim = self.flat_primitives(u)
        R = np.zeros_like(uf)
        op = self.mesh.op
        flavor = kern.CP if self.flavor == "cp" else kern.EC
        K, P = self.mesh.nelements, op.npoints
        if self.dim == 1:
            kern.volume_1d(prim, op.D, op.weights, flavor, K, P, R)
        else:
            kern.volume_2d(prim, op.D, op.weights, self.mesh.ja_xi, self.mesh.ja_eta,
                           flavor, K, P, R)
        f = self.faces
        surf = SURFACES.index(self.surface)
        kern.surface(uf, prim, f.inner, f.outer, f.bc, f.normal, f.weight,
                     self._farfield(), surf, self.dim, R)
        R = R.reshape(u.shape)
        if not np.all(np.isfinite(R)):
            raise DomainError("non-finite residual")
        return R

    def rhs(self, u: np.ndarray, check: bool = True) -> np.ndarray:
        """Nodal time derivative ``-R / (omega omega J)``."""
        return -self.residual(u, check=check) / self.mass[..., None]

    def cell_averages(self, u: np.ndarray) -> np.ndarray:
        axes = tuple(range(1, self.dim + 1))
        m = self.mass[..., None]
        return np.sum(m * u, axis=axes) / np.sum(self.mass, axis=axes)[:, None]

    def totals(self, u: np.ndarray) -> np.ndarray:
        """Integrals of every conserved component over the domain."""
        return np.tensordot(self.mass, u, axes=self.mass.ndim)


def make_scheme(mesh, flavor: str = "cp", surface: str = "hllc", farfield=None) -> Scheme:
    return Scheme(mesh=mesh, flavor=flavor, surface=surface,
                  farfield=None if farfield is None else np.asarray(farfield, dtype=float))


def residual(state, mesh, flavor: str = "cp", farfield=None, surface: str = "hllc") -> np.ndarray:
    """Residual ``R`` of the nodal DOFs ``state`` (array or :class:`FieldState`)."""
    u = state.u if isinstance(state, FieldState) else np.asarray(state, dtype=float)
    return make_scheme(mesh, flavor, surface, farfield).residual(u)


def cell_average(state, mesh) -> np.ndarray:
    """``sum omega omega J U / |kappa|`` for every element."""
    u = state.u if isinstance(state, FieldState) else np.asarray(state, dtype=float)
    w = mesh.op.weights
    if isinstance(mesh, Mesh1D):
        m = w[None, :] * mesh.J
        return np.einsum("ei,eiv->ev", m, u) / m.sum(axis=1)[:, None]
    m = np.outer(w, w)[None] * mesh.J
    return np.einsum("eij,eijv->ev", m, u) / m.sum(axis=(1, 2))[:, None]


# {{{ entropy diagnostics

@dataclass(frozen=True)
class EntropyBalance:
    """``rate[e] = |kappa| d<eta>/dt`` and ``flux[e] = sum omega_k J_e^k Q`` per element."""

    rate: np.ndarray
    flux: np.ndarray

    @property
    def production(self) -> np.ndarray:
        return self.rate + self.flux

    @property
    def total_rate(self) -> float:
        return float(self.rate.sum())


def _face_traces(scheme: Scheme, u):
    """Interior/exterior face traces, normals and weights as flat arrays."""
    f = scheme.faces
    uf = u.reshape(-1, scheme.nv)
    u_in = uf[f.inner]
    u_out = uf[np.maximum(f.outer, 0)].copy()
    ff = scheme._farfield()
    d = scheme.dim
    for e, s in np.argwhere(f.outer < 0):
        kern.ghost_state(u_in[e, s], f.bc[e, s], f.normal[e, s], ff, d, u_out[e, s])
    return u_in, u_out, f.normal, f.weight


def entropy_balance(state, scheme: Scheme, cv: float) -> EntropyBalance:
    """Semi-discrete entropy budget of a pure-phase field.

    The rate is ``-sum theta . R`` over each element, and the interface term
    uses ``Q = (q- + q+).n/2 + theta-.D-/2 - theta+.D+/2`` with the scheme's
    interface fluctuation.
    """
    u = state.u if isinstance(state, FieldState) else np.asarray(state, dtype=float)
    d = scheme.dim
    G, Pi = u[..., d + 2], u[..., d + 3]
    if np.ptp(G) > 1e-12 * np.abs(G).max() or np.ptp(Pi) > 1e-12 * max(np.abs(Pi).max(), 1.0):
        raise ConfigError("entropy balance needs a pure-phase field (uniform Gamma and Pi)")
    R = scheme.residual(u)
    ent = entropy_variables(u, cv)
    axes = tuple(range(1, d + 2))
    rate = -np.sum(ent.theta * R, axis=axes)

    u_in, u_out, n, wgt = _face_traces(scheme, u)
    if scheme.surface == "hllc":
        fl = hllc_fluctuations(u_in, u_out, n, check=False)
    else:
        fl = fluctuations(u_in, u_out, n, scheme.surface)
    e_in, e_out = entropy_variables(u_in, cv), entropy_variables(u_out, cv)
    Q = (0.5 * np.sum((e_in.q + e_out.q) * n, axis=-1)
         + 0.5 * np.sum(e_in.theta * fl.dminus, axis=-1)
         - 0.5 * np.sum(e_out.theta * fl.dplus, axis=-1))
    return EntropyBalance(rate=rate, flux=np.sum(wgt * Q, axis=1))

# }}}
