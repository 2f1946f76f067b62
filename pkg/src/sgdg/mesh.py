r"""
Meshes and metric terms
-----------------------

Two-dimensional meshes are collections of isoparametric quadrangles whose
geometry is sampled at the tensor Gauss-Lobatto nodes. Arrays are indexed
``[element, i, j]`` with ``i`` running along :math:`\xi` and ``j`` along
:math:`\eta`. The contravariant vectors use the cross form

.. math::

    J\nabla\xi = (\partial_\eta y, -\partial_\eta x), \qquad
    J\nabla\eta = (-\partial_\xi y, \partial_\xi x),

which satisfies the discrete metric identities to round-off.

Faces are numbered counterclockwise starting from :math:`\xi = +1`:

====  ============  ==================
face  location      volume node of k
====  ============  ==================
0     ``xi = +1``   ``(p, k)``
1     ``eta = +1``  ``(k, p)``
2     ``xi = -1``   ``(0, k)``
3     ``eta = -1``  ``(k, 0)``
====  ============  ==================

.. autoclass:: Mesh1D
.. autoclass:: Mesh2D
.. autoclass:: Element
.. autofunction:: build_metrics
.. autofunction:: normal_average
.. autofunction:: uniform_mesh_1d
.. autofunction:: structured_mesh
.. autofunction:: read_mesh
.. autofunction:: write_mesh
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sgdg.errors import ConfigError, MeshError
from sgdg.ops1d import LobattoOperator, lobatto_operator

#: boundary condition tags and the integer codes used by the kernels
BC_CODES = {"supersonic-inflow": 1, "nonreflective": 2, "symmetry": 3}
BC_NAMES = {v: k for k, v in BC_CODES.items()}
INTERIOR = 0

NFACES = 4


def face_node_ij(face: int, k, p: int):
    """Volume indices ``(i, j)`` of node ``k`` on ``face``."""
    return [(p, k), (k, p), (0, k), (k, 0)][face]


def _bc_code(tag: str) -> int:
    try:
        return BC_CODES[tag]
    except KeyError:
        raise ConfigError(
            f"unknown boundary tag {tag!r}; expected 'periodic' or one of "
            f"{sorted(BC_CODES)}") from None


# {{{ 1D

@dataclass(frozen=True)
class Mesh1D:
    """Segments ``[x_e, x_{e+1}]`` with collocated GL nodes.

    Face 0 is the right end (``n = +1``), face 1 the left end (``n = -1``).
    """

    op: LobattoOperator
    vertices: np.ndarray
    periodic: bool
    bc: tuple[str, str] = ("nonreflective", "nonreflective")

    @property
    def p(self) -> int:
        return self.op.p

    @property
    def nelements(self) -> int:
        return self.vertices.size - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.vertices)

    @property
    def x(self) -> np.ndarray:
        a = self.vertices[:-1, None]
        return a + 0.5 * (self.op.nodes[None, :] + 1.0) * self.h[:, None]

    @property
    def J(self) -> np.ndarray:
        return np.repeat(0.5 * self.h[:, None], self.op.npoints, axis=1)

    @property
    def volumes(self) -> np.ndarray:
        return self.h

    @property
    def bc_codes(self) -> tuple[int, int]:
        if self.periodic:
            return INTERIOR, INTERIOR
        return _bc_code(self.bc[0]), _bc_code(self.bc[1])


def uniform_mesh_1d(a: float, b: float, nelements: int, p: int,
                    periodic: bool = False,
                    bc: tuple[str, str] = ("nonreflective", "nonreflective")) -> Mesh1D:
    if nelements < 1:
        raise ConfigError("need at least one element")
    if not b > a:
        raise ConfigError("empty interval")
    if not periodic:
        for tag in bc:
            _bc_code(tag)
    return Mesh1D(op=lobatto_operator(p), vertices=np.linspace(a, b, nelements + 1),
                  periodic=periodic, bc=tuple(bc))

# }}}


# {{{ 2D metrics

@dataclass(frozen=True)
class Element:
    """Geometry and metric terms of one quadrangle."""

    x: np.ndarray
    J: np.ndarray
    ja_xi: np.ndarray
    ja_eta: np.ndarray
    face_J: np.ndarray
    face_n: np.ndarray

    @property
    def volume(self) -> float:
        op = lobatto_operator(self.J.shape[0] - 1)
        return float(np.einsum("i,j,ij->", op.weights, op.weights, self.J))


def _surface_metrics(ja_xi, ja_eta):
    p = ja_xi.shape[1] - 1
    vec = np.stack([ja_xi[:, p, :], ja_eta[:, :, p], -ja_xi[:, 0, :], -ja_eta[:, :, 0]],
                   axis=1)
    Je = np.sqrt(np.sum(vec**2, axis=-1))
    return Je, vec / Je[..., None]


def build_metrics(x: np.ndarray, op: LobattoOperator):
    """Jacobians and contravariant vectors for nodal geometry ``x[e, i, j, :]``.

    Returns ``(J, ja_xi, ja_eta, face_J, face_n)``; raises :class:`MeshError`
    at the first non-positive Jacobian.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 3:
        x = x[None]
    if x.shape[1] != op.npoints or x.shape[2] != op.npoints:
        raise MeshError(
            f"geometry degree {x.shape[1] - 1} does not match solution degree {op.p}")
    D = op.D
    dxi = np.einsum("ik,ekjd->eijd", D, x)
    deta = np.einsum("jk,eikd->eijd", D, x)
    J = dxi[..., 0] * deta[..., 1] - deta[..., 0] * dxi[..., 1]
    bad = ~(J > 0)
    if np.any(bad):
        e, i, j = np.argwhere(bad)[0]
        raise MeshError(f"non-positive Jacobian {J[e, i, j]:.3e} in element {e} at node ({i}, {j})")
    ja_xi = np.stack([deta[..., 1], -deta[..., 0]], axis=-1)
    ja_eta = np.stack([-dxi[..., 1], dxi[..., 0]], axis=-1)
    face_J, face_n = _surface_metrics(ja_xi, ja_eta)
    return J, ja_xi, ja_eta, face_J, face_n


@dataclass(frozen=True)
class Mesh2D:
    """Conforming curved quadrangle mesh.

    ``nbr[e, f]`` is the neighbor element across face ``f`` (``-1`` on
    boundaries), ``nbr_face`` its local face and ``flip`` whether face node
    ``k`` maps to neighbor node ``p - k``. ``bc[e, f]`` holds the boundary
    code (0 for interior and periodic faces).
    """

    op: LobattoOperator
    x: np.ndarray
    nbr: np.ndarray
    nbr_face: np.ndarray
    flip: np.ndarray
    bc: np.ndarray
    J: np.ndarray = field(init=False, repr=False)
    ja_xi: np.ndarray = field(init=False, repr=False)
    ja_eta: np.ndarray = field(init=False, repr=False)
    face_J: np.ndarray = field(init=False, repr=False)
    face_n: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        J, ja_xi, ja_eta, face_J, face_n = build_metrics(self.x, self.op)
        for name, val in (("J", J), ("ja_xi", ja_xi), ("ja_eta", ja_eta),
                          ("face_J", face_J), ("face_n", face_n)):
            object.__setattr__(self, name, val)
        self._check_connectivity()

    @property
    def p(self) -> int:
        return self.op.p

    @property
    def nelements(self) -> int:
        return self.x.shape[0]

    @property
    def volumes(self) -> np.ndarray:
        w = self.op.weights
        return np.einsum("i,j,eij->e", w, w, self.J)

    def element(self, e: int) -> Element:
        return Element(x=self.x[e], J=self.J[e], ja_xi=self.ja_xi[e],
                       ja_eta=self.ja_eta[e], face_J=self.face_J[e], face_n=self.face_n[e])

    def face_points(self, e: int, f: int) -> np.ndarray:
        p = self.p
        k = np.arange(p + 1)
        i, j = face_node_ij(f, k, p)
        i, j = np.broadcast_arrays(i, j)
        return self.x[e, i, j]

    def neighbor_node(self, e: int, f: int) -> np.ndarray:
        k = np.arange(self.p + 1)
        return self.p - k if self.flip[e, f] else k

    def trace_index(self) -> np.ndarray:
        """Flat DOF index of the exterior trace of every face node, ``-1`` on boundaries."""
        K, P = self.nelements, self.p + 1
        out = -np.ones((K, NFACES, P), dtype=np.int64)
        k = np.arange(P)
        for f in range(NFACES):
            inner = self.nbr[:, f] >= 0
            e2 = self.nbr[inner, f]
            f2 = self.nbr_face[inner, f]
            kk = np.where(self.flip[inner, f][:, None], P - 1 - k[None, :], k[None, :])
            ii = np.choose(f2[:, None], [np.full_like(kk, P - 1), kk, np.zeros_like(kk), kk])
            jj = np.choose(f2[:, None], [kk, np.full_like(kk, P - 1), kk, np.zeros_like(kk)])
            out[inner, f] = (e2[:, None] * P + ii) * P + jj
        return out

    def metric_identity_residual(self) -> float:
        """Max over nodes of ``|sum_k D_ik n_(i,k)j + D_jk n_i(j,k)|``."""
        D = self.op.D
        n_xi = 0.5 * (self.ja_xi[:, :, None, :, :] + self.ja_xi[:, None, :, :, :])
        n_eta = 0.5 * (self.ja_eta[:, :, :, None, :] + self.ja_eta[:, :, None, :, :])
        r = np.einsum("ik,eikjd->eijd", D, n_xi) + np.einsum("jk,eijkd->eijd", D, n_eta)
        return float(np.abs(r).max())

    def _check_connectivity(self):
        K = self.nelements
        for e in range(K):
            for f in range(NFACES):
                e2 = self.nbr[e, f]
                if e2 < 0:
                    if self.bc[e, f] not in BC_NAMES:
                        raise MeshError(f"boundary face ({e}, {f}) has no valid condition")
                    continue
                f2 = self.nbr_face[e, f]
                if self.nbr[e2, f2] != e or self.nbr_face[e2, f2] != f:
                    raise MeshError(f"face ({e}, {f}) is not matched symmetrically")
                a = self.face_points(e, f)
                b = self.face_points(e2, f2)[self.neighbor_node(e, f)]
                shift = b - a
                if np.abs(shift - shift[0]).max() > 1e-10:
                    raise MeshError(f"face ({e}, {f}) does not coincide with its neighbor")
                if np.abs(shift[0]).max() <= 1e-10:
                    na = self.face_n[e, f]
                    nb = self.face_n[e2, f2][self.neighbor_node(e, f)]
                    if np.abs(na + nb).max() > 1e-10:
                        raise MeshError(f"face ({e}, {f}) normals are not opposite")


def normal_average(element: Element, direction: str, i: int, j: int, k: int) -> np.ndarray:
    """``n_(i,k)j`` for ``direction="xi"`` or ``n_i(j,k)`` for ``direction="eta"``."""
    if direction == "xi":
        return 0.5 * (element.ja_xi[i, j] + element.ja_xi[k, j])
    if direction == "eta":
        return 0.5 * (element.ja_eta[i, j] + element.ja_eta[i, k])
    raise ValueError(f"direction must be 'xi' or 'eta', got {direction!r}")

# }}}


# {{{ generators

def structured_mesh(nx: int, ny: int, p: int, warp: float = 0.0,
                    extent=((0.0, 1.0), (0.0, 1.0)),
                    periodic=(True, True),
                    bc: dict | None = None,
                    rotate_seed: int | None = None) -> Mesh2D:
    """Tensor mesh of ``nx * ny`` quadrangles, optionally warped.

    The warp displaces nodes by ``warp * L * sin(2 pi X) sin(2 pi Y)`` in both
    directions, with ``X, Y`` the normalized coordinates, so element faces
    become degree-``p`` curves while the domain boundary stays straight.
    ``bc`` maps ``left/right/bottom/top`` to boundary tags for non-periodic
    directions. ``rotate_seed`` randomly rotates each element's reference
    frame, giving an unstructured connectivity on the same geometry.
    """
    if nx < 1 or ny < 1:
        raise ConfigError(f"need nx, ny >= 1, got ({nx}, {ny})")
    op = lobatto_operator(p)
    (x0, x1), (y0, y1) = extent
    Lx, Ly = x1 - x0, y1 - y0
    if Lx <= 0 or Ly <= 0:
        raise ConfigError("empty extent")
    bc = dict(bc or {})
    for side, per in (("left", periodic[0]), ("right", periodic[0]),
                      ("bottom", periodic[1]), ("top", periodic[1])):
        if not per:
            _bc_code(bc.setdefault(side, "nonreflective"))

    s = 0.5 * (op.nodes + 1.0)
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    ix, iy = ix.ravel(), iy.ravel()
    X = (ix[:, None, None] + s[None, :, None]) / nx
    Y = (iy[:, None, None] + s[None, None, :]) / ny
    X, Y = np.broadcast_arrays(X, Y)
    bump = warp * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y)
    x = np.stack([x0 + Lx * (X + bump), y0 + Ly * (Y + bump)], axis=-1)

    K = nx * ny
    nbr = -np.ones((K, NFACES), dtype=np.int64)
    nbr_face = -np.ones((K, NFACES), dtype=np.int64)
    bcs = np.zeros((K, NFACES), dtype=np.int64)
    eid = lambda a, b: (b % ny) * nx + (a % nx)  # noqa: E731
    steps = [(1, 0, 2, periodic[0], "right"), (0, 1, 3, periodic[1], "top"),
             (-1, 0, 0, periodic[0], "left"), (0, -1, 1, periodic[1], "bottom")]
    for f, (dx, dy, f2, per, side) in enumerate(steps):
        jx, jy = ix + dx, iy + dy
        inside = (jx >= 0) & (jx < nx) & (jy >= 0) & (jy < ny)
        linked = inside | per
        nbr[linked, f] = eid(jx[linked], jy[linked])
        nbr_face[linked, f] = f2
        if not per:
            bcs[~inside, f] = _bc_code(bc[side])
    flip = np.zeros((K, NFACES), dtype=bool)

    if rotate_seed is not None:
        x, nbr, nbr_face, flip = _rotate_elements(x, nbr, nbr_face,
                                                  np.random.default_rng(rotate_seed), bcs)
        bcs = _rotate_elements.last_bc
    return Mesh2D(op=op, x=x, nbr=nbr, nbr_face=nbr_face, flip=flip, bc=bcs)


def _rotate_elements(x, nbr, nbr_face, rng, bcs):
    """Rotate each element's local frame by a random multiple of 90 degrees."""
    K = x.shape[0]
    turns = rng.integers(0, 4, size=K)
    xr = np.empty_like(x)
    for e in range(K):
        # np.rot90 maps old (a, b) to new (p - b, a): old face f becomes f + 1
        xr[e] = np.rot90(x[e], k=turns[e], axes=(0, 1))
    new_face = lambda e, f: (f + turns[e]) % NFACES  # noqa: E731
    nb = -np.ones_like(nbr)
    nf = -np.ones_like(nbr_face)
    bc = np.zeros_like(bcs)
    for e in range(K):
        for f in range(NFACES):
            g = new_face(e, f)
            bc[e, g] = bcs[e, f]
            if nbr[e, f] >= 0:
                e2 = nbr[e, f]
                nb[e, g] = e2
                nf[e, g] = new_face(e2, nbr_face[e, f])
    _rotate_elements.last_bc = bc
    flip = _orientations(xr, nb, nf)
    return xr, nb, nf, flip


def _face_xy(x, f):
    p = x.shape[0] - 1
    k = np.arange(p + 1)
    i, j = np.broadcast_arrays(*face_node_ij(f, k, p))
    return x[i, j]


def _orientations(x, nbr, nbr_face):
    """Decide node order on each matched face from the (possibly periodic) geometry."""
    K = x.shape[0]
    flip = np.zeros((K, NFACES), dtype=bool)
    for e in range(K):
        for f in range(NFACES):
            e2 = nbr[e, f]
            if e2 < 0:
                continue
            a = _face_xy(x[e], f)
            b = _face_xy(x[e2], nbr_face[e, f])
            same = b - a
            rev = b[::-1] - a
            flip[e, f] = np.ptp(rev, axis=0).max() < np.ptp(same, axis=0).max()
    return flip

# }}}


# {{{ file I/O

def write_mesh(mesh: Mesh2D, path) -> None:
    """Write the ASCII ``dgmesh`` format (node order: ``j`` outer, ``i`` inner)."""
    path = Path(path)
    p = mesh.p
    lines = [f"dgmesh 2 {p}", str(mesh.nelements)]
    for e in range(mesh.nelements):
        for j in range(p + 1):
            for i in range(p + 1):
                x, y = mesh.x[e, i, j]
                lines.append(f"{float(x)!r} {float(y)!r}")
    faces = []
    for e in range(mesh.nelements):
        for f in range(NFACES):
            e2 = mesh.nbr[e, f]
            if e2 < 0:
                faces.append(f"{e} {f} -1 {BC_NAMES[int(mesh.bc[e, f])]}")
            elif (e, f) < (e2, mesh.nbr_face[e, f]):
                faces.append(f"{e} {f} {e2} {mesh.nbr_face[e, f]} {int(mesh.flip[e, f])}")
    lines.append(str(len(faces)))
    lines.extend(faces)
    path.write_text("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh2D:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"mesh file not found: {path}")
    try:
        tokens = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
        head = tokens[0]
        if head[0] != "dgmesh" or head[1] != "2":
            raise MeshError(f"{path}: not a 2D dgmesh file")
        p = int(head[2])
        K = int(tokens[1][0])
        P = p + 1
        pos = 2
        x = np.empty((K, P, P, 2))
        for e in range(K):
            for j in range(P):
                for i in range(P):
                    x[e, i, j] = [float(t) for t in tokens[pos][:2]]
                    pos += 1
        nfaces = int(tokens[pos][0])
        pos += 1
        nbr = -np.ones((K, NFACES), dtype=np.int64)
        nbr_face = -np.ones((K, NFACES), dtype=np.int64)
        flip = np.zeros((K, NFACES), dtype=bool)
        bc = np.zeros((K, NFACES), dtype=np.int64)
        seen = np.zeros((K, NFACES), dtype=bool)
        for row in tokens[pos:pos + nfaces]:
            e, f = int(row[0]), int(row[1])
            if seen[e, f]:
                raise MeshError(f"face ({e}, {f}) listed twice")
            seen[e, f] = True
            if int(row[2]) < 0:
                bc[e, f] = _bc_code(row[3])
                continue
            e2, f2, o = int(row[2]), int(row[3]), int(row[4])
            if seen[e2, f2]:
                raise MeshError(f"face ({e2}, {f2}) listed twice")
            seen[e2, f2] = True
            nbr[e, f], nbr_face[e, f], flip[e, f] = e2, f2, bool(o)
            nbr[e2, f2], nbr_face[e2, f2], flip[e2, f2] = e, f, bool(o)
    except (IndexError, ValueError) as exc:
        raise MeshError(f"{path}: malformed mesh file ({exc})") from exc
    if not seen.all():
        e, f = np.argwhere(~seen)[0]
        raise MeshError(f"{path}: face ({e}, {f}) missing from the face list")
    return Mesh2D(op=lobatto_operator(p), x=x, nbr=nbr, nbr_face=nbr_face, flip=flip, bc=bc)

# }}}
