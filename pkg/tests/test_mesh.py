import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgdg.errors import ConfigError, MeshError
from sgdg.mesh import (
    NFACES, build_metrics, normal_average, read_mesh, structured_mesh, uniform_mesh_1d, write_mesh)
from sgdg.ops1d import lobatto_operator


def _metric_sum_direct(el, D):
    """Independent loop evaluation of sum_k D_ik n_(i,k)j + D_jk n_i(j,k)."""
    P = D.shape[0]
    worst = 0.0
    for i in range(P):
        for j in range(P):
            acc = np.zeros(2)
            for k in range(P):
                acc += D[i, k] * normal_average(el, "xi", i, j, k)
                acc += D[j, k] * normal_average(el, "eta", i, j, k)
            worst = max(worst, np.abs(acc).max())
    return worst


def test_affine_square_element():
    op = lobatto_operator(3)
    s = op.nodes
    a, b = 0.4, 0.25
    x = np.stack(np.broadcast_arrays(0.5 * a * s[:, None], 0.5 * b * s[None, :]), axis=-1)
    J, ja_xi, ja_eta, face_J, face_n = build_metrics(x, op)
    np.testing.assert_allclose(J, a * b / 4, rtol=1e-14)
    np.testing.assert_allclose(ja_xi, np.broadcast_to([b / 2, 0.0], ja_xi.shape[1:]) + 0 * ja_xi,
                               atol=1e-15)
    np.testing.assert_allclose(ja_eta[..., 1], a / 2, rtol=1e-14)
    np.testing.assert_allclose(face_n[0, 0], np.tile([1.0, 0.0], (4, 1)), atol=1e-15)
    np.testing.assert_allclose(face_n[0, 1], np.tile([0.0, 1.0], (4, 1)), atol=1e-15)
    np.testing.assert_allclose(face_n[0, 2], np.tile([-1.0, 0.0], (4, 1)), atol=1e-15)


def test_cartesian_mesh():
    mesh = structured_mesh(4, 4, 2)
    np.testing.assert_allclose(mesh.volumes, 1 / 16, rtol=1e-14)
    assert mesh.metric_identity_residual() == 0.0
    assert normal_average(mesh.element(3), "xi", 0, 1, 2) == pytest.approx(
        mesh.ja_xi[3, 0, 1])


def test_warped_mesh_metric_identities():
    mesh = structured_mesh(4, 4, 4, warp=0.05)
    assert np.all(mesh.J > 0)
    assert mesh.metric_identity_residual() <= 1e-12
    assert _metric_sum_direct(mesh.element(5), mesh.op.D) <= 1e-12
    assert abs(mesh.volumes.sum() - 1.0) <= 1e-12


def test_normal_average_definition():
    el = structured_mesh(3, 3, 4, warp=0.05).element(4)
    for i, j, k in [(0, 1, 3), (2, 4, 1), (4, 0, 0)]:
        np.testing.assert_array_equal(normal_average(el, "xi", i, j, k),
                                      normal_average(el, "xi", k, j, i))
        np.testing.assert_array_equal(normal_average(el, "eta", i, j, k),
                                      normal_average(el, "eta", i, k, j))
    np.testing.assert_array_equal(normal_average(el, "xi", 2, 3, 2), el.ja_xi[2, 3])
    with pytest.raises(ValueError):
        normal_average(el, "zeta", 0, 0, 0)


def test_one_dimensional_element():
    mesh = uniform_mesh_1d(-1.0, 2.0, 3, 3)
    np.testing.assert_allclose(mesh.J, 0.5, rtol=1e-15)
    assert mesh.volumes.sum() == pytest.approx(3.0)
    assert mesh.x[0, 0] == -1.0 and mesh.x[-1, -1] == 2.0


@pytest.mark.parametrize("bad", [(0, 4), (4, 0)])
def test_empty_mesh_rejected(bad):
    with pytest.raises(ConfigError):
        structured_mesh(*bad, 2)


def test_folding_warp_rejected():
    with pytest.raises(MeshError, match="Jacobian"):
        structured_mesh(4, 4, 3, warp=0.3)


def test_degree_mismatch_rejected():
    x = structured_mesh(1, 1, 2).x
    with pytest.raises(MeshError):
        build_metrics(x, lobatto_operator(3))


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.floats(0.0, 0.06),
       st.booleans())
def test_mesh_invariants(nx, ny, p, warp, rotate):
    mesh = structured_mesh(nx, ny, p, warp=warp, rotate_seed=7 if rotate else None)
    assert abs(mesh.volumes.sum() - 1.0) <= 1e-12
    assert mesh.metric_identity_residual() <= 1e-12
    # every interior face node coincides with its neighbor's and normals are opposite
    trace = mesh.trace_index().reshape(mesh.nelements, NFACES, -1)
    xf = mesh.x.reshape(-1, 2)
    for e in range(mesh.nelements):
        for f in range(NFACES):
            a = mesh.face_points(e, f)
            b = xf[trace[e, f]]
            shift = b - a
            assert np.abs(shift - np.round(shift)).max() <= 1e-10


def test_face_normals_opposite_interior():
    mesh = structured_mesh(3, 3, 3, warp=0.05, periodic=(False, False))
    for e in range(mesh.nelements):
        for f in range(NFACES):
            e2 = mesh.nbr[e, f]
            if e2 < 0:
                continue
            nb = mesh.face_n[e2, mesh.nbr_face[e, f]][mesh.neighbor_node(e, f)]
            assert np.abs(mesh.face_n[e, f] + nb).max() <= 1e-10


def test_mesh_file_round_trip(tmp_path):
    mesh = structured_mesh(3, 2, 3, warp=0.04, rotate_seed=3,
                           periodic=(False, True), bc={"left": "symmetry", "right": "nonreflective"})
    path = tmp_path / "m.dgmesh"
    write_mesh(mesh, path)
    back = read_mesh(path)
    np.testing.assert_array_equal(back.x, mesh.x)
    np.testing.assert_array_equal(back.nbr, mesh.nbr)
    np.testing.assert_array_equal(back.bc, mesh.bc)
    np.testing.assert_array_equal(back.flip, mesh.flip)


def test_missing_mesh_file(tmp_path):
    with pytest.raises(ConfigError):
        read_mesh(tmp_path / "nope.dgmesh")


def test_unknown_boundary_tag():
    with pytest.raises(ConfigError):
        structured_mesh(2, 2, 1, periodic=(False, True), bc={"left": "wall"})
