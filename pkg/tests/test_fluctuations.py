import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgdg.errors import DomainError
from sgdg.fluctuations import (
    FLAVORS, conservative_flux, cp_fluctuations, ec_fluctuations, fluctuations, log_mean,
    mean_jump, nonconservative_parts, physical_flux, volume_tilde)
from sgdg.thermo import conserved_from_primitive, entropy_variables, mixture_pressure

from conftest import eos_params, state_pairs, states, unit_normals

finite = st.floats(-10.0, 10.0)


def _rotate(u, R):
    v = u.copy()
    v[1:3] = R @ u[1:3]
    return v


# {{{ building blocks

@given(states(d=2), st.floats(0, 2 * np.pi), unit_normals(2))
def test_physical_flux_rotation(u, ang, n):
    R = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    lhs = physical_flux(_rotate(u, R), R @ n)
    rhs = _rotate(physical_flux(u, n), R)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())


def test_physical_flux_at_rest():
    u = conserved_from_primitive(1.2, np.zeros(2), 0.8, 2.5, 0.3)
    n = np.array([0.6, 0.8])
    np.testing.assert_allclose(physical_flux(u, n), [0, 0.8 * 0.6, 0.8 * 0.8, 0, 0, 0],
                               atol=1e-15)


def test_physical_flux_rejects_non_unit():
    u = conserved_from_primitive(1.0, np.zeros(2), 1.0, 2.5, 0.0)
    with pytest.raises(ValueError):
        physical_flux(u, np.array([1.0, 1.0]))


def test_mean_jump_trivial():
    assert mean_jump(3.0, 3.0) == (3.0, 0.0)


@given(finite, finite, finite, finite, finite, finite)
def test_leibniz(a0, a1, b0, b1, c0, c1):
    am, aj = mean_jump(a0, a1)
    bm, bj = mean_jump(b0, b1)
    cm, cj = mean_jump(c0, c1)
    assert abs((a1 * b1 - a0 * b0) - (am * bj + bm * aj)) <= 1e-13 * 100
    triple = a1 * b1 * c1 - a0 * b0 * c0
    expand = am * bm * cj + am * cm * bj + bm * cm * aj + 0.25 * aj * bj * cj
    assert abs(triple - expand) <= 1e-13 * 1000
    assert mean_jump(a1, a0)[1] == -aj


def test_log_mean_values():
    assert log_mean(2.0, 2.0) == 2.0
    assert log_mean(1.0, np.e) == pytest.approx(np.e - 1.0, rel=1e-15)
    a = 1.7
    b = a * (1 + 1e-9)
    assert log_mean(a, b) == pytest.approx(0.5 * (a + b), rel=1e-14)
    with pytest.raises(DomainError):
        log_mean(0.0, 1.0)


@given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_log_mean_bounds(a, b):
    m = log_mean(a, b)
    assert min(a, b) * (1 - 1e-15) <= m <= max(a, b) * (1 + 1e-15)
    assert m == pytest.approx(float(log_mean(b, a)), rel=1e-15)


@given(st.floats(0.1, 10.0), st.floats(-1e-4, 1e-4))
def test_log_mean_series_switch(a, r):
    b = a * (1 + r)
    q = (b - a) / a
    exact = a * q / np.log1p(q) if q != 0 else a
    assert log_mean(a, b) == pytest.approx(exact, rel=1e-13)

# }}}


# {{{ consistency and structure

@pytest.mark.parametrize("flavor", FLAVORS)
@given(u=states(d=2), n=unit_normals(2))
def test_consistency(flavor, u, n):
    fl = fluctuations(u, u, n, flavor)
    assert np.abs(fl.dminus).max() <= 1e-13 * max(1.0, np.abs(u).max())
    assert np.abs(fl.dplus).max() <= 1e-13 * max(1.0, np.abs(u).max())
    f = physical_flux(u, n)
    assert np.abs(conservative_flux(u, u, n, flavor) - f).max() <= 1e-13 * max(1.0, np.abs(f).max())
    assert np.abs(volume_tilde(u, u, n, flavor) - 2 * f).max() <= 1e-12 * max(1.0, np.abs(f).max())


@pytest.mark.parametrize("flavor", FLAVORS)
@given(pair=state_pairs(d=2), n=unit_normals(2))
def test_symmetry_and_nonconservative_rows(flavor, pair, n):
    um, up = pair
    h = conservative_flux(um, up, n, flavor)
    h_sw = conservative_flux(up, um, n, flavor)
    assert np.abs(h - h_sw).max() <= 1e-13 * max(1.0, np.abs(h).max())
    dt = volume_tilde(um, up, n, flavor)
    assert np.abs(dt[:4] - 2 * h[:4]).max() <= 1e-12 * max(1.0, np.abs(h).max())
    vm = um[1:3] @ n / um[0]
    vp = up[1:3] @ n / up[0]
    jump = up[4:] - um[4:]
    # symmetrized rows carry the left normal velocity
    np.testing.assert_allclose(dt[4:], vm * jump, rtol=1e-13, atol=1e-14)
    # d-(u-, u+) + d+(u-, u+) = mean(v.n) [[.]]
    dm, dp = nonconservative_parts(um, up, n)
    np.testing.assert_allclose((dm + dp)[4:], 0.5 * (vm + vp) * jump, rtol=1e-13, atol=1e-14)


@given(pair=state_pairs(d=1, pure=True), n=unit_normals(1))
def test_pure_phase_no_nonconservative_part(pair, n):
    dm, dp = nonconservative_parts(*pair, n)
    assert not dm.any() and not dp.any()

# }}}


# {{{ contact preservation

def _dp_dv(u, du):
    """First-order change of (p, v) along du at fixed (Gamma, Pi) algebra."""
    rho, m = u[0], u[1:3]
    v = m / rho
    p = mixture_pressure(u)
    Gamma = u[4]
    drhoe = du[3] - v @ du[1:3] + 0.5 * (v @ v) * du[0]
    dp = (drhoe - du[5] - p * du[4]) / Gamma
    dv = (du[1:3] - v * du[0]) / rho
    return dp, dv


@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.05, 20.0),
       st.floats(-2, 2), st.floats(-2, 2), eos_params(), eos_params(), unit_normals(2))
def test_cp_preserves_uniform_pressure_velocity(r1, r2, p, vx, vy, eos1, eos2, n):
    v = np.array([vx, vy])
    um = conserved_from_primitive(r1, v, p, *eos1)
    up = conserved_from_primitive(r2, v, p, *eos2)
    fl = cp_fluctuations(um, up, n)
    h = conservative_flux(um, up, n, "cp")
    scale = max(1.0, np.abs(h).max())
    # momentum flux splits as v h_rho + p n
    assert np.abs(h[1:3] - v * h[0] - p * n).max() <= 1e-13 * scale
    for u, D in ((um, fl.dminus), (up, fl.dplus)):
        dp, dv = _dp_dv(u, D)
        assert abs(dp) <= 1e-13 * scale * max(1.0, 1 / u[4])
        assert np.abs(dv).max() <= 1e-13 * scale / u[0]


def test_cp_example_pair():
    v, p = np.array([1.0, 0.0]), 1.0
    um = conserved_from_primitive(2.0, v, p, 2.5, 0.0)
    up = conserved_from_primitive(1.0, v, p, 2.0, 3.0)
    n = np.array([1.0, 0.0])
    fl = cp_fluctuations(um, up, n)
    for u, D in ((um, fl.dminus), (up, fl.dplus)):
        dp, dv = _dp_dv(u, D)
        assert abs(dp) <= 1e-13 and np.abs(dv).max() <= 1e-13


def test_cp_pure_phase_is_euler_mean_flux():
    um = conserved_from_primitive(1.0, np.array([0.3]), 1.0, 2.5, 0.0)
    up = conserved_from_primitive(0.5, np.array([-0.2]), 0.4, 2.5, 0.0)
    n = np.array([1.0])
    rho, v, p, E = 0.75, 0.05, 0.7, 0.5 * (um[2] + up[2])
    np.testing.assert_allclose(conservative_flux(um, up, n, "cp")[:3],
                               [rho * v, rho * v * v + p, (E + p) * v], rtol=1e-14)

# }}}


# {{{ entropy conservation

def _ec_condition(um, up, n, cv):
    fl = ec_fluctuations(um, up, n)
    em, ep = entropy_variables(um, cv), entropy_variables(up, cv)
    res = em.theta @ fl.dminus + ep.theta @ fl.dplus - (ep.q - em.q) @ n
    return abs(res), max(np.abs(em.q).max(), np.abs(ep.q).max(), 1.0)


@given(pair=state_pairs(d=2, pure=True), n=unit_normals(2), cv=st.floats(0.1, 10.0))
def test_entropy_conservation_condition_pure_phase(pair, n, cv):
    res, scale = _ec_condition(*pair, n, cv)
    assert res <= 1e-12 * scale


def test_entropy_conservation_condition_air_and_stiffened(rng):
    for gamma, pinf in ((1.4, 0.0), (5.5, 1.505)):
        Gamma, Pi = 1 / (gamma - 1), gamma * pinf / (gamma - 1)
        for _ in range(50):
            um = conserved_from_primitive(rng.uniform(0.1, 3), rng.uniform(-1, 1, 2),
                                          rng.uniform(0.1, 3), Gamma, Pi)
            up = conserved_from_primitive(rng.uniform(0.1, 3), rng.uniform(-1, 1, 2),
                                          rng.uniform(0.1, 3), Gamma, Pi)
            a = rng.uniform(0, 2 * np.pi)
            res, scale = _ec_condition(um, up, np.array([np.cos(a), np.sin(a)]), 1.0)
            assert res <= 1e-12 * scale

# }}}
