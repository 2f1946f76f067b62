import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sgdg.errors import LimiterError
from sgdg.limiter import EPS, Limiter, limit_element
from sgdg.thermo import SpeciesTable, admissible_mask, conserved_from_primitive, internal_energy

SP = SpeciesTable(gammas=(1.4, 3.0), pinfs=(0.0, 2.0), cvs=(1.0, 1.0))
mG, MG, mP, MP = Limiter(SP).bounds


def _element(rho, Gamma, Pi, vel=0.2, p=1.0):
    rho, Gamma, Pi = (np.asarray(a, float) for a in (rho, Gamma, Pi))
    n = max(rho.size, Gamma.size, Pi.size)
    v = np.full((n, 1), vel)
    return conserved_from_primitive(np.broadcast_to(rho, (n,)), v, p,
                                    np.broadcast_to(Gamma, (n,)), np.broadcast_to(Pi, (n,)))


def test_compliant_element_untouched():
    u = _element([1.0, 1.2, 0.8, 1.0], 2.0, 1.0)
    for joint in (False, True):
        v, rep = limit_element(u, species=SP, joint=joint)
        np.testing.assert_array_equal(v, u)
        assert np.all(rep.theta == 1.0)


@pytest.mark.parametrize("joint", [False, True])
def test_density_theta_closed_form(joint):
    n = 4
    rho = np.full(n, (n - EPS / 2) / (n - 1))
    rho[0] = EPS / 2
    u = _element(rho, 2.0, 1.0)
    assert (u[:, 0].mean()) == pytest.approx(1.0, rel=1e-15)
    v, rep = limit_element(u, species=SP, joint=joint)
    assert rep.theta[0, 0] == pytest.approx((1 - EPS) / (1 - EPS / 2), rel=1e-14)
    assert v[:, 0].min() == pytest.approx(EPS, rel=1e-6)


@pytest.mark.parametrize("joint", [False, True])
def test_gamma_theta_closed_form(joint):
    G = np.array([MG + 0.3, 1.5, 1.6, 1.7])
    u = _element(1.0, G, 1.0)
    A = G.mean()
    v, rep = limit_element(u, species=SP, joint=joint)
    assert rep.theta[0, 1] == pytest.approx((MG - A) / (G.max() - A), rel=1e-14)
    assert v[:, 3].max() == pytest.approx(MG, rel=1e-14)
    assert v[:, 3].max() <= MG


def test_joint_scaling_keeps_pressure_velocity():
    G = np.array([MG + 0.3, 1.0, 0.7, 1.7])
    Pi = np.array([MP + 1.0, 0.0, 0.5, 2.0])
    u = _element([1.0, 0.3, 0.8, 1.1], G, Pi, vel=0.4, p=2.0)
    v, _ = limit_element(u, species=SP, joint=True)
    p = (internal_energy(v) - v[:, 4]) / v[:, 3]
    np.testing.assert_allclose(p, 2.0, rtol=1e-13)
    np.testing.assert_allclose(v[:, 1] / v[:, 0], 0.4, rtol=1e-13)
    w, _ = limit_element(u, species=SP, joint=False)
    assert np.abs((internal_energy(w) - w[:, 4]) / w[:, 3] - 2.0).max() > 1e-3


def test_energy_limiter():
    u = _element([1.0, 1.0, 1.0, 1.0], 2.0, 1.0, p=1.0)
    u[0, 2] = internal_energy(u[0]) * 0.0 + 0.5 * u[0, 1] ** 2 / u[0, 0] + 0.1  # rho e below p_inf
    u[1:, 2] += 1.0
    v, rep = limit_element(u, species=SP)
    assert rep.theta[0, 3] < 1.0
    assert np.all(admissible_mask(v))
    pinf = v[:, 4] / (v[:, 3] + 1)
    assert np.all(internal_energy(v) - pinf >= EPS * (1 - 1e-6))


def test_bad_average_raises():
    u = _element([1.0, 1.0], [MG + 0.5, MG + 0.6], 1.0)
    with pytest.raises(LimiterError, match="Gamma"):
        Limiter(SP)(u[None], np.ones((1, 2)))
    u = _element([-1.0, 0.5], 2.0, 1.0)
    with pytest.raises(LimiterError, match="density"):
        Limiter(SP)(u[None], np.ones((1, 2)))


def test_averages_argument_checked():
    u = _element([1.0, 1.0], 2.0, 1.0)
    with pytest.raises(ValueError):
        limit_element(u, averages=u[0] * 2, species=SP)
    limit_element(u, averages=u.mean(axis=0), species=SP)


@st.composite
def perturbed_elements(draw):
    n = draw(st.integers(2, 16))
    alpha = draw(st.floats(0.0, 1.0))
    Gamma = alpha * SP.Gamma_i[0] + (1 - alpha) * SP.Gamma_i[1]
    Pi = alpha * SP.Pi_i[0] + (1 - alpha) * SP.Pi_i[1]
    rho = draw(st.floats(0.1, 5.0))
    p = draw(st.floats(0.05, 5.0))
    base = conserved_from_primitive(rho, np.array([draw(st.floats(-2, 2))]), p, Gamma, Pi)
    mass = draw(arrays(float, n, elements=st.floats(0.2, 2.0)))
    pert = draw(arrays(float, (n, 5), elements=st.floats(-2.0, 2.0))) * np.abs(base)
    pert -= (mass[:, None] * pert).sum(0) / mass.sum()
    u = base + pert
    return u, mass, base


@pytest.mark.parametrize("joint", [False, True])
@given(data=perturbed_elements())
def test_limiter_properties(joint, data):
    u, mass, base = data
    mean0 = mass @ u / mass.sum()
    if not (admissible_mask(mean0) and mG <= mean0[3] <= MG and mP <= mean0[4] <= MP):
        return
    lim = Limiter(SP, joint=joint)
    v, _ = lim(u[None].copy(), mass[None])
    mean1 = mass @ v[0] / mass.sum()
    assert np.abs(mean1 - mean0).max() <= 1e-13 * np.maximum(1.0, np.abs(mean0)).max()
    w, _ = lim(v.copy(), mass[None])
    assert np.abs(w - v).max() <= 1e-13 * np.maximum(1.0, np.abs(v)).max()
    assert v[0, :, 0].min() >= EPS * (1 - 1e-6)
    assert mG <= v[0, :, 3].min() and v[0, :, 3].max() <= MG
    assert mP <= v[0, :, 4].min() and v[0, :, 4].max() <= MP
    assert np.all(admissible_mask(v))
