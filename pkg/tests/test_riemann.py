import numpy as np
import pytest
from hypothesis import given

from sgdg.errors import VacuumError
from sgdg.riemann import (
    exact_riemann, hllc_breakdown, hllc_fluctuations, rusanov_flux, wave_speed_estimates)
from sgdg.thermo import (
    admissible_mask, conserved_from_primitive, internal_energy, physical_flux_normal,
    sound_speed, specific_entropy)

from conftest import state_pairs, states, unit_normals

X = np.array([1.0])


def prim1(rho, u, p, gamma=1.4, pinf=0.0):
    return conserved_from_primitive(rho, np.array([u]), p, 1 / (gamma - 1),
                                    gamma * pinf / (gamma - 1))


def _pressure(u):
    return (internal_energy(u) - u[..., -1]) / u[..., -2]


# {{{ wave speeds

def test_wave_speeds_equal_states():
    u = prim1(1.3, 0.4, 2.0, 1.5, 0.2)
    sL, sR = wave_speed_estimates(u, u, X)
    c = sound_speed(u)
    assert sL == pytest.approx(0.4 - c, rel=1e-14)
    assert sR == pytest.approx(0.4 + c, rel=1e-14)


def test_wave_speeds_shock_interface_branch():
    # post-shock air against still gas; both sides evaluated with gamma = max = 5/3
    uL = prim1(0.386, 26.59, 100.0, 5 / 3)
    uR = prim1(0.1, -0.5, 1.0, 5 / 3)
    g = 5 / 3
    cL, cR = np.sqrt(g * 100 / 0.386), np.sqrt(g * 1 / 0.1)
    k = 0.5 * (g + 1)
    du = 26.59 + 0.5
    ctR = cR + k * max((100 - 1) / (0.386 * cL) + du, 0.0)
    ctL = cL + k * max((1 - 100) / (0.1 * ctR) + du, 0.0)
    sL, sR = wave_speed_estimates(uL, uR, X)
    assert ctR > cR
    assert sR == pytest.approx(-0.5 + ctR, rel=1e-14)
    assert sL == pytest.approx(26.59 - ctL, rel=1e-14)


@given(states(d=1))
def test_wave_speeds_symmetric_compression(u):
    rho, p = u[0], _pressure(u)
    v = abs(u[1] / rho) + 0.1
    uL = conserved_from_primitive(rho, np.array([v]), p, u[3], u[4])
    uR = conserved_from_primitive(rho, np.array([-v]), p, u[3], u[4])
    sL, sR = wave_speed_estimates(uL, uR, X)
    assert sL == pytest.approx(-sR, rel=1e-13)


@given(state_pairs(d=2), unit_normals(2))
def test_wave_speeds_bracket_normal_velocities(pair, n):
    uL, uR = pair
    sL, sR = wave_speed_estimates(uL, uR, n)
    assert sL < uL[1:3] @ n / uL[0]
    assert sR > uR[1:3] @ n / uR[0]

# }}}


# {{{ HLLC star region

def test_breakdown_equal_states():
    u = prim1(0.8, -0.3, 1.7, 1.9, 0.5)
    b = hllc_breakdown(u, u, X)
    assert b.sStar == pytest.approx(-0.3, rel=1e-14)
    assert b.pStar == pytest.approx(1.7, rel=1e-14)
    np.testing.assert_allclose(b.starL, u, rtol=1e-14)
    np.testing.assert_allclose(b.starR, u, rtol=1e-14)


@given(states(d=2), states(d=2), unit_normals(2))
def test_breakdown_material_interface(a, b, n):
    # same (p, v), arbitrary (rho, Gamma, Pi) jumps
    v = np.array([0.3, -0.7])
    p = 1.5
    uL = conserved_from_primitive(a[0], v, p, a[-2], a[-1])
    uR = conserved_from_primitive(b[0], v, p, b[-2], b[-1])
    br = hllc_breakdown(uL, uR, n)
    assert br.pStar == pytest.approx(p, rel=1e-13)
    assert br.sStar == pytest.approx(v @ n, rel=1e-13, abs=1e-14)


@pytest.mark.xfail(strict=True, reason="HLLC star values on Sod differ from the exact ones by "
                   "16% (p*) and 32% (s*); see ledger")
def test_breakdown_sod_close_to_exact():
    uL, uR = prim1(1.0, 0.0, 1.0), prim1(0.125, 0.0, 0.1)
    b = hllc_breakdown(uL, uR, X)
    ex = exact_riemann(uL, uR, X)
    assert b.pStar == pytest.approx(ex.pstar, rel=0.05)
    assert b.sStar == pytest.approx(ex.ustar, rel=0.05)


def test_sod_hllc_fan_contains_exact_fan():
    uL, uR = prim1(1.0, 0.0, 1.0), prim1(0.125, 0.0, 0.1)
    b = hllc_breakdown(uL, uR, X)
    ex = exact_riemann(uL, uR, X)
    head = -np.sqrt(1.4)
    rho_shocked = 0.125 * (ex.pstar / 0.1 + 1 / 6) / (ex.pstar / 0.1 / 6 + 1)
    shock = ex.ustar * rho_shocked / (rho_shocked - 0.125)
    assert b.sL <= head * (1 - 1e-14) + 1e-14
    assert b.sR >= shock
    assert b.sL < b.sStar < b.sR


def _star_flux(star, s, p):
    f = np.zeros_like(star)
    f[0] = star[0] * s
    f[1] = star[1] * s + p
    f[2] = (star[2] + p) * s
    return f


@given(state_pairs(d=1))
def test_fluctuation_branches_and_path_conservation(pair):
    uL, uR = pair
    for shift in (-40.0, -0.5, 0.0, 0.5, 40.0):
        a, b = uL.copy(), uR.copy()
        a[1] += a[0] * shift
        b[1] += b[0] * shift
        a[2] = internal_energy(uL) + 0.5 * a[1] ** 2 / a[0]
        b[2] = internal_energy(uR) + 0.5 * b[1] ** 2 / b[0]
        br = hllc_breakdown(a, b, X)
        fl = hllc_fluctuations(a, b, X)
        fa, fb = physical_flux_normal(a, X), physical_flux_normal(b, X)
        expect = fb - fa
        expect[3:] = br.sStar * (b[3:] - a[3:])
        scale = max(1.0, np.abs(fa).max(), np.abs(fb).max())
        assert np.abs(fl.dminus + fl.dplus - expect).max() <= 1e-13 * scale
        if br.sL >= 0:
            assert not fl.dminus.any()
        elif br.sR <= 0:
            assert not fl.dplus.any()
        elif br.sStar < 0:
            fstar = _star_flux(br.starR, br.sStar, br.pStar)
            ref = fstar - fa
            assert np.abs(fl.dminus[:3] - ref[:3]).max() <= 1e-12 * scale


def test_fluctuations_supersonic_right():
    uL = prim1(1.0, 5.0, 1.0)
    uR = prim1(0.5, 4.5, 0.7)
    fl = hllc_fluctuations(uL, uR, X)
    assert not fl.dminus.any()
    np.testing.assert_allclose(fl.dplus[:3], (physical_flux_normal(uR, X)
                                              - physical_flux_normal(uL, X))[:3], rtol=1e-14)


@given(states(d=2), unit_normals(2))
def test_fluctuations_consistent(u, n):
    fl = hllc_fluctuations(u, u, n)
    assert np.abs(fl.dminus).max() <= 1e-13 * max(1.0, np.abs(u).max())
    assert np.abs(fl.dplus).max() <= 1e-13 * max(1.0, np.abs(u).max())


@given(state_pairs(d=2), unit_normals(2))
def test_star_properties(pair, n):
    uL, uR = pair
    b = hllc_breakdown(uL, uR, n)
    assert b.sL < b.sStar < b.sR
    assert b.QL > 0 and b.QR > 0
    assert admissible_mask(b.starL) and admissible_mask(b.starR)
    assert abs(b.starL[0] * (b.sStar - b.sL) - b.QL) <= 1e-12 * b.QL
    assert abs(b.starR[0] * (b.sR - b.sStar) - b.QR) <= 1e-12 * b.QR
    for u, star, Q in ((uL, b.starL, b.QL), (uR, b.starR, b.QR)):
        p = _pressure(u)
        a0, a1 = p + Q**2 / u[0], b.pStar + Q**2 / star[0]
        assert abs(a1 - a0) <= 1e-11 * abs(a0)
        e0 = internal_energy(u) / u[0] - p**2 / (2 * Q**2)
        e1 = internal_energy(star) / star[0] - b.pStar**2 / (2 * Q**2)
        assert abs(e1 - e0) <= 1e-11 * (u[3] / u[0] + p**2 / (2 * Q**2))


@given(state_pairs(d=2), unit_normals(2))
def test_star_minimum_entropy_per_side(pair, n):
    uL, uR = pair
    b = hllc_breakdown(uL, uR, n)
    for u, star in ((uL, b.starL), (uR, b.starR)):
        assert specific_entropy(star, 1.0) >= specific_entropy(u, 1.0) - 1e-10

# }}}


# {{{ Rusanov

def test_rusanov_equal_states():
    u = prim1(1.0, 0.3, 2.0)
    np.testing.assert_allclose(rusanov_flux(u, u, X, 3.0), physical_flux_normal(u, X))


@given(state_pairs(d=2), unit_normals(2))
def test_rusanov_antisymmetry(pair, n):
    uL, uR = pair
    lam = 10.0
    a = rusanov_flux(uL, uR, n, lam)[:4]
    b = rusanov_flux(uR, uL, -n, lam)[:4]
    assert np.abs(a + b).max() <= 1e-12 * max(1.0, np.abs(a).max())


def test_rusanov_linear_in_lambda():
    uL, uR = prim1(1.0, 0.0, 1.0), prim1(0.5, 0.0, 1.0)
    f1, f2 = rusanov_flux(uL, uR, X, 1e6), rusanov_flux(uL, uR, X, 2e6)
    np.testing.assert_allclose(f2[:3] - f1[:3], -0.5e6 * (uR - uL)[:3], rtol=1e-9)
    assert f2[0] > 0

# }}}


# {{{ exact solver

def _sod_bisection():
    g = 1.4

    def f(p, rho, P):
        c = np.sqrt(g * P / rho)
        if p > P:
            A, B = 2 / ((g + 1) * rho), (g - 1) / (g + 1) * P
            return (p - P) * np.sqrt(A / (p + B))
        return 2 * c / (g - 1) * ((p / P) ** ((g - 1) / (2 * g)) - 1)

    lo, hi = 1e-8, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid, 1.0, 1.0) + f(mid, 0.125, 0.1) > 0:
            hi = mid
        else:
            lo = mid
    p = 0.5 * (lo + hi)
    return p, 0.5 * (f(p, 0.125, 0.1) - f(p, 1.0, 1.0))


def test_exact_sod():
    ex = exact_riemann(prim1(1.0, 0.0, 1.0), prim1(0.125, 0.0, 0.1), X)
    p, u = _sod_bisection()
    assert ex.pstar == pytest.approx(p, rel=1e-10)
    assert ex.ustar == pytest.approx(u, rel=1e-10)
    assert ex.pstar == pytest.approx(0.30313, abs=1e-5)
    assert ex.ustar == pytest.approx(0.92745, abs=1e-5)


def test_exact_constant_state():
    u = prim1(0.7, 0.2, 1.3, 2.0, 0.4)
    ex = exact_riemann(u, u, X)
    assert ex.pstar == pytest.approx(1.3, rel=1e-12)
    np.testing.assert_allclose(ex.sample(np.linspace(-3, 3, 7)), np.tile(u, (7, 1)), rtol=1e-12)


def test_exact_isolated_contact():
    uL = prim1(2.0, 1.0, 1.0, 1.4)
    uR = prim1(1.0, 1.0, 1.0, 1.5)
    ex = exact_riemann(uL, uR, X)
    assert ex.pstar == pytest.approx(1.0, rel=1e-12)
    assert ex.ustar == pytest.approx(1.0, rel=1e-12)
    s = ex.sample(np.array([0.5, 0.999, 1.001, 2.0]))
    np.testing.assert_allclose(s[:2], np.tile(uL, (2, 1)), rtol=1e-12)
    np.testing.assert_allclose(s[2:], np.tile(uR, (2, 1)), rtol=1e-12)


def test_exact_vacuum():
    with pytest.raises(VacuumError):
        exact_riemann(prim1(1.0, -20.0, 1.0), prim1(1.0, 20.0, 1.0), X)


@given(state_pairs(d=1))
def test_exact_star_continuity(pair):
    uL, uR = pair
    try:
        ex = exact_riemann(uL, uR, X)
    except VacuumError:
        return
    eps = 1e-9 * max(1.0, abs(ex.ustar))
    a, b = ex.sample(np.array([ex.ustar - eps, ex.ustar + eps]))
    assert _pressure(a) == pytest.approx(_pressure(b), rel=1e-6, abs=1e-9)
    assert a[1] / a[0] == pytest.approx(b[1] / b[0], rel=1e-6, abs=1e-9)

# }}}
