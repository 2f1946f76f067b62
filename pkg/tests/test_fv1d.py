import numpy as np
import pytest

from reference import fv_l1_error, fv_principle_run
from sgdg.errors import ConfigError, StepError
from sgdg.fv1d import make_grid, max_dt, run_3pt, step_3pt
from sgdg.harness.cases import builtin_case
from sgdg.riemann import hllc_fluctuations
from sgdg.thermo import (
    admissible_mask, conserved_from_primitive, mixture_pressure, physical_flux_normal)

RIEMANN_CASES = ("isolated-contact", "shock-interface", "gas-water", "sod")


def _initial(cfg):
    return lambda x: cfg.to_conserved(cfg.primitive_at(x))


def test_uniform_grid_unchanged():
    u0 = conserved_from_primitive(1.2, np.array([0.3]), 0.8, 2.5, 0.4)
    grid = make_grid(0.0, 1.0, 20, lambda x: np.broadcast_to(u0, x.shape + (5,)).copy())
    new = step_3pt(grid, max_dt(grid))
    np.testing.assert_array_equal(new.u, grid.u)


def test_isolated_contact_keeps_p_and_u():
    cfg = builtin_case("isolated-contact")
    grid = make_grid(-0.5, 0.5, 100, _initial(cfg))
    for _ in range(100):
        grid = step_3pt(grid, max_dt(grid))
    p = mixture_pressure(grid.u)
    v = grid.u[:, 1] / grid.u[:, 0]
    assert np.abs(p - 1.0).max() <= 1e-12
    assert np.abs(v - 1.0).max() <= 1e-12
    assert np.ptp(grid.u[:, 3]) > 0.1  # the interface is still there


def test_pure_phase_rows_unchanged_and_conservative():
    cfg = builtin_case("sod")
    grid = make_grid(-0.5, 0.5, 60, _initial(cfg))
    dt = max_dt(grid)
    new = step_3pt(grid, dt)
    np.testing.assert_array_equal(new.u[:, 3:], grid.u[:, 3:])
    # conservative HLLC update: D-(uj, uj+1) + D+(uj-1, uj) = F_{j+1/2} - F_{j-1/2}
    up = np.concatenate([grid.u[:1], grid.u, grid.u[-1:]])
    fl = hllc_fluctuations(up[:-1], up[1:], np.array([1.0]))
    F = physical_flux_normal(up[:-1], np.array([1.0])) + fl.dminus
    expected = grid.u - dt / grid.h * (F[1:] - F[:-1])
    np.testing.assert_allclose(new.u[:, :3], expected[:, :3], rtol=1e-13, atol=1e-14)


def test_cfl_violation_raises():
    cfg = builtin_case("sod")
    grid = make_grid(-0.5, 0.5, 50, _initial(cfg))
    with pytest.raises(StepError):
        step_3pt(grid, max_dt(grid, cfl=0.6))
    step_3pt(grid, max_dt(grid, cfl=0.5))


def test_grid_validation():
    with pytest.raises(ConfigError):
        make_grid(1.0, 0.0, 10, lambda x: x)
    cfg = builtin_case("sod")
    grid = make_grid(-0.5, 0.5, 10, _initial(cfg))
    with pytest.raises(ConfigError):
        run_3pt(grid, 0.0)


@pytest.mark.parametrize("case", RIEMANN_CASES)
def test_principles(case):
    cfg = builtin_case(case)
    errors = []
    for n in (100, 200):
        grid, worst = fv_principle_run(cfg, n)
        assert np.all(admissible_mask(grid.u))
        assert worst["Gamma"] <= 0.0 and worst["Pi"] <= 0.0
        assert worst["entropy"] <= 1e-10
        assert grid.t == pytest.approx(cfg.t_end, rel=1e-14)
        errors.append(fv_l1_error(cfg, grid))
    assert errors[1] < errors[0]
