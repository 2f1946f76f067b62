import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sgdg.thermo import conserved_from_primitive

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

AIR = dict(Gamma=2.5, Pi=0.0)


def _eos(gamma, pinf):
    return 1.0 / (gamma - 1.0), gamma * pinf / (gamma - 1.0)


@st.composite
def eos_params(draw, stiff=True):
    """``(Gamma, Pi)`` of a stiffened gas with gamma in [1.1, 5]."""
    gamma = draw(st.floats(1.1, 5.0))
    pinf = draw(st.floats(0.0, 3.0)) if stiff and draw(st.booleans()) else 0.0
    return _eos(gamma, pinf)


@st.composite
def states(draw, d=1, eos=None, stiff=True, vmax=3.0):
    """One admissible conserved state; ``eos`` fixes ``(Gamma, Pi)``."""
    Gamma, Pi = eos if eos is not None else draw(eos_params(stiff=stiff))
    rho = draw(st.floats(0.05, 20.0))
    p = draw(st.floats(0.01, 50.0))
    vel = np.array([draw(st.floats(-vmax, vmax)) for _ in range(d)])
    return conserved_from_primitive(rho, vel, p, Gamma, Pi)


@st.composite
def state_pairs(draw, d=1, pure=False, stiff=True):
    """Two admissible states; ``pure`` makes them share ``(Gamma, Pi)``."""
    eos = draw(eos_params(stiff=stiff))
    a = draw(states(d=d, eos=eos))
    b = draw(states(d=d, eos=eos if pure else None, stiff=stiff))
    return a, b


@st.composite
def unit_normals(draw, d=2):
    if d == 1:
        return np.array([draw(st.sampled_from([-1.0, 1.0]))])
    ang = draw(st.floats(0.0, 2 * np.pi))
    return np.array([np.cos(ang), np.sin(ang)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
