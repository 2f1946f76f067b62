"""
Test-case definitions
---------------------

A :class:`CaseConfig` is a JSON-serializable description of a run. Initial
data are given in primitive form ``(alpha_1, rho, velocity..., p)`` and
converted with the species table; the mixture parameters follow from the
void fraction. Built-in cases reproduce the standard setups in
nondimensional units.

.. autoclass:: CaseConfig
.. autofunction:: builtin_case
.. autofunction:: load_config
.. autofunction:: normal_shock
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from sgdg.errors import ConfigError
from sgdg.fluctuations import FLAVORS
from sgdg.mesh import read_mesh, structured_mesh, uniform_mesh_1d
from sgdg.riemann import exact_riemann
from sgdg.thermo import SpeciesTable, conserved_from_primitive, gamma_pi_mix

CASE_NAMES = ("density-wave", "isolated-contact", "shock-interface", "gas-water", "sod",
              "helium-bubble-advect", "helium-bubble", "hydrogen-bubble")

#: one nondimensional time unit of the helium cases in microseconds
HELIUM_TIME_UNIT_US = 76.19


@dataclass
class CaseConfig:
    """Everything needed to run a case.

    ``initial`` is a dict with a ``type`` key: ``"riemann"`` (``breaks``,
    ``states``), ``"density-wave"`` or ``"bubble"`` (``center``, ``radius``,
    ``inside``, ``outside`` and an optional ``shock`` with ``x``, ``state``
    and ``side`` of the shocked gas). ``outputs`` is the number of evenly
    spaced snapshots written in addition to the final state.
    """

    name: str
    dim: int
    species: SpeciesTable
    mesh: dict
    initial: dict
    t_end: float
    p: int = 3
    flavor: str = "cp"
    cfl: float = 0.9
    outputs: int = 0
    eps: float = 1e-8
    farfield: list | None = None
    dt: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {self.dim}")
        if not isinstance(self.p, (int, np.integer)) or self.p < 1:
            raise ConfigError(f"polynomial degree must be >= 1, got {self.p!r}")
        if not self.t_end > 0:
            raise ConfigError(f"end time must be positive, got {self.t_end}")
        if self.flavor not in FLAVORS:
            raise ConfigError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        if not 0 < self.cfl:
            raise ConfigError("cfl safety factor must be positive")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("fixed dt must be positive")
        if "file" in self.mesh and not Path(self.mesh["file"]).is_file():
            raise ConfigError(f"mesh file not found: {self.mesh['file']}")
        if self.initial.get("type") not in ("riemann", "density-wave", "bubble"):
            raise ConfigError(f"unknown initial condition type {self.initial.get('type')!r}")

    # {{{ serialization

    def to_dict(self) -> dict:
        d = asdict(self)
        d["species"] = self.species.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> CaseConfig:
        data = dict(data)
        try:
            data["species"] = SpeciesTable.from_dict(data["species"])
            return cls(**data)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad case description: {exc}") from exc

    # }}}

    # {{{ construction

    def build_mesh(self):
        m = self.mesh
        try:
            if self.dim == 1:
                return uniform_mesh_1d(m["a"], m["b"], int(m["nelements"]), self.p,
                                       periodic=bool(m.get("periodic", False)),
                                       bc=tuple(m.get("bc", ("nonreflective", "nonreflective"))))
            if "file" in m:
                mesh = read_mesh(m["file"])
                if mesh.p != self.p:
                    raise ConfigError(f"mesh file has degree {mesh.p}, case asks for {self.p}")
                return mesh
            return structured_mesh(int(m["nx"]), int(m["ny"]), self.p,
                                   warp=float(m.get("warp", 0.0)),
                                   extent=tuple(tuple(e) for e in m["extent"]),
                                   periodic=tuple(m.get("periodic", (True, True))),
                                   bc=m.get("bc"))
        except KeyError as exc:
            raise ConfigError(f"mesh description lacks {exc}") from exc

    def to_conserved(self, prim) -> np.ndarray:
        """``prim[..., 0] = alpha_1``, then ``rho``, velocity, ``p``."""
        prim = np.asarray(prim, dtype=float)
        a1 = prim[..., 0]
        if self.species.nspecies == 1:
            alphas = np.ones(a1.shape + (1,))
        else:
            alphas = np.stack([a1, 1.0 - a1], axis=-1)
        Gamma, Pi = gamma_pi_mix(alphas, self.species)
        return conserved_from_primitive(prim[..., 1], prim[..., 2:2 + self.dim],
                                        prim[..., 2 + self.dim], Gamma, Pi)

    def primitive_at(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Initial (``t = 0``) or translated (density wave) primitive data at ``x[..., d]``."""
        ic = self.initial
        kind = ic["type"]
        if kind == "riemann":
            xs = x[..., 0] if self.dim == 2 else x
            states = np.asarray(ic["states"], dtype=float)
            idx = np.searchsorted(np.asarray(ic["breaks"], dtype=float), xs, side="right")
            out = states[idx]
            if self.dim == 2 and out.shape[-1] == 4:
                out = np.insert(out, 3, 0.0, axis=-1)
            return out
        if kind == "density-wave":
            s = x[..., 0] + x[..., 1] - 2.0 * t
            out = np.empty(x.shape[:-1] + (5,))
            out[..., 0] = 0.5 + 0.25 * np.sin(4 * np.pi * s)
            out[..., 1] = 1.0 + 0.5 * np.sin(2 * np.pi * s)
            out[..., 2] = 1.0
            out[..., 3] = 1.0
            out[..., 4] = 1.0
            return out
        # bubble
        out = np.empty(x.shape[:-1] + (5,))
        out[...] = ic["outside"]
        shock = ic.get("shock")
        if shock is not None:
            behind = x[..., 0] > shock["x"] if shock["side"] == "right" else x[..., 0] < shock["x"]
            out[behind] = shock["state"]
        r = np.hypot(x[..., 0] - ic["center"][0], x[..., 1] - ic["center"][1])
        out[r < ic["radius"]] = ic["inside"]
        return out

    def initial_state(self, mesh) -> np.ndarray:
        return self.to_conserved(self.primitive_at(_nodes(mesh, self.dim)))

    def farfield_state(self):
        if self.farfield is None:
            return None
        return self.to_conserved(np.asarray(self.farfield, dtype=float))

    # }}}

    # {{{ reference solutions

    def has_reference(self) -> bool:
        kind = self.initial["type"]
        return kind == "density-wave" or (kind == "riemann" and self.dim == 1
                                          and len(self.initial["states"]) in (2, 3))

    def reference(self, x: np.ndarray, t: float) -> np.ndarray:
        """Exact conserved solution at ``x`` (1D Riemann cases and the density wave)."""
        if not self.has_reference():
            raise ConfigError(f"case {self.name!r} has no exact solution")
        if self.initial["type"] == "density-wave":
            return self.to_conserved(self.primitive_at(x, t))
        if t <= 0:
            return self.to_conserved(self.primitive_at(x))
        states = self.to_conserved(np.asarray(self.initial["states"], dtype=float))
        breaks = list(self.initial["breaks"])
        n = np.array([1.0])
        if len(states) == 2:
            sol = exact_riemann(states[0], states[1], n)
            xs = np.asarray(x, dtype=float)
            return sol.sample((xs.reshape(-1) - breaks[0]) / t).reshape(xs.shape + (5,))
        return _shock_interface_reference(states, breaks, np.asarray(x), t)

    # }}}


def _nodes(mesh, dim):
    return mesh.x if dim == 1 else mesh.x


def _shock_interface_reference(states, breaks, x, t):
    """Left state drives a single right-running shock into the middle state.

    Before the shock reaches the material interface the solution is the first
    Riemann problem plus the advected interface; afterwards it is the
    Riemann problem between the left and right states centered at the
    collision point, valid until reflected waves reach the left boundary.
    """
    n = np.array([1.0])
    first = exact_riemann(states[0], states[1], n)
    L = first.left
    if abs(first.pstar - L.p) > 1e-3 * (L.p + L.pinf) or abs(first.ustar - L.u) > 1e-3 * (abs(L.u) + 1.0):
        raise ConfigError("three-state data are not a single shock; no composite reference")
    mid = first.right
    g, P = mid.gamma, mid.P
    Ps = first.pstar + mid.pinf
    S = mid.u + mid.c * np.sqrt((g + 1) / (2 * g) * Ps / P + (g - 1) / (2 * g))
    t1 = (breaks[1] - breaks[0]) / (S - mid.u)
    x1 = breaks[1] + mid.u * t1
    flat = x.reshape(-1)
    if t <= t1:
        out = first.sample((flat - breaks[0]) / t)
        iface = breaks[1] + mid.u * t
        out[flat > iface] = states[2]
    else:
        out = exact_riemann(states[0], states[2], n).sample((flat - x1) / (t - t1))
    return out.reshape(x.shape + (5,))


# {{{ built-in cases

def normal_shock(rho1: float, p1: float, gamma: float, mach: float, pinf: float = 0.0):
    """Post-shock ``(rho2, p2, |u2 - u1|)`` for a shock of Mach ``mach`` into a still gas."""
    P1 = p1 + pinf
    c1 = np.sqrt(gamma * P1 / rho1)
    m2 = mach * mach
    rho2 = rho1 * (gamma + 1) * m2 / ((gamma - 1) * m2 + 2)
    P2 = P1 * (1 + 2 * gamma / (gamma + 1) * (m2 - 1))
    du = mach * c1 * (1 - rho1 / rho2)
    return float(rho2), float(P2 - pinf), float(du)


def _riemann_case(name, species, a, b, breaks, states, t_end, nelements=100, **kw):
    return CaseConfig(name=name, dim=1, species=species,
                      mesh={"a": a, "b": b, "nelements": nelements,
                            "bc": ["nonreflective", "nonreflective"]},
                      initial={"type": "riemann", "breaks": breaks, "states": states},
                      t_end=t_end, **kw)


def _equilibrium_density(species, i_gas, i_ref, rho_ref):
    """Density of species ``i_gas`` at the pressure and temperature of ``i_ref``."""
    g, cv = species.gammas, species.cvs
    return rho_ref * (g[i_ref] - 1) * cv[i_ref] / ((g[i_gas] - 1) * cv[i_gas])


def _helium_species():
    return SpeciesTable(gammas=(1.648, 1.4), pinfs=(0.0, 0.0), cvs=(6.0598, 1.7857))


def builtin_case(name: str, resolution: int | None = None, **overrides) -> CaseConfig:
    """Return the configuration of a named case.

    ``resolution`` sets the element count per unit length of the bubble
    cases and the number of elements of the others; ``overrides`` replace
    top-level fields.
    """
    if name not in CASE_NAMES:
        raise ConfigError(f"unknown case {name!r}; available: {', '.join(CASE_NAMES)}")
    cfg = _BUILDERS[name](resolution)
    for key, val in overrides.items():
        if not hasattr(cfg, key):
            raise ConfigError(f"unknown case field {key!r}")
        setattr(cfg, key, val)
    cfg.validate()
    return cfg


def _density_wave(res):
    n = res or 8
    return CaseConfig(
        name="density-wave", dim=2,
        species=SpeciesTable(gammas=(1.4, 3.0), pinfs=(0.0, 2.0), cvs=(1.0, 1.0)),
        mesh={"nx": n, "ny": n, "extent": [[0, 1], [0, 1]], "periodic": [True, True],
              "warp": 0.0},
        initial={"type": "density-wave"}, t_end=2.0)


def _isolated_contact(res):
    sp = SpeciesTable(gammas=(1.4, 1.5), pinfs=(0.0, 0.0), cvs=(1.0, 2.0))
    return _riemann_case("isolated-contact", sp, -0.5, 0.5, [0.0],
                         [[0.375, 2.0, 1.0, 1.0], [0.146342, 1.0, 1.0, 1.0]], 0.2,
                         nelements=res or 100)


def _shock_interface(res):
    sp = SpeciesTable(gammas=(1.4, 5.0 / 3.0), pinfs=(0.0, 0.0), cvs=(1.0, 2.5))
    return _riemann_case("shock-interface", sp, -1.0, 1.0, [-0.8, -0.2],
                         [[0.0, 0.386, 26.59, 100.0], [0.0, 0.1, -0.5, 1.0],
                          [1.0, 1.0, -0.5, 1.0]], 0.07, nelements=res or 100)


def _gas_water(res):
    sp = SpeciesTable(gammas=(1.4, 5.5), pinfs=(0.0, 1.505), cvs=(1.2, 0.073037))
    return _riemann_case("gas-water", sp, -5.0, 5.0, [0.0],
                         [[1.0, 1.241, 0.0, 2.753], [0.0, 0.991, 0.0, 3.059e-4]], 1.0,
                         nelements=res or 100)


def _sod(res):
    sp = SpeciesTable(gammas=(1.4,), pinfs=(0.0,), cvs=(1.0,))
    return _riemann_case("sod", sp, -0.5, 0.5, [0.0],
                         [[1.0, 1.0, 0.0, 1.0], [1.0, 0.125, 0.0, 0.1]], 0.2,
                         nelements=res or 100)


def _helium_bubble_advect(res):
    sp = _helium_species()
    n = res or 64
    p_air = 1.0 / 1.4
    rho_he = _equilibrium_density(sp, 0, 1, 1.0)
    return CaseConfig(
        name="helium-bubble-advect", dim=2, species=sp,
        mesh={"nx": n, "ny": n, "extent": [[0, 1], [0, 1]], "periodic": [True, True],
              "warp": 0.05},
        initial={"type": "bubble", "center": [0.5, 0.5], "radius": 0.2,
                 "inside": [1.0, rho_he, 1.0, 0.0, p_air],
                 "outside": [0.0, 1.0, 1.0, 0.0, p_air]},
        t_end=1.0, meta={"time_unit_us": HELIUM_TIME_UNIT_US})


def _helium_bubble(res):
    sp = _helium_species()
    per_unit = res or 21
    g_air = sp.gammas[1]
    p_air = 1.0 / g_air
    rho_he = _equilibrium_density(sp, 0, 1, 1.0)
    rho2, p2, du = normal_shock(1.0, p_air, g_air, 1.22)
    post = [0.0, rho2, -du, 0.0, p2]
    Lx, Ly = 6.5, 1.78
    return CaseConfig(
        name="helium-bubble", dim=2, species=sp,
        mesh={"nx": int(round(Lx * per_unit)), "ny": int(round(Ly * per_unit)),
              "extent": [[0, Lx], [0, Ly]], "periodic": [False, True],
              "bc": {"left": "nonreflective", "right": "nonreflective"}},
        initial={"type": "bubble", "center": [3.5, 0.89], "radius": 0.5,
                 "inside": [1.0, rho_he, 0.0, 0.0, p_air],
                 "outside": [0.0, 1.0, 0.0, 0.0, p_air],
                 "shock": {"x": 4.0, "state": post, "side": "right"}},
        p=2, t_end=102.0 / HELIUM_TIME_UNIT_US,
        meta={"time_unit_us": HELIUM_TIME_UNIT_US, "mach": 1.22,
              "pre_shock": [0.0, 1.0, 0.0, 0.0, p_air], "post_shock": post,
              "helium_density": rho_he})


def _hydrogen_bubble(res):
    sp = SpeciesTable(gammas=(1.41, 1.353), pinfs=(0.0, 0.0), cvs=(7.424, 0.523))
    per_unit = res or 4
    g_air = sp.gammas[1]
    p_air = 1.0 / g_air
    rho_h2 = _equilibrium_density(sp, 0, 1, 1.0)
    rho2, p2, du = normal_shock(1.0, p_air, g_air, 2.0)
    post = [0.0, rho2, du, 0.0, p2]
    Lx, Ly = 22.5, 7.5
    return CaseConfig(
        name="hydrogen-bubble", dim=2, species=sp,
        mesh={"nx": int(round(Lx * per_unit)), "ny": int(round(Ly * per_unit)),
              "extent": [[0, Lx], [0, Ly]], "periodic": [False, False],
              "bc": {"left": "supersonic-inflow", "right": "nonreflective",
                     "bottom": "symmetry", "top": "symmetry"}},
        initial={"type": "bubble", "center": [4.0, 0.0], "radius": 2.0,
                 "inside": [1.0, rho_h2, 0.0, 0.0, p_air],
                 "outside": [0.0, 1.0, 0.0, 0.0, p_air],
                 "shock": {"x": 1.0, "state": post, "side": "left"}},
        farfield=post, p=2, t_end=3.0,
        meta={"mach": 2.0, "pre_shock": [0.0, 1.0, 0.0, 0.0, p_air], "post_shock": post,
              "hydrogen_density": rho_h2})


_BUILDERS = {
    "density-wave": _density_wave,
    "isolated-contact": _isolated_contact,
    "shock-interface": _shock_interface,
    "gas-water": _gas_water,
    "sod": _sod,
    "helium-bubble-advect": _helium_bubble_advect,
    "helium-bubble": _helium_bubble,
    "hydrogen-bubble": _hydrogen_bubble,
}

# }}}


def load_config(path) -> CaseConfig:
    """Read a JSON case file.

    Either ``{"case": name, ...overrides}`` starting from a built-in case
    (``"mesh"`` entries are merged) or a full description with ``dim``,
    ``species``, ``mesh``, ``initial`` and ``t_end``.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    if "case" in data:
        data = dict(data)
        name = data.pop("case")
        res = data.pop("resolution", None)
        mesh = data.pop("mesh", None)
        cfg = builtin_case(name, res, **data)
        if mesh:
            cfg.mesh = {**copy.deepcopy(cfg.mesh), **mesh}
            cfg.validate()
        return cfg
    return CaseConfig.from_dict(data)
