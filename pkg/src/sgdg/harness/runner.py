"""
Time loop
---------

.. autoclass:: RunSummary
.. autofunction:: run_case
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sgdg.errors import AdmissibilityError, LimiterError, StepError
from sgdg.harness.cases import CaseConfig
from sgdg.harness.io import write_checkpoint, write_csv, write_vtk
from sgdg.limiter import Limiter
from sgdg.solver import Scheme, make_scheme
from sgdg.timestep import StepReport, compute_dt, ssprk3_step

log = logging.getLogger(__name__)


@dataclass
class RunSummary:
    """Outcome of :func:`run_case`.

    ``drift`` is the change of the domain integrals of ``rho, rho v, rho E``
    relative to ``max(1, |initial|)``; ``limiter_active`` counts element
    activations of each limiter step over all stages.
    """

    case: str
    t: float
    steps: int
    wall: float
    drift: list
    limiter_active: dict
    binding: dict
    min_density: float
    u: np.ndarray = field(repr=False)
    scheme: Scheme = field(repr=False)
    outputs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"case": self.case, "t": self.t, "steps": self.steps, "wall_seconds": self.wall,
                "conservation_drift": self.drift, "limiter_active": self.limiter_active,
                "binding": self.binding, "min_density": self.min_density,
                "outputs": [str(p) for p in self.outputs]}


def _write_snapshot(out_dir: Path, k: int, config: CaseConfig, scheme, u, t):
    if config.dim == 1:
        path = out_dir / f"solution_{k:04d}.csv"
        write_csv(path, scheme.mesh.x, u, cv=float(config.species.cvs[0]))
    else:
        path = out_dir / f"solution_{k:04d}.vtk"
        write_vtk(path, scheme.mesh, u, config.species, t)
    return path


def run_case(config: CaseConfig, out_dir=None, surface: str = "hllc", mesh=None,
             callback=None, max_steps: int | None = None) -> RunSummary:
    """Integrate ``config`` to its end time with SSP-RK3 and the limiters.

    The step is the CFL estimate (or ``config.dt``), clipped to land on the
    end time and on the ``config.outputs`` evenly spaced snapshot times.
    ``callback(t, u, report)`` runs after every step. On a step or limiter
    failure the last good state is written to ``checkpoint.npz`` in
    ``out_dir`` and the error is re-raised.
    """
    t0 = time.perf_counter()
    mesh = config.build_mesh() if mesh is None else mesh
    scheme = make_scheme(mesh, config.flavor, surface, config.farfield_state())
    limiter = Limiter(config.species, config.eps)
    u = config.initial_state(mesh)
    u, _ = limiter(u, scheme.mass)
    scheme.check(u)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    totals0 = scheme.totals(u)[: config.dim + 2]

    targets = [config.t_end * k / (config.outputs + 1) for k in range(1, config.outputs + 1)]
    targets.append(config.t_end)
    outputs = []
    if out is not None:
        outputs.append(_write_snapshot(out, 0, config, scheme, u, 0.0))

    t, steps = 0.0, 0
    active = np.zeros(4, dtype=np.int64)
    binding = {"A": 0, "B": 0, "fixed": 0}
    min_rho = float(u[..., 0].min())
    for k, target in enumerate(targets, start=1):
        while t < target * (1 - 1e-14):
            try:
                if max_steps is not None and steps >= max_steps:
                    raise StepError(f"step budget of {max_steps} exhausted at t={t:.6g}")
                if config.dt is None:
                    rep = compute_dt(u, scheme, safety=config.cfl)
                else:
                    rep = StepReport(config.dt, np.nan, np.nan, "fixed")
                dt = min(rep.dt, target - t)
                u_new, rep = ssprk3_step(u, dt, scheme, limiter, rep)
            except (StepError, LimiterError, AdmissibilityError) as exc:
                if out is not None:
                    write_checkpoint(out / "checkpoint.npz", u, t)
                log.error("run aborted at t=%.6g after %d steps: %s", t, steps, exc)
                raise
            u, t, steps = u_new, t + dt, steps + 1
            binding[rep.binding] += 1
            for stage in rep.limiter_active:
                active += np.asarray(stage, dtype=np.int64)
            min_rho = min(min_rho, rep.min_density)
            if callback is not None:
                callback(t, u, rep)
        if out is not None:
            outputs.append(_write_snapshot(out, k, config, scheme, u, t))

    totals = scheme.totals(u)[: config.dim + 2]
    drift = (np.abs(totals - totals0) / np.maximum(1.0, np.abs(totals0))).tolist()
    summary = RunSummary(
        case=config.name, t=t, steps=steps, wall=time.perf_counter() - t0, drift=drift,
        limiter_active=dict(zip(("rho", "Gamma", "Pi", "rhoe"), active.tolist())),
        binding=binding, min_density=min_rho, u=u, scheme=scheme, outputs=outputs)
    if out is not None:
        np.savez(out / "state_final.npz", u=u, t=t)
        (out / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2))
    return summary
