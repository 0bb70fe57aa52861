"""Pressure-projection stepper used to cross-check the Galerkin solver.

Works on the full velocity ``v`` with the same spatial forms.  Each RK2
stage takes an explicit step on the interior faces, imposes the inflow and
outflow data on the boundary faces and removes the gradient part with a
Neumann pressure solve.  For steady data this is algebraically the Galerkin
scheme over the complete discrete solenoidal space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import ScalarField, StaggeredGrid, VectorField
from .errors import BlowUpError
from .galerkin import Forcing, Forms
from .hopf import BoundaryFlux
from .poisson import solve_neumann


@dataclass(eq=False)
class ProjectionOracle:
    grid: StaggeredGrid
    nu: float
    gamma: float
    flux: BoundaryFlux
    forcing: Forcing | None = None
    transport_on: bool = True
    tol: float = 1e-12

    def __post_init__(self):
        self.forms = Forms(self.grid, self.nu, self.gamma)
        s2m, s2p = self.grid.patches["S2-"], self.grid.patches["S2+"]
        self._in = s2m.face_index
        self._out = s2p.face_index
        self._lat = self.grid.patches["S1"].face_index
        self._int = self.grid.interior_faces
        self.last_reports = []

    def _tendency(self, v: np.ndarray, t: float) -> np.ndarray:
        f = np.zeros(self.grid.n_faces) if self.forcing is None else self.forcing(t).values
        r = self.forms.mass(f) - self.forms.K @ v
        if self.transport_on:
            r -= self.forms.transport(v, v)
        return r / self.forms.weights

    def project(self, y: np.ndarray, t: float) -> np.ndarray:
        """Impose boundary data at ``t`` and return the discretely solenoidal part."""
        g = self.grid
        y = np.array(y, dtype=float)
        d1, d2 = self.flux.profiles(g, t)
        y[self._in] = d1
        y[self._out] = d2
        y[self._lat] = 0.0
        rhs = ScalarField(g, (g.div_matrix @ y).reshape(g.cell_shape))
        p, rep = solve_neumann(rhs, tol=self.tol)
        self.last_reports.append(rep)
        y[self._int] -= (g.grad_matrix @ p.flat)[self._int]
        return y

    def initial(self, v0: VectorField | None, t: float = 0.0) -> VectorField:
        y = np.zeros(self.grid.n_faces) if v0 is None else v0.values
        return VectorField(self.grid, self.project(y, t))

    def step(self, v: VectorField, t: float, dt: float) -> VectorField:
        """Midpoint RK2 step from ``(v, t)`` to ``t + dt``."""
        self.last_reports = []
        x = v.values
        half = self.project(x + 0.5 * dt * self._tendency(x, t), t + 0.5 * dt)
        new = self.project(x + dt * self._tendency(half, t + 0.5 * dt), t + dt)
        if not np.all(np.isfinite(new)):
            raise BlowUpError(f"projection stepper produced non-finite values at t={t + dt:.4g}",
                              {"t": t + dt, "dt": dt})
        return VectorField(self.grid, new)


def oracle_step(v: VectorField, t: float, dt: float, oracle: ProjectionOracle) -> VectorField:
    return oracle.step(v, t, dt)
