"""Pure-Neumann Poisson solve and the weighted-estimate witness.

Solves ``lap(phi) = rhs`` with zero normal flux and ``int phi = 0`` by
conjugate gradients on the negated seven-point Laplacian.  The constant null
vector is deflated by projecting every residual and search direction onto the
mean-zero subspace, which keeps the operator symmetric and the mean exactly
zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import ScalarField, VectorField, div, grad
from .errors import ConvergenceError, ParameterError, SolvabilityError
from .norms import lp_norm, weighted_norm

DEFAULT_TOL = 1e-10
DEFAULT_MU = 0.75


@dataclass
class NeumannSolveReport:
    iterations: int
    residual: float
    relative_residual: float
    mean: float
    converged: bool
    weighted_ratio: float | None = None


def _project_mean(x):
    return x - x.mean()


def solve_neumann(rhs: ScalarField, tol: float = DEFAULT_TOL, maxiter: int | None = None):
    """Return ``(phi, report)`` for ``lap(phi) = rhs``, ``d_n phi = 0``, ``int phi = 0``.

    Raises :class:`SolvabilityError` when ``int rhs`` is not (relatively) zero
    and :class:`ConvergenceError` if CG stalls before reaching ``tol``.
    """
    g = rhs.grid
    f = rhs.flat
    scale = max(1.0, float(np.max(np.abs(f))))
    integral = float(np.sum(f)) * g.cell_volume
    if abs(integral) > tol * g.spec.volume * scale:
        raise SolvabilityError(
            f"Neumann problem is not solvable: int rhs = {integral:.3e} "
            f"(tolerance {tol * g.spec.volume * scale:.1e})"
        )
    A = -g.lap_matrix
    b = _project_mean(-f)
    bnorm = float(np.linalg.norm(b))
    maxiter = maxiter or 10 * g.n_cells
    x = np.zeros_like(b)
    if bnorm == 0.0:
        phi = ScalarField(g, x.reshape(g.cell_shape))
        return phi, NeumannSolveReport(0, 0.0, 0.0, 0.0, True)

    dinv = 1.0 / A.diagonal()
    r = b.copy()
    z = _project_mean(dinv * r)
    d = z.copy()
    rz = float(r @ z)
    it = 0
    converged = False
    for it in range(1, maxiter + 1):
        Ad = A @ d
        alpha = rz / float(d @ Ad)
        x += alpha * d
        r -= alpha * Ad
        r = _project_mean(r)
        if np.linalg.norm(r) <= tol * bnorm:
            converged = True
            break
        z = _project_mean(dinv * r)
        rz_new = float(r @ z)
        d = z + (rz_new / rz) * d
        rz = rz_new

    x = _project_mean(x)
    true_res = g.lap_matrix @ x - _project_mean(f)
    res = float(np.linalg.norm(true_res))
    report = NeumannSolveReport(
        iterations=it,
        residual=res,
        relative_residual=res / bnorm,
        mean=float(x.mean()),
        converged=converged,
    )
    if not converged:
        raise ConvergenceError(f"Neumann CG did not converge in {maxiter} iterations", report)
    return ScalarField(g, x.reshape(g.cell_shape)), report


def potential_correction(b: VectorField, tol: float = DEFAULT_TOL):
    """Solve ``lap(phi) = -div b`` and return ``(phi, report)``."""
    return solve_neumann(-div(b), tol=tol)


@dataclass
class WeightedRatio:
    grad_phi_l3: float
    div_b_weighted: float
    ratio: float
    mu: float


def verify_weighted_estimate(b: VectorField, phi: ScalarField, mu: float = DEFAULT_MU) -> WeightedRatio:
    """Ratio ``||grad phi||_{L3} / ||div b||_{L_{3,mu}}``; zero when ``b`` vanishes."""
    if not (2.0 / 3.0 < mu <= 1.0):
        raise ParameterError(f"weight exponent must lie in (2/3, 1], got {mu}")
    gphi = lp_norm(grad(phi), 3)
    wdiv = weighted_norm(div(b), 0, 3, mu)
    ratio = 0.0 if wdiv == 0.0 else gphi / wdiv
    return WeightedRatio(gphi, wdiv, ratio, mu)


@dataclass
class RatioTracker:
    """Collects weighted-estimate ratios over runs; the max is the empirical constant."""

    ratios: list = field(default_factory=list)

    def add(self, item: WeightedRatio) -> None:
        self.ratios.append(item.ratio)

    @property
    def constant(self) -> float:
        return max(self.ratios) if self.ratios else 0.0

    def spread(self) -> float:
        """Relative spread ``(max - min) / min`` of the nonzero ratios."""
        vals = [r for r in self.ratios if r > 0]
        if len(vals) < 2:
            return 0.0
        return (max(vals) - min(vals)) / min(vals)
