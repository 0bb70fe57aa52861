"""Galerkin evolution of the homogenised velocity ``w = v - delta``.

The trial/test space is the null space of the MAC divergence restricted to
fields with zero normal component on the whole boundary.  Forms:

* transport, skew-symmetrised: ``c(u, v, psi) = 1/2 [(u.grad v, psi) - (u.grad psi, v)]``
* viscous: ``(nu/2) (D(v), D(psi))`` with ``D = grad + grad^T``
* slip: ``gamma sum_alpha (v.tau_alpha, psi.tau_alpha)_{S1}``

Boundary tractions of the lift enter weakly: the load is
``(f - delta_t, psi) - c(delta, delta, psi) - a(delta, psi)``, which equals
``(F, psi) + (B_1, psi.tau)_{S1} + nu (B_2, psi.tau)_{S2}`` after integration
by parts.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .domain import (
    StaggeredGrid,
    VectorField,
    boundary_strain,
    boundary_trace,
    to_cells,
)
from .errors import BlowUpError, CapacityError, ShapeError
from .hopf import BoundaryFlux, HopfParams, LiftFields, build_lift

log = logging.getLogger(__name__)

Forcing = Callable[[float], VectorField]


# -- basis -------------------------------------------------------------------------

@dataclass(eq=False)
class GalerkinBasis:
    """Orthonormal (in the face L2 product) discretely solenoidal fields.

    ``vectors`` has shape ``(n_faces, N)``; ``strain_levels`` are the
    eigenvalues of ``||D(.)||^2`` used to order the modes smooth-first.
    """

    grid: StaggeredGrid
    vectors: np.ndarray
    strain_levels: np.ndarray
    max_dim: int

    @property
    def N(self) -> int:
        return self.vectors.shape[1]

    def mode(self, k: int) -> VectorField:
        return VectorField(self.grid, self.vectors[:, k])

    def gram(self) -> np.ndarray:
        W = self.grid.face_weights
        return self.vectors.T @ (W[:, None] * self.vectors)

    def synthesize(self, C) -> VectorField:
        return VectorField(self.grid, self.vectors @ np.asarray(C, dtype=float))


def nullspace_dimension(grid: StaggeredGrid) -> int:
    """Dimension of ``{v : div v = 0, v.n = 0 on S}`` (connected grid: rank = cells - 1)."""
    return len(grid.interior_faces) - (grid.n_cells - 1)


def build_divfree_basis(grid: StaggeredGrid, N: int | None = None) -> GalerkinBasis:
    """Orthonormal basis of the discrete solenoidal, impermeable space.

    The null space of the divergence (interior faces only) is computed by SVD
    and rotated into eigenvectors of the strain energy, so that truncating to
    the first ``N`` modes keeps the smoothest fields.  Sign convention: the
    largest-magnitude entry of each mode is positive.
    """
    ii = grid.interior_faces
    D = grid.div_matrix[:, ii].toarray()
    Z = sla.null_space(D)
    max_dim = Z.shape[1]
    if N is None:
        N = max_dim
    if N < 1 or N > max_dim:
        raise CapacityError(f"requested {N} modes; the discrete space has dimension {max_dim}", max_dim)
    S = grid.strain_matrix[:, ii]
    SZ = S @ Z
    E = grid.cell_volume * (SZ.T @ SZ)
    # interior faces all carry weight V, so W-orthonormal = Z / sqrt(V)
    levels, U = np.linalg.eigh(E / grid.cell_volume)
    modes = Z @ U[:, :N]
    # first entry within rounding of the peak, so symmetric modes with tied
    # magnitudes get the same sign whatever N is
    mag = np.abs(modes)
    idx = np.argmax(mag >= (1.0 - 1e-8) * mag.max(axis=0), axis=0)
    signs = np.sign(modes[idx, np.arange(N)])
    modes = modes * signs / np.sqrt(grid.cell_volume)
    vectors = np.zeros((grid.n_faces, N))
    vectors[ii] = modes
    return GalerkinBasis(grid, vectors, levels[:N], max_dim)


# -- forms -------------------------------------------------------------------------

class Forms:
    """Sparse assembly of the bilinear/trilinear forms on one grid."""

    def __init__(self, grid: StaggeredGrid, nu: float, gamma: float):
        self.grid = grid
        self.nu = nu
        self.gamma = gamma
        V = grid.cell_volume
        S = grid.strain_matrix
        self.viscous = (0.5 * nu * V) * (S.T @ S)
        s1 = grid.patches["S1"]
        A = sp.diags(s1.areas)
        self.tangent = [grid.tangent_trace_matrix("S1", a) for a in (1, 2)]
        self.slip = gamma * sum(T.T @ A @ T for T in self.tangent)
        self.K = (self.viscous + self.slip).tocsr()
        self.weights = grid.face_weights
        self._I = grid.interp_matrix
        self._G = grid.vgrad_matrix
        self._IT = self._I.T.tocsr()
        self._GT = self._G.T.tocsr()

    def transport(self, u, v) -> np.ndarray:
        """Covector of ``psi -> c(u, v, psi)`` (u transports v); arrays of face values."""
        nc = self.grid.n_cells
        V = self.grid.cell_volume
        uc = (self._I @ u).reshape(3, nc)
        vc = (self._I @ v).reshape(3, nc)
        Gv = (self._G @ v).reshape(3, 3, nc)
        conv = np.einsum("jc,ijc->ic", uc, Gv)
        first = self._IT @ (V * conv.ravel())
        outer = np.einsum("ic,jc->ijc", vc, uc)
        second = self._GT @ (V * outer.ravel())
        return 0.5 * (first - second)

    def trilinear(self, u, v, psi) -> float:
        return float(self.transport(u, v) @ psi)

    def viscous_form(self, u, psi) -> float:
        return float(psi @ (self.viscous @ u))

    def slip_form(self, u, psi) -> float:
        return float(psi @ (self.slip @ u))

    def mass(self, f) -> np.ndarray:
        return self.weights * f


# -- sources -----------------------------------------------------------------------

@dataclass(eq=False)
class SourceTerms:
    F: VectorField
    delta: VectorField      # lift, for the skew-form boundary correction
    B1: np.ndarray          # (n_S1, 2): B_{1 alpha}
    B2_in: np.ndarray       # (n_S2, 2) on x3 = -a
    B2_out: np.ndarray      # (n_S2, 2) on x3 = a
    t: float = 0.0


def _cells_to_faces(grid: StaggeredGrid, cell_vec: np.ndarray) -> np.ndarray:
    """Average a cell vector (3, nx, ny, nz) to the matching faces, extrapolating at walls."""
    out = np.empty(grid.n_faces)
    for c in range(3):
        q = np.moveaxis(cell_vec[c], c, 0)
        f = np.empty((q.shape[0] + 1,) + q.shape[1:])
        f[1:-1] = 0.5 * (q[1:] + q[:-1])
        f[0] = 1.5 * q[0] - 0.5 * q[1]
        f[-1] = 1.5 * q[-1] - 0.5 * q[-2]
        out[grid.face_slice(c)] = np.moveaxis(f, 0, c).ravel()
    return out


def _traction(field: VectorField, patch):
    p = field.grid.patch(patch)
    D = boundary_strain(field, p)
    nD = np.einsum("pi,pij->pj", p.normal, D)
    return np.column_stack([np.einsum("pj,pj->p", nD, p.tau1), np.einsum("pj,pj->p", nD, p.tau2)])


def assemble_sources(lift: LiftFields, f: VectorField | None, nu: float, gamma: float,
                     t: float | None = None) -> SourceTerms:
    """Pointwise ``F = f - delta_t - delta.grad delta + nu Div D(delta)`` and boundary tractions."""
    g = lift.grid
    if f is None:
        f = VectorField.zeros(g)
    if not g.same_as(f.grid):
        raise ShapeError("forcing and lift live on different grids")
    delta = lift.delta
    nc = g.n_cells
    dc = to_cells(delta).reshape(3, nc)
    G = (g.vgrad_matrix @ delta.values).reshape(3, 3, nc)
    conv = np.einsum("jc,ijc->ic", dc, G)
    D = (g.strain_matrix @ delta.values).reshape(3, 3, nc)
    divD = np.zeros((3, nc))
    for i in range(3):
        for j in range(3):
            divD[i] += g.cell_deriv_matrices[j] @ D[i, j]
    cell_part = (-conv + nu * divD).reshape((3,) + g.cell_shape)
    F = f.values - lift.delta_t.values + _cells_to_faces(g, cell_part)
    s1 = g.patches["S1"]
    tr = boundary_trace(delta, s1)
    dtau = np.column_stack([np.einsum("pj,pj->p", tr, s1.tau1), np.einsum("pj,pj->p", tr, s1.tau2)])
    B1 = -nu * _traction(delta, s1) - gamma * dtau
    return SourceTerms(
        F=VectorField(g, F), delta=delta, B1=B1,
        B2_in=-_traction(delta, "S2-"), B2_out=-_traction(delta, "S2+"),
        t=lift.t if t is None else t,
    )


def source_functional(sources: SourceTerms, psi: VectorField, nu: float, skew: bool = True) -> float:
    """``(F, psi) + sum (B_1, psi.tau)_{S1} + nu sum (B_2, psi.tau)_{S2}`` by quadrature.

    With ``skew`` the end-face term ``+1/2 ((delta.n)(delta.psi))_{S2}`` is added,
    which is what separates the convective ``delta.grad delta`` in ``F`` from the
    skew-symmetrised transport used in the weak load.
    """
    g = psi.grid
    total = float(np.dot(g.face_weights * sources.F.values, psi.values))
    for name, B, fac in (("S1", sources.B1, 1.0), ("S2-", sources.B2_in, nu), ("S2+", sources.B2_out, nu)):
        p = g.patches[name]
        tr = boundary_trace(psi, p)
        pt = np.column_stack([np.einsum("pj,pj->p", tr, p.tau1), np.einsum("pj,pj->p", tr, p.tau2)])
        total += fac * float(np.sum(p.areas[:, None] * B * pt))
        if skew and name != "S1":
            dtr = boundary_trace(sources.delta, p)
            dn = np.einsum("pj,pj->p", dtr, p.normal)
            total += 0.5 * float(np.sum(p.areas * dn * np.einsum("pj,pj->p", dtr, tr)))
    return total


# -- state and solver --------------------------------------------------------------

@dataclass(eq=False)
class GalerkinState:
    t: float
    C: np.ndarray
    w: VectorField

    @property
    def energy(self) -> float:
        return float(self.C @ self.C)


def project_initial(w0: VectorField, basis: GalerkinBasis) -> np.ndarray:
    """``C_k(0) = (w0, a^k)``."""
    if not basis.grid.same_as(w0.grid):
        raise ShapeError("initial field and basis live on different grids")
    return basis.vectors.T @ (basis.grid.face_weights * w0.values)


def reconstruct_v(state: GalerkinState, lift: LiftFields) -> VectorField:
    """Physical velocity ``v = w + delta``."""
    return state.w + lift.delta


@dataclass(eq=False)
class GalerkinSystem:
    """Galerkin ODE for the coefficients of ``w`` with a time-dependent lift."""

    basis: GalerkinBasis
    nu: float
    gamma: float
    flux: BoundaryFlux = field(default_factory=BoundaryFlux.zero)
    params: HopfParams | None = None
    forcing: Forcing | None = None
    transport_on: bool = True
    lift_tol: float = 1e-10
    growth_limit: float = 10.0

    def __post_init__(self):
        self.grid = self.basis.grid
        self.forms = Forms(self.grid, self.nu, self.gamma)
        Q = self.basis.vectors
        self.QT = np.ascontiguousarray(Q.T)
        self.KQ = self.QT @ (self.forms.K @ Q)
        self._lifts: dict = {}
        if self.params is None:
            self.params = HopfParams(eps=0.5, rho=self.grid.a / 2)
        self._lam_max = None

    # lifts and forcing
    def lift(self, t: float) -> LiftFields:
        key = 0.0 if self.flux.steady else float(t)
        hit = self._lifts.get(key)
        if hit is None:
            hit = build_lift(self.flux, self.params, self.grid, key, tol=self.lift_tol)
            if len(self._lifts) > 8:
                self._lifts.pop(next(iter(self._lifts)))
            self._lifts[key] = hit
        return hit

    def force(self, t: float) -> np.ndarray:
        if self.forcing is None:
            return np.zeros(self.grid.n_faces)
        return self.forcing(t).values

    # initial data and states
    def state(self, t: float, C) -> GalerkinState:
        C = np.asarray(C, dtype=float)
        return GalerkinState(t, C, self.basis.synthesize(C))

    def initial_state(self, w0: VectorField | None = None, t: float = 0.0) -> GalerkinState:
        if w0 is None:
            return self.state(t, np.zeros(self.basis.N))
        return self.state(t, project_initial(w0, self.basis))

    # right-hand side
    def load(self, t: float) -> np.ndarray:
        """Covector of the lift/forcing load ``(f - delta_t, .) - c(delta, delta, .) - a(delta, .)``."""
        lift = self.lift(t)
        d = lift.delta.values
        r = self.forms.mass(self.force(t) - lift.delta_t.values) - self.forms.K @ d
        if self.transport_on:
            r -= self.forms.transport(d, d)
        return r

    def rhs(self, t: float, C) -> np.ndarray:
        C = np.asarray(C, dtype=float)
        lift = self.lift(t)
        w = self.basis.vectors @ C
        r = self.forms.mass(self.force(t) - lift.delta_t.values) - self.forms.K @ lift.delta.values
        if self.transport_on:
            v = w + lift.delta.values
            r -= self.forms.transport(v, v)
        return self.QT @ r - self.KQ @ C

    def rhs_terms(self, state: GalerkinState) -> dict:
        """Per-mode contributions to ``dC/dt``, signed as they enter the ODE."""
        lift = self.lift(state.t)
        w = state.w.values
        d = lift.delta.values
        f = self.forms
        terms = {
            "transport": -self.QT @ f.transport(w, w),
            "lift_transport": -self.QT @ (f.transport(w, d) + f.transport(d, w)),
            "dissipation": -self.QT @ (f.viscous @ w),
            "slip": -self.QT @ (f.slip @ w),
            "load": self.QT @ self.load(state.t),
        }
        if not self.transport_on:
            terms["transport"][:] = 0.0
            terms["lift_transport"][:] = 0.0
        return terms

    # stepping
    @property
    def lambda_max(self) -> float:
        if self._lam_max is None:
            self._lam_max = float(np.linalg.eigvalsh(self.KQ)[-1]) if self.basis.N else 0.0
        return self._lam_max

    def stability_bound(self, vmax: float = 0.0) -> float:
        """``min(h^2/(6 nu), h/|v|_inf, 2/lambda_max)`` for explicit midpoint RK2."""
        h = self.grid.h
        bounds = [h * h / (6.0 * self.nu)]
        if vmax > 0:
            bounds.append(h / vmax)
        if self.lambda_max > 0:
            bounds.append(2.0 / self.lambda_max)
        return min(bounds)

    def step(self, state: GalerkinState, dt: float) -> GalerkinState:
        """One explicit midpoint (RK2) step."""
        if dt <= 0:
            raise ValueError("time step must be positive")
        t, C = state.t, state.C
        k1 = self.rhs(t, C)
        Ch = C + 0.5 * dt * k1
        k2 = self.rhs(t + 0.5 * dt, Ch)
        Cn = C + dt * k2
        old = float(np.linalg.norm(C))
        new = float(np.linalg.norm(Cn))
        if not np.all(np.isfinite(Cn)) or (old > 1e-12 and new > self.growth_limit * old):
            raise BlowUpError(
                f"coefficient norm jumped from {old:.3e} to {new:.3e} at t={t + dt:.4g}",
                {"t": t + dt, "norm_before": old, "norm_after": new, "dt": dt,
                 "bound": self.stability_bound()},
            )
        return self.state(t + dt, Cn)

    def velocity(self, state: GalerkinState) -> VectorField:
        return reconstruct_v(state, self.lift(state.t))


def rhs_ode(state: GalerkinState, system: GalerkinSystem) -> np.ndarray:
    return system.rhs(state.t, state.C)


def step(state: GalerkinState, dt: float, system: GalerkinSystem) -> GalerkinState:
    return system.step(state, dt)
