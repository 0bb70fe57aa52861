"""Hopf-type lift of the inflow/outflow data into the cylinder.

The lift is ``delta = b + grad(phi)`` where ``b = alpha e3`` carries the end
flux through a logarithmic cutoff ``eta`` and ``phi`` solves the pure Neumann
problem ``lap(phi) = -div b`` so that ``delta`` is solenoidal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .domain import ScalarField, StaggeredGrid, VectorField, div, grad, integrate_surface
from .errors import ConsistencyError, DomainError, ParameterError, ValidationError
from .norms import embedding_ok
from .poisson import DEFAULT_TOL, NeumannSolveReport, solve_neumann

EPS_FLOOR = 1e-8
PAPER_FACTOR = 15.0


@dataclass(frozen=True)
class HopfParams:
    """Cutoff parameters; ``r = rho * exp(-1/eps)`` is kept in log form as well."""

    eps: float
    rho: float
    clamped: bool = False
    degenerate: bool = False

    def __post_init__(self):
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ParameterError(f"eps must be positive, got {self.eps}")
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ParameterError(f"rho must be positive, got {self.rho}")

    @property
    def log_r(self) -> float:
        return math.log(self.rho) - 1.0 / self.eps

    @property
    def r(self) -> float:
        # may underflow to 0.0 for small eps; eta() never relies on it directly
        return self.rho * math.exp(-1.0 / self.eps)


def _sigma(sigma):
    s = np.asarray(sigma, dtype=float)
    if np.any(s < 0) or np.any(~np.isfinite(s)):
        raise DomainError("cutoff argument must be a finite non-negative distance")
    return s


def eta(sigma, params: HopfParams):
    """Logarithmic cutoff: 1 on ``[0, r]``, ``-eps ln(sigma/rho)`` on ``(r, rho]``, 0 beyond."""
    s = _sigma(sigma)
    with np.errstate(divide="ignore"):
        logval = -params.eps * np.log(s / params.rho)
    # -eps ln(s/rho) >= 1 exactly when s <= r, so clipping reproduces the plateau
    out = np.where(s > params.rho, 0.0, np.minimum(1.0, logval))
    out = np.where(s == 0.0, 1.0, out)
    return out if out.ndim else float(out)


def eta_prime(sigma, params: HopfParams):
    """Derivative of :func:`eta`; ``-eps/sigma`` on ``(r, rho]``, zero elsewhere."""
    s = _sigma(sigma)
    r = params.r
    if r > 0.0:
        plateau = s <= r
    else:
        with np.errstate(divide="ignore"):
            plateau = (s == 0.0) | (np.log(s) <= params.log_r)
    with np.errstate(divide="ignore"):
        slope = -params.eps / s
    out = np.where(plateau | (s > params.rho), 0.0, slope)
    return out if out.ndim else float(out)


# -- boundary data ----------------------------------------------------------------

Profile = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


class BoundaryFlux:
    """Normal inflow ``d1`` on ``x3 = -a`` and outflow ``d2`` on ``x3 = a``.

    Profiles are callables ``d(x1, x2, t)``.  Rates ``d_t`` may be supplied; if
    not they are obtained by centred differencing in time.
    """

    def __init__(self, d1: Profile, d2: Profile, d1_t: Profile | None = None,
                 d2_t: Profile | None = None, steady: bool = False, name: str = "custom",
                 diff_step: float = 1e-4):
        self._d1, self._d2 = d1, d2
        self._d1_t, self._d2_t = d1_t, d2_t
        self.steady = steady
        self.name = name
        self.diff_step = diff_step

    def profiles(self, grid: StaggeredGrid, t: float = 0.0):
        x1, x2 = grid.patches["S2-"].points[:, 0], grid.patches["S2-"].points[:, 1]
        d1 = np.broadcast_to(np.asarray(self._d1(x1, x2, t), dtype=float), x1.shape).copy()
        d2 = np.broadcast_to(np.asarray(self._d2(x1, x2, t), dtype=float), x1.shape).copy()
        if np.any(d1 < -1e-14) or np.any(d2 < -1e-14):
            raise ValidationError("inflow/outflow profiles must be non-negative")
        return d1, d2

    def rates(self, grid: StaggeredGrid, t: float = 0.0):
        if self.steady:
            z = np.zeros(grid.nx * grid.ny)
            return z, z.copy()
        x1, x2 = grid.patches["S2-"].points[:, 0], grid.patches["S2-"].points[:, 1]
        if self._d1_t is not None and self._d2_t is not None:
            r1 = np.broadcast_to(np.asarray(self._d1_t(x1, x2, t), dtype=float), x1.shape).copy()
            r2 = np.broadcast_to(np.asarray(self._d2_t(x1, x2, t), dtype=float), x1.shape).copy()
            return r1, r2
        h = self.diff_step
        lo = max(t - h, 0.0)
        hi = t + h
        p1, p2 = self._raw(grid, hi)
        m1, m2 = self._raw(grid, lo)
        return (p1 - m1) / (hi - lo), (p2 - m2) / (hi - lo)

    def _raw(self, grid, t):
        x1, x2 = grid.patches["S2-"].points[:, 0], grid.patches["S2-"].points[:, 1]
        return (np.broadcast_to(np.asarray(self._d1(x1, x2, t), dtype=float), x1.shape),
                np.broadcast_to(np.asarray(self._d2(x1, x2, t), dtype=float), x1.shape))

    @classmethod
    def zero(cls):
        return cls(lambda x, y, t: 0.0, lambda x, y, t: 0.0, steady=True, name="zero")

    @classmethod
    def tabulated(cls, times, samples1, samples2, name="tabulated"):
        """Build from end-face samples ``(x1, x2, value)`` at increasing ``times``.

        Each ``samples`` entry is an ``(n, 3)`` array on a tensor-product set of
        points; values are interpolated bilinearly in space and linearly in time.
        """
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or len(times) == 0 or np.any(np.diff(times) <= 0):
            raise ValidationError("sample times must be strictly increasing")

        def build(samples):
            interps = []
            for s in samples:
                s = np.asarray(s, dtype=float)
                xs, ys = np.unique(s[:, 0]), np.unique(s[:, 1])
                if len(xs) * len(ys) != len(s):
                    raise ValidationError("flux samples must lie on a tensor-product grid")
                vals = np.full((len(xs), len(ys)), np.nan)
                vals[np.searchsorted(xs, s[:, 0]), np.searchsorted(ys, s[:, 1])] = s[:, 2]
                interps.append(RegularGridInterpolator(
                    (xs, ys), vals, bounds_error=False, fill_value=None,
                    method="linear" if min(len(xs), len(ys)) > 1 else "nearest"))
            return interps

        i1, i2 = build(samples1), build(samples2)

        def profile(interps):
            def d(x, y, t):
                pts = np.column_stack([np.ravel(x), np.ravel(y)])
                if len(times) == 1 or t <= times[0]:
                    return interps[0](pts)
                if t >= times[-1]:
                    return interps[-1](pts)
                k = int(np.searchsorted(times, t, side="right")) - 1
                lam = (t - times[k]) / (times[k + 1] - times[k])
                return (1 - lam) * interps[k](pts) + lam * interps[k + 1](pts)
            return d

        return cls(profile(i1), profile(i2), steady=len(times) == 1, name=name)


@dataclass
class CompatibilityReport:
    times: list
    residuals: list
    tol: float

    @property
    def ok(self) -> bool:
        return all(r <= self.tol for r in self.residuals)

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


def flux_residual(d1, d2, grid: StaggeredGrid) -> float:
    return abs(integrate_surface(d1, grid.patches["S2-"]) - integrate_surface(d2, grid.patches["S2+"]))


def check_compatibility(flux: BoundaryFlux, grid: StaggeredGrid, times=(0.0,), tol: float = 1e-10):
    """``|int d1 - int d2|`` at each sample time; ``ok`` is False if any exceeds ``tol``."""
    res = []
    for t in times:
        d1, d2 = flux.profiles(grid, t)
        res.append(flux_residual(d1, d2, grid))
    return CompatibilityReport(list(times), res, tol)


def extend_flux(d1, d2, grid: StaggeredGrid):
    """Constant prolongation of the end-face data along ``x3``."""
    d1 = np.asarray(d1, dtype=float).reshape(grid.nx, grid.ny)
    d2 = np.asarray(d2, dtype=float).reshape(grid.nx, grid.ny)
    shape = grid.cell_shape
    return (ScalarField(grid, np.broadcast_to(d1[:, :, None], shape)),
            ScalarField(grid, np.broadcast_to(d2[:, :, None], shape)))


def _check_support(params: HopfParams, grid: StaggeredGrid):
    if params.rho > grid.a / 2.0 * (1 + 1e-12):
        raise ParameterError(f"rho = {params.rho} exceeds a/2 = {grid.a / 2}; cutoff supports overlap")


def build_b(d1, d2, params: HopfParams, grid: StaggeredGrid, tol: float = 1e-10,
            check: bool = True) -> VectorField:
    """``b = (d1~ eta(a + x3) + d2~ eta(a - x3)) e3`` sampled on the z-faces."""
    _check_support(params, grid)
    d1 = np.asarray(d1, dtype=float).ravel()
    d2 = np.asarray(d2, dtype=float).ravel()
    if check:
        scale = max(1.0, float(np.max(np.abs(d1), initial=0.0)), float(np.max(np.abs(d2), initial=0.0)))
        res = flux_residual(d1, d2, grid)
        if res > tol * scale * grid.spec.end_area:
            raise ValidationError(f"incompatible flux: |int d1 - int d2| = {res:.3e}")
    z = grid.zf
    e1 = eta(grid.a + z, params)
    e2 = eta(grid.a - z, params)
    w = d1.reshape(grid.nx, grid.ny)[:, :, None] * e1 + d2.reshape(grid.nx, grid.ny)[:, :, None] * e2
    vals = np.zeros(grid.n_faces)
    vals[grid.face_slice(2)] = w.ravel()
    return VectorField(grid, vals)


# -- parameter choice ----------------------------------------------------------------

def select_params(nu: float, d_norm: float, a: float | None = None,
                  s: float | None = None, p: float | None = None) -> HopfParams:
    """Cutoff parameters from ``eps = rho^(1/6) = nu / (15 ||d~||_{W^s_p})``.

    ``rho`` is clamped to ``a/2`` when ``a`` is given; the result then carries
    ``clamped=True``.  ``d_norm == 0`` yields degenerate plateau-free params.
    """
    if s is not None and p is not None and not embedding_ok(s, p):
        raise ParameterError(f"(s, p) = ({s}, {p}) violates the embedding condition")
    if nu <= 0:
        raise ParameterError("viscosity must be positive")
    if d_norm < 0 or not math.isfinite(d_norm):
        raise ParameterError("flux norm must be finite and non-negative")
    cap = a / 2.0 if a is not None else None
    if d_norm == 0.0:
        return HopfParams(eps=EPS_FLOOR, rho=cap if cap else 0.5, degenerate=True)
    ratio = nu / (PAPER_FACTOR * d_norm)
    eps = max(ratio, EPS_FLOOR)
    rho = ratio**6
    clamped = False
    if cap is not None and rho > cap:
        rho, clamped = cap, True
    return HopfParams(eps=eps, rho=rho, clamped=clamped)


# -- full lift ---------------------------------------------------------------------

@dataclass(eq=False)
class LiftFields:
    b: VectorField
    phi: ScalarField
    delta: VectorField
    delta_t: VectorField
    params: HopfParams
    d1: np.ndarray
    d2: np.ndarray
    d1_t: np.ndarray
    d2_t: np.ndarray
    t: float = 0.0
    report: NeumannSolveReport | None = None
    checks: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.b.grid


def trace_errors(delta: VectorField, d1, d2) -> dict:
    """Max normal-trace mismatch of a lift on S2-, S2+ and S1."""
    g = delta.grid
    p1, p2, ps = g.patches["S2-"], g.patches["S2+"], g.patches["S1"]
    # v . n = -d1 on the inflow face, v . n = d2 on the outflow face
    vn1 = delta.values[p1.face_index] * p1.normal[:, 2]
    vn2 = delta.values[p2.face_index] * p2.normal[:, 2]
    vns = delta.values[ps.face_index] * ps.normal.sum(axis=1)
    return {
        "inflow": float(np.max(np.abs(vn1 + np.ravel(d1)))),
        "outflow": float(np.max(np.abs(vn2 - np.ravel(d2)))),
        "lateral": float(np.max(np.abs(vns))),
    }


def build_delta(b: VectorField, phi: ScalarField, d1=None, d2=None, delta_t: VectorField | None = None,
                tol: float = DEFAULT_TOL, params: HopfParams | None = None, t: float = 0.0,
                d1_t=None, d2_t=None, report: NeumannSolveReport | None = None) -> LiftFields:
    """Assemble ``delta = b + grad(phi)``; rejects a ``phi`` that does not belong to ``b``."""
    g = b.grid
    if not g.same_as(phi.grid):
        raise ConsistencyError("b and phi live on different grids")
    src = div(b).flat
    mismatch = g.lap_matrix @ phi.flat + src - src.mean()
    scale = max(1.0, float(np.linalg.norm(src)))
    if np.linalg.norm(mismatch) > max(10 * tol, 1e-9) * scale:
        raise ConsistencyError("phi does not solve the Neumann problem for this b (stale potential)")
    delta = b + grad(phi)
    n2 = g.nx * g.ny
    d1 = np.zeros(n2) if d1 is None else np.asarray(d1, dtype=float).ravel()
    d2 = np.zeros(n2) if d2 is None else np.asarray(d2, dtype=float).ravel()
    checks = trace_errors(delta, d1, d2)
    checks["div_l2"] = float(np.linalg.norm(div(delta).flat))
    return LiftFields(
        b=b, phi=phi, delta=delta,
        delta_t=delta_t if delta_t is not None else VectorField.zeros(g),
        params=params, d1=d1, d2=d2,
        d1_t=np.zeros(n2) if d1_t is None else np.asarray(d1_t, dtype=float).ravel(),
        d2_t=np.zeros(n2) if d2_t is None else np.asarray(d2_t, dtype=float).ravel(),
        t=t, report=report, checks=checks,
    )


def lift_from_profiles(d1, d2, params: HopfParams, grid: StaggeredGrid, tol: float = DEFAULT_TOL,
                       check: bool = True):
    """``(b, phi, report)`` for one pair of end profiles."""
    b = build_b(d1, d2, params, grid, check=check)
    if not np.any(b.values):
        return b, ScalarField.zeros(grid), NeumannSolveReport(0, 0.0, 0.0, 0.0, True)
    phi, rep = solve_neumann(-div(b), tol=tol)
    return b, phi, rep


class SeparableFlux(BoundaryFlux):
    """``d_i(x1, x2, t) = g_i(x1, x2) * s(t)``; the lift is one Poisson solve, rescaled."""

    def __init__(self, g1, g2, s: Callable[[float], float], s_t: Callable[[float], float],
                 name: str = "separable"):
        self.shape1, self.shape2 = g1, g2
        self.factor, self.factor_t = s, s_t
        super().__init__(
            lambda x, y, t: g1(x, y) * s(t), lambda x, y, t: g2(x, y) * s(t),
            lambda x, y, t: g1(x, y) * s_t(t), lambda x, y, t: g2(x, y) * s_t(t),
            steady=False, name=name,
        )
        self._base = {}

    def base_lift(self, params: HopfParams, grid: StaggeredGrid, tol: float = DEFAULT_TOL):
        key = (grid.spec, params.eps, params.rho, tol)
        if key not in self._base:
            x1, x2 = grid.patches["S2-"].points[:, 0], grid.patches["S2-"].points[:, 1]
            g1 = np.broadcast_to(np.asarray(self.shape1(x1, x2), dtype=float), x1.shape).copy()
            g2 = np.broadcast_to(np.asarray(self.shape2(x1, x2), dtype=float), x1.shape).copy()
            if np.any(g1 < -1e-14) or np.any(g2 < -1e-14):
                raise ValidationError("inflow/outflow profiles must be non-negative")
            self._base[key] = (g1, g2) + lift_from_profiles(g1, g2, params, grid, tol)
        return self._base[key]


def build_lift(flux: BoundaryFlux, params: HopfParams, grid: StaggeredGrid, t: float = 0.0,
               tol: float = DEFAULT_TOL) -> LiftFields:
    """Lift at time ``t``; ``delta_t`` is the lift of ``d_t`` (the map is linear)."""
    if isinstance(flux, SeparableFlux):
        g1, g2, b0, phi0, rep = flux.base_lift(params, grid, tol)
        s, st = float(flux.factor(t)), float(flux.factor_t(t))
        if s < 0:
            raise ValidationError("inflow/outflow profiles must be non-negative")
        delta0 = b0 + grad(phi0)
        return build_delta(b0 * s, phi0 * s, g1 * s, g2 * s, delta_t=delta0 * st, tol=tol,
                           params=params, t=t, d1_t=g1 * st, d2_t=g2 * st, report=rep)
    d1, d2 = flux.profiles(grid, t)
    b, phi, rep = lift_from_profiles(d1, d2, params, grid, tol)
    r1, r2 = flux.rates(grid, t)
    if np.any(r1) or np.any(r2):
        bt, phit, _ = lift_from_profiles(r1, r2, params, grid, tol, check=False)
        delta_t = bt + grad(phit)
    else:
        delta_t = VectorField.zeros(grid)
    return build_delta(b, phi, d1, d2, delta_t=delta_t, tol=tol, params=params, t=t,
                       d1_t=r1, d2_t=r2, report=rep)
