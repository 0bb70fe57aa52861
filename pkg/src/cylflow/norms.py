"""Lebesgue, Sobolev, weighted and fractional norms on the discrete cylinder.

Vector fields are measured by pooling their components,
``||f||_p = (sum_i int |f_i|^p)^(1/p)``, which coincides with the Euclidean
pointwise norm for ``p = 2``.
"""
from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .domain import (
    Patch,
    ScalarField,
    StaggeredGrid,
    VectorField,
    _cell_deriv,
    cell_derivative,
    velocity_gradient,
)
from .errors import DomainError, ParameterError

_EMBED_SLACK = 1e-12


def _check_p(p):
    if not (p >= 1):
        raise ParameterError(f"integrability exponent must be >= 1, got {p}")


def lp_norm(f, p: float, patch: Patch | None = None) -> float:
    """Discrete L_p norm.

    ``f`` is a :class:`ScalarField` (midpoint rule), a :class:`VectorField`
    (face trapezoid rule, components pooled) or, when ``patch`` is given, an
    array of values at the patch points.
    """
    _check_p(p)
    if patch is not None:
        vals = np.abs(np.asarray(f, dtype=float))
        if vals.ndim == 2:
            vals = vals.reshape(len(patch.areas), -1)
            return float(np.sum(patch.areas[:, None] * vals**p)) ** (1.0 / p)
        return float(np.dot(patch.areas, vals**p)) ** (1.0 / p)
    if isinstance(f, ScalarField):
        return float(np.sum(np.abs(f.values) ** p) * f.grid.cell_volume) ** (1.0 / p)
    if isinstance(f, VectorField):
        return float(np.dot(f.grid.face_weights, np.abs(f.values) ** p)) ** (1.0 / p)
    raise TypeError(f"cannot take an L_p norm of {type(f).__name__}")


def derivatives(f: ScalarField, k: int) -> list[ScalarField]:
    """All derivatives ``D^alpha f`` with ``|alpha| = k`` (unordered multi-indices)."""
    out = []
    for alpha in itertools.combinations_with_replacement(range(3), k):
        g = f
        for axis in alpha:
            g = cell_derivative(g, axis)
        out.append(g)
    return out


def sobolev_norm(f: ScalarField, s: float, p: float) -> float:
    """W^s_p(Omega) norm of a cell scalar.

    Integer ``s`` sums ``||D^alpha f||_p^p`` over ``|alpha| <= s``; a fractional
    part adds the Gagliardo seminorm of the top-order derivatives.
    """
    _check_p(p)
    if s < 0:
        raise ParameterError("smoothness order must be non-negative")
    k = int(math.floor(s + 1e-12))
    frac = s - k
    total = 0.0
    for order in range(k + 1):
        for d in derivatives(f, order):
            total += lp_norm(d, p) ** p
    if frac > 1e-12:
        g = f.grid
        X, Y, Z = g.cell_coords()
        pts = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
        wts = np.full(g.n_cells, g.cell_volume)
        for d in derivatives(f, k):
            total += gagliardo_seminorm(d.flat, pts, wts, frac, p) ** p
    return total ** (1.0 / p)


def h1_seminorm_sq(v: VectorField) -> float:
    """``||grad v||^2_{L2}`` from the cell-centred velocity gradient."""
    G = velocity_gradient(v).values
    return float(np.sum(G**2) * v.grid.cell_volume)


def end_distance(grid: StaggeredGrid) -> np.ndarray:
    """``min(a + x3, a - x3)`` at cell centres."""
    z = grid.cell_coords()[2]
    return np.minimum(grid.a + z, grid.a - z)


def weighted_norm(f: ScalarField, k: int, p: float, mu: float) -> float:
    """Weighted seminorm ``(sum_{|alpha|=k} int |D^alpha f|^p dist^{p mu})^{1/p}``.

    The distance is measured along ``x3`` to the nearer end face.
    """
    if k not in (0, 1, 2):
        raise ParameterError(f"derivative order must be 0, 1 or 2, got {k}")
    _check_p(p)
    if not np.isfinite(mu):
        raise ParameterError("weight exponent must be finite")
    weight = end_distance(f.grid) ** (p * mu)
    total = 0.0
    for d in derivatives(f, k):
        total += float(np.sum(np.abs(d.values) ** p * weight))
    return (total * f.grid.cell_volume) ** (1.0 / p)


def gagliardo_seminorm(values, points, weights, sigma: float, p: float, block: int = 512) -> float:
    """Double midpoint sum of ``|g(x)-g(y)|^p / |x-y|^(dim + sigma p)`` without the diagonal.

    ``points`` is ``(n, dim)``; the spatial dimension is taken from its shape.
    Row blocks are summed in a fixed order so the result is reproducible.
    """
    if not (0.0 < sigma < 1.0):
        raise ParameterError(f"fractional order must lie in (0, 1), got {sigma}")
    _check_p(p)
    values = np.asarray(values, dtype=float).ravel()
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float).ravel()
    n, dim = points.shape
    expo = dim + sigma * p
    total = 0.0
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = points[start:stop, None, :] - points[None, :, :]
        dist = np.sqrt(np.sum(diff**2, axis=-1))
        num = np.abs(values[start:stop, None] - values[None, :]) ** p
        rows = np.arange(start, stop)
        dist[rows - start, rows] = 1.0
        kern = num / dist**expo
        kern[rows - start, rows] = 0.0
        total += float(np.sum(weights[start:stop, None] * kern * weights[None, :]))
    return total ** (1.0 / p)


def gagliardo_norm(g, patch: Patch, sigma: float, p: float) -> float:
    """``(||g||_p^p + [g]_{sigma,p}^p)^(1/p)`` on a boundary face.

    ``sigma`` must be strictly fractional; use :func:`boundary_sobolev_norm`
    for orders with an integer part.
    """
    if not (0.0 < sigma < 1.0):
        raise ParameterError(
            f"fractional order must lie in (0, 1), got {sigma}; use boundary_sobolev_norm"
        )
    g = np.asarray(g, dtype=float).ravel()
    pts = _face_plane_points(patch)
    semi = gagliardo_seminorm(g, pts, patch.areas, sigma, p)
    return (lp_norm(g, p, patch) ** p + semi**p) ** (1.0 / p)


def _face_plane_points(patch: Patch) -> np.ndarray:
    if patch.name not in ("S2-", "S2+"):
        raise DomainError("fractional boundary norms are defined on the end faces only")
    return patch.points[:, :2]


def _face_derivs(g2d, hx, hy, order):
    mats = (_cell_deriv(g2d.shape[0], hx), _cell_deriv(g2d.shape[1], hy))
    out = []
    for alpha in itertools.combinations_with_replacement(range(2), order):
        d = g2d
        for axis in alpha:
            d = np.moveaxis(mats[axis] @ np.moveaxis(d, axis, 0), 0, axis)
        out.append(d)
    return out


def boundary_sobolev_norm(g, grid: StaggeredGrid, patch, order: float, p: float) -> float:
    """W^order_p norm of end-face data (Sobolev–Slobodeckij for fractional order)."""
    _check_p(p)
    patch = grid.patch(patch)
    _face_plane_points(patch)
    if order < 0:
        raise ParameterError("order must be non-negative")
    g2d = np.asarray(g, dtype=float).reshape(grid.nx, grid.ny)
    k = int(math.floor(order + 1e-12))
    frac = order - k
    total = 0.0
    for o in range(k + 1):
        for d in _face_derivs(g2d, grid.hx, grid.hy, o):
            total += lp_norm(d.ravel(), p, patch) ** p
    if frac > 1e-12:
        pts = patch.points[:, :2]
        for d in _face_derivs(g2d, grid.hx, grid.hy, k):
            total += gagliardo_seminorm(d.ravel(), pts, patch.areas, frac, p) ** p
    return total ** (1.0 / p)


def slice_sup_norm(f: ScalarField, p: float) -> float:
    """``sup_{x3} ||f(., ., x3)||_{L_p(cross-section)}`` over cell layers."""
    _check_p(p)
    g = f.grid
    layers = np.sum(np.abs(f.values) ** p, axis=(0, 1)) * g.hx * g.hy
    return float(np.max(layers)) ** (1.0 / p)


def v02_from_series(l2_norms: Sequence[float], grad_sq: Sequence[float], dt: float) -> float:
    """``max_t ||u|| + (int ||grad u||^2 dt)^(1/2)`` with the trapezoid rule."""
    l2_norms = np.asarray(l2_norms, dtype=float)
    grad_sq = np.asarray(grad_sq, dtype=float)
    if l2_norms.size == 0:
        raise DomainError("empty history")
    if l2_norms.shape != grad_sq.shape:
        raise DomainError("series lengths differ")
    integral = float(np.trapezoid(grad_sq, dx=dt)) if grad_sq.size > 1 else 0.0
    return float(np.max(l2_norms)) + math.sqrt(max(integral, 0.0))


def v02_norm(history: Sequence[VectorField], dt: float) -> float:
    """Energy-class norm of a uniformly sampled history of velocity fields."""
    if len(history) == 0:
        raise DomainError("empty history")
    l2 = [lp_norm(u, 2) for u in history]
    gsq = [h1_seminorm_sq(u) for u in history]
    return v02_from_series(l2, gsq, dt)


def embedding_ok(s: float, p: float) -> bool:
    """Admissible (s, p): ``3/p + 1/3 <= s`` for ``p > 3``, or ``s > 4/3`` for ``p = 3``."""
    if p < 3 and not math.isclose(p, 3.0):
        raise ParameterError(f"p must be >= 3, got {p}")
    if math.isclose(p, 3.0):
        return s > 4.0 / 3.0
    return 3.0 / p + 1.0 / 3.0 <= s + _EMBED_SLACK
