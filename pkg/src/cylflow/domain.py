"""Cylinder geometry, marker-and-cell grid, discrete fields and operators.

The domain is ``(0, Lx) x (0, Ly) x (-a, a)``.  Velocity components live on
cell faces (``u`` on x-faces, ``v`` on y-faces, ``w`` on z-faces) and scalars
live at cell centres.  The boundary is split into the lateral wall ``S1``
and the two end faces ``S2-`` (``x3 = -a``, inflow) and ``S2+`` (``x3 = a``,
outflow).

All operators are assembled once per grid as ``scipy.sparse`` CSR matrices and
cached, so applying them is a deterministic mat-vec.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DomainError, ShapeError

PATCHES = ("S1", "S2-", "S2+")

# face region codes
INTERIOR, LATERAL, INFLOW, OUTFLOW = 0, 1, 2, 3


@dataclass(frozen=True)
class CylinderSpec:
    """Geometry, resolution and material constants of one run."""

    a: float = 1.0
    Lx: float = 1.0
    Ly: float = 1.0
    nx: int = 6
    ny: int = 6
    nz: int = 12
    nu: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("a", "Lx", "Ly", "nu", "gamma"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ConfigurationError(f"{name} must be positive, got {val!r}")
        for name in ("nx", "ny", "nz"):
            val = getattr(self, name)
            if int(val) != val or val < 4:
                raise ConfigurationError(f"{name} must be an integer >= 4, got {val!r}")

    @property
    def volume(self) -> float:
        return 2.0 * self.a * self.Lx * self.Ly

    @property
    def end_area(self) -> float:
        return self.Lx * self.Ly


class BoundaryFrame(NamedTuple):
    normal: np.ndarray
    tau1: np.ndarray
    tau2: np.ndarray


@dataclass(frozen=True, eq=False)
class Patch:
    """Boundary sample points (face centres) of one boundary part.

    ``face_index`` is the flat velocity DOF carrying the normal component at
    each point; ``adj_cells``/``next_cells`` are the first two cells inward,
    used for second-order extrapolation of cell quantities to the wall.
    """

    name: str
    points: np.ndarray
    areas: np.ndarray
    normal: np.ndarray
    tau1: np.ndarray
    tau2: np.ndarray
    face_index: np.ndarray
    adj_cells: np.ndarray
    next_cells: np.ndarray

    @property
    def frame(self) -> BoundaryFrame:
        return BoundaryFrame(self.normal, self.tau1, self.tau2)

    @property
    def size(self) -> int:
        return len(self.areas)

    @property
    def area(self) -> float:
        return float(np.sum(self.areas))

    def extrapolate(self, cell_values: np.ndarray) -> np.ndarray:
        """Linear extrapolation of cell-centred data (last axes flattened) to the wall."""
        flat = cell_values.reshape(cell_values.shape[:-3] + (-1,))
        return 1.5 * flat[..., self.adj_cells] - 0.5 * flat[..., self.next_cells]


def _fdiff(n, h):
    # (n, n+1): face values -> cell centred difference
    return sp.diags([-np.ones(n), np.ones(n)], [0, 1], shape=(n, n + 1)) / h


def _favg(n):
    return sp.diags([0.5 * np.ones(n), 0.5 * np.ones(n)], [0, 1], shape=(n, n + 1))


def _cell_deriv(n, h):
    """Cell-centred first derivative; one-sided second order at both ends."""
    m = sp.lil_matrix((n, n))
    for i in range(1, n - 1):
        m[i, i - 1] = -0.5
        m[i, i + 1] = 0.5
    m[0, 0:3] = [-1.5, 2.0, -0.5]
    m[n - 1, n - 3:n] = [0.5, -2.0, 1.5]
    return m.tocsr() / h


def _face_grad_onesided(n, h):
    """(n+1, n): cell values -> face derivative, one-sided second order at the ends."""
    m = sp.lil_matrix((n + 1, n))
    for i in range(1, n):
        m[i, i - 1] = -1.0
        m[i, i] = 1.0
    m[0, 0:3] = [-2.0, 3.0, -1.0]
    m[n, n - 3:n] = [1.0, -3.0, 2.0]
    return m.tocsr() / h


def _kron3(ax, ay, az):
    return sp.kron(ax, sp.kron(ay, az, format="csr"), format="csr")


class StaggeredGrid:
    """Uniform marker-and-cell discretisation of a :class:`CylinderSpec`."""

    def __init__(self, spec: CylinderSpec):
        self.spec = spec
        self.nx, self.ny, self.nz = int(spec.nx), int(spec.ny), int(spec.nz)
        self.hx = spec.Lx / self.nx
        self.hy = spec.Ly / self.ny
        self.hz = 2.0 * spec.a / self.nz
        self.a = spec.a
        self.xc = (np.arange(self.nx) + 0.5) * self.hx
        self.yc = (np.arange(self.ny) + 0.5) * self.hy
        self.zc = -spec.a + (np.arange(self.nz) + 0.5) * self.hz
        self.xf = np.arange(self.nx + 1) * self.hx
        self.yf = np.arange(self.ny + 1) * self.hy
        self.zf = -spec.a + np.arange(self.nz + 1) * self.hz
        self.cell_shape = (self.nx, self.ny, self.nz)
        self.face_shapes = (
            (self.nx + 1, self.ny, self.nz),
            (self.nx, self.ny + 1, self.nz),
            (self.nx, self.ny, self.nz + 1),
        )
        sizes = [int(np.prod(s)) for s in self.face_shapes]
        self.face_offsets = (0, sizes[0], sizes[0] + sizes[1], sum(sizes))
        self.n_cells = self.nx * self.ny * self.nz
        self.n_faces = sum(sizes)
        self.cell_volume = self.hx * self.hy * self.hz
        self.h = min(self.hx, self.hy, self.hz)
        self.patches = {p.name: p for p in self._build_patches()}

    def __repr__(self):
        return f"StaggeredGrid({self.nx}x{self.ny}x{self.nz}, a={self.a}, Lx={self.spec.Lx}, Ly={self.spec.Ly})"

    def same_as(self, other: "StaggeredGrid") -> bool:
        return other is self or other.spec == self.spec

    # -- coordinates ---------------------------------------------------------
    def cell_coords(self):
        return np.meshgrid(self.xc, self.yc, self.zc, indexing="ij")

    def face_coords(self, comp: int):
        axes = [self.xc, self.yc, self.zc]
        axes[comp] = (self.xf, self.yf, self.zf)[comp]
        return np.meshgrid(*axes, indexing="ij")

    def face_slice(self, comp: int) -> slice:
        return slice(self.face_offsets[comp], self.face_offsets[comp + 1])

    # -- classification ------------------------------------------------------
    @cached_property
    def face_region(self) -> np.ndarray:
        region = np.zeros(self.n_faces, dtype=np.int8)
        for comp in range(3):
            r = np.zeros(self.face_shapes[comp], dtype=np.int8)
            idx = [slice(None)] * 3
            if comp < 2:
                idx[comp] = 0
                r[tuple(idx)] = LATERAL
                idx[comp] = -1
                r[tuple(idx)] = LATERAL
            else:
                r[:, :, 0] = INFLOW
                r[:, :, -1] = OUTFLOW
            region[self.face_slice(comp)] = r.ravel()
        return region

    @cached_property
    def interior_faces(self) -> np.ndarray:
        return np.flatnonzero(self.face_region == INTERIOR)

    @cached_property
    def boundary_faces(self) -> np.ndarray:
        return np.flatnonzero(self.face_region != INTERIOR)

    @cached_property
    def face_weights(self) -> np.ndarray:
        """Trapezoid weights in the normal direction: half cells on the boundary."""
        wts = np.full(self.n_faces, self.cell_volume)
        wts[self.face_region != INTERIOR] *= 0.5
        return wts

    def _build_patches(self):
        nx, ny, nz = self.nx, self.ny, self.nz
        cell_id = np.arange(self.n_cells).reshape(self.cell_shape)
        out = []

        # lateral wall: x = 0, x = Lx, y = 0, y = Ly
        pts, ar, nrm, t1, fidx, adj, nxt = [], [], [], [], [], [], []
        Y, Z = np.meshgrid(self.yc, self.zc, indexing="ij")
        uid = np.arange(self.face_shapes[0][0] * ny * nz).reshape(self.face_shapes[0])
        for i_face, i_adj, i_nxt, x0, sgn in ((0, 0, 1, 0.0, -1.0), (nx, nx - 1, nx - 2, self.spec.Lx, 1.0)):
            n = Y.size
            pts.append(np.column_stack([np.full(n, x0), Y.ravel(), Z.ravel()]))
            ar.append(np.full(n, self.hy * self.hz))
            nrm.append(np.tile([sgn, 0.0, 0.0], (n, 1)))
            t1.append(np.tile([0.0, sgn, 0.0], (n, 1)))
            fidx.append(self.face_offsets[0] + uid[i_face].ravel())
            adj.append(cell_id[i_adj].ravel())
            nxt.append(cell_id[i_nxt].ravel())
        X, Z = np.meshgrid(self.xc, self.zc, indexing="ij")
        vid = np.arange(nx * (ny + 1) * nz).reshape(self.face_shapes[1])
        for j_face, j_adj, j_nxt, y0, sgn in ((0, 0, 1, 0.0, -1.0), (ny, ny - 1, ny - 2, self.spec.Ly, 1.0)):
            n = X.size
            pts.append(np.column_stack([X.ravel(), np.full(n, y0), Z.ravel()]))
            ar.append(np.full(n, self.hx * self.hz))
            nrm.append(np.tile([0.0, sgn, 0.0], (n, 1)))
            t1.append(np.tile([-sgn, 0.0, 0.0], (n, 1)))
            fidx.append(self.face_offsets[1] + vid[:, j_face, :].ravel())
            adj.append(cell_id[:, j_adj, :].ravel())
            nxt.append(cell_id[:, j_nxt, :].ravel())
        nrm = np.vstack(nrm)
        out.append(Patch(
            "S1", np.vstack(pts), np.concatenate(ar), nrm, np.vstack(t1),
            np.tile([0.0, 0.0, 1.0], (len(nrm), 1)), np.concatenate(fidx),
            np.concatenate(adj), np.concatenate(nxt),
        ))

        X, Y = np.meshgrid(self.xc, self.yc, indexing="ij")
        wid = np.arange(nx * ny * (nz + 1)).reshape(self.face_shapes[2])
        n = X.size
        for name, k_face, k_adj, k_nxt, z0, sgn in (
            ("S2-", 0, 0, 1, -self.a, -1.0),
            ("S2+", nz, nz - 1, nz - 2, self.a, 1.0),
        ):
            out.append(Patch(
                name, np.column_stack([X.ravel(), Y.ravel(), np.full(n, z0)]),
                np.full(n, self.hx * self.hy), np.tile([0.0, 0.0, sgn], (n, 1)),
                np.tile([1.0, 0.0, 0.0], (n, 1)), np.tile([0.0, 1.0, 0.0], (n, 1)),
                self.face_offsets[2] + wid[:, :, k_face].ravel(),
                cell_id[:, :, k_adj].ravel(), cell_id[:, :, k_nxt].ravel(),
            ))
        return out

    def patch(self, name) -> Patch:
        if isinstance(name, Patch):
            return name
        try:
            return self.patches[name]
        except KeyError:
            raise DomainError(f"unknown patch {name!r}; expected one of {PATCHES}") from None

    # -- sparse operators ----------------------------------------------------
    def _eye(self, n):
        return sp.identity(n, format="csr")

    @cached_property
    def div_matrix(self) -> sp.csr_matrix:
        nx, ny, nz = self.cell_shape
        Ix, Iy, Iz = self._eye(nx), self._eye(ny), self._eye(nz)
        return sp.hstack([
            _kron3(_fdiff(nx, self.hx), Iy, Iz),
            _kron3(Ix, _fdiff(ny, self.hy), Iz),
            _kron3(Ix, Iy, _fdiff(nz, self.hz)),
        ], format="csr")

    @cached_property
    def grad_matrix(self) -> sp.csr_matrix:
        """Face gradient with zero normal flux on the boundary (Neumann)."""
        g = (-self.div_matrix.T).tolil()
        g[self.boundary_faces, :] = 0.0
        return g.tocsr()

    @cached_property
    def grad_matrix_extrapolated(self) -> sp.csr_matrix:
        nx, ny, nz = self.cell_shape
        Ix, Iy, Iz = self._eye(nx), self._eye(ny), self._eye(nz)
        return sp.vstack([
            _kron3(_face_grad_onesided(nx, self.hx), Iy, Iz),
            _kron3(Ix, _face_grad_onesided(ny, self.hy), Iz),
            _kron3(Ix, Iy, _face_grad_onesided(nz, self.hz)),
        ], format="csr")

    @cached_property
    def lap_matrix(self) -> sp.csr_matrix:
        return (self.div_matrix @ self.grad_matrix).tocsr()

    @cached_property
    def interp_matrix(self) -> sp.csr_matrix:
        """(3*n_cells, n_faces): each component averaged to cell centres."""
        nx, ny, nz = self.cell_shape
        Ix, Iy, Iz = self._eye(nx), self._eye(ny), self._eye(nz)
        return sp.block_diag([
            _kron3(_favg(nx), Iy, Iz),
            _kron3(Ix, _favg(ny), Iz),
            _kron3(Ix, Iy, _favg(nz)),
        ], format="csr")

    @cached_property
    def cell_deriv_matrices(self):
        nx, ny, nz = self.cell_shape
        Ix, Iy, Iz = self._eye(nx), self._eye(ny), self._eye(nz)
        return (
            _kron3(_cell_deriv(nx, self.hx), Iy, Iz),
            _kron3(Ix, _cell_deriv(ny, self.hy), Iz),
            _kron3(Ix, Iy, _cell_deriv(nz, self.hz)),
        )

    @cached_property
    def vgrad_matrix(self) -> sp.csr_matrix:
        """(9*n_cells, n_faces): row block ``3*i + j`` holds d v_i / d x_j at cells."""
        nc = self.n_cells
        interp = self.interp_matrix
        rows = []
        for i in range(3):
            comp_cells = interp[i * nc:(i + 1) * nc]
            for j in range(3):
                if i == j:
                    # compact face difference, exact for linear fields
                    mask = np.zeros(self.n_faces)
                    mask[self.face_slice(i)] = 1.0
                    blk = self.div_matrix @ sp.diags(mask)
                else:
                    blk = self.cell_deriv_matrices[j] @ comp_cells
                rows.append(blk)
        return sp.vstack(rows, format="csr")

    @cached_property
    def strain_matrix(self) -> sp.csr_matrix:
        """(9*n_cells, n_faces): D_ij = d_j v_i + d_i v_j."""
        nc = self.n_cells
        g = self.vgrad_matrix
        perm = np.concatenate([
            np.arange((3 * j + i) * nc, (3 * j + i + 1) * nc) for i in range(3) for j in range(3)
        ])
        return (g + g[perm]).tocsr()

    def trace_matrices(self, name) -> tuple:
        """Three (n_points, n_faces) matrices giving the Cartesian velocity at a patch.

        The normal component is the boundary face value itself; tangential
        components are extrapolated from the two nearest cell centres.
        """
        return self._traces[self.patch(name).name]

    @cached_property
    def _traces(self):
        nc = self.n_cells
        interp = self.interp_matrix
        out = {}
        for name, p in self.patches.items():
            mats = []
            for comp in range(3):
                if np.all(p.normal[:, comp] == 0.0):
                    block = interp[comp * nc:(comp + 1) * nc]
                    m = 1.5 * block[p.adj_cells] - 0.5 * block[p.next_cells]
                else:
                    m = sp.csr_matrix(
                        (np.ones(p.size), (np.arange(p.size), p.face_index)),
                        shape=(p.size, self.n_faces),
                    )
                    # lateral patch mixes x- and y-walls: rows whose normal is
                    # along another axis need the extrapolated value instead
                    off = p.normal[:, comp] == 0.0
                    if np.any(off):
                        block = interp[comp * nc:(comp + 1) * nc]
                        ext = 1.5 * block[p.adj_cells] - 0.5 * block[p.next_cells]
                        keep = sp.diags((~off).astype(float))
                        m = keep @ m + sp.diags(off.astype(float)) @ ext
                mats.append(m.tocsr())
            out[name] = tuple(mats)
        return out

    def tangent_trace_matrix(self, name, alpha: int) -> sp.csr_matrix:
        """(n_points, n_faces) matrix of v . tau_alpha on a patch (alpha in {1, 2})."""
        p = self.patch(name)
        tau = p.tau1 if alpha == 1 else p.tau2
        mats = self.trace_matrices(name)
        return sum(sp.diags(tau[:, c]) @ mats[c] for c in range(3)).tocsr()


def build_grid(spec: CylinderSpec) -> StaggeredGrid:
    """Discretise the cylinder; raises :class:`ConfigurationError` on invalid input."""
    if not isinstance(spec, CylinderSpec):
        raise ConfigurationError("build_grid expects a CylinderSpec")
    return StaggeredGrid(spec)


# -- fields ------------------------------------------------------------------

def _frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


class ScalarField:
    """Cell-centred scalar values, shape ``(nx, ny, nz)``."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: StaggeredGrid, values):
        values = np.asarray(values, dtype=float)
        if values.size != grid.n_cells:
            raise ShapeError(f"scalar field needs {grid.n_cells} values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DomainError("scalar field has non-finite entries")
        self.grid = grid
        self.values = _frozen(values.reshape(grid.cell_shape))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.cell_shape))

    @classmethod
    def from_function(cls, grid, func: Callable):
        X, Y, Z = grid.cell_coords()
        return cls(grid, np.broadcast_to(func(X, Y, Z), grid.cell_shape))

    @property
    def flat(self):
        return self.values.ravel()

    def _check(self, other):
        if not self.grid.same_as(other.grid):
            raise ShapeError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)


class VectorField:
    """Face-centred velocity-like field stored as one flat array (u, v, w)."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: StaggeredGrid, values):
        values = np.asarray(values, dtype=float).ravel()
        if values.size != grid.n_faces:
            raise ShapeError(f"vector field needs {grid.n_faces} values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DomainError("vector field has non-finite entries")
        self.grid = grid
        self.values = _frozen(values)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_faces))

    @classmethod
    def from_function(cls, grid, func: Callable):
        """``func(x, y, z)`` returns a 3-tuple; component ``i`` is sampled on its faces."""
        out = np.empty(grid.n_faces)
        for comp in range(3):
            X, Y, Z = grid.face_coords(comp)
            val = func(X, Y, Z)[comp]
            out[grid.face_slice(comp)] = np.broadcast_to(val, X.shape).ravel()
        return cls(grid, out)

    def component(self, comp: int) -> np.ndarray:
        return self.values[self.grid.face_slice(comp)].reshape(self.grid.face_shapes[comp])

    u = property(lambda self: self.component(0))
    v = property(lambda self: self.component(1))
    w = property(lambda self: self.component(2))

    def _check(self, other):
        if not self.grid.same_as(other.grid):
            raise ShapeError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return VectorField(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return VectorField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return VectorField(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return VectorField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class TensorField:
    """Cell-centred 3x3 tensor, ``values`` has shape ``(3, 3, nx, ny, nz)``."""

    grid: StaggeredGrid
    values: np.ndarray


# -- operators -----------------------------------------------------------------

def _require_grid(field, grid):
    if grid is not None and not grid.same_as(field.grid):
        raise ShapeError("field does not belong to the given grid")


def div(field: VectorField, grid: StaggeredGrid | None = None) -> ScalarField:
    _require_grid(field, grid)
    g = field.grid
    return ScalarField(g, g.div_matrix @ field.values)


def grad(field: ScalarField, boundary: str = "neumann", grid: StaggeredGrid | None = None) -> VectorField:
    """Face gradient of a cell scalar.

    ``boundary="neumann"`` sets the normal derivative on boundary faces to
    zero (the operator used by the Poisson solve); ``"extrapolate"`` uses
    second-order one-sided differences there instead.
    """
    _require_grid(field, grid)
    g = field.grid
    if boundary == "neumann":
        mat = g.grad_matrix
    elif boundary == "extrapolate":
        mat = g.grad_matrix_extrapolated
    else:
        raise ValueError(f"unknown boundary treatment {boundary!r}")
    return VectorField(g, mat @ field.flat)


def laplacian(field: ScalarField, grid: StaggeredGrid | None = None) -> ScalarField:
    """Seven-point Laplacian with homogeneous Neumann closure (``div . grad``)."""
    _require_grid(field, grid)
    g = field.grid
    return ScalarField(g, g.lap_matrix @ field.flat)


def cell_derivative(field: ScalarField, axis: int) -> ScalarField:
    g = field.grid
    return ScalarField(g, g.cell_deriv_matrices[axis] @ field.flat)


def velocity_gradient(field: VectorField, grid: StaggeredGrid | None = None) -> TensorField:
    """``G[i, j] = d v_i / d x_j`` at cell centres."""
    _require_grid(field, grid)
    g = field.grid
    vals = (g.vgrad_matrix @ field.values).reshape((3, 3) + g.cell_shape)
    return TensorField(g, vals)


def strain(field: VectorField, grid: StaggeredGrid | None = None) -> TensorField:
    """Dilatation tensor ``D(v) = grad v + grad v^T`` (no factor 1/2) at cell centres."""
    _require_grid(field, grid)
    g = field.grid
    vals = (g.strain_matrix @ field.values).reshape((3, 3) + g.cell_shape)
    return TensorField(g, vals)


def to_cells(field: VectorField) -> np.ndarray:
    """Average each component to cell centres, shape ``(3, nx, ny, nz)``."""
    g = field.grid
    return (g.interp_matrix @ field.values).reshape((3,) + g.cell_shape)


def boundary_trace(field: VectorField, patch) -> np.ndarray:
    """Cartesian velocity at the sample points of ``patch``, shape ``(n, 3)``."""
    g = field.grid
    mats = g.trace_matrices(patch)
    return np.column_stack([m @ field.values for m in mats])


def normal_trace(field: VectorField, patch) -> np.ndarray:
    p = field.grid.patch(patch)
    return field.values[p.face_index] * p.normal.sum(axis=1)


def boundary_strain(field: VectorField, patch) -> np.ndarray:
    """Strain tensor extrapolated to the points of ``patch``, shape ``(n, 3, 3)``."""
    g = field.grid
    p = g.patch(patch)
    D = strain(field).values
    return np.moveaxis(p.extrapolate(D), -1, 0)


# -- quadrature ----------------------------------------------------------------

def integrate_volume(f) -> float:
    """Midpoint rule over cells (scalars) or trapezoid-in-normal rule over faces (vectors)."""
    if isinstance(f, ScalarField):
        return float(np.sum(f.values) * f.grid.cell_volume)
    if isinstance(f, VectorField):
        return float(np.dot(f.grid.face_weights, f.values))
    raise TypeError("integrate_volume expects a ScalarField or VectorField")


def integrate_surface(values, patch, grid: StaggeredGrid | None = None) -> float:
    """Midpoint rule over the face centres of a boundary patch."""
    if grid is not None:
        patch = grid.patch(patch)
    if not isinstance(patch, Patch):
        raise DomainError("integrate_surface needs a Patch (or a grid to resolve the name)")
    if patch.size == 0:
        raise DomainError(f"patch {patch.name} is empty")
    values = np.asarray(values, dtype=float)
    if values.shape[0] != patch.size:
        raise ShapeError(f"patch {patch.name} has {patch.size} points, got {values.shape[0]} values")
    return float(np.dot(patch.areas, values))


def inner(u: VectorField, v: VectorField) -> float:
    """L2 inner product of two face fields."""
    u._check(v)
    return float(np.dot(u.grid.face_weights * u.values, v.values))
