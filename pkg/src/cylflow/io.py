"""File formats: VTK snapshots, coefficient checkpoints and flux CSV tables."""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .domain import CylinderSpec, ScalarField, StaggeredGrid, VectorField, to_cells
from .errors import ParseError, ValidationError
from .hopf import BoundaryFlux

# -- VTK -------------------------------------------------------------------------------

def write_vtk(path, field, name: str = "field") -> None:
    """Legacy ASCII STRUCTURED_POINTS file with point data at cell centres.

    Vector fields are averaged from faces to cells first.
    """
    g: StaggeredGrid = field.grid
    if isinstance(field, VectorField):
        data = to_cells(field).reshape(3, -1)
        kind = "VECTORS"
    elif isinstance(field, ScalarField):
        data = field.values.reshape(1, -1)
        kind = "SCALARS"
    else:
        raise TypeError(f"cannot export {type(field).__name__}")
    # VTK orders points with x fastest
    nx, ny, nz = g.cell_shape
    data = data.reshape(data.shape[0], nx, ny, nz).transpose(0, 3, 2, 1).reshape(data.shape[0], -1)
    lines = [
        "# vtk DataFile Version 3.0",
        name,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {nx} {ny} {nz}",
        f"ORIGIN {g.xc[0]!r} {g.yc[0]!r} {g.zc[0]!r}",
        f"SPACING {g.hx!r} {g.hy!r} {g.hz!r}",
        f"POINT_DATA {nx * ny * nz}",
    ]
    if kind == "SCALARS":
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [repr(float(x)) for x in data[0]]
    else:
        lines.append(f"VECTORS {name} double")
        lines += [" ".join(repr(float(x)) for x in col) for col in data.T]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_vtk_values(path) -> np.ndarray:
    """Point data of a file written by :func:`write_vtk`, shape ``(n_points, k)``."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    for i, line in enumerate(lines):
        if line.startswith("SCALARS"):
            return np.array([float(x) for x in lines[i + 2:] if x.strip()])[:, None]
        if line.startswith("VECTORS"):
            return np.array([[float(v) for v in x.split()] for x in lines[i + 1:] if x.strip()])
    raise ParseError(f"{path}: no point data")


# -- checkpoints -----------------------------------------------------------------------

_MAGIC = b"CYLCKPT1"
_HEADER = struct.Struct("<8s5d4qd")


def write_checkpoint(path, spec: CylinderSpec, t: float, C) -> None:
    """Little-endian header ``(magic, a, Lx, Ly, nu, gamma, nx, ny, nz, N, t)`` then ``C``."""
    C = np.ascontiguousarray(C, dtype="<f8")
    head = _HEADER.pack(_MAGIC, spec.a, spec.Lx, spec.Ly, spec.nu, spec.gamma,
                        spec.nx, spec.ny, spec.nz, len(C), float(t))
    Path(path).write_bytes(head + C.tobytes())


def read_checkpoint(path):
    """Return ``(spec, t, C)``."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ParseError(f"{path}: truncated checkpoint header")
    magic, a, Lx, Ly, nu, gamma, nx, ny, nz, n, t = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ParseError(f"{path}: not a checkpoint file")
    body = raw[_HEADER.size:]
    if len(body) != 8 * n:
        raise ParseError(f"{path}: expected {n} coefficients, found {len(body) / 8:g}")
    C = np.frombuffer(body, dtype="<f8").astype(float)
    spec = CylinderSpec(a=a, Lx=Lx, Ly=Ly, nx=nx, ny=ny, nz=nz, nu=nu, gamma=gamma)
    return spec, t, C


# -- flux tables -----------------------------------------------------------------------

def read_face_csv(path) -> np.ndarray:
    """``(n, 3)`` array from a CSV with header ``x1,x2,value``."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if header != ["x1", "x2", "value"]:
            raise ParseError(f"{path}: header must be x1,x2,value")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 3:
                raise ParseError(f"{path}: row {lineno} has {len(rec)} fields")
            try:
                rows.append([float(x) for x in rec])
            except ValueError:
                raise ParseError(f"{path}: row {lineno} is not numeric") from None
    if not rows:
        raise ParseError(f"{path}: no samples")
    return np.array(rows)


def write_face_csv(path, x1, x2, values) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "value"])
        for row in zip(np.ravel(x1), np.ravel(x2), np.ravel(values)):
            w.writerow([repr(float(x)) for x in row])


def load_flux_tables(times, inflow_pattern: str, outflow_pattern: str) -> BoundaryFlux:
    """Tabulated flux from per-time CSV files; patterns contain ``{k}`` (sample index)."""
    times = [float(t) for t in times]
    if "{k}" not in inflow_pattern or "{k}" not in outflow_pattern:
        raise ValidationError("flux table patterns must contain {k}")
    s1 = [read_face_csv(inflow_pattern.format(k=k)) for k in range(len(times))]
    s2 = [read_face_csv(outflow_pattern.format(k=k)) for k in range(len(times))]
    return BoundaryFlux.tabulated(times, s1, s2, name="table")

