import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cylflow.domain import CylinderSpec, ScalarField, VectorField, build_grid
from cylflow.errors import DomainError, ParameterError
from cylflow.norms import (
    boundary_sobolev_norm,
    embedding_ok,
    gagliardo_norm,
    gagliardo_seminorm,
    lp_norm,
    slice_sup_norm,
    sobolev_norm,
    v02_from_series,
    v02_norm,
    weighted_norm,
)

HALF = CylinderSpec(a=0.5, nx=6, ny=6, nz=6)


def const(g, c):
    return ScalarField.from_function(g, lambda x, y, z: c + 0 * x)


def test_lp_of_constants():
    g = build_grid(HALF)
    assert lp_norm(const(g, 1.0), 2) == pytest.approx(1.0, rel=1e-12)
    assert lp_norm(const(g, 2.0), 6 / 5) == pytest.approx(2.0, rel=1e-12)


def test_lp_of_axial_coordinate_converges_to_closed_form():
    exact = math.sqrt(quad(lambda z: z * z, -0.5, 0.5)[0])
    errs = []
    for n in (8, 16):
        g = build_grid(CylinderSpec(a=0.5, nx=4, ny=4, nz=n))
        errs.append(abs(lp_norm(ScalarField.from_function(g, lambda x, y, z: z), 2) - exact))
    assert errs[1] < 1e-3
    assert errs[1] < errs[0] / 3.5


def test_lp_rejects_small_exponent():
    with pytest.raises(ParameterError):
        lp_norm(const(build_grid(HALF), 1.0), 0.5)


def test_weighted_norm_against_quadrature():
    exact = (2 * quad(lambda s: s**3, 0, 0.5)[0]) ** (1 / 3)
    assert exact == pytest.approx((1 / 32) ** (1 / 3), rel=1e-14)
    g = build_grid(CylinderSpec(a=0.5, nx=4, ny=4, nz=64))
    assert weighted_norm(const(g, 1.0), 0, 3, 1.0) == pytest.approx(exact, rel=2e-3)
    assert weighted_norm(const(g, 0.0), 0, 3, 1.0) == 0.0


def test_weighted_norm_unweighted_limit(rng):
    g = build_grid(HALF)
    f = ScalarField(g, rng.standard_normal(g.cell_shape))
    assert weighted_norm(f, 0, 3, 0.0) == pytest.approx(lp_norm(f, 3), rel=1e-12)
    with pytest.raises(ParameterError):
        weighted_norm(f, 3, 3, 1.0)


def _brute_gagliardo(vals, pts, w, sigma, p):
    total = 0.0
    for i, j in itertools.product(range(len(vals)), repeat=2):
        if i != j:
            r = math.dist(pts[i], pts[j])
            total += w[i] * w[j] * abs(vals[i] - vals[j]) ** p / r ** (2 + sigma * p)
    return total ** (1 / p)


@pytest.mark.parametrize("n", [4, 8])
def test_gagliardo_matches_brute_force(n):
    g = build_grid(CylinderSpec(nx=n, ny=n, nz=2 * n))
    patch = g.patch("S2+")
    x = patch.points[:, 0]
    semi = gagliardo_seminorm(x, patch.points[:, :2], patch.areas, 0.5, 2, block=7)
    oracle = _brute_gagliardo(x, patch.points[:, :2], patch.areas, 0.5, 2)
    assert semi == pytest.approx(oracle, rel=1e-10)
    full = gagliardo_norm(x, patch, 0.5, 2)
    assert full == pytest.approx(math.hypot(lp_norm(x, 2, patch), oracle), rel=1e-10)


def test_gagliardo_of_constant_and_zero(grid6):
    patch = grid6.patch("S2-")
    c = np.full(patch.size, -1.5)
    assert gagliardo_norm(c, patch, 0.3, 3) == pytest.approx(1.5 * patch.area ** (1 / 3), rel=1e-12)
    assert gagliardo_norm(0 * c, patch, 0.3, 3) == 0.0
    with pytest.raises(ParameterError):
        gagliardo_norm(c, patch, 1.0, 2)
    with pytest.raises(DomainError):
        gagliardo_norm(np.ones(grid6.patch("S1").size), grid6.patch("S1"), 0.5, 2)


def test_boundary_norm_integer_and_fractional(grid6):
    patch = grid6.patch("S2+")
    x = patch.points[:, 0]
    assert boundary_sobolev_norm(x, grid6, "S2+", 0.0, 2) == pytest.approx(lp_norm(x, 2, patch), rel=1e-12)
    assert boundary_sobolev_norm(x, grid6, "S2+", 0.5, 2) == pytest.approx(gagliardo_norm(x, patch, 0.5, 2),
                                                                          rel=1e-12)
    # a constant first derivative has zero fractional seminorm
    assert boundary_sobolev_norm(x, grid6, "S2+", 1.5, 2) == pytest.approx(
        boundary_sobolev_norm(x, grid6, "S2+", 1.0, 2), rel=1e-14)
    assert boundary_sobolev_norm(x**2, grid6, "S2+", 1.5, 2) > boundary_sobolev_norm(x**2, grid6, "S2+", 1.0, 2)


def test_slice_sup_picks_largest_layer(grid6):
    f = ScalarField.from_function(grid6, lambda x, y, z: 1 + z**2)
    zc = grid6.zc
    assert slice_sup_norm(f, 2) == pytest.approx(1 + zc.max() ** 2, rel=1e-12)


def test_v02_examples(grid6):
    assert v02_from_series([2.0], [0.0], dt=0.0) == 2.0
    assert v02_from_series([0.0, 0.0, 0.0], [0.0, 0.0, 0.0], dt=1.0) == 0.0
    # constant-in-time series: 1 + sqrt(1 * 4)
    assert v02_from_series([1.0] * 5, [1.0] * 5, dt=1.0) == pytest.approx(3.0, rel=1e-14)
    assert v02_norm([VectorField.zeros(grid6)] * 3, 0.1) == 0.0
    with pytest.raises(DomainError):
        v02_norm([], 0.1)


@pytest.mark.parametrize("s, p, ok", [(5 / 6, 6, True), (4 / 3, 3, False), (1.0, 4, False),
                                      (2.0, 3, True)])
def test_embedding_condition(s, p, ok):
    assert embedding_ok(s, p) is ok


def test_embedding_rejects_small_p():
    with pytest.raises(ParameterError):
        embedding_ok(2.0, 2.0)


def _norms(f):
    return [lp_norm(f, 2), lp_norm(f, 1.2), sobolev_norm(f, 1, 3), sobolev_norm(f, 2, 3),
            weighted_norm(f, 1, 3, 0.75), slice_sup_norm(f, 3)]


_SMALL = build_grid(CylinderSpec(nx=4, ny=4, nz=8))
_fields = st.lists(st.floats(-5, 5, allow_nan=False), min_size=_SMALL.n_cells,
                   max_size=_SMALL.n_cells).map(lambda v: ScalarField(_SMALL, np.reshape(v, _SMALL.cell_shape)))


@settings(max_examples=20, deadline=None)
@given(f=_fields, c=st.one_of(st.just(0.0), st.floats(1e-6, 4), st.floats(-4, -1e-6)))
def test_norms_are_homogeneous(f, c):
    for a, b in zip(_norms(ScalarField(_SMALL, c * f.values)), _norms(f)):
        assert a == pytest.approx(abs(c) * b, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(f=_fields, h=_fields)
def test_norms_satisfy_triangle_inequality(f, h):
    for s, a, b in zip(_norms(ScalarField(_SMALL, f.values + h.values)), _norms(f), _norms(h)):
        assert s <= a + b + 1e-10
