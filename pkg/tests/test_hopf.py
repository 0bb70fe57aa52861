import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylflow.domain import CylinderSpec, ScalarField, build_grid, div, integrate_surface, normal_trace
from cylflow.errors import ConsistencyError, DomainError, ParameterError, ValidationError
from cylflow.hopf import (
    BoundaryFlux,
    HopfParams,
    SeparableFlux,
    build_b,
    build_delta,
    build_lift,
    check_compatibility,
    eta,
    eta_prime,
    extend_flux,
    lift_from_profiles,
    select_params,
)


def one(x, y, t):
    return 1.0 + 0 * x


def zero(x, y, t):
    return 0.0 * x


def parabolic(x, y, t):
    return 36 * x * (1 - x) * y * (1 - y)


def test_cutoff_reference_values():
    p = HopfParams(eps=0.5, rho=0.8)
    assert p.r == pytest.approx(0.8 * math.exp(-2.0), rel=1e-15)
    assert eta(0.05, p) == 1.0
    assert eta(0.8, p) == 0.0
    assert eta(p.r, p) == pytest.approx(1.0, rel=1e-14)
    assert eta_prime(0.05, p) == 0.0
    assert eta_prime(0.4, p) == pytest.approx(-1.25, rel=1e-15)


def test_cutoff_rejects_negative_distance():
    with pytest.raises(DomainError):
        eta(-0.1, HopfParams(0.5, 0.5))
    with pytest.raises(DomainError):
        eta_prime(np.array([0.1, -1.0]), HopfParams(0.5, 0.5))


@settings(max_examples=60, deadline=None)
@given(eps=st.floats(0.05, 3.0), rho=st.floats(1e-3, 0.5))
def test_cutoff_is_monotone_continuous_and_bounded(eps, rho):
    p = HopfParams(eps, rho)
    s = np.linspace(0.0, 2 * rho, 4001)
    e = eta(s, p)
    assert e.max() == 1.0 and e.min() >= 0.0
    assert np.all(np.diff(e) <= 1e-15)
    # continuity at both breakpoints
    for knot, value in ((p.r, 1.0), (rho, 0.0)):
        side = eta(np.array([knot * (1 - 1e-9), knot * (1 + 1e-9)]), p)
        np.testing.assert_allclose(side, value, atol=1e-8)
    pos = s > 0
    assert np.all(np.abs(eta_prime(s[pos], p)) <= eps / s[pos] * (1 + 1e-14))


def test_select_params_reference_values():
    p = select_params(0.15, 1.0, a=1.0)
    assert p.eps == pytest.approx(0.01, rel=1e-14)
    assert p.rho == pytest.approx(1e-12, rel=1e-12)
    assert not p.clamped
    q = select_params(15.0, 1.0, a=1.0)
    assert q.rho == 0.5 and q.clamped
    z = select_params(1.0, 0.0, a=1.0)
    assert z.degenerate


@settings(max_examples=30, deadline=None)
@given(nu=st.floats(0.05, 2.0), norm=st.floats(0.5, 20.0), c=st.floats(0.5, 4.0))
def test_select_params_homogeneous(nu, norm, c):
    a, b = select_params(nu, c * norm, a=1.0), select_params(nu / c, norm, a=1.0)
    assert a.eps == pytest.approx(b.eps, rel=1e-12)
    assert a.rho == pytest.approx(b.rho, rel=1e-10)
    assert a.clamped == b.clamped


def test_select_params_rejects_bad_embedding():
    with pytest.raises(ParameterError):
        select_params(1.0, 1.0, s=4 / 3, p=3)


def test_compatibility_residuals(grid6):
    assert check_compatibility(BoundaryFlux(one, one, steady=True), grid6).max_residual == 0.0
    bad = check_compatibility(BoundaryFlux(one, zero, steady=True), grid6)
    assert not bad.ok
    assert bad.max_residual == pytest.approx(1.0, rel=1e-14)
    # constant outflow matched to the parabola's midpoint-rule integral
    d1, _ = BoundaryFlux(parabolic, parabolic).profiles(grid6)
    mean = float(np.dot(grid6.patch("S2-").areas, d1))
    rep = check_compatibility(BoundaryFlux(parabolic, lambda x, y, t: mean + 0 * x, steady=True), grid6)
    assert rep.ok and rep.max_residual < 1e-12


def test_negative_flux_rejected(grid6):
    with pytest.raises(ValidationError):
        BoundaryFlux(lambda x, y, t: -1 + 0 * x, one).profiles(grid6)


def test_extension_is_constant_along_axis(grid6):
    d1, d2 = BoundaryFlux(parabolic, one).profiles(grid6)
    e1, e2 = extend_flux(d1, d2, grid6)
    np.testing.assert_array_equal(e2.values, 1.0)
    assert np.ptp(e1.values, axis=2).max() == 0.0
    np.testing.assert_allclose(e1.values[:, :, 0].ravel(), d1, rtol=0, atol=0)


def test_b_plateau_support_and_balance(grid6):
    p = HopfParams(0.5, 0.4)
    ones = np.ones(grid6.patch("S2-").size)
    b = build_b(ones, ones, p, grid6)
    zw = grid6.face_coords(2)[2]
    sig = np.minimum(grid6.a + zw, grid6.a - zw)
    w = b.w
    assert np.all(w[sig <= p.r] == 1.0)
    assert np.all(w[sig > p.rho] == 0.0)
    assert np.abs(b.u).max() == 0 and np.abs(b.v).max() == 0
    assert abs(np.sum(div(b).values) * grid6.cell_volume) < 1e-10
    assert np.abs(build_b(0 * ones, 0 * ones, p, grid6).values).max() == 0.0


def test_b_rejects_overlap_and_imbalance(grid6):
    ones = np.ones(grid6.patch("S2-").size)
    with pytest.raises(ParameterError):
        build_b(ones, ones, HopfParams(0.5, 0.6), grid6)
    with pytest.raises(ValidationError):
        build_b(ones, 0 * ones, HopfParams(0.5, 0.4), grid6)


def test_zero_flux_lift_vanishes(grid6):
    lift = build_lift(BoundaryFlux.zero(), HopfParams(0.5, 0.5), grid6)
    for f in (lift.b, lift.delta, lift.delta_t):
        assert np.abs(f.values).max() == 0.0
    assert np.abs(lift.phi.values).max() == 0.0


def test_constant_flux_lift(grid6):
    lift = build_lift(BoundaryFlux(one, one, steady=True), HopfParams(0.5, 0.5), grid6)
    assert np.abs(div(lift.delta).values).max() < 1e-9
    assert np.abs(lift.delta_t.values).max() == 0.0
    out = integrate_surface(normal_trace(lift.delta, "S2+"), "S2+", grid6)
    assert out == pytest.approx(grid6.spec.end_area, rel=1e-10)


def test_stale_potential_rejected(grid6):
    d1, d2 = BoundaryFlux(parabolic, parabolic).profiles(grid6)
    b, phi, _ = lift_from_profiles(d1, d2, HopfParams(0.5, 0.5), grid6)
    build_delta(b, phi, d1, d2)
    with pytest.raises(ConsistencyError):
        build_delta(b * 2.0, phi, d1, d2)


def test_separable_flux_matches_generic_lift(grid6):
    om = 3.0

    def s(t):
        return 1 + 0.5 * math.sin(om * t)

    sep = SeparableFlux(lambda x, y: 1 + 0 * x, lambda x, y: 1 + 0 * x, s, lambda t: 0.5 * om * math.cos(om * t))
    gen = BoundaryFlux(lambda x, y, t: s(t) + 0 * x, lambda x, y, t: s(t) + 0 * x)
    p = HopfParams(0.5, 0.5)
    a, b = build_lift(sep, p, grid6, 0.7), build_lift(gen, p, grid6, 0.7)
    np.testing.assert_allclose(a.delta.values, b.delta.values, atol=1e-9)
    np.testing.assert_allclose(a.delta_t.values, b.delta_t.values, atol=1e-5)
