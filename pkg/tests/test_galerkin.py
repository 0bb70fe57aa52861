import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylflow.domain import CylinderSpec, ScalarField, VectorField, build_grid, div, grad, normal_trace
from cylflow.errors import BlowUpError, CapacityError, ShapeError
from cylflow.galerkin import (
    Forms,
    GalerkinSystem,
    assemble_sources,
    build_divfree_basis,
    nullspace_dimension,
    project_initial,
    reconstruct_v,
    rhs_ode,
    source_functional,
    step,
)
from cylflow.hopf import BoundaryFlux, HopfParams, build_lift
from cylflow.norms import lp_norm as lp


def parabolic(x, y, t):
    return 36 * x * (1 - x) * y * (1 - y)


def skewed(x, y, t):
    return 36 * x * (1 - x) * y * (1 - y) * (1 + x + 0.5 * y)


STEADY = BoundaryFlux(parabolic, parabolic, steady=True)


def test_basis_is_solenoidal_impermeable_orthonormal(basis4):
    g = basis4.grid
    assert np.abs(g.div_matrix @ basis4.vectors).max() <= 1e-11
    np.testing.assert_allclose(basis4.gram(), np.eye(basis4.N), atol=1e-12)
    for k in (0, basis4.N // 2, basis4.N - 1):
        a = basis4.mode(k)
        for name in g.patches:
            assert np.abs(normal_trace(a, name)).max() == 0.0


def test_dimension_matches_dense_rank(grid4, basis4):
    Dint = grid4.div_matrix[:, grid4.interior_faces].toarray()
    oracle = len(grid4.interior_faces) - np.linalg.matrix_rank(Dint)
    assert nullspace_dimension(grid4) == oracle == basis4.N == 177


def test_truncated_basis_and_capacity(grid4, basis4):
    small = build_divfree_basis(grid4, 10)
    assert small.N == 10
    np.testing.assert_allclose(small.vectors, basis4.vectors[:, :10], atol=1e-12)
    with pytest.raises(CapacityError) as info:
        build_divfree_basis(grid4, 178)
    assert info.value.max_size == 177


def test_projection_examples(basis4, rng):
    a = basis4.vectors
    C = project_initial(VectorField(basis4.grid, a[:, 0]), basis4)
    np.testing.assert_allclose(C, np.eye(basis4.N)[0], atol=1e-12)
    C = project_initial(VectorField(basis4.grid, 2 * a[:, 0] + 3 * a[:, 1]), basis4)
    np.testing.assert_allclose(C[:3], [2, 3, 0], atol=1e-12)
    # gradients are orthogonal to the solenoidal space
    phi = ScalarField(basis4.grid, rng.standard_normal(basis4.grid.cell_shape))
    assert np.abs(project_initial(grad(phi), basis4)).max() < 1e-12


def test_projection_rejects_foreign_grid(basis4, grid6):
    with pytest.raises(ShapeError):
        project_initial(VectorField.zeros(grid6), basis4)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_transport_is_skew(basis4, seed):
    r = np.random.default_rng(seed)
    forms = Forms(basis4.grid, 1.0, 1.0)
    u = r.standard_normal(basis4.grid.n_faces)
    v = r.standard_normal(basis4.grid.n_faces)
    psi = r.standard_normal(basis4.grid.n_faces)
    assert abs(forms.trilinear(u, v, v)) < 1e-10 * (1 + np.linalg.norm(u) * np.linalg.norm(v) ** 2)
    assert forms.trilinear(u, v, psi) == pytest.approx(-forms.trilinear(u, psi, v), abs=1e-10)


def test_energy_matches_quadrature(basis4, rng):
    system = GalerkinSystem(basis4, 1.0, 1.0)
    st_ = system.state(0.0, rng.standard_normal(basis4.N))
    assert st_.energy == pytest.approx(lp(st_.w, 2) ** 2, rel=1e-10)


def test_zero_lift_sources_reduce_to_forcing(grid6, rng):
    lift = build_lift(BoundaryFlux.zero(), HopfParams(0.5, 0.5), grid6)
    f = VectorField(grid6, rng.standard_normal(grid6.n_faces))
    src = assemble_sources(lift, f, 1.0, 1.0)
    np.testing.assert_array_equal(src.F.values, f.values)
    for B in (src.B1, src.B2_in, src.B2_out):
        assert np.abs(B).max() == 0.0


def test_weak_and_pointwise_loads_converge():
    """Weak load against the pointwise sources plus the skew end-face term."""
    P = np.pi
    flux = BoundaryFlux(skewed, skewed, steady=True)

    def psi_f(X, Y, Z):
        return (X * np.sin(P * X) * P * np.cos(P * Y) * (1 + Z),
                -(np.sin(P * X) + P * X * np.cos(P * X)) * np.sin(P * Y) * (1 + Z), 0 * X)

    gaps = []
    for n in (4, 8, 16):
        g = build_grid(CylinderSpec(nx=n, ny=n, nz=2 * n))
        lift = build_lift(flux, HopfParams(0.5, 0.5), g)
        forms = Forms(g, 1.0, 1.0)
        d = lift.delta.values
        weak = -(forms.K @ d) - forms.transport(d, d) - forms.mass(lift.delta_t.values)
        psi = VectorField.from_function(g, psi_f)
        strong = source_functional(assemble_sources(lift, None, 1.0, 1.0), psi, 1.0)
        gaps.append(abs(weak @ psi.values - strong))
    assert gaps[2] < gaps[1] < gaps[0]
    assert gaps[2] < gaps[0] / 4


def test_rest_state_is_equilibrium(basis4):
    system = GalerkinSystem(basis4, 1.0, 1.0)
    s0 = system.initial_state()
    assert np.abs(rhs_ode(s0, system)).max() == 0.0
    s1 = step(s0, 0.01, system)
    assert np.abs(s1.C).max() == 0.0 and s1.t == pytest.approx(0.01)


def test_response_from_rest_is_forcing_projection(basis4, rng):
    g = basis4.grid
    f = VectorField(g, rng.standard_normal(g.n_faces))
    system = GalerkinSystem(basis4, 1.0, 1.0, forcing=lambda t: f)
    expected = basis4.vectors.T @ (g.face_weights * f.values)
    np.testing.assert_allclose(system.rhs(0.0, np.zeros(basis4.N)), expected, atol=1e-12)


def test_stokes_limit_energy_non_increasing(basis4, rng):
    system = GalerkinSystem(basis4, 1.0, 1.0, transport_on=False)
    state = system.state(0.0, rng.standard_normal(basis4.N))
    dt = 0.5 * system.stability_bound()
    energies = [state.energy]
    for _ in range(40):
        state = system.step(state, dt)
        energies.append(state.energy)
    assert np.all(np.diff(energies) <= 0.0)


def test_half_steps_agree_to_third_order(grid4):
    basis = build_divfree_basis(grid4, 40)
    system = GalerkinSystem(basis, 1.0, 1.0, flux=STEADY, params=HopfParams(0.5, 0.5))
    state = system.state(0.0, 0.3 * np.random.default_rng(5).standard_normal(basis.N) / (1 + np.arange(basis.N)))
    h0 = 0.5 * system.stability_bound(3.0)

    def gap(h):
        full = system.step(state, h)
        half = system.step(system.step(state, h / 2), h / 2)
        return np.linalg.norm(full.C - half.C)

    g1, g2 = gap(h0), gap(h0 / 2)
    assert np.log2(g1 / g2) >= 2.7


def test_blow_up_detected(basis4, rng):
    system = GalerkinSystem(basis4, 1.0, 1.0)
    state = system.state(0.0, rng.standard_normal(basis4.N))
    with pytest.raises(BlowUpError) as info:
        system.step(state, 200 * system.stability_bound())
    assert info.value.diagnostics["norm_after"] > 10 * info.value.diagnostics["norm_before"]


def test_reconstruction(basis4):
    system = GalerkinSystem(basis4, 1.0, 1.0, flux=STEADY, params=HopfParams(0.5, 0.5))
    lift = system.lift(0.0)
    state = system.initial_state()
    v = reconstruct_v(state, lift)
    np.testing.assert_array_equal(v.values, lift.delta.values)
    np.testing.assert_allclose(normal_trace(v, "S2+"), lift.d2, atol=1e-12)
    state = system.state(0.0, np.ones(basis4.N))
    v = reconstruct_v(state, lift)
    np.testing.assert_allclose(v.values, state.w.values + lift.delta.values, atol=0)
    assert np.abs(div(v).values).max() < 1e-8
    free = GalerkinSystem(basis4, 1.0, 1.0)
    np.testing.assert_array_equal(free.velocity(state).values, state.w.values)
