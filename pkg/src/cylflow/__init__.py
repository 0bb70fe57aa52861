"""Incompressible flow in a box-section cylinder with prescribed end-face flux.

The package lifts the boundary flux to a solenoidal field, solves for the
homogenised velocity with a divergence-free Galerkin method, and checks the
recorded energy ledger against a priori bounds.
"""
from .certify import (
    EnergyLedger,
    GlobalCriterion,
    NormParams,
    PhiCalibration,
    absorption_check,
    check_global_criterion,
    decay_check,
    flux_norms,
    verify_integrated_estimate,
)
from .config import RunConfig, load_config, parse_config
from .domain import CylinderSpec, ScalarField, StaggeredGrid, VectorField, build_grid, div, grad
from .errors import CylflowError
from .galerkin import GalerkinBasis, GalerkinSystem, build_divfree_basis, project_initial
from .hopf import BoundaryFlux, HopfParams, SeparableFlux, build_lift, check_compatibility, select_params
from .norms import embedding_ok, lp_norm, sobolev_norm, weighted_norm
from .poisson import solve_neumann, verify_weighted_estimate
from .runner import RunResult, run_simulation
from .scenarios import SUITE, scenario

__version__ = "0.1.0"

__all__ = [
    "BoundaryFlux", "CylflowError", "CylinderSpec", "EnergyLedger", "GalerkinBasis",
    "GalerkinSystem", "GlobalCriterion", "HopfParams", "NormParams", "PhiCalibration",
    "RunConfig", "RunResult", "SUITE", "ScalarField", "SeparableFlux", "StaggeredGrid",
    "VectorField", "absorption_check", "build_divfree_basis", "build_grid", "build_lift",
    "check_compatibility", "check_global_criterion", "decay_check", "div", "embedding_ok",
    "flux_norms", "grad", "load_config", "lp_norm", "parse_config", "project_initial",
    "run_simulation", "scenario", "select_params", "sobolev_norm", "solve_neumann",
    "verify_integrated_estimate", "verify_weighted_estimate", "weighted_norm",
]
