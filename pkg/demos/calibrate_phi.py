"""Re-derive the frozen growth-function constant C_phi.

Runs every built-in scenario at two resolutions, asks each ledger for the
smallest C that makes the integrated energy estimate hold, and takes twice
the worst case.  The library default was produced by this script.

    python3 demos/calibrate_phi.py            # about 3 minutes
"""
from cylflow.certify import (
    DEFAULT_PHI_C,
    PhiCalibration,
    calibrate_phi,
    estimate_sides,
    minimal_phi_constant,
)
from cylflow.domain import build_grid
from cylflow.galerkin import build_divfree_basis
from cylflow.runner import run_simulation
from cylflow.scenarios import SUITE, scenario

ledgers = []
print(f"{'scenario':14s} {'grid':8s} {'min C':>10s}")
for res in ("6x6x12", "8x8x16"):
    cfg0 = scenario("zero").with_resolution(res)
    basis = build_divfree_basis(build_grid(cfg0.spec))
    for name in SUITE:
        run = run_simulation(scenario(name, t_end=1.0).with_resolution(res), basis=basis)
        ledgers.append(run.ledger)
        c = minimal_phi_constant(estimate_sides(run.ledger, PhiCalibration(C=1.0)))
        print(f"{name:14s} {res:8s} {c:10.3g}")

cal = calibrate_phi(ledgers, q=2.0, safety=2.0)
print(f"\nworst case {max(cal['per_run']):.4g}  ->  C_phi = {cal['C']:.4g} (q = {cal['q']:g})")
print(f"library default C_phi = {DEFAULT_PHI_C}")
