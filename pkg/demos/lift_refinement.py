"""How the boundary lift behaves under mesh refinement.

For the parabolic inflow profile the script builds the lift on three grids
and prints the normal-trace mismatch, the divergence left by the Poisson
correction and the weighted-estimate ratio, whose mesh stability is what the
energy argument relies on.

    python3 demos/lift_refinement.py
"""
import numpy as np

from cylflow.config import RunConfig
from cylflow.domain import build_grid, div
from cylflow.hopf import build_lift, trace_errors
from cylflow.poisson import verify_weighted_estimate
from cylflow.scenarios import hopf_params, make_flux

print(f"{'grid':10s} {'eps':>8s} {'rho':>9s} {'trace err':>10s} {'max|div|':>10s} {'ratio':>7s} {'CG its':>7s}")
for n in (4, 8, 12):
    cfg = RunConfig(flux="parabolic").with_resolution(str(n))
    grid = build_grid(cfg.spec)
    flux = make_flux(cfg)
    params = hopf_params(cfg, flux, grid)
    lift = build_lift(flux, params, grid)
    err = max(trace_errors(lift.delta, lift.d1, lift.d2).values())
    ratio = verify_weighted_estimate(lift.b, lift.phi, cfg.mu).ratio
    print(f"{f'{n}x{n}x{2 * n}':10s} {params.eps:8.3g} {params.rho:9.2e} {err:10.1e} "
          f"{np.abs(div(lift.delta).values).max():10.1e} {ratio:7.3f} {lift.report.iterations:7d}")
