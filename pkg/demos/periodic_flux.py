"""A flux that never switches off, followed for ten periods.

The end-face flux oscillates as 1 + sin(3t)/2, so the data never decay.  The
certifier checks the per-interval smallness condition and then that the
velocity at every interval boundary stays below the bound A.

    python3 demos/periodic_flux.py            # about 20 seconds
"""
from cylflow.runner import run_simulation
from cylflow.scenarios import scenario

cfg = scenario("sinusoidal", t_end=10.0, flux_omega=3.0)
run = run_simulation(cfg)
g = run.reports["global_criterion"]

print(f"dt = {run.dt:.4g}, {run.steps} steps, {run.system.basis.N} modes")
print(f"A = {g['A']:.4g}, per-interval budget (1 - exp(-nu T)) A^2 = {g['budget']:.4g}\n")
print(" k   data_k      margin    ||v(kT)||")
for d, v in zip(g["intervals"], g["v_norm_at_kT"]):
    print(f"{d['k']:2d}  {d['data']:9.4g}  {d['margin']:9.4g}  {v:9.4f}")
print(f"10  {'':9s}  {'':9s}  {g['v_norm_at_kT'][-1]:9.4f}")
print(f"\ncriterion holds: {g['criterion']}; ||v(kT)|| <= A for all k: {g['v_bound_ok']}")
