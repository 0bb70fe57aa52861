"""End-to-end pipeline: lift, Galerkin loop, ledger, certification, output files."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .certify import (
    EnergyLedger,
    GlobalCriterion,
    LedgerRecorder,
    absorption_check,
    check_global_criterion,
    decay_check,
    interval_data,
    verify_integrated_estimate,
    write_report,
)
from .config import RunConfig
from .domain import build_grid
from .errors import ConfigurationError, ValidationError
from .galerkin import GalerkinSystem, build_divfree_basis
from .hopf import check_compatibility
from .io import write_checkpoint, write_vtk
from .poisson import verify_weighted_estimate
from .scenarios import hopf_params, initial_coefficients, make_flux, make_forcing, sample_times

log = logging.getLogger(__name__)


@dataclass(eq=False)
class RunResult:
    config: RunConfig
    system: GalerkinSystem
    ledger: EnergyLedger
    state: object
    dt: float
    steps: int
    reports: dict = field(default_factory=dict)


def build_system(cfg: RunConfig, basis=None) -> GalerkinSystem:
    cfg.validate()
    grid = build_grid(cfg.spec)
    flux = make_flux(cfg)
    times = sample_times(cfg, flux)
    comp = check_compatibility(flux, grid, times, tol=cfg.lift_tol)
    if not comp.ok:
        raise ValidationError(f"incompatible flux: residual {comp.max_residual:.3e}")
    params = hopf_params(cfg, flux, grid)
    if basis is None or not basis.grid.same_as(grid):
        basis = build_divfree_basis(grid, cfg.modes or None)
    return GalerkinSystem(basis, cfg.nu, cfg.gamma, flux=flux, params=params,
                          forcing=make_forcing(cfg, grid), transport_on=cfg.transport,
                          lift_tol=cfg.lift_tol)


def choose_dt(cfg: RunConfig, system: GalerkinSystem, state) -> float:
    """Step aligned with the certification intervals and below the stability bound."""
    flux = system.flux
    vmax = float(np.max(np.abs(system.velocity(state).values)))
    for t in sample_times(cfg, flux)[::8]:
        vmax = max(vmax, float(np.max(np.abs(system.lift(t).delta.values))))
    bound = system.stability_bound(2.0 * vmax)
    if cfg.dt > 0:
        if cfg.dt > bound:
            raise ConfigurationError(f"dt = {cfg.dt:g} exceeds the stability bound {bound:.4g}")
        raw = cfg.dt
    else:
        raw = cfg.dt_safety * bound
    per = max(1, math.ceil(cfg.interval / raw - 1e-9))
    return cfg.interval / per


def default_bound(cfg: RunConfig, ledger: EnergyLedger) -> float:
    """``A`` with a factor-2 margin over the worst interval, and at least ``||v(0)||``."""
    data = interval_data(ledger, cfg.interval, cfg.intervals, cfg.calibration)
    worst = max((d["data"] for d in data), default=0.0)
    budget_factor = 1.0 - math.exp(-cfg.nu * cfg.interval)
    A = max(math.sqrt(2.0 * worst / budget_factor), ledger.rows[0]["v_l2"])
    return A if A > 0 else 1.0


def certify_ledger(cfg: RunConfig, ledger: EnergyLedger) -> dict:
    """Reports that depend only on the ledger (shared by simulate and certify)."""
    reports = {
        "integrated_estimate": verify_integrated_estimate(ledger, cfg.calibration),
        "decay": decay_check(ledger),
    }
    reports["decay"]["applicable"] = bool(np.all(ledger.column("f_l65_sq") == 0)
                                          and np.all(ledger.column("d_w12_sq") == 0))
    if cfg.intervals >= 1:
        A = cfg.bound_A or default_bound(cfg, ledger)
        crit = GlobalCriterion(A=A, T=cfg.interval, nu=cfg.nu, K=cfg.intervals)
        _, reports["global_criterion"] = check_global_criterion(crit, ledger, cfg.calibration)
    korn = ledger.column("korn_ratio")
    korn = korn[ledger.column("w_h1_sq") > 0]
    reports["korn_min"] = float(korn.min()) if korn.size else None
    reports["transport_power_max"] = float(np.max(np.abs(ledger.column("transport_power"))))
    return reports


def run_simulation(cfg: RunConfig, out: str | Path | None = None, basis=None) -> RunResult:
    system = build_system(cfg, basis)
    state = system.state(0.0, initial_coefficients(cfg, system.basis))
    dt = choose_dt(cfg, system, state)
    steps = int(round(cfg.t_end / dt))
    per = int(round(cfg.interval / dt))
    meta = {
        "nu": cfg.nu, "gamma": cfg.gamma, "dt": dt, "steps": steps, "modes": system.basis.N,
        "eps": system.params.eps, "rho": system.params.rho, "clamped": system.params.clamped,
        "hopf_rule": cfg.hopf_rule, "flux": cfg.flux, "forcing": cfg.forcing,
        "s": cfg.s, "p": cfg.p, "mu": cfg.mu, "resolution": f"{cfg.nx}x{cfg.ny}x{cfg.nz}",
    }
    rec = LedgerRecorder(system, cfg.norm_params, meta)
    out = Path(out) if out is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    rec.append(state)
    _snapshot(cfg, system, state, out, 0)
    for n in range(1, steps + 1):
        state = system.step(state, dt)
        state.t = n * dt
        if n % cfg.record_every == 0 or n % per == 0 or n == steps:
            rec.append(state)
        if cfg.snapshot_every and n % cfg.snapshot_every == 0:
            _snapshot(cfg, system, state, out, n)
    ledger = rec.ledger
    lift0 = system.lift(0.0)
    reports = certify_ledger(cfg, ledger)
    ab = absorption_check(lift0, system.params, cfg.nu, cfg.norm_params)
    reports["absorption"] = {
        "terms": ab.terms, "eps12": ab.eps12, "coefficient": ab.coefficient,
        "limit": ab.limit, "margin": ab.margin, "clamped": ab.clamped,
        "degenerate": ab.degenerate, "ok": ab.ok, "flagged": ab.flagged,
    }
    wr = verify_weighted_estimate(lift0.b, lift0.phi, cfg.mu)
    reports["weighted_estimate"] = {"ratio": wr.ratio, "grad_phi_l3": wr.grad_phi_l3,
                                    "div_b_weighted": wr.div_b_weighted, "mu": wr.mu}
    reports["lift"] = {"eps": system.params.eps, "rho": system.params.rho,
                       "clamped": system.params.clamped, "degenerate": system.params.degenerate,
                       **lift0.checks}
    reports["run"] = {"dt": dt, "steps": steps, "modes": system.basis.N,
                      "stability_bound": system.stability_bound(), "t_end": state.t}
    result = RunResult(cfg, system, ledger, state, dt, steps, reports)
    if out is not None:
        cfg.save(out / "config.txt")
        ledger.to_csv(out / "ledger.csv")
        write_report(out / "report.json", reports)
        write_checkpoint(out / "final.ckpt", cfg.spec, state.t, state.C)
    return result


def _snapshot(cfg, system, state, out, n):
    if out is None or not cfg.snapshot_every:
        return
    lift = system.lift(state.t)
    write_vtk(out / f"v_{n:06d}.vtk", state.w + lift.delta, "v")
    write_vtk(out / f"w_{n:06d}.vtk", state.w, "w")
