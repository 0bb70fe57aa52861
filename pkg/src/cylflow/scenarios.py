"""Built-in flux, forcing and initial-data scenarios."""
from __future__ import annotations

import math

import numpy as np

from .config import RunConfig
from .domain import StaggeredGrid, VectorField
from .hopf import BoundaryFlux, HopfParams, SeparableFlux, extend_flux, select_params
from .io import load_flux_tables
from .norms import sobolev_norm


def make_flux(cfg: RunConfig) -> BoundaryFlux:
    amp = cfg.flux_amplitude
    if cfg.flux == "zero" or amp == 0.0:
        return BoundaryFlux.zero()
    if cfg.flux == "constant":
        return BoundaryFlux(lambda x, y, t: amp + 0.0 * x, lambda x, y, t: amp + 0.0 * x,
                            steady=True, name="constant")
    if cfg.flux == "parabolic":
        Lx, Ly = cfg.Lx, cfg.Ly

        def prof(x, y, t):
            return amp * 36.0 * (x / Lx) * (1 - x / Lx) * (y / Ly) * (1 - y / Ly)
        return BoundaryFlux(prof, prof, steady=True, name="parabolic")
    if cfg.flux == "sinusoidal":
        om = cfg.flux_omega
        return SeparableFlux(lambda x, y: amp + 0.0 * x, lambda x, y: amp + 0.0 * x,
                             lambda t: 1.0 + 0.5 * math.sin(om * t),
                             lambda t: 0.5 * om * math.cos(om * t), name="sinusoidal")
    if cfg.flux == "table":
        times = [float(x) for x in cfg.flux_times.split(",") if x.strip()]
        return load_flux_tables(times, cfg.flux_inflow, cfg.flux_outflow)
    raise ValueError(cfg.flux)


def forcing_shape(grid: StaggeredGrid) -> VectorField:
    a, Lx = grid.a, grid.spec.Lx

    def f(X, Y, Z):
        return (np.sin(math.pi * (Z + a) / (2 * a)), 0.5 * np.cos(math.pi * X / Lx), 0.0 * X)
    return VectorField.from_function(grid, f)


def make_forcing(cfg: RunConfig, grid: StaggeredGrid):
    """Callable ``t -> VectorField`` or ``None`` for no body force."""
    if cfg.forcing == "zero" or cfg.forcing_amplitude == 0.0:
        return None
    base = forcing_shape(grid) * cfg.forcing_amplitude
    zero = VectorField.zeros(grid)
    if cfg.forcing == "steady":
        return lambda t: base
    if cfg.forcing == "periodic":
        om = cfg.forcing_omega
        return lambda t: base * math.cos(om * t)
    if cfg.forcing == "pulse":
        lo = cfg.forcing_interval * cfg.interval
        hi = lo + cfg.interval
        return lambda t: base if lo <= t < hi else zero
    raise ValueError(cfg.forcing)


def initial_coefficients(cfg: RunConfig, basis) -> np.ndarray:
    """Seeded random smooth field (energy ``initial_amplitude^2``) or zero."""
    if cfg.initial == "zero" or cfg.initial_amplitude == 0.0:
        return np.zeros(basis.N)
    rng = np.random.default_rng(cfg.seed)
    C = rng.standard_normal(basis.N) / (1.0 + basis.strain_levels / basis.strain_levels[0])
    return C * (cfg.initial_amplitude / np.linalg.norm(C))


def flux_wsp_norm(flux: BoundaryFlux, grid: StaggeredGrid, t: float, s: float, p: float) -> float:
    d1, d2 = flux.profiles(grid, t)
    parts = [sobolev_norm(f, s, p) for f in extend_flux(d1, d2, grid)]
    return float(sum(x**p for x in parts)) ** (1.0 / p)


def sample_times(cfg: RunConfig, flux: BoundaryFlux) -> list:
    if flux.steady:
        return [0.0]
    return list(np.linspace(0.0, cfg.t_end, 65))


def hopf_params(cfg: RunConfig, flux: BoundaryFlux, grid: StaggeredGrid) -> HopfParams:
    """Cutoff parameters from the configured rule."""
    if cfg.hopf_rule == "fixed":
        return HopfParams(eps=cfg.hopf_eps, rho=cfg.hopf_rho)
    N = max(flux_wsp_norm(flux, grid, t, cfg.s, cfg.p) for t in sample_times(cfg, flux))
    return select_params(cfg.nu, N, a=cfg.a, s=cfg.s, p=cfg.p)


# -- suite ---------------------------------------------------------------------------

SUITE = {
    "zero": dict(),
    "forcing": dict(forcing="steady", forcing_amplitude=1.0, initial="random"),
    "steady-flux": dict(flux="constant", flux_amplitude=1.0),
    "parabolic": dict(flux="parabolic", flux_amplitude=1.0, initial="random"),
    "sinusoidal": dict(flux="sinusoidal", flux_amplitude=1.0),
    "flux-forcing": dict(flux="parabolic", flux_amplitude=0.5, forcing="periodic",
                         forcing_amplitude=1.0, initial="random"),
}


def scenario(name: str, base: RunConfig | None = None, **overrides) -> RunConfig:
    if name not in SUITE:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SUITE)}")
    cfg = (base or RunConfig()).replace(**SUITE[name])
    return cfg.replace(**overrides)
