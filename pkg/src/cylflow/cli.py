"""Command-line front end.

Subcommands ``simulate``, ``lift``, ``certify``, ``norms`` and ``sweep`` share
the flags ``--config``, ``--out``, ``--seed`` and ``--resolution``.  Exit
codes: 0 success, 2 configuration, 3 validation, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .certify import EnergyLedger, absorption_check, flux_norms, write_report
from .config import RunConfig, load_config
from .domain import build_grid
from .errors import CylflowError
from .hopf import build_lift, check_compatibility, trace_errors
from .io import write_vtk
from .norms import embedding_ok
from .poisson import verify_weighted_estimate
from .runner import certify_ledger, run_simulation
from .scenarios import hopf_params, make_flux, sample_times

log = logging.getLogger("cylflow")

EXIT_OK = 0


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.resolution:
        cfg = cfg.with_resolution(args.resolution)
    return cfg.validate()


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = _config(args)
    res = run_simulation(cfg, _out(args))
    r = res.reports
    print(f"steps={res.steps} dt={res.dt:.6g} modes={res.system.basis.N}")
    print(f"integrated estimate: {'pass' if r['integrated_estimate']['passed'] else 'FAIL'}"
          f" (min margin {r['integrated_estimate']['min_margin']:.4g})")
    print(f"absorption margin: {r['absorption']['margin']:.4g}"
          f"{' (flagged)' if r['absorption']['flagged'] else ''}")
    if "global_criterion" in r:
        print(f"interval criterion: {r['global_criterion']['criterion']}")
    return EXIT_OK


def cmd_lift(args) -> int:
    cfg = _config(args)
    out = _out(args)
    grid = build_grid(cfg.spec)
    flux = make_flux(cfg)
    comp = check_compatibility(flux, grid, sample_times(cfg, flux), tol=cfg.lift_tol)
    report = {"compatibility": {"times": comp.times, "residuals": comp.residuals, "ok": comp.ok}}
    if not comp.ok:
        write_report(out / "lift.json", report)
        print(f"incompatible flux: max residual {comp.max_residual:.3e}", file=sys.stderr)
        return 3
    params = hopf_params(cfg, flux, grid)
    lift = build_lift(flux, params, grid, 0.0, tol=cfg.lift_tol)
    wr = verify_weighted_estimate(lift.b, lift.phi, cfg.mu)
    ab = absorption_check(lift, params, cfg.nu, cfg.norm_params)
    report.update({
        "params": {"eps": params.eps, "rho": params.rho, "r": params.r,
                   "clamped": params.clamped, "degenerate": params.degenerate},
        "trace_errors": trace_errors(lift.delta, lift.d1, lift.d2),
        "div_l2": lift.checks["div_l2"],
        "poisson": {"iterations": lift.report.iterations, "residual": lift.report.residual},
        "weighted_ratio": wr.ratio,
        "absorption": {"coefficient": ab.coefficient, "margin": ab.margin, "flagged": ab.flagged},
    })
    write_report(out / "lift.json", report)
    write_vtk(out / "b.vtk", lift.b, "b")
    write_vtk(out / "phi.vtk", lift.phi, "phi")
    write_vtk(out / "delta.vtk", lift.delta, "delta")
    print(f"eps={params.eps:.4g} rho={params.rho:.4g} trace errors {report['trace_errors']}")
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = _config(args)
    out = _out(args)
    path = Path(args.ledger) if args.ledger else out / "ledger.csv"
    ledger = EnergyLedger.from_csv(path)
    report = certify_ledger(cfg, ledger)
    write_report(out / "certify.json", report)
    g = report.get("global_criterion")
    if g is not None:
        print(f"interval criterion: {g['criterion']}; failing intervals {g['failing_intervals']}")
    print(f"integrated estimate: {'pass' if report['integrated_estimate']['passed'] else 'FAIL'}")
    return EXIT_OK


def cmd_norms(args) -> int:
    cfg = _config(args)
    out = _out(args)
    grid = build_grid(cfg.spec)
    flux = make_flux(cfg)
    params = hopf_params(cfg, flux, grid)
    lift = build_lift(flux, params, grid, 0.0, tol=cfg.lift_tol)
    report = {"embedding_ok": embedding_ok(cfg.s, cfg.p), "s": cfg.s, "p": cfg.p,
              "norms": flux_norms(lift, cfg.norm_params)}
    write_report(out / "norms.json", report)
    for k, v in report["norms"].items():
        print(f"{k:16s} {v:.6g}")
    return EXIT_OK


SWEEP_COLUMNS = ("nu", "amplitude", "resolution", "status", "absorption_margin",
                 "poisson_ratio", "korn_min", "min_phi_C", "decay_slope")


def cmd_sweep(args) -> int:
    cfg = _config(args)
    out = _out(args)
    nus, amps, res = cfg.sweep_axes()
    rows = []
    for nu in nus:
        for amp in amps:
            for r in res:
                cell = cfg.replace(nu=nu, flux_amplitude=amp).with_resolution(r)
                row = {"nu": nu, "amplitude": amp, "resolution": r}
                try:
                    rep = run_simulation(cell).reports
                except CylflowError as exc:
                    row.update(status=f"error: {type(exc).__name__}: {exc}")
                else:
                    row.update(
                        status="ok",
                        absorption_margin=rep["absorption"]["margin"],
                        poisson_ratio=rep["weighted_estimate"]["ratio"],
                        korn_min=rep["korn_min"],
                        min_phi_C=rep["integrated_estimate"]["min_phi_constant"],
                        decay_slope=rep["decay"]["late_log_slope"],
                    )
                rows.append(row)
    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow(["" if row.get(c) is None else
                        (repr(row[c]) if isinstance(row[c], float) else row[c]) for c in SWEEP_COLUMNS])
    print(f"{len(rows)} sweep cells written to {out / 'sweep.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cylflow", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "simulate": (cmd_simulate, "run the Galerkin solver and certify the run"),
        "lift": (cmd_lift, "build and check the boundary-data lift only"),
        "certify": (cmd_certify, "certify an existing ledger"),
        "norms": (cmd_norms, "report the data norms of the configured flux"),
        "sweep": (cmd_sweep, "run a grid of (nu, amplitude, resolution) cells"),
    }
    for name, (fn, help_) in handlers.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, help="seed for random initial data")
        p.add_argument("--resolution", help="N (meaning NxNx2N) or NXxNYxNZ")
        if name == "certify":
            p.add_argument("--ledger", help="ledger CSV (default: OUT/ledger.csv)")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CylflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
