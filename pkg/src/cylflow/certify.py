"""Energy bookkeeping and certification of the a-priori estimates.

A run produces an :class:`EnergyLedger`: one row per recorded time with the
energy of ``w``, its dissipation, the data norms that drive the estimate and
the absorption coefficient of the lift.  The analysis functions are pure
reads of a ledger:

* :func:`verify_integrated_estimate` checks
  ``||w(t)||^2 + nu int ||w||_{H1}^2 + gamma int sum ||w.tau||^2_{S1}
  <= 2 int ||f||_{6/5}^2 + phi(sup ||d~||_{W^s_p}) int (||d~||^2_{W^1_2} + ||d~_t||^2_{W^1_{6/5}}) + ||w(0)||^2``
  with ``phi(x) = C (1 + x)^q``;
* :func:`decay_check` checks ``||w(t)||^2 <= ||w(0)||^2 exp(-nu t)`` for free decay;
* :func:`check_global_criterion` checks the per-interval smallness condition
  ``data_k <= (1 - exp(-nu T)) A^2`` and the resulting bound on ``||v(kT)||``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .domain import VectorField, cell_derivative
from .errors import DataError, DomainError, ParseError
from .hopf import HopfParams, LiftFields, SeparableFlux, extend_flux
from .norms import (
    boundary_sobolev_norm,
    gagliardo_norm,
    h1_seminorm_sq,
    lp_norm,
    slice_sup_norm,
    sobolev_norm,
)

# Frozen calibration of phi(x) = C (1 + x)^q; see calibrate_phi and the
# calibration demo for how the constant was obtained.
DEFAULT_PHI_C = 0.075
DEFAULT_PHI_Q = 2.0
DEFAULT_NORM_S = 2.0
DEFAULT_NORM_P = 3.0
DEFAULT_NORM_MU = 0.75

COLUMNS = (
    "t", "w_l2_sq", "w_grad_sq", "w_h1_sq", "strain_sq", "korn_ratio", "slip_sq",
    "transport_power", "v_l2",
    "f_l65_sq", "d_l2_sq", "d_w12_sq", "d_w1_32_sq", "grad_d_l65_sq", "grad_d_l2_sq",
    "dt_w1_65_sq", "d_wsp", "d_w13", "d_h1",
    "d_s2_l3_sup", "d_x3_s2_l3_sup", "d_s2_l2_sup", "d_s2_l32_sup", "dt_s2_l65_sup",
    "bd_sp", "bd_s3", "bd_half_sq", "bdt_sixth_sq",
    "exp1_log10", "exp2_log10", "exp3_log10", "exp4_log10",
    "absorption", "absorption_margin",
)
SQUARED = {c for c in COLUMNS if c.endswith("_sq")}


# -- calibration -------------------------------------------------------------------

@dataclass(frozen=True)
class PhiCalibration:
    C: float = DEFAULT_PHI_C
    q: float = DEFAULT_PHI_Q

    def __call__(self, x) -> float:
        return self.C * (1.0 + x) ** self.q


@dataclass(frozen=True)
class NormParams:
    s: float = DEFAULT_NORM_S
    p: float = DEFAULT_NORM_P
    mu: float = DEFAULT_NORM_MU


# -- ledger ------------------------------------------------------------------------

@dataclass
class EnergyLedger:
    """Append-only table of per-sample energy terms plus run metadata."""

    meta: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    def append(self, row: dict) -> None:
        missing = [c for c in COLUMNS if c not in row]
        if missing:
            raise DataError(f"ledger row lacks {missing}", missing[0])
        for c in COLUMNS:
            x = row[c]
            if not math.isfinite(x):
                raise DataError(f"non-finite ledger entry {c}={x}", c)
            if c in SQUARED and x < 0:
                raise DataError(f"negative squared entry {c}={x}", c)
        if self.rows and row["t"] <= self.rows[-1]["t"]:
            raise DataError("ledger times must increase strictly", "t")
        self.rows.append({c: float(row[c]) for c in COLUMNS})

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(name)
        return np.array([r[name] for r in self.rows])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def index_at(self, t: float, tol: float | None = None) -> int:
        ts = self.times
        k = int(np.argmin(np.abs(ts - t)))
        if tol is None:
            tol = 0.5 * float(np.min(np.diff(ts))) if len(ts) > 1 else 0.0
        if abs(ts[k] - t) > tol + 1e-12:
            raise DomainError(f"no ledger sample at t={t}")
        return k

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            for k in sorted(self.meta):
                fh.write(f"# {k}={_fmt_meta(self.meta[k])}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for r in self.rows:
                w.writerow([repr(r[c]) for c in COLUMNS])

    @classmethod
    def from_csv(cls, path) -> "EnergyLedger":
        path = Path(path)
        led = cls()
        with path.open(encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        body = []
        for line in lines:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                led.meta[key] = _parse_meta(val)
            elif line.strip():
                body.append(line)
        if not body:
            raise ParseError(f"{path}: no header row")
        reader = csv.reader(body)
        header = next(reader)
        if tuple(header) != COLUMNS:
            bad = next((i for i, (a, b) in enumerate(zip(header, COLUMNS)) if a != b), len(header))
            raise ParseError(f"{path}: unexpected header at column {bad + 1}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(COLUMNS):
                raise ParseError(f"{path}: row {lineno} has {len(rec)} fields, expected {len(COLUMNS)}")
            row = {}
            for c, txt in zip(COLUMNS, rec):
                try:
                    row[c] = float(txt)
                except ValueError:
                    raise ParseError(f"{path}: row {lineno}, column {c!r}: not a number ({txt!r})") from None
            try:
                led.append(row)
            except DataError as exc:
                raise ParseError(f"{path}: row {lineno}, column {exc.term!r}: {exc}") from None
        return led


def _fmt_meta(v):
    return repr(v) if isinstance(v, float) else str(v)


def _parse_meta(txt):
    for conv in (int, float):
        try:
            return conv(txt)
        except ValueError:
            pass
    if txt in ("True", "False"):
        return txt == "True"
    return txt


# -- data norms --------------------------------------------------------------------

def _pool(vals, p):
    return float(sum(v**p for v in vals)) ** (1.0 / p)


def _log10_1p(log_term: float) -> float:
    """``log10(1 + exp(log_term))`` without overflow."""
    return float(np.logaddexp(0.0, log_term) / math.log(10.0))


def _log(x):
    return math.log(x) if x > 0 else -math.inf


def profile_norms(d1, d2, grid, norms: NormParams) -> dict:
    """Norms of the extended profiles ``d~`` (the pair is pooled)."""
    s, p = norms.s, norms.p
    dd = extend_flux(d1, d2, grid)
    grads = [cell_derivative(f, k) for f in dd for k in range(3)]
    order = s - 1.0 / p
    faces = (("S2-", d1), ("S2+", d2))
    return {
        "d_l2_sq": sum(lp_norm(f, 2) ** 2 for f in dd),
        "d_w12_sq": sum(sobolev_norm(f, 1, 2) ** 2 for f in dd),
        "d_w1_32_sq": _pool([sobolev_norm(f, 1, 1.5) for f in dd], 1.5) ** 2,
        "grad_d_l65_sq": _pool([lp_norm(q, 1.2) for q in grads], 1.2) ** 2,
        "grad_d_l2_sq": sum(lp_norm(q, 2) ** 2 for q in grads),
        "d_wsp": _pool([sobolev_norm(f, s, p) for f in dd], p),
        "d_w13": _pool([sobolev_norm(f, 1, 3) for f in dd], 3),
        "d_h1": math.sqrt(sum(sobolev_norm(f, 1, 2) ** 2 for f in dd)),
        "d_s2_l3_sup": _pool([slice_sup_norm(f, 3) for f in dd], 3),
        "d_x3_s2_l3_sup": _pool([slice_sup_norm(cell_derivative(f, 2), 3) for f in dd], 3),
        "d_s2_l2_sup": _pool([slice_sup_norm(f, 2) for f in dd], 2),
        "d_s2_l32_sup": _pool([slice_sup_norm(f, 1.5) for f in dd], 1.5),
        "bd_sp": _pool([boundary_sobolev_norm(d, grid, n, order, p) for n, d in faces], p),
        "bd_s3": _pool([boundary_sobolev_norm(d, grid, n, order, 3.0) for n, d in faces], 3.0),
        "bd_half_sq": sum(gagliardo_norm(d, grid.patches[n], 0.5, 2.0) ** 2 for n, d in faces),
    }


def rate_norms(d1_t, d2_t, grid) -> dict:
    """Norms of the time derivatives ``d~_t``."""
    dt = extend_flux(d1_t, d2_t, grid)
    faces = (("S2-", d1_t), ("S2+", d2_t))
    return {
        "dt_w1_65_sq": _pool([sobolev_norm(f, 1, 1.2) for f in dt], 1.2) ** 2,
        "dt_s2_l65_sup": _pool([slice_sup_norm(f, 1.2) for f in dt], 1.2),
        "bdt_sixth_sq": _pool([gagliardo_norm(r, grid.patches[n], 1.0 / 6.0, 1.2)
                               for n, r in faces], 1.2) ** 2,
    }


def scale_norms(base: dict, c: float) -> dict:
    """Norms of ``c * data`` from those of ``data`` (squared entries scale with ``c^2``)."""
    c = abs(c)
    return {k: v * (c * c if k.endswith("_sq") else c) for k, v in base.items()}


def flux_norms(lift: LiftFields, norms: NormParams) -> dict:
    """Every norm of the extended data entering the estimates."""
    out = profile_norms(lift.d1, lift.d2, lift.grid, norms)
    out.update(rate_norms(lift.d1_t, lift.d2_t, lift.grid))
    return out


@dataclass
class AbsorptionReport:
    terms: tuple
    eps12: float
    coefficient: float
    limit: float
    margin: float
    clamped: bool
    degenerate: bool

    @property
    def ok(self) -> bool:
        return self.margin >= 0 and not self.clamped

    @property
    def flagged(self) -> bool:
        return not self.ok


def absorption_terms(params: HopfParams, dn: dict, nu: float, mu: float) -> AbsorptionReport:
    """Coefficient of ``||w||_{H1}^2`` produced by the lift, against the budget ``nu/2``."""
    eps, rho = params.eps, params.rho
    r6 = rho ** (1.0 / 6.0)
    if params.degenerate:
        terms = (0.0, 0.0, 0.0, 0.0)
    else:
        terms = (
            eps * rho ** (mu - 2.0 / 3.0) * dn["d_s2_l3_sup"],
            rho ** (mu + 1.0 / 3.0) * dn["d_x3_s2_l3_sup"],
            (r6 + eps) * dn["d_w13"],
            r6 * dn["d_h1"],
        )
    eps12 = nu / 6.0
    coef = float(sum(terms)) + eps12
    return AbsorptionReport(tuple(float(x) for x in terms), eps12, coef, nu / 2.0,
                            nu / 2.0 - coef, params.clamped, params.degenerate)


def absorption_check(lift: LiftFields, params: HopfParams, nu: float,
                     norms: NormParams = NormParams()) -> AbsorptionReport:
    return absorption_terms(params, flux_norms(lift, norms), nu, norms.mu)


def exponential_terms_log(params: HopfParams, dn: dict) -> tuple:
    """Natural logs of the four exponential remainder terms of the pointwise estimate."""
    if params.degenerate:
        return (-math.inf,) * 4
    le, lr, ie = math.log(params.eps), math.log(params.rho), 1.0 / params.eps
    return (
        2 * le - lr + ie + 2 * _log(dn["d_s2_l2_sup"]),
        4 * le - 2 * lr + 2 * ie + 4 * _log(dn["d_s2_l2_sup"]),
        2 * le - 2 * lr / 3 + 2 * ie / 3 + 2 * _log(dn["d_s2_l32_sup"]),
        2 * le - lr / 3 + ie / 3 + 2 * _log(dn["dt_s2_l65_sup"]),
    )


# -- recording ---------------------------------------------------------------------

class LedgerRecorder:
    """Builds ledger rows from Galerkin states; data norms are cached per lift."""

    def __init__(self, system, norms: NormParams = NormParams(), meta: dict | None = None):
        self.system = system
        self.norms = norms
        self.ledger = EnergyLedger(meta=dict(meta or {}))
        self._cache_key = None
        self._cache = None
        self._base = None
        g = system.grid
        self._S = g.strain_matrix
        self._V = g.cell_volume

    def _norms(self, lift: LiftFields) -> dict:
        flux = self.system.flux
        if isinstance(flux, SeparableFlux):
            if self._base is None:
                g1, g2 = flux.base_lift(lift.params, lift.grid, self.system.lift_tol)[:2]
                self._base = (profile_norms(g1, g2, lift.grid, self.norms), rate_norms(g1, g2, lift.grid))
            dn = scale_norms(self._base[0], flux.factor(lift.t))
            dn.update(scale_norms(self._base[1], flux.factor_t(lift.t)))
            return dn
        return flux_norms(lift, self.norms)

    def data_terms(self, lift: LiftFields) -> dict:
        key = float(lift.t)
        if key != self._cache_key:
            dn = self._norms(lift)
            ab = absorption_terms(lift.params, dn, self.system.nu, self.norms.mu)
            logs = exponential_terms_log(lift.params, dn)
            dn.update({f"exp{k + 1}_log10": _log10_1p(x) for k, x in enumerate(logs)})
            dn["absorption"] = ab.coefficient
            dn["absorption_margin"] = ab.margin
            self._cache_key, self._cache = key, (dn, ab)
        return self._cache[0]

    def row(self, state) -> dict:
        sys = self.system
        g = sys.grid
        lift = sys.lift(state.t)
        w = state.w
        wl2 = state.energy
        gsq = h1_seminorm_sq(w)
        ssq = float(self._V * np.sum((self._S @ w.values) ** 2))
        slip = float(sum(w.values @ (T.T @ (g.patches["S1"].areas * (T @ w.values)))
                         for T in sys.forms.tangent))
        h1 = wl2 + gsq
        if sys.transport_on:
            tp = 2.0 * float(state.C @ (sys.QT @ sys.forms.transport(w.values, w.values)))
        else:
            tp = 0.0
        v = w + lift.delta
        f = VectorField(g, sys.force(state.t))
        row = {
            "t": state.t, "w_l2_sq": wl2, "w_grad_sq": gsq, "w_h1_sq": h1,
            "strain_sq": ssq, "korn_ratio": ssq / h1 if h1 > 0 else 0.0,
            "slip_sq": slip, "transport_power": tp, "v_l2": lp_norm(v, 2),
            "f_l65_sq": lp_norm(f, 1.2) ** 2,
        }
        row.update(self.data_terms(lift))
        return row

    def append(self, state) -> dict:
        r = self.row(state)
        self.ledger.append(r)
        return r


def ledger_append(recorder: LedgerRecorder, state) -> dict:
    return recorder.append(state)


# -- integrated estimate -----------------------------------------------------------

def _cumint(y, t):
    if len(t) < 2:
        return np.zeros_like(y)
    return cumulative_trapezoid(y, t, initial=0.0)


def _require(ledger: EnergyLedger, *keys):
    if len(ledger) == 0:
        raise DomainError("empty ledger")
    for k in keys:
        if k not in ledger.meta:
            raise DomainError(f"ledger metadata lacks {k!r}")


def estimate_sides(ledger: EnergyLedger, calibration: PhiCalibration) -> dict:
    """Time series of both sides of the integrated estimate."""
    _require(ledger, "nu", "gamma")
    nu, gamma = float(ledger.meta["nu"]), float(ledger.meta["gamma"])
    t = ledger.times
    w2 = ledger.column("w_l2_sq")
    lhs = w2 + nu * _cumint(ledger.column("w_h1_sq"), t) + gamma * _cumint(ledger.column("slip_sq"), t)
    f_int = 2.0 * _cumint(ledger.column("f_l65_sq"), t)
    flux_int = _cumint(ledger.column("d_w12_sq") + ledger.column("dt_w1_65_sq"), t)
    x = np.maximum.accumulate(ledger.column("d_wsp"))
    base = f_int + w2[0]
    rhs = base + calibration(x) * flux_int
    # squared composite energy-class norm, kept for audit
    grad_int = _cumint(ledger.column("w_grad_sq"), t)
    composite = (np.sqrt(np.maximum.accumulate(w2)) + np.sqrt(grad_int)) ** 2
    return {"t": t, "lhs": lhs, "rhs": rhs, "base": base, "flux_int": flux_int,
            "growth": (1.0 + x) ** calibration.q, "composite_lhs": composite}


def minimal_phi_constant(sides: dict, rtol: float = 1e-9) -> float:
    """Smallest ``C`` for which ``lhs <= rhs`` at every sample (``inf`` if none works)."""
    excess = sides["lhs"] - sides["base"]
    slack = rtol * np.maximum(1.0, sides["base"])
    need = 0.0
    for e, fl, gr, sl in zip(excess, sides["flux_int"], sides["growth"], slack):
        if e <= sl:
            continue
        if fl <= 0:
            return math.inf
        need = max(need, e / (gr * fl))
    return float(need)


def verify_integrated_estimate(ledger: EnergyLedger, calibration: PhiCalibration = PhiCalibration(),
                               rtol: float = 1e-9) -> dict:
    sides = estimate_sides(ledger, calibration)
    margin = sides["rhs"] - sides["lhs"]
    tol = rtol * np.maximum(1.0, sides["rhs"])
    bad = np.flatnonzero(margin < -tol)
    return {
        "passed": bool(bad.size == 0),
        "first_failure_t": float(sides["t"][bad[0]]) if bad.size else None,
        "min_margin": float(np.min(margin)),
        "final_lhs": float(sides["lhs"][-1]),
        "final_rhs": float(sides["rhs"][-1]),
        "final_composite_lhs": float(sides["composite_lhs"][-1]),
        "min_phi_constant": minimal_phi_constant(sides, rtol),
        "calibration": asdict(calibration),
    }


verify_lemma22 = verify_integrated_estimate


def calibrate_phi(ledgers, q: float = DEFAULT_PHI_Q, safety: float = 2.0) -> dict:
    """``C = safety * max`` of the per-run minimal constants over a suite of ledgers."""
    cal = PhiCalibration(C=1.0, q=q)
    per_run = [minimal_phi_constant(estimate_sides(led, cal)) for led in ledgers]
    worst = max(per_run) if per_run else 0.0
    return {"C": safety * worst, "q": q, "per_run": per_run, "safety": safety}


# -- free decay --------------------------------------------------------------------

def decay_check(ledger: EnergyLedger, nu: float | None = None, dt: float | None = None) -> dict:
    """``||w(t)||^2 <= ||w(0)||^2 exp(-nu t) (1 + 5 dt)`` at every sample."""
    if len(ledger) == 0:
        raise DomainError("empty ledger")
    nu = float(ledger.meta["nu"]) if nu is None else nu
    dt = float(ledger.meta["dt"]) if dt is None else dt
    t = ledger.times - ledger.times[0]
    w2 = ledger.column("w_l2_sq")
    bound = w2[0] * np.exp(-nu * t) * (1.0 + 5.0 * dt)
    bad = np.flatnonzero(w2 > bound + 1e-300)
    slope = None
    pos = w2 > 0
    if np.count_nonzero(pos) >= 4:
        half = np.flatnonzero(pos)[np.count_nonzero(pos) // 2:]
        slope = float(np.polyfit(t[half], np.log(w2[half]), 1)[0])
    return {
        "passed": bool(bad.size == 0),
        "first_failure_t": float(ledger.times[bad[0]]) if bad.size else None,
        "late_log_slope": slope,
        "nu": nu,
        "tol_decay": 5.0 * dt,
    }


# -- interval criterion ------------------------------------------------------------

@dataclass(frozen=True)
class GlobalCriterion:
    A: float
    T: float
    nu: float
    K: int

    def __post_init__(self):
        if not (self.A > 0 and self.T > 0):
            raise DomainError("A and T must be positive")

    @property
    def budget(self) -> float:
        return (1.0 - math.exp(-self.nu * self.T)) * self.A**2


def interval_data(ledger: EnergyLedger, T: float, K: int, calibration: PhiCalibration) -> list:
    """Per-interval ``2 int ||f||^2 + phi(sup ||d~||) int (...)`` over ``[kT, (k+1)T]``."""
    if len(ledger) == 0:
        raise DomainError("empty ledger")
    t = ledger.times
    out = []
    for k in range(K):
        i0 = ledger.index_at(k * T)
        i1 = ledger.index_at((k + 1) * T)
        sl = slice(i0, i1 + 1)
        ts = t[sl]
        f_int = 2.0 * float(np.trapezoid(ledger.column("f_l65_sq")[sl], ts))
        fl = float(np.trapezoid((ledger.column("d_w12_sq") + ledger.column("dt_w1_65_sq"))[sl], ts))
        x = float(np.max(ledger.column("d_wsp")[sl]))
        out.append({"k": k, "forcing": f_int, "flux": fl, "sup_d": x,
                    "data": f_int + calibration(x) * fl})
    return out


def check_global_criterion(criterion: GlobalCriterion, ledger: EnergyLedger,
                           calibration: PhiCalibration = PhiCalibration()):
    """``(ok, report)``; ``ok`` iff every interval meets the smallness condition."""
    try:
        data = interval_data(ledger, criterion.T, criterion.K, calibration)
    except DomainError as exc:
        raise DomainError(f"missing interval data: {exc}") from None
    budget = criterion.budget
    intervals = []
    for d in data:
        d = dict(d)
        d["margin"] = budget - d["data"]
        d["ok"] = d["margin"] >= -1e-12 * max(1.0, budget)
        intervals.append(d)
    failing = [d["k"] for d in intervals if not d["ok"]]
    v_trace = []
    for k in range(criterion.K + 1):
        i = ledger.index_at(k * criterion.T)
        v_trace.append(float(ledger.rows[i]["v_l2"]))
    ok = not failing
    report = {
        "criterion": bool(ok),
        "A": criterion.A, "T": criterion.T, "nu": criterion.nu, "K": criterion.K,
        "budget": budget,
        "failing_intervals": failing,
        "intervals": intervals,
        "v_norm_at_kT": v_trace,
        "v_bound_ok": bool(all(v <= criterion.A for v in v_trace)) if ok else None,
        "calibration": asdict(calibration),
    }
    return ok, report


check_theorem2 = check_global_criterion


def interval_estimate(ledger: EnergyLedger, k: int, T: float, t: float,
                      calibration: PhiCalibration = PhiCalibration()) -> dict:
    """Both sides of the restarted estimate on ``(kT, t]`` for the homogenised field."""
    _require(ledger, "nu", "gamma")
    if not (k * T < t <= (k + 1) * T + 1e-12):
        raise DomainError(f"t={t} outside the interval ({k * T}, {(k + 1) * T}]")
    nu, gamma = float(ledger.meta["nu"]), float(ledger.meta["gamma"])
    i0, i1 = ledger.index_at(k * T), ledger.index_at(t)
    sl = slice(i0, i1 + 1)
    ts = ledger.times[sl]
    w2 = ledger.column("w_l2_sq")
    diss = float(np.trapezoid(nu * ledger.column("w_h1_sq")[sl] + gamma * ledger.column("slip_sq")[sl], ts))
    lhs = float(w2[i1]) + diss
    f_int = 2.0 * float(np.trapezoid(ledger.column("f_l65_sq")[sl], ts))
    fl = float(np.trapezoid((ledger.column("d_w12_sq") + ledger.column("dt_w1_65_sq"))[sl], ts))
    x = float(np.max(ledger.column("d_wsp")[sl]))
    rhs = f_int + float(w2[i0]) + calibration(x) * fl
    return {"k": k, "t": float(ledger.times[i1]), "lhs": lhs, "rhs": rhs, "margin": rhs - lhs,
            "start_energy": float(w2[i0]), "dissipation": diss}


# -- reports -----------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def write_report(path, report: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n", encoding="utf-8")


_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _restore(x):
    if isinstance(x, dict):
        return {k: _restore(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_restore(v) for v in x]
    if isinstance(x, str) and x in _NONFINITE:
        return _NONFINITE[x]
    return x


def read_report(path) -> dict:
    """Inverse of :func:`write_report`; ``"inf"``/``"nan"`` strings become floats again."""
    return _restore(json.loads(Path(path).read_text(encoding="utf-8")))
