"""Run configuration: a flat ``key = value`` text file.

Blank lines and ``#`` comments are ignored; unknown keys are rejected.
Every key has a default, so an empty file is a valid zero-data run.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .certify import DEFAULT_PHI_C, DEFAULT_PHI_Q, NormParams, PhiCalibration
from .domain import CylinderSpec
from .errors import ConfigurationError, ParameterError
from .norms import embedding_ok

FLUX_KINDS = ("zero", "constant", "parabolic", "sinusoidal", "table")
FORCING_KINDS = ("zero", "steady", "periodic", "pulse")
INITIAL_KINDS = ("zero", "random")
HOPF_RULES = ("adaptive", "fixed")


@dataclass
class RunConfig:
    # geometry and material
    a: float = 1.0
    Lx: float = 1.0
    Ly: float = 1.0
    nx: int = 6
    ny: int = 6
    nz: int = 12
    nu: float = 1.0
    gamma: float = 1.0
    # boundary flux
    flux: str = "zero"
    flux_amplitude: float = 1.0
    flux_omega: float = 2.0 * math.pi
    flux_times: str = ""            # comma-separated sample times for flux = table
    flux_inflow: str = ""           # CSV pattern with {k}, for flux = table
    flux_outflow: str = ""
    # body force
    forcing: str = "zero"
    forcing_amplitude: float = 1.0
    forcing_omega: float = 2.0 * math.pi
    forcing_interval: int = 0       # interval index switched on for forcing = pulse
    # initial homogenised velocity
    initial: str = "zero"
    initial_amplitude: float = 0.5
    # time stepping
    t_end: float = 1.0
    dt: float = 0.0                 # 0 selects dt_safety * stability bound
    dt_safety: float = 0.5
    interval: float = 1.0           # length T of the certification intervals
    bound_A: float = 0.0            # 0 derives A from the data
    modes: int = 0                  # 0 uses the full discrete space
    transport: bool = True
    record_every: int = 1
    snapshot_every: int = 0
    # norms and lift
    s: float = 2.0
    p: float = 3.0
    mu: float = 0.75
    hopf_rule: str = "adaptive"
    hopf_eps: float = 0.5
    hopf_rho: float = 0.5
    lift_tol: float = 1e-10
    # estimate calibration
    phi_C: float = DEFAULT_PHI_C
    phi_q: float = DEFAULT_PHI_Q
    seed: int = 0
    # sweep axes (comma-separated; empty keeps the single configured value)
    sweep_nu: str = ""
    sweep_amplitude: str = ""
    sweep_resolution: str = ""

    # -- derived views -----------------------------------------------------------
    @property
    def spec(self) -> CylinderSpec:
        return CylinderSpec(a=self.a, Lx=self.Lx, Ly=self.Ly, nx=self.nx, ny=self.ny, nz=self.nz,
                            nu=self.nu, gamma=self.gamma)

    @property
    def norm_params(self) -> NormParams:
        return NormParams(self.s, self.p, self.mu)

    @property
    def calibration(self) -> PhiCalibration:
        return PhiCalibration(self.phi_C, self.phi_q)

    @property
    def intervals(self) -> int:
        return int(math.floor(self.t_end / self.interval + 1e-9))

    def sweep_axes(self):
        def floats(text, default):
            return [float(x) for x in text.split(",") if x.strip()] or [default]
        try:
            nus = floats(self.sweep_nu, self.nu)
            amps = floats(self.sweep_amplitude, self.flux_amplitude)
        except ValueError:
            raise ConfigurationError("sweep axes must be comma-separated numbers") from None
        res = [x.strip() for x in self.sweep_resolution.split(",") if x.strip()] \
            or [f"{self.nx}x{self.ny}x{self.nz}"]
        return nus, amps, res

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def with_resolution(self, text: str) -> "RunConfig":
        """``"8"`` scales ``nx = ny = 8, nz = 16``; ``"8x8x16"`` sets all three."""
        parts = text.lower().split("x")
        try:
            nums = [int(x) for x in parts]
        except ValueError:
            raise ConfigurationError(f"bad resolution {text!r}") from None
        if len(nums) == 1:
            return self.replace(nx=nums[0], ny=nums[0], nz=2 * nums[0])
        if len(nums) == 3:
            return self.replace(nx=nums[0], ny=nums[1], nz=nums[2])
        raise ConfigurationError(f"bad resolution {text!r}")

    def validate(self) -> "RunConfig":
        self.spec  # geometry checks
        for key, allowed in (("flux", FLUX_KINDS), ("forcing", FORCING_KINDS),
                             ("initial", INITIAL_KINDS), ("hopf_rule", HOPF_RULES)):
            if getattr(self, key) not in allowed:
                raise ConfigurationError(f"{key} must be one of {allowed}, got {getattr(self, key)!r}")
        try:
            ok = embedding_ok(self.s, self.p)
        except ParameterError as exc:
            raise ConfigurationError(str(exc)) from None
        if not ok:
            raise ConfigurationError(
                f"(s, p) = ({self.s:g}, {self.p:g}) violates 3/p + 1/3 <= s (strict when p = 3)")
        if not (2.0 / 3.0 < self.mu <= 1.0):
            raise ConfigurationError("mu must lie in (2/3, 1]")
        for key in ("t_end", "interval", "dt_safety", "lift_tol", "phi_q"):
            if not getattr(self, key) > 0:
                raise ConfigurationError(f"{key} must be positive")
        for key in ("dt", "bound_A", "phi_C"):
            if getattr(self, key) < 0:
                raise ConfigurationError(f"{key} must be non-negative")
        if self.record_every < 1 or self.modes < 0 or self.snapshot_every < 0:
            raise ConfigurationError("record_every >= 1, modes >= 0, snapshot_every >= 0")
        if self.flux == "table" and not (self.flux_times and self.flux_inflow and self.flux_outflow):
            raise ConfigurationError("flux = table needs flux_times, flux_inflow and flux_outflow")
        return self

    # -- text format -------------------------------------------------------------
    def to_text(self) -> str:
        return "".join(f"{f.name} = {_format(getattr(self, f.name))}\n" for f in fields(self))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


def _format(v):
    return repr(v) if isinstance(v, float) else str(v)


def _convert(name: str, kind, text: str):
    try:
        if kind in (bool, "bool"):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind in (int, "int"):
            return int(text)
        if kind in (float, "float"):
            return float(text)
        return text
    except ValueError:
        raise ConfigurationError(f"{name}: cannot parse {text!r} as {kind}") from None


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    known = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, known[key], val)
    cfg = (base or RunConfig()).replace(**values)
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
