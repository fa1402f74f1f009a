"""Scenario configuration: flat dotted-key text files.

Grammar: one `section.key = value` per line; blank lines and lines
starting with `#` are ignored.  Values are ints, floats or bare strings
depending on the key's schema type.  Serialization emits floats with
repr (shortest round-trip decimal), so parse/serialize round-trips
identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disturbance import DisturbanceSpec
from .dynamics import SolverConfig, bump_profile
from .stationary import PipeParams


class ConfigError(ValueError):
    pass


# key -> (type, default, constraint description or None)
SCHEMA: dict[str, tuple[type, object, str | None]] = {
    "pipe.L": (float, 1.0, "pipe.L > 0"),
    "pipe.a": (float, 1.0, "pipe.a > 0"),
    "pipe.theta": (float, 0.0, "pipe.theta >= 0"),
    "feedback.k": (float, 2.0, "feedback.k > 0"),
    "stationary.u0": (float, 0.25, "0 < stationary.u0 < pipe.a"),
    "disturbance.family": (str, "zero", "disturbance.family in {zero, decaying_burst, compact_burst}"),
    "disturbance.A": (float, 0.0, None),
    "disturbance.f": (float, 1.0, None),
    "disturbance.gamma": (float, 1.0, "disturbance.gamma >= 0"),
    "disturbance.nu": (float, 1.0, "disturbance.nu > 0"),
    "disturbance.C_nu": (float, 1.0, "disturbance.C_nu > 0"),
    "disturbance.T_period": (float, 1.0, "disturbance.T_period > 0"),
    "disturbance.seed": (int, 0, None),
    "initial.family": (str, "zero", "initial.family in {zero, bump}"),
    "initial.amplitude": (float, 0.0, None),
    "initial.center": (float, 0.5, None),
    "initial.width": (float, 0.2, "initial.width > 0"),
    "solver.nx": (int, 200, "solver.nx >= 16"),
    "solver.cfl": (float, 0.45, "0 < solver.cfl < 1"),
    "solver.t_end": (float, 10.0, "solver.t_end > disturbance.T_period"),
    "solver.snapshot_dt": (float, 0.1, "solver.snapshot_dt > 0"),
    "certificate.lambda": (float, 0.75, "1/2 < certificate.lambda < 1"),
    "output.csv_path": (str, "run.csv", None),
    "output.report_path": (str, "report.txt", None),
}


def _fail(key: str):
    constraint = SCHEMA[key][2] or key
    raise ConfigError(f"invalid value for `{key}`: constraint `{constraint}` violated")


@dataclass
class ScenarioConfig:
    """Validated flat scenario configuration."""

    values: dict = field(default_factory=dict)

    def __post_init__(self):
        merged = {k: v for k, (_, v, _) in ((k, SCHEMA[k]) for k in SCHEMA)}
        for k, v in self.values.items():
            if k not in SCHEMA:
                raise ConfigError(f"unknown configuration key `{k}`")
            merged[k] = v
        self.values = merged
        self.validate()

    def __getitem__(self, key):
        return self.values[key]

    def validate(self):
        v = self.values
        if not v["pipe.L"] > 0: _fail("pipe.L")
        if not v["pipe.a"] > 0: _fail("pipe.a")
        if not v["pipe.theta"] >= 0: _fail("pipe.theta")
        if not v["feedback.k"] > 0: _fail("feedback.k")
        if not 0 < v["stationary.u0"] < v["pipe.a"]: _fail("stationary.u0")
        if v["disturbance.family"] not in ("zero", "decaying_burst", "compact_burst"):
            _fail("disturbance.family")
        if not v["disturbance.gamma"] >= 0: _fail("disturbance.gamma")
        if not v["disturbance.nu"] > 0: _fail("disturbance.nu")
        if not v["disturbance.C_nu"] > 0: _fail("disturbance.C_nu")
        if not v["disturbance.T_period"] > 0: _fail("disturbance.T_period")
        if v["initial.family"] not in ("zero", "bump"): _fail("initial.family")
        if not v["initial.width"] > 0: _fail("initial.width")
        if not v["solver.nx"] >= 16: _fail("solver.nx")
        if not 0 < v["solver.cfl"] < 1: _fail("solver.cfl")
        if not v["solver.t_end"] > v["disturbance.T_period"]: _fail("solver.t_end")
        if not v["solver.snapshot_dt"] > 0: _fail("solver.snapshot_dt")
        if not 0.5 < v["certificate.lambda"] < 1: _fail("certificate.lambda")
        if v["initial.family"] == "bump":
            c, wd, L = v["initial.center"], v["initial.width"], v["pipe.L"]
            if c - wd <= 0 or c + wd >= L:
                raise ConfigError(
                    "invalid value for `initial.center`/`initial.width`: the bump support "
                    "must lie strictly inside (0, pipe.L) for boundary compatibility")

    # -- parsing / serialization ------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "ScenarioConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in SCHEMA:
                raise ConfigError(f"line {lineno}: unknown configuration key `{key}`")
            typ = SCHEMA[key][0]
            try:
                values[key] = typ(val) if typ is not str else val
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: value {val!r} for `{key}` is not a valid {typ.__name__}")
        return cls(values)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def to_text(self) -> str:
        lines = []
        for key in SCHEMA:
            val = self.values[key]
            lines.append(f"{key} = {val!r}" if isinstance(val, float) else f"{key} = {val}")
        return "\n".join(lines) + "\n"

    def to_file(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    def replace(self, **overrides) -> "ScenarioConfig":
        """New config with dotted keys overridden (keys use `.` as given)."""
        values = dict(self.values)
        values.update(overrides)
        return ScenarioConfig(values)

    # -- builders ----------------------------------------------------------

    def pipe_params(self) -> PipeParams:
        return PipeParams(L=self["pipe.L"], a=self["pipe.a"],
                          theta=self["pipe.theta"], k=self["feedback.k"])

    def solver_config(self) -> SolverConfig:
        return SolverConfig(nx=self["solver.nx"], cfl=self["solver.cfl"],
                            t_end=self["solver.t_end"],
                            snapshot_dt=self["solver.snapshot_dt"])

    def disturbance_spec(self) -> DisturbanceSpec:
        t_off = self["solver.t_end"] - self["disturbance.T_period"]
        return DisturbanceSpec(
            family=self["disturbance.family"],
            amplitude=self["disturbance.A"],
            frequency=self["disturbance.f"],
            gamma=self["disturbance.gamma"],
            nu=self["disturbance.nu"],
            C_nu=self["disturbance.C_nu"],
            T_period=self["disturbance.T_period"],
            seed=self["disturbance.seed"],
            t_off=t_off if self["disturbance.family"] == "compact_burst" else math.inf)

    def initial_arrays(self, xs):
        if self["initial.family"] == "zero":
            z = np.zeros_like(xs)
            return z, z.copy(), z.copy()
        phi, dphi = bump_profile(xs, self["initial.amplitude"],
                                 self["initial.center"], self["initial.width"])
        return phi, np.zeros_like(xs), dphi
