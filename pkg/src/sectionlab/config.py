"""Config file handling for the command-line laboratory.

The config is a single INI-style text file with sections [diffeo], [metric],
[integrator], [scan] and [output].  All angles are radians.  Every run emits
the effective configuration (defaults filled in) in the header of its
outputs, so an experiment is reproducible from the artifact alone.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .circle import (
    TWO_PI,
    BumpDiffeo,
    CircleDiffeo,
    IdentityDiffeo,
    MonotonicityViolation,
    RotationDiffeo,
    SplineDiffeo,
)
from .metric import GluedMetric


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


_DIFFEO_KINDS = ("identity", "rotation", "bump", "spline")


@dataclass
class Config:
    # [diffeo]
    kind: str = "bump"
    amplitude: float = 0.3
    support_lo: float = math.pi
    support_hi: float = TWO_PI
    angle: float = 0.0  # rotation kind only
    spline_knots: list = field(default_factory=list)
    spline_values: list = field(default_factory=list)
    # [metric]
    t0: float = 0.25
    t1: float = 0.75
    psi2_thetas: list = field(default_factory=list)
    psi2_values: list = field(default_factory=list)
    # [integrator]
    ds: float = 1e-3
    s_max: float = 20.0
    radial_tol: float = 1e-9
    t_guard: float = 1e-6
    # [scan]
    n_samples: int = 360
    k_max: int = 64
    tol: float = 1e-9
    # [output]
    directory: str = "out"
    format: str = "csv"

    def build_diffeo(self) -> CircleDiffeo:
        try:
            if self.kind == "identity":
                return IdentityDiffeo()
            if self.kind == "rotation":
                return RotationDiffeo(self.angle)
            if self.kind == "bump":
                return BumpDiffeo(self.amplitude, self.support_lo, self.support_hi)
            if self.kind == "spline":
                if not self.spline_knots:
                    raise ConfigError("diffeo.spline_knots: required for kind=spline")
                return SplineDiffeo(self.spline_knots, self.spline_values)
        except MonotonicityViolation as exc:
            raise ConfigError(f"diffeo.amplitude: {exc}") from exc
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"diffeo: {exc}") from exc
        raise ConfigError(f"diffeo.kind: unknown kind {self.kind!r}")

    def build_metric(self, psi1_scale: float = 1.0) -> GluedMetric:
        f = self.build_diffeo()
        psi2 = None
        if self.psi2_thetas:
            if len(self.psi2_thetas) != len(self.psi2_values):
                raise ConfigError("metric.psi2_values: length must match metric.psi2_thetas")
            knots = np.asarray(self.psi2_thetas, dtype=float)
            vals = np.asarray(self.psi2_values, dtype=float)
            if np.any(np.diff(knots) <= 0) or knots[0] < 0 or knots[-1] >= TWO_PI:
                raise ConfigError(
                    "metric.psi2_thetas: knots must be strictly increasing within [0, 2*pi)"
                )
            x_ext = np.append(knots, knots[0] + TWO_PI)
            y_ext = np.append(vals, vals[0])
            spl = CubicSpline(x_ext, y_ext, bc_type="periodic")
            dspl = spl.derivative(1)
            x0 = float(knots[0])

            def val(theta, _s=spl, _x0=x0):
                out = _s(_x0 + np.mod(theta - _x0, TWO_PI))
                return out if isinstance(theta, np.ndarray) else float(out)

            def der(theta, _d=dspl, _x0=x0):
                out = _d(_x0 + np.mod(theta - _x0, TWO_PI))
                return out if isinstance(theta, np.ndarray) else float(out)

            psi2 = (val, der)
        try:
            return GluedMetric(f, t0=self.t0, t1=self.t1, psi2=psi2, psi1_scale=psi1_scale)
        except ValueError as exc:
            raise ConfigError(f"metric: {exc}") from exc

    def validate(self) -> None:
        if self.kind not in _DIFFEO_KINDS:
            raise ConfigError(f"diffeo.kind: must be one of {_DIFFEO_KINDS}, got {self.kind!r}")
        if not 0.0 < self.t0 < self.t1 < 1.0:
            raise ConfigError(f"metric.t0/t1: need 0 < t0 < t1 < 1, got {self.t0}, {self.t1}")
        if self.ds <= 0:
            raise ConfigError(f"integrator.ds: must be positive, got {self.ds}")
        if self.s_max <= 0:
            raise ConfigError(f"integrator.s_max: must be positive, got {self.s_max}")
        if self.radial_tol <= 0:
            raise ConfigError(f"integrator.radial_tol: must be positive, got {self.radial_tol}")
        if self.t_guard <= 0:
            raise ConfigError(f"integrator.t_guard: must be positive, got {self.t_guard}")
        if self.n_samples < 1:
            raise ConfigError(f"scan.n_samples: must be >= 1, got {self.n_samples}")
        if self.k_max < 1:
            raise ConfigError(f"scan.k_max: must be >= 1, got {self.k_max}")
        if self.tol <= 0:
            raise ConfigError(f"scan.tol: must be positive, got {self.tol}")
        if self.format != "csv":
            raise ConfigError(f"output.format: only 'csv' is supported, got {self.format!r}")
        # object-level invariants are enforced by construction
        self.build_metric()

    def effective_text(self) -> str:
        """Canonical INI text with every key explicit; emitting is idempotent."""
        buf = io.StringIO()
        buf.write("[diffeo]\n")
        buf.write(f"kind = {self.kind}\n")
        buf.write(f"amplitude = {self.amplitude!r}\n")
        buf.write(f"support_lo = {self.support_lo!r}\n")
        buf.write(f"support_hi = {self.support_hi!r}\n")
        buf.write(f"angle = {self.angle!r}\n")
        if self.spline_knots:
            buf.write(f"spline_knots = {_fmt_list(self.spline_knots)}\n")
            buf.write(f"spline_values = {_fmt_list(self.spline_values)}\n")
        buf.write("\n[metric]\n")
        buf.write(f"t0 = {self.t0!r}\n")
        buf.write(f"t1 = {self.t1!r}\n")
        if self.psi2_thetas:
            buf.write(f"psi2_thetas = {_fmt_list(self.psi2_thetas)}\n")
            buf.write(f"psi2_values = {_fmt_list(self.psi2_values)}\n")
        buf.write("\n[integrator]\n")
        buf.write(f"ds = {self.ds!r}\n")
        buf.write(f"s_max = {self.s_max!r}\n")
        buf.write(f"radial_tol = {self.radial_tol!r}\n")
        buf.write(f"t_guard = {self.t_guard!r}\n")
        buf.write("\n[scan]\n")
        buf.write(f"n_samples = {self.n_samples}\n")
        buf.write(f"k_max = {self.k_max}\n")
        buf.write(f"tol = {self.tol!r}\n")
        buf.write("\n[output]\n")
        buf.write(f"directory = {self.directory}\n")
        buf.write(f"format = {self.format}\n")
        return buf.getvalue()

    def header_lines(self) -> list[str]:
        """Effective config as comment-ready lines for output headers."""
        lines = []
        section = None
        for raw in self.effective_text().splitlines():
            raw = raw.strip()
            if not raw:
                continue
            if raw.startswith("["):
                section = raw[1:-1]
                continue
            lines.append(f"{section}.{raw}")
        return lines


def _fmt_list(values) -> str:
    return ", ".join(repr(float(v)) for v in values)


def _parse_list(text: str) -> list:
    return [float(tok) for tok in text.replace(",", " ").split()]


_SCHEMA = {
    "diffeo": {
        "kind": str,
        "amplitude": float,
        "support_lo": float,
        "support_hi": float,
        "angle": float,
        "spline_knots": _parse_list,
        "spline_values": _parse_list,
    },
    "metric": {
        "t0": float,
        "t1": float,
        "psi2_thetas": _parse_list,
        "psi2_values": _parse_list,
    },
    "integrator": {
        "ds": float,
        "s_max": float,
        "radial_tol": float,
        "t_guard": float,
    },
    "scan": {
        "n_samples": int,
        "k_max": int,
        "tol": float,
    },
    "output": {
        "directory": str,
        "format": str,
    },
}


def loads_config(text: str) -> Config:
    """Parse a config from INI text; unknown sections or keys abort."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    cfg = Config()
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{section}: unknown config section")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{section}.{key}: unknown config key")
            conv = _SCHEMA[section][key]
            try:
                value = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}: cannot parse {raw!r}") from exc
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


def load_config(path=None) -> Config:
    """Load a config file, or return the defaults when path is None.

    Unknown sections or keys abort with a diagnostic naming them; so do
    values that violate any constructed object's invariants.
    """
    if path is None:
        cfg = Config()
        cfg.validate()
        return cfg
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return loads_config(text)
