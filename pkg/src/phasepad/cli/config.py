"""Run configuration: INI-style file plus command-line overrides.

A configuration file has the sections ``[state]``, ``[window]``, ``[grid]``,
``[output]`` and, for ``evolve``, ``[evolve]``::

    [state]
    spec = coherent:mu=1+0.5j

    [window]
    spec = gaussian:beta=1,xw=0,kw=0

    [grid]
    q = -8,8,256
    p = -8,8,256
    x = -16,16,512

    [output]
    dir = out
    format = csv

    [evolve]
    potential = q^2/2
    dt = 0.002
    steps = 1000
    snapshots = 10
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..numgrid import Axis, Wavefunction1D
from ..windows import WindowSpec, format_window, parse_window
from ..xform import DEFAULT_X_AXIS

__all__ = ["RunConfig", "StateSpec", "parse_state", "parse_axis", "parse_grid", "load_wavefunction"]

FORMATS = ("csv", "bin")

_STATE_KEYS = {
    "test": {},
    "coherent": {"mu": complex},
    "oscillator": {"n": int},
    "free": {"gamma": float},
    "momentum": {"k0": float},
    "position": {"x0": float},
}


@dataclass(frozen=True)
class StateSpec:
    """A named analytic state with parameters, or a sampled file."""

    name: str
    params: tuple = ()
    path: str | None = None

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    def to_string(self) -> str:
        if self.name == "file":
            return f"file:{self.path}"
        if not self.params:
            return self.name
        items = ",".join(f"{k}={_fmt_value(v)}" for k, v in self.params)
        return f"{self.name}:{items}"


def _fmt_value(v) -> str:
    if isinstance(v, complex):
        sign = "-" if np.signbit(v.imag) else "+"
        return f"{v.real!r}{sign}{abs(v.imag)!r}j"
    return repr(v)


def _parse_number(kind, text: str):
    text = text.strip().replace(" ", "").replace("i", "j")
    if kind is complex:
        return complex(text)
    if kind is int:
        value = int(text)
        if value < 0:
            raise ValueError("negative")
        return value
    return float(text)


def parse_state(text: str) -> StateSpec:
    """Parse ``test``, ``coherent:mu=1+0.5j``, ``oscillator:n=1``, ``file:<path>`` etc."""
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name == "file":
        if not rest:
            raise ConfigError("file state needs a path")
        return StateSpec("file", (), rest)
    if name not in _STATE_KEYS:
        raise ConfigError(f"unknown state {name!r}; expected one of "
                          f"{sorted(_STATE_KEYS) + ['file']}")
    keys = _STATE_KEYS[name]
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        key = key.strip().lower()
        if not eq or key not in keys:
            raise ConfigError(f"bad state parameter {item!r} for {name}")
        try:
            params[key] = _parse_number(keys[key], value)
        except ValueError as exc:
            raise ConfigError(f"bad value in state parameter {item!r}") from exc
    defaults = {"coherent": {"mu": 0j}, "oscillator": {"n": 0}, "free": {"gamma": 1.0},
                "momentum": {"k0": 0.0}, "position": {"x0": 0.0}}
    full = dict(defaults.get(name, {}), **params)
    if name == "free" and not full["gamma"] > 0:
        raise ConfigError("gamma must be positive")
    if name == "oscillator" and full["n"] > 12:
        raise ConfigError("oscillator order must lie in 0..12")
    return StateSpec(name, tuple(sorted(full.items())))


def parse_axis(text: str) -> Axis:
    """``min,max,n`` into an :class:`Axis`."""
    parts = [s.strip() for s in str(text).split(",")]
    if len(parts) != 3:
        raise ConfigError(f"axis must be min,max,n; got {text!r}")
    try:
        return Axis(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"bad axis {text!r}: {exc}") from exc


def parse_grid(text: str) -> tuple[Axis, Axis]:
    """``qmin,qmax,nq,pmin,pmax,np`` into two axes."""
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 6:
        raise ConfigError(f"grid must be qmin,qmax,nq,pmin,pmax,np; got {text!r}")
    return parse_axis(",".join(parts[:3])), parse_axis(",".join(parts[3:]))


def load_wavefunction(path: str | Path) -> Wavefunction1D:
    """Read a sampled wavefunction from a CSV file with columns ``x,re[,im]``.

    The ``x`` column must be uniformly spaced; it defines the coordinate
    grid of the result.
    """
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2,
                          skiprows=_header_rows(path))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read wavefunction file {path}: {exc}") from exc
    if data.shape[1] not in (2, 3):
        raise ConfigError("wavefunction file needs columns x,re or x,re,im")
    x = data[:, 0]
    if len(x) < 8:
        raise ConfigError("wavefunction file has fewer than 8 samples")
    axis = Axis(float(x[0]), float(x[-1]), len(x))
    if np.max(np.abs(x - axis.points)) > 1e-9 * max(1.0, np.max(np.abs(x))):
        raise ConfigError("wavefunction file must be sampled on a uniform grid")
    vals = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0)
    return Wavefunction1D(axis, vals)


def _header_rows(path) -> int:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    try:
        [float(s) for s in first.split(",")]
        return 0
    except ValueError:
        return 1


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs. Physical parameters are validated on construction."""

    state: StateSpec = field(default_factory=lambda: StateSpec("test"))
    window: WindowSpec | None = None
    q_axis: Axis = field(default_factory=Axis.default)
    p_axis: Axis = field(default_factory=Axis.default)
    x_axis: Axis = DEFAULT_X_AXIS
    out_dir: str = "phasepad_out"
    fmt: str = "csv"
    potential: str = "q^2/2"
    dt: float = 0.002
    steps: int = 1000
    snapshots: int = 10

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("dt must be positive")
        if self.steps < 0:
            raise ConfigError("steps must be nonnegative")
        if self.snapshots < 1:
            raise ConfigError("snapshots must be at least 1")

    # -- serialization -------------------------------------------------

    def to_ini(self) -> str:
        """Text form accepted by :meth:`from_ini`."""
        lines = ["[state]", f"spec = {self.state.to_string()}", ""]
        if self.window is not None:
            lines += ["[window]", f"spec = {format_window(self.window)}", ""]
        lines += ["[grid]", f"q = {self.q_axis.to_string()}", f"p = {self.p_axis.to_string()}",
                  f"x = {self.x_axis.to_string()}", "",
                  "[output]", f"dir = {self.out_dir}", f"format = {self.fmt}", "",
                  "[evolve]", f"potential = {self.potential}", f"dt = {self.dt!r}",
                  f"steps = {self.steps}", f"snapshots = {self.snapshots}", ""]
        return "\n".join(lines)

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc
        known = {"state", "window", "grid", "output", "evolve"}
        unknown = set(parser.sections()) - known
        if unknown:
            raise ConfigError(f"unknown configuration sections {sorted(unknown)}")
        return cls().with_overrides(_ini_overrides(parser))

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        return cls.from_ini(text)

    def with_overrides(self, values: dict) -> "RunConfig":
        """Apply text-valued overrides such as those from command-line flags."""
        kwargs = {}
        for key, value in values.items():
            if value is None:
                continue
            if key == "state":
                kwargs["state"] = parse_state(value)
            elif key == "window":
                kwargs["window"] = parse_window(value)
            elif key == "grid":
                kwargs["q_axis"], kwargs["p_axis"] = parse_grid(value)
            elif key in ("q_axis", "p_axis", "x_axis"):
                kwargs[key] = parse_axis(value)
            elif key == "out_dir":
                kwargs["out_dir"] = str(value)
            elif key == "fmt":
                kwargs["fmt"] = str(value).strip().lower()
            elif key == "potential":
                kwargs["potential"] = str(value).strip()
            elif key in ("dt",):
                kwargs[key] = _as(float, key, value)
            elif key in ("steps", "snapshots"):
                kwargs[key] = _as(int, key, value)
            else:
                raise ConfigError(f"unknown setting {key!r}")
        return replace(self, **kwargs)


def _as(kind, key, value):
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


_INI_KEYS = {
    ("state", "spec"): "state",
    ("window", "spec"): "window",
    ("grid", "q"): "q_axis",
    ("grid", "p"): "p_axis",
    ("grid", "x"): "x_axis",
    ("grid", "grid"): "grid",
    ("output", "dir"): "out_dir",
    ("output", "format"): "fmt",
    ("evolve", "potential"): "potential",
    ("evolve", "dt"): "dt",
    ("evolve", "steps"): "steps",
    ("evolve", "snapshots"): "snapshots",
}


def _ini_overrides(parser: configparser.ConfigParser) -> dict:
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            target = _INI_KEYS.get((section, key))
            if target is None:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            out[target] = value
    return out
