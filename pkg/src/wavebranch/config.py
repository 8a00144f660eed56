"""Flat key = value run configuration.

Lines are ``key = value``; ``#`` starts a comment; arrays are bracketed comma
lists such as ``omega = [1, -2]``. Command-line flags override file values.
"""
import math
import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError

COMMANDS = (
    "stream", "dispersion", "spectrum1d", "spectrum2d", "branch",
    "expansion", "verify", "reconstruct",
)
GRID_KEYS = ("n_q", "n_p", "n_x", "n_y")
TOL_KEYS = ("tol_quad", "tol_root", "tol_newton")


@dataclass
class RunConfig:
    command: str = "verify"
    omega: list = field(default_factory=lambda: [0.0])
    s: float | None = None
    R: float | None = None
    F: float | None = None
    k: int = 4
    steps: int = 5
    damp: float = 0.01
    n_q: int = 32
    n_p: int | None = None
    n_x: int = 128
    n_y: int = 128
    n_interval: int = 2048
    n_samples: int = 256
    n_tau: int = 201
    tau_max: float | None = None
    tol_quad: float = 1e-12
    tol_root: float = 1e-15
    tol_newton: float = 1e-10
    index: int = -1
    wave: str | None = None
    branch_file: str | None = None
    out: str | None = None
    models: list | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.omega or len(self.omega) > 9:
            raise ConfigError("omega needs between 1 and 9 coefficients")
        vals = [float(c) for c in self.omega]
        if not all(math.isfinite(c) for c in vals):
            raise ConfigError("omega coefficients must be finite")
        for key in TOL_KEYS:
            v = getattr(self, key)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{key} must be a positive number, got {v!r}")
        for key in GRID_KEYS:
            n = getattr(self, key)
            if n is None:
                continue
            if n < 16 or n > 1024 or n & (n - 1):
                raise ConfigError(f"{key} must be a power of two between 16 and 1024, got {n}")
        if self.n_interval < 16 or self.n_interval > 65536 or self.n_interval & (self.n_interval - 1):
            raise ConfigError("n_interval must be a power of two between 16 and 65536")
        for key in ("k", "steps", "n_samples", "n_tau"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be at least 1")
        for key in ("s", "R", "F", "tau_max"):
            v = getattr(self, key)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{key} must be a positive number, got {v!r}")
        if not math.isfinite(self.damp) or self.damp < 0:
            raise ConfigError("damp must be a nonnegative number")
        return self


_KEYS = {f.name for f in fields(RunConfig)}
_INT = {"k", "steps", "n_q", "n_p", "n_x", "n_y", "n_interval", "n_samples", "n_tau", "index"}
_FLOAT = {"s", "R", "F", "damp", "tau_max", "tol_quad", "tol_root", "tol_newton"}


def _scalar(text):
    t = text.strip()
    low = t.lower()
    if low in ("none", "null", ""):
        return None
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        return t.strip("\"'")


def parse_value(text):
    t = text.strip()
    if t.startswith("["):
        if not t.endswith("]"):
            raise ConfigError(f"unterminated array: {text!r}")
        inner = t[1:-1].strip()
        return [] if not inner else [_scalar(x) for x in inner.split(",")]
    return _scalar(t)


def _coerce(key, value):
    if value is None:
        return None
    if key in ("omega", "models"):
        items = value if isinstance(value, list) else [value]
        if key == "models":
            return [str(x) for x in items]
        try:
            return [float(x) for x in items]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"omega must be a list of numbers, got {value!r}") from exc
    if key in _INT:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return value
    if key in _FLOAT:
        if isinstance(value, str):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    return str(value)


def parse_text(text):
    """key = value lines into a dict of coerced values."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, parse_value(val))
    return out


def load(path=None, overrides=None):
    """RunConfig from an optional file and a dict of overrides; validated."""
    values = {}
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            values.update(parse_text(fh.read()))
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _coerce(key, parse_value(val) if isinstance(val, str) else val)
    return RunConfig(**values).validate()


def threads():
    """Worker cap for sweeps from WAVEBRANCH_THREADS (default 1)."""
    raw = os.environ.get("WAVEBRANCH_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"WAVEBRANCH_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("WAVEBRANCH_THREADS must be at least 1")
    return n
