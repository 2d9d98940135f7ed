"""Run configuration stored as a flat key=value file.

Recognised keys: seed, workers, output, format, eta, delta, ``tol.<name>`` for
the tolerances in TOLERANCES, and ``param.<command>.<name>`` for free-form
per-command parameters. Anything else is rejected.
"""
import os
from dataclasses import dataclass, field

from .errors import UsageError
from .parallel import default_workers

TOLERANCES = {
    "oracle": 1e-9,
    "identity": 1e-9,
    "poisson": 1e-8,
    "ghat_support": 1e-12,
    "zerosum": 1e-8,
    "zerosum_violated": 1e-2,
    "typei_final": 1e-1,
    "moment_factor": 4.0,
    "density_factor": 3.0,
    "s10_exponent": 1.95,
}

_SCALARS = {"seed": int, "workers": int, "output": str, "format": str, "eta": float, "delta": float}
FORMATS = ("csv", "json")


@dataclass
class RunConfig:
    seed: int = 0
    workers: int = field(default_factory=default_workers)
    output: str = field(default_factory=lambda: os.environ.get("E2LAB_OUTPUT_DIR", "e2lab-out"))
    format: str = "csv"
    eta: float = 0.05
    delta: float = 0.01
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        for k in self.tolerances:
            if k not in TOLERANCES:
                raise UsageError(f"unknown tolerance {k!r}")

    def tol(self, name):
        return self.tolerances.get(name, TOLERANCES[name])

    def param(self, command, name, default=None, kind=str):
        v = self.params.get(f"{command}.{name}")
        return default if v is None else kind(v)

    def to_text(self):
        lines = [f"{k}={getattr(self, k)!r}" if isinstance(getattr(self, k), float) else f"{k}={getattr(self, k)}"
                 for k in _SCALARS]
        lines += [f"tol.{k}={v!r}" for k, v in sorted(self.tolerances.items())]
        lines += [f"param.{k}={v}" for k, v in sorted(self.params.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        kw, tols, params = {}, {}, {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise UsageError(f"malformed config line: {raw!r}")
            if key in _SCALARS:
                try:
                    kw[key] = _SCALARS[key](value)
                except ValueError as exc:
                    raise UsageError(f"bad value for {key}: {value!r}") from exc
            elif key.startswith("tol."):
                tols[key[4:]] = float(value)
            elif key.startswith("param.") and key.count(".") >= 2:
                params[key[6:]] = value
            else:
                raise UsageError(f"unknown config key {key!r}")
        return cls(tolerances=tols, params=params, **kw)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())


def apply_env(cfg):
    """Environment overrides: E2LAB_OUTPUT_DIR and E2LAB_WORKERS."""
    if os.environ.get("E2LAB_OUTPUT_DIR"):
        cfg.output = os.environ["E2LAB_OUTPUT_DIR"]
    if os.environ.get("E2LAB_WORKERS"):
        cfg.workers = max(1, int(os.environ["E2LAB_WORKERS"]))
    return cfg
