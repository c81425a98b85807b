"""Run configuration: flat JSON key/value files mapped onto the library types."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .errors import ParseError, ValidationError
from .presets import DEFAULT_GRID
from .reservoir import DomModel, Variant
from .spectra import EmitterConfig, FrequencyGrid, Normalization, Scheme

__all__ = ["RunConfig", "load_config", "parse_config", "ORACLE_DEFAULTS"]

# long enough for the narrowest figure line (FWHM ~0.09) to ring down
ORACLE_DEFAULTS = {"t_max": 150.0, "dt": 0.02, "comb_spacing": 0.01}

_MODEL_KEYS = ("delta_g", "epsilon", "g1", "delta_c", "gamma_c")
_DRIVE_KEYS = ("omega", "delta", "b2_0", "b3_0")
_KEYS = frozenset(
    ("scheme", "model", "gamma", "g", *_MODEL_KEYS, *_DRIVE_KEYS,
     "grid_min", "grid_max", "grid_n", "normalization", "output", "t_max", "dt", "comb_spacing")
)


@dataclass(frozen=True)
class RunConfig:
    emitter: EmitterConfig
    grid: FrequencyGrid = FrequencyGrid(*DEFAULT_GRID)
    normalization: Normalization = Normalization.RAW
    output: Optional[str] = None
    t_max: float = ORACLE_DEFAULTS["t_max"]
    dt: float = ORACLE_DEFAULTS["dt"]
    comb_spacing: float = ORACLE_DEFAULTS["comb_spacing"]

    def __post_init__(self):
        if not self.emitter.gamma > 0:
            raise ValidationError("gamma", "must be > 0")
        object.__setattr__(self, "normalization", _enum(Normalization, "normalization", self.normalization))
        for name in ("t_max", "dt", "comb_spacing"):
            value = _number(name, getattr(self, name))
            if not value > 0:
                raise ValidationError(name, "must be > 0")
            object.__setattr__(self, name, value)
        if self.dt >= self.t_max:
            raise ValidationError("dt", "must be smaller than t_max")
        if self.output is not None and not isinstance(self.output, str):
            raise ValidationError("output", "must be a string path")

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        em = self.emitter
        model = em.model
        out = {"scheme": em.scheme.value, "model": model.variant.value, "gamma": em.gamma, "g": em.g}
        for key in _MODEL_KEYS:
            value = getattr(model, key)
            if value is not None:
                out[key] = value
        if em.scheme is Scheme.DRIVEN:
            for key in _DRIVE_KEYS:
                out[key] = getattr(em, key)
        out.update(grid_min=self.grid.min, grid_max=self.grid.max, grid_n=self.grid.n,
                   normalization=self.normalization.value, t_max=self.t_max, dt=self.dt,
                   comb_spacing=self.comb_spacing)
        if self.output is not None:
            out["output"] = self.output
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _number(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(name, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(name, "must be finite")
    return value


def _enum(kind, name, value):
    try:
        return kind(value)
    except ValueError:
        choices = ", ".join(m.value for m in kind)
        raise ValidationError(name, f"{value!r} is not one of {choices}") from None


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded key/value mapping and build the :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ParseError("configuration must be a JSON object")
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise ValidationError(unknown[0], "unknown key")
    for key in ("scheme", "model"):
        if key not in data:
            raise ValidationError(key, "missing")
    scheme = _enum(Scheme, "scheme", data["scheme"])
    variant = _enum(Variant, "model", data["model"])

    def num(key, default=None):
        if key not in data or data[key] is None:
            return default
        return _number(key, data[key])

    model = DomModel(variant, delta_g=num("delta_g", 0.0), epsilon=num("epsilon"), g1=num("g1"),
                     delta_c=num("delta_c"), gamma_c=num("gamma_c"))
    if scheme is Scheme.LAMBDA:
        extra = [k for k in _DRIVE_KEYS if k in data]
        if extra:
            raise ValidationError(extra[0], "only valid for the driven scheme")
        emitter = EmitterConfig(scheme, model, gamma=num("gamma", 1.0), g=num("g", 1.0))
    else:
        if "omega" not in data or "delta" not in data:
            raise ValidationError("omega" if "omega" not in data else "delta", "required for the driven scheme")
        b2_0 = num("b2_0", 1.0)
        b3_0 = num("b3_0")
        if b3_0 is None:
            b3_0 = math.sqrt(max(0.0, 1.0 - b2_0 ** 2))
        emitter = EmitterConfig(scheme, model, gamma=num("gamma", 1.0), g=num("g", 1.0),
                                omega=num("omega"), delta=num("delta"), b2_0=b2_0, b3_0=b3_0)
    grid_n = data.get("grid_n", DEFAULT_GRID[2])
    if isinstance(grid_n, bool) or not isinstance(grid_n, int):
        raise ValidationError("grid_n", "must be an integer")
    grid = FrequencyGrid(num("grid_min", DEFAULT_GRID[0]), num("grid_max", DEFAULT_GRID[1]), grid_n)
    return RunConfig(
        emitter,
        grid,
        normalization=data.get("normalization", "raw"),
        output=data.get("output"),
        t_max=num("t_max", ORACLE_DEFAULTS["t_max"]),
        dt=num("dt", ORACLE_DEFAULTS["dt"]),
        comb_spacing=num("comb_spacing", ORACLE_DEFAULTS["comb_spacing"]),
    )


def load_config(path) -> RunConfig:
    """Read and validate a configuration file.

    Raises :class:`ParseError` for unreadable or malformed files and
    :class:`ValidationError` (naming the field) for invariant breaches.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return parse_config(data)
