"""Closed-form long-time emission spectra into the Markovian reservoir.

Every spectrum is written as ``gamma * |N|**2 / |D|**2`` after clearing the
divergent kernel terms from the denominator: numerator and denominator are
multiplied by the band-edge factor ``q`` (``branch_sqrt(x - delta_g)``, plus
``i sqrt(eps)`` when smoothed) and, for the delta defect, by ``x - delta_c``.
Where the driven numerator already carries the same factor (laser tuned to the
edge or to the defect) it is cancelled symbolically instead, so the form stays
finite there too.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DegenerateDenominator, ValidationError
from .reservoir import DomModel, Variant, branch_sqrt

__all__ = [
    "Scheme",
    "Normalization",
    "EmitterConfig",
    "FrequencyGrid",
    "Spectrum",
    "lambda_spectrum",
    "driven_spectrum",
    "spectrum",
    "eval_grid",
]


class Scheme(str, enum.Enum):
    LAMBDA = "lambda"
    DRIVEN = "driven"


class Normalization(str, enum.Enum):
    RAW = "raw"
    PEAK = "peak"


def _real(name, value):
    if isinstance(value, (complex, np.complexfloating)):
        raise ValidationError(name, "complex values are not supported")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"not a real number: {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(name, "must be finite")
    return value


@dataclass(frozen=True)
class EmitterConfig:
    """Full problem statement for one emitter.

    ``gamma`` may be zero for time-domain checks with the Markovian channel
    switched off; the CLI requires it to be positive.  The Lambda scheme always
    starts in |2>.
    """

    scheme: Scheme
    model: DomModel
    gamma: float = 1.0
    g: float = 1.0
    omega: float = 0.0
    delta: float = 0.0
    b2_0: float = 1.0
    b3_0: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        except ValueError:
            raise ValidationError("scheme", f"unknown scheme {self.scheme!r}") from None
        if not isinstance(self.model, DomModel):
            raise ValidationError("model", "must be a DomModel")
        for name in ("gamma", "g", "omega", "delta", "b2_0", "b3_0"):
            object.__setattr__(self, name, _real(name, getattr(self, name)))
        if self.gamma < 0:
            raise ValidationError("gamma", "must be >= 0")
        if self.g < 0:
            raise ValidationError("g", "must be >= 0")
        if self.scheme is Scheme.LAMBDA:
            if self.b2_0 != 1.0 or self.b3_0 != 0.0:
                raise ValidationError("b2_0", "Lambda scheme starts in |2>: b2_0 = 1, b3_0 = 0")
            if self.omega != 0.0:
                raise ValidationError("omega", "no laser in the Lambda scheme")
        else:
            if self.omega < 0:
                raise ValidationError("omega", "must be >= 0")
            if abs(self.b2_0 ** 2 + self.b3_0 ** 2 - 1.0) > 1e-12:
                raise ValidationError("b2_0", "b2_0**2 + b3_0**2 must equal 1")

    @classmethod
    def lambda_type(cls, model, gamma=1.0, g=1.0):
        return cls(Scheme.LAMBDA, model, gamma=gamma, g=g)

    @classmethod
    def driven(cls, model, omega, delta, b2_0=1.0, b3_0=0.0, gamma=1.0, g=1.0):
        return cls(Scheme.DRIVEN, model, gamma=gamma, g=g, omega=omega, delta=delta, b2_0=b2_0, b3_0=b3_0)

    def with_model(self, **changes):
        return replace(self, model=replace(self.model, **changes))


@dataclass(frozen=True)
class FrequencyGrid:
    min: float
    max: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "min", _real("grid_min", self.min))
        object.__setattr__(self, "max", _real("grid_max", self.max))
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValidationError("grid_n", "must be an integer")
        object.__setattr__(self, "n", int(self.n))
        if not self.min < self.max:
            raise ValidationError("grid_max", "grid_min must be < grid_max")
        if self.n < 2:
            raise ValidationError("grid_n", "must be >= 2")

    @property
    def points(self):
        return np.linspace(self.min, self.max, self.n)

    @property
    def spacing(self):
        return (self.max - self.min) / (self.n - 1)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sampled spectrum; ``source`` is the generating config when closed-form."""

    grid: FrequencyGrid
    values: np.ndarray
    normalization: Normalization = Normalization.RAW
    source: Optional[EmitterConfig] = field(default=None, repr=False)
    scale: float = field(default=1.0, repr=False)  # values == raw / scale

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValidationError("values", f"expected {self.grid.n} samples, got {values.shape}")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValidationError("values", "spectrum must be finite and nonnegative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    @property
    def points(self):
        return self.grid.points

    @property
    def peak(self):
        return float(self.values.max())

    def normalized(self, normalization=Normalization.PEAK):
        normalization = Normalization(normalization)
        if normalization is Normalization.RAW or self.normalization is Normalization.PEAK:
            return self
        peak = self.peak
        if peak == 0:
            return replace(self, normalization=Normalization.PEAK)
        return replace(self, values=self.values / peak, normalization=Normalization.PEAK,
                       scale=self.scale * peak)

    def evaluate(self, delta_lambda):
        """Evaluate the underlying closed form, scaled to this normalization."""
        if self.source is None:
            raise ValueError("spectrum has no closed-form source")
        return spectrum(self.source, delta_lambda) / self.scale


def _edge_multiplier(model, x):
    """Band-edge factor q such that the edge kernel term is g**1.5 / q."""
    r = branch_sqrt(x - model.delta_g)
    if model.variant is Variant.SMOOTHED_EDGE:
        return 1j * math.sqrt(model.epsilon) + r, r
    return r, r


def _unit(m):
    """Split a multiplier into m / |m| and |m| (|m| taken as 1 where m == 0).

    Numerator and denominator are multiplied by the unit part and the scale is
    divided out of the pole terms, so products of several small multipliers
    never underflow.
    """
    scale = np.abs(m)
    scale = np.where(scale == 0, 1.0, scale)
    return m / scale, scale


def _finish(cfg, x, num, den, on_pole):
    # on_pole: exactly one multiplier vanishes and its pole term has positive
    # coupling, so S = 0 even where that pole term underflowed in den
    den = np.where(on_pole, 1.0, den)
    num = np.where(on_pole, 0.0, num)
    bad = den == 0
    if np.any(bad):
        at = np.atleast_1d(x)[np.atleast_1d(bad)][0]
        raise DegenerateDenominator(float(at))
    # a pole term that overflows leaves inf/nan in den; its true modulus is > 1e300
    huge = ~np.isfinite(den)
    # ratio of moduli first: |num|**2 and |den|**2 can both underflow near a
    # cancelled zero, and complex division overflows on a subnormal den
    out = np.where(huge, 0.0, cfg.gamma * (np.abs(num) / np.where(huge, 1.0, np.abs(den))) ** 2)
    return out[()] if out.ndim == 0 else out


def _delta_coupling(model):
    """g1**2 as it enters the pole terms, or 0 when there is no delta defect."""
    if model.variant is not Variant.DELTA_DEFECT:
        return 0.0
    return model.g1 ** 2


def _lambda_parts(cfg, x):
    model = cfg.model
    c = cfg.g ** 1.5
    q, _ = _edge_multiplier(model, x)
    if c == 0:
        q = np.ones_like(q)  # edge term vanishes identically; nothing to clear
    qu, qs = _unit(q)
    base = -1j * x + cfg.gamma / 2
    g1sq = _delta_coupling(model)
    if g1sq > 0:
        du, ds = _unit(x - model.delta_c + 0j)
        num = qu * du
        den = base * qu * du + (c / qs) * du + 1j * (g1sq / ds) * qu
    else:
        du = np.ones_like(qu)
        num = qu
        den = base * qu + c / qs
        if model.variant is Variant.LORENTZIAN_DEFECT:
            lor = 1j * (model.delta_c - x) + model.gamma_c / 2
            den = den + model.g1 ** 2 * qu / lor
    return num, den, (qu == 0) != (du == 0)


def lambda_spectrum(cfg: EmitterConfig, delta_lambda):
    """Lambda-scheme spectrum ``S(delta_lambda)``; scalar or array input."""
    if cfg.scheme is not Scheme.LAMBDA:
        raise ValidationError("scheme", "lambda_spectrum needs the Lambda scheme")
    x = np.asarray(delta_lambda, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        num, den, on_pole = _lambda_parts(cfg, x)
    return _finish(cfg, x, num, den, on_pole)


def _driven_parts(cfg, x):
    model = cfg.model
    c = cfg.g ** 1.5
    p = x - cfg.delta
    amp = p * cfg.b2_0 + cfg.omega * cfg.b3_0

    # band-edge term i c p / q, times its multiplier
    q, r = _edge_multiplier(model, x)
    ones = np.ones_like(q)
    if c == 0:
        edge_mul, edge_term = ones, np.zeros_like(q)
    elif model.bare_edge and cfg.delta == model.delta_g:
        # p == r**2 here, so p / r == r
        edge_mul, edge_term = ones, 1j * c * r
    else:
        edge_mul, qs = _unit(q)
        edge_term = 1j * (c / qs) * p

    # defect term, times its multiplier
    defect_mul, defect_term = ones, np.zeros_like(q)
    g1sq = _delta_coupling(model)
    if g1sq > 0:
        if cfg.delta == model.delta_c:
            defect_term = -g1sq * ones
        else:
            defect_mul, ds = _unit(x - model.delta_c + 0j)
            defect_term = -(g1sq / ds) * p + 0j
    elif model.variant is Variant.LORENTZIAN_DEFECT:
        lor = 1j * (model.delta_c - x) + model.gamma_c / 2
        defect_term = 1j * model.g1 ** 2 * p / lor

    num = amp * edge_mul * defect_mul
    den = ((p * (x + 0.5j * cfg.gamma) - cfg.omega ** 2) * edge_mul * defect_mul
           + edge_term * defect_mul + defect_term * edge_mul)
    return num, den, (edge_mul == 0) != (defect_mul == 0)


def driven_spectrum(cfg: EmitterConfig, delta_lambda):
    """Laser-driven spectrum ``S(delta_lambda)``; scalar or array input."""
    if cfg.scheme is not Scheme.DRIVEN:
        raise ValidationError("scheme", "driven_spectrum needs the driven scheme")
    x = np.asarray(delta_lambda, dtype=float)
    if cfg.omega == 0:
        # every denominator term carries the factor p = x - delta, which cancels
        # against the numerator exactly; dividing it out numerically can underflow
        lam = EmitterConfig(Scheme.LAMBDA, cfg.model, gamma=cfg.gamma, g=cfg.g)
        return cfg.b2_0 ** 2 * lambda_spectrum(lam, x)
    with np.errstate(over="ignore", invalid="ignore"):
        num, den, on_pole = _driven_parts(cfg, x)
    return _finish(cfg, x, num, den, on_pole)


def spectrum(cfg: EmitterConfig, delta_lambda):
    if cfg.scheme is Scheme.LAMBDA:
        return lambda_spectrum(cfg, delta_lambda)
    return driven_spectrum(cfg, delta_lambda)


def eval_grid(cfg: EmitterConfig, grid: FrequencyGrid, normalization=Normalization.RAW) -> Spectrum:
    values = np.asarray(spectrum(cfg, grid.points), dtype=float)
    spec = Spectrum(grid, values, Normalization.RAW, source=cfg)
    return spec.normalized(normalization)
