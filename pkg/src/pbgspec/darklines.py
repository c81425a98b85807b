"""Dark-line catalogue from the configuration, and zero/peak detection on samples."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .reservoir import Variant
from .spectra import EmitterConfig, Scheme, Spectrum

__all__ = ["Origin", "DarkLine", "predict_dark_lines", "find_zeros", "count_peaks", "golden_minimize"]

PEAK_FLOOR = 1e-3

_INVPHI = (math.sqrt(5) - 1) / 2


class Origin(str, enum.Enum):
    BAND_EDGE = "band_edge"
    DEFECT_MODE = "defect_mode"
    LASER_INDUCED = "laser_induced"


@dataclass(frozen=True)
class DarkLine:
    position: float
    origin: Origin
    present: bool
    suppression_reason: Optional[str] = None

    def __post_init__(self):
        if not self.present and not self.suppression_reason:
            raise ValueError("a suppressed dark line needs a reason")

    def to_dict(self):
        return {
            "position": self.position if math.isfinite(self.position) else None,
            "origin": self.origin.value,
            "present": self.present,
            "suppression_reason": self.suppression_reason,
        }


def _line(position, origin, reason=None):
    return DarkLine(float(position), origin, reason is None, reason)


def predict_dark_lines(cfg: EmitterConfig) -> List[DarkLine]:
    """Analytic catalogue of every candidate spectral zero of ``cfg``."""
    model = cfg.model
    driven = cfg.scheme is Scheme.DRIVEN and cfg.omega > 0
    lines = []

    if model.variant is Variant.SMOOTHED_EDGE:
        reason = "smoothed, eps>0"
    elif cfg.g == 0:
        reason = "g=0"
    elif driven and cfg.delta == model.delta_g:
        reason = "delta = delta_g"
    else:
        reason = None
    lines.append(_line(model.delta_g, Origin.BAND_EDGE, reason))

    if model.variant is Variant.DELTA_DEFECT:
        if model.g1 == 0:
            reason = "g1=0"
        elif driven and cfg.delta == model.delta_c:
            reason = "delta = delta_c"
        else:
            reason = None
        lines.append(_line(model.delta_c, Origin.DEFECT_MODE, reason))
    elif model.variant is Variant.LORENTZIAN_DEFECT:
        lines.append(_line(model.delta_c, Origin.DEFECT_MODE, "Lorentzian defect, gamma_c>0"))

    if cfg.scheme is Scheme.DRIVEN:
        if cfg.b2_0 == 0:
            lines.append(_line(math.inf, Origin.LASER_INDUCED, "b2(0)=0"))
        elif cfg.omega == 0:
            lines.append(_line(cfg.delta, Origin.LASER_INDUCED, "Omega=0"))
        else:
            lines.append(_line(cfg.delta - cfg.omega * cfg.b3_0 / cfg.b2_0, Origin.LASER_INDUCED))
    return lines


def golden_minimize(f, a, b, ftarget=0.0, xtol=0.0):
    """Golden-section search for a minimum of a unimodal ``f`` on ``[a, b]``.

    Stops once ``f`` drops to ``ftarget`` or the bracket shrinks to a few ulps
    (plus ``xtol``).  Returns ``(x, f(x))``.
    """
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    while True:
        if best[1] <= ftarget:
            break
        width = b - a
        if width <= xtol + 4 * np.finfo(float).eps * max(1.0, abs(a), abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        for x, fx in ((c, fc), (d, fd)):
            if fx < best[1]:
                best = (x, fx)
    return best


def find_zeros(spec: Spectrum, rel_tol: float = 1e-6) -> List[float]:
    """Positions where the spectrum dips below ``rel_tol`` times its peak.

    Every interior grid minimum is a candidate.  With a closed-form source the
    candidate is refined by golden-section search on its neighbouring cells
    until the bracket collapses (a genuine zero ends far below
    ``1e-12 * peak``) and kept if the refined value clears the threshold;
    otherwise the grid value decides.
    """
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    s = spec.values
    x = spec.points
    peak = float(s.max())
    if peak == 0 or len(s) < 3:
        return []
    interior = np.arange(1, len(s) - 1)
    cand = interior[(s[interior] <= s[interior - 1]) & (s[interior] <= s[interior + 1])]
    zeros = []
    for i in cand:
        if s[i] == 0:
            pos, val = float(x[i]), 0.0
        elif spec.source is not None:
            def f(v):
                return float(spec.evaluate(v))
            pos, val = golden_minimize(f, float(x[i - 1]), float(x[i + 1]))
        else:
            pos, val = float(x[i]), float(s[i])
        if val < rel_tol * peak:
            zeros.append(pos)
    merged = []
    for z in sorted(zeros):
        if not merged or z - merged[-1] > 1e-9:
            merged.append(z)
    return merged


def count_peaks(spec: Spectrum) -> int:
    """Number of strict interior local maxima above ``1e-3`` of the global peak."""
    s = spec.values
    if len(s) < 3:
        return 0
    mid = s[1:-1]
    is_max = (mid > s[:-2]) & (mid > s[2:]) & (mid >= PEAK_FLOOR * s.max())
    return int(np.count_nonzero(is_max))
