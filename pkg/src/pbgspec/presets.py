"""Figure parameter sets: each figure shows three curves differing only in delta_g."""
from __future__ import annotations

from typing import Dict, List, Tuple

from .errors import ValidationError
from .reservoir import DomModel
from .spectra import EmitterConfig

__all__ = ["CURVES", "FIGURE_IDS", "DEFAULT_GRID", "figure_configs", "figure_config"]

# curve style -> band-edge detuning
CURVES: Dict[str, float] = {"dotted": 0.0, "dashed": 1.0, "full": -1.0}
FIGURE_IDS = tuple(range(2, 10))
DEFAULT_GRID = (-6.0, 6.0, 4001)

_G = 1.0
_EPS = 0.3
_G1 = 1.0
_GAMMA_C = 1.0
_OMEGA = 1.0
_DELTA = -1.5


def _model(fig_id, delta_g):
    kind = (fig_id - 2) % 4
    delta_c = -2.0 if fig_id <= 5 else -2.5
    if kind == 0:
        return DomModel.isotropic(delta_g)
    if kind == 1:
        return DomModel.smoothed(delta_g, _EPS)
    if kind == 2:
        return DomModel.delta_defect(delta_g, _G1, delta_c)
    return DomModel.lorentzian_defect(delta_g, _G1, delta_c, _GAMMA_C)


def figure_config(fig_id: int, curve: str) -> EmitterConfig:
    """Emitter configuration for one curve (``dotted``, ``dashed`` or ``full``) of a figure."""
    if fig_id not in FIGURE_IDS:
        raise ValidationError("id", f"figure id must be one of {FIGURE_IDS[0]}..{FIGURE_IDS[-1]}")
    if curve not in CURVES:
        raise ValidationError("curve", f"unknown curve {curve!r}")
    model = _model(fig_id, CURVES[curve])
    if fig_id <= 5:
        return EmitterConfig.lambda_type(model, gamma=1.0, g=_G)
    return EmitterConfig.driven(model, _OMEGA, _DELTA, b2_0=1.0, b3_0=0.0, gamma=1.0, g=_G)


def figure_configs(fig_id: int) -> List[Tuple[str, EmitterConfig]]:
    return [(curve, figure_config(fig_id, curve)) for curve in CURVES]
