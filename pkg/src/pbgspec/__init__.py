"""Spontaneous-emission spectra and dark lines for emitters coupled to a flat
and a structured (photonic band gap) reservoir, with time-domain oracles."""
from ._backend import BACKEND
from .config import RunConfig, load_config
from .darklines import DarkLine, Origin, count_peaks, find_zeros, predict_dark_lines
from .errors import (
    DegenerateDenominator,
    GridMismatch,
    NonPositiveTau,
    NormDrift,
    ParseError,
    PbgSpecError,
    PoleAtBandEdge,
    PoleAtDefect,
    StepTooLarge,
    TruncationWarning,
    ValidationError,
)
from .oracle import (
    ModeComb,
    Trajectory,
    build_comb,
    compare_spectra,
    discretized_mode_evolve,
    solve_volterra,
    spectrum_from_trajectory,
)
from .reservoir import DomModel, Variant, branch_sqrt, dom_density, kernel_laplace, kernel_time
from .spectra import (
    EmitterConfig,
    FrequencyGrid,
    Normalization,
    Scheme,
    Spectrum,
    driven_spectrum,
    eval_grid,
    lambda_spectrum,
)

__version__ = "0.1.0"
