"""Time-domain validators for the closed-form spectra.

Two routes that share nothing with the Laplace-domain formulas:

* :func:`solve_volterra` integrates the reduced amplitude equations with the
  memory kernel in the time domain; :func:`spectrum_from_trajectory` then
  Fourier-projects ``b2(t)`` onto the Markovian modes.
* :func:`discretized_mode_evolve` replaces the structured reservoir by a comb
  of discrete modes sampled from the density of modes and propagates the
  Schrodinger equation directly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, signal, special

from ._backend import kernels
from .errors import GridMismatch, NormDrift, StepTooLarge, TruncationWarning, ValidationError
from .reservoir import DomModel, defect_line, dom_cumulative, dom_density, kernel_parts
from .spectra import EmitterConfig, FrequencyGrid, Normalization, Scheme, Spectrum

__all__ = [
    "Trajectory",
    "ModeComb",
    "solve_volterra",
    "spectrum_from_trajectory",
    "build_comb",
    "discretized_mode_evolve",
    "comb_trajectory",
    "compare_spectra",
    "edge_tail_amplitude",
    "edge_tail_integral",
]

TRUNCATION_THRESHOLD = 0.02  # on the residual excited population
TAIL_WINDOW = 0.75   # fit the edge tail on t in [TAIL_WINDOW * t_max, t_max]
TAIL_FIT_TOL = 0.1


@dataclass(frozen=True, eq=False)
class Trajectory:
    dt: float
    b2: np.ndarray
    t_max: float
    gamma: float
    b3: Optional[np.ndarray] = None
    edge: Optional[float] = None  # band-edge frequency when the edge is coupled

    def __post_init__(self):
        n = int(math.floor(self.t_max / self.dt + 1e-9)) + 1
        if len(self.b2) != n or (self.b3 is not None and len(self.b3) != n):
            raise ValidationError("trajectory", f"expected {n} samples")

    @property
    def t(self):
        return self.dt * np.arange(len(self.b2))

    @property
    def excited_population(self):
        pop = np.abs(self.b2) ** 2
        if self.b3 is not None:
            pop = pop + np.abs(self.b3) ** 2
        return pop

    @property
    def residual(self):
        """Excited population left at ``t_max``."""
        return float(self.excited_population[-1])


def _n_steps(t_max, dt):
    if not dt > 0:
        raise ValidationError("dt", "must be > 0")
    if not t_max > 0:
        raise ValidationError("t_max", "must be > 0")
    return int(math.floor(t_max / dt + 1e-9))


def _volterra_weights(model, g, h, n):
    """Product-integration weights for the memory integral on a uniform grid.

    The ``tau**-1/2`` factor is integrated exactly against piecewise-linear
    interpolation of ``kappa(tau) b2(t - tau)``; the bounded remainder uses the
    trapezoidal rule.
    """
    tau = h * np.arange(n + 1)
    kappa, smooth = kernel_parts(model, g, tau)
    k = np.arange(n + 1)
    a = np.sqrt(k * h)
    b = np.sqrt((k + 1) * h)
    s2 = (a + b) ** 2
    left = 2 * h * (2 * b + a) / (3 * s2)   # weight of the left node of cell k
    right = 2 * h * (b + 2 * a) / (3 * s2)  # weight of the right node of cell k
    weights = np.empty(n + 1, dtype=complex)
    weights[0] = left[0] * kappa[0] + 0.5 * h * smooth[0]
    weights[1:] = (left[1:] + right[:-1]) * kappa[1:] + h * smooth[1:]
    end = np.zeros(n + 1, dtype=complex)
    end[1:] = right[:-1] * kappa[1:] + 0.5 * h * smooth[1:]
    return weights, end


def _march(cfg, t_max, dt):
    n = _n_steps(t_max, dt)
    weights, end = _volterra_weights(cfg.model, cfg.g, dt, n)
    b2, b3 = kernels.volterra_march(weights, end, dt, cfg.gamma, cfg.omega, cfg.delta,
                                    complex(cfg.b2_0), complex(cfg.b3_0), n)
    return n, b2, b3


def solve_volterra(cfg: EmitterConfig, t_max: float = 50.0, dt: float = 0.01,
                   check_convergence: bool = False) -> Trajectory:
    """Integrate the amplitude equations with the memory kernel in the time domain.

    With ``check_convergence`` the run is repeated at ``dt / 2`` and
    :class:`StepTooLarge` is raised if ``b2`` moves by more than ``1e-3``.
    """
    n, b2, b3 = _march(cfg, t_max, dt)
    if check_convergence:
        _, fine, _ = _march(cfg, n * dt, dt / 2)
        change = float(np.max(np.abs(fine[::2] - b2)))
        if change > 1e-3:
            raise StepTooLarge(f"halving dt={dt} changes b2 by {change:.2e}")
    driven = cfg.scheme is Scheme.DRIVEN
    return Trajectory(dt, b2, n * dt, cfg.gamma, b3 if driven else None, _edge_of(cfg))


def _edge_of(cfg):
    return cfg.model.delta_g if cfg.g > 0 else None


def _trapezoid_weights(b2, dt):
    wb = b2 * dt
    wb[0] *= 0.5
    wb[-1] *= 0.5
    return wb


def _project_direct(b2, dt, points, chunk=512):
    """Trapezoidal ``int_0^T b2(t) exp(i x t) dt`` for every ``x`` in ``points``."""
    t = dt * np.arange(len(b2))
    wb = _trapezoid_weights(b2, dt)
    out = np.empty(len(points), dtype=complex)
    for start in range(0, len(points), chunk):
        x = points[start:start + chunk]
        out[start:start + chunk] = np.exp(1j * np.outer(x, t)) @ wb
    return out


def _project(b2, dt, points):
    """Same sums as :func:`_project_direct`; a chirp-z transform when ``points`` is uniform."""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return _project_direct(b2, dt, points)
    step = (points[-1] - points[0]) / (len(points) - 1)
    if step == 0 or not np.allclose(np.diff(points), step, rtol=1e-9, atol=0):
        return _project_direct(b2, dt, points)
    wb = _trapezoid_weights(b2, dt)
    return signal.czt(wb, m=len(points), w=np.exp(1j * step * dt), a=np.exp(-1j * points[0] * dt))


def edge_tail_integral(y, t_max):
    """``int_{t_max}^inf t**-1.5 exp(i y t) dt`` in closed form (Faddeeva function)."""
    y = np.asarray(y, dtype=float)
    root = np.sqrt(-1j * y + 0j)
    w = special.wofz(1j * root * math.sqrt(t_max))
    return 2 * np.exp(1j * y * t_max) * (t_max ** -0.5 - math.sqrt(math.pi) * root * w)


def edge_tail_amplitude(traj: Trajectory) -> Optional[complex]:
    """Amplitude ``A`` of the late-time tail ``b2 ~ A t**-1.5 exp(-i delta_g t)``.

    The band-edge branch point leaves this algebraic tail once the pole
    contributions have decayed.  Returns ``None`` when the edge is uncoupled or
    the late trajectory does not follow the asymptote (relative fit residual
    above ``TAIL_FIT_TOL``).
    """
    if traj.edge is None:
        return None
    t = traj.t
    sel = t >= TAIL_WINDOW * traj.t_max
    if np.count_nonzero(sel) < 8:
        return None
    ts = t[sel]
    data = traj.b2[sel] * np.exp(1j * traj.edge * ts)
    basis = ts ** -1.5
    amp = np.dot(basis, data) / np.dot(basis, basis)
    scale = np.linalg.norm(data)
    if scale == 0 or np.linalg.norm(data - amp * basis) > TAIL_FIT_TOL * scale:
        return None
    return complex(amp)


def spectrum_from_trajectory(traj: Trajectory, grid: FrequencyGrid, trapping: bool = False,
                             tail_correction: bool = True) -> Spectrum:
    """Rebuild the Raw spectrum from ``b2(t)`` by projection onto the Markovian modes.

    ``gamma |int_0^t_max b2(t) exp(i x t) dt|**2``, trapezoidal in ``t``.  With
    ``tail_correction`` the algebraic band-edge tail beyond ``t_max`` is added
    analytically (see :func:`edge_tail_amplitude`); without it the truncated
    integral converges only like ``t_max**-0.5`` right at a smoothed edge.

    Warns with :class:`TruncationWarning` if the excited population at
    ``t_max`` has not fallen below 0.02, unless the configuration is flagged as trapping.
    """
    if not trapping and traj.residual >= TRUNCATION_THRESHOLD:
        warnings.warn(TruncationWarning(traj.residual), stacklevel=2)
    points = grid.points
    amp = _project(traj.b2, traj.dt, points)
    tail = edge_tail_amplitude(traj) if tail_correction else None
    if tail is not None:
        amp = amp + tail * edge_tail_integral(points - traj.edge, traj.t_max)
    return Spectrum(grid, traj.gamma * np.abs(amp) ** 2, Normalization.RAW)


@dataclass(frozen=True, eq=False)
class ModeComb:
    """Discrete stand-in for the structured reservoir.

    ``frequencies`` / ``couplings`` hold every mode (band-edge continuum,
    Lorentzian sub-comb, discrete delta-defect mode).  ``level_shift`` is the
    real energy shift of |2> produced by the continuum beyond the sampled band.
    """

    frequencies: np.ndarray
    couplings: np.ndarray
    level_shift: float = 0.0
    defect_frequency: Optional[float] = None
    defect_coupling: Optional[float] = None

    def __post_init__(self):
        if len(self.frequencies) != len(self.couplings):
            raise ValidationError("couplings", "length differs from frequencies")
        if np.any(np.asarray(self.couplings) < 0):
            raise ValidationError("couplings", "must be >= 0")

    def __len__(self):
        return len(self.frequencies)


def _tail_shift(model, c, bandwidth):
    """Energy shift of |2> from band-edge modes above ``delta_g + bandwidth``.

    Those modes are far off resonance, so their kernel acts as a constant
    ``-i sum g_k**2 / x_k``, i.e. a level shift.
    """
    lo = bandwidth

    def f(u):
        return float(dom_density(model, model.delta_g + u)) / (u + model.delta_g)

    if lo + model.delta_g <= 0:
        raise ValidationError("comb_bandwidth", "must extend above the transition frequency")
    return -c * integrate.quad(f, lo, np.inf, epsabs=1e-12, limit=200)[0]


def build_comb(model: DomModel, g: float, spacing: float = 0.02, bandwidth: float = 40.0,
               lorentz_span: float = 10.0, lorentz_per_width: int = 40) -> ModeComb:
    """Sample the density of modes as a comb of discrete modes.

    Band-edge modes sit at bin centres on ``[delta_g, delta_g + bandwidth]``
    with ``g_k**2 = g**1.5 * int_bin rho``.  A Lorentzian defect becomes a
    sub-comb over ``delta_c +/- lorentz_span * gamma_c`` with spacing
    ``gamma_c / lorentz_per_width``; a delta defect is one mode.
    """
    if not spacing > 0:
        raise ValidationError("comb_spacing", "must be > 0")
    c = g ** 1.5
    freqs, weights = [], []
    shift = 0.0
    if c > 0:
        m = int(round(bandwidth / spacing))
        edges = spacing * np.arange(m + 1)
        mass = np.diff(dom_cumulative(model, edges))
        freqs.append(model.delta_g + 0.5 * (edges[:-1] + edges[1:]))
        weights.append(c * mass)
        shift = _tail_shift(model, c, m * spacing)
    line = defect_line(model)
    defect_freq = defect_coup = None
    if line is not None and line.kind == "delta":
        defect_freq, defect_coup = line.center, math.sqrt(line.weight)
        freqs.append(np.array([line.center]))
        weights.append(np.array([line.weight]))
    elif line is not None:
        width = 2 * line.half_width
        step = width / lorentz_per_width
        k = int(round(lorentz_span * width / step))
        edges = line.center + step * np.arange(-k, k + 1)
        cdf = np.arctan((edges - line.center) / line.half_width) / math.pi
        freqs.append(0.5 * (edges[:-1] + edges[1:]))
        weights.append(line.weight * np.diff(cdf))
    if freqs:
        frequencies = np.concatenate(freqs)
        couplings = np.sqrt(np.concatenate(weights))
    else:
        frequencies = np.zeros(0)
        couplings = np.zeros(0)
    return ModeComb(frequencies, couplings, shift, defect_freq, defect_coup)


def _markov_comb(cfg, bandwidth, spacing):
    n = int(round(2 * bandwidth / spacing))
    freqs = -bandwidth + spacing * (np.arange(n) + 0.5)
    return freqs, np.full(n, math.sqrt(cfg.gamma * spacing / (2 * math.pi)))


def _run_comb(cfg, freqs, coup, e2, t_max, dt):
    n = _n_steps(t_max, dt)
    b2, b3, modes, norm = kernels.comb_rk4(freqs, coup, e2, cfg.omega, cfg.delta,
                                           complex(cfg.b2_0), complex(cfg.b3_0),
                                           np.zeros(len(freqs), dtype=complex), dt, n)
    return n, b2, b3, modes, norm


def comb_trajectory(cfg: EmitterConfig, comb: ModeComb, t_max: float = 50.0, dt: float = 0.01) -> Trajectory:
    """Amplitudes of |2> (and |3>) with the comb as structured reservoir.

    The Markovian channel is the exact ``-gamma/2`` damping of |2>.
    """
    return _damped_comb(cfg, comb, t_max, dt)[0]


def _damped_comb(cfg, comb, t_max, dt):
    e2 = complex(comb.level_shift) - 0.5j * cfg.gamma
    n, b2, b3, _, norm = _run_comb(cfg, comb.frequencies, comb.couplings, e2, t_max, dt)
    traj = Trajectory(dt, b2, n * dt, cfg.gamma, b3 if cfg.scheme is Scheme.DRIVEN else None, _edge_of(cfg))
    return traj, norm


def discretized_mode_evolve(cfg: EmitterConfig, comb: ModeComb, grid: FrequencyGrid,
                            t_max: float = 50.0, dt: float = 0.01, full_unitarity: bool = False,
                            markov_bandwidth: float = 40.0, markov_spacing: float = 0.02,
                            norm_tol: float = 1e-6, trapping: bool = False):
    """Propagate the emitter coupled to a discrete mode comb with fixed-step RK4.

    By default the spectrum comes from projecting :func:`comb_trajectory`.
    With ``full_unitarity`` the Markovian reservoir is a flat comb too, the
    whole evolution is unitary (:class:`NormDrift` beyond ``norm_tol``), and
    the spectrum is read off the final Markovian amplitudes.  RK4 loses about
    ``(w dt)**6 / 72`` of a mode's population per step, so ``dt <= 0.1 / w_max``
    is needed to hold the norm to 1e-6 over ``t_max = 50``.

    Returns ``(spectrum, norm_history)``.  Outside full-unitarity mode the
    norm is that of emitter plus comb and decays as the Markovian channel
    absorbs probability.
    """
    if not full_unitarity:
        traj, norm = _damped_comb(cfg, comb, t_max, dt)
        return spectrum_from_trajectory(traj, grid, trapping=trapping), norm
    markov, mcoup = _markov_comb(cfg, markov_bandwidth, markov_spacing)
    freqs = np.concatenate([np.asarray(comb.frequencies, dtype=float), markov])
    coup = np.concatenate([np.asarray(comb.couplings, dtype=float), mcoup])
    _, _, _, modes, norm = _run_comb(cfg, freqs, coup, complex(comb.level_shift), t_max, dt)
    drift = float(np.max(np.abs(norm - 1.0)))
    if drift > norm_tol:
        raise NormDrift(f"norm drifted by {drift:.2e}")
    amps = np.abs(modes[len(modes) - len(markov):]) ** 2 * (2 * math.pi / markov_spacing)
    return Spectrum(grid, np.interp(grid.points, markov, amps), Normalization.RAW), norm


def compare_spectra(a: Spectrum, b: Spectrum, floor_frac: float = 0.1) -> float:
    """Largest relative difference over points within ``floor_frac`` of the peak."""
    if a.grid != b.grid:
        raise GridMismatch(f"{a.grid} != {b.grid}")
    hi = np.maximum(a.values, b.values)
    peak = float(hi.max())
    if peak == 0:
        return 0.0
    mask = hi >= floor_frac * peak
    return float(np.max(np.abs(a.values - b.values)[mask] / hi[mask]))
