"""Structured-reservoir density-of-modes models and their memory kernels.

All frequencies are detunings in units of the Markovian decay rate.  ``x``
denotes a reservoir frequency measured from the |2> -> |1> transition and
``delta_lambda`` a Markovian-mode frequency measured from |2> -> |0>.

The non-Markovian coupling enters every kernel as ``g**1.5``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special

from .errors import NonPositiveTau, PoleAtBandEdge, PoleAtDefect, ValidationError

__all__ = [
    "Variant",
    "DomModel",
    "DefectLine",
    "branch_sqrt",
    "kernel_laplace",
    "kernel_time",
    "kernel_parts",
    "dom_density",
    "dom_cumulative",
    "defect_line",
    "kernel_time_quadrature",
    "kernel_laplace_quadrature",
]

_SQRT_PI = math.sqrt(math.pi)
_PHASE = complex(math.cos(math.pi / 4), -math.sin(math.pi / 4))  # exp(-i pi/4)


class Variant(str, enum.Enum):
    ISOTROPIC_EDGE = "isotropic_edge"
    SMOOTHED_EDGE = "smoothed_edge"
    DELTA_DEFECT = "delta_defect"
    LORENTZIAN_DEFECT = "lorentzian_defect"


_REQUIRED = {
    Variant.ISOTROPIC_EDGE: (),
    Variant.SMOOTHED_EDGE: ("epsilon",),
    Variant.DELTA_DEFECT: ("g1", "delta_c"),
    Variant.LORENTZIAN_DEFECT: ("g1", "delta_c", "gamma_c"),
}
_OPTIONAL = ("epsilon", "g1", "delta_c", "gamma_c")


def _check_finite(name, value):
    if isinstance(value, (complex, np.complexfloating)):
        raise ValidationError(name, "must be real")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"not a real number: {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(name, "must be finite")
    return value


@dataclass(frozen=True)
class DomModel:
    """One of the four density-of-modes families.

    Use the classmethod constructors; fields that do not belong to the chosen
    variant must be left as ``None``.
    """

    variant: Variant
    delta_g: float = 0.0
    epsilon: Optional[float] = None
    g1: Optional[float] = None
    delta_c: Optional[float] = None
    gamma_c: Optional[float] = None

    def __post_init__(self):
        try:
            variant = Variant(self.variant)
        except ValueError:
            raise ValidationError("model", f"unknown variant {self.variant!r}") from None
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "delta_g", _check_finite("delta_g", self.delta_g))
        required = _REQUIRED[variant]
        for name in _OPTIONAL:
            value = getattr(self, name)
            if name in required:
                if value is None:
                    raise ValidationError(name, f"required for {variant.value}")
                object.__setattr__(self, name, _check_finite(name, value))
            elif value is not None:
                raise ValidationError(name, f"not a parameter of {variant.value}")
        if self.epsilon is not None and self.epsilon <= 0:
            # epsilon == 0 is the isotropic model; keep that limit explicit
            raise ValidationError("epsilon", "must be > 0 (use isotropic_edge for epsilon = 0)")
        if self.g1 is not None and self.g1 < 0:
            raise ValidationError("g1", "must be >= 0")
        if self.gamma_c is not None and self.gamma_c <= 0:
            raise ValidationError("gamma_c", "must be > 0")

    @classmethod
    def isotropic(cls, delta_g):
        return cls(Variant.ISOTROPIC_EDGE, delta_g)

    @classmethod
    def smoothed(cls, delta_g, epsilon):
        return cls(Variant.SMOOTHED_EDGE, delta_g, epsilon=epsilon)

    @classmethod
    def delta_defect(cls, delta_g, g1, delta_c):
        return cls(Variant.DELTA_DEFECT, delta_g, g1=g1, delta_c=delta_c)

    @classmethod
    def lorentzian_defect(cls, delta_g, g1, delta_c, gamma_c):
        return cls(Variant.LORENTZIAN_DEFECT, delta_g, g1=g1, delta_c=delta_c, gamma_c=gamma_c)

    @property
    def bare_edge(self):
        """True when the band-edge part is the unsmoothed inverse square root."""
        return self.variant is not Variant.SMOOTHED_EDGE

    @property
    def has_defect(self):
        return self.variant in (Variant.DELTA_DEFECT, Variant.LORENTZIAN_DEFECT)


@dataclass(frozen=True)
class DefectLine:
    """Defect contribution to the density of modes, kept out of the continuum.

    ``kind`` is ``"delta"`` (a single discrete mode) or ``"lorentzian"``
    (profile with half width ``half_width``).  ``weight`` is ``g1**2``.
    """

    kind: str
    center: float
    weight: float
    half_width: float = 0.0


def _coupling(g):
    g = _check_finite("g", g)
    if g < 0:
        raise ValidationError("g", "must be >= 0")
    return g ** 1.5


def branch_sqrt(x):
    """Square root of ``x + i0+`` on the principal branch.

    Nonnegative reals map to the ordinary root, negative reals to
    ``1j * sqrt(-x)``.  Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    root = np.sqrt(np.abs(x))
    out = np.where(x >= 0, root + 0j, 1j * root)
    return out[()] if out.ndim == 0 else out


def _edge_factor(model, delta_lambda):
    """Denominator of the band-edge kernel term at s -> -i delta_lambda."""
    r = branch_sqrt(np.asarray(delta_lambda, dtype=float) - model.delta_g)
    if model.variant is Variant.SMOOTHED_EDGE:
        return 1j * math.sqrt(model.epsilon) + r
    return r


def kernel_laplace(model: DomModel, g: float, delta_lambda):
    """Laplace transform of the memory kernel evaluated at ``s = -i delta_lambda``.

    Raises :class:`PoleAtBandEdge` at ``delta_lambda == delta_g`` for the
    unsmoothed edge and :class:`PoleAtDefect` at ``delta_lambda == delta_c``
    for the delta defect.
    """
    c = _coupling(g)
    x = np.asarray(delta_lambda, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValidationError("delta_lambda", "must be finite")
    q = _edge_factor(model, x)
    if model.bare_edge and np.any(x == model.delta_g):
        raise PoleAtBandEdge(f"kernel diverges at delta_lambda = delta_g = {model.delta_g}")
    value = c / q
    if model.variant is Variant.DELTA_DEFECT:
        if np.any(x == model.delta_c):
            raise PoleAtDefect(f"kernel diverges at delta_lambda = delta_c = {model.delta_c}")
        value = value + 1j * model.g1 ** 2 / (x - model.delta_c)
    elif model.variant is Variant.LORENTZIAN_DEFECT:
        value = value + model.g1 ** 2 / (1j * (model.delta_c - x) + model.gamma_c / 2)
    value = np.asarray(value, dtype=complex)
    return value[()] if value.ndim == 0 else value


def kernel_parts(model: DomModel, g: float, tau):
    """Split K(tau) = kappa(tau) / sqrt(tau) + smooth(tau).

    Both parts are bounded on tau >= 0, which is what the product-integration
    weights of the Volterra solver need.  Returns ``(kappa, smooth)``.
    """
    c = _coupling(g)
    tau = np.asarray(tau, dtype=float)
    carrier = np.exp(-1j * model.delta_g * tau)
    kappa = c * _PHASE / _SQRT_PI * carrier
    smooth = np.zeros_like(kappa)
    if model.variant is Variant.SMOOTHED_EDGE:
        eps = model.epsilon
        # exp(i eps tau) erfc(exp(i pi/4) sqrt(eps tau)) == w(exp(3i pi/4) sqrt(eps tau))
        z = np.exp(0.75j * math.pi) * np.sqrt(eps * tau)
        smooth = smooth - c * math.sqrt(eps) * carrier * special.wofz(z)
    elif model.variant is Variant.DELTA_DEFECT:
        smooth = smooth + model.g1 ** 2 * np.exp(-1j * model.delta_c * tau)
    elif model.variant is Variant.LORENTZIAN_DEFECT:
        smooth = smooth + model.g1 ** 2 * np.exp((-1j * model.delta_c - model.gamma_c / 2) * tau)
    return kappa, smooth


def kernel_time(model: DomModel, g: float, tau):
    """Memory kernel K(tau) for tau > 0."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(~(tau_arr > 0)):
        raise NonPositiveTau(f"tau must be > 0, got {tau!r}")
    kappa, smooth = kernel_parts(model, g, tau_arr)
    value = kappa / np.sqrt(tau_arr) + smooth
    return value[()] if value.ndim == 0 else value


def dom_density(model: DomModel, x):
    """Band-edge continuum density at reservoir detuning ``x``.

    Defect lines are not included; see :func:`defect_line`.
    """
    u = np.asarray(x, dtype=float) - model.delta_g
    pos = u > 0
    us = np.where(pos, u, 1.0)
    if model.variant is Variant.SMOOTHED_EDGE:
        rho = np.sqrt(us) / (model.epsilon + us) / math.pi
    else:
        rho = 1.0 / (math.pi * np.sqrt(us))
    out = np.where(pos, rho, 0.0)
    return out[()] if out.ndim == 0 else out


def dom_cumulative(model: DomModel, u):
    """Integral of the band-edge density from the edge to ``delta_g + u``."""
    u = np.maximum(np.asarray(u, dtype=float), 0.0)
    if model.variant is Variant.SMOOTHED_EDGE:
        se = math.sqrt(model.epsilon)
        return 2.0 / math.pi * (np.sqrt(u) - se * np.arctan(np.sqrt(u) / se))
    return 2.0 / math.pi * np.sqrt(u)


def defect_line(model: DomModel) -> Optional[DefectLine]:
    if model.variant is Variant.DELTA_DEFECT:
        return DefectLine("delta", model.delta_c, model.g1 ** 2)
    if model.variant is Variant.LORENTZIAN_DEFECT:
        return DefectLine("lorentzian", model.delta_c, model.g1 ** 2, model.gamma_c / 2)
    return None


# ---------------------------------------------------------------------------
# Quadrature routes.  These never touch the closed forms above and serve as
# independent checks on them.


def _edge_integrand_u(model):
    """Band-edge density as a function of u = x - delta_g (u > 0)."""
    if model.variant is Variant.SMOOTHED_EDGE:
        eps = model.epsilon
        return lambda u: math.sqrt(u) / (eps + u) / math.pi
    return lambda u: 1.0 / (math.pi * math.sqrt(u))


def _edge_tail(model, cutoff, tau):
    """Asymptotic value of int_cutoff^inf rho(u) exp(-i u tau) du.

    Three terms of repeated integration by parts; derivatives of rho are taken
    by central differences.
    """
    f = _edge_integrand_u(model)
    h = 1e-3 * cutoff
    f0 = f(cutoff)
    f1 = (f(cutoff + h) - f(cutoff - h)) / (2 * h)
    f2 = (f(cutoff + h) - 2 * f0 + f(cutoff - h)) / h ** 2
    it = 1j * tau
    return np.exp(-1j * cutoff * tau) * (f0 / it + f1 / it ** 2 + f2 / it ** 3)


def kernel_time_quadrature(model: DomModel, g: float, tau: float, cutoff: float = 400.0):
    """K(tau) by numerical integration of the density over frequency.

    The band-edge integral is split at ``u = 1``: the inverse-square-root end
    is integrated after the substitution ``u = v**2`` and the oscillatory
    stretch ``[1, cutoff]`` with QUADPACK's Fourier weights.  The remainder
    beyond ``cutoff`` is added from its asymptotic expansion.
    """
    if not tau > 0:
        raise NonPositiveTau(f"tau must be > 0, got {tau!r}")
    c = _coupling(g)
    f = _edge_integrand_u(model)
    split = min(1.0, cutoff)

    def near(v, part):
        phase = v * v * tau
        w = 2 * v * f(v * v) if v > 0 else (2.0 / math.pi if model.bare_edge else 0.0)
        return w * (math.cos(phase) if part == 0 else -math.sin(phase))

    lim = 400
    re = integrate.quad(near, 0.0, math.sqrt(split), args=(0,), limit=lim, epsabs=1e-13, epsrel=1e-12)[0]
    im = integrate.quad(near, 0.0, math.sqrt(split), args=(1,), limit=lim, epsabs=1e-13, epsrel=1e-12)[0]
    if cutoff > split:
        re += integrate.quad(f, split, cutoff, weight="cos", wvar=tau, limit=lim, epsabs=1e-13)[0]
        im -= integrate.quad(f, split, cutoff, weight="sin", wvar=tau, limit=lim, epsabs=1e-13)[0]
    edge = complex(re, im) + _edge_tail(model, cutoff, tau)
    value = c * np.exp(-1j * model.delta_g * tau) * edge

    line = defect_line(model)
    if line is not None and line.kind == "delta":
        value += line.weight * np.exp(-1j * line.center * tau)
    elif line is not None:
        hw = line.half_width

        def lor(y):
            return hw / math.pi / (y * y + hw * hw)

        # symmetric profile: only the cosine transform survives
        ft = 2 * integrate.quad(lor, 0.0, np.inf, weight="cos", wvar=tau, limlst=200)[0]
        value += line.weight * np.exp(-1j * line.center * tau) * ft
    return complex(value)


def _pv_edge(model, x):
    """Principal value of int_0^inf rho(u) / (u - x) du (band-edge part)."""
    if model.variant is Variant.SMOOTHED_EDGE:
        eps = model.epsilon
        # u = v**2: 2 v rho(v**2) = 2 v**2 / (pi (eps + v**2))
        num = lambda v: 2 * v * v / (math.pi * (eps + v * v))  # noqa: E731
    else:
        num = lambda v: 2.0 / math.pi  # noqa: E731
    if x <= 0:
        a = math.sqrt(-x)
        val = integrate.quad(lambda v: num(v) / (v * v + a * a), 0.0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
        return val
    a = math.sqrt(x)
    b = 2 * a + 1.0
    # 1/(v^2 - a^2) = 1/((v - a)(v + a)); QUADPACK handles the 1/(v - a) pole
    head = integrate.quad(lambda v: num(v) / (v + a), 0.0, b, weight="cauchy", wvar=a,
                          epsabs=1e-13, epsrel=1e-12)[0]
    tail = integrate.quad(lambda v: num(v) / (v * v - a * a), b, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    return head + tail


def kernel_laplace_quadrature(model: DomModel, g: float, delta_lambda: float):
    """Kernel transform at s -> -i delta_lambda + 0 from the density by quadrature.

    With vanishing damping the transform is ``pi * rho(x) - i PV int rho(u)/(u - x)``.
    """
    c = _coupling(g)
    x = float(delta_lambda) - model.delta_g
    rho = float(dom_density(model, delta_lambda))
    value = c * complex(math.pi * rho, -_pv_edge(model, x))
    line = defect_line(model)
    if line is not None and line.kind == "delta":
        if delta_lambda == line.center:
            raise PoleAtDefect("discrete defect mode is resonant")
        value += 1j * line.weight / (delta_lambda - line.center)
    elif line is not None:
        hw = line.half_width
        y0 = delta_lambda - line.center
        # PV of the Lorentzian Hilbert transform, done on a finite window plus tails
        lor = lambda y: hw / math.pi / (y * y + hw * hw)  # noqa: E731
        span = abs(y0) + 50 * hw
        pv = integrate.quad(lor, -span, span, weight="cauchy", wvar=y0, limit=400)[0]
        pv += integrate.quad(lambda y: lor(y) / (y - y0), span, np.inf)[0]
        pv += integrate.quad(lambda y: lor(y) / (y - y0), -np.inf, -span)[0]
        value += line.weight * complex(math.pi * lor(y0), -pv)
    return value
