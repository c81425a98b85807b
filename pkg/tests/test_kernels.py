import os
import subprocess
import sys

import numpy as np
import pytest

from pbgspec import _backend
from pbgspec.oracle import _volterra_weights, build_comb
from pbgspec.reservoir import DomModel

compiled = pytest.mark.skipif(_backend.compiled_kernels is None, reason="extension not built")


def _volterra_inputs(n=400, h=0.02):
    w, end = _volterra_weights(DomModel.lorentzian_defect(0.3, 1.0, -2.0, 1.0), 1.0, h, n)
    return w, end, h


def _comb_inputs():
    comb = build_comb(DomModel.smoothed(0.0, 0.3), 1.0, spacing=0.2, bandwidth=10.0)
    return comb.frequencies, comb.couplings, complex(comb.level_shift) - 0.5j


@compiled
@pytest.mark.parametrize("omega, delta, b2_0, b3_0", [(0.0, 0.0, 1.0, 0.0), (1.0, -1.5, 0.6, 0.8)])
def test_volterra_parity(omega, delta, b2_0, b3_0):
    w, end, h = _volterra_inputs()
    args = (w, end, h, 1.0, omega, delta, complex(b2_0), complex(b3_0), 400)
    py = _backend.python_kernels.volterra_march(*args)
    cy = _backend.compiled_kernels.volterra_march(*args)
    for a, b in zip(py, cy):
        np.testing.assert_allclose(b, a, rtol=0, atol=1e-13)


@compiled
def test_comb_parity():
    freqs, coup, e2 = _comb_inputs()
    args = (freqs, coup, e2, 1.0, -1.5, 1 + 0j, 0j, np.zeros(len(freqs), dtype=complex), 0.01, 300)
    py = _backend.python_kernels.comb_rk4(*args)
    cy = _backend.compiled_kernels.comb_rk4(*args)
    for a, b in zip(py, cy):
        np.testing.assert_allclose(b, a, rtol=0, atol=1e-12)


def test_comb_does_not_mutate_initial_modes():
    freqs, coup, e2 = _comb_inputs()
    modes = np.zeros(len(freqs), dtype=complex)
    _backend.kernels.comb_rk4(freqs, coup, e2, 0.0, 0.0, 1 + 0j, 0j, modes, 0.01, 10)
    assert not modes.any()


def test_pure_python_switch():
    env = dict(os.environ, PBGSPEC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import pbgspec; print(pbgspec.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
