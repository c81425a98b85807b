"""Pure-Python/numpy implementations of the time-stepping kernels.

Same signatures and results as the compiled ``_kernels`` extension; used when
the extension is not built or ``PBGSPEC_PURE_PYTHON`` is set.
"""
import numpy as np


def volterra_march(weights, end_weights, h, gamma, omega, delta, b2_0, b3_0, n_steps):
    """Implicit trapezoidal march of the driven amplitude equations with memory.

    The memory integral at step ``n`` is
    ``weights[0] * b2[n] + sum_{m=1}^{n-1} weights[m] * b2[n-m] + end_weights[n] * b2[0]``.
    Returns ``(b2, b3)`` of length ``n_steps + 1``.
    """
    weights = np.ascontiguousarray(weights, dtype=complex)
    end_weights = np.ascontiguousarray(end_weights, dtype=complex)
    b2 = np.empty(n_steps + 1, dtype=complex)
    b3 = np.empty(n_steps + 1, dtype=complex)
    b2[0] = b2_0
    b3[0] = b3_0
    hh = 0.5 * h
    w0 = weights[0]
    # 2x2 system matrix, constant in time
    a11 = 1 + hh * 1j * delta
    a12 = hh * 1j * omega
    a21 = hh * 1j * omega
    a22 = 1 + hh * (0.5 * gamma + w0)
    det = a11 * a22 - a12 * a21
    f3 = -1j * (delta * b3_0 + omega * b2_0)
    f2 = -1j * omega * b3_0 - 0.5 * gamma * b2_0  # memory integral vanishes at t = 0
    for n in range(1, n_steps + 1):
        hist = end_weights[n] * b2[0]
        if n > 1:
            hist += np.dot(weights[1:n], b2[n - 1:0:-1])
        r3 = b3[n - 1] + hh * f3
        r2 = b2[n - 1] + hh * f2 - hh * hist
        y3 = (a22 * r3 - a12 * r2) / det
        y2 = (a11 * r2 - a21 * r3) / det
        b3[n] = y3
        b2[n] = y2
        f3 = -1j * (delta * y3 + omega * y2)
        f2 = -1j * omega * y3 - 0.5 * gamma * y2 - (w0 * y2 + hist)
    return b2, b3


def comb_rk4(freqs, couplings, e2, omega, delta, b2_0, b3_0, modes_0, dt, n_steps):
    """Classical RK4 for |3>, |2> and a comb of modes coupled to |2>.

    ``i d/dt b3 = delta b3 + omega b2``,
    ``i d/dt b2 = omega b3 + e2 b2 + sum_j g_j c_j``,
    ``i d/dt c_j = w_j c_j + g_j b2``.

    Returns ``(b2, b3, modes, norm)``: amplitude histories of length
    ``n_steps + 1``, the final mode amplitudes and the total norm per step.
    """
    w = np.ascontiguousarray(freqs, dtype=float)
    g = np.ascontiguousarray(couplings, dtype=float)
    c = np.array(modes_0, dtype=complex)
    b2 = np.empty(n_steps + 1, dtype=complex)
    b3 = np.empty(n_steps + 1, dtype=complex)
    norm = np.empty(n_steps + 1)
    y2, y3 = complex(b2_0), complex(b3_0)
    b2[0], b3[0] = y2, y3
    norm[0] = abs(y2) ** 2 + abs(y3) ** 2 + np.vdot(c, c).real
    mi = -1j

    def rhs(y3, y2, c):
        d3 = mi * (delta * y3 + omega * y2)
        d2 = mi * (omega * y3 + e2 * y2 + np.dot(g, c))
        dc = mi * (w * c + g * y2)
        return d3, d2, dc

    half = 0.5 * dt
    for n in range(1, n_steps + 1):
        k3a, k2a, kca = rhs(y3, y2, c)
        k3b, k2b, kcb = rhs(y3 + half * k3a, y2 + half * k2a, c + half * kca)
        k3c, k2c, kcc = rhs(y3 + half * k3b, y2 + half * k2b, c + half * kcb)
        k3d, k2d, kcd = rhs(y3 + dt * k3c, y2 + dt * k2c, c + dt * kcc)
        y3 = y3 + dt / 6 * (k3a + 2 * k3b + 2 * k3c + k3d)
        y2 = y2 + dt / 6 * (k2a + 2 * k2b + 2 * k2c + k2d)
        c = c + dt / 6 * (kca + 2 * kcb + 2 * kcc + kcd)
        b2[n], b3[n] = y2, y3
        norm[n] = abs(y2) ** 2 + abs(y3) ** 2 + np.vdot(c, c).real
    return b2, b3, c, norm
