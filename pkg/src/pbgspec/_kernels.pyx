# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels; see ``_kernels_py`` for the reference versions."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def volterra_march(weights, end_weights, double h, double gamma, double omega, double delta,
                   double complex b2_0, double complex b3_0, Py_ssize_t n_steps):
    w_arr = np.ascontiguousarray(weights, dtype=complex)
    cdef double[::1] wr = np.ascontiguousarray(w_arr.real)
    cdef double[::1] wi = np.ascontiguousarray(w_arr.imag)
    cdef double complex[::1] we = np.ascontiguousarray(end_weights, dtype=complex)
    out2 = np.empty(n_steps + 1, dtype=complex)
    out3 = np.empty(n_steps + 1, dtype=complex)
    cdef double complex[::1] b2 = out2
    cdef double complex[::1] b3 = out3
    # b2 history stored reversed (newest last) as split real/imaginary parts,
    # so the memory sum runs over two unit-stride arrays
    rev = np.zeros((2, n_steps + 1))
    cdef double[::1] rr = rev[0], ri = rev[1]
    cdef double hh = 0.5 * h
    cdef double complex I = 1j
    cdef double complex w0 = w_arr[0]
    cdef double complex a11 = 1 + hh * I * delta
    cdef double complex a12 = hh * I * omega
    cdef double complex a21 = hh * I * omega
    cdef double complex a22 = 1 + hh * (0.5 * gamma + w0)
    cdef double complex det = a11 * a22 - a12 * a21
    cdef double complex f3 = -I * (delta * b3_0 + omega * b2_0)
    cdef double complex f2 = -I * omega * b3_0 - 0.5 * gamma * b2_0
    cdef double complex hist, r3, r2, y3, y2
    cdef double s0, s1, s2, s3
    cdef Py_ssize_t n, m, top = n_steps
    b2[0] = b2_0
    b3[0] = b3_0
    with nogil:
        for n in range(1, n_steps + 1):
            # sum_{m=1}^{n-1} w[m] b2[n-m]; b2[k] sits at rr[top - k]
            s0 = 0
            s1 = 0
            s2 = 0
            s3 = 0
            for m in range(1, n):
                s0 = s0 + wr[m] * rr[top - n + m]
                s1 = s1 + wi[m] * ri[top - n + m]
                s2 = s2 + wr[m] * ri[top - n + m]
                s3 = s3 + wi[m] * rr[top - n + m]
            hist = we[n] * b2[0] + ((s0 - s1) + I * (s2 + s3))
            r3 = b3[n - 1] + hh * f3
            r2 = b2[n - 1] + hh * f2 - hh * hist
            y3 = (a22 * r3 - a12 * r2) / det
            y2 = (a11 * r2 - a21 * r3) / det
            b3[n] = y3
            b2[n] = y2
            rr[top - n] = y2.real
            ri[top - n] = y2.imag
            f3 = -I * (delta * y3 + omega * y2)
            f2 = -I * omega * y3 - 0.5 * gamma * y2 - (w0 * y2 + hist)
    return out2, out3


cdef inline void _stage(const double[::1] w, const double[::1] g, Py_ssize_t m,
                        const double[::1] cr, const double[::1] ci,
                        const double[::1] br, const double[::1] bi, double scale,
                        double y2r, double y2i, double[::1] kr, double[::1] ki,
                        double *accr, double *acci) noexcept nogil:
    """Mode derivatives at c = cr + scale * br (likewise imaginary parts).

    ``dc_j = -i (w_j c_j + g_j y2)``; also returns ``sum_j g_j c_j``.
    """
    cdef double ar = 0, ai = 0, xr, xi
    cdef Py_ssize_t j
    for j in range(m):
        xr = cr[j] + scale * br[j]
        xi = ci[j] + scale * bi[j]
        ar += g[j] * xr
        ai += g[j] * xi
        kr[j] = w[j] * xi + g[j] * y2i
        ki[j] = -(w[j] * xr + g[j] * y2r)
    accr[0] = ar
    acci[0] = ai


cdef inline void _emitter(double delta, double omega, double complex e2, double complex y3,
                          double complex y2, double accr, double acci,
                          double complex *d3, double complex *d2) noexcept nogil:
    d3[0] = -1j * (delta * y3 + omega * y2)
    d2[0] = -1j * (omega * y3 + e2 * y2 + (accr + 1j * acci))


def comb_rk4(freqs, couplings, double complex e2, double omega, double delta,
             double complex b2_0, double complex b3_0, modes_0, double dt, Py_ssize_t n_steps):
    cdef const double[::1] w = np.ascontiguousarray(freqs, dtype=float)
    cdef const double[::1] g = np.ascontiguousarray(couplings, dtype=float)
    cdef Py_ssize_t m = w.shape[0]
    c0 = np.asarray(modes_0, dtype=complex)
    cdef double[::1] cr = np.ascontiguousarray(c0.real, dtype=float)
    cdef double[::1] ci = np.ascontiguousarray(c0.imag, dtype=float)
    work = np.zeros((8, m))
    cdef double[::1] ar = work[0], ai = work[1], br = work[2], bi = work[3]
    cdef double[::1] cr_ = work[4], ci_ = work[5], dr = work[6], di = work[7]
    out2 = np.empty(n_steps + 1, dtype=complex)
    out3 = np.empty(n_steps + 1, dtype=complex)
    outn = np.empty(n_steps + 1)
    cdef double complex[::1] b2 = out2
    cdef double complex[::1] b3 = out3
    cdef double[::1] norm = outn
    cdef double complex y2 = b2_0, y3 = b3_0
    cdef double complex k3a, k3b, k3c, k3d, k2a, k2b, k2c, k2d, t2
    cdef double half = 0.5 * dt, sixth = dt / 6.0, s, sr, si
    cdef Py_ssize_t n, j

    with nogil:
        s = y2.real * y2.real + y2.imag * y2.imag + y3.real * y3.real + y3.imag * y3.imag
        for j in range(m):
            s = s + cr[j] * cr[j] + ci[j] * ci[j]
        b2[0] = y2
        b3[0] = y3
        norm[0] = s
        for n in range(1, n_steps + 1):
            # stage a at c; b at c + dt/2 ka; c at c + dt/2 kb; d at c + dt kc
            _stage(w, g, m, cr, ci, cr, ci, 0.0, y2.real, y2.imag, ar, ai, &sr, &si)
            _emitter(delta, omega, e2, y3, y2, sr, si, &k3a, &k2a)
            t2 = y2 + half * k2a
            _stage(w, g, m, cr, ci, ar, ai, half, t2.real, t2.imag, br, bi, &sr, &si)
            _emitter(delta, omega, e2, y3 + half * k3a, t2, sr, si, &k3b, &k2b)
            t2 = y2 + half * k2b
            _stage(w, g, m, cr, ci, br, bi, half, t2.real, t2.imag, cr_, ci_, &sr, &si)
            _emitter(delta, omega, e2, y3 + half * k3b, t2, sr, si, &k3c, &k2c)
            t2 = y2 + dt * k2c
            _stage(w, g, m, cr, ci, cr_, ci_, dt, t2.real, t2.imag, dr, di, &sr, &si)
            _emitter(delta, omega, e2, y3 + dt * k3c, t2, sr, si, &k3d, &k2d)
            y3 = y3 + sixth * (k3a + 2 * k3b + 2 * k3c + k3d)
            y2 = y2 + sixth * (k2a + 2 * k2b + 2 * k2c + k2d)
            s = y2.real * y2.real + y2.imag * y2.imag + y3.real * y3.real + y3.imag * y3.imag
            for j in range(m):
                cr[j] = cr[j] + sixth * (ar[j] + 2 * br[j] + 2 * cr_[j] + dr[j])
                ci[j] = ci[j] + sixth * (ai[j] + 2 * bi[j] + 2 * ci_[j] + di[j])
                s = s + cr[j] * cr[j] + ci[j] * ci[j]
            b2[n] = y2
            b3[n] = y3
            norm[n] = s
    return out2, out3, np.asarray(cr) + 1j * np.asarray(ci), outn
