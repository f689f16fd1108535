# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-operator hot kernels (fused elementwise phase loops)."""

cdef extern from "math.h" nogil:
    void sincos(double x, double *s, double *c)


def potential_half_step(double complex[::1] up, double complex[::1] down,
                        const double[::1] x, double x0,
                        double harm_coeff, double g_coeff):
    cdef Py_ssize_t i, n = up.shape[0]
    cdef double dx, arg, s, c
    cdef double complex u, d, ph
    with nogil:
        for i in range(n):
            u = up[i]
            d = down[i]
            dx = x[i] - x0
            arg = harm_coeff * dx * dx
            if g_coeff != 0.0:
                arg += g_coeff * (u.real * u.real + u.imag * u.imag
                                  + d.real * d.real + d.imag * d.imag)
            sincos(arg, &s, &c)
            ph = c - 1j * s
            up[i] = u * ph
            down[i] = d * ph


def kinetic_soc_step(double complex[::1] up_k, double complex[::1] down_k,
                     const double complex[::1] kin_phase,
                     const double[::1] k, double soc_coeff):
    cdef Py_ssize_t i, n = up_k.shape[0]
    cdef double s, c
    cdef double complex kp, soc
    with nogil:
        for i in range(n):
            sincos(soc_coeff * k[i], &s, &c)
            kp = kin_phase[i]
            soc = c - 1j * s
            up_k[i] = up_k[i] * kp * soc
            # conjugate soc phase for the down component
            soc = c + 1j * s
            down_k[i] = down_k[i] * kp * soc
