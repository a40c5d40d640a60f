# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-shot sampling kernel.

Replays the same splitmix64 counter streams as the numpy fallback (see
``numpy_backend``): draw ``k`` of shot ``i`` under ``seed`` is
mix64(mix64(mix64(seed) ^ mix64(i)) + k*GOLDEN) mapped into (0, 1).
"""

from libc.math cimport cos, log, sin, sqrt, NAN

cdef extern from *:
    """
    static const unsigned long long HS_GOLDEN = 0x9E3779B97F4A7C15ULL;
    static const unsigned long long HS_MIX_B  = 0xBF58476D1CE4E5B9ULL;
    static const unsigned long long HS_MIX_C  = 0x94D049BB133111EBULL;
    """
    const unsigned long long HS_GOLDEN
    const unsigned long long HS_MIX_B
    const unsigned long long HS_MIX_C

cdef double TWO_PI = 6.283185307179586


cdef inline unsigned long long mix64(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * HS_MIX_B
    z = (z ^ (z >> 27)) * HS_MIX_C
    return z ^ (z >> 31)


cdef inline double to_unit(unsigned long long word) nogil:
    return (<double>(word >> 11) + 0.5) * (2.0 ** -53)


cdef inline double uniform(unsigned long long base, unsigned long long draw) nogil:
    return to_unit(mix64(base + draw * HS_GOLDEN))


def shot_uniforms(unsigned long long seed, unsigned long long start, Py_ssize_t n,
                  unsigned long long draw):
    """Uniform draw ``draw`` for shots [start, start + n), matching the fallback."""
    import numpy as np
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef unsigned long long mixed_seed = mix64(seed)
    cdef Py_ssize_t j
    for j in range(n):
        view[j] = uniform(mix64(mixed_seed ^ mix64(start + <unsigned long long>j)), draw)
    return out


def simulate_quadratures(unsigned long long seed, unsigned long long start,
                         bint prepared_excited, double p_thermal,
                         double t_m, double t1,
                         double g_re, double g_im, double e_re, double e_im,
                         double sigma, bint half_time,
                         unsigned char[::1] out_true, double[::1] out_jump,
                         double[::1] out_i, double[::1] out_q):
    """Fill the output slices with shots [start, start + len(out_i)).

    Same sampling model as ``numpy_backend.simulate_quadratures``.
    """
    cdef Py_ssize_t n = out_i.shape[0]
    cdef unsigned long long mixed_seed = mix64(seed)
    cdef unsigned long long base
    cdef Py_ssize_t j
    cdef double u_flip, u_jump, u_a, u_b, tau, w, m_re, m_im, r
    cdef bint excited
    with nogil:
        for j in range(n):
            base = mix64(mixed_seed ^ mix64(start + <unsigned long long>j))
            u_flip = uniform(base, 0)
            u_jump = uniform(base, 1)
            u_a = uniform(base, 2)
            u_b = uniform(base, 3)

            excited = (u_flip < p_thermal) != prepared_excited
            tau = -t1 * log(u_jump)

            if half_time:
                if excited and not (tau < 0.5 * t_m):
                    m_re = e_re
                    m_im = e_im
                else:
                    m_re = g_re
                    m_im = g_im
            else:
                if excited:
                    w = tau / t_m
                    if w > 1.0:
                        w = 1.0
                else:
                    w = 0.0
                m_re = w * e_re + (1.0 - w) * g_re
                m_im = w * e_im + (1.0 - w) * g_im

            r = sqrt(-2.0 * log(u_a))
            out_i[j] = m_re + sigma * (r * cos(TWO_PI * u_b))
            out_q[j] = m_im + sigma * (r * sin(TWO_PI * u_b))
            out_true[j] = 1 if excited else 0
            out_jump[j] = tau if (excited and tau < t_m) else NAN
