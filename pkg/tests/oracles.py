"""Independent reference implementations used only by the tests.

Everything here is deliberately separate from the package code paths it
checks: high-precision (mpmath) evaluation of the closed forms, brute-force
scans, and kink-aware quadrature.
"""

import math

import mpmath as mp
from scipy.integrate import quad

mp.mp.dps = 40


def mp_rates_from_qualities(f_r_hz, q_c, q_i, chi_hz):
    """(omega_r, kappa_c, kappa_i, chi) at 40 significant digits."""
    omega_r = 2 * mp.pi * mp.mpf(f_r_hz)
    return omega_r, omega_r / mp.mpf(q_c), omega_r / mp.mpf(q_i), 2 * mp.pi * mp.mpf(chi_hz)


def mp_intracavity(omega_r, kappa_c, kappa_i, chi, sigma_z, omega_d, alpha_in=1):
    kappa = kappa_c + kappa_i
    detuning = mp.mpf(omega_d) - omega_r - chi * sigma_z
    return mp.sqrt(kappa_c / 2) * alpha_in / (mp.mpc(0, 1) * detuning + kappa / 2)


def mp_transmission(omega_r, kappa_c, kappa_i, chi, sigma_z, omega_d, alpha_in=1):
    return alpha_in - mp.sqrt(kappa_c / 2) * mp_intracavity(
        omega_r, kappa_c, kappa_i, chi, sigma_z, omega_d, alpha_in
    )


def mp_reflection(omega_r, kappa_c, kappa_i, chi, sigma_z, omega_d, alpha_in=1):
    return -mp.sqrt(kappa_c / 2) * mp_intracavity(
        omega_r, kappa_c, kappa_i, chi, sigma_z, omega_d, alpha_in
    )


def as_complex(value) -> complex:
    return complex(float(mp.re(value)), float(mp.im(value)))


def gaussian_min_overlap_quadrature(m1, s1, m2, s2):
    """Overlap integral of two unit Gaussians by kink-aware quadrature."""

    def pdf(x, m, s):
        return math.exp(-0.5 * ((x - m) / s) ** 2) / (s * math.sqrt(2.0 * math.pi))

    def min_pdf(x):
        return min(pdf(x, m1, s1), pdf(x, m2, s2))

    def diff(x):
        return pdf(x, m1, s1) - pdf(x, m2, s2)

    lo = min(m1 - 14 * s1, m2 - 14 * s2)
    hi = max(m1 + 14 * s1, m2 + 14 * s2)
    xs = [lo + (hi - lo) * k / 4000 for k in range(4001)]
    kinks = []
    for a, b in zip(xs, xs[1:]):
        if diff(a) == 0.0:
            kinks.append(a)
        elif diff(a) * diff(b) < 0:
            left, right = a, b
            for _ in range(200):
                mid = 0.5 * (left + right)
                if diff(left) * diff(mid) <= 0:
                    right = mid
                else:
                    left = mid
            kinks.append(0.5 * (left + right))
    edges = [lo] + sorted(kinks) + [hi]
    return sum(
        quad(min_pdf, a, b, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
        for a, b in zip(edges, edges[1:])
    )


def erf_series(x, terms=200):
    """erf by its Maclaurin series at high precision."""
    x = mp.mpf(x)
    total = mp.mpf(0)
    for n in range(terms):
        total += (-1) ** n * x ** (2 * n + 1) / (mp.factorial(n) * (2 * n + 1))
    return 2 / mp.sqrt(mp.pi) * total


def lambert_w_bisection(x, lo=-1.0, hi=None):
    """Solve w*exp(w) = x on the principal branch by plain bisection."""
    x = mp.mpf(x)
    if hi is None:
        hi = mp.mpf(2) if x < mp.e else mp.log(x) + 1
    lo = mp.mpf(lo)

    def f(w):
        return w * mp.e**w - x

    for _ in range(300):
        mid = (lo + hi) / 2
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def golden_section_min(f, lo, hi, iterations=200):
    """Plain golden-section minimizer (float)."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
