"""Vectorized numpy implementation of the shot-sampling kernel.

Randomness is a pure counter hash: draw ``k`` of shot ``i`` under ``seed`` is

    u = to_unit(mix64(mix64(mix64(seed) ^ mix64(i)) + k*GOLDEN))

with ``mix64`` the splitmix64 finalizer and ``to_unit`` mapping the top 53
bits into (0, 1).  Every shot owns a fixed four-draw budget (thermal flip,
relaxation jump, two noise quadratures), so any chunking of the shot range
reproduces the same records, and the compiled kernel replays the identical
integer stream (float results may differ by libm rounding only).
"""

from __future__ import annotations

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_B = 0xBF58476D1CE4E5B9
_MIX_C = 0x94D049BB133111EB
_MASK = (1 << 64) - 1
_TWO_PI = 6.283185307179586


def mix64_int(z: int) -> int:
    """splitmix64 finalizer on a python int (mod 2**64)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_B) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_C) & _MASK
    return z ^ (z >> 31)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_B)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_C)
    return z ^ (z >> np.uint64(31))


def shot_uniforms(seed: int, start: int, n: int, draw: int) -> np.ndarray:
    """Uniform draw ``draw`` in (0, 1) for shots [start, start + n)."""
    idx = np.arange(start, start + n, dtype=np.uint64)
    base = _mix64(np.uint64(mix64_int(seed)) ^ _mix64(idx))
    word = _mix64(base + np.uint64((draw * _GOLDEN) & _MASK))
    return ((word >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


_NORMAL_SPACE = 0x5851F42D4C957F2D


def standard_normals(seed: int, stream: int, n: int) -> np.ndarray:
    """``n`` standard normals from counter stream ``stream`` under ``seed``.

    The stream is folded into a derived seed, then pairs of uniforms feed
    Box-Muller; pair ``j`` plays the role of shot ``j``.  Used for
    calibration-noise trials, not for shot sampling.
    """
    sub = mix64_int(mix64_int(seed) ^ mix64_int(stream * _GOLDEN) ^ _NORMAL_SPACE)
    pairs = (n + 1) // 2
    u1 = shot_uniforms(sub, 0, pairs, 0)
    u2 = shot_uniforms(sub, 0, pairs, 1)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(_TWO_PI * u2)
    z[1::2] = r * np.sin(_TWO_PI * u2)
    return z[:n]


def simulate_quadratures(
    seed: int,
    start: int,
    prepared_excited: bool,
    p_thermal: float,
    t_m: float,
    t1: float,
    g_re: float,
    g_im: float,
    e_re: float,
    e_im: float,
    sigma: float,
    half_time: bool,
    out_true,
    out_jump,
    out_i,
    out_q,
) -> None:
    """Fill the output slices with shots [start, start + len(out_i)).

    Per shot: the prepared state flips with probability ``p_thermal``; an
    excited shot draws an exponential jump time tau (mean ``t1``) and lands
    on the ground mean when tau < t_m/2 (half-time convention) or on the
    time-weighted mixture (tau/t_m)*e + (1 - tau/t_m)*g (physical weighting);
    isotropic Gaussian noise of deviation ``sigma`` is added per quadrature.
    """
    n = len(out_i)
    u_flip = shot_uniforms(seed, start, n, 0)
    u_jump = shot_uniforms(seed, start, n, 1)
    u_noise_a = shot_uniforms(seed, start, n, 2)
    u_noise_b = shot_uniforms(seed, start, n, 3)

    excited = (u_flip < p_thermal) != bool(prepared_excited)
    tau = -t1 * np.log(u_jump)
    jumped = excited & (tau < t_m)

    if half_time:
        in_excited = excited & ~(tau < 0.5 * t_m)
        m_re = np.where(in_excited, e_re, g_re)
        m_im = np.where(in_excited, e_im, g_im)
    else:
        w = np.where(excited, np.minimum(tau / t_m, 1.0), 0.0)
        m_re = w * e_re + (1.0 - w) * g_re
        m_im = w * e_im + (1.0 - w) * g_im

    r = np.sqrt(-2.0 * np.log(u_noise_a))
    out_i[:] = m_re + sigma * (r * np.cos(_TWO_PI * u_noise_b))
    out_q[:] = m_im + sigma * (r * np.sin(_TWO_PI * u_noise_b))
    out_true[:] = excited
    out_jump[:] = np.where(jumped, tau, np.nan)
