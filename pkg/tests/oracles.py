"""Slow, independent reference implementations used only by the tests."""

import math


def rms_delay_spread_pairwise(delays, powers):
    """RMS delay spread from the pairwise identity var = sum_ij p_i p_j (t_i - t_j)^2 / (2 P^2)."""
    total = math.fsum(powers)
    acc = math.fsum(
        pi * pj * (ti - tj) ** 2
        for ti, pi in zip(delays, powers)
        for tj, pj in zip(delays, powers)
    )
    return math.sqrt(acc / (2.0 * total * total))


def _wrap(a):
    """Wrap to (-180, 180] with plain arithmetic."""
    while a > 180.0:
        a -= 360.0
    while a <= -180.0:
        a += 360.0
    return a


def circular_spread_bruteforce(angles, powers, step=0.1):
    """Minimum over shifts (step grid on [-180, 180)) of the wrapped weighted RMS spread."""
    total = math.fsum(powers)
    best = math.inf
    n_steps = int(round(360.0 / step))
    for k in range(n_steps):
        shift = -180.0 + k * step
        shifted = [_wrap(a + shift) for a in angles]
        mean = math.fsum(p * a for a, p in zip(shifted, powers)) / total
        var = math.fsum(p * _wrap(a - mean) ** 2 for a, p in zip(shifted, powers)) / total
        best = min(best, var)
    return math.sqrt(best)


def truncated_poisson_moments(mu, lo, hi, kmax=100):
    """Mean and variance of min(hi, max(lo, K)) for K ~ Poisson(mu), by summing the pmf."""
    pmf = [math.exp(-mu) * mu ** k / math.factorial(k) for k in range(kmax)]
    vals = [min(hi, max(lo, k)) for k in range(kmax)]
    m1 = math.fsum(p * v for p, v in zip(pmf, vals))
    m2 = math.fsum(p * v * v for p, v in zip(pmf, vals))
    return m1, m2 - m1 * m1
