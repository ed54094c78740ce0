"""Independent reference oracles used only by the test suite.

Nothing here shares code with the package under test: erf comes from
its alternating Maclaurin series (|x| <= 2) and the complementary
continued fraction (beyond), evaluated to 1e-12; the exact per-trial
error probabilities of the samplers come from direct quadrature of the
Beta density and from the closed-form overlap of two uniforms.
"""

from __future__ import annotations

import math


def erf_oracle(x: float) -> float:
    """Reference erf: Maclaurin series for |x| <= 2, erfc continued
    fraction beyond, both converged to ~1e-15."""
    if x < 0.0:
        return -erf_oracle(-x)
    if x <= 2.0:
        total = 0.0
        term = x
        n = 0
        while True:
            contribution = term / (2 * n + 1)
            total += contribution
            if abs(contribution) < 1e-17 * max(1.0, abs(total)):
                break
            n += 1
            term *= -x * x / n
        return 2.0 / math.sqrt(math.pi) * total
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    tail = 0.0
    for k in range(200, 0, -1):
        tail = (k / 2.0) / (x + tail)
    erfc = math.exp(-x * x) / math.sqrt(math.pi) / (x + tail)
    return 1.0 - erfc


def normal_cdf_oracle(z: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    return 0.5 * (1.0 + erf_oracle((z - mu) / (sigma * math.sqrt(2.0))))


def beta_cdf_oracle(x: float, alpha: float, beta: float, panels: int = 200_000) -> float:
    """P(Beta(alpha, beta) <= x) by composite Simpson quadrature.

    Adequate for alpha, beta >= 1 (bounded density); accuracy far beyond
    the Monte Carlo tolerances it is compared against.
    """
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_norm = math.lgamma(alpha + beta) - math.lgamma(alpha) - math.lgamma(beta)

    def density(t: float) -> float:
        if t <= 0.0 or t >= 1.0:
            return 0.0
        return math.exp(log_norm + (alpha - 1.0) * math.log(t) + (beta - 1.0) * math.log1p(-t))

    h = x / panels
    total = density(0.0) + density(x)
    for i in range(1, panels):
        total += density(i * h) * (4 if i % 2 else 2)
    return total * h / 3.0


def uniform_greater_prob(lo1: float, hi1: float, lo2: float, hi2: float) -> float:
    """P(U1 >= U2) for independent U1 ~ U[lo1, hi1], U2 ~ U[lo2, hi2].

    Integrates P(U1 >= u) = clamp((hi1 - u)/(hi1 - lo1), 0, 1) over the
    support of U2, splitting at the clamp breakpoints (exact).
    """
    width1 = hi1 - lo1
    points = sorted({lo2, hi2, min(max(lo1, lo2), hi2), min(max(hi1, lo2), hi2)})
    total = 0.0
    for a, b in zip(points, points[1:]):
        mid = 0.5 * (a + b)
        if mid <= lo1:
            total += b - a
        elif mid < hi1:
            # integral of (hi1 - u)/width1 over [a, b]
            total += ((hi1 - a) ** 2 - (hi1 - b) ** 2) / (2.0 * width1)
    return total / (hi2 - lo2)
