"""Samplers that realize a NoiseSpec, on reproducible counter-based streams.

Three estimator families are provided: a moment-matched Beta for the
state probability, a positivity-truncated Uniform for costs, and Normal
variants of both (the probability one clipped to [0, 1]). A fourth
sampler draws the estimated loss gap directly from its assumed normal
distribution, which is the oracle mode the Monte Carlo engine uses to
validate the closed-form approximation.

Randomness comes from Philox, a counter-based generator: every draw is a
pure function of (master_seed, stream_id, counter), so distinct
(stream_id, counter) pairs yield independent, non-overlapping streams
and any degree of parallelism reproduces the same numbers.

Adjustments that could bias a sampler are counted, never hidden: clipped
normal probability draws, rejected nonpositive cost draws, and Beta
variance clamping are all reported through ``SampleStats`` or the
``clamped`` flag on ``BetaParams``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decision_core import COST_FAMILIES, P_FAMILIES

__all__ = [
    "BetaParams",
    "RngStream",
    "SampleStats",
    "SamplerExhaustionError",
    "beta_params_from_moments",
    "sample_cost_hat",
    "sample_delta_hat_direct",
    "sample_p_hat",
]

_U64_MAX = 2 ** 64 - 1

# Rejection resampling gives up after this many rounds; with positive
# cost means the acceptance probability per round is bounded away from
# zero, so hitting the bound signals a degenerate configuration.
_MAX_REJECTION_ROUNDS = 1000


class SamplerExhaustionError(RuntimeError):
    """Rejection resampling failed to produce a valid draw."""


def _require_u64(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if not 0 <= value <= _U64_MAX:
        raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")
    return value


@dataclass(frozen=True, slots=True)
class RngStream:
    """Address of an independent random stream.

    The draw sequence is a pure function of the triple. ``stream_id``
    separates top-level consumers (one per sweep cell); ``counter``
    separates buckets within a consumer (one per trial block and
    sampler). Internally the pair (master_seed, stream_id) forms the
    128-bit Philox key and ``counter`` is placed in the third 64-bit
    counter word, leaving 2^128 values of headroom per bucket, so
    buckets can never overlap however many values each consumes.
    """

    master_seed: int
    stream_id: int = 0
    counter: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "master_seed", _require_u64(self.master_seed, "master_seed"))
        object.__setattr__(self, "stream_id", _require_u64(self.stream_id, "stream_id"))
        object.__setattr__(self, "counter", _require_u64(self.counter, "counter"))

    def with_counter(self, counter: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_id, counter)

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this bucket."""
        # Explicit uint64 arrays: a plain int list would round-trip
        # through float64 and corrupt values near 2^64.
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        counter = np.array([0, 0, self.counter, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))


@dataclass(slots=True)
class SampleStats:
    """Mutable tally of sampler adjustments for one run.

    ``clipped`` counts normal probability draws pulled back into [0, 1];
    ``truncated`` counts rejected nonpositive cost draws (each redraw
    event counts once).
    """

    clipped: int = 0
    truncated: int = 0

    def merge(self, other: "SampleStats") -> None:
        self.clipped += other.clipped
        self.truncated += other.truncated


@dataclass(frozen=True, slots=True)
class BetaParams:
    """Beta(alpha, beta) parameters, with a flag when the variance target
    was infeasible and had to be reduced."""

    alpha: float
    beta: float
    clamped: bool = False

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        s = self.alpha + self.beta
        return self.alpha * self.beta / (s * s * (s + 1.0))


def beta_params_from_moments(mean: float, variance: float) -> BetaParams:
    """Beta parameters with the given mean and variance (moment matching).

    A Beta on (0, 1) cannot have variance >= mean * (1 - mean); such
    requests are clamped to 0.99 of that bound and flagged rather than
    rejected, so parameter sweeps stay total. Means of exactly 0 or 1
    are rejected: no Beta with positive variance exists there (callers
    use the ``exact`` family instead).
    """
    mean = float(mean)
    variance = float(variance)
    if not 0.0 < mean < 1.0:
        raise ValueError(f"Beta moment matching requires 0 < mean < 1, got {mean}")
    if not variance > 0.0:
        raise ValueError(f"Beta moment matching requires variance > 0, got {variance}")
    # Grouped as m - m*m (not m*(1-m)): keeps round cases like
    # (0.2, 0.01) -> (3, 12) exact in floating point.
    bound = mean - mean * mean
    clamped = False
    if variance >= bound:
        variance = 0.99 * bound
        clamped = True
    k = bound / variance - 1.0
    return BetaParams(alpha=mean * k, beta=(1.0 - mean) * k, clamped=clamped)


def _as_output(draws: np.ndarray, size: int | None) -> float | np.ndarray:
    return float(draws[0]) if size is None else draws


def sample_p_hat(
    p0: float,
    sigma_p: float,
    family: str,
    rng: RngStream,
    size: int | None = None,
    stats: SampleStats | None = None,
) -> float | np.ndarray:
    """Draw state-probability estimates around p0.

    ``exact`` returns p0 itself; ``beta`` draws from the moment-matched
    Beta (variance clamped if infeasible); ``normal`` draws from
    Normal(p0, sigma_p^2) clipped to [0, 1], counting clip events in
    ``stats``. Returns a scalar when ``size`` is None, else an array of
    that length.
    """
    if family not in P_FAMILIES:
        raise ValueError(f"family must be one of {P_FAMILIES}, got {family!r}")
    n = 1 if size is None else int(size)
    if family == "exact":
        return p0 if size is None else np.full(n, float(p0))
    g = rng.generator()
    if family == "beta":
        if sigma_p > 0.0 and not 0.0 < p0 < 1.0:
            raise ValueError(
                f"beta family requires 0 < p0 < 1 when sigma_p > 0, got p0={p0}"
            )
        params = beta_params_from_moments(p0, sigma_p ** 2)
        draws = g.beta(params.alpha, params.beta, size=n)
        return _as_output(draws, size)
    # normal family, clipped to the probability simplex
    draws = g.normal(p0, sigma_p, size=n)
    out_of_range = (draws < 0.0) | (draws > 1.0)
    if stats is not None:
        stats.clipped += int(out_of_range.sum())
    np.clip(draws, 0.0, 1.0, out=draws)
    return _as_output(draws, size)


def sample_cost_hat(
    c: float,
    sigma_c: float,
    family: str,
    rng: RngStream,
    size: int | None = None,
    stats: SampleStats | None = None,
) -> float | np.ndarray:
    """Draw positive cost estimates around c.

    ``uniform-truncated`` draws uniformly on [c - sigma_c*sqrt(3),
    c + sigma_c*sqrt(3)] (the uniform with standard deviation sigma_c)
    and rejection-resamples any nonpositive draw; ``normal`` applies the
    same positivity rejection to Normal(c, sigma_c^2) draws. Rejected
    draws are counted in ``stats``; after 1000 rounds of rejection a
    SamplerExhaustionError is raised.
    """
    if family not in COST_FAMILIES:
        raise ValueError(f"family must be one of {COST_FAMILIES}, got {family!r}")
    c = float(c)
    if not c > 0.0:
        raise ValueError(f"cost mean must be > 0, got {c}")
    n = 1 if size is None else int(size)
    if family == "exact" or sigma_c == 0.0:
        return c if size is None else np.full(n, c)
    g = rng.generator()
    if family == "uniform-truncated":
        half = sigma_c * math.sqrt(3.0)
        draw = lambda k: g.uniform(c - half, c + half, size=k)
    else:
        draw = lambda k: g.normal(c, sigma_c, size=k)
    draws = draw(n)
    bad = draws <= 0.0
    rounds = 0
    while bad.any():
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:
            raise SamplerExhaustionError(
                f"cost sampler still rejecting after {_MAX_REJECTION_ROUNDS} "
                f"rounds (c={c}, sigma_c={sigma_c}, family={family})"
            )
        k = int(bad.sum())
        if stats is not None:
            stats.truncated += k
        draws[bad] = draw(k)
        bad = draws <= 0.0
    return _as_output(draws, size)


def sample_delta_hat_direct(
    delta: float,
    var_delta_hat: float,
    rng: RngStream,
    size: int | None = None,
) -> float | np.ndarray:
    """Draw the estimated loss gap directly from Normal(delta, var).

    This matches the distributional assumption behind the closed-form
    error probability exactly, so it serves as the simulator's oracle
    mode. Zero variance returns the gap itself (degenerate normal).
    """
    var_delta_hat = float(var_delta_hat)
    if var_delta_hat < 0.0:
        raise ValueError(f"var_delta_hat must be >= 0, got {var_delta_hat}")
    n = 1 if size is None else int(size)
    if var_delta_hat == 0.0:
        return float(delta) if size is None else np.full(n, float(delta))
    g = rng.generator()
    draws = g.normal(delta, math.sqrt(var_delta_hat), size=n)
    return _as_output(draws, size)
