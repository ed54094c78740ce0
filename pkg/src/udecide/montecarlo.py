"""Monte Carlo validation of the closed-form sensitivity quantities.

Each trial draws estimates of the state probability and the two costs
(or, in oracle mode, the loss gap itself), recomputes the gap

    delta_hat = c01_hat * (1 - p0_hat) - c10_hat * p0_hat

(with exactly-known diagonal costs subtracted when present), selects the
action by the sign of delta_hat, and records whether that differs from
the true optimal action. The error fraction estimates the suboptimal
selection probability, and multiplying by the known true regret |delta|
gives the expected loss increase; using the known |delta| rather than
averaging realized losses is an exact-in-expectation estimator with
strictly lower variance.

Trials run vectorized in fixed-size blocks. Block b of a config draws
from counter buckets 4b..4b+3 of that config's stream (one bucket per
sampler), so every draw is a pure function of (master_seed, stream_id,
counter) and the aggregate is bit-identical no matter how blocks are
scheduled; counts merge by integer addition, which is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decision_core import DecisionProblem, NoiseSpec, delta, min_loss, var_delta_hat
from .estimators import (
    RngStream,
    SampleStats,
    beta_params_from_moments,
    sample_cost_hat,
    sample_delta_hat_direct,
    sample_p_hat,
)

__all__ = ["SimulationConfig", "SimulationResult", "simulate", "simulate_trial"]

# Trials per block. Fixed (not configurable) so the block partition, and
# with it every drawn number, is identical on every machine and at every
# degree of parallelism.
BLOCK_TRIALS = 65536


@dataclass(frozen=True, slots=True)
class SimulationConfig:
    """One simulation: a problem, its estimator noise, and a stream address."""

    problem: DecisionProblem
    noise: NoiseSpec
    trials: int
    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if int(self.trials) < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        object.__setattr__(self, "trials", int(self.trials))
        # Validates the unsigned-64 range of seed and stream id.
        RngStream(self.master_seed, self.stream_id)


@dataclass(frozen=True, slots=True)
class SimulationResult:
    """Empirical counterpart of AnalyticSensitivity.

    ``delta_inc_hat == p_err_hat * |delta|`` holds exactly by
    construction, and ``stderr_p_err`` is the binomial standard error
    sqrt(p * (1 - p) / trials). ``norm_inc_hat`` is None when the
    minimal loss is zero (undefined marker, mirroring the analytic
    bundle).
    """

    p_err_hat: float
    delta_inc_hat: float
    norm_inc_hat: float | None
    stderr_p_err: float
    trials: int
    truncation_count: int
    clamp_flag: bool


def _beta_clamped(problem: DecisionProblem, noise: NoiseSpec) -> bool:
    if noise.delta_mode or noise.family_p != "beta" or noise.sigma_p0 == 0.0:
        return False
    return beta_params_from_moments(problem.p0, noise.sigma_p0 ** 2).clamped


def _block_error_mask(
    config: SimulationConfig, block_index: int, n: int
) -> tuple[np.ndarray, SampleStats]:
    """Error indicators for one block of n trials, plus sampler stats."""
    problem, noise = config.problem, config.noise
    d = delta(problem)
    stats = SampleStats()
    base = RngStream(config.master_seed, config.stream_id)
    if noise.delta_mode:
        d_hat = sample_delta_hat_direct(
            d, var_delta_hat(problem, noise), base.with_counter(4 * block_index + 3), size=n
        )
    else:
        p_hat = sample_p_hat(
            problem.p0, noise.sigma_p0, noise.family_p,
            base.with_counter(4 * block_index), size=n, stats=stats,
        )
        c01_hat = sample_cost_hat(
            problem.c01, noise.sigma_c01, noise.family_c,
            base.with_counter(4 * block_index + 1), size=n, stats=stats,
        )
        c10_hat = sample_cost_hat(
            problem.c10, noise.sigma_c10, noise.family_c,
            base.with_counter(4 * block_index + 2), size=n, stats=stats,
        )
        d_hat = (c01_hat - problem.c11) * (1.0 - p_hat) - (c10_hat - problem.c00) * p_hat
    if d == 0.0:
        # Both actions are optimal; no selection counts as an error.
        return np.zeros(n, dtype=bool), stats
    errors = np.asarray(d_hat < 0.0) != (d < 0.0)
    return errors, stats


def simulate_trial(config: SimulationConfig, trial_index: int) -> bool:
    """Whether trial ``trial_index`` commits a suboptimal selection.

    Consistent by construction with ``simulate``: the trial's draws come
    from the same block bucket the aggregate run uses, so calling this
    for every index reproduces the aggregate error count exactly.
    """
    trial_index = int(trial_index)
    if not 0 <= trial_index < config.trials:
        raise ValueError(
            f"trial_index must be in [0, {config.trials}), got {trial_index}"
        )
    block_index, offset = divmod(trial_index, BLOCK_TRIALS)
    start = block_index * BLOCK_TRIALS
    n = min(BLOCK_TRIALS, config.trials - start)
    errors, _ = _block_error_mask(config, block_index, n)
    return bool(errors[offset])


def simulate(config: SimulationConfig) -> SimulationResult:
    """Run all trials and aggregate into a SimulationResult.

    Deterministic given (master_seed, stream_id): the outcome does not
    depend on execution order or parallelism.
    """
    problem, noise = config.problem, config.noise
    d = delta(problem)
    l_star = min_loss(problem)
    error_count = 0
    stats = SampleStats()
    n_blocks = -(-config.trials // BLOCK_TRIALS)
    for block_index in range(n_blocks):
        start = block_index * BLOCK_TRIALS
        n = min(BLOCK_TRIALS, config.trials - start)
        errors, block_stats = _block_error_mask(config, block_index, n)
        error_count += int(errors.sum())
        stats.merge(block_stats)
    p_hat = error_count / config.trials
    delta_inc = p_hat * abs(d)
    norm_inc = delta_inc / l_star if l_star > 0.0 else None
    return SimulationResult(
        p_err_hat=p_hat,
        delta_inc_hat=delta_inc,
        norm_inc_hat=norm_inc,
        stderr_p_err=math.sqrt(p_hat * (1.0 - p_hat) / config.trials),
        trials=config.trials,
        truncation_count=stats.truncated,
        clamp_flag=_beta_clamped(problem, noise),
    )
