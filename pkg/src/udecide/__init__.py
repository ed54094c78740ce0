"""udecide: sensitivity of binary decisions to estimation error.

Quantifies how estimation error in the state probability versus the
action costs inflates the expected loss of a cost-sensitive binary
decision, with a closed-form approximation and a reproducible Monte
Carlo simulator that validates it.
"""

__version__ = "0.1.0"

from .decision_core import (
    ActionLabel,
    AnalyticSensitivity,
    DecisionProblem,
    NoiseSpec,
    bayes_action,
    delta,
    expected_increase,
    min_loss,
    p_err,
    var_delta_hat,
)
from .estimators import (
    BetaParams,
    RngStream,
    SampleStats,
    SamplerExhaustionError,
    beta_params_from_moments,
    sample_cost_hat,
    sample_delta_hat_direct,
    sample_p_hat,
)
from .experiments import (
    SCENARIO_TAGS,
    Scenario,
    SweepConfig,
    SweepRow,
    figure1_config,
    figure2_config,
    run_sweep,
)
from .montecarlo import SimulationConfig, SimulationResult, simulate, simulate_trial
from .special_functions import erf, normal_cdf

__all__ = [
    "ActionLabel",
    "AnalyticSensitivity",
    "BetaParams",
    "DecisionProblem",
    "NoiseSpec",
    "RngStream",
    "SCENARIO_TAGS",
    "SampleStats",
    "SamplerExhaustionError",
    "Scenario",
    "SimulationConfig",
    "SimulationResult",
    "SweepConfig",
    "SweepRow",
    "__version__",
    "bayes_action",
    "beta_params_from_moments",
    "delta",
    "erf",
    "expected_increase",
    "figure1_config",
    "figure2_config",
    "min_loss",
    "normal_cdf",
    "p_err",
    "run_sweep",
    "sample_cost_hat",
    "sample_delta_hat_direct",
    "sample_p_hat",
    "simulate",
    "simulate_trial",
    "var_delta_hat",
]
