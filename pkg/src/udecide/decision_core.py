"""Closed-form sensitivity of a binary decision to estimation error.

The task: a binary state, two actions, a cost for each (action, state)
pair. The decision maker knows (estimates of) the state probability
``p0 = P(state = 0)`` and the costs, and picks the action with the lower
expected loss. Everything this module computes derives from the signed
gap between the two expected losses,

    delta = (c01 - c11) * (1 - p0) - (c10 - c00) * p0,

whose sign selects the optimal action and whose magnitude is the regret
of choosing wrong. When the inputs are replaced by unbiased, normally
distributed estimates, the estimated gap is approximately normal around
delta, so the probability of picking the suboptimal action and the
resulting expected loss increase have closed forms:

    P_err = Phi(-|delta| / sigma_hat)        (sigma_hat^2 = Var of the gap)
    Delta = P_err * |delta|

``var_delta_hat`` propagates the three estimator variances through the
product terms of the gap under an independence assumption, and
``expected_increase`` bundles the whole chain into one value object.

All functions are pure and total on valid inputs; values are immutable
and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .special_functions import erf

__all__ = [
    "ActionLabel",
    "AnalyticSensitivity",
    "DecisionProblem",
    "NoiseSpec",
    "P_FAMILIES",
    "COST_FAMILIES",
    "bayes_action",
    "delta",
    "expected_increase",
    "min_loss",
    "p_err",
    "var_delta_hat",
]

_SQRT2 = math.sqrt(2.0)

P_FAMILIES = ("exact", "beta", "normal")
COST_FAMILIES = ("exact", "uniform-truncated", "normal")


class ActionLabel(Enum):
    """The two available actions."""

    A0 = "a0"
    A1 = "a1"


def _require_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True, slots=True)
class DecisionProblem:
    """Ground truth of the decision task: state prior and cost table.

    ``c01`` is the cost of action a0 in state 1, ``c10`` the cost of
    action a1 in state 0. The diagonal costs (right action taken)
    default to zero; nonzero diagonals are supported and enter every
    formula only through the effective off-diagonal costs
    ``c01 - c11`` and ``c10 - c00``.
    """

    p0: float
    c01: float
    c10: float
    c00: float = 0.0
    c11: float = 0.0

    def __post_init__(self) -> None:
        p0 = _require_finite(self.p0, "p0")
        if not 0.0 <= p0 <= 1.0:
            raise ValueError(f"p0 must be in [0, 1], got {p0}")
        for name in ("c00", "c01", "c10", "c11"):
            c = _require_finite(getattr(self, name), name)
            if c < 0.0:
                raise ValueError(f"{name} must be >= 0, got {c}")
            object.__setattr__(self, name, c)
        object.__setattr__(self, "p0", p0)


@dataclass(frozen=True, slots=True)
class NoiseSpec:
    """Standard errors and distribution families of the three estimators.

    A family tag is ``exact`` exactly when the matching standard error
    is zero (for the cost pair: when both are zero). ``delta_mode``
    selects the simulator's oracle mode, where the estimated gap is
    drawn directly from Normal(delta, var_delta_hat) instead of being
    assembled from sampled probability and cost estimates.
    """

    sigma_p0: float = 0.0
    sigma_c01: float = 0.0
    sigma_c10: float = 0.0
    family_p: str = "exact"
    family_c: str = "exact"
    delta_mode: bool = False

    def __post_init__(self) -> None:
        for name in ("sigma_p0", "sigma_c01", "sigma_c10"):
            s = _require_finite(getattr(self, name), name)
            if s < 0.0:
                raise ValueError(f"{name} must be >= 0, got {s}")
            object.__setattr__(self, name, s)
        if self.family_p not in P_FAMILIES:
            raise ValueError(
                f"family_p must be one of {P_FAMILIES}, got {self.family_p!r}"
            )
        if self.family_c not in COST_FAMILIES:
            raise ValueError(
                f"family_c must be one of {COST_FAMILIES}, got {self.family_c!r}"
            )
        if (self.family_p == "exact") != (self.sigma_p0 == 0.0):
            raise ValueError(
                "family_p must be 'exact' if and only if sigma_p0 == 0, "
                f"got family_p={self.family_p!r} with sigma_p0={self.sigma_p0}"
            )
        costs_exact = self.sigma_c01 == 0.0 and self.sigma_c10 == 0.0
        if (self.family_c == "exact") != costs_exact:
            raise ValueError(
                "family_c must be 'exact' if and only if both cost standard "
                f"errors are 0, got family_c={self.family_c!r} with "
                f"sigma_c01={self.sigma_c01}, sigma_c10={self.sigma_c10}"
            )


@dataclass(frozen=True, slots=True)
class AnalyticSensitivity:
    """Bundle of all closed-form quantities for one (problem, noise) pair.

    ``norm_inc`` is ``delta_inc / l_star`` when the minimal loss is
    positive and None (an explicit undefined marker, not infinity) when
    it is zero.
    """

    delta: float
    l_star: float
    var_delta_hat: float
    p_err: float
    delta_inc: float
    norm_inc: float | None


def delta(problem: DecisionProblem) -> float:
    """Signed expected-loss gap between action a0 and action a1.

    Negative means a0 is strictly better; |delta| is the regret of a
    suboptimal choice. With a zero diagonal this is
    ``c01 * (1 - p0) - c10 * p0``.
    """
    e01 = problem.c01 - problem.c11
    e10 = problem.c10 - problem.c00
    return e01 * (1.0 - problem.p0) - e10 * problem.p0


def bayes_action(problem: DecisionProblem) -> ActionLabel:
    """Action with the lower expected loss; ties at delta == 0 go to a1."""
    return ActionLabel.A0 if delta(problem) < 0.0 else ActionLabel.A1


def min_loss(problem: DecisionProblem) -> float:
    """Minimal achievable expected loss over the two actions."""
    loss_a0 = problem.c00 * problem.p0 + problem.c01 * (1.0 - problem.p0)
    loss_a1 = problem.c10 * problem.p0 + problem.c11 * (1.0 - problem.p0)
    return min(loss_a0, loss_a1)


def var_delta_hat(problem: DecisionProblem, noise: NoiseSpec) -> float:
    """Variance of the estimated loss gap under independent estimators.

    Each of the two product terms of the gap contributes the exact
    variance of a product of independent variables,
    Var(xy) = Var(x)Var(y) + Var(x)E[y]^2 + Var(y)E[x]^2, and the two
    contributions are added. Diagonal costs are treated as exactly
    known, so they shift the effective cost means but carry no variance
    of their own.
    """
    vp = noise.sigma_p0 ** 2
    v01 = noise.sigma_c01 ** 2
    v10 = noise.sigma_c10 ** 2
    e01 = problem.c01 - problem.c11
    e10 = problem.c10 - problem.c00
    q0 = problem.p0
    q1 = 1.0 - problem.p0
    return (
        v01 * vp + v01 * q1 * q1 + vp * e01 * e01
        + v10 * vp + v10 * q0 * q0 + vp * e10 * e10
    )


def p_err(delta: float, var_delta_hat: float) -> float:
    """Probability that the estimated gap selects the suboptimal action.

    Equals ``0.5 * (1 + erf(-|delta| / sqrt(2 * var)))``, i.e. the lower
    normal tail beyond the true gap. Degenerate corners: zero variance
    with a nonzero gap never errs; a zero gap with positive variance
    errs half the time; when both are zero any action is optimal, so the
    error probability is defined as 0.
    """
    d = _require_finite(delta, "delta")
    v = _require_finite(var_delta_hat, "var_delta_hat")
    if v < 0.0:
        raise ValueError(f"var_delta_hat must be >= 0, got {v}")
    if v == 0.0:
        return 0.0
    if d == 0.0:
        return 0.5
    return 0.5 * (1.0 + erf(-abs(d) / math.sqrt(2.0 * v)))


def expected_increase(problem: DecisionProblem, noise: NoiseSpec) -> AnalyticSensitivity:
    """Full closed-form sensitivity bundle for one (problem, noise) pair.

    ``delta_inc`` (the expected loss increase over the optimal policy)
    is ``p_err * |delta|`` by definition, so the identity holds exactly
    in the returned value.
    """
    d = delta(problem)
    l_star = min_loss(problem)
    v = var_delta_hat(problem, noise)
    pe = p_err(d, v)
    inc = pe * abs(d)
    norm = inc / l_star if l_star > 0.0 else None
    return AnalyticSensitivity(
        delta=d,
        l_star=l_star,
        var_delta_hat=v,
        p_err=pe,
        delta_inc=inc,
        norm_inc=norm,
    )
