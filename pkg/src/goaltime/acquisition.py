"""Acquisition functions that steer content selection toward a goal time.

The classic acquisitions maximize the objective itself; here the objective
is "be close to the goal", so observed times are scored through the
transform ``-(t - goal)**2`` and the acquisitions are rebuilt around it.
Expected improvement has no closed form under that transform and is
estimated by Monte Carlo over posterior samples of log time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gp import GpModel, posterior_curve, sample_posterior
from .space import DesignPoint, DesignSpace

DEFAULT_EI_SAMPLES = 256


@dataclass(frozen=True)
class ModifiedEi:
    """Monte Carlo expected improvement of the goal-distance score."""

    n_samples: int = DEFAULT_EI_SAMPLES


@dataclass(frozen=True)
class ModifiedUcb:
    """Optimistic goal-distance score of the time upper bound."""

    kappa: float = 0.05


@dataclass(frozen=True)
class StandardEi:
    """Closed-form expected improvement of log time (maximization)."""


@dataclass(frozen=True)
class StandardUcb:
    kappa: float = 0.05


Variant = ModifiedEi | ModifiedUcb | StandardEi | StandardUcb


@dataclass(frozen=True)
class AcquisitionSpec:
    variant: Variant
    goal_seconds: float

    def __post_init__(self) -> None:
        if self.goal_seconds <= 0:
            raise ValueError("goal must be positive seconds")


def objective_transform(seconds: float, goal_seconds: float) -> float:
    """Score a completion time by negated squared distance to the goal."""
    return -((seconds - goal_seconds) ** 2)


def best_transformed(times: Sequence[float], goal_seconds: float) -> float:
    """Incumbent score: the observed time closest to the goal."""
    if not times:
        raise ValueError("no observations")
    return max(objective_transform(t, goal_seconds) for t in times)


def modified_ucb(mean_log: float, std_log: float, kappa: float, goal_seconds: float) -> float:
    """Optimistic score -(exp(mean + kappa*std) - goal)^2.

    The exponent is the upper confidence bound of log time; scoring it
    through the goal-distance transform rewards designs whose plausible
    times bracket the goal.
    """
    return objective_transform(math.exp(mean_log + kappa * std_log), goal_seconds)


def modified_ei(
    mean_log: float,
    std_log: float,
    incumbent: float,
    goal_seconds: float,
    n_samples: int,
    rng: np.random.Generator,
) -> float:
    """Monte Carlo E[max(0, score(t) - incumbent)] with t lognormal."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    draws = rng.normal(mean_log, std_log, size=n_samples)
    scores = -((np.exp(draws) - goal_seconds) ** 2)
    return float(np.mean(np.maximum(0.0, scores - incumbent)))


def standard_ei(mean: float, std: float, best: float) -> float:
    """Closed-form EI for maximization: (mu-f*)Phi(z) + sigma*phi(z)."""
    if std <= 0:
        return max(0.0, mean - best)
    z = (mean - best) / std
    cdf = 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return (mean - best) * cdf + std * pdf


def standard_ucb(mean: float, std: float, kappa: float) -> float:
    return mean + kappa * std


def score_candidates(
    model: GpModel,
    spec: AcquisitionSpec,
    space: DesignSpace,
    observed_times: Sequence[float],
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Acquisition value for every candidate in the design space.

    Monte Carlo variants consume ``rng``; one independent stream is spawned
    per candidate so scores do not depend on evaluation order.
    """
    coords = space.as_array()
    means, stds = posterior_curve(model, coords)
    v = spec.variant
    if isinstance(v, ModifiedUcb):
        return np.array([
            modified_ucb(m, s, v.kappa, spec.goal_seconds) for m, s in zip(means, stds)
        ])
    if isinstance(v, StandardUcb):
        return means + v.kappa * stds
    if isinstance(v, StandardEi):
        best = max(math.log(t) for t in observed_times)
        return np.array([standard_ei(m, s, best) for m, s in zip(means, stds)])
    if rng is None:
        raise ValueError("Monte Carlo acquisition needs an rng")
    incumbent = best_transformed(observed_times, spec.goal_seconds)
    streams = rng.spawn(len(coords))
    return np.array([
        modified_ei(m, s, incumbent, spec.goal_seconds, v.n_samples, stream)
        for m, s, stream in zip(means, stds, streams)
    ])


def argmax_index(
    model: GpModel,
    spec: AcquisitionSpec,
    space: DesignSpace,
    observed_times: Sequence[float],
    rng: np.random.Generator | None = None,
) -> int:
    """Index of the best candidate under the acquisition.

    Exact score ties are broken toward the candidate with the smaller
    predicted time (easier content is the safer serve), then toward the
    lower index for full determinism.
    """
    scores = score_candidates(model, spec, space, observed_times, rng)
    means, _ = posterior_curve(model, space.as_array())
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], means[i], i))
    return order[0]


def argmax_acquisition(
    model: GpModel,
    spec: AcquisitionSpec,
    space: DesignSpace,
    observed_times: Sequence[float],
    rng: np.random.Generator | None = None,
) -> DesignPoint:
    """Design point attaining the acquisition maximum over the space."""
    return space.candidates[argmax_index(model, spec, space, observed_times, rng)]
