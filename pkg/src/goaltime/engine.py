"""Session orchestration: one policy interface, five content policies.

The flagship policy refits the GP after every result and serves the
acquisition argmax. Baselines: binary search over a 1-D space, log-space
linear regression, noisy hill climbing, and uniform random.

Every decision is a pure function of (seed, history); per-decision rngs are
derived statelessly from the session seed, the history length, and a salt,
so replaying a recorded history reproduces every serve exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .acquisition import AcquisitionSpec, ModifiedEi, ModifiedUcb, Variant, argmax_index
from .gp import (
    GpModel,
    Kernel,
    LinearKernel,
    PriorMean,
    RbfKernel,
    SumKernel,
    fit,
    optimize_hyperparameters,
    prior_seconds,
)
from .space import DesignPoint, DesignSpace

POLICY_KINDS = ("bayes", "binary", "linreg", "hillclimb", "random")

# rng stream salts; one namespace per purpose so streams never collide
SALT_ACQUISITION = 1
SALT_POLICY = 2
SALT_CONTENT = 3
SALT_HYPEROPT = 4

HYPEROPT_MAXFEV = 80


class OutOfOrderResult(ValueError):
    """A result was submitted for a point other than the one last served."""


@dataclass(frozen=True)
class Observation:
    design_point: DesignPoint
    content_id: str
    elapsed: float
    solved: bool
    recorded_at: float = 0.0

    def __post_init__(self) -> None:
        if self.elapsed <= 0:
            raise ValueError("elapsed must be positive seconds")


@dataclass(frozen=True)
class Domain:
    """Everything the engine needs to know about a content type."""

    name: str
    space: DesignSpace
    prior: PriorMean
    base_kernel: Kernel
    goal_seconds: float
    default_variant: Variant


def sudoku_domain(goal_seconds: float | None = None) -> Domain:
    from . import sudoku

    return Domain(
        name="sudoku",
        space=sudoku.design_space(),
        prior=sudoku.hint_prior(),
        base_kernel=RbfKernel((0.3,)),
        goal_seconds=goal_seconds if goal_seconds is not None else sudoku.GOAL_SECONDS,
        default_variant=ModifiedEi(),
    )


def roguelike_domain(corpus, goal_seconds: float | None = None) -> Domain:
    from . import roguelike

    return Domain(
        name="roguelike",
        space=corpus.design_space(),
        prior=roguelike.travel_prior(),
        base_kernel=SumKernel(RbfKernel((0.3, 0.3)), LinearKernel(0.0)),
        goal_seconds=goal_seconds if goal_seconds is not None else roguelike.GOAL_SECONDS,
        default_variant=ModifiedUcb(kappa=0.05),
    )


@dataclass(frozen=True)
class PolicyConfig:
    kind: str
    variant: Variant | None = None  # bayes only; None -> domain default
    step_sigma: tuple[float, ...] | None = None  # hillclimb; None -> 10% of range

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; expected one of {POLICY_KINDS}")


@dataclass
class SessionState:
    session_id: str
    domain: Domain
    policy: PolicyConfig
    goal_seconds: float
    seed: int
    history: list[Observation] = field(default_factory=list)
    pending: DesignPoint | None = None
    _model_cache: tuple[int, GpModel] | None = None

    def solved_data(self) -> list[tuple[DesignPoint, float]]:
        return [(o.design_point, o.elapsed) for o in self.history if o.solved]

    def rng(self, salt: int) -> np.random.Generator:
        seq = np.random.SeedSequence([self.seed, len(self.history), salt])
        return np.random.Generator(np.random.PCG64(seq))


def new_session(
    session_id: str,
    domain: Domain,
    policy: PolicyConfig,
    seed: int,
    goal_seconds: float | None = None,
) -> SessionState:
    if (policy.kind in ("binary", "linreg")) and domain.space.dim != 1:
        raise ValueError(f"{policy.kind} policy requires a 1-D design space")
    goal = goal_seconds if goal_seconds is not None else domain.goal_seconds
    if goal <= 0:
        raise ValueError("goal must be positive seconds")
    return SessionState(session_id, domain, policy, goal, seed)


# ---------------------------------------------------------------------------
# Policy implementations (pure functions of history)
# ---------------------------------------------------------------------------


def _nearest_prior_index(space: DesignSpace, prior: PriorMean, goal: float) -> int:
    """Cold-start serve: the candidate whose prior time is nearest the goal."""
    secs = prior_seconds(prior, space.as_array())
    order = sorted(range(len(secs)), key=lambda i: (abs(secs[i] - goal), secs[i], i))
    return order[0]


def binary_search_bounds(
    history: list[Observation], space: DesignSpace, goal: float
) -> tuple[int, int]:
    """Fold the played history into the current [lo, hi] search interval.

    A fast solve (t < goal) moves the upper bound down toward harder
    content; a slow or abandoned attempt moves the lower bound up toward
    easier content. Larger coordinate = easier content here.
    """
    lo, hi = int(space.lower[0]), int(space.upper[0])
    for obs in history:
        mid = math.ceil((lo + hi) / 2)
        too_easy = obs.solved and obs.elapsed < goal
        if too_easy:
            hi = mid
        else:
            lo = mid
    return lo, hi


def binary_search_next(session: "SessionState") -> DesignPoint:
    lo, hi = binary_search_bounds(session.history, session.domain.space, session.goal_seconds)
    if lo > hi:
        raise ValueError("binary search bounds crossed")
    return (float(math.ceil((lo + hi) / 2)),)


def _prior_log_slope(prior: PriorMean, space: DesignSpace) -> float:
    lo, hi = space.lower[0], space.upper[0]
    s_lo = float(prior_seconds(prior, np.array([[lo]]))[0])
    s_hi = float(prior_seconds(prior, np.array([[hi]]))[0])
    return (math.log(s_hi) - math.log(s_lo)) / (hi - lo)


def linear_regression_next(
    history: list[Observation], prior: PriorMean, space: DesignSpace, goal: float
) -> DesignPoint:
    """OLS of log time on the 1-D coordinate; serve the point predicted
    nearest the goal. One observation pins the line with the prior's mean
    log slope; none falls back to the prior itself."""
    solved = [(o.design_point[0], o.elapsed) for o in history if o.solved]
    if not solved:
        return space.candidates[_nearest_prior_index(space, prior, goal)]
    xs = np.array([x for x, _ in solved])
    ys = np.log([t for _, t in solved])
    if len(solved) == 1 or np.ptp(xs) == 0:
        slope = _prior_log_slope(prior, space)
        intercept = float(ys.mean() - slope * xs.mean())
    else:
        slope, intercept = (float(v) for v in np.polyfit(xs, ys, 1))
    coords = space.as_array()[:, 0]
    pred = np.exp(intercept + slope * coords)
    order = sorted(range(len(coords)), key=lambda i: (abs(pred[i] - goal), pred[i], i))
    return space.candidates[order[0]]


def _box_center(space: DesignSpace) -> np.ndarray:
    return (np.asarray(space.lower) + np.asarray(space.upper)) / 2.0


def _snap(space: DesignSpace, raw: np.ndarray) -> int:
    """Nearest candidate in normalized coordinates; ties to the lower index.

    Differences are taken before rescaling so exactly equidistant candidates
    produce exactly equal distances and the tie lands on the lower index.
    """
    span = np.asarray(space.upper) - np.asarray(space.lower)
    span = np.where(span > 0, span, 1.0)
    d2 = np.sum(((space.as_array() - np.asarray(raw, dtype=float)) / span) ** 2, axis=1)
    return int(np.argmin(d2))


def hillclimb_center(
    history: list[Observation], space: DesignSpace, goal: float
) -> np.ndarray:
    """Current center: the solved observation closest to the goal so far,
    starting from the middle of the bounding box."""
    center = _box_center(space)
    best = math.inf
    for obs in history:
        if not obs.solved:
            continue
        err = abs(obs.elapsed - goal)
        if err < best:
            best = err
            center = np.asarray(obs.design_point, dtype=float)
    return center


def noisy_hillclimb_next(
    session: "SessionState", rng: np.random.Generator
) -> DesignPoint:
    space = session.domain.space
    center = hillclimb_center(session.history, space, session.goal_seconds)
    if not session.history:
        return space.candidates[_snap(space, center)]
    sigma = session.policy.step_sigma
    if sigma is None:
        sigma = tuple(0.1 * (u - l) for l, u in zip(space.lower, space.upper))
    proposal = center + rng.normal(0.0, 1.0, size=space.dim) * np.asarray(sigma)
    proposal = np.clip(proposal, space.lower, space.upper)
    return space.candidates[_snap(space, proposal)]


def current_model(session: SessionState) -> GpModel:
    """GP fitted to the session's solved history, hyperparameters refreshed.

    Cached per history length, so repeated queries between results are free.
    """
    if session._model_cache is not None and session._model_cache[0] == len(session.history):
        return session._model_cache[1]
    domain = session.domain
    data = session.solved_data()
    kernel, noise = optimize_hyperparameters(
        domain.prior,
        domain.base_kernel,
        data,
        space=domain.space,
        maxfev=HYPEROPT_MAXFEV,
        rng=session.rng(SALT_HYPEROPT),
    )
    model = fit(domain.prior, kernel, noise, data, bounds=domain.space)
    session._model_cache = (len(session.history), model)
    return model


def _bayes_next(session: SessionState) -> DesignPoint:
    domain = session.domain
    times = [o.elapsed for o in session.history if o.solved]
    if not times:
        return domain.space.candidates[
            _nearest_prior_index(domain.space, domain.prior, session.goal_seconds)
        ]
    model = current_model(session)
    variant = session.policy.variant if session.policy.variant is not None else domain.default_variant
    spec = AcquisitionSpec(variant=variant, goal_seconds=session.goal_seconds)
    idx = argmax_index(model, spec, domain.space, times, rng=session.rng(SALT_ACQUISITION))
    return domain.space.candidates[idx]


def next_content(session: SessionState) -> DesignPoint:
    """The design point to serve now; idempotent until a result arrives."""
    if session.pending is not None:
        return session.pending
    kind = session.policy.kind
    if kind == "bayes":
        point = _bayes_next(session)
    elif kind == "binary":
        point = binary_search_next(session)
    elif kind == "linreg":
        point = linear_regression_next(
            session.history, session.domain.prior, session.domain.space, session.goal_seconds
        )
    elif kind == "hillclimb":
        point = noisy_hillclimb_next(session, session.rng(SALT_POLICY))
    else:
        idx = int(session.rng(SALT_POLICY).integers(len(session.domain.space.candidates)))
        point = session.domain.space.candidates[idx]
    session.pending = point
    return point


def record_result(session: SessionState, obs: Observation) -> SessionState:
    """Append a result for the most recently served point."""
    expected = session.pending if session.pending is not None else next_content(session)
    if tuple(map(float, obs.design_point)) != tuple(map(float, expected)):
        raise OutOfOrderResult(
            f"result for {obs.design_point}, but {expected} was served"
        )
    session.history.append(obs)
    session.pending = None
    return session
