"""Gaussian-process regression over log completion time.

The model regresses a zero-mean GP on the residuals
``log t - log mu0(x)`` against a hand-crafted prior-mean curve ``mu0``
(given in seconds), so posterior means recover the additive-prior form
exactly while kernels stay mean-free. All kernel evaluations happen in
coordinates normalized to [0, 1] per dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from .space import DesignPoint, DesignSpace

LOG_2PI = math.log(2.0 * math.pi)

# Jitter escalation: multiply the noise by 10 this many times before giving up.
MAX_JITTER_ESCALATIONS = 3


class FitError(RuntimeError):
    """Gram matrix could not be factorized even after jitter escalation."""


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RbfKernel:
    """Anisotropic squared-exponential kernel with one lengthscale per dim."""

    lengthscales: tuple[float, ...]
    signal_variance: float = 1.0

    def __post_init__(self) -> None:
        if not self.lengthscales or any(l <= 0 for l in self.lengthscales):
            raise ValueError("lengthscales must be positive")
        if self.signal_variance <= 0:
            raise ValueError("signal variance must be positive")


@dataclass(frozen=True)
class LinearKernel:
    """Dot-product kernel sigma0 + x . x'."""

    sigma0: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma0 < 0:
            raise ValueError("sigma0 must be nonnegative")


@dataclass(frozen=True)
class SumKernel:
    left: "Kernel"
    right: "Kernel"


Kernel = RbfKernel | LinearKernel | SumKernel


def _kernel_dim(kernel: Kernel) -> int | None:
    """Input dimension a kernel commits to, or None if dimension-agnostic."""
    if isinstance(kernel, RbfKernel):
        return len(kernel.lengthscales)
    if isinstance(kernel, LinearKernel):
        return None
    dl, dr = _kernel_dim(kernel.left), _kernel_dim(kernel.right)
    if dl is not None and dr is not None and dl != dr:
        raise ValueError("sum kernel operands disagree on dimension")
    return dl if dl is not None else dr


def kernel_matrix(kernel: Kernel, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross-covariance matrix k(a_i, b_j) for row-stacked inputs."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise ValueError("input dimensions differ")
    if isinstance(kernel, RbfKernel):
        if len(kernel.lengthscales) != a.shape[1]:
            raise ValueError(
                f"kernel expects dimension {len(kernel.lengthscales)}, got {a.shape[1]}"
            )
        ls = np.asarray(kernel.lengthscales, dtype=float)
        sq = cdist(a / ls, b / ls, "sqeuclidean")
        return kernel.signal_variance * np.exp(-0.5 * sq)
    if isinstance(kernel, LinearKernel):
        return kernel.sigma0 + a @ b.T
    return kernel_matrix(kernel.left, a, b) + kernel_matrix(kernel.right, a, b)


def kernel_diag(kernel: Kernel, a: np.ndarray) -> np.ndarray:
    """k(x, x) for each row of ``a`` without forming the full matrix."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if isinstance(kernel, RbfKernel):
        if len(kernel.lengthscales) != a.shape[1]:
            raise ValueError(
                f"kernel expects dimension {len(kernel.lengthscales)}, got {a.shape[1]}"
            )
        return np.full(a.shape[0], kernel.signal_variance)
    if isinstance(kernel, LinearKernel):
        return kernel.sigma0 + np.sum(a * a, axis=1)
    return kernel_diag(kernel.left, a) + kernel_diag(kernel.right, a)


def kernel_eval(kernel: Kernel, x: DesignPoint, x2: DesignPoint) -> float:
    if len(x) != len(x2):
        raise ValueError("point dimensions differ")
    return float(kernel_matrix(kernel, np.asarray([x]), np.asarray([x2]))[0, 0])


# ---------------------------------------------------------------------------
# Prior means (in seconds)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseLinearPrior:
    """1-D prior interpolating (coordinate, seconds) anchors linearly in seconds."""

    anchors: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.anchors) < 2:
            raise ValueError("need at least two anchors")
        xs = [x for x, _ in self.anchors]
        if xs != sorted(xs):
            raise ValueError("anchors must be sorted by coordinate")
        if any(s <= 0 for _, s in self.anchors):
            raise ValueError("anchor seconds must be positive")


@dataclass(frozen=True)
class PlanePrior:
    """Affine prior base + sum_i slope_i * (x_i - origin_i), in seconds."""

    base_seconds: float
    slopes: tuple[float, ...]
    origin: tuple[float, ...] = ()


@dataclass(frozen=True)
class ConstantPrior:
    seconds: float

    def __post_init__(self) -> None:
        if self.seconds <= 0:
            raise ValueError("constant prior must be positive")


PriorMean = PiecewiseLinearPrior | PlanePrior | ConstantPrior


def prior_seconds(prior: PriorMean, coords: np.ndarray) -> np.ndarray:
    """Evaluate the prior mean in seconds for row-stacked raw coordinates."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    if isinstance(prior, PiecewiseLinearPrior):
        xs = np.array([x for x, _ in prior.anchors])
        ys = np.array([s for _, s in prior.anchors])
        return np.interp(coords[:, 0], xs, ys)
    if isinstance(prior, PlanePrior):
        origin = np.zeros(coords.shape[1]) if not prior.origin else np.asarray(prior.origin)
        vals = prior.base_seconds + (coords - origin) @ np.asarray(prior.slopes, dtype=float)
        if np.any(vals <= 0):
            raise ValueError("plane prior predicts non-positive seconds")
        return vals
    return np.full(coords.shape[0], prior.seconds)


# ---------------------------------------------------------------------------
# Model fitting and posterior queries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Posterior:
    """Pointwise marginal in log-seconds."""

    mean: float
    std: float


@dataclass(frozen=True, eq=False)
class GpModel:
    """Fitted GP; immutable after construction, safe to share across threads."""

    kernel: Kernel
    noise: float
    prior: PriorMean
    train_x: np.ndarray  # raw coords, shape (n, d)
    train_logt: np.ndarray  # log seconds, shape (n,)
    residuals: np.ndarray  # log t - log mu0(x)
    lower: np.ndarray  # affine normalization, per dimension
    upper: np.ndarray
    chol: np.ndarray | None  # lower factor of K + noise*I; None when n == 0
    alpha: np.ndarray  # (K + noise*I)^-1 residuals

    @property
    def n_train(self) -> int:
        return self.train_x.shape[0]

    def _norm(self, coords: np.ndarray) -> np.ndarray:
        span = np.where(self.upper > self.lower, self.upper - self.lower, 1.0)
        return (np.asarray(coords, dtype=float) - self.lower) / span


def _bounds_arrays(dim: int, bounds: DesignSpace | None) -> tuple[np.ndarray, np.ndarray]:
    if bounds is None:
        return np.zeros(dim), np.zeros(dim)  # identity map (span clamps to 1)
    return np.asarray(bounds.lower, dtype=float), np.asarray(bounds.upper, dtype=float)


def fit(
    prior: PriorMean,
    kernel: Kernel,
    noise: float,
    data: Sequence[tuple[DesignPoint, float]],
    bounds: DesignSpace | None = None,
) -> GpModel:
    """Condition the GP on (design point, seconds) observations.

    Raises FitError if the noisy Gram matrix stays indefinite after jitter
    escalation, ValueError on non-positive times or noise.
    """
    if noise <= 0:
        raise ValueError("noise must be positive")
    pts = [p for p, _ in data]
    secs = np.array([t for _, t in data], dtype=float)
    if secs.size and np.any(secs <= 0):
        raise ValueError("completion times must be positive")
    dim = len(pts[0]) if pts else (
        bounds.dim if bounds is not None else (_kernel_dim(kernel) or 1)
    )
    x = np.asarray(pts, dtype=float).reshape(len(pts), dim)
    lo, hi = _bounds_arrays(dim, bounds)
    logt = np.log(secs)
    resid = logt - np.log(prior_seconds(prior, x)) if len(pts) else logt

    if not len(pts):
        return GpModel(kernel, noise, prior, x, logt, resid, lo, hi,
                       chol=None, alpha=np.zeros(0))

    span = np.where(hi > lo, hi - lo, 1.0)
    xn = (x - lo) / span
    gram = kernel_matrix(kernel, xn, xn)
    gram = 0.5 * (gram + gram.T)
    eff_noise = noise
    for _ in range(MAX_JITTER_ESCALATIONS + 1):
        try:
            chol = cholesky(gram + eff_noise * np.eye(len(pts)),
                            lower=True, check_finite=False)
            break
        except np.linalg.LinAlgError:
            eff_noise *= 10.0
    else:
        raise FitError(f"factorization failed at noise {eff_noise / 10.0:g}")
    alpha = solve_triangular(
        chol.T, solve_triangular(chol, resid, lower=True, check_finite=False),
        lower=False, check_finite=False)
    return GpModel(kernel, eff_noise, prior, x, logt, resid, lo, hi, chol, alpha)


def posterior_curve(model: GpModel, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and std in log-seconds at each row of ``coords``."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    prior_log = np.log(prior_seconds(model.prior, coords))
    xn = model._norm(coords)
    var_prior = kernel_diag(model.kernel, xn)
    if model.chol is None:
        return prior_log, np.sqrt(var_prior)
    k_star = kernel_matrix(model.kernel, xn, model._norm(model.train_x))
    mean = prior_log + k_star @ model.alpha
    v = solve_triangular(model.chol, k_star.T, lower=True, check_finite=False)
    var = np.clip(var_prior - np.sum(v * v, axis=0), 0.0, None)
    return mean, np.sqrt(var)


def posterior(model: GpModel, x: DesignPoint) -> Posterior:
    if len(x) != model.train_x.shape[1] and model.n_train:
        raise ValueError("query dimension does not match training data")
    mean, std = posterior_curve(model, np.asarray([x], dtype=float))
    return Posterior(float(mean[0]), float(std[0]))


def sample_posterior(
    model: GpModel, x: DesignPoint, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n independent draws from the pointwise posterior marginal at x."""
    if n < 1:
        raise ValueError("need at least one sample")
    post = posterior(model, x)
    return rng.normal(post.mean, post.std, size=n)


def log_marginal_likelihood(model: GpModel) -> float:
    """Evidence of the residuals under the fitted kernel and noise."""
    if model.chol is None:
        raise ValueError("model has no training data")
    n = model.n_train
    quad = -0.5 * float(model.residuals @ model.alpha)
    logdet_half = float(np.sum(np.log(np.diag(model.chol))))
    return quad - logdet_half - 0.5 * n * LOG_2PI


# ---------------------------------------------------------------------------
# Hyperparameter search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HyperBounds:
    """Search box for kernel hyperparameters (normalized coordinates)."""

    lengthscale: tuple[float, float] = (1e-2, 1e2)
    signal_variance: tuple[float, float] = (1e-3, 1e2)
    sigma0: tuple[float, float] = (1e-8, 1e2)  # lower edge stands in for 0
    noise: tuple[float, float] = (1e-4, 1.0)

    def __post_init__(self) -> None:
        for lo, hi in (self.lengthscale, self.signal_variance, self.sigma0, self.noise):
            if not (0 < lo <= hi):
                raise ValueError("bounds must satisfy 0 < lo <= hi")


def _pack(kernel: Kernel, bounds: HyperBounds) -> list[tuple[float, float, float]]:
    """Flatten kernel hyperparameters into (value, lo, hi) triples."""
    if isinstance(kernel, RbfKernel):
        out = [(l, *bounds.lengthscale) for l in kernel.lengthscales]
        out.append((kernel.signal_variance, *bounds.signal_variance))
        return out
    if isinstance(kernel, LinearKernel):
        return [(max(kernel.sigma0, bounds.sigma0[0]), *bounds.sigma0)]
    return _pack(kernel.left, bounds) + _pack(kernel.right, bounds)


def _unpack(kernel: Kernel, values: Iterable[float]) -> Kernel:
    it = iter(values)

    def build(k: Kernel) -> Kernel:
        if isinstance(k, RbfKernel):
            ls = tuple(next(it) for _ in k.lengthscales)
            return RbfKernel(ls, next(it))
        if isinstance(k, LinearKernel):
            return LinearKernel(next(it))
        return SumKernel(build(k.left), build(k.right))

    return build(kernel)


def optimize_hyperparameters(
    prior: PriorMean,
    kernel: Kernel,
    data: Sequence[tuple[DesignPoint, float]],
    *,
    noise: float = 0.1,
    bounds: HyperBounds = HyperBounds(),
    space: DesignSpace | None = None,
    n_starts: int = 5,
    maxfev: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[Kernel, float]:
    """Maximize the marginal likelihood with a multi-start simplex search.

    The search runs in log-hyperparameter space; the first start is the
    supplied configuration (clipped into bounds), the rest are log-uniform
    draws. The returned configuration never scores below the starting one.
    With fewer than two observations the inputs are returned unchanged.
    """
    if len(data) < 2:
        return kernel, noise
    rng = rng if rng is not None else np.random.default_rng(0)

    triples = _pack(kernel, bounds) + [(min(max(noise, bounds.noise[0]), bounds.noise[1]),
                                        *bounds.noise)]
    theta0 = np.log([np.clip(v, lo, hi) for v, lo, hi in triples])
    log_bounds = [(math.log(lo), math.log(hi)) for _, lo, hi in triples]

    def score(theta: np.ndarray) -> float:
        vals = np.exp(theta)
        try:
            model = fit(prior, _unpack(kernel, vals[:-1]), float(vals[-1]), data, bounds=space)
            return log_marginal_likelihood(model)
        except (FitError, np.linalg.LinAlgError):
            return -np.inf

    best_theta, best_lml = theta0, score(theta0)
    starts = [theta0] + [
        np.array([rng.uniform(lo, hi) for lo, hi in log_bounds])
        for _ in range(max(0, n_starts - 1))
    ]
    options = {"xatol": 1e-3, "fatol": 1e-6}
    if maxfev is not None:
        options["maxfev"] = maxfev
    for start in starts:
        res = minimize(lambda th: -score(th), start, method="Nelder-Mead",
                       bounds=log_bounds, options=options)
        if np.isfinite(res.fun) and -res.fun > best_lml:
            best_theta, best_lml = np.clip(res.x, [b[0] for b in log_bounds],
                                           [b[1] for b in log_bounds]), -res.fun
    vals = np.exp(best_theta)
    return _unpack(kernel, vals[:-1]), float(vals[-1])
