"""Online content adaptation toward a goal completion time.

A session model (GP regression over log completion time with a designer
prior) plus target-seeking acquisition functions pick the next piece of
content whose predicted completion time is closest to the goal. Ships two
content domains (Sudoku, roguelike levels), four baseline policies, a
batch evaluation harness, and an HTTP service.
"""

from .acquisition import (
    AcquisitionSpec,
    ModifiedEi,
    ModifiedUcb,
    StandardEi,
    StandardUcb,
    argmax_acquisition,
    modified_ei,
    modified_ucb,
    objective_transform,
)
from .engine import (
    Observation,
    PolicyConfig,
    SessionState,
    new_session,
    next_content,
    record_result,
    roguelike_domain,
    sudoku_domain,
)
from .gp import (
    ConstantPrior,
    GpModel,
    HyperBounds,
    LinearKernel,
    PiecewiseLinearPrior,
    PlanePrior,
    Posterior,
    RbfKernel,
    SumKernel,
    fit,
    log_marginal_likelihood,
    optimize_hyperparameters,
    posterior,
    posterior_curve,
    sample_posterior,
)
from .space import DesignPoint, DesignSpace, grid_1d

__all__ = [
    "AcquisitionSpec",
    "ConstantPrior",
    "DesignPoint",
    "DesignSpace",
    "GpModel",
    "HyperBounds",
    "LinearKernel",
    "ModifiedEi",
    "ModifiedUcb",
    "Observation",
    "PiecewiseLinearPrior",
    "PlanePrior",
    "PolicyConfig",
    "Posterior",
    "RbfKernel",
    "SessionState",
    "StandardEi",
    "StandardUcb",
    "SumKernel",
    "argmax_acquisition",
    "fit",
    "grid_1d",
    "log_marginal_likelihood",
    "modified_ei",
    "modified_ucb",
    "new_session",
    "next_content",
    "objective_transform",
    "optimize_hyperparameters",
    "posterior",
    "posterior_curve",
    "record_result",
    "roguelike_domain",
    "sample_posterior",
    "sudoku_domain",
]

__version__ = "0.1.0"
