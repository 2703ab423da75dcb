"""Finite design spaces of servable content, indexed by feature vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DesignPoint = tuple[float, ...]


@dataclass(frozen=True)
class DesignSpace:
    """A finite set of servable feature vectors plus per-dimension bounds.

    ``candidates`` may contain duplicates (several content items can share a
    feature vector). Bounds are used to affinely map coordinates to [0, 1]
    per dimension before any kernel evaluation, which keeps hyperparameter
    search well conditioned regardless of the raw feature scales.
    """

    candidates: tuple[DesignPoint, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValueError("design space must contain at least one candidate")
        d = len(self.lower)
        if len(self.upper) != d:
            raise ValueError("lower/upper bound dimensions differ")
        if any(hi < lo for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("upper bound below lower bound")
        for c in self.candidates:
            if len(c) != d:
                raise ValueError(f"candidate {c} has dimension {len(c)}, expected {d}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.candidates, dtype=float).reshape(len(self.candidates), self.dim)

    def normalize(self, coords: np.ndarray) -> np.ndarray:
        """Map raw coordinates into the unit box; degenerate dims collapse to 0."""
        lo = np.asarray(self.lower, dtype=float)
        span = np.asarray(self.upper, dtype=float) - lo
        span = np.where(span > 0, span, 1.0)
        return (np.asarray(coords, dtype=float) - lo) / span

    def contains(self, point: DesignPoint) -> bool:
        return tuple(float(v) for v in point) in {tuple(map(float, c)) for c in self.candidates}


def grid_1d(lo: int, hi: int) -> DesignSpace:
    """Integer lattice {lo, ..., hi} as a 1-D design space."""
    if hi < lo:
        raise ValueError("empty lattice")
    return DesignSpace(
        candidates=tuple((float(v),) for v in range(lo, hi + 1)),
        lower=(float(lo),),
        upper=(float(hi),),
    )
