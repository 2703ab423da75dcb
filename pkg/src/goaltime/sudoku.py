"""Sudoku content domain: generation, solution counting, and the time prior.

Difficulty is controlled by a single feature, the number of prefilled cells
(hints), ranging over {17, ..., 80}. Grids are flat 81-tuples in row-major
order with 0 for blank; the wire format is the same 81 cells as a string.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gp import PiecewiseLinearPrior
from .space import DesignSpace, grid_1d

MIN_HINTS = 17
MAX_HINTS = 80
GOAL_SECONDS = 180.0

NODE_BUDGET = 10**6

Grid = tuple[int, ...]

ROW = [i // 9 for i in range(81)]
COL = [i % 9 for i in range(81)]
BOX = [(i // 27) * 3 + (i % 9) // 3 for i in range(81)]


class SearchBudgetExceeded(RuntimeError):
    """Solution counting hit the node budget before reaching a verdict."""


@dataclass(frozen=True)
class SudokuPuzzle:
    """A servable puzzle: partial grid, one known completion, uniqueness flag.

    ``unique_solution`` is True/False when counting finished under budget
    and None when the verdict is unknown.
    """

    givens: Grid
    solution: Grid
    hint_count: int
    unique_solution: bool | None


def design_space() -> DesignSpace:
    return grid_1d(MIN_HINTS, MAX_HINTS)


def hint_prior() -> PiecewiseLinearPrior:
    """Prior completion time: 600 s at 17 hints down to 3 s at 80, linear."""
    return PiecewiseLinearPrior(((float(MIN_HINTS), 600.0), (float(MAX_HINTS), 3.0)))


def sudoku_prior(hints: float) -> float:
    if not MIN_HINTS <= hints <= MAX_HINTS:
        raise ValueError(f"hint count {hints} outside [{MIN_HINTS}, {MAX_HINTS}]")
    return 600.0 + (3.0 - 600.0) * (hints - MIN_HINTS) / (MAX_HINTS - MIN_HINTS)


# ---------------------------------------------------------------------------
# Grid construction
# ---------------------------------------------------------------------------


def _base_grid() -> list[int]:
    # (r, c) -> ((3*(r mod 3) + r div 3 + c) mod 9) + 1 is always valid
    return [((3 * (r % 3) + r // 3 + c) % 9) + 1 for r in range(9) for c in range(9)]


def generate_full_grid(rng: np.random.Generator) -> Grid:
    """A complete valid grid: relabel digits and shuffle bands/stacks/lines."""
    cells = _base_grid()
    relabel = [int(v) + 1 for v in rng.permutation(9)]
    bands = rng.permutation(3)
    stacks = rng.permutation(3)
    rows_in = [rng.permutation(3) for _ in range(3)]
    cols_in = [rng.permutation(3) for _ in range(3)]
    row_map = [3 * bands[b] + rows_in[b][i] for b in range(3) for i in range(3)]
    col_map = [3 * stacks[s] + cols_in[s][i] for s in range(3) for i in range(3)]
    out = [0] * 81
    for r in range(9):
        for c in range(9):
            out[9 * r + c] = relabel[cells[9 * row_map[r] + col_map[c]] - 1]
    grid = tuple(out)
    if rng.random() < 0.5:
        grid = tuple(grid[9 * c + r] for r in range(9) for c in range(9))
    return grid


def grid_is_valid(grid: Grid) -> bool:
    """True iff all 81 cells are 1-9 and every row/column/box has no repeats."""
    if len(grid) != 81 or any(not 1 <= v <= 9 for v in grid):
        return False
    seen = [[0] * 9 for _ in range(3)]
    for i, v in enumerate(grid):
        bit = 1 << v
        for unit, idx in ((0, ROW[i]), (1, COL[i]), (2, BOX[i])):
            if seen[unit][idx] & bit:
                return False
            seen[unit][idx] |= bit
    return True


def dig_to_hints(solution: Grid, hints: int, rng: np.random.Generator) -> SudokuPuzzle:
    """Blank random cells of a full grid until ``hints`` givens remain."""
    if not MIN_HINTS <= hints <= MAX_HINTS:
        raise ValueError(f"hint count {hints} outside [{MIN_HINTS}, {MAX_HINTS}]")
    order = rng.permutation(81)
    cells = list(solution)
    for i in order[: 81 - hints]:
        cells[i] = 0
    givens = tuple(cells)
    try:
        unique: bool | None = count_solutions(givens, cap=2) == 1
    except SearchBudgetExceeded:
        unique = None
    return SudokuPuzzle(givens, solution, hints, unique)


# ---------------------------------------------------------------------------
# Solution counting and validation
# ---------------------------------------------------------------------------

FULL = 0b1111111110  # bits 1..9


def count_solutions(givens: Grid, cap: int = 2, node_budget: int = NODE_BUDGET) -> int:
    """Number of completions of a partial grid, capped at ``cap``.

    Backtracking over the most-constrained blank cell; contradictory givens
    count as zero. Raises SearchBudgetExceeded past ``node_budget`` expanded
    nodes so pathological instances cannot stall a request.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if len(givens) != 81 or any(not 0 <= v <= 9 for v in givens):
        raise ValueError("grid must be 81 cells of 0-9")
    rows, cols, boxes = [0] * 9, [0] * 9, [0] * 9
    blanks = []
    for i, v in enumerate(givens):
        if v == 0:
            blanks.append(i)
            continue
        bit = 1 << v
        if (rows[ROW[i]] | cols[COL[i]] | boxes[BOX[i]]) & bit:
            return 0
        rows[ROW[i]] |= bit
        cols[COL[i]] |= bit
        boxes[BOX[i]] |= bit

    nodes = 0

    def options(i: int) -> int:
        return FULL & ~(rows[ROW[i]] | cols[COL[i]] | boxes[BOX[i]])

    def search(remaining: list[int]) -> int:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise SearchBudgetExceeded(f"exceeded {node_budget} nodes")
        if not remaining:
            return 1
        k = min(range(len(remaining)), key=lambda j: bin(options(remaining[j])).count("1"))
        remaining[k], remaining[-1] = remaining[-1], remaining[k]
        cell = remaining.pop()
        total = 0
        mask = options(cell)
        while mask:
            bit = mask & -mask
            mask ^= bit
            rows[ROW[cell]] |= bit
            cols[COL[cell]] |= bit
            boxes[BOX[cell]] |= bit
            total += search(remaining)
            rows[ROW[cell]] ^= bit
            cols[COL[cell]] ^= bit
            boxes[BOX[cell]] ^= bit
            if total >= cap:
                break
        remaining.append(cell)
        remaining[k], remaining[-1] = remaining[-1], remaining[k]
        return total

    return min(search(blanks), cap)


def validate_submission(puzzle: SudokuPuzzle, submitted: Grid) -> bool:
    """True iff the submission is a valid completion honoring every given."""
    if len(submitted) != 81:
        raise ValueError("submission must have 81 cells")
    if any(g and s != g for g, s in zip(puzzle.givens, submitted)):
        return False
    return grid_is_valid(tuple(int(v) for v in submitted))


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------


def grid_to_text(grid: Grid) -> str:
    """81 digits, row-major, '0' for blank."""
    if len(grid) != 81:
        raise ValueError("grid must have 81 cells")
    return "".join(str(int(v)) for v in grid)


def text_to_grid(text: str) -> Grid:
    if len(text) != 81 or not text.isdigit():
        raise ValueError("expected exactly 81 digit characters")
    return tuple(int(ch) for ch in text)
