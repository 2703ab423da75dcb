"""Sudoku domain: grid generation, digging, counting, validation, wire format."""

import numpy as np
import pytest

import oracles
from goaltime.gp import prior_seconds
from goaltime.sudoku import (
    MAX_HINTS,
    MIN_HINTS,
    SearchBudgetExceeded,
    count_solutions,
    design_space,
    dig_to_hints,
    generate_full_grid,
    grid_is_valid,
    grid_to_text,
    hint_prior,
    sudoku_prior,
    text_to_grid,
    validate_submission,
)


def _full(seed: int):
    return generate_full_grid(np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# Full-grid generation
# ---------------------------------------------------------------------------


def test_generated_grids_are_valid():
    for seed in range(50):
        assert grid_is_valid(_full(seed))


def test_generation_is_deterministic():
    assert _full(123) == _full(123)


def test_generation_varies_across_seeds():
    grids = {_full(seed) for seed in range(1000)}
    assert len(grids) == 1000


def test_grid_is_valid_rejects_duplicates_and_bad_values():
    grid = list(_full(0))
    # duplicate within a row
    grid[1] = grid[0]
    assert not grid_is_valid(tuple(grid))
    grid = list(_full(0))
    grid[40] = 0  # blank not allowed in a completed grid
    assert not grid_is_valid(tuple(grid))
    grid[40] = 10
    assert not grid_is_valid(tuple(grid))
    assert not grid_is_valid(_full(0)[:80])


def test_grid_is_valid_catches_column_and_box_duplicates():
    grid = list(_full(3))
    col_dup = grid[:]
    col_dup[9] = col_dup[0]  # same column, different row/box... (0,0) vs (1,0) share a box
    col_dup[27] = grid[0]  # (3,0): same column, different box
    assert not grid_is_valid(tuple(col_dup))
    box_dup = grid[:]
    box_dup[10] = box_dup[0]  # (1,1) vs (0,0): same box only
    assert not grid_is_valid(tuple(box_dup))


# ---------------------------------------------------------------------------
# Digging
# ---------------------------------------------------------------------------


def test_dig_preserves_solution_and_hint_count():
    solution = _full(7)
    for hints in (17, 30, 45, 61, 80):
        puzzle = dig_to_hints(solution, hints, np.random.default_rng(hints))
        assert puzzle.hint_count == hints
        assert puzzle.solution == solution
        assert sum(1 for v in puzzle.givens if v) == hints
        assert all(g in (0, s) for g, s in zip(puzzle.givens, solution))


def test_dig_rejects_out_of_range_hint_counts():
    solution = _full(1)
    for hints in (16, 81, 0, -5):
        with pytest.raises(ValueError):
            dig_to_hints(solution, hints, np.random.default_rng(0))


def test_dig_is_deterministic():
    solution = _full(11)
    a = dig_to_hints(solution, 30, np.random.default_rng(42))
    b = dig_to_hints(solution, 30, np.random.default_rng(42))
    assert a == b


def test_uniqueness_is_measured_not_enforced():
    # Digging removes cells in plain random order, so at 40 hints a large
    # share of puzzles admit several completions; the flag records that.
    flags = []
    for seed in range(200):
        solution = _full(seed)
        puzzle = dig_to_hints(solution, 40, np.random.default_rng(10_000 + seed))
        assert puzzle.unique_solution is not None
        flags.append(puzzle.unique_solution)
    assert flags.count(False) >= 20
    assert flags.count(True) >= 20


def test_heavily_hinted_digs_are_mostly_unique():
    unique = 0
    for seed in range(200):
        solution = _full(seed)
        puzzle = dig_to_hints(solution, 60, np.random.default_rng(10_000 + seed))
        unique += bool(puzzle.unique_solution)
    assert unique >= 190


def test_unique_flag_agrees_with_exhaustive_enumeration():
    for seed in range(25):
        solution = _full(seed)
        puzzle = dig_to_hints(solution, 55, np.random.default_rng(seed))
        found = oracles.enumerate_completions(puzzle.givens, cap=2)
        assert puzzle.unique_solution is (len(found) == 1)
        assert puzzle.solution in found


# ---------------------------------------------------------------------------
# Solution counting
# ---------------------------------------------------------------------------


def test_count_solutions_on_complete_grids():
    assert count_solutions(_full(5)) == 1
    broken = list(_full(5))
    broken[0], broken[1] = broken[1], broken[0]
    assert count_solutions(tuple(broken)) == 0


def test_count_solutions_empty_grid_saturates_cap():
    empty = (0,) * 81
    assert count_solutions(empty, cap=1) == 1
    assert count_solutions(empty, cap=2) == 2
    assert count_solutions(empty, cap=7) == 7


def test_count_solutions_detects_contradictory_givens():
    grid = [0] * 81
    grid[0] = grid[8] = 4  # same row
    assert count_solutions(tuple(grid)) == 0
    grid = [0] * 81
    grid[0] = grid[72] = 9  # same column
    assert count_solutions(tuple(grid)) == 0
    grid = [0] * 81
    grid[0] = grid[10] = 2  # same box
    assert count_solutions(tuple(grid)) == 0


def test_count_matches_enumeration_oracle_on_moderate_grids():
    for seed in range(20):
        solution = _full(100 + seed)
        puzzle = dig_to_hints(solution, 58, np.random.default_rng(seed))
        found = oracles.enumerate_completions(puzzle.givens, cap=3)
        assert count_solutions(puzzle.givens, cap=3) == len(found)


def test_count_is_invariant_under_in_band_row_swap():
    # Swapping two rows of the same band maps completions bijectively, so the
    # capped count cannot change.
    for seed in range(20):
        solution = _full(200 + seed)
        puzzle = dig_to_hints(solution, 35, np.random.default_rng(seed))
        base = count_solutions(puzzle.givens, cap=2)
        swapped = list(puzzle.givens)
        swapped[0:9], swapped[9:18] = puzzle.givens[9:18], puzzle.givens[0:9]
        assert count_solutions(tuple(swapped), cap=2) == base


def test_count_solutions_budget_is_enforced():
    with pytest.raises(SearchBudgetExceeded):
        count_solutions((0,) * 81, cap=2, node_budget=10)


def test_count_solutions_validates_input():
    with pytest.raises(ValueError):
        count_solutions((0,) * 80)
    bad = [0] * 81
    bad[3] = 10
    with pytest.raises(ValueError):
        count_solutions(tuple(bad))
    with pytest.raises(ValueError):
        count_solutions((0,) * 81, cap=0)


# ---------------------------------------------------------------------------
# Submission validation
# ---------------------------------------------------------------------------


def test_validate_accepts_the_known_solution():
    solution = _full(9)
    puzzle = dig_to_hints(solution, 50, np.random.default_rng(2))
    assert validate_submission(puzzle, solution)


def test_validate_rejects_given_mismatch_and_invalid_grids():
    solution = _full(9)
    puzzle = dig_to_hints(solution, 50, np.random.default_rng(2))
    altered = list(solution)
    given_idx = next(i for i, v in enumerate(puzzle.givens) if v)
    altered[given_idx] = altered[given_idx] % 9 + 1
    assert not validate_submission(puzzle, tuple(altered))

    blank_idx = next(i for i, v in enumerate(puzzle.givens) if not v)
    broken = list(solution)
    broken[blank_idx] = broken[blank_idx] % 9 + 1  # breaks a row/col/box
    assert not validate_submission(puzzle, tuple(broken))

    with pytest.raises(ValueError):
        validate_submission(puzzle, solution[:80])


def test_validate_accepts_an_alternate_completion():
    # This dig is known to admit exactly two completions.
    solution = _full(21)
    puzzle = dig_to_hints(solution, 55, np.random.default_rng(21))
    assert puzzle.unique_solution is False
    found = oracles.enumerate_completions(puzzle.givens, cap=3)
    assert len(found) == 2
    alternate = next(g for g in found if g != solution)
    assert validate_submission(puzzle, alternate)


# ---------------------------------------------------------------------------
# Wire format, space, prior
# ---------------------------------------------------------------------------


def test_wire_format_round_trips():
    solution = _full(4)
    puzzle = dig_to_hints(solution, 33, np.random.default_rng(1))
    for grid in (solution, puzzle.givens):
        text = grid_to_text(grid)
        assert len(text) == 81
        assert text_to_grid(text) == grid


def test_wire_format_rejects_malformed_input():
    with pytest.raises(ValueError):
        grid_to_text((1,) * 80)
    with pytest.raises(ValueError):
        text_to_grid("1" * 80)
    with pytest.raises(ValueError):
        text_to_grid("x" * 81)


def test_design_space_covers_every_hint_count():
    space = design_space()
    assert space.dim == 1
    assert len(space.candidates) == MAX_HINTS - MIN_HINTS + 1
    assert space.candidates[0] == (float(MIN_HINTS),)
    assert space.candidates[-1] == (float(MAX_HINTS),)


def test_prior_endpoints_and_shape():
    assert sudoku_prior(17) == 600.0
    assert sudoku_prior(80) == 3.0
    values = [sudoku_prior(h) for h in range(MIN_HINTS, MAX_HINTS + 1)]
    assert all(a > b for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        sudoku_prior(16)
    with pytest.raises(ValueError):
        sudoku_prior(81)


def test_prior_object_matches_scalar_form():
    prior = hint_prior()
    hints = np.arange(MIN_HINTS, MAX_HINTS + 1, dtype=float)
    expected = np.array([sudoku_prior(h) for h in hints])
    got = prior_seconds(prior, hints.reshape(-1, 1))
    np.testing.assert_allclose(got, expected, rtol=1e-12)
