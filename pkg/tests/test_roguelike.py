"""Roguelike domain: pathfinding, level generation, mutation, corpus, prior."""

import json
from functools import lru_cache

import numpy as np
import pytest

import oracles
from goaltime.gp import prior_seconds
from goaltime.roguelike import (
    CORPUS_SIZE,
    L_MAX,
    L_MIN,
    R_MAX,
    R_MIN,
    Corpus,
    _apply_mutation,
    astar_path_length,
    build_corpus,
    generate_level,
    level_to_text,
    load_corpus,
    make_level,
    mutate_level,
    roguelike_prior,
    save_corpus,
    text_to_level,
    travel_prior,
)

OPEN_5X5 = ("." * 5,) * 5


def _recomputed_features(level):
    leg1 = astar_path_length(level.tiles, level.avatar, level.key)
    leg2 = astar_path_length(level.tiles, level.key, level.goal)
    return len(level.enemies), leg1 + leg2


def _assert_valid(level):
    assert level.is_floor(level.avatar)
    assert level.is_floor(level.key)
    assert level.is_floor(level.goal)
    assert len({level.avatar, level.key, level.goal}) == 3
    for e in level.enemies:
        assert level.is_floor(e)
        assert e not in (level.avatar, level.key, level.goal)
    assert len(set(level.enemies)) == len(level.enemies)
    assert _recomputed_features(level) == (level.leniency, level.reachability)


# ---------------------------------------------------------------------------
# Pathfinding
# ---------------------------------------------------------------------------


def test_adjacent_floor_cells_are_one_step():
    assert astar_path_length(OPEN_5X5, (2, 2), (2, 3)) == 1
    assert astar_path_length(OPEN_5X5, (2, 2), (2, 2)) == 0


def test_enclosed_target_is_unreachable():
    tiles = (
        ".....",
        ".###.",
        ".#.#.",
        ".###.",
        ".....",
    )
    assert astar_path_length(tiles, (0, 0), (2, 2)) is None


def test_open_grid_corner_to_corner():
    assert astar_path_length(OPEN_5X5, (0, 0), (4, 4)) == 8
    assert oracles.bfs_path_length(OPEN_5X5, (0, 0), (4, 4)) == 8


def test_wall_endpoints_and_bounds():
    tiles = ("..#", "...")
    assert astar_path_length(tiles, (0, 0), (0, 2)) is None
    assert astar_path_length(tiles, (0, 2), (0, 0)) is None
    with pytest.raises(ValueError):
        astar_path_length(tiles, (0, 0), (5, 5))


def test_astar_matches_bfs_oracle_on_random_grids():
    rng = np.random.default_rng(77)
    for _ in range(100):
        h, w = int(rng.integers(3, 11)), int(rng.integers(3, 11))
        wall_p = rng.uniform(0.0, 0.55)
        tiles = tuple(
            "".join("#" if rng.random() < wall_p else "." for _ in range(w))
            for _ in range(h)
        )
        start = (int(rng.integers(h)), int(rng.integers(w)))
        goal = (int(rng.integers(h)), int(rng.integers(w)))
        assert astar_path_length(tiles, start, goal) == oracles.bfs_path_length(
            tiles, start, goal
        )


# ---------------------------------------------------------------------------
# Level construction and validation
# ---------------------------------------------------------------------------


def test_make_level_computes_features():
    level = make_level(OPEN_5X5, (0, 0), (0, 4), (4, 4), ((2, 2), (1, 1)))
    assert level.leniency == 2
    assert level.reachability == 4 + 4
    assert level.design_point == (2.0, 8.0)
    assert level.enemies == ((1, 1), (2, 2))  # canonical row-major order


def test_make_level_rejects_broken_inputs():
    with pytest.raises(ValueError):
        make_level(("...", ".."), (0, 0), (0, 1), (0, 2), ())  # ragged rows
    with pytest.raises(ValueError):
        make_level(("..x",), (0, 0), (0, 1), (0, 2), ())  # bad tile char
    with pytest.raises(ValueError):
        make_level(OPEN_5X5, (0, 0), (0, 0), (4, 4), ())  # key on avatar
    with pytest.raises(ValueError):
        make_level(("#..",), (0, 0), (0, 1), (0, 2), ())  # avatar on a wall
    with pytest.raises(ValueError):
        make_level(OPEN_5X5, (0, 0), (0, 4), (4, 4), ((0, 4),))  # enemy on key
    with pytest.raises(ValueError):
        make_level(OPEN_5X5, (0, 0), (0, 4), (4, 4), ((2, 2), (2, 2)))
    with pytest.raises(ValueError):
        make_level(("..#..",), (0, 0), (0, 1), (0, 4), ())  # goal unreachable


def test_generated_levels_satisfy_invariants():
    for seed in range(30):
        _assert_valid(generate_level(np.random.default_rng(seed)))


def test_generate_honors_zero_enemy_target():
    level = generate_level(np.random.default_rng(3), target_l=0)
    assert level.leniency == 0
    assert level.enemies == ()


def test_generate_hits_reachability_targets_exactly():
    for want in (R_MIN, 10, 25, R_MAX):
        level = generate_level(np.random.default_rng(want), target_r=want)
        assert level.reachability == want
        _assert_valid(level)


def test_generate_rejects_out_of_range_targets():
    with pytest.raises(ValueError):
        generate_level(np.random.default_rng(0), target_r=R_MAX + 1)
    with pytest.raises(ValueError):
        generate_level(np.random.default_rng(0), target_l=L_MAX + 1)


def test_generate_is_deterministic():
    assert generate_level(np.random.default_rng(9)) == generate_level(
        np.random.default_rng(9)
    )


def test_seeded_generations_cover_the_feature_space():
    rng = np.random.default_rng(123)
    pairs = set()
    levels = [generate_level(rng) for _ in range(399)]
    for level in levels:
        assert L_MIN <= level.leniency <= L_MAX
        assert R_MIN <= level.reachability <= R_MAX
        pairs.add(level.design_point)
    assert len(pairs) >= 30
    assert min(l for l, _ in pairs) == L_MIN
    assert max(r for _, r in pairs) >= R_MAX - 2


# ---------------------------------------------------------------------------
# Mutation
# ---------------------------------------------------------------------------


def test_removing_an_enemy_decrements_leniency():
    level = generate_level(np.random.default_rng(1), target_l=5)
    assert level.leniency == 5
    mutated = _apply_mutation(level, "del_enemy", np.random.default_rng(0))
    assert mutated is not None
    assert mutated.leniency == 4
    _assert_valid(mutated)


def test_mutations_preserve_invariants():
    level = generate_level(np.random.default_rng(2))
    rng = np.random.default_rng(5)
    for _ in range(50):
        level = mutate_level(level, rng)
        _assert_valid(level)


def test_chained_mutations_explore_the_feature_space():
    level = generate_level(np.random.default_rng(4), target_l=5, target_r=20)
    rng = np.random.default_rng(8)
    pairs = set()
    for _ in range(100):
        level = mutate_level(level, rng)
        pairs.add(level.design_point)
    assert len(pairs) >= 20


def test_mutation_is_deterministic_and_falls_back_on_zero_retries():
    level = generate_level(np.random.default_rng(6))
    a = mutate_level(level, np.random.default_rng(13))
    b = mutate_level(level, np.random.default_rng(13))
    assert a == b
    assert mutate_level(level, np.random.default_rng(13), retries=0) == level


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _corpus():
    return build_corpus(rng=np.random.default_rng(2024))


def test_default_corpus_has_exactly_399_valid_levels():
    corpus = _corpus()
    assert len(corpus.levels) == CORPUS_SIZE
    ids = [lv.level_id for lv in corpus.levels]
    assert ids == [f"L{i:03d}" for i in range(CORPUS_SIZE)]
    for level in corpus.levels:
        assert L_MIN <= level.leniency <= L_MAX
        assert R_MIN <= level.reachability <= R_MAX
        _assert_valid(level)


def test_corpus_build_is_deterministic():
    again = build_corpus(rng=np.random.default_rng(2024))
    assert again == _corpus()


def test_corpus_file_is_byte_identical_for_fixed_seed(tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_corpus(_corpus(), p1)
    save_corpus(build_corpus(rng=np.random.default_rng(2024)), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_corpus_design_space_and_lookup():
    corpus = _corpus()
    space = corpus.design_space()
    assert len(space.candidates) == CORPUS_SIZE
    assert space.lower == (float(L_MIN), float(R_MIN))
    assert space.upper == (float(L_MAX), float(R_MAX))
    point = corpus.levels[17].design_point
    hits = corpus.levels_at(point)
    assert corpus.levels[17] in hits
    assert all(lv.design_point == point for lv in hits)


def test_corpus_rejects_bad_sizes_and_duplicate_ids():
    with pytest.raises(ValueError):
        build_corpus(n=0)
    level = generate_level(np.random.default_rng(0))
    with pytest.raises(ValueError):
        Corpus((level, level))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_level_text_round_trip_is_identity():
    rng = np.random.default_rng(31)
    for _ in range(20):
        level = generate_level(rng)
        assert text_to_level(level_to_text(level), level.level_id) == level


def test_text_to_level_rejects_malformed_maps():
    with pytest.raises(ValueError):
        text_to_level("AK?\nG..")
    with pytest.raises(ValueError):
        text_to_level("AK.\n...")  # no goal
    with pytest.raises(ValueError):
        text_to_level("AKG\nK..")  # two keys


def test_corpus_file_round_trip(tmp_path):
    corpus = _corpus()
    path = tmp_path / "corpus.json"
    save_corpus(corpus, path)
    assert load_corpus(path) == corpus


def test_load_rejects_tampered_feature_metadata(tmp_path):
    corpus = _corpus()
    path = tmp_path / "corpus.json"
    save_corpus(corpus, path)
    payload = json.loads(path.read_text())
    payload["levels"][0]["reachability"] += 1
    path.write_text(json.dumps(payload))
    with pytest.raises(ValueError):
        load_corpus(path)


# ---------------------------------------------------------------------------
# Prior
# ---------------------------------------------------------------------------


def test_prior_anchor_points():
    assert roguelike_prior(0, 4) == 1.0
    assert roguelike_prior(14, 50) == pytest.approx(20.0, abs=1e-12)
    assert roguelike_prior(7, 27) == pytest.approx(10.5, abs=1e-12)


def test_prior_object_matches_scalar_form():
    prior = travel_prior()
    rng = np.random.default_rng(2)
    pts = np.column_stack([rng.uniform(0, 24, 50), rng.uniform(4, 50, 50)])
    expected = np.array([roguelike_prior(l, r) for l, r in pts])
    np.testing.assert_allclose(prior_seconds(prior, pts), expected, rtol=1e-12)
