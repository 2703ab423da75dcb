"""Roguelike content domain: levels, path features, corpus, and the prior.

A level is a rectangular tile grid holding an avatar, a key, a goal, and
enemies. Difficulty is summarized by two features: leniency ``l`` (enemy
count) and reachability ``r`` (shortest-path steps avatar->key plus
key->goal, 4-connected). The servable corpus is a fixed set of levels whose
features span l in [0, 24] and r in [4, 50].
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .gp import PlanePrior
from .space import DesignSpace

L_MIN, L_MAX = 0, 24
R_MIN, R_MAX = 4, 50
CORPUS_SIZE = 399
GOAL_SECONDS = 10.0

Cell = tuple[int, int]  # (row, col)

# Fixed scan order for neighbors everywhere in this domain and the game rules.
DIRECTIONS: tuple[Cell, ...] = ((-1, 0), (1, 0), (0, -1), (0, 1))


class GenerationError(RuntimeError):
    """Level or corpus construction exhausted its retry budget."""


@dataclass(frozen=True)
class Level:
    """Immutable level; feature fields are derived once at construction."""

    tiles: tuple[str, ...]  # rows of '#' (wall) and '.' (floor)
    avatar: Cell
    key: Cell
    goal: Cell
    enemies: tuple[Cell, ...]
    leniency: int
    reachability: int
    level_id: str = ""

    @property
    def height(self) -> int:
        return len(self.tiles)

    @property
    def width(self) -> int:
        return len(self.tiles[0])

    def is_floor(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width and self.tiles[r][c] == "."

    @property
    def design_point(self) -> tuple[float, float]:
        return (float(self.leniency), float(self.reachability))


@dataclass(frozen=True)
class Corpus:
    levels: tuple[Level, ...]

    def __post_init__(self) -> None:
        ids = [lv.level_id for lv in self.levels]
        if len(set(ids)) != len(ids):
            raise ValueError("corpus level ids must be distinct")

    def design_space(self) -> DesignSpace:
        return DesignSpace(
            candidates=tuple(lv.design_point for lv in self.levels),
            lower=(float(L_MIN), float(R_MIN)),
            upper=(float(L_MAX), float(R_MAX)),
        )

    def levels_at(self, point: tuple[float, float]) -> list[Level]:
        return [lv for lv in self.levels if lv.design_point == tuple(map(float, point))]


def roguelike_prior(l: float, r: float) -> float:
    """Plane from 1 s at (l=0, r=4) to 20 s at (14, 50), split evenly."""
    return 1.0 + (9.5 / 14.0) * l + (9.5 / 46.0) * (r - 4.0)


def travel_prior() -> PlanePrior:
    return PlanePrior(base_seconds=1.0, slopes=(9.5 / 14.0, 9.5 / 46.0), origin=(0.0, 4.0))


# ---------------------------------------------------------------------------
# Pathfinding
# ---------------------------------------------------------------------------


def astar_path_length(tiles: tuple[str, ...], start: Cell, goal: Cell) -> int | None:
    """Steps of a shortest 4-connected path over floor tiles, or None.

    Unit step cost with the Manhattan-distance heuristic, which is
    admissible here, so the first pop of the goal is optimal.
    """
    h, w = len(tiles), len(tiles[0])
    for cell in (start, goal):
        if not (0 <= cell[0] < h and 0 <= cell[1] < w):
            raise ValueError(f"cell {cell} out of bounds")
    if tiles[start[0]][start[1]] != "." or tiles[goal[0]][goal[1]] != ".":
        return None
    dist = {start: 0}
    frontier = [(abs(start[0] - goal[0]) + abs(start[1] - goal[1]), 0, start)]
    while frontier:
        _, g, cell = heapq.heappop(frontier)
        if cell == goal:
            return g
        if g > dist.get(cell, g):
            continue
        for dr, dc in DIRECTIONS:
            nr, nc = cell[0] + dr, cell[1] + dc
            if not (0 <= nr < h and 0 <= nc < w) or tiles[nr][nc] != ".":
                continue
            ng = g + 1
            if ng < dist.get((nr, nc), ng + 1):
                dist[(nr, nc)] = ng
                heapq.heappush(frontier, (ng + abs(nr - goal[0]) + abs(nc - goal[1]), ng, (nr, nc)))
    return None


# ---------------------------------------------------------------------------
# Level construction
# ---------------------------------------------------------------------------


def make_level(
    tiles: tuple[str, ...],
    avatar: Cell,
    key: Cell,
    goal: Cell,
    enemies: tuple[Cell, ...],
    level_id: str = "",
) -> Level:
    """Validate placements and compute features; raises on broken invariants."""
    if not tiles or len({len(row) for row in tiles}) != 1:
        raise ValueError("tiles must form a nonempty rectangle")
    if any(set(row) - {"#", "."} for row in tiles):
        raise ValueError("tiles may contain only '#' and '.'")
    specials = (avatar, key, goal)
    if len(set(specials)) != 3:
        raise ValueError("avatar, key, and goal must occupy distinct cells")
    occupied = set(specials)
    for cell in specials + tuple(enemies):
        r, c = cell
        if not (0 <= r < len(tiles) and 0 <= c < len(tiles[0])) or tiles[r][c] != ".":
            raise ValueError(f"entity at {cell} is not on a floor tile")
    for e in enemies:
        if e in occupied:
            raise ValueError(f"enemy at {e} overlaps another entity")
        occupied.add(e)
    leg1 = astar_path_length(tiles, avatar, key)
    leg2 = astar_path_length(tiles, key, goal)
    if leg1 is None or leg2 is None:
        raise ValueError("no path avatar->key->goal")
    # canonical (row-major) enemy order so serialization round-trips exactly
    ordered = tuple(sorted(enemies))
    return Level(tiles, avatar, key, goal, ordered, len(ordered), leg1 + leg2, level_id)


def _snake_tiles(r: int, width: int) -> tuple[tuple[str, ...], list[Cell]]:
    """Carve a serpentine corridor of exactly r+1 cells; walls elsewhere.

    Corridor rows alternate direction and are separated by full wall rows
    pierced only at the turning column, so the corridor admits no shortcut
    and the shortest path length equals the cell count minus one.
    """
    path: list[Cell] = [(0, 0)]
    row, col, step = 0, 0, 1
    while len(path) < r + 1:
        nxt = col + step
        if 0 <= nxt < width:
            col = nxt
        else:
            path.append((row + 1, col))  # gap in the separator wall row
            if len(path) == r + 1:
                break
            row += 2
            step = -step
        path.append((row, col))
    height = path[-1][0] + 1
    grid = [["#"] * width for _ in range(height)]
    for pr, pc in path:
        grid[pr][pc] = "."
    return tuple("".join(r_) for r_ in grid), path


def _place_enemies(
    floor: list[Cell], taken: set[Cell], count: int, rng: np.random.Generator
) -> tuple[Cell, ...] | None:
    free = [c for c in floor if c not in taken]
    if count > len(free):
        return None
    idx = rng.choice(len(free), size=count, replace=False) if count else []
    return tuple(free[int(i)] for i in idx)


def generate_level(
    rng: np.random.Generator,
    target_l: int | None = None,
    target_r: int | None = None,
    retries: int = 200,
) -> Level:
    """Sample a valid level, steering features toward the optional targets.

    Reachability targets are hit exactly by carving a serpentine corridor of
    the right length; untargeted generation mixes corridors with open rooms.
    """
    for _ in range(retries):
        want_r = target_r if target_r is not None else int(rng.integers(R_MIN, R_MAX + 1))
        if not R_MIN <= want_r <= R_MAX:
            raise ValueError(f"target reachability {want_r} outside [{R_MIN}, {R_MAX}]")
        if target_r is not None or rng.random() < 0.5:
            width = int(rng.integers(4, 13))
            tiles, path = _snake_tiles(want_r, width)
            split = int(rng.integers(1, want_r))  # key strictly inside the corridor
            avatar, key, goal = path[0], path[split], path[-1]
            floor = path
        else:
            h, w = int(rng.integers(5, 13)), int(rng.integers(5, 15))
            wall_p = rng.uniform(0.0, 0.3)
            grid = (rng.random((h, w)) < wall_p)
            tiles = tuple("".join("#" if grid[r, c] else "." for c in range(w)) for r in range(h))
            floor = [(r, c) for r in range(h) for c in range(w) if tiles[r][c] == "."]
            if len(floor) < 4:
                continue
            picks = rng.choice(len(floor), size=3, replace=False)
            avatar, key, goal = (floor[int(i)] for i in picks)
        want_l = target_l if target_l is not None else int(rng.integers(L_MIN, L_MAX + 1))
        if not L_MIN <= want_l <= L_MAX:
            raise ValueError(f"target leniency {want_l} outside [{L_MIN}, {L_MAX}]")
        enemies = _place_enemies(floor, {avatar, key, goal}, want_l, rng)
        if enemies is None:
            continue
        try:
            level = make_level(tiles, avatar, key, goal, enemies)
        except ValueError:
            continue
        if R_MIN <= level.reachability <= R_MAX and level.leniency <= L_MAX:
            if target_r is None or level.reachability == target_r:
                return level
    raise GenerationError(f"no valid level after {retries} attempts")


def mutate_level(level: Level, rng: np.random.Generator, retries: int = 20) -> Level:
    """Apply one structural or entity mutation; fall back to the input.

    Each attempt picks among duplicating/removing a row or column, toggling
    a wall, or adding/removing an enemy, then revalidates the path
    invariants. If every attempt breaks the level, the input is returned.
    """
    for _ in range(retries):
        kind = rng.choice(["add_row", "del_row", "add_col", "del_col",
                           "wall", "add_enemy", "del_enemy"])
        try:
            mutated = _apply_mutation(level, str(kind), rng)
        except ValueError:
            continue
        if mutated is not None:
            return mutated
    return level


def _shift(cell: Cell, axis: int, at: int, delta: int) -> Cell:
    return (cell[0] + (delta if axis == 0 and cell[0] > at else 0),
            cell[1] + (delta if axis == 1 and cell[1] > at else 0))


def _apply_mutation(level: Level, kind: str, rng: np.random.Generator) -> Level | None:
    rows = [list(r) for r in level.tiles]
    entities = [level.avatar, level.key, level.goal, *level.enemies]
    if kind == "add_enemy":
        extra = _place_enemies(
            [(r, c) for r in range(level.height) for c in range(level.width)
             if level.is_floor((r, c))],
            set(entities), 1, rng)
        if not extra or level.leniency + 1 > L_MAX:
            return None
        return make_level(level.tiles, level.avatar, level.key, level.goal,
                          level.enemies + extra, level.level_id)
    if kind == "del_enemy":
        if not level.enemies:
            return None
        drop = int(rng.integers(len(level.enemies)))
        kept = level.enemies[:drop] + level.enemies[drop + 1:]
        return make_level(level.tiles, level.avatar, level.key, level.goal,
                          kept, level.level_id)
    if kind == "wall":
        r, c = int(rng.integers(level.height)), int(rng.integers(level.width))
        if (r, c) in entities:
            return None
        rows[r][c] = "." if rows[r][c] == "#" else "#"
        tiles = tuple("".join(row) for row in rows)
        return make_level(tiles, level.avatar, level.key, level.goal,
                          level.enemies, level.level_id)
    axis = 0 if kind.endswith("row") else 1
    size = level.height if axis == 0 else level.width
    at = int(rng.integers(size))
    if kind.startswith("del"):
        if size <= 2 or any(e[axis] == at for e in entities):
            return None
        if axis == 0:
            del rows[at]
        else:
            for row in rows:
                del row[at]
        moved = [_shift(e, axis, at - 1, -1) for e in entities]
    else:
        if axis == 0:
            rows.insert(at + 1, list(rows[at]))
        else:
            for row in rows:
                row.insert(at + 1, row[at])
        moved = [_shift(e, axis, at, 1) for e in entities]
    tiles = tuple("".join(row) for row in rows)
    return make_level(tiles, moved[0], moved[1], moved[2], tuple(moved[3:]), level.level_id)


def build_corpus(n: int = CORPUS_SIZE, rng: np.random.Generator | None = None) -> Corpus:
    """Collect n in-bounds levels by fresh generation plus mutation."""
    if n < 1:
        raise ValueError("corpus size must be positive")
    rng = rng if rng is not None else np.random.default_rng(0)
    levels: list[Level] = []
    budget = 200 * n
    while len(levels) < n and budget > 0:
        budget -= 1
        try:
            if levels and rng.random() < 0.25:
                candidate = mutate_level(levels[int(rng.integers(len(levels)))], rng)
            else:
                candidate = generate_level(rng)
        except GenerationError:
            continue
        if (L_MIN <= candidate.leniency <= L_MAX
                and R_MIN <= candidate.reachability <= R_MAX):
            levels.append(replace(candidate, level_id=f"L{len(levels):03d}"))
    if len(levels) < n:
        raise GenerationError(f"built {len(levels)}/{n} levels before budget ran out")
    return Corpus(tuple(levels))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def level_to_text(level: Level) -> str:
    """One row per line; entities drawn over their floor tiles."""
    rows = [list(r) for r in level.tiles]
    for cell, ch in [(level.avatar, "A"), (level.key, "K"), (level.goal, "G")]:
        rows[cell[0]][cell[1]] = ch
    for e in level.enemies:
        rows[e[0]][e[1]] = "E"
    return "\n".join("".join(r) for r in rows)


def text_to_level(text: str, level_id: str = "") -> Level:
    lines = text.strip("\n").split("\n")
    found: dict[str, list[Cell]] = {"A": [], "K": [], "G": [], "E": []}
    rows = []
    for r, line in enumerate(lines):
        row = []
        for c, ch in enumerate(line):
            if ch in found:
                found[ch].append((r, c))
                ch = "."
            elif ch not in "#.":
                raise ValueError(f"unknown tile {ch!r} at {(r, c)}")
            row.append(ch)
        rows.append("".join(row))
    for name in "AKG":
        if len(found[name]) != 1:
            raise ValueError(f"expected exactly one {name!r}")
    return make_level(tuple(rows), found["A"][0], found["K"][0], found["G"][0],
                      tuple(found["E"]), level_id)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    payload = {
        "levels": [
            {
                "id": lv.level_id,
                "leniency": lv.leniency,
                "reachability": lv.reachability,
                "text": level_to_text(lv),
            }
            for lv in corpus.levels
        ]
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def load_corpus(path: str | Path) -> Corpus:
    payload = json.loads(Path(path).read_text())
    levels = []
    for entry in payload["levels"]:
        level = text_to_level(entry["text"], level_id=entry["id"])
        if (level.leniency, level.reachability) != (entry["leniency"], entry["reachability"]):
            raise ValueError(f"stored features for {entry['id']} do not match the grid")
        levels.append(level)
    return Corpus(tuple(levels))
