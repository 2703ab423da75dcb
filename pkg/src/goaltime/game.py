"""Deterministic turn-based rules for playing a roguelike level.

The browser client runs the same rules locally, so everything here is
pinned: the PRNG (a 32-bit mixer that any client language can reproduce
with plain integer ops), the neighbor scan order, and exactly when random
draws are consumed. One draw is consumed per enemy per turn if and only if
that enemy has at least one free adjacent cell.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .roguelike import DIRECTIONS, Cell, Level

M32 = 0xFFFFFFFF

ACTIONS = ("up", "down", "left", "right", "attack", "wait")
MOVES: dict[str, Cell] = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}
INITIAL_FACING: Cell = (0, 1)  # clients render the avatar facing right


@dataclass(frozen=True)
class Mulberry32:
    """Immutable 32-bit PRNG state; step() yields the next state and draw."""

    state: int

    def step(self) -> tuple["Mulberry32", float]:
        s = (self.state + 0x6D2B79F5) & M32
        t = s
        t = ((t ^ (t >> 15)) * (t | 1)) & M32
        t ^= (t + (((t ^ (t >> 7)) * (t | 61)) & M32)) & M32
        return Mulberry32(s), ((t ^ (t >> 14)) & M32) / 4294967296.0


@dataclass(frozen=True)
class GameState:
    level: Level
    player: Cell
    facing: Cell
    enemies: tuple[Cell, ...]
    has_key: bool
    won: bool
    lost: bool
    turns: int
    rng: Mulberry32

    @property
    def over(self) -> bool:
        return self.won or self.lost


def new_game(level: Level, seed: int) -> GameState:
    return GameState(
        level=level,
        player=level.avatar,
        facing=INITIAL_FACING,
        enemies=level.enemies,
        has_key=False,
        won=False,
        lost=False,
        turns=0,
        rng=Mulberry32(seed & M32),
    )


def step_game(state: GameState, action: str) -> GameState:
    """Advance one turn: the player acts, then every enemy takes a step.

    Moving into a wall or out of bounds turns the player in place. Walking
    onto the key picks it up; onto the goal with the key wins; onto an
    enemy, or an enemy walking onto the player, loses. Attack clears an
    enemy on the faced cell. The turn ends early on a win or loss.
    """
    if action not in ACTIONS:
        raise ValueError(f"unknown action {action!r}")
    if state.over:
        raise ValueError("game is over")

    player, facing, enemies = state.player, state.facing, list(state.enemies)
    has_key, won, lost = state.has_key, False, False

    if action in MOVES:
        facing = MOVES[action]
        target = (player[0] + facing[0], player[1] + facing[1])
        if state.level.is_floor(target):
            player = target
            if player in enemies:
                lost = True
            elif player == state.level.key:
                has_key = True
            elif player == state.level.goal and has_key:
                won = True
    elif action == "attack":
        target = (player[0] + facing[0], player[1] + facing[1])
        if target in enemies:
            enemies.remove(target)

    rng = state.rng
    if not (won or lost):
        for i, enemy in enumerate(enemies):
            free = [
                (enemy[0] + dr, enemy[1] + dc)
                for dr, dc in DIRECTIONS
                if state.level.is_floor((enemy[0] + dr, enemy[1] + dc))
                and (enemy[0] + dr, enemy[1] + dc) not in enemies
            ]
            if not free:
                continue
            rng, draw = rng.step()
            enemies[i] = free[int(draw * len(free))]
            if enemies[i] == player:
                lost = True
                break

    return replace(
        state,
        player=player,
        facing=facing,
        enemies=tuple(enemies),
        has_key=has_key,
        won=won,
        lost=lost,
        turns=state.turns + 1,
        rng=rng,
    )
