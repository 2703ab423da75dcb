/**
 * Level parsing and the turn-based game rules, replicated move for move
 * from the server so enemy motion can be simulated locally without a
 * round-trip per keypress. Everything that consumes randomness is pinned:
 * the PRNG, the neighbor scan order (up, down, left, right), and the rule
 * that one draw is consumed per enemy per turn iff it has a free neighbor.
 */
import { Mulberry32 } from "./rng.js";

export type Cell = readonly [number, number];

export const DIRECTIONS: readonly Cell[] = [
  [-1, 0],
  [1, 0],
  [0, -1],
  [0, 1],
];

export const ACTIONS = ["up", "down", "left", "right", "attack", "wait"] as const;
export type Action = (typeof ACTIONS)[number];

const MOVES: Partial<Record<Action, Cell>> = {
  up: [-1, 0],
  down: [1, 0],
  left: [0, -1],
  right: [0, 1],
};

export const INITIAL_FACING: Cell = [0, 1];

export interface LevelData {
  readonly tiles: readonly string[]; // rows of '#' and '.'
  readonly avatar: Cell;
  readonly key: Cell;
  readonly goal: Cell;
  readonly enemies: readonly Cell[]; // row-major order, matching the server
}

export interface GameState {
  readonly level: LevelData;
  readonly player: Cell;
  readonly facing: Cell;
  readonly enemies: readonly Cell[];
  readonly hasKey: boolean;
  readonly won: boolean;
  readonly lost: boolean;
  readonly turns: number;
  readonly rng: Mulberry32;
}

export function sameCell(a: Cell, b: Cell): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

export function isFloor(level: LevelData, cell: Cell): boolean {
  const [r, c] = cell;
  const row = level.tiles[r];
  return row !== undefined && c >= 0 && c < row.length && row[c] === ".";
}

/** Parse the wire format: '#'/'.' tiles with A, K, G, E drawn on top. */
export function parseLevel(text: string): LevelData {
  const lines = text.replace(/^\n+|\n+$/g, "").split("\n");
  if (lines.length === 0 || lines[0] === "") {
    throw new Error("empty level");
  }
  const width = lines[0]!.length;
  const found: Record<"A" | "K" | "G" | "E", Cell[]> = { A: [], K: [], G: [], E: [] };
  const tiles: string[] = [];
  lines.forEach((line, r) => {
    if (line.length !== width) {
      throw new Error(`ragged level: row ${r} has width ${line.length}, expected ${width}`);
    }
    let row = "";
    for (let c = 0; c < line.length; c++) {
      let ch = line[c]!;
      if (ch === "A" || ch === "K" || ch === "G" || ch === "E") {
        found[ch].push([r, c]);
        ch = ".";
      } else if (ch !== "#" && ch !== ".") {
        throw new Error(`unknown tile ${JSON.stringify(ch)} at (${r}, ${c})`);
      }
      row += ch;
    }
    tiles.push(row);
  });
  for (const name of ["A", "K", "G"] as const) {
    if (found[name].length !== 1) {
      throw new Error(`expected exactly one ${name}, found ${found[name].length}`);
    }
  }
  // row-major enemy order determines who draws first each turn
  const enemies = [...found.E].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  return {
    tiles,
    avatar: found.A[0]!,
    key: found.K[0]!,
    goal: found.G[0]!,
    enemies,
  };
}

export function newGame(level: LevelData, seed: number): GameState {
  return {
    level,
    player: level.avatar,
    facing: INITIAL_FACING,
    enemies: level.enemies,
    hasKey: false,
    won: false,
    lost: false,
    turns: 0,
    rng: new Mulberry32(seed >>> 0),
  };
}

/**
 * Advance one turn: the player acts, then every enemy takes a step.
 *
 * Moving into a wall or out of bounds turns the player in place. Walking
 * onto the key picks it up; onto the goal with the key wins; onto an
 * enemy, or an enemy walking onto the player, loses. Attack clears an
 * enemy on the faced cell. The turn ends early on a win or loss.
 */
export function stepGame(state: GameState, action: Action): GameState {
  if (!ACTIONS.includes(action)) {
    throw new Error(`unknown action ${JSON.stringify(action)}`);
  }
  if (state.won || state.lost) {
    throw new Error("game is over");
  }

  let player = state.player;
  let facing = state.facing;
  const enemies: Cell[] = [...state.enemies];
  let hasKey = state.hasKey;
  let won = false;
  let lost = false;

  const move = MOVES[action];
  if (move !== undefined) {
    facing = move;
    const target: Cell = [player[0] + facing[0], player[1] + facing[1]];
    if (isFloor(state.level, target)) {
      player = target;
      if (enemies.some((e) => sameCell(e, player))) {
        lost = true;
      } else if (sameCell(player, state.level.key)) {
        hasKey = true;
      } else if (sameCell(player, state.level.goal) && hasKey) {
        won = true;
      }
    }
  } else if (action === "attack") {
    const target: Cell = [player[0] + facing[0], player[1] + facing[1]];
    const hit = enemies.findIndex((e) => sameCell(e, target));
    if (hit >= 0) {
      enemies.splice(hit, 1);
    }
  }

  let rng = state.rng;
  if (!(won || lost)) {
    for (let i = 0; i < enemies.length; i++) {
      const enemy = enemies[i]!;
      const free: Cell[] = [];
      for (const [dr, dc] of DIRECTIONS) {
        const cand: Cell = [enemy[0] + dr, enemy[1] + dc];
        if (isFloor(state.level, cand) && !enemies.some((e) => sameCell(e, cand))) {
          free.push(cand);
        }
      }
      if (free.length === 0) {
        continue;
      }
      const [next, draw] = rng.step();
      rng = next;
      enemies[i] = free[Math.floor(draw * free.length)]!;
      if (sameCell(enemies[i]!, player)) {
        lost = true;
        break;
      }
    }
  }

  return {
    level: state.level,
    player,
    facing,
    enemies,
    hasKey,
    won,
    lost,
    turns: state.turns + 1,
    rng,
  };
}

/** Character grid of the live state, for rendering and debugging. */
export function drawState(state: GameState): string[] {
  const rows = state.level.tiles.map((row) => row.split(""));
  const put = (cell: Cell, ch: string) => {
    rows[cell[0]]![cell[1]] = ch;
  };
  if (!state.hasKey) {
    put(state.level.key, "K");
  }
  put(state.level.goal, "G");
  for (const e of state.enemies) {
    put(e, "E");
  }
  if (!state.won) {
    put(state.player, "A");
  }
  return rows.map((r) => r.join(""));
}
