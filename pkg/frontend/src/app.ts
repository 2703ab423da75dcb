/**
 * DOM shell tying the pieces together: status header, playable content
 * area, and the model panel. One session at a time, one in-flight
 * submission at a time; the keyboard drives the Roguelike.
 */
import { ApiClient } from "./api.js";
import { renderModelPanel } from "./curve.js";
import { Action, GameState, LevelData, drawState, newGame, parseLevel, stepGame } from "./rogue.js";
import { SessionFlow } from "./session.js";
import { SudokuView, renderSudoku } from "./sudoku.js";

const KEY_ACTIONS: Record<string, Action> = {
  ArrowUp: "up",
  ArrowDown: "down",
  ArrowLeft: "left",
  ArrowRight: "right",
  x: "attack",
  ".": "wait",
};

interface RogueRuntime {
  level: LevelData;
  seed: number;
  state: GameState;
  deaths: number;
}

export class App {
  readonly flow: SessionFlow;
  private readonly doc: Document;
  private readonly statusLine: HTMLElement;
  private readonly contentArea: HTMLElement;
  private readonly modelArea: HTMLElement;
  private sudokuView: SudokuView | null = null;
  private rogue: RogueRuntime | null = null;
  private pending: Promise<void> | null = null;

  constructor(
    private readonly root: HTMLElement,
    api: ApiClient,
    now?: () => number,
  ) {
    this.doc = root.ownerDocument;
    this.flow = new SessionFlow(api, now);
    root.innerHTML = "";
    this.statusLine = this.doc.createElement("div");
    this.statusLine.className = "status";
    this.contentArea = this.doc.createElement("div");
    this.contentArea.className = "content";
    this.modelArea = this.doc.createElement("div");
    this.modelArea.className = "model";
    root.append(this.statusLine, this.contentArea, this.modelArea);
    this.doc.addEventListener("keydown", (event) => {
      const action = KEY_ACTIONS[(event as KeyboardEvent).key];
      if (action !== undefined) {
        this.act(action);
      }
    });
  }

  async start(domain: "sudoku" | "roguelike", options: Parameters<SessionFlow["start"]>[1] = {}) {
    await this.flow.start(domain, options);
    this.renderContent();
    await this.refreshModel();
  }

  /** Resolves once any in-flight submission has fully settled. */
  async settle(): Promise<void> {
    while (this.pending !== null) {
      await this.pending;
    }
  }

  get rogueState(): GameState | null {
    return this.rogue?.state ?? null;
  }

  get deaths(): number {
    return this.rogue?.deaths ?? 0;
  }

  private renderContent(): void {
    const content = this.flow.content;
    this.sudokuView = null;
    this.rogue = null;
    this.contentArea.innerHTML = "";
    if (content === null) {
      return;
    }
    if (content.domain === "sudoku") {
      this.sudokuView = renderSudoku(this.doc, content.puzzle, (solution) => {
        this.submit({ solved: true, solution });
      });
      this.contentArea.appendChild(this.sudokuView.element);
    } else {
      const level = parseLevel(content.level_text);
      this.rogue = {
        level,
        seed: content.game_seed,
        state: newGame(level, content.game_seed),
        deaths: 0,
      };
      const pre = this.doc.createElement("pre");
      pre.className = "rogue-grid";
      this.contentArea.appendChild(pre);
      this.drawRogue();
    }
    this.updateStatus();
    this.flow.contentRendered(); // the timer starts now, not at fetch time
  }

  /** Advance the Roguelike one turn. Death restarts the same level with the
   * same seed while the timer keeps running; a win submits the result. */
  act(action: Action): void {
    if (this.rogue === null || this.pending !== null) {
      return;
    }
    this.rogue.state = stepGame(this.rogue.state, action);
    if (this.rogue.state.lost) {
      this.rogue.deaths += 1;
      this.rogue.state = newGame(this.rogue.level, this.rogue.seed);
    }
    this.drawRogue();
    this.updateStatus();
    if (this.rogue.state.won) {
      this.submit({ solved: true });
    }
  }

  private submit(result: { solved: boolean; solution?: string }): void {
    if (this.pending !== null) {
      return;
    }
    this.pending = (async () => {
      try {
        await this.flow.complete(result);
        this.renderContent();
        await this.refreshModel();
      } finally {
        this.pending = null;
      }
    })();
  }

  private drawRogue(): void {
    const pre = this.contentArea.querySelector("pre.rogue-grid");
    if (pre !== null && this.rogue !== null) {
      pre.textContent = drawState(this.rogue.state).join("\n");
    }
  }

  private async refreshModel(): Promise<void> {
    try {
      const model = await this.flow.fetchModel();
      this.modelArea.innerHTML = "";
      this.modelArea.appendChild(renderModelPanel(this.doc, model));
    } catch {
      // the panel is informational; a failed fetch never blocks play
    }
  }

  private updateStatus(): void {
    const bits = [
      `${this.flow.domain} / ${this.flow.policy}`,
      `iteration ${this.flow.iteration + 1}`,
      `goal ${this.flow.goalSeconds} s`,
    ];
    if (this.rogue !== null) {
      const s = this.rogue.state;
      bits.push(
        `turn ${s.turns}`,
        s.hasKey ? "key collected" : "find the key",
        `${s.enemies.length} enemies`,
      );
      if (this.rogue.deaths > 0) {
        bits.push(`${this.rogue.deaths} deaths`);
      }
    }
    const last = this.flow.lastRecorded;
    if (last !== null) {
      bits.push(`last: ${last.elapsed_seconds.toFixed(2)} s ${last.solved ? "solved" : "unsolved"}`);
    }
    this.statusLine.textContent = bits.join(" | ");
  }
}
