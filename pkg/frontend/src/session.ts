/**
 * Client-side session flow: one live session, one in-flight submission,
 * and a timer that runs from content render to completion. All difficulty
 * decisions stay on the server; this class only moves results and content
 * back and forth.
 */
import { ApiClient, Content, CreateSessionOptions, RecordedResult, SubmitOutcome } from "./api.js";
import { Timer } from "./timer.js";

export interface CompletionResult {
  solved: boolean;
  solution?: string;
}

export class SessionFlow {
  readonly timer: Timer;
  sessionId = "";
  domain = "";
  policy = "";
  goalSeconds = 0;
  iteration = 0;
  content: Content | null = null;
  lastRecorded: RecordedResult | null = null;
  private submitting = false;
  private completedElapsedMs: number | null = null;

  constructor(
    private readonly api: ApiClient,
    now?: () => number,
  ) {
    this.timer = new Timer(now);
  }

  async start(domain: "sudoku" | "roguelike", options: CreateSessionOptions = {}): Promise<Content> {
    const created = await this.api.createSession(domain, options);
    this.sessionId = created.session_id;
    this.domain = created.domain;
    this.policy = created.policy;
    this.goalSeconds = created.goal_seconds;
    this.iteration = 0;
    this.content = created.content;
    this.lastRecorded = null;
    return created.content;
  }

  /** Called by views the moment new content is on screen. */
  contentRendered(): void {
    this.timer.start();
  }

  /**
   * Stop the clock, post the result, and adopt the next content. The timer
   * is stopped before the request so the round-trip never counts. On a
   * conflict the server's current content is adopted without re-posting.
   * If the request fails, the elapsed time captured at the completion
   * event is kept so a retry reports the same duration.
   */
  async complete(result: CompletionResult): Promise<SubmitOutcome> {
    if (this.content === null) {
      throw new Error("no content to complete");
    }
    if (this.submitting) {
      throw new Error("a submission is already in flight");
    }
    const elapsedMs = this.timer.running
      ? Math.max(this.timer.stop(), 1)
      : (this.completedElapsedMs ?? 1);
    this.completedElapsedMs = elapsedMs;
    this.submitting = true;
    try {
      const outcome = await this.api.submitResult(this.sessionId, {
        content_id: this.content.content_id,
        elapsed_ms: elapsedMs,
        solved: result.solved,
        ...(result.solution !== undefined ? { solution: result.solution } : {}),
      });
      if (outcome.kind === "recorded") {
        this.lastRecorded = outcome.recorded;
        this.iteration = outcome.recorded.iteration;
        this.content = outcome.content;
      } else if (outcome.content !== null) {
        this.content = outcome.content;
      }
      this.completedElapsedMs = null;
      return outcome;
    } finally {
      this.submitting = false;
    }
  }

  async fetchModel() {
    return this.api.getModel(this.sessionId);
  }
}
