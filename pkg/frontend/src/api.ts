/**
 * Typed client for the session service JSON API.
 *
 * Submissions are idempotent on the server (keyed by content_id), so
 * network failures are retried with the same body; a 409 means the result
 * was already recorded (or is stale) and carries the currently served
 * content, which callers use to resynchronize instead of double-posting.
 */

export interface SudokuContent {
  domain: "sudoku";
  content_id: string;
  design_point: number[];
  hint_count: number;
  puzzle: string;
}

export interface RogueContent {
  domain: "roguelike";
  content_id: string;
  design_point: number[];
  level_id: string;
  level_text: string;
  leniency: number;
  reachability: number;
  game_seed: number;
}

export type Content = SudokuContent | RogueContent;

export interface CreateSessionResponse {
  session_id: string;
  domain: string;
  policy: string;
  goal_seconds: number;
  content: Content;
}

export interface RecordedResult {
  design_point: number[];
  elapsed_seconds: number;
  solved: boolean;
  iteration: number;
}

export type SubmitOutcome =
  | { kind: "recorded"; recorded: RecordedResult; content: Content }
  | { kind: "conflict"; content: Content | null };

export interface ModelPoint {
  design_point: number[];
  predicted_seconds: number;
  std_log: number;
}

export interface ModelResponse {
  policy: string;
  goal_seconds: number;
  observations: { design_point: number[]; elapsed_seconds: number; solved: boolean }[];
  points: ModelPoint[];
}

export interface CreateSessionOptions {
  policy?: string;
  goal_seconds?: number;
  seed?: number;
}

export interface SubmitBody {
  content_id: string;
  elapsed_ms: number;
  solved?: boolean;
  solution?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`request failed with status ${status}`);
  }
}

export interface ApiClientOptions {
  baseUrl?: string;
  fetchFn?: typeof fetch;
  retries?: number;
  retryDelayMs?: number;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: typeof fetch;
  private readonly retries: number;
  private readonly retryDelayMs: number;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.fetchFn = options.fetchFn ?? fetch;
    this.retries = options.retries ?? 2;
    this.retryDelayMs = options.retryDelayMs ?? 250;
  }

  /** Retries network failures; HTTP error statuses are returned, not retried. */
  private async request(path: string, init: RequestInit): Promise<Response> {
    let lastError: unknown;
    for (let attempt = 0; attempt <= this.retries; attempt++) {
      try {
        return await this.fetchFn(this.baseUrl + path, init);
      } catch (err) {
        lastError = err;
        if (attempt < this.retries) {
          await sleep(this.retryDelayMs * (attempt + 1));
        }
      }
    }
    throw lastError;
  }

  private async json<T>(response: Response): Promise<T> {
    if (!response.ok) {
      let detail: unknown = null;
      try {
        detail = (await response.json()).detail;
      } catch {
        // non-JSON error body
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async health(): Promise<{ status: string; sessions: number }> {
    return this.json(await this.request("/healthz", { method: "GET" }));
  }

  async createSession(
    domain: "sudoku" | "roguelike",
    options: CreateSessionOptions = {},
  ): Promise<CreateSessionResponse> {
    const response = await this.request("/api/session", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ domain, ...options }),
    });
    return this.json(response);
  }

  async submitResult(sessionId: string, body: SubmitBody): Promise<SubmitOutcome> {
    const response = await this.request(`/api/session/${sessionId}/result`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (response.status === 409) {
      const payload = (await response.json()) as {
        detail?: { content?: Content | null };
      };
      return { kind: "conflict", content: payload.detail?.content ?? null };
    }
    const data = await this.json<{ recorded: RecordedResult; content: Content }>(response);
    return { kind: "recorded", ...data };
  }

  async getModel(sessionId: string): Promise<ModelResponse> {
    return this.json(await this.request(`/api/session/${sessionId}/model`, { method: "GET" }));
  }
}
