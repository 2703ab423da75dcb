/**
 * Completion timer. Starts when content is rendered and stops on the
 * completion event, so network round-trips never count toward the
 * reported time. The clock is injectable for tests.
 */
export class Timer {
  private startedAt: number | null = null;

  constructor(private readonly now: () => number = () => performance.now()) {}

  get running(): boolean {
    return this.startedAt !== null;
  }

  start(): void {
    this.startedAt = this.now();
  }

  /** Milliseconds since start without stopping, 0 when idle. */
  peek(): number {
    return this.startedAt === null ? 0 : this.now() - this.startedAt;
  }

  /** Stop and return elapsed milliseconds. */
  stop(): number {
    if (this.startedAt === null) {
      throw new Error("timer is not running");
    }
    const elapsed = this.now() - this.startedAt;
    this.startedAt = null;
    return elapsed;
  }
}
