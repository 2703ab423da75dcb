/**
 * 32-bit mixer PRNG shared with the server's game rules.
 *
 * The server simulates enemy motion with the identical generator, so the
 * sequence must match bit for bit. State is immutable; step() returns the
 * advanced generator together with a draw in [0, 1).
 */
export class Mulberry32 {
  constructor(readonly state: number) {}

  step(): [Mulberry32, number] {
    const s = (this.state + 0x6d2b79f5) >>> 0;
    let t = s;
    t = Math.imul(t ^ (t >>> 15), t | 1) >>> 0;
    t = (t ^ ((t + Math.imul(t ^ (t >>> 7), t | 61)) >>> 0)) >>> 0;
    return [new Mulberry32(s), ((t ^ (t >>> 14)) >>> 0) / 4294967296];
  }
}
