/** SplitMix64 + Box-Muller + FNV-1a for the deterministic built-in backend. */

const MASK64 = (1n << 64n) - 1n;

export class SplitMix64 {
  private state: bigint;
  private spare: number | null = null;

  constructor(seed: bigint) {
    this.state = seed & MASK64;
  }

  nextU64(): bigint {
    this.state = (this.state + 0x9e3779b97f4a7c15n) & MASK64;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
    return z ^ (z >> 31n);
  }

  /** uniform in [0, 1) with 53-bit resolution */
  nextFloat(): number {
    return Number(this.nextU64() >> 11n) * 2 ** -53;
  }

  /** standard normal via Box-Muller */
  nextGauss(): number {
    if (this.spare !== null) {
      const z = this.spare;
      this.spare = null;
      return z;
    }
    const u1 = Number((this.nextU64() >> 11n) + 1n) * 2 ** -53; // (0, 1]
    const u2 = this.nextFloat();
    const r = Math.sqrt(-2 * Math.log(u1));
    const theta = 2 * Math.PI * u2;
    this.spare = r * Math.sin(theta);
    return r * Math.cos(theta);
  }

  gaussVector(n: number): Float64Array {
    const out = new Float64Array(n);
    for (let i = 0; i < n; i++) out[i] = this.nextGauss();
    return out;
  }
}

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;

export function fnv1a64(data: Uint8Array): bigint {
  let h = FNV_OFFSET;
  for (const byte of data) {
    h ^= BigInt(byte);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h;
}

/** per-prompt stream seed: FNV-1a over (seed LE64 || utf-8 text) */
export function textStreamSeed(seed: bigint, text: string): bigint {
  const buf = Buffer.alloc(8);
  buf.writeBigUInt64LE(seed & MASK64);
  return fnv1a64(Buffer.concat([buf, Buffer.from(text, "utf-8")]));
}
