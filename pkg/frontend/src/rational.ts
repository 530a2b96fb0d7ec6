/** Exact rational arithmetic on bigints; the solver never touches floats. */

function gcd(a: bigint, b: bigint): bigint {
  a = a < 0n ? -a : a;
  b = b < 0n ? -b : b;
  while (b !== 0n) {
    const t = a % b;
    a = b;
    b = t;
  }
  return a;
}

export class Rat {
  readonly num: bigint;
  readonly den: bigint; // always > 0

  constructor(num: bigint, den: bigint = 1n) {
    if (den === 0n) throw new Error("division by zero");
    if (den < 0n) {
      num = -num;
      den = -den;
    }
    const g = gcd(num, den);
    this.num = g === 0n ? 0n : num / g;
    this.den = g === 0n ? 1n : den / g;
  }

  static fromInt(n: number | bigint): Rat {
    return new Rat(BigInt(n));
  }

  /** Parse "42", "3.25", or "-0.5" exactly. */
  static fromDecimal(text: string): Rat {
    const negative = text.startsWith("-");
    const body = negative ? text.slice(1) : text;
    const dot = body.indexOf(".");
    let value: Rat;
    if (dot < 0) {
      value = new Rat(BigInt(body));
    } else {
      const frac = body.slice(dot + 1);
      const whole = body.slice(0, dot);
      const scale = 10n ** BigInt(frac.length);
      value = new Rat(BigInt(whole) * scale + BigInt(frac), scale);
    }
    return negative ? value.neg() : value;
  }

  static readonly ZERO = new Rat(0n);
  static readonly ONE = new Rat(1n);

  add(other: Rat): Rat {
    return new Rat(this.num * other.den + other.num * this.den,
                   this.den * other.den);
  }

  sub(other: Rat): Rat {
    return new Rat(this.num * other.den - other.num * this.den,
                   this.den * other.den);
  }

  mul(other: Rat): Rat {
    return new Rat(this.num * other.num, this.den * other.den);
  }

  div(other: Rat): Rat {
    if (other.num === 0n) throw new Error("division by zero");
    return new Rat(this.num * other.den, this.den * other.num);
  }

  neg(): Rat {
    return new Rat(-this.num, this.den);
  }

  cmp(other: Rat): number {
    const left = this.num * other.den;
    const right = other.num * this.den;
    return left < right ? -1 : left > right ? 1 : 0;
  }

  eq(other: Rat): boolean {
    return this.num === other.num && this.den === other.den;
  }

  isZero(): boolean {
    return this.num === 0n;
  }

  isNegative(): boolean {
    return this.num < 0n;
  }

  isIntegral(): boolean {
    return this.den === 1n;
  }

  floor(): bigint {
    if (this.den === 1n) return this.num;
    const q = this.num / this.den;
    return this.num < 0n ? q - 1n : q;
  }

  ceil(): bigint {
    if (this.den === 1n) return this.num;
    const q = this.num / this.den;
    return this.num < 0n ? q : q + 1n;
  }

  /** Nearest integer, ties to even: matches Python's round(). */
  round(): bigint {
    const fl = this.floor();
    const frac = this.sub(new Rat(fl));
    const c = frac.cmp(new Rat(1n, 2n));
    if (c < 0) return fl;
    if (c > 0) return fl + 1n;
    return fl % 2n === 0n ? fl : fl + 1n;
  }

  toString(): string {
    return this.den === 1n ? this.num.toString() : `${this.num}/${this.den}`;
  }
}
