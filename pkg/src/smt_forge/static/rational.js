/** Exact rational arithmetic on bigints; the solver never touches floats. */
function gcd(a, b) {
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
    constructor(num, den = 1n) {
        if (den === 0n)
            throw new Error("division by zero");
        if (den < 0n) {
            num = -num;
            den = -den;
        }
        const g = gcd(num, den);
        this.num = g === 0n ? 0n : num / g;
        this.den = g === 0n ? 1n : den / g;
    }
    static fromInt(n) {
        return new Rat(BigInt(n));
    }
    /** Parse "42", "3.25", or "-0.5" exactly. */
    static fromDecimal(text) {
        const negative = text.startsWith("-");
        const body = negative ? text.slice(1) : text;
        const dot = body.indexOf(".");
        let value;
        if (dot < 0) {
            value = new Rat(BigInt(body));
        }
        else {
            const frac = body.slice(dot + 1);
            const whole = body.slice(0, dot);
            const scale = 10n ** BigInt(frac.length);
            value = new Rat(BigInt(whole) * scale + BigInt(frac), scale);
        }
        return negative ? value.neg() : value;
    }
    add(other) {
        return new Rat(this.num * other.den + other.num * this.den, this.den * other.den);
    }
    sub(other) {
        return new Rat(this.num * other.den - other.num * this.den, this.den * other.den);
    }
    mul(other) {
        return new Rat(this.num * other.num, this.den * other.den);
    }
    div(other) {
        if (other.num === 0n)
            throw new Error("division by zero");
        return new Rat(this.num * other.den, this.den * other.num);
    }
    neg() {
        return new Rat(-this.num, this.den);
    }
    cmp(other) {
        const left = this.num * other.den;
        const right = other.num * this.den;
        return left < right ? -1 : left > right ? 1 : 0;
    }
    eq(other) {
        return this.num === other.num && this.den === other.den;
    }
    isZero() {
        return this.num === 0n;
    }
    isNegative() {
        return this.num < 0n;
    }
    isIntegral() {
        return this.den === 1n;
    }
    floor() {
        if (this.den === 1n)
            return this.num;
        const q = this.num / this.den;
        return this.num < 0n ? q - 1n : q;
    }
    ceil() {
        if (this.den === 1n)
            return this.num;
        const q = this.num / this.den;
        return this.num < 0n ? q : q + 1n;
    }
    /** Nearest integer, ties to even: matches Python's round(). */
    round() {
        const fl = this.floor();
        const frac = this.sub(new Rat(fl));
        const c = frac.cmp(new Rat(1n, 2n));
        if (c < 0)
            return fl;
        if (c > 0)
            return fl + 1n;
        return fl % 2n === 0n ? fl : fl + 1n;
    }
    toString() {
        return this.den === 1n ? this.num.toString() : `${this.num}/${this.den}`;
    }
}
Rat.ZERO = new Rat(0n);
Rat.ONE = new Rat(1n);
