/** Exact linear arithmetic over rationals and integers.
 *
 * A faithful port of the build engine's arithmetic core: Gaussian
 * elimination for equalities, Fourier-Motzkin projection for
 * inequalities, bounded integer box search, disequality sign splitting.
 * Every deterministic choice (pivot order, elimination order, sample
 * points, heuristic offsets, budgets) matches the build-side solver so
 * client runs reproduce build outputs bit for bit.
 */
import { Rat } from "./rational.js";
export const SAT = "sat";
export const UNSAT = "unsat";
export const UNKNOWN = "unknown";
const MAX_FM_ROWS = 20000;
const MAX_BOX_POINTS = 200000;
const HEURISTIC_OFFSETS = [];
for (let k = -6n; k <= 6n; k += 1n)
    HEURISTIC_OFFSETS.push(k);
class BudgetExceeded extends Error {
}
export class Lin {
    constructor(coeffs, konst = Rat.ZERO) {
        this.coeffs = coeffs ?? new Map();
        this.konst = konst;
    }
    static constant(value) {
        return new Lin(new Map(), value);
    }
    static variable(name) {
        return new Lin(new Map([[name, Rat.ONE]]), Rat.ZERO);
    }
    copy() {
        return new Lin(new Map(this.coeffs), this.konst);
    }
    add(other) {
        const out = new Map(this.coeffs);
        for (const [v, c] of other.coeffs) {
            const next = (out.get(v) ?? Rat.ZERO).add(c);
            if (next.isZero())
                out.delete(v);
            else
                out.set(v, next);
        }
        return new Lin(out, this.konst.add(other.konst));
    }
    scale(k) {
        if (k.isZero())
            return new Lin();
        const out = new Map();
        for (const [v, c] of this.coeffs)
            out.set(v, c.mul(k));
        return new Lin(out, this.konst.mul(k));
    }
    sub(other) {
        return this.add(other.scale(Rat.ONE.neg()));
    }
    substitute(bindings) {
        let out = new Lin(new Map(), this.konst);
        for (const [v, c] of this.coeffs) {
            const bound = bindings.get(v);
            if (bound !== undefined)
                out = out.add(bound.scale(c));
            else
                out = out.add(new Lin(new Map([[v, c]]), Rat.ZERO));
        }
        return out;
    }
    evaluate(values) {
        let total = this.konst;
        for (const [v, c] of this.coeffs) {
            const value = values.get(v);
            if (value === undefined)
                throw new Error(`no value for ${v}`);
            total = total.add(c.mul(value));
        }
        return total;
    }
    variables() {
        return [...this.coeffs.keys()];
    }
    isConstant() {
        return this.coeffs.size === 0;
    }
}
function rowHolds(row, values) {
    const value = row.lin.evaluate(values);
    return row.strict ? value.isNegative() : value.isNegative() || value.isZero();
}
function compareNames(a, b) {
    return a < b ? -1 : a > b ? 1 : 0;
}
function eliminate(rows, variable) {
    const lowers = [];
    const uppers = [];
    const rest = [];
    for (const { lin, strict } of rows) {
        const c = lin.coeffs.get(variable);
        if (c === undefined || c.isZero()) {
            rest.push({ lin, strict });
            continue;
        }
        const bound = lin.copy();
        bound.coeffs.delete(variable);
        const scaled = bound.scale(Rat.ONE.neg().div(c));
        if (c.cmp(Rat.ZERO) > 0)
            uppers.push({ bound: scaled, strict });
        else
            lowers.push({ bound: scaled, strict });
    }
    for (const lo of lowers) {
        for (const hi of uppers) {
            rest.push({ lin: lo.bound.sub(hi.bound), strict: lo.strict || hi.strict });
            if (rest.length > MAX_FM_ROWS)
                throw new BudgetExceeded();
        }
    }
    return rest;
}
function sample(rows, variables) {
    if (variables.length === 0) {
        for (const row of rows) {
            if (!rowHolds(row, new Map()))
                return null;
        }
        return new Map();
    }
    const variable = variables[0];
    const projected = eliminate(rows, variable);
    const inner = sample(projected, variables.slice(1));
    if (inner === null)
        return null;
    let lower = null;
    let lowerStrict = false;
    let upper = null;
    let upperStrict = false;
    for (const { lin, strict } of rows) {
        const c = lin.coeffs.get(variable);
        if (c === undefined || c.isZero())
            continue;
        const bound = lin.copy();
        bound.coeffs.delete(variable);
        const value = bound.scale(Rat.ONE.neg().div(c)).evaluate(inner);
        if (c.cmp(Rat.ZERO) > 0) {
            if (upper === null || value.cmp(upper) < 0 || (value.eq(upper) && strict)) {
                upper = value;
                upperStrict = strict;
            }
        }
        else {
            if (lower === null || value.cmp(lower) > 0 || (value.eq(lower) && strict)) {
                lower = value;
                lowerStrict = strict;
            }
        }
    }
    let choice;
    if (lower === null && upper === null)
        choice = Rat.ZERO;
    else if (lower === null)
        choice = upper.sub(Rat.ONE);
    else if (upper === null)
        choice = lower.add(Rat.ONE);
    else if (lower.cmp(upper) < 0)
        choice = lower.add(upper).div(new Rat(2n));
    else {
        if (lowerStrict || upperStrict)
            return null;
        choice = lower;
    }
    inner.set(variable, choice);
    return inner;
}
function projectionInterval(rows, variable, others) {
    let reduced = rows;
    for (const other of others)
        reduced = eliminate(reduced, other);
    let lo = null;
    let hi = null;
    let loStrict = false;
    let hiStrict = false;
    for (const { lin, strict } of reduced) {
        const c = lin.coeffs.get(variable);
        if (c === undefined || c.isZero())
            continue;
        const value = lin.konst.neg().div(c);
        if (c.cmp(Rat.ZERO) > 0) {
            if (hi === null || value.cmp(hi) < 0 || (value.eq(hi) && strict)) {
                hi = value;
                hiStrict = strict;
            }
        }
        else {
            if (lo === null || value.cmp(lo) > 0 || (value.eq(lo) && strict)) {
                lo = value;
                loStrict = strict;
            }
        }
    }
    return { lo, loStrict, hi, hiStrict };
}
function intRange(bounds) {
    let ilo = null;
    if (bounds.lo !== null) {
        const fl = bounds.lo.floor();
        ilo = bounds.loStrict && bounds.lo.eq(new Rat(fl)) ? fl + 1n : bounds.lo.ceil();
    }
    let ihi = null;
    if (bounds.hi !== null) {
        const ce = bounds.hi.ceil();
        ihi = bounds.hiStrict && bounds.hi.eq(new Rat(ce)) ? ce - 1n : bounds.hi.floor();
    }
    return { ilo, ihi };
}
class System {
    constructor(rows, pivots, free) {
        this.rows = rows;
        this.pivots = pivots;
        this.free = free;
    }
    assignmentFrom(freeValues) {
        const values = new Map(freeValues);
        for (const [variable, expr] of this.pivots) {
            values.set(variable, expr.evaluate(freeValues));
        }
        return values;
    }
}
function gauss(equalities, intVars) {
    const pivots = new Map();
    for (let eq of equalities) {
        eq = eq.substitute(pivots);
        if (eq.isConstant()) {
            if (!eq.konst.isZero())
                return { pivots: new Map(), consistent: false };
            continue;
        }
        const candidates = eq.variables().sort((a, b) => {
            const ai = intVars.has(a) ? 1 : 0;
            const bi = intVars.has(b) ? 1 : 0;
            return ai !== bi ? ai - bi : compareNames(a, b);
        });
        const pivot = candidates[0];
        const coef = eq.coeffs.get(pivot);
        const expr = eq.copy();
        expr.coeffs.delete(pivot);
        const solved = expr.scale(Rat.ONE.neg().div(coef));
        for (const [variable, prior] of [...pivots]) {
            pivots.set(variable, prior.substitute(new Map([[pivot, solved]])));
        }
        pivots.set(pivot, solved);
    }
    return { pivots, consistent: true };
}
function checkCandidate(system, candidate, remainingFree, intVars) {
    const bindings = new Map();
    for (const [v, x] of candidate)
        bindings.set(v, Lin.constant(x));
    const rows = system.rows.map(({ lin, strict }) => ({ lin: lin.substitute(bindings), strict }));
    const inner = sample(rows, remainingFree);
    if (inner === null)
        return null;
    const freeValues = new Map(candidate);
    for (const [v, x] of inner)
        freeValues.set(v, x);
    const values = system.assignmentFrom(freeValues);
    for (const variable of intVars) {
        const value = values.get(variable);
        if (value !== undefined && !value.isIntegral())
            return null;
    }
    for (const row of system.rows) {
        if (!rowHolds(row, freeValues))
            return null;
    }
    return values;
}
function* cartesian(axes) {
    if (axes.length === 0) {
        yield [];
        return;
    }
    const [first, ...rest] = axes;
    for (const value of first) {
        for (const tail of cartesian(rest))
            yield [value, ...tail];
    }
}
function integerSearch(system, rationalSample, intVars) {
    const freeInt = system.free.filter((v) => intVars.has(v)).sort(compareNames);
    const freeReal = system.free.filter((v) => !intVars.has(v));
    const ranges = [];
    for (const variable of freeInt) {
        const others = system.free.filter((v) => v !== variable);
        const { ilo, ihi } = intRange(projectionInterval(system.rows, variable, others));
        if (ilo !== null && ihi !== null && ilo > ihi)
            return { verdict: UNSAT, values: null };
        ranges.push({ variable, ilo, ihi });
    }
    const bounded = ranges.every((r) => r.ilo !== null && r.ihi !== null);
    if (bounded) {
        let total = 1n;
        for (const r of ranges) {
            total *= r.ihi - r.ilo + 1n;
            if (total > BigInt(MAX_BOX_POINTS))
                return { verdict: UNKNOWN, values: null };
        }
        const axes = ranges.map((r) => {
            const axis = [];
            for (let v = r.ilo; v <= r.ihi; v += 1n)
                axis.push(v);
            return axis;
        });
        for (const point of cartesian(axes)) {
            const candidate = new Map();
            ranges.forEach((r, i) => candidate.set(r.variable, new Rat(point[i])));
            const values = checkCandidate(system, candidate, freeReal, intVars);
            if (values !== null)
                return { verdict: SAT, values };
        }
        return { verdict: UNSAT, values: null };
    }
    const axes = [];
    for (const r of ranges) {
        const base = (rationalSample.get(r.variable) ?? Rat.ZERO).round();
        const points = [];
        for (const off of HEURISTIC_OFFSETS)
            points.push(base + off);
        if (r.ilo !== null)
            points.push(r.ilo, r.ilo + 1n);
        if (r.ihi !== null)
            points.push(r.ihi, r.ihi - 1n);
        const seen = [];
        for (const p of points) {
            const inRange = (r.ilo === null || p >= r.ilo) && (r.ihi === null || p <= r.ihi);
            if (inRange && !seen.includes(p))
                seen.push(p);
        }
        axes.push({ variable: r.variable, points: seen });
    }
    let total = 1n;
    for (const axis of axes)
        total *= BigInt(Math.max(axis.points.length, 1));
    if (total > 4096n)
        return { verdict: UNKNOWN, values: null };
    for (const point of cartesian(axes.map((a) => a.points))) {
        const candidate = new Map();
        axes.forEach((axis, i) => candidate.set(axis.variable, new Rat(point[i])));
        const values = checkCandidate(system, candidate, freeReal, intVars);
        if (values !== null)
            return { verdict: SAT, values };
    }
    return { verdict: UNKNOWN, values: null };
}
function feasible(equalities, inputRows, intVars) {
    const { pivots, consistent } = gauss(equalities, intVars);
    if (!consistent)
        return { verdict: UNSAT, values: null };
    let rows = inputRows.map(({ lin, strict }) => ({ lin: lin.substitute(pivots), strict }));
    for (const row of rows) {
        if (row.lin.isConstant() && !rowHolds(row, new Map())) {
            return { verdict: UNSAT, values: null };
        }
    }
    rows = rows.filter((row) => !row.lin.isConstant());
    const freeSet = new Set();
    for (const row of rows)
        for (const v of row.lin.variables())
            freeSet.add(v);
    for (const expr of pivots.values())
        for (const v of expr.variables())
            freeSet.add(v);
    const free = [...freeSet].sort(compareNames);
    const system = new System(rows, pivots, free);
    const rationalSample = sample(rows, [...free]);
    if (rationalSample === null)
        return { verdict: UNSAT, values: null };
    for (const variable of free) {
        if (!rationalSample.has(variable))
            rationalSample.set(variable, Rat.ZERO);
    }
    const values = system.assignmentFrom(rationalSample);
    let allIntegral = true;
    for (const variable of intVars) {
        const value = values.get(variable);
        if (value !== undefined && !value.isIntegral()) {
            allIntegral = false;
            break;
        }
    }
    if (allIntegral)
        return { verdict: SAT, values };
    return integerSearch(system, rationalSample, intVars);
}
export function solve(constraints, diseqs, intVars) {
    const equalities = [];
    const rows = [];
    for (const { lin, rel } of constraints) {
        if (rel === "=")
            equalities.push(lin);
        else if (rel === "<=")
            rows.push({ lin, strict: false });
        else
            rows.push({ lin, strict: true });
    }
    const liveDiseqs = [];
    for (const d of diseqs) {
        if (d.isConstant()) {
            if (d.konst.isZero())
                return { verdict: UNSAT, values: null }; // 0 != 0
            continue;
        }
        liveDiseqs.push(d);
    }
    if (liveDiseqs.length > 12)
        return { verdict: UNKNOWN, values: null };
    let sawUnknown = false;
    try {
        const branches = 1 << liveDiseqs.length;
        for (let mask = 0; mask < branches; mask += 1) {
            const branchRows = [...rows];
            liveDiseqs.forEach((lin, i) => {
                // itertools.product ordering: the last disequality flips fastest,
                // False (keep sign) first
                const negate = (mask >> (liveDiseqs.length - 1 - i)) & 1;
                branchRows.push({ lin: negate ? lin.scale(Rat.ONE.neg()) : lin.copy(),
                    strict: true });
            });
            const result = feasible([...equalities], branchRows, new Set(intVars));
            if (result.verdict === SAT)
                return result;
            if (result.verdict === UNKNOWN)
                sawUnknown = true;
        }
    }
    catch (err) {
        if (err instanceof BudgetExceeded)
            return { verdict: UNKNOWN, values: null };
        throw err;
    }
    return { verdict: sawUnknown ? UNKNOWN : UNSAT, values: null };
}
