"""Exact linear arithmetic over rationals and integers.

Feasibility of conjunctions of linear constraints, decided with
Fraction arithmetic throughout: Gaussian elimination for equalities,
Fourier-Motzkin projection for inequalities, and a bounded search over
the integer box for Int-sorted variables. Disequalities are handled by
sign splitting. Everything is deterministic; when the integer search
cannot be bounded the verdict is "unknown", never a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

# Guards against pathological blowup; exceeding one yields UNKNOWN.
MAX_FM_ROWS = 20000
MAX_BOX_POINTS = 200000
HEURISTIC_OFFSETS = tuple(range(-6, 7))


class _Budget(Exception):
    pass


@dataclass
class Lin:
    """Linear expression: sum(coeffs[v] * v) + const."""

    coeffs: dict[str, Fraction] = field(default_factory=dict)
    const: Fraction = Fraction(0)

    @staticmethod
    def constant(value) -> "Lin":
        return Lin({}, Fraction(value))

    @staticmethod
    def variable(name: str) -> "Lin":
        return Lin({name: Fraction(1)}, Fraction(0))

    def copy(self) -> "Lin":
        return Lin(dict(self.coeffs), self.const)

    def add(self, other: "Lin") -> "Lin":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, Fraction(0)) + c
            if out[v] == 0:
                del out[v]
        return Lin(out, self.const + other.const)

    def scale(self, k) -> "Lin":
        k = Fraction(k)
        if k == 0:
            return Lin({}, Fraction(0))
        return Lin({v: c * k for v, c in self.coeffs.items()}, self.const * k)

    def sub(self, other: "Lin") -> "Lin":
        return self.add(other.scale(-1))

    def substitute(self, bindings: dict[str, "Lin"]) -> "Lin":
        out = Lin({}, self.const)
        for v, c in self.coeffs.items():
            if v in bindings:
                out = out.add(bindings[v].scale(c))
            else:
                out = out.add(Lin({v: c}, Fraction(0)))
        return out

    def evaluate(self, values: dict[str, Fraction]) -> Fraction:
        total = self.const
        for v, c in self.coeffs.items():
            total += c * values[v]
        return total

    def variables(self) -> set[str]:
        return set(self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs


# A row is (lin, strict): lin <= 0, or lin < 0 when strict.
Row = tuple[Lin, bool]


def _row_holds(row: Row, values: dict[str, Fraction]) -> bool:
    value = row[0].evaluate(values)
    return value < 0 if row[1] else value <= 0


def _eliminate(rows: list[Row], var: str) -> list[Row]:
    """Fourier-Motzkin: project `var` out of the row system."""
    lowers: list[tuple[Lin, bool]] = []  # var >(=) bound
    uppers: list[tuple[Lin, bool]] = []  # var <(=) bound
    rest: list[Row] = []
    for lin, strict in rows:
        c = lin.coeffs.get(var)
        if c is None or c == 0:
            rest.append((lin, strict))
            continue
        # c*var + r (<|<=) 0  =>  var (<|<=) -r/c   (c > 0)
        #                        var (>|>=) -r/c   (c < 0)
        bound = lin.copy()
        del bound.coeffs[var]
        bound = bound.scale(Fraction(-1, 1) / c)
        if c > 0:
            uppers.append((bound, strict))
        else:
            lowers.append((bound, strict))
    for lo, lo_strict in lowers:
        for hi, hi_strict in uppers:
            # lo <= var <= hi requires lo - hi <= 0 (strict if either side is)
            rest.append((lo.sub(hi), lo_strict or hi_strict))
            if len(rest) > MAX_FM_ROWS:
                raise _Budget()
    return rest


def _sample(rows: list[Row], variables: list[str]) -> dict[str, Fraction] | None:
    """Rational sample point satisfying all rows, or None if infeasible."""
    if not variables:
        for row in rows:
            if not _row_holds(row, {}):
                return None
        return {}
    var = variables[0]
    projected = _eliminate(rows, var)
    inner = _sample(projected, variables[1:])
    if inner is None:
        return None
    lower: Fraction | None = None
    lower_strict = False
    upper: Fraction | None = None
    upper_strict = False
    for lin, strict in rows:
        c = lin.coeffs.get(var)
        if c is None or c == 0:
            continue
        bound = lin.copy()
        del bound.coeffs[var]
        value = bound.scale(Fraction(-1, 1) / c).evaluate(inner)
        if c > 0:
            if upper is None or value < upper or (value == upper and strict):
                upper, upper_strict = value, strict
        else:
            if lower is None or value > lower or (value == lower and strict):
                lower, lower_strict = value, strict
    if lower is None and upper is None:
        choice = Fraction(0)
    elif lower is None:
        choice = upper - 1
    elif upper is None:
        choice = lower + 1
    elif lower < upper:
        choice = (lower + upper) / 2
    else:
        # FM guarantees lower <= upper, with equality only when both inclusive
        if lower_strict or upper_strict:
            return None
        choice = lower
    inner[var] = choice
    return inner


def _projection_interval(rows: list[Row], var: str, others: list[str]):
    """Rational (lo, lo_strict, hi, hi_strict) for var; None bounds = unbounded."""
    reduced = rows
    for other in others:
        reduced = _eliminate(reduced, other)
    lo = hi = None
    lo_strict = hi_strict = False
    for lin, strict in reduced:
        c = lin.coeffs.get(var)
        if c is None or c == 0:
            continue
        value = -lin.const / c
        if c > 0:
            if hi is None or value < hi or (value == hi and strict):
                hi, hi_strict = value, strict
        else:
            if lo is None or value > lo or (value == lo and strict):
                lo, lo_strict = value, strict
    return lo, lo_strict, hi, hi_strict


def _int_floor(x: Fraction) -> int:
    return math.floor(x)


def _int_ceil(x: Fraction) -> int:
    return math.ceil(x)


def _int_range(lo, lo_strict, hi, hi_strict):
    """Inclusive integer bounds from a rational interval; None = unbounded."""
    ilo = None
    if lo is not None:
        ilo = _int_floor(lo) + 1 if (lo_strict and lo == _int_floor(lo)) else _int_ceil(lo)
    ihi = None
    if hi is not None:
        ihi = _int_ceil(hi) - 1 if (hi_strict and hi == _int_ceil(hi)) else _int_floor(hi)
    return ilo, ihi


@dataclass
class _System:
    rows: list[Row]
    pivots: dict[str, Lin]  # eliminated var -> expression over free vars
    free: list[str]

    def assignment_from(self, free_values: dict[str, Fraction]) -> dict[str, Fraction]:
        values = dict(free_values)
        for var, expr in self.pivots.items():
            values[var] = expr.evaluate(free_values)
        return values


def _gauss(equalities: list[Lin], int_vars: set[str]) -> tuple[dict[str, Lin], bool]:
    """Solve equalities into pivot substitutions. Returns (pivots, consistent)."""
    pivots: dict[str, Lin] = {}
    for eq in equalities:
        eq = eq.substitute(pivots)
        if eq.is_constant():
            if eq.const != 0:
                return {}, False
            continue
        # prefer eliminating Real variables so Int variables stay enumerable
        candidates = sorted(eq.coeffs, key=lambda v: (v in int_vars, v))
        pivot = candidates[0]
        coef = eq.coeffs[pivot]
        expr = eq.copy()
        del expr.coeffs[pivot]
        expr = expr.scale(Fraction(-1, 1) / coef)
        for var, prior in list(pivots.items()):
            pivots[var] = prior.substitute({pivot: expr})
        pivots[pivot] = expr
    return pivots, True


def _check_candidate(system: _System, candidate: dict[str, Fraction],
                     remaining_free: list[str], int_vars: set[str]):
    """Fix some free vars, solve the rest, verify integrality of Int pivots."""
    rows = [(lin.substitute({v: Lin.constant(x) for v, x in candidate.items()}), s)
            for lin, s in system.rows]
    inner = _sample(rows, remaining_free)
    if inner is None:
        return None
    free_values = dict(candidate)
    free_values.update(inner)
    values = system.assignment_from(free_values)
    for var in int_vars:
        if var in values and values[var].denominator != 1:
            return None
    for row in system.rows:
        if not _row_holds(row, free_values):
            return None
    return values


def _integer_search(system: _System, sample: dict[str, Fraction], int_vars: set[str]):
    """Find an all-integral assignment for Int vars, or UNSAT/UNKNOWN."""
    free_int = sorted(v for v in system.free if v in int_vars)
    free_real = [v for v in system.free if v not in int_vars]

    ranges: list[tuple[str, int | None, int | None]] = []
    for var in free_int:
        others = [v for v in system.free if v != var]
        lo, lo_s, hi, hi_s = _projection_interval(system.rows, var, others)
        ilo, ihi = _int_range(lo, lo_s, hi, hi_s)
        if ilo is not None and ihi is not None and ilo > ihi:
            return UNSAT, None
        ranges.append((var, ilo, ihi))

    bounded = all(ilo is not None and ihi is not None for _, ilo, ihi in ranges)
    if bounded:
        total = 1
        for _, ilo, ihi in ranges:
            total *= ihi - ilo + 1
            if total > MAX_BOX_POINTS:
                return UNKNOWN, None
        axes = [range(ilo, ihi + 1) for _, ilo, ihi in ranges]
        for point in product(*axes):
            candidate = {var: Fraction(value)
                         for (var, _, _), value in zip(ranges, point)}
            values = _check_candidate(system, candidate, free_real, int_vars)
            if values is not None:
                return SAT, values
        return UNSAT, None

    # Unbounded direction: probe integer points near the rational sample.
    axes = []
    for var, ilo, ihi in ranges:
        base = round(sample.get(var, Fraction(0)))
        points: list[int] = []
        for off in HEURISTIC_OFFSETS:
            points.append(base + off)
        if ilo is not None:
            points.extend([ilo, ilo + 1])
        if ihi is not None:
            points.extend([ihi, ihi - 1])
        seen: list[int] = []
        for p in points:
            if (ilo is None or p >= ilo) and (ihi is None or p <= ihi) and p not in seen:
                seen.append(p)
        axes.append((var, seen))
    total = 1
    for _, pts in axes:
        total *= max(len(pts), 1)
    if total > 4096:
        return UNKNOWN, None
    for point in product(*[pts for _, pts in axes]):
        candidate = {var: Fraction(value)
                     for (var, _), value in zip(axes, point)}
        values = _check_candidate(system, candidate, free_real, int_vars)
        if values is not None:
            return SAT, values
    return UNKNOWN, None


def _feasible(equalities: list[Lin], rows: list[Row], int_vars: set[str]):
    pivots, consistent = _gauss(equalities, int_vars)
    if not consistent:
        return UNSAT, None
    rows = [(lin.substitute(pivots), strict) for lin, strict in rows]
    for lin, strict in rows:
        if lin.is_constant() and not _row_holds((lin, strict), {}):
            return UNSAT, None
    rows = [row for row in rows if not row[0].is_constant()]
    free = sorted({v for lin, _ in rows for v in lin.variables()}
                  | {v for p in pivots.values() for v in p.variables()})
    system = _System(rows, pivots, free)

    sample = _sample(rows, list(free))
    if sample is None:
        return UNSAT, None
    for var in free:
        sample.setdefault(var, Fraction(0))
    values = system.assignment_from(sample)
    if all(values.get(v, Fraction(0)).denominator == 1 for v in int_vars):
        return SAT, values
    return _integer_search(system, sample, int_vars)


def solve(constraints, diseqs, int_vars):
    """Decide a conjunction of linear constraints.

    constraints: list of (Lin, rel) with rel in {"=", "<=", "<"}, read as
    `lin rel 0`. diseqs: list of Lin read as `lin != 0`. int_vars: names
    that must take integral values. Returns (verdict, values|None) with
    verdict in {"sat", "unsat", "unknown"}; values maps every variable
    appearing in the system to a Fraction.
    """
    equalities: list[Lin] = []
    rows: list[Row] = []
    for lin, rel in constraints:
        if rel == "=":
            equalities.append(lin)
        elif rel == "<=":
            rows.append((lin, False))
        elif rel == "<":
            rows.append((lin, True))
        else:
            raise ValueError(f"unknown relation {rel!r}")

    diseqs = [d for d in diseqs if not (d.is_constant() and d.const != 0)]
    for d in diseqs:
        if d.is_constant():  # 0 != 0
            return UNSAT, None
    if len(diseqs) > 12:
        return UNKNOWN, None

    saw_unknown = False
    try:
        for signs in product((False, True), repeat=len(diseqs)):
            branch_rows = list(rows)
            for lin, negate in zip(diseqs, signs):
                branch_rows.append((lin.scale(-1) if negate else lin.copy(), True))
            verdict, values = _feasible(list(equalities), branch_rows, set(int_vars))
            if verdict == SAT:
                return SAT, values
            if verdict == UNKNOWN:
                saw_unknown = True
    except _Budget:
        return UNKNOWN, None
    return (UNKNOWN, None) if saw_unknown else (UNSAT, None)
