/** Client solver unit checks (parity.test.ts covers the full fragment). */

import { describe, expect, it } from "vitest";

import { Rat } from "../src/rational.js";
import { runScript, splitForms } from "../src/solver.js";

describe("rational arithmetic", () => {
  it("normalizes and compares exactly", () => {
    expect(new Rat(2n, 4n).toString()).toBe("1/2");
    expect(new Rat(-3n, -6n).toString()).toBe("1/2");
    expect(new Rat(1n, 3n).add(new Rat(1n, 6n)).toString()).toBe("1/2");
    expect(Rat.fromDecimal("0.25").mul(new Rat(4n)).eq(Rat.ONE)).toBe(true);
  });

  it("floor, ceil, round behave on negatives", () => {
    expect(new Rat(-1n, 2n).floor()).toBe(-1n);
    expect(new Rat(-1n, 2n).ceil()).toBe(0n);
    expect(new Rat(5n, 2n).round()).toBe(2n);  // ties to even
    expect(new Rat(7n, 2n).round()).toBe(4n);
  });
});

describe("runScript", () => {
  it("solves the animal puzzle", () => {
    const script = `(declare-const dogs Int)(declare-const cats Int)(declare-const mice Int)
(assert (= (+ dogs cats mice) 100))
(assert (= (+ (* 1500 dogs) (* 100 cats) (* 25 mice)) 10000))
(assert (>= dogs 1))(assert (>= cats 1))(assert (>= mice 1))
(check-sat)(get-model)`;
    const result = runScript(script);
    expect(result.hadError).toBe(false);
    expect(result.output.startsWith("sat\n")).toBe(true);
    expect(result.output).toContain("(define-fun dogs () Int 3)");
    expect(result.output).toContain("(define-fun cats () Int 41)");
    expect(result.output).toContain("(define-fun mice () Int 56)");
  });

  it("proves the syllogism by refutation", () => {
    const script = `(declare-sort Being 0)
(declare-const Socrates Being)
(declare-fun human (Being) Bool)
(declare-fun mortal (Being) Bool)
(assert (forall ((x Being)) (=> (human x) (mortal x))))
(assert (human Socrates))
(assert (not (mortal Socrates)))
(check-sat)`;
    expect(runScript(script).output).toBe("unsat\n");
  });

  it("reports unbalanced parens with position", () => {
    const result = runScript("(assert");
    expect(result.hadError).toBe(true);
    expect(result.output).toBe(
      '(error "unclosed parenthesis at line 1, column 1")\n');
  });

  it("honors an already-expired deadline", () => {
    const result = runScript("(declare-const p Bool)(assert p)(check-sat)",
                             { timeoutMs: -5 });
    expect(result.timedOut).toBe(true);
  });

  it("keeps going after command errors like the reference runtime", () => {
    const result = runScript("(frobnicate)(declare-const p Bool)(assert p)(check-sat)");
    expect(result.hadError).toBe(true);
    expect(result.output.endsWith("sat\n")).toBe(true);
  });
});

describe("splitForms", () => {
  it("tracks starting lines and strips comments", () => {
    const forms = splitForms("(check-sat)\n; note\n(assert\n  p)\n");
    expect(forms.map((f) => f.line)).toEqual([1, 3]);
    expect(forms[1].text).toBe("(assert\n  p)");
  });

  it("keeps semicolons inside strings", () => {
    const forms = splitForms('(echo "a ; b")');
    expect(forms[0].text).toBe('(echo "a ; b")');
  });
});
