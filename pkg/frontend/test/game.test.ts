/** Client-side judging mirrors the build-side game engine. */

import { describe, expect, it } from "vitest";

import { SortError, blockModel, judge, renderModel } from "../src/game.js";
import { Atom, SExpr, isAtom, parseOne, printSexpr } from "../src/sexpr.js";

const INT_GAME = [{ name: "x", sort: "Int" }];
const BOOL_GAME = [
  { name: "p", sort: "Bool" },
  { name: "q", sort: "Bool" },
  { name: "r", sort: "Bool" },
];

describe("judge", () => {
  it("off-by-one guess produces the boundary row", () => {
    const verdict = judge("(>= x 5)", "(> x 5)", INT_GAME, 4);
    expect(verdict.kind).toBe("mismatch");
    if (verdict.kind !== "mismatch") return;
    const boundary = verdict.rows.find(
      (row) => printSexpr(row.model.bindings.get("x") as SExpr) === "5");
    expect(boundary).toBeDefined();
    expect(boundary?.satisfiesUser).toBe(true);
    expect(boundary?.satisfiesSecret).toBe(false);
    expect(verdict.rows[0].satisfiesUser).not.toBe(verdict.rows[0].satisfiesSecret);
  });

  it("integer semantics equivalence", () => {
    expect(judge("(>= x 6)", "(> x 5)", INT_GAME, 4).kind).toBe("equivalent");
  });

  it("reflexivity", () => {
    expect(judge("(> x 5)", "(> x 5)", INT_GAME, 4).kind).toBe("equivalent");
    expect(judge("(or (and p (not q)) (and q (not p)))",
                 "(or (and p (not q)) (and q (not p)))",
                 BOOL_GAME.slice(0, 2), 4).kind).toBe("equivalent");
  });

  it("undeclared constants are sort errors", () => {
    expect(() => judge("(> zz 5)", "(> x 5)", INT_GAME, 4)).toThrow(SortError);
  });

  it("row budget respected and rows are distinct", () => {
    const verdict = judge("(>= x 5)", "(> x 5)", INT_GAME, 2);
    if (verdict.kind !== "mismatch") throw new Error("expected mismatch");
    expect(verdict.rows.length).toBeLessThanOrEqual(2);
    const rendered = verdict.rows.map((row) => renderModel(row.model));
    expect(new Set(rendered).size).toBe(rendered.length);
  });

  it("agrees with a truth-table oracle on boolean formulas", () => {
    const secret = "(or (and p q) (not r))";
    const candidates = [
      "(or (and p q) (not r))",
      "(or (not r) (and q p))",
      "(and p q)",
      "(not r)",
      "(=> r (and p q))",
      "(or p q)",
      "(xor p q)",
      "(or (and p q) (and (not r) (or p (not p))))",
    ];
    const vars = ["p", "q", "r"];
    const evalBool = (expr: SExpr, env: Record<string, boolean>): boolean => {
      if (isAtom(expr)) {
        if (expr.text === "true") return true;
        if (expr.text === "false") return false;
        return env[expr.text];
      }
      const op = (expr.items[0] as Atom).text;
      const args = expr.items.slice(1).map((a) => evalBool(a, env));
      switch (op) {
        case "and": return args.every(Boolean);
        case "or": return args.some(Boolean);
        case "not": return !args[0];
        case "xor": return args.reduce((x, y) => x !== y);
        case "=>": return args.slice(0, -1).reduceRight(
          (acc, a) => !a || acc, args[args.length - 1]);
        default: throw new Error(op);
      }
    };
    const tablesEqual = (a: SExpr, b: SExpr): boolean => {
      for (let bits = 0; bits < 8; bits += 1) {
        const env: Record<string, boolean> = {};
        vars.forEach((v, i) => { env[v] = Boolean((bits >> i) & 1); });
        if (evalBool(a, env) !== evalBool(b, env)) return false;
      }
      return true;
    };
    for (const candidate of candidates) {
      const verdict = judge(candidate, secret, BOOL_GAME, 4);
      const expected = tablesEqual(parseOne(candidate), parseOne(secret));
      expect(verdict.kind === "equivalent", candidate).toBe(expected);
      if (verdict.kind === "mismatch") {
        for (const row of verdict.rows) {
          const env: Record<string, boolean> = {};
          for (const [name, value] of row.model.bindings) {
            env[name] = (value as Atom).text === "true";
          }
          expect(row.satisfiesUser).toBe(evalBool(parseOne(candidate), env));
          expect(row.satisfiesSecret).toBe(evalBool(parseOne(secret), env));
        }
      }
    }
  });
});

describe("blockModel", () => {
  it("builds the negated conjunction", () => {
    const model = {
      bindings: new Map<string, SExpr>([
        ["x", parseOne("5")],
        ["y", parseOne("2")],
      ]),
    };
    expect(printSexpr(blockModel(model))).toBe("(not (and (= x 5) (= y 2)))");
  });

  it("single binding skips the conjunction", () => {
    const model = { bindings: new Map<string, SExpr>([["x", parseOne("5")]]) };
    expect(printSexpr(blockModel(model))).toBe("(not (= x 5))");
  });
});
