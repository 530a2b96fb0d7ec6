/** Client-side secret-formula judging, mirroring the build engine's
 * game module: equivalence via both difference directions, model rows
 * with independently recomputed flags, distinguishing models first.
 */

import { Interpreter, SolverError } from "./solver.js";
import {
  Atom,
  SExpr,
  SList,
  atom,
  equalSexpr,
  isAtom,
  parseOne,
  printSexpr,
  slist,
} from "./sexpr.js";
import type { GameDeclaration } from "./manifest.js";

export class GameError extends Error {}
export class SortError extends GameError {
  constructor(readonly constant: string) {
    super(`constant ${constant} is not declared in this game`);
  }
}
export class SolverUnknown extends GameError {
  constructor() {
    super("equivalence could not be established");
  }
}

export interface ClientModel {
  bindings: Map<string, SExpr>;
}

export interface ModelRow {
  model: ClientModel;
  satisfiesUser: boolean;
  satisfiesSecret: boolean;
}

export type Verdict =
  | { kind: "equivalent" }
  | { kind: "mismatch"; rows: ModelRow[] };

const OPERATORS = new Set([
  "and", "or", "not", "=>", "xor", "ite", "=", "distinct",
  "<", "<=", ">", ">=", "+", "-", "*", "/", "div", "mod", "abs",
  "true", "false", "let", "forall", "exists", "to_real", "to_int",
]);

export function freeConstants(formula: SExpr, bound: Set<string> = new Set()): Set<string> {
  const names = new Set<string>();
  if (isAtom(formula)) {
    const text = formula.text;
    if (OPERATORS.has(text) || bound.has(text) || text.startsWith(":")
        || text.startsWith('"')) {
      return names;
    }
    if (/^-?[0-9]+(\.[0-9]+)?$/.test(text)) return names;
    names.add(text);
    return names;
  }
  const items = formula.items;
  if (items.length === 0) return names;
  const op = isAtom(items[0]) ? (items[0] as Atom).text : null;
  if ((op === "forall" || op === "exists" || op === "let") && items.length >= 3
      && items[1] instanceof SList) {
    const inner = new Set(bound);
    for (const binding of (items[1] as SList).items) {
      if (binding instanceof SList && binding.items.length > 0
          && isAtom(binding.items[0])) {
        inner.add((binding.items[0] as Atom).text);
      }
    }
    if (op === "let") {
      for (const binding of (items[1] as SList).items) {
        const b = binding as SList;
        for (const n of freeConstants(b.items[1], bound)) names.add(n);
      }
    }
    for (const term of items.slice(2)) {
      for (const n of freeConstants(term, inner)) names.add(n);
    }
    return names;
  }
  const start = op !== null && OPERATORS.has(op) ? 1 : 0;
  for (const term of items.slice(start)) {
    for (const n of freeConstants(term, bound)) names.add(n);
  }
  return names;
}

export function blockModel(model: ClientModel): SExpr {
  const equalities: SExpr[] = [];
  for (const [name, value] of model.bindings) {
    equalities.push(slist(atom("="), atom(name), value));
  }
  if (equalities.length === 0) throw new GameError("cannot block an empty model");
  if (equalities.length === 1) return slist(atom("not"), equalities[0]);
  return slist(atom("not"), new SList([atom("and"), ...equalities]));
}

function modelsEqual(a: ClientModel, b: ClientModel): boolean {
  if (a.bindings.size !== b.bindings.size) return false;
  for (const [name, value] of a.bindings) {
    const other = b.bindings.get(name);
    if (other === undefined || !equalSexpr(value, other)) return false;
  }
  return true;
}

/** One game, one embedded solver; check_sat uses a scratch frame that
 * stays open for the following get-model, like the build-side session. */
export class GameSession {
  private interp = new Interpreter();
  private inScratchFrame = false;

  constructor(declarations: GameDeclaration[]) {
    for (const { name, sort } of declarations) {
      this.command(`(declare-const ${name} ${sort})`);
    }
  }

  private command(text: string): string | null {
    const response = this.interp.execute(parseOne(text) as SExpr);
    if (response !== null && response.startsWith("(error")) {
      throw new SolverError(response);
    }
    return response;
  }

  checkSat(assertions: SExpr[]): string {
    if (this.inScratchFrame) {
      this.command("(pop 1)");
      this.inScratchFrame = false;
    }
    this.command("(push 1)");
    this.inScratchFrame = true;
    for (const formula of assertions) {
      this.command(`(assert ${printSexpr(formula)})`);
    }
    const verdict = this.command("(check-sat)");
    if (verdict !== "sat" && verdict !== "unsat" && verdict !== "unknown") {
      throw new SolverError(`unexpected check-sat answer ${verdict}`);
    }
    return verdict;
  }

  getModel(): ClientModel {
    const text = this.command("(get-model)") as string;
    const form = parseOne(text) as SList;
    const bindings = new Map<string, SExpr>();
    for (const entry of form.items) {
      const e = entry as SList;
      if (isAtom(e.items[0]) && (e.items[0] as Atom).text === "define-fun") {
        bindings.set((e.items[1] as Atom).text, e.items[4]);
      } else if (e.items.length === 2 && isAtom(e.items[0])) {
        bindings.set((e.items[0] as Atom).text, e.items[1]);
      }
    }
    return { bindings };
  }

  evalUnderModel(formula: SExpr, model: ClientModel): boolean {
    const assertions: SExpr[] = [];
    for (const [name, value] of model.bindings) {
      assertions.push(slist(atom("="), atom(name), value));
    }
    assertions.push(slist(atom("not"), formula));
    const verdict = this.checkSat(assertions);
    if (verdict === "unknown") throw new SolverUnknown();
    return verdict === "unsat";
  }
}

export function enumerateModels(formula: SExpr, k: number,
                                session: GameSession):
    { models: ClientModel[]; status: "exhausted" | "limit" | "unknown" } {
  const models: ClientModel[] = [];
  while (models.length < k) {
    const assertions = [formula, ...models.map(blockModel)];
    const verdict = session.checkSat(assertions);
    if (verdict === "unknown") return { models, status: "unknown" };
    if (verdict === "unsat") return { models, status: "exhausted" };
    models.push(session.getModel());
  }
  return { models, status: "limit" };
}

export function judge(userText: string, secretText: string,
                      declarations: GameDeclaration[], maxRows: number): Verdict {
  const user = parseOne(userText);
  const secret = parseOne(secretText);
  const declared = new Set(declarations.map((d) => d.name));
  for (const constant of [...freeConstants(user)].sort()) {
    if (!declared.has(constant)) throw new SortError(constant);
  }

  const session = new GameSession(declarations);
  const notSecret = slist(atom("not"), secret);
  const notUser = slist(atom("not"), user);

  const userOnly = session.checkSat([user, notSecret]);
  const modelUserOnly = userOnly === "sat" ? session.getModel() : null;
  const secretOnly = session.checkSat([notUser, secret]);
  const modelSecretOnly = secretOnly === "sat" ? session.getModel() : null;
  if (userOnly === "unknown" || secretOnly === "unknown") throw new SolverUnknown();
  if (userOnly === "unsat" && secretOnly === "unsat") return { kind: "equivalent" };

  const rows: ClientModel[] = [];
  for (const model of [modelUserOnly, modelSecretOnly]) {
    if (model !== null && !rows.some((m) => modelsEqual(m, model))) rows.push(model);
  }
  if (rows.length < maxRows) {
    const { models } = enumerateModels(user, maxRows, session);
    for (const model of models) {
      if (rows.length >= maxRows) break;
      if (!rows.some((m) => modelsEqual(m, model))) rows.push(model);
    }
  }

  const verdictRows: ModelRow[] = rows.slice(0, maxRows).map((model) => ({
    model,
    satisfiesUser: session.evalUnderModel(user, model),
    satisfiesSecret: session.evalUnderModel(secret, model),
  }));
  return { kind: "mismatch", rows: verdictRows };
}

export function renderModel(model: ClientModel): string {
  return [...model.bindings.entries()]
    .map(([name, value]) => `${name} = ${printSexpr(value)}`)
    .join(", ");
}
