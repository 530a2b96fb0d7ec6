/** In-browser SMT-LIB subset solver.
 *
 * A behavior-faithful port of the build-side reference runtime: same
 * fragment (Bool, Int, Real, uninterpreted sorts and predicates, linear
 * arithmetic, quantifier grounding), same deterministic search order,
 * same response and model formatting, same error wording. Unmodified
 * tutorial blocks therefore reproduce their precomputed outputs exactly
 * when re-run client side.
 */

import { Rat } from "./rational.js";
import * as lira from "./lira.js";
import { Lin } from "./lira.js";
import {
  Atom,
  SExpr,
  SExprError,
  SList,
  atom,
  isAtom,
  parseSexpr,
  printSexpr,
  slist,
} from "./sexpr.js";

export const SOLVER_NAME = "smt-forge-refsolver";
export const SOLVER_VERSION = "0.1.0";

const NUMERIC_SORTS = new Set(["Int", "Real"]);
const BUILTIN_SORTS = new Set(["Bool", "Int", "Real"]);

const CORE_HEADS = new Set([
  "and", "or", "not", "=>", "xor", "ite", "=", "distinct",
  "<", "<=", ">", ">=", "+", "-", "*", "/",
  "let", "forall", "exists", "true", "false",
]);

const RESERVED = new Set([
  ...CORE_HEADS,
  "assert", "check-sat", "declare-const", "declare-fun", "declare-sort",
  "define-fun", "push", "pop", "reset", "exit", "set-logic", "set-option",
  "set-info", "get-model", "get-info", "echo", "as", "_",
]);

export class SolverError extends Error {}

class UnsupportedQuantifier extends SolverError {}

export class ClientTimeout extends Error {
  constructor(readonly timeoutMs: number) {
    super(`client-side execution exceeded ${timeoutMs} ms`);
  }
}

function isNumeral(text: string): boolean {
  return /^[0-9]+$/.test(text);
}

function isDecimal(text: string): boolean {
  const dot = text.indexOf(".");
  if (dot < 0) return false;
  return isNumeral(text.slice(0, dot)) && isNumeral(text.slice(dot + 1));
}

// bare negative literals are accepted leniently, like mainstream solvers
function isIntLiteral(text: string): boolean {
  const body = text.startsWith("-") ? text.slice(1) : text;
  return isNumeral(body);
}

function isDecLiteral(text: string): boolean {
  const body = text.startsWith("-") ? text.slice(1) : text;
  return isDecimal(body);
}

function isSymbol(text: string): boolean {
  if (!text || isIntLiteral(text) || isDecLiteral(text)) return false;
  if ("0123456789".includes(text[0]) || text.startsWith(":") || text.startsWith('"')) {
    return false;
  }
  return true;
}

function quote(message: string): string {
  return '"' + message.replaceAll('"', '""') + '"';
}

export function errorResponse(message: string): string {
  return `(error ${quote(message)})`;
}

type Sig = { argSorts: string[]; ret: string };
type Def = { params: [string, string][]; ret: string; body: SExpr };

// -- sort inference -----------------------------------------------------------

function sortOf(term: SExpr, env: Map<string, string>, funs: Map<string, Sig>): string {
  if (isAtom(term)) {
    const text = term.text;
    if (text === "true" || text === "false") return "Bool";
    if (isIntLiteral(text)) return "Int";
    if (isDecLiteral(text)) return "Real";
    const bound = env.get(text);
    if (bound !== undefined) return bound;
    const sig = funs.get(text);
    if (sig !== undefined) {
      if (sig.argSorts.length > 0) throw new SolverError(`${text} expects arguments`);
      return sig.ret;
    }
    throw new SolverError(`unknown constant ${text}`);
  }
  if (term.items.length === 0) throw new SolverError("empty application");
  if (!isAtom(term.items[0])) {
    throw new SolverError(`cannot interpret term ${printSexpr(term)}`);
  }
  const op = (term.items[0] as Atom).text;
  const args = term.items.slice(1);
  const argSorts = () => args.map((a) => sortOf(a, env, funs));

  if (["and", "or", "not", "=>", "xor"].includes(op)) {
    for (const s of argSorts()) {
      if (s !== "Bool") throw new SolverError(`${op} applies to Bool terms`);
    }
    return "Bool";
  }
  if (op === "=" || op === "distinct") {
    const sorts = argSorts();
    if (sorts.length < 2) throw new SolverError(`${op} takes at least two arguments`);
    const base = sorts[0];
    for (const s of sorts.slice(1)) {
      if (s !== base && !(NUMERIC_SORTS.has(s) && NUMERIC_SORTS.has(base))) {
        throw new SolverError(`${op} applied to mixed sorts ${base} and ${s}`);
      }
    }
    return "Bool";
  }
  if (["<", "<=", ">", ">="].includes(op)) {
    for (const s of argSorts()) {
      if (!NUMERIC_SORTS.has(s)) throw new SolverError(`${op} applies to numeric terms`);
    }
    return "Bool";
  }
  if (["+", "-", "*"].includes(op)) {
    const sorts = argSorts();
    if (sorts.length === 0) throw new SolverError(`${op} takes arguments`);
    for (const s of sorts) {
      if (!NUMERIC_SORTS.has(s)) throw new SolverError(`${op} applies to numeric terms`);
    }
    return sorts.includes("Real") ? "Real" : "Int";
  }
  if (op === "/") {
    for (const s of argSorts()) {
      if (!NUMERIC_SORTS.has(s)) throw new SolverError("/ applies to numeric terms");
    }
    return "Real";
  }
  if (op === "ite") {
    if (args.length !== 3) throw new SolverError("ite takes three arguments");
    if (sortOf(args[0], env, funs) !== "Bool") {
      throw new SolverError("ite condition must be Bool");
    }
    const thenSort = sortOf(args[1], env, funs);
    const elseSort = sortOf(args[2], env, funs);
    if (thenSort === elseSort) return thenSort;
    if (NUMERIC_SORTS.has(thenSort) && NUMERIC_SORTS.has(elseSort)) return "Real";
    throw new SolverError("ite branches must share a sort");
  }
  if (op === "forall" || op === "exists") {
    if (args.length !== 2 || !(args[0] instanceof SList)) {
      throw new SolverError(`${op} takes a binding list and a body`);
    }
    const inner = new Map(env);
    for (const binding of (args[0] as SList).items) {
      if (!(binding instanceof SList) || binding.items.length !== 2
          || !isAtom(binding.items[0]) || !isAtom(binding.items[1])) {
        throw new SolverError(`malformed ${op} binding`);
      }
      inner.set((binding.items[0] as Atom).text, (binding.items[1] as Atom).text);
    }
    if (sortOf(args[1], inner, funs) !== "Bool") {
      throw new SolverError(`${op} body must be Bool`);
    }
    return "Bool";
  }
  const sig = funs.get(op);
  if (sig !== undefined) {
    if (args.length !== sig.argSorts.length) {
      throw new SolverError(`${op} expects ${sig.argSorts.length} arguments`);
    }
    args.forEach((a, i) => {
      const actual = sortOf(a, env, funs);
      if (actual !== sig.argSorts[i]) {
        throw new SolverError(
          `argument of ${op} has sort ${actual}, expected ${sig.argSorts[i]}`);
      }
    });
    return sig.ret;
  }
  throw new SolverError(`unknown function ${op}`);
}

// -- substitution ---------------------------------------------------------------

function substitute(term: SExpr, mapping: Map<string, SExpr>): SExpr {
  if (isAtom(term)) return mapping.get(term.text) ?? term;
  if (term.items.length === 0) return term;
  const op = isAtom(term.items[0]) ? (term.items[0] as Atom).text : null;
  if ((op === "forall" || op === "exists" || op === "let")
      && term.items.length >= 2 && term.items[1] instanceof SList) {
    const bound = new Set<string>();
    for (const binding of (term.items[1] as SList).items) {
      if (binding instanceof SList && binding.items.length > 0 && isAtom(binding.items[0])) {
        bound.add((binding.items[0] as Atom).text);
      }
    }
    const inner = new Map<string, SExpr>();
    for (const [k, v] of mapping) if (!bound.has(k)) inner.set(k, v);
    if (op === "let") {
      const newBindings = (term.items[1] as SList).items.map((binding) => {
        const b = binding as SList;
        return new SList([b.items[0], substitute(b.items[1], mapping)]);
      });
      const rest = term.items.slice(2).map((t) => substitute(t, inner));
      return new SList([term.items[0], new SList(newBindings), ...rest]);
    }
    const rest = term.items.slice(2).map((t) => substitute(t, inner));
    return new SList([term.items[0], term.items[1], ...rest]);
  }
  return new SList(term.items.map((t) => substitute(t, mapping)));
}

function containsQuantifier(term: SExpr): boolean {
  if (isAtom(term)) return false;
  const op = term.items.length > 0 && isAtom(term.items[0])
    ? (term.items[0] as Atom).text : null;
  if (op === "forall" || op === "exists") return true;
  return term.items.some(containsQuantifier);
}

// -- compilation to search nodes ---------------------------------------------------

type Node =
  | { kind: "const"; value: boolean }
  | { kind: "atom"; index: number }
  | { kind: "not"; child: Node }
  | { kind: "and"; children: Node[] }
  | { kind: "or"; children: Node[] };

type AtomDesc =
  | { kind: "b"; name: string }
  | { kind: "p"; name: string; args: string[] }
  | { kind: "e"; left: string; right: string }
  | { kind: "a"; lin: Lin; rel: lira.Rel };

function linKey(lin: Lin): string {
  const parts = [...lin.coeffs.entries()]
    .sort((x, y) => (x[0] < y[0] ? -1 : x[0] > y[0] ? 1 : 0))
    .map(([v, c]) => `${v}:${c.toString()}`);
  return `${parts.join(",")}|${lin.konst.toString()}`;
}

function splitIte(term: SExpr, funs: Map<string, Sig>):
    { cond: SExpr; thenTerm: SExpr; elseTerm: SExpr } | null {
  if (term instanceof SList && term.items.length > 0) {
    const op = isAtom(term.items[0]) ? (term.items[0] as Atom).text : null;
    if (op === "ite" && term.items.length === 4) {
      const branchSort = sortOf(term.items[2], new Map(), funs);
      if (NUMERIC_SORTS.has(branchSort)) {
        return { cond: term.items[1], thenTerm: term.items[2], elseTerm: term.items[3] };
      }
    }
    for (let i = 0; i < term.items.length; i += 1) {
      const found = splitIte(term.items[i], funs);
      if (found !== null) {
        const thenItems = [...term.items];
        thenItems[i] = found.thenTerm;
        const elseItems = [...term.items];
        elseItems[i] = found.elseTerm;
        return { cond: found.cond,
                 thenTerm: new SList(thenItems), elseTerm: new SList(elseItems) };
      }
    }
  }
  return null;
}

class Compiler {
  readonly atoms: AtomDesc[] = [];
  private index = new Map<string, number>();
  readonly intVars = new Set<string>();

  constructor(readonly funs: Map<string, Sig>) {}

  private atomNode(key: string, desc: AtomDesc): Node {
    let idx = this.index.get(key);
    if (idx === undefined) {
      idx = this.atoms.length;
      this.atoms.push(desc);
      this.index.set(key, idx);
    }
    return { kind: "atom", index: idx };
  }

  sortOf(term: SExpr): string {
    return sortOf(term, new Map(), this.funs);
  }

  compile(term: SExpr): Node {
    if (isAtom(term)) {
      const text = term.text;
      if (text === "true") return { kind: "const", value: true };
      if (text === "false") return { kind: "const", value: false };
      const sig = this.funs.get(text);
      if (sig !== undefined && sig.argSorts.length === 0 && sig.ret === "Bool") {
        return this.atomNode(`b|${text}`, { kind: "b", name: text });
      }
      throw new SolverError(`expected a Bool term, found ${text}`);
    }
    const op = term.items.length > 0 && isAtom(term.items[0])
      ? (term.items[0] as Atom).text : null;
    const args = term.items.slice(1);
    if (op === "and") return { kind: "and", children: args.map((a) => this.compile(a)) };
    if (op === "or") return { kind: "or", children: args.map((a) => this.compile(a)) };
    if (op === "not") {
      if (args.length !== 1) throw new SolverError("not takes one argument");
      return { kind: "not", child: this.compile(args[0]) };
    }
    if (op === "=>") {
      if (args.length < 2) throw new SolverError("=> takes at least two arguments");
      const parts: Node[] = args.slice(0, -1)
        .map((a) => ({ kind: "not", child: this.compile(a) } as Node));
      parts.push(this.compile(args[args.length - 1]));
      return { kind: "or", children: parts };
    }
    if (op === "xor") {
      if (args.length < 2) throw new SolverError("xor takes at least two arguments");
      let node = this.compile(args[0]);
      for (const a of args.slice(1)) {
        const rhs = this.compile(a);
        node = { kind: "or", children: [
          { kind: "and", children: [node, { kind: "not", child: rhs }] },
          { kind: "and", children: [{ kind: "not", child: node }, rhs] },
        ] };
      }
      return node;
    }
    if (op === "ite") {
      if (args.length !== 3) throw new SolverError("ite takes three arguments");
      const cond = this.compile(args[0]);
      return { kind: "or", children: [
        { kind: "and", children: [cond, this.compile(args[1])] },
        { kind: "and", children: [{ kind: "not", child: cond }, this.compile(args[2])] },
      ] };
    }
    if (op === "=" || op === "distinct") {
      if (args.length < 2) throw new SolverError(`${op} takes at least two arguments`);
      const sorts = args.map((a) => this.sortOf(a));
      const base = this.mergeSorts(sorts, op);
      if (base === "Bool") {
        const compiled = args.map((a) => this.compile(a));
        const pairs: Node[] = [];
        for (let i = 0; i < compiled.length; i += 1) {
          const range = op === "distinct"
            ? Array.from({ length: compiled.length - i - 1 }, (_, k) => i + 1 + k)
            : (i + 1 < compiled.length ? [i + 1] : []);
          for (const j of range) {
            const iff: Node = { kind: "or", children: [
              { kind: "and", children: [compiled[i], compiled[j]] },
              { kind: "and", children: [
                { kind: "not", child: compiled[i] },
                { kind: "not", child: compiled[j] },
              ] },
            ] };
            pairs.push(op === "=" ? iff : { kind: "not", child: iff });
          }
        }
        return pairs.length > 0 ? { kind: "and", children: pairs }
                                : { kind: "const", value: true };
      }
      if (NUMERIC_SORTS.has(base)) return this.numericChain(term, op, args);
      const names = args.map((a) => this.usortConstant(a, base));
      const pairs: Node[] = [];
      for (let i = 0; i < names.length; i += 1) {
        const range = op === "distinct"
          ? Array.from({ length: names.length - i - 1 }, (_, k) => i + 1 + k)
          : (i + 1 < names.length ? [i + 1] : []);
        for (const j of range) {
          const [a, b] = [names[i], names[j]].sort();
          const node = this.atomNode(`e|${a}|${b}`, { kind: "e", left: a, right: b });
          pairs.push(op === "distinct" ? { kind: "not", child: node } : node);
        }
      }
      return pairs.length > 0 ? { kind: "and", children: pairs }
                              : { kind: "const", value: true };
    }
    if (op === "<" || op === "<=" || op === ">" || op === ">=") {
      if (args.length < 2) throw new SolverError(`${op} takes at least two arguments`);
      for (const a of args) {
        if (!NUMERIC_SORTS.has(this.sortOf(a))) {
          throw new SolverError(`${op} applies to numeric terms`);
        }
      }
      return this.numericChain(term, op, args);
    }
    if (op !== null) {
      const sig = this.funs.get(op);
      if (sig !== undefined) {
        if (sig.ret !== "Bool") {
          throw new SolverError(
            `applications of ${op} are not supported outside comparisons`);
        }
        if (args.length !== sig.argSorts.length) {
          throw new SolverError(`${op} expects ${sig.argSorts.length} arguments`);
        }
        const names: string[] = [];
        args.forEach((a, i) => {
          const expected = sig.argSorts[i];
          if (BUILTIN_SORTS.has(expected)) {
            throw new SolverError(
              `predicate ${op} over ${expected} arguments is not supported`);
          }
          names.push(this.usortConstant(a, expected));
        });
        return this.atomNode(`p|${op}|${names.join("|")}`,
                             { kind: "p", name: op, args: names });
      }
    }
    throw new SolverError(`cannot interpret term ${printSexpr(term)}`);
  }

  private mergeSorts(sorts: string[], op: string): string {
    let base = sorts[0];
    for (const s of sorts.slice(1)) {
      if (s === base) continue;
      if (NUMERIC_SORTS.has(s) && NUMERIC_SORTS.has(base)) base = "Real";
      else throw new SolverError(`${op} applied to mixed sorts ${base} and ${s}`);
    }
    return base;
  }

  private usortConstant(term: SExpr, sort: string): string {
    if (isAtom(term)) {
      const sig = this.funs.get(term.text);
      if (sig !== undefined && sig.argSorts.length === 0 && sig.ret === sort) {
        return term.text;
      }
    }
    throw new SolverError(
      `expected a declared constant of sort ${sort}, found ${printSexpr(term)}`);
  }

  private numericChain(term: SExpr, op: string, args: SExpr[]): Node {
    const split = splitIte(term, this.funs);
    if (split !== null) {
      const cnode = this.compile(split.cond);
      return { kind: "or", children: [
        { kind: "and", children: [cnode, this.compile(split.thenTerm)] },
        { kind: "and", children: [{ kind: "not", child: cnode },
                                   this.compile(split.elseTerm)] },
      ] };
    }
    const nodes: Node[] = [];
    if (op === "distinct") {
      for (let i = 0; i < args.length; i += 1) {
        for (let j = i + 1; j < args.length; j += 1) {
          nodes.push(this.comparison(op, args[i], args[j]));
        }
      }
    } else {
      for (let i = 0; i + 1 < args.length; i += 1) {
        nodes.push(this.comparison(op, args[i], args[i + 1]));
      }
    }
    return nodes.length === 1 ? nodes[0] : { kind: "and", children: nodes };
  }

  private comparison(op: string, left: SExpr, right: SExpr): Node {
    this.noteIntVars(left);
    this.noteIntVars(right);
    let diff = this.linexpr(left).sub(this.linexpr(right));
    let rel = op;
    if (op === ">") {
      diff = diff.scale(Rat.ONE.neg());
      rel = "<";
    } else if (op === ">=") {
      diff = diff.scale(Rat.ONE.neg());
      rel = "<=";
    } else if (op === "distinct") {
      const key = `a|${linKey(diff)}|=`;
      return { kind: "not", child: this.atomNode(key, { kind: "a", lin: diff, rel: "=" }) };
    }
    const key = `a|${linKey(diff)}|${rel}`;
    return this.atomNode(key, { kind: "a", lin: diff, rel: rel as lira.Rel });
  }

  private noteIntVars(term: SExpr): void {
    if (isAtom(term)) {
      const sig = this.funs.get(term.text);
      if (sig !== undefined && sig.argSorts.length === 0 && sig.ret === "Int") {
        this.intVars.add(term.text);
      }
    } else {
      for (const item of term.items) this.noteIntVars(item);
    }
  }

  private linexpr(term: SExpr): Lin {
    if (isAtom(term)) {
      const text = term.text;
      if (isIntLiteral(text)) return Lin.constant(new Rat(BigInt(text)));
      if (isDecLiteral(text)) return Lin.constant(Rat.fromDecimal(text));
      const sig = this.funs.get(text);
      if (sig !== undefined && sig.argSorts.length === 0 && NUMERIC_SORTS.has(sig.ret)) {
        return Lin.variable(text);
      }
      throw new SolverError(`expected a numeric term, found ${text}`);
    }
    const op = term.items.length > 0 && isAtom(term.items[0])
      ? (term.items[0] as Atom).text : null;
    const args = term.items.slice(1);
    if (op === "+") {
      let out = Lin.constant(Rat.ZERO);
      for (const a of args) out = out.add(this.linexpr(a));
      return out;
    }
    if (op === "-") {
      if (args.length === 1) return this.linexpr(args[0]).scale(Rat.ONE.neg());
      let out = this.linexpr(args[0]);
      for (const a of args.slice(1)) out = out.sub(this.linexpr(a));
      return out;
    }
    if (op === "*") {
      const parts = args.map((a) => this.linexpr(a));
      let out = Lin.constant(Rat.ONE);
      for (const part of parts) {
        if (out.isConstant()) out = part.scale(out.konst);
        else if (part.isConstant()) out = out.scale(part.konst);
        else throw new SolverError("nonlinear multiplication is not supported");
      }
      return out;
    }
    if (op === "/") {
      if (args.length < 2) throw new SolverError("/ takes at least two arguments");
      let out = this.linexpr(args[0]);
      for (const a of args.slice(1)) {
        const divisor = this.linexpr(a);
        if (!divisor.isConstant() || divisor.konst.isZero()) {
          throw new SolverError("division requires a nonzero constant divisor");
        }
        out = out.scale(Rat.ONE.div(divisor.konst));
      }
      return out;
    }
    throw new SolverError(`cannot interpret numeric term ${printSexpr(term)}`);
  }
}

// -- DPLL search with theory checks ----------------------------------------------

const BRANCH_BUDGET = 200000;

class TheoryModel {
  constructor(readonly booleans: Map<number, boolean>,
              readonly numerics: Map<string, Rat>,
              readonly eufParent: Map<string, string>) {}

  eufRoot(name: string): string {
    let current = name;
    while ((this.eufParent.get(current) ?? current) !== current) {
      current = this.eufParent.get(current) as string;
    }
    return current;
  }
}

function eval3(node: Node, assign: Map<number, boolean>): boolean | null {
  switch (node.kind) {
    case "const":
      return node.value;
    case "atom": {
      const v = assign.get(node.index);
      return v === undefined ? null : v;
    }
    case "not": {
      const v = eval3(node.child, assign);
      return v === null ? null : !v;
    }
    case "and": {
      let undetermined = false;
      for (const child of node.children) {
        const v = eval3(child, assign);
        if (v === false) return false;
        if (v === null) undetermined = true;
      }
      return undetermined ? null : true;
    }
    case "or": {
      let undetermined = false;
      for (const child of node.children) {
        const v = eval3(child, assign);
        if (v === true) return true;
        if (v === null) undetermined = true;
      }
      return undetermined ? null : false;
    }
  }
}

function pick(node: Node, assign: Map<number, boolean>): number | null {
  switch (node.kind) {
    case "const":
      return null;
    case "atom":
      return assign.has(node.index) ? null : node.index;
    case "not":
      return pick(node.child, assign);
    default:
      for (const child of node.children) {
        if (eval3(child, assign) === null) {
          const found = pick(child, assign);
          if (found !== null) return found;
        }
      }
      return null;
  }
}

class Searcher {
  private budget = BRANCH_BUDGET;
  sawUnknown = false;

  constructor(private root: Node, private atoms: AtomDesc[],
              private intVars: Set<string>,
              private deadline: number | null) {}

  run(): { verdict: string; model: TheoryModel | null } {
    const model = this.dfs(new Map());
    if (model !== null) return { verdict: "sat", model };
    return { verdict: this.sawUnknown ? "unknown" : "unsat", model: null };
  }

  private dfs(assign: Map<number, boolean>): TheoryModel | null {
    if (this.budget <= 0) {
      this.sawUnknown = true;
      return null;
    }
    this.budget -= 1;
    if (this.deadline !== null && Date.now() > this.deadline) {
      throw new ClientTimeout(0);
    }
    const value = eval3(this.root, assign);
    if (value === false) return null;
    if (value === true) return this.theoryCheck(assign);
    const index = pick(this.root, assign) as number;
    for (const choice of [true, false]) {
      assign.set(index, choice);
      const model = this.dfs(assign);
      if (model !== null) return model;
      assign.delete(index);
    }
    return null;
  }

  private theoryCheck(assign: Map<number, boolean>): TheoryModel | null {
    const parent = new Map<string, string>();
    const find = (x: string): string => {
      while ((parent.get(x) ?? x) !== x) {
        const up = parent.get(x) as string;
        parent.set(x, parent.get(up) ?? up);
        x = parent.get(x) as string;
      }
      return x;
    };
    const union = (a: string, b: string): void => {
      const ra = find(a), rb = find(b);
      if (ra !== rb) parent.set(ra, rb);
    };

    const diseqs: [string, string][] = [];
    this.atoms.forEach((desc, idx) => {
      if (desc.kind !== "e") return;
      const value = assign.get(idx);
      if (value === true) union(desc.left, desc.right);
      else if (value === false) diseqs.push([desc.left, desc.right]);
    });
    for (const [a, b] of diseqs) {
      if (find(a) === find(b)) return null;
    }

    const forced = new Map<number, boolean>();
    const decided = (i: number) => assign.get(i) ?? forced.get(i);
    const groups = new Map<string, { idx: number; args: string[] }[]>();
    this.atoms.forEach((desc, idx) => {
      if (desc.kind === "p") {
        const group = groups.get(desc.name) ?? [];
        group.push({ idx, args: desc.args });
        groups.set(desc.name, group);
      }
    });
    let changed = true;
    while (changed) {
      changed = false;
      for (const apps of groups.values()) {
        for (let i = 0; i < apps.length; i += 1) {
          for (let j = i + 1; j < apps.length; j += 1) {
            const congruent = apps[i].args.every(
              (x, k) => find(x) === find(apps[j].args[k]));
            if (!congruent) continue;
            const va = decided(apps[i].idx);
            const vb = decided(apps[j].idx);
            if (va === undefined && vb === undefined) continue;
            if (va === undefined) {
              forced.set(apps[i].idx, vb as boolean);
              changed = true;
            } else if (vb === undefined) {
              forced.set(apps[j].idx, va);
              changed = true;
            } else if (va !== vb) {
              return null;
            }
          }
        }
      }
    }

    const constraints: { lin: Lin; rel: lira.Rel }[] = [];
    const arithDiseqs: Lin[] = [];
    this.atoms.forEach((desc, idx) => {
      if (desc.kind !== "a") return;
      const value = assign.get(idx);
      if (value === undefined) return;
      if (value) constraints.push({ lin: desc.lin, rel: desc.rel });
      else if (desc.rel === "=") arithDiseqs.push(desc.lin);
      else if (desc.rel === "<=") {
        constraints.push({ lin: desc.lin.scale(Rat.ONE.neg()), rel: "<" });
      } else {
        constraints.push({ lin: desc.lin.scale(Rat.ONE.neg()), rel: "<=" });
      }
    });
    const result = lira.solve(constraints, arithDiseqs, this.intVars);
    if (result.verdict === lira.UNSAT) return null;
    if (result.verdict === lira.UNKNOWN) {
      this.sawUnknown = true;
      return null;
    }

    const booleans = new Map(assign);
    for (const [k, v] of forced) booleans.set(k, v);
    return new TheoryModel(booleans, result.values ?? new Map(), parent);
  }
}

// -- interpreter ---------------------------------------------------------------------

function formatNumeric(value: Rat, sort: string): SExpr {
  const negative = value.isNegative();
  const magnitude = negative ? value.neg() : value;
  let body: SExpr;
  if (sort === "Int") body = atom(magnitude.num.toString());
  else if (magnitude.isIntegral()) body = atom(`${magnitude.num}.0`);
  else body = slist(atom("/"), atom(magnitude.num.toString()),
                    atom(magnitude.den.toString()));
  return negative ? slist(atom("-"), body) : body;
}

export class Interpreter {
  sorts = new Map<string, number>();
  funs = new Map<string, Sig>();
  defs = new Map<string, Def>();
  assertions: SExpr[] = [];
  frames: [number, number, number, number][] = [];
  printSuccess = false;
  exited = false;
  hadError = false;
  private model: Map<string, [string, SExpr]> | null = null;
  private skolemCounter = 0;
  deadline: number | null = null;

  execute(form: SExpr): string | null {
    try {
      return this.dispatch(form);
    } catch (err) {
      if (err instanceof SolverError) {
        this.hadError = true;
        return errorResponse(err.message);
      }
      throw err;
    }
  }

  private dispatch(form: SExpr): string | null {
    if (!(form instanceof SList) || form.items.length === 0 || !isAtom(form.items[0])) {
      throw new SolverError("expected a command");
    }
    const command = (form.items[0] as Atom).text;
    const args = form.items.slice(1);
    switch (command) {
      case "set-logic":
      case "set-info":
        return this.ok();
      case "set-option":
        return this.cmdSetOption(args);
      case "get-info":
        return this.cmdGetInfo(args);
      case "declare-sort":
        return this.cmdDeclareSort(args);
      case "declare-const":
        return this.cmdDeclareConst(args);
      case "declare-fun":
        return this.cmdDeclareFun(args);
      case "define-fun":
        return this.cmdDefineFun(args);
      case "assert":
        return this.cmdAssert(args);
      case "check-sat":
        return this.cmdCheckSat();
      case "get-model":
        return this.cmdGetModel();
      case "push":
        return this.cmdPush(args);
      case "pop":
        return this.cmdPop(args);
      case "reset":
        return this.cmdReset();
      case "echo":
        return this.cmdEcho(args);
      case "exit":
        this.exited = true;
        return null;
      default:
        throw new SolverError(`unsupported command ${command}`);
    }
  }

  private ok(): string | null {
    return this.printSuccess ? "success" : null;
  }

  private cmdSetOption(args: SExpr[]): string | null {
    if (args.length === 2 && isAtom(args[0])
        && (args[0] as Atom).text === ":print-success" && isAtom(args[1])) {
      this.printSuccess = (args[1] as Atom).text === "true";
    }
    return this.ok();
  }

  private cmdGetInfo(args: SExpr[]): string {
    if (args.length === 1 && isAtom(args[0])) {
      const key = (args[0] as Atom).text;
      if (key === ":name") return `(:name "${SOLVER_NAME}")`;
      if (key === ":version") return `(:version "${SOLVER_VERSION}")`;
    }
    throw new SolverError("unsupported get-info query");
  }

  private cmdDeclareSort(args: SExpr[]): string | null {
    if (args.length === 0 || !isAtom(args[0]) || !isSymbol((args[0] as Atom).text)) {
      throw new SolverError("declare-sort expects a sort symbol");
    }
    const name = (args[0] as Atom).text;
    if (args.length > 1) {
      if (!(isAtom(args[1]) && (args[1] as Atom).text === "0")) {
        throw new SolverError("only 0-arity sorts are supported");
      }
    }
    if (BUILTIN_SORTS.has(name) || this.sorts.has(name)) {
      throw new SolverError(`sort ${name} already declared`);
    }
    this.sorts.set(name, 0);
    this.invalidate();
    return this.ok();
  }

  private sortName(term: SExpr): string {
    if (!isAtom(term)) throw new SolverError("parametric sorts are not supported");
    const name = term.text;
    if (BUILTIN_SORTS.has(name) || this.sorts.has(name)) return name;
    throw new SolverError(`unknown sort ${name}`);
  }

  private declare(name: string, argSorts: string[], ret: string): void {
    if (!isSymbol(name) || RESERVED.has(name)) {
      throw new SolverError(`invalid symbol ${name}`);
    }
    if (this.funs.has(name) || this.defs.has(name)) {
      throw new SolverError(`${name} already declared`);
    }
    this.funs.set(name, { argSorts, ret });
    this.invalidate();
  }

  private cmdDeclareConst(args: SExpr[]): string | null {
    if (args.length !== 2 || !isAtom(args[0])) {
      throw new SolverError("declare-const expects a symbol and a sort");
    }
    this.declare((args[0] as Atom).text, [], this.sortName(args[1]));
    return this.ok();
  }

  private cmdDeclareFun(args: SExpr[]): string | null {
    if (args.length !== 3 || !isAtom(args[0]) || !(args[1] instanceof SList)) {
      throw new SolverError("declare-fun expects a symbol, argument sorts, and a sort");
    }
    const argSorts = (args[1] as SList).items.map((s) => this.sortName(s));
    this.declare((args[0] as Atom).text, argSorts, this.sortName(args[2]));
    return this.ok();
  }

  private cmdDefineFun(args: SExpr[]): string | null {
    if (args.length !== 4 || !isAtom(args[0]) || !(args[1] instanceof SList)) {
      throw new SolverError(
        "define-fun expects a symbol, parameters, a sort, and a body");
    }
    const name = (args[0] as Atom).text;
    if (!isSymbol(name) || RESERVED.has(name)) {
      throw new SolverError(`invalid symbol ${name}`);
    }
    if (this.funs.has(name) || this.defs.has(name)) {
      throw new SolverError(`${name} already declared`);
    }
    const params: [string, string][] = [];
    for (const binding of (args[1] as SList).items) {
      if (!(binding instanceof SList) || binding.items.length !== 2
          || !isAtom(binding.items[0])) {
        throw new SolverError("malformed define-fun parameter");
      }
      params.push([(binding.items[0] as Atom).text, this.sortName(binding.items[1])]);
    }
    const ret = this.sortName(args[2]);
    const shadow = new Map<string, SExpr | null>();
    for (const [p] of params) shadow.set(p, null);
    const body = this.expand(args[3], shadow);
    const env = new Map(params);
    const actual = sortOf(body, env, this.funs);
    if (actual !== ret && !(NUMERIC_SORTS.has(actual) && NUMERIC_SORTS.has(ret))) {
      throw new SolverError(`define-fun body has sort ${actual}, expected ${ret}`);
    }
    this.defs.set(name, { params, ret, body });
    this.invalidate();
    return this.ok();
  }

  private cmdAssert(args: SExpr[]): string | null {
    if (args.length !== 1) throw new SolverError("assert expects one term");
    const term = this.expand(args[0], new Map());
    if (sortOf(term, new Map(), this.funs) !== "Bool") {
      throw new SolverError("asserted term must be Bool");
    }
    this.assertions.push(term);
    this.invalidate();
    return this.ok();
  }

  private frameCount(args: SExpr[]): number {
    if (args.length === 0) return 1;
    if (args.length === 1 && isAtom(args[0]) && isNumeral((args[0] as Atom).text)) {
      return Number((args[0] as Atom).text);
    }
    throw new SolverError("expected a numeral");
  }

  private cmdPush(args: SExpr[]): string | null {
    const count = this.frameCount(args);
    for (let i = 0; i < count; i += 1) {
      this.frames.push([this.sorts.size, this.funs.size,
                        this.defs.size, this.assertions.length]);
    }
    this.invalidate();
    return this.ok();
  }

  private cmdPop(args: SExpr[]): string | null {
    const count = this.frameCount(args);
    if (count > this.frames.length) {
      throw new SolverError("pop without matching push");
    }
    for (let i = 0; i < count; i += 1) {
      const [nSorts, nFuns, nDefs, nAsserts] = this.frames.pop() as
        [number, number, number, number];
      truncate(this.sorts, nSorts);
      truncate(this.funs, nFuns);
      truncate(this.defs, nDefs);
      this.assertions.length = nAsserts;
    }
    this.invalidate();
    return this.ok();
  }

  private cmdReset(): string | null {
    this.sorts = new Map();
    this.funs = new Map();
    this.defs = new Map();
    this.assertions = [];
    this.frames = [];
    this.printSuccess = false;
    this.exited = false;
    this.hadError = false;
    this.model = null;
    this.skolemCounter = 0;
    return this.ok();
  }

  private cmdEcho(args: SExpr[]): string {
    if (args.length !== 1 || !isAtom(args[0])
        || !(args[0] as Atom).text.startsWith('"')) {
      throw new SolverError("echo expects a string literal");
    }
    const text = (args[0] as Atom).text;
    return text.slice(1, -1).replaceAll('""', '"');
  }

  // -- expansion --------------------------------------------------------------

  private expand(term: SExpr, bound: Map<string, SExpr | null>): SExpr {
    if (isAtom(term)) {
      if (bound.has(term.text)) return term;
      const definition = this.defs.get(term.text);
      if (definition !== undefined) {
        if (definition.params.length > 0) {
          throw new SolverError(`${term.text} expects arguments`);
        }
        return definition.body;
      }
      return term;
    }
    if (term.items.length === 0) return term;
    const op = isAtom(term.items[0]) ? (term.items[0] as Atom).text : null;
    if (op === "let") {
      if (term.items.length !== 3 || !(term.items[1] instanceof SList)) {
        throw new SolverError("malformed let");
      }
      const mapping = new Map<string, SExpr>();
      for (const binding of (term.items[1] as SList).items) {
        if (!(binding instanceof SList) || binding.items.length !== 2
            || !isAtom(binding.items[0])) {
          throw new SolverError("malformed let binding");
        }
        mapping.set((binding.items[0] as Atom).text,
                    this.expand(binding.items[1], bound));
      }
      const innerBound = new Map(bound);
      for (const k of mapping.keys()) innerBound.set(k, null);
      const body = this.expand(term.items[2], innerBound);
      return substitute(body, mapping);
    }
    if ((op === "forall" || op === "exists") && term.items.length === 3
        && term.items[1] instanceof SList) {
      const inner = new Map(bound);
      for (const binding of (term.items[1] as SList).items) {
        if (binding instanceof SList && binding.items.length > 0
            && isAtom(binding.items[0])) {
          inner.set((binding.items[0] as Atom).text, null);
        }
      }
      return new SList([term.items[0], term.items[1],
                        this.expand(term.items[2], inner)]);
    }
    if (op !== null && this.defs.has(op) && !bound.has(op)) {
      const { params, body } = this.defs.get(op) as Def;
      const args = term.items.slice(1).map((a) => this.expand(a, bound));
      if (args.length !== params.length) {
        throw new SolverError(`${op} expects ${params.length} arguments`);
      }
      const mapping = new Map<string, SExpr>();
      params.forEach(([p], i) => mapping.set(p, args[i]));
      return substitute(body, mapping);
    }
    return new SList(term.items.map((t) => this.expand(t, bound)));
  }

  // -- quantifier elimination ----------------------------------------------------

  private freshConstant(sort: string, funs: Map<string, Sig>): string {
    this.skolemCounter += 1;
    const name = `@sk!${this.skolemCounter}`;
    funs.set(name, { argSorts: [], ret: sort });
    return name;
  }

  private universe(sort: string, funs: Map<string, Sig>): SExpr[] {
    if (sort === "Bool") return [atom("true"), atom("false")];
    const members: SExpr[] = [];
    for (const [name, sig] of funs) {
      if (sig.argSorts.length === 0 && sig.ret === sort) members.push(atom(name));
    }
    if (members.length === 0) {
      const fresh = `@el!${sort}`;
      if (!funs.has(fresh)) funs.set(fresh, { argSorts: [], ret: sort });
      members.push(atom(fresh));
    }
    return members;
  }

  private quantifierSorts(bindings: SList): [string, string][] {
    const out: [string, string][] = [];
    for (const binding of bindings.items) {
      const b = binding as SList;
      const variable = (b.items[0] as Atom).text;
      const sort = (b.items[1] as Atom).text;
      if (NUMERIC_SORTS.has(sort)) {
        throw new UnsupportedQuantifier(`quantification over ${sort} is not supported`);
      }
      if (sort !== "Bool" && !this.sorts.has(sort)) {
        throw new SolverError(`unknown sort ${sort}`);
      }
      out.push([variable, sort]);
    }
    return out;
  }

  private skolemPass(term: SExpr, pol: number, funs: Map<string, Sig>): SExpr {
    if (isAtom(term)) return term;
    const op = term.items.length > 0 && isAtom(term.items[0])
      ? (term.items[0] as Atom).text : null;
    const args = term.items.slice(1);
    if (op === "not" && args.length === 1) {
      return new SList([term.items[0], this.skolemPass(args[0], -pol, funs)]);
    }
    if (op === "and" || op === "or") {
      return new SList([term.items[0],
                        ...args.map((a) => this.skolemPass(a, pol, funs))]);
    }
    if (op === "=>" && args.length >= 2) {
      const parts = args.slice(0, -1).map((a) => this.skolemPass(a, -pol, funs));
      parts.push(this.skolemPass(args[args.length - 1], pol, funs));
      return new SList([term.items[0], ...parts]);
    }
    if (op === "forall" || op === "exists") {
      const skolemize = (op === "exists" && pol > 0) || (op === "forall" && pol < 0);
      if (!skolemize) return term;
      const mapping = new Map<string, SExpr>();
      const boolBinders: SExpr[] = [];
      for (const [variable, sort] of this.quantifierSorts(term.items[1] as SList)) {
        if (sort === "Bool") boolBinders.push(slist(atom(variable), atom("Bool")));
        else mapping.set(variable, atom(this.freshConstant(sort, funs)));
      }
      const body = this.skolemPass(substitute(args[1], mapping), pol, funs);
      if (boolBinders.length > 0) {
        return new SList([term.items[0], new SList(boolBinders), body]);
      }
      return body;
    }
    if (containsQuantifier(term)) {
      throw new UnsupportedQuantifier("quantifiers under ite/xor/= are not supported");
    }
    return term;
  }

  private groundPass(term: SExpr, pol: number, depth: number,
                     funs: Map<string, Sig>, state: { approx: boolean }): SExpr {
    if (isAtom(term)) return term;
    const op = term.items.length > 0 && isAtom(term.items[0])
      ? (term.items[0] as Atom).text : null;
    const args = term.items.slice(1);
    if (op === "not" && args.length === 1) {
      return new SList([term.items[0],
                        this.groundPass(args[0], -pol, depth, funs, state)]);
    }
    if (op === "and" || op === "or") {
      return new SList([term.items[0],
                        ...args.map((a) => this.groundPass(a, pol, depth, funs, state))]);
    }
    if (op === "=>" && args.length >= 2) {
      const parts = args.slice(0, -1)
        .map((a) => this.groundPass(a, -pol, depth, funs, state));
      parts.push(this.groundPass(args[args.length - 1], pol, depth, funs, state));
      return new SList([term.items[0], ...parts]);
    }
    if (op === "forall" || op === "exists") {
      const groundConj = (op === "forall" && pol > 0) || (op === "exists" && pol < 0);
      const variables = this.quantifierSorts(term.items[1] as SList);
      if (!groundConj) {
        const mapping = new Map<string, SExpr>();
        let instances: SExpr[] = [args[1]];
        for (const [variable, sort] of variables) {
          if (sort === "Bool") {
            const expanded: SExpr[] = [];
            for (const inst of instances) {
              for (const member of this.universe("Bool", funs)) {
                expanded.push(substitute(inst, new Map([[variable, member]])));
              }
            }
            instances = expanded;
          } else {
            if (depth > 0) state.approx = true;
            mapping.set(variable, atom(this.freshConstant(sort, funs)));
          }
        }
        instances = instances.map((inst) => substitute(inst, mapping));
        const expanded = instances.map(
          (inst) => this.groundPass(inst, pol, depth, funs, state));
        if (expanded.length === 1) return expanded[0];
        const joiner = op === "exists" ? "or" : "and";
        return new SList([atom(joiner), ...expanded]);
      }
      let instances: SExpr[] = [args[1]];
      let bumpsDepth = false;
      for (const [variable, sort] of variables) {
        const members = this.universe(sort, funs);
        if (sort !== "Bool") bumpsDepth = true;
        const expanded: SExpr[] = [];
        for (const inst of instances) {
          for (const member of members) {
            expanded.push(substitute(inst, new Map([[variable, member]])));
          }
        }
        instances = expanded;
        if (instances.length > 10000) {
          throw new UnsupportedQuantifier("quantifier grounding too large");
        }
      }
      const innerDepth = bumpsDepth ? depth + 1 : depth;
      const expanded = instances.map(
        (inst) => this.groundPass(inst, pol, innerDepth, funs, state));
      const joiner = op === "forall" ? "and" : "or";
      return new SList([atom(joiner), ...expanded]);
    }
    if (containsQuantifier(term)) {
      throw new UnsupportedQuantifier("quantifiers under ite/xor/= are not supported");
    }
    return term;
  }

  // -- solving -----------------------------------------------------------------

  private cmdCheckSat(): string {
    this.model = null;
    const funs = new Map(this.funs);
    const state = { approx: false };
    let grounded: SExpr[];
    try {
      const prepared = this.assertions.map((a) => this.skolemPass(a, 1, funs));
      grounded = prepared.map((a) => this.groundPass(a, 1, 0, funs, state));
    } catch (err) {
      if (err instanceof UnsupportedQuantifier) return "unknown";
      throw err;
    }
    const compiler = new Compiler(funs);
    const roots = grounded.map((t) => compiler.compile(t));
    const root: Node = roots.length > 0
      ? { kind: "and", children: roots }
      : { kind: "const", value: true };
    const { verdict, model } = new Searcher(root, compiler.atoms,
                                            compiler.intVars, this.deadline).run();
    if (verdict === "sat" && state.approx) return "unknown";
    if (verdict === "sat") this.model = this.buildModel(compiler, model as TheoryModel);
    return verdict;
  }

  private buildModel(compiler: Compiler, tm: TheoryModel):
      Map<string, [string, SExpr]> {
    const atomIndex = new Map<string, number>();
    compiler.atoms.forEach((desc, idx) => {
      if (desc.kind === "b") atomIndex.set(desc.name, idx);
    });
    const classLabels = new Map<string, string>();
    const model = new Map<string, [string, SExpr]>();
    for (const [name, sig] of this.funs) {
      if (sig.argSorts.length > 0 || name.startsWith("@")) continue;
      if (sig.ret === "Bool") {
        const idx = atomIndex.get(name);
        const value = idx !== undefined ? tm.booleans.get(idx) ?? false : false;
        model.set(name, [sig.ret, atom(value ? "true" : "false")]);
      } else if (NUMERIC_SORTS.has(sig.ret)) {
        const value = tm.numerics.get(name) ?? Rat.ZERO;
        model.set(name, [sig.ret, formatNumeric(value, sig.ret)]);
      } else {
        const root = tm.eufRoot(name);
        const key = `${sig.ret}|${root}`;
        if (!classLabels.has(key)) {
          let count = 0;
          for (const k of classLabels.keys()) {
            if (k.startsWith(`${sig.ret}|`)) count += 1;
          }
          classLabels.set(key, `@${sig.ret}!${count}`);
        }
        model.set(name, [sig.ret, atom(classLabels.get(key) as string)]);
      }
    }
    return model;
  }

  private cmdGetModel(): string {
    if (this.model === null) throw new SolverError("model is not available");
    const lines = ["("];
    for (const [name, [sort, value]] of this.model) {
      lines.push(`  (define-fun ${name} () ${sort} ${printSexpr(value)})`);
    }
    lines.push(")");
    return lines.join("\n");
  }

  private invalidate(): void {
    this.model = null;
  }
}

function truncate(map: Map<string, unknown>, size: number): void {
  while (map.size > size) {
    const lastKey = [...map.keys()][map.size - 1];
    map.delete(lastKey);
  }
}

// -- script runner (mirrors the subprocess batch protocol) ---------------------------

/** Split raw text into top-level forms, dropping comment bytes but
 * keeping their newline so error lines stay accurate. */
export function splitForms(text: string): { text: string; line: number }[] {
  const out: { text: string; line: number }[] = [];
  let buf = "";
  let depth = 0;
  let line = 1;
  let formLine = 1;
  let state: "normal" | "string" | "string_quote" | "pipe" | "comment" = "normal";
  for (let i = 0; i <= text.length; i += 1) {
    const ch = i < text.length ? text[i] : "";
    if (ch === "") {
      if (buf.trim().length > 0) out.push({ text: buf, line: formLine });
      break;
    }
    if (ch === "\n") line += 1;
    if (state === "comment") {
      if (ch === "\n") {
        state = "normal";
        if (buf.length > 0) buf += ch;
      }
      continue;
    }
    if (state === "string") {
      buf += ch;
      if (ch === '"') state = "string_quote";
      continue;
    }
    if (state === "string_quote") {
      if (ch === '"') {
        buf += ch;
        state = "string";
        continue;
      }
      state = "normal";
    }
    if (state === "pipe") {
      buf += ch;
      if (ch === "|") state = "normal";
      continue;
    }
    if (ch === ";") {
      state = "comment";
      continue;
    }
    if (depth === 0 && (ch === " " || ch === "\t" || ch === "\r" || ch === "\n")) {
      if (buf.length > 0) {
        out.push({ text: buf, line: formLine });
        buf = "";
      }
      continue;
    }
    if (buf.length === 0) formLine = line;
    buf += ch;
    if (ch === '"') state = "string";
    else if (ch === "|") state = "pipe";
    else if (ch === "(") depth += 1;
    else if (ch === ")") {
      depth -= 1;
      if (depth <= 0) {
        out.push({ text: buf, line: formLine });
        buf = "";
        depth = 0;
      }
    }
  }
  return out;
}

export interface RunResult {
  output: string;
  hadError: boolean;
  timedOut: boolean;
}

/** Execute a whole script the way the build-time runner does: responses
 * concatenated line by line. With timeoutMs set, a deadline aborts long
 * searches with status timedOut (mirrors the build's wall clock). */
export function runScript(code: string, options: { timeoutMs?: number } = {}): RunResult {
  const interp = new Interpreter();
  if (options.timeoutMs !== undefined) {
    interp.deadline = Date.now() + options.timeoutMs;
  }
  const pieces: string[] = [];
  try {
    for (const { text, line } of splitForms(code)) {
      let forms: SExpr[];
      try {
        forms = parseSexpr(text, line);
      } catch (err) {
        if (err instanceof SExprError) {
          interp.hadError = true;
          pieces.push(errorResponse(err.message) + "\n");
          continue;
        }
        throw err;
      }
      for (const form of forms) {
        const response = interp.execute(form);
        if (response !== null) pieces.push(response + "\n");
        if (interp.exited) {
          return { output: pieces.join(""), hadError: interp.hadError, timedOut: false };
        }
      }
    }
  } catch (err) {
    if (err instanceof ClientTimeout) {
      return { output: pieces.join(""), hadError: true, timedOut: true };
    }
    throw err;
  }
  return { output: pieces.join(""), hadError: interp.hadError, timedOut: false };
}
