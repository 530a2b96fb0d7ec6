/** S-expression reading and printing for SMT-LIB text.
 *
 * Mirrors the build engine's parser, including error wording and
 * positions, so client-side runs report the same diagnostics the build
 * would.
 */

export class SExprError extends Error {
  constructor(message: string, readonly line: number, readonly col: number) {
    super(`${message} at line ${line}, column ${col}`);
  }
}

export class UnbalancedParen extends SExprError {}
export class UnterminatedString extends SExprError {}

export type SExpr = Atom | SList;

export class Atom {
  constructor(readonly text: string) {}
}

export class SList {
  constructor(readonly items: readonly SExpr[]) {}
}

export function atom(text: string): Atom {
  return new Atom(text);
}

export function slist(...items: SExpr[]): SList {
  return new SList(items);
}

export function isAtom(e: SExpr): e is Atom {
  return e instanceof Atom;
}

export function head(e: SExpr): string | null {
  if (e instanceof SList && e.items.length > 0 && e.items[0] instanceof Atom) {
    return (e.items[0] as Atom).text;
  }
  return null;
}

const BARE_TERMINATORS = new Set([" ", "\t", "\r", "\n", "(", ")", ";", '"', "|"]);

type Token = { kind: "open" | "close" | "atom"; lexeme: string; line: number; col: number };

function* tokenize(text: string, startLine: number): Generator<Token> {
  let i = 0;
  let line = startLine;
  let col = 1;
  const n = text.length;
  while (i < n) {
    const ch = text[i];
    if (ch === "\n") {
      i += 1;
      line += 1;
      col = 1;
    } else if (ch === " " || ch === "\t" || ch === "\r") {
      i += 1;
      col += 1;
    } else if (ch === ";") {
      while (i < n && text[i] !== "\n") i += 1;
    } else if (ch === "(") {
      yield { kind: "open", lexeme: "(", line, col };
      i += 1;
      col += 1;
    } else if (ch === ")") {
      yield { kind: "close", lexeme: ")", line, col };
      i += 1;
      col += 1;
    } else if (ch === '"') {
      const tokLine = line, tokCol = col;
      let j = i + 1;
      for (;;) {
        if (j >= n) throw new UnterminatedString("unterminated string literal", tokLine, tokCol);
        if (text[j] === '"') {
          if (j + 1 < n && text[j + 1] === '"') {
            j += 2;
            continue;
          }
          break;
        }
        if (text[j] === "\n") {
          line += 1;
          col = 0;
        }
        j += 1;
        col += 1;
      }
      yield { kind: "atom", lexeme: text.slice(i, j + 1), line: tokLine, col: tokCol };
      col += 2;
      i = j + 1;
    } else if (ch === "|") {
      const tokLine = line, tokCol = col;
      let j = i + 1;
      while (j < n && text[j] !== "|") {
        if (text[j] === "\n") {
          line += 1;
          col = 0;
        }
        j += 1;
        col += 1;
      }
      if (j >= n) throw new UnterminatedString("unterminated string literal", tokLine, tokCol);
      yield { kind: "atom", lexeme: text.slice(i, j + 1), line: tokLine, col: tokCol };
      col += 2;
      i = j + 1;
    } else {
      const tokLine = line, tokCol = col;
      let j = i;
      while (j < n && !BARE_TERMINATORS.has(text[j])) j += 1;
      yield { kind: "atom", lexeme: text.slice(i, j), line: tokLine, col: tokCol };
      col += j - i;
      i = j;
    }
  }
}

export function parseSexpr(text: string, startLine = 1): SExpr[] {
  const forms: SExpr[] = [];
  const stack: { items: SExpr[]; line: number; col: number }[] = [];
  for (const token of tokenize(text, startLine)) {
    if (token.kind === "open") {
      stack.push({ items: [], line: token.line, col: token.col });
    } else if (token.kind === "close") {
      const top = stack.pop();
      if (!top) {
        throw new UnbalancedParen("unmatched closing parenthesis", token.line, token.col);
      }
      const node = new SList(top.items);
      if (stack.length > 0) stack[stack.length - 1].items.push(node);
      else forms.push(node);
    } else {
      const node = new Atom(token.lexeme);
      if (stack.length > 0) stack[stack.length - 1].items.push(node);
      else forms.push(node);
    }
  }
  if (stack.length > 0) {
    const top = stack[stack.length - 1];
    throw new UnbalancedParen("unclosed parenthesis", top.line, top.col);
  }
  return forms;
}

export function parseOne(text: string): SExpr {
  const forms = parseSexpr(text);
  if (forms.length !== 1) {
    throw new SExprError(`expected exactly one form, found ${forms.length}`, 1, 1);
  }
  return forms[0];
}

export function printSexpr(e: SExpr): string {
  if (e instanceof Atom) return e.text;
  return "(" + e.items.map(printSexpr).join(" ") + ")";
}

export function equalSexpr(a: SExpr, b: SExpr): boolean {
  if (a instanceof Atom && b instanceof Atom) return a.text === b.text;
  if (a instanceof SList && b instanceof SList) {
    if (a.items.length !== b.items.length) return false;
    return a.items.every((item, i) => equalSexpr(item, b.items[i]));
  }
  return false;
}
