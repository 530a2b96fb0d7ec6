"""S-expression reading and printing for SMT-LIB text.

Atoms keep their raw lexeme (string literals keep their quotes, quoted
symbols keep their pipes), so printing a parsed tree reproduces an
equivalent form and `parse(print(tree)) == tree` holds for every tree.
"""

from __future__ import annotations

from dataclasses import dataclass


class SExprError(ValueError):
    """Parse failure with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


class UnbalancedParen(SExprError):
    def __init__(self, line: int, col: int, message: str = "unbalanced parenthesis"):
        super().__init__(message, line, col)


class UnterminatedString(SExprError):
    def __init__(self, line: int, col: int):
        super().__init__("unterminated string literal", line, col)


@dataclass(frozen=True)
class Atom:
    text: str

    def __repr__(self):
        return f"Atom({self.text!r})"


@dataclass(frozen=True)
class SList:
    items: tuple

    def __repr__(self):
        return f"SList({list(self.items)!r})"

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


SExpr = Atom | SList


def atom(text: str) -> Atom:
    return Atom(text)


def slist(*items: SExpr) -> SList:
    return SList(tuple(items))


_BARE_TERMINATORS = set(' \t\r\n();"|')


def _tokenize(text: str, start_line: int = 1):
    """Yield (kind, lexeme, line, col) with kind in {open, close, atom}."""
    i = 0
    n = len(text)
    line = start_line
    col = 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == "(":
            yield ("open", "(", line, col)
            i += 1
            col += 1
        elif ch == ")":
            yield ("close", ")", line, col)
            i += 1
            col += 1
        elif ch == '"':
            tok_line, tok_col = line, col
            j = i + 1
            while True:
                if j >= n:
                    raise UnterminatedString(tok_line, tok_col)
                if text[j] == '"':
                    # SMT-LIB escapes a quote by doubling it
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                if text[j] == "\n":
                    line += 1
                    col = 0
                j += 1
                col += 1
            lexeme = text[i : j + 1]
            yield ("atom", lexeme, tok_line, tok_col)
            col += 2  # opening and closing quote
            i = j + 1
        elif ch == "|":
            tok_line, tok_col = line, col
            j = i + 1
            while j < n and text[j] != "|":
                if text[j] == "\n":
                    line += 1
                    col = 0
                j += 1
                col += 1
            if j >= n:
                raise UnterminatedString(tok_line, tok_col)
            yield ("atom", text[i : j + 1], tok_line, tok_col)
            col += 2
            i = j + 1
        else:
            tok_line, tok_col = line, col
            j = i
            while j < n and text[j] not in _BARE_TERMINATORS:
                j += 1
            yield ("atom", text[i:j], tok_line, tok_col)
            col += j - i
            i = j


def parse_sexpr(text: str, start_line: int = 1) -> list:
    """Parse all top-level forms in `text`.

    Comments (``;`` to end of line) are skipped; string literals and
    |quoted symbols| are honored. Raises UnbalancedParen for a stray
    closing paren or an unclosed opening one (reported at the deepest
    open paren still pending), UnterminatedString for an unclosed
    literal.
    """
    forms: list[SExpr] = []
    stack: list[tuple[list, int, int]] = []
    for kind, lexeme, line, col in _tokenize(text, start_line):
        if kind == "open":
            stack.append(([], line, col))
        elif kind == "close":
            if not stack:
                raise UnbalancedParen(line, col, "unmatched closing parenthesis")
            items, _, _ = stack.pop()
            node = SList(tuple(items))
            if stack:
                stack[-1][0].append(node)
            else:
                forms.append(node)
        else:
            node = Atom(lexeme)
            if stack:
                stack[-1][0].append(node)
            else:
                forms.append(node)
    if stack:
        _, line, col = stack[-1]
        raise UnbalancedParen(line, col, "unclosed parenthesis")
    return forms


def parse_one(text: str) -> SExpr:
    """Parse exactly one form; error on zero or several."""
    forms = parse_sexpr(text)
    if len(forms) != 1:
        raise SExprError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def print_sexpr(expr: SExpr) -> str:
    """Canonical single-space-separated rendering. parse o print = identity."""
    if isinstance(expr, Atom):
        return expr.text
    return "(" + " ".join(print_sexpr(item) for item in expr.items) + ")"


def is_atom(expr: SExpr, text: str | None = None) -> bool:
    return isinstance(expr, Atom) and (text is None or expr.text == text)


def head(expr: SExpr) -> str | None:
    """Leading atom text of a list form, else None."""
    if isinstance(expr, SList) and expr.items and isinstance(expr.items[0], Atom):
        return expr.items[0].text
    return None
