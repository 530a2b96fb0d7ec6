"""Command loop for the reference solver subprocess.

Reads s-expression commands incrementally from stdin (so interactive
sessions get a response after each command, without waiting for EOF),
executes them, and prints responses to stdout, flushing after each one.
"""

from __future__ import annotations

import sys

from ..sexpr import SExprError, parse_sexpr
from .core import Interpreter, SOLVER_NAME, SOLVER_VERSION, _error


class FormReader:
    """Accumulates stream text into complete top-level forms.

    Comment bytes are dropped (their terminating newline is kept, so
    line numbers inside a form stay correct for error reporting);
    strings and |symbols| pass through verbatim.
    """

    def __init__(self, stream):
        self.stream = stream

    def forms(self):
        """Yield (form_text, start_line) for each complete top-level form."""
        buf: list[str] = []
        depth = 0
        line = 1
        form_line = 1
        state = "normal"  # or: string, string_quote, pipe, comment
        while True:
            ch = self.stream.read(1)
            if ch == "":
                remainder = "".join(buf)
                if remainder.strip():
                    yield remainder, form_line
                return
            if ch == "\n":
                line += 1

            if state == "comment":
                if ch == "\n":
                    state = "normal"
                    if buf:
                        buf.append(ch)
                continue
            if state == "string":
                buf.append(ch)
                if ch == '"':
                    state = "string_quote"
                continue
            if state == "string_quote":
                if ch == '"':  # doubled quote: still inside the literal
                    buf.append(ch)
                    state = "string"
                    continue
                state = "normal"  # literal ended before this char
            if state == "pipe":
                buf.append(ch)
                if ch == "|":
                    state = "normal"
                continue

            if ch == ";":
                state = "comment"
                continue
            if depth == 0 and ch in " \t\r\n":
                if buf:  # terminates a top-level bare atom
                    yield "".join(buf), form_line
                    buf = []
                continue
            if not buf:
                form_line = line
            buf.append(ch)
            if ch == '"':
                state = "string"
            elif ch == "|":
                state = "pipe"
            elif ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth <= 0:
                    yield "".join(buf), form_line
                    buf = []
                    depth = 0


def run(stdin, stdout) -> int:
    interp = Interpreter()
    reader = FormReader(stdin)
    for text, start_line in reader.forms():
        try:
            forms = parse_sexpr(text, start_line=start_line)
        except SExprError as exc:
            interp.had_error = True
            print(_error(str(exc)), file=stdout, flush=True)
            continue
        for form in forms:
            response = interp.execute(form)
            if response is not None:
                print(response, file=stdout, flush=True)
            if interp.exited:
                return 1 if interp.had_error else 0
    return 1 if interp.had_error else 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if "--version" in argv:
        print(f"{SOLVER_NAME} {SOLVER_VERSION}")
        return 0
    return run(sys.stdin, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
