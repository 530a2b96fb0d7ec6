"""Interactive solver sessions over an SMT-LIB v2 subprocess.

One session owns one long-lived solver process in incremental mode
(:print-success on, so every command gets acknowledged). check_sat
pushes its assertions into a scratch frame that stays open for
get_model and is recycled on the next check, so the base declarations
survive any sequence of queries.
"""

from __future__ import annotations

import queue
import subprocess
import sys
import threading
from dataclasses import dataclass, field

from .sexpr import Atom, SExpr, SList, parse_one, parse_sexpr, print_sexpr

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

DEFAULT_SOLVER_COMMAND = (sys.executable, "-m", "smt_forge.refsolver")

_OPERATORS = {
    "and", "or", "not", "=>", "xor", "ite", "=", "distinct",
    "<", "<=", ">", ">=", "+", "-", "*", "/", "div", "mod", "abs",
    "true", "false", "let", "forall", "exists", "to_real", "to_int",
}


class SessionError(Exception):
    pass


class SolverError(SessionError):
    """The solver reported (error ...) or died underneath us."""


class SolverTimeout(SessionError):
    pass


class NoModelAvailable(SessionError):
    pass


class IncompleteModel(SessionError):
    def __init__(self, constant: str):
        super().__init__(f"model does not bind constant {constant!r}")
        self.constant = constant


class EmptyModel(SessionError):
    pass


@dataclass
class Model:
    """Satisfying assignment: declared constant name -> ground value."""

    bindings: dict = field(default_factory=dict)   # name -> value SExpr
    sorts: dict = field(default_factory=dict)      # name -> sort name

    def __eq__(self, other):
        return isinstance(other, Model) and self.bindings == other.bindings

    def items(self):
        return self.bindings.items()


def free_constants(formula: SExpr, bound: frozenset = frozenset()) -> set:
    """Constant names a formula mentions, minus operators and literals."""
    names: set[str] = set()
    if isinstance(formula, Atom):
        text = formula.text
        if text in _OPERATORS or text in bound or text.startswith((":", '"')):
            return names
        if text.lstrip("-").replace(".", "", 1).isdigit():
            return names
        names.add(text)
        return names
    items = formula.items
    if not items:
        return names
    op = items[0].text if isinstance(items[0], Atom) else None
    if op in ("forall", "exists", "let") and len(items) >= 3 \
            and isinstance(items[1], SList):
        inner = set(bound)
        for binding in items[1].items:
            if isinstance(binding, SList) and binding.items \
                    and isinstance(binding.items[0], Atom):
                inner.add(binding.items[0].text)
        if op == "let":
            for binding in items[1].items:
                names |= free_constants(binding.items[1], bound)
        for term in items[2:]:
            names |= free_constants(term, frozenset(inner))
        return names
    start = 1 if op in _OPERATORS else 0
    for term in items[start:]:
        names |= free_constants(term, bound)
    return names


def block_model(model: Model) -> SExpr:
    """Assertion excluding exactly this total assignment."""
    if not model.bindings:
        raise EmptyModel("cannot block an empty model")
    equalities = [SList((Atom("="), Atom(name), value))
                  for name, value in model.bindings.items()]
    if len(equalities) == 1:
        return SList((Atom("not"), equalities[0]))
    return SList((Atom("not"), SList((Atom("and"), *equalities))))


class SolverSession:
    """One client, one solver process; commands strictly sequential."""

    def __init__(self, command=DEFAULT_SOLVER_COMMAND, *, timeout_s: float = 30.0):
        self.command = tuple(command)
        self.timeout_s = timeout_s
        self.declared: dict[str, str] = {}
        self._in_scratch_frame = False
        try:
            self._proc = subprocess.Popen(
                list(self.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
            )
        except FileNotFoundError as exc:
            raise SolverError(f"solver not found: {self.command[0]}") from exc
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._command("(set-option :print-success true)")

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)

    def _read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout_s)
        except queue.Empty:
            self.close()
            raise SolverTimeout(
                f"no solver response within {self.timeout_s}s") from None
        if line is None:
            raise SolverError("solver process ended unexpectedly")
        return line

    def _read_response(self) -> str:
        """One complete response: a line, or a multi-line balanced form."""
        line = self._read_line()
        depth = line.count("(") - line.count(")")
        parts = [line]
        while depth > 0:
            more = self._read_line()
            parts.append(more)
            depth += more.count("(") - more.count(")")
        return "\n".join(parts)

    def _command(self, text: str) -> str:
        if self._proc.poll() is not None:
            raise SolverError("solver process is gone")
        self._proc.stdin.write(text + "\n")
        self._proc.stdin.flush()
        response = self._read_response()
        if response.startswith("(error"):
            message = response
            try:
                form = parse_one(response)
                if isinstance(form, SList) and len(form.items) == 2:
                    message = form.items[1].text.strip('"')
            except Exception:
                pass
            raise SolverError(message)
        return response

    # -- session surface ---------------------------------------------------

    def declare_const(self, name: str, sort: str) -> None:
        self._exit_scratch_frame()
        self._command(f"(declare-const {name} {sort})")
        self.declared[name] = sort

    def assert_base(self, formula: SExpr) -> None:
        """Assert outside any scratch frame: survives across checks."""
        self._exit_scratch_frame()
        self._command(f"(assert {print_sexpr(formula)})")

    def check_sat(self, assertions) -> str:
        """Check assertions in a fresh frame; it stays open for get_model."""
        self._exit_scratch_frame()
        self._command("(push 1)")
        self._in_scratch_frame = True
        for formula in assertions:
            self._command(f"(assert {print_sexpr(formula)})")
        verdict = self._command("(check-sat)")
        if verdict not in (SAT, UNSAT, UNKNOWN):
            raise SolverError(f"unexpected check-sat answer {verdict!r}")
        return verdict

    def _exit_scratch_frame(self):
        if self._in_scratch_frame:
            self._command("(pop 1)")
            self._in_scratch_frame = False

    def get_model(self) -> Model:
        """Model of the last check_sat; only valid right after `sat`."""
        try:
            response = self._command("(get-model)")
        except SolverError as exc:
            raise NoModelAvailable(str(exc)) from None
        return parse_model(response)

    def eval_under_model(self, formula: SExpr, model: Model) -> bool:
        """True iff formula holds under the model.

        Decided by the solver: the bindings become equalities, and the
        formula's negation must be unsatisfiable with them.
        """
        for name in sorted(free_constants(formula)):
            if name not in model.bindings:
                raise IncompleteModel(name)
        assertions = [SList((Atom("="), Atom(name), value))
                      for name, value in model.bindings.items()]
        assertions.append(SList((Atom("not"), formula)))
        verdict = self.check_sat(assertions)
        if verdict == UNKNOWN:
            raise SolverError("solver could not evaluate formula under model")
        return verdict == UNSAT

    def close(self):
        if self._proc.poll() is None:
            try:
                self._proc.stdin.write("(exit)\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, ValueError, OSError):
                pass
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def parse_model(text: str) -> Model:
    """Parse get-model output.

    Accepts both (define-fun name () Sort value) entries and bare
    (name value) pairs; an optional leading `model` atom is skipped.
    """
    form = parse_one(text)
    if not isinstance(form, SList):
        raise SolverError(f"unexpected model shape: {text!r}")
    entries = list(form.items)
    if entries and isinstance(entries[0], Atom) and entries[0].text == "model":
        entries = entries[1:]
    model = Model()
    for entry in entries:
        if not isinstance(entry, SList) or not entry.items:
            raise SolverError(f"unexpected model entry: {print_sexpr(entry)}")
        items = entry.items
        if isinstance(items[0], Atom) and items[0].text == "define-fun":
            if len(items) != 5 or not isinstance(items[1], Atom):
                raise SolverError(f"unexpected define-fun shape: {print_sexpr(entry)}")
            name = items[1].text
            sort = items[3].text if isinstance(items[3], Atom) else print_sexpr(items[3])
            model.bindings[name] = items[4]
            model.sorts[name] = sort
        elif len(items) == 2 and isinstance(items[0], Atom):
            model.bindings[items[0].text] = items[1]
        else:
            raise SolverError(f"unexpected model entry: {print_sexpr(entry)}")
    return model
