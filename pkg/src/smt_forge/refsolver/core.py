"""SMT-LIB v2 subset interpreter: the bundled reference solver.

Supports Bool, Int, Real, 0-ary uninterpreted sorts, uninterpreted
constants and Bool-valued predicates over those sorts, linear
arithmetic, define-fun macros, let, push/pop, and quantifiers over
uninterpreted sorts (grounded over the declared constants) or Bool.
Anything outside the fragment raises a solver error or yields an honest
"unknown"; the solver never guesses.
"""

from __future__ import annotations

from fractions import Fraction

from ..sexpr import Atom, SExpr, SList, print_sexpr
from .lira import Lin
from .search import search

SOLVER_NAME = "smt-forge-refsolver"
SOLVER_VERSION = "0.1.0"

NUMERIC_SORTS = {"Int", "Real"}
BUILTIN_SORTS = {"Bool", "Int", "Real"}

_CORE_HEADS = {
    "and", "or", "not", "=>", "xor", "ite", "=", "distinct",
    "<", "<=", ">", ">=", "+", "-", "*", "/",
    "let", "forall", "exists", "true", "false",
}

_RESERVED = _CORE_HEADS | {
    "assert", "check-sat", "declare-const", "declare-fun", "declare-sort",
    "define-fun", "push", "pop", "reset", "exit", "set-logic", "set-option",
    "set-info", "get-model", "get-info", "echo", "as", "_",
}


class SolverError(Exception):
    """Reported to the client as (error "...")."""


class _UnsupportedQuantifier(SolverError):
    pass


def _is_numeral(text: str) -> bool:
    return text.isdigit()


def _is_decimal(text: str) -> bool:
    if "." not in text:
        return False
    whole, _, frac = text.partition(".")
    return whole.isdigit() and frac.isdigit()


def _is_int_literal(text: str) -> bool:
    # bare negative literals are accepted leniently, like mainstream solvers
    return _is_numeral(text[1:] if text.startswith("-") else text) \
        and text not in ("", "-")


def _is_dec_literal(text: str) -> bool:
    return _is_decimal(text[1:] if text.startswith("-") else text)


def _is_symbol(text: str) -> bool:
    if not text or _is_int_literal(text) or _is_dec_literal(text):
        return False
    if text[0] in "0123456789" or text.startswith(":") or text.startswith('"'):
        return False
    return True


def _quote(message: str) -> str:
    return '"' + message.replace('"', '""') + '"'


def _error(message: str) -> str:
    return f"(error {_quote(message)})"


class _Compiler:
    """Lower ground, quantifier-free terms to search nodes + atom table."""

    def __init__(self, funs: dict):
        self.funs = funs
        self.atoms: list[tuple] = []
        self._index: dict = {}
        self.int_vars: set[str] = set()

    def _atom(self, key: tuple, desc: tuple) -> tuple:
        idx = self._index.get(key)
        if idx is None:
            idx = len(self.atoms)
            self.atoms.append(desc)
            self._index[key] = idx
        return ("atom", idx)

    def sort_of(self, term: SExpr) -> str:
        return _sort_of(term, {}, self.funs)

    def compile(self, term: SExpr) -> tuple:
        if isinstance(term, Atom):
            text = term.text
            if text == "true":
                return ("const", True)
            if text == "false":
                return ("const", False)
            sig = self.funs.get(text)
            if sig is not None and not sig[0] and sig[1] == "Bool":
                return self._atom(("b", text), ("b", text))
            raise SolverError(f"expected a Bool term, found {text}")
        op = term.items[0].text if term.items and isinstance(term.items[0], Atom) else None
        args = term.items[1:]
        if op == "and":
            return ("and", tuple(self.compile(a) for a in args))
        if op == "or":
            return ("or", tuple(self.compile(a) for a in args))
        if op == "not":
            if len(args) != 1:
                raise SolverError("not takes one argument")
            return ("not", self.compile(args[0]))
        if op == "=>":
            if len(args) < 2:
                raise SolverError("=> takes at least two arguments")
            parts = [("not", self.compile(a)) for a in args[:-1]]
            parts.append(self.compile(args[-1]))
            return ("or", tuple(parts))
        if op == "xor":
            if len(args) < 2:
                raise SolverError("xor takes at least two arguments")
            node = self.compile(args[0])
            for a in args[1:]:
                rhs = self.compile(a)
                node = ("or", (("and", (node, ("not", rhs))),
                               ("and", (("not", node), rhs))))
            return node
        if op == "ite":
            if len(args) != 3:
                raise SolverError("ite takes three arguments")
            cond = self.compile(args[0])
            return ("or", (("and", (cond, self.compile(args[1]))),
                           ("and", (("not", cond), self.compile(args[2])))))
        if op in ("=", "distinct"):
            if len(args) < 2:
                raise SolverError(f"{op} takes at least two arguments")
            sorts = [self.sort_of(a) for a in args]
            base = self._merge_sorts(sorts, op)
            if base == "Bool":
                pairs = []
                compiled = [self.compile(a) for a in args]
                for i in range(len(compiled)):
                    rng = range(i + 1, len(compiled)) if op == "distinct" else (
                        [i + 1] if i + 1 < len(compiled) else [])
                    for j in rng:
                        iff = ("or", (("and", (compiled[i], compiled[j])),
                                      ("and", (("not", compiled[i]), ("not", compiled[j])))))
                        pairs.append(iff if op == "=" else ("not", iff))
                return ("and", tuple(pairs)) if pairs else ("const", True)
            if base in NUMERIC_SORTS:
                return self._numeric_chain(term, op, args)
            # uninterpreted sort
            pairs = []
            names = [self._usort_constant(a, base) for a in args]
            for i in range(len(names)):
                rng = range(i + 1, len(names)) if op == "distinct" else (
                    [i + 1] if i + 1 < len(names) else [])
                for j in rng:
                    a, b = sorted((names[i], names[j]))
                    node = self._atom(("e", a, b), ("e", a, b))
                    pairs.append(("not", node) if op == "distinct" else node)
            return ("and", tuple(pairs)) if pairs else ("const", True)
        if op in ("<", "<=", ">", ">="):
            if len(args) < 2:
                raise SolverError(f"{op} takes at least two arguments")
            for a in args:
                if self.sort_of(a) not in NUMERIC_SORTS:
                    raise SolverError(f"{op} applies to numeric terms")
            return self._numeric_chain(term, op, args)
        if op is not None:
            sig = self.funs.get(op)
            if sig is not None:
                arg_sorts, ret = sig
                if ret != "Bool":
                    raise SolverError(
                        f"applications of {op} are not supported outside comparisons")
                if len(args) != len(arg_sorts):
                    raise SolverError(f"{op} expects {len(arg_sorts)} arguments")
                names = []
                for a, expected in zip(args, arg_sorts):
                    if expected in BUILTIN_SORTS:
                        raise SolverError(
                            f"predicate {op} over {expected} arguments is not supported")
                    names.append(self._usort_constant(a, expected))
                key = ("p", op, tuple(names))
                return self._atom(key, key)
        raise SolverError(f"cannot interpret term {print_sexpr(term)}")

    def _merge_sorts(self, sorts: list[str], op: str) -> str:
        base = sorts[0]
        for s in sorts[1:]:
            if s == base:
                continue
            if {s, base} <= NUMERIC_SORTS:
                base = "Real"
            else:
                raise SolverError(f"{op} applied to mixed sorts {base} and {s}")
        return base

    def _usort_constant(self, term: SExpr, sort: str) -> str:
        if isinstance(term, Atom):
            sig = self.funs.get(term.text)
            if sig is not None and not sig[0] and sig[1] == sort:
                return term.text
        raise SolverError(
            f"expected a declared constant of sort {sort}, found {print_sexpr(term)}")

    def _numeric_chain(self, term: SExpr, op: str, args) -> tuple:
        split = _split_ite(term, self.funs)
        if split is not None:
            cond, then_t, else_t = split
            cnode = self.compile(cond)
            return ("or", (("and", (cnode, self.compile(then_t))),
                           ("and", (("not", cnode), self.compile(else_t)))))
        nodes = []
        if op == "distinct":
            for i in range(len(args)):
                for j in range(i + 1, len(args)):
                    nodes.append(self._comparison(op, args[i], args[j]))
        else:
            for left, right in zip(args, args[1:]):
                nodes.append(self._comparison(op, left, right))
        return nodes[0] if len(nodes) == 1 else ("and", tuple(nodes))

    def _comparison(self, op: str, left: SExpr, right: SExpr) -> tuple:
        for side in (left, right):
            self._note_int_vars(side)
        diff = self._linexpr(left).sub(self._linexpr(right))
        if op == ">":
            diff, op = diff.scale(-1), "<"
        elif op == ">=":
            diff, op = diff.scale(-1), "<="
        elif op == "distinct":
            key_rel = "="
            key = ("a", _lin_key(diff), key_rel)
            return ("not", self._atom(key, ("a", diff, key_rel)))
        key = ("a", _lin_key(diff), op)
        return self._atom(key, ("a", diff, op))

    def _note_int_vars(self, term: SExpr):
        if isinstance(term, Atom):
            sig = self.funs.get(term.text)
            if sig is not None and not sig[0] and sig[1] == "Int":
                self.int_vars.add(term.text)
        elif isinstance(term, SList):
            for item in term.items:
                self._note_int_vars(item)

    def _linexpr(self, term: SExpr) -> Lin:
        if isinstance(term, Atom):
            text = term.text
            if _is_int_literal(text):
                return Lin.constant(int(text))
            if _is_dec_literal(text):
                return Lin.constant(Fraction(text))
            sig = self.funs.get(text)
            if sig is not None and not sig[0] and sig[1] in NUMERIC_SORTS:
                return Lin.variable(text)
            raise SolverError(f"expected a numeric term, found {text}")
        op = term.items[0].text if term.items and isinstance(term.items[0], Atom) else None
        args = term.items[1:]
        if op == "+":
            out = Lin.constant(0)
            for a in args:
                out = out.add(self._linexpr(a))
            return out
        if op == "-":
            if len(args) == 1:
                return self._linexpr(args[0]).scale(-1)
            out = self._linexpr(args[0])
            for a in args[1:]:
                out = out.sub(self._linexpr(a))
            return out
        if op == "*":
            parts = [self._linexpr(a) for a in args]
            out = Lin.constant(1)
            for part in parts:
                if out.is_constant():
                    out = part.scale(out.const)
                elif part.is_constant():
                    out = out.scale(part.const)
                else:
                    raise SolverError("nonlinear multiplication is not supported")
            return out
        if op == "/":
            if len(args) < 2:
                raise SolverError("/ takes at least two arguments")
            out = self._linexpr(args[0])
            for a in args[1:]:
                divisor = self._linexpr(a)
                if not divisor.is_constant() or divisor.const == 0:
                    raise SolverError("division requires a nonzero constant divisor")
                out = out.scale(Fraction(1, 1) / divisor.const)
            return out
        raise SolverError(f"cannot interpret numeric term {print_sexpr(term)}")


def _lin_key(lin: Lin) -> tuple:
    return (tuple(sorted(lin.coeffs.items())), lin.const)


def _split_ite(term: SExpr, funs: dict):
    """First numeric ite below `term`: (cond, term[then], term[else])."""
    if isinstance(term, SList) and term.items:
        op = term.items[0].text if isinstance(term.items[0], Atom) else None
        if op == "ite" and len(term.items) == 4:
            branch_sort = _sort_of(term.items[2], {}, funs)
            if branch_sort in NUMERIC_SORTS:
                return term.items[1], term.items[2], term.items[3]
        for i, child in enumerate(term.items):
            found = _split_ite(child, funs)
            if found is not None:
                cond, then_child, else_child = found
                then_items = term.items[:i] + (then_child,) + term.items[i + 1:]
                else_items = term.items[:i] + (else_child,) + term.items[i + 1:]
                return cond, SList(then_items), SList(else_items)
    return None


def _sort_of(term: SExpr, env: dict, funs: dict) -> str:
    """Infer the sort of a term. env maps bound variables to sorts."""
    if isinstance(term, Atom):
        text = term.text
        if text in ("true", "false"):
            return "Bool"
        if _is_int_literal(text):
            return "Int"
        if _is_dec_literal(text):
            return "Real"
        if text in env:
            return env[text]
        sig = funs.get(text)
        if sig is not None:
            if sig[0]:
                raise SolverError(f"{text} expects arguments")
            return sig[1]
        raise SolverError(f"unknown constant {text}")
    if not term.items:
        raise SolverError("empty application")
    if not isinstance(term.items[0], Atom):
        raise SolverError(f"cannot interpret term {print_sexpr(term)}")
    op = term.items[0].text
    args = term.items[1:]

    def arg_sorts():
        return [_sort_of(a, env, funs) for a in args]

    if op in ("and", "or", "not", "=>", "xor"):
        for s in arg_sorts():
            if s != "Bool":
                raise SolverError(f"{op} applies to Bool terms")
        return "Bool"
    if op in ("=", "distinct"):
        sorts = arg_sorts()
        if len(sorts) < 2:
            raise SolverError(f"{op} takes at least two arguments")
        base = sorts[0]
        for s in sorts[1:]:
            if s != base and not ({s, base} <= NUMERIC_SORTS):
                raise SolverError(f"{op} applied to mixed sorts {base} and {s}")
        return "Bool"
    if op in ("<", "<=", ">", ">="):
        for s in arg_sorts():
            if s not in NUMERIC_SORTS:
                raise SolverError(f"{op} applies to numeric terms")
        return "Bool"
    if op in ("+", "-", "*"):
        sorts = arg_sorts()
        if not sorts:
            raise SolverError(f"{op} takes arguments")
        for s in sorts:
            if s not in NUMERIC_SORTS:
                raise SolverError(f"{op} applies to numeric terms")
        return "Real" if "Real" in sorts else "Int"
    if op == "/":
        for s in arg_sorts():
            if s not in NUMERIC_SORTS:
                raise SolverError("/ applies to numeric terms")
        return "Real"
    if op == "ite":
        if len(args) != 3:
            raise SolverError("ite takes three arguments")
        if _sort_of(args[0], env, funs) != "Bool":
            raise SolverError("ite condition must be Bool")
        then_sort = _sort_of(args[1], env, funs)
        else_sort = _sort_of(args[2], env, funs)
        if then_sort == else_sort:
            return then_sort
        if {then_sort, else_sort} <= NUMERIC_SORTS:
            return "Real"
        raise SolverError("ite branches must share a sort")
    if op in ("forall", "exists"):
        if len(args) != 2 or not isinstance(args[0], SList):
            raise SolverError(f"{op} takes a binding list and a body")
        inner = dict(env)
        for binding in args[0].items:
            if (not isinstance(binding, SList) or len(binding.items) != 2
                    or not isinstance(binding.items[0], Atom)
                    or not isinstance(binding.items[1], Atom)):
                raise SolverError(f"malformed {op} binding")
            inner[binding.items[0].text] = binding.items[1].text
        if _sort_of(args[1], inner, funs) != "Bool":
            raise SolverError(f"{op} body must be Bool")
        return "Bool"
    sig = funs.get(op)
    if sig is not None:
        arg_sorts_expected, ret = sig
        if len(args) != len(arg_sorts_expected):
            raise SolverError(f"{op} expects {len(arg_sorts_expected)} arguments")
        for a, expected in zip(args, arg_sorts_expected):
            actual = _sort_of(a, env, funs)
            if actual != expected:
                raise SolverError(
                    f"argument of {op} has sort {actual}, expected {expected}")
        return ret
    raise SolverError(f"unknown function {op}")


def _substitute(term: SExpr, mapping: dict) -> SExpr:
    """Capture-aware substitution of variable names by terms."""
    if isinstance(term, Atom):
        return mapping.get(term.text, term)
    if not term.items:
        return term
    op = term.items[0].text if isinstance(term.items[0], Atom) else None
    if op in ("forall", "exists", "let") and len(term.items) >= 2 \
            and isinstance(term.items[1], SList):
        bound = set()
        for binding in term.items[1].items:
            if isinstance(binding, SList) and binding.items \
                    and isinstance(binding.items[0], Atom):
                bound.add(binding.items[0].text)
        inner = {k: v for k, v in mapping.items() if k not in bound}
        if op == "let":
            new_bindings = []
            for binding in term.items[1].items:
                new_bindings.append(SList((binding.items[0],
                                           _substitute(binding.items[1], mapping))))
            rest = tuple(_substitute(t, inner) for t in term.items[2:])
            return SList((term.items[0], SList(tuple(new_bindings))) + rest)
        rest = tuple(_substitute(t, inner) for t in term.items[2:])
        return SList((term.items[0], term.items[1]) + rest)
    return SList(tuple(_substitute(t, mapping) for t in term.items))


def _contains_quantifier(term: SExpr) -> bool:
    if isinstance(term, Atom):
        return False
    op = term.items[0].text if term.items and isinstance(term.items[0], Atom) else None
    if op in ("forall", "exists"):
        return True
    return any(_contains_quantifier(t) for t in term.items)


class Interpreter:
    """One solver instance: executes parsed commands, returns responses."""

    def __init__(self):
        self.sorts: dict[str, int] = {}
        self.funs: dict[str, tuple] = {}   # name -> (arg sorts tuple, ret sort)
        self.defs: dict[str, tuple] = {}   # name -> (params, ret sort, body)
        self.assertions: list[SExpr] = []
        self.frames: list[tuple] = []
        self.print_success = False
        self.exited = False
        self.had_error = False
        self._model: dict | None = None
        self._skolem_counter = 0

    # -- command dispatch ------------------------------------------------

    def execute(self, form: SExpr) -> str | None:
        try:
            return self._execute(form)
        except SolverError as exc:
            self.had_error = True
            return _error(str(exc))

    def _execute(self, form: SExpr) -> str | None:
        if not isinstance(form, SList) or not form.items \
                or not isinstance(form.items[0], Atom):
            raise SolverError("expected a command")
        command = form.items[0].text
        args = form.items[1:]
        handler = {
            "set-logic": self._cmd_trivial,
            "set-info": self._cmd_trivial,
            "set-option": self._cmd_set_option,
            "get-info": self._cmd_get_info,
            "declare-sort": self._cmd_declare_sort,
            "declare-const": self._cmd_declare_const,
            "declare-fun": self._cmd_declare_fun,
            "define-fun": self._cmd_define_fun,
            "assert": self._cmd_assert,
            "check-sat": self._cmd_check_sat,
            "get-model": self._cmd_get_model,
            "push": self._cmd_push,
            "pop": self._cmd_pop,
            "reset": self._cmd_reset,
            "echo": self._cmd_echo,
            "exit": self._cmd_exit,
        }.get(command)
        if handler is None:
            raise SolverError(f"unsupported command {command}")
        return handler(args)

    def _ok(self) -> str | None:
        return "success" if self.print_success else None

    def _cmd_trivial(self, args):
        return self._ok()

    def _cmd_set_option(self, args):
        if len(args) == 2 and isinstance(args[0], Atom) \
                and args[0].text == ":print-success" and isinstance(args[1], Atom):
            self.print_success = args[1].text == "true"
        return self._ok()

    def _cmd_get_info(self, args):
        if len(args) == 1 and isinstance(args[0], Atom):
            if args[0].text == ":name":
                return f'(:name "{SOLVER_NAME}")'
            if args[0].text == ":version":
                return f'(:version "{SOLVER_VERSION}")'
        raise SolverError("unsupported get-info query")

    def _cmd_declare_sort(self, args):
        if not args or not isinstance(args[0], Atom) or not _is_symbol(args[0].text):
            raise SolverError("declare-sort expects a sort symbol")
        name = args[0].text
        if len(args) > 1:
            if not (isinstance(args[1], Atom) and args[1].text == "0"):
                raise SolverError("only 0-arity sorts are supported")
        if name in BUILTIN_SORTS or name in self.sorts:
            raise SolverError(f"sort {name} already declared")
        self.sorts[name] = 0
        self._invalidate()
        return self._ok()

    def _sort_name(self, term: SExpr) -> str:
        if not isinstance(term, Atom):
            raise SolverError("parametric sorts are not supported")
        name = term.text
        if name in BUILTIN_SORTS or name in self.sorts:
            return name
        raise SolverError(f"unknown sort {name}")

    def _declare(self, name: str, arg_sorts: tuple, ret: str):
        if not _is_symbol(name) or name in _RESERVED:
            raise SolverError(f"invalid symbol {name}")
        if name in self.funs or name in self.defs:
            raise SolverError(f"{name} already declared")
        self.funs[name] = (arg_sorts, ret)
        self._invalidate()

    def _cmd_declare_const(self, args):
        if len(args) != 2 or not isinstance(args[0], Atom):
            raise SolverError("declare-const expects a symbol and a sort")
        self._declare(args[0].text, (), self._sort_name(args[1]))
        return self._ok()

    def _cmd_declare_fun(self, args):
        if len(args) != 3 or not isinstance(args[0], Atom) \
                or not isinstance(args[1], SList):
            raise SolverError("declare-fun expects a symbol, argument sorts, and a sort")
        arg_sorts = tuple(self._sort_name(s) for s in args[1].items)
        self._declare(args[0].text, arg_sorts, self._sort_name(args[2]))
        return self._ok()

    def _cmd_define_fun(self, args):
        if len(args) != 4 or not isinstance(args[0], Atom) \
                or not isinstance(args[1], SList):
            raise SolverError("define-fun expects a symbol, parameters, a sort, and a body")
        name = args[0].text
        if not _is_symbol(name) or name in _RESERVED:
            raise SolverError(f"invalid symbol {name}")
        if name in self.funs or name in self.defs:
            raise SolverError(f"{name} already declared")
        params = []
        for binding in args[1].items:
            if not isinstance(binding, SList) or len(binding.items) != 2 \
                    or not isinstance(binding.items[0], Atom):
                raise SolverError("malformed define-fun parameter")
            params.append((binding.items[0].text, self._sort_name(binding.items[1])))
        ret = self._sort_name(args[2])
        body = self._expand(args[3], {p: None for p, _ in params})
        env = {p: s for p, s in params}
        actual = _sort_of(body, env, self.funs)
        if actual != ret and not ({actual, ret} <= NUMERIC_SORTS):
            raise SolverError(f"define-fun body has sort {actual}, expected {ret}")
        self.defs[name] = (params, ret, body)
        self._invalidate()
        return self._ok()

    def _cmd_assert(self, args):
        if len(args) != 1:
            raise SolverError("assert expects one term")
        term = self._expand(args[0], {})
        if _sort_of(term, {}, self.funs) != "Bool":
            raise SolverError("asserted term must be Bool")
        self.assertions.append(term)
        self._invalidate()
        return self._ok()

    def _cmd_push(self, args):
        count = self._frame_count(args)
        for _ in range(count):
            self.frames.append((len(self.sorts), len(self.funs),
                                len(self.defs), len(self.assertions)))
        self._invalidate()
        return self._ok()

    def _cmd_pop(self, args):
        count = self._frame_count(args)
        if count > len(self.frames):
            raise SolverError("pop without matching push")
        for _ in range(count):
            n_sorts, n_funs, n_defs, n_asserts = self.frames.pop()
            _truncate(self.sorts, n_sorts)
            _truncate(self.funs, n_funs)
            _truncate(self.defs, n_defs)
            del self.assertions[n_asserts:]
        self._invalidate()
        return self._ok()

    @staticmethod
    def _frame_count(args) -> int:
        if not args:
            return 1
        if len(args) == 1 and isinstance(args[0], Atom) and _is_numeral(args[0].text):
            return int(args[0].text)
        raise SolverError("expected a numeral")

    def _cmd_reset(self, args):
        self.__init__()
        return self._ok()

    def _cmd_echo(self, args):
        if len(args) != 1 or not isinstance(args[0], Atom) \
                or not args[0].text.startswith('"'):
            raise SolverError("echo expects a string literal")
        return args[0].text[1:-1].replace('""', '"')

    def _cmd_exit(self, args):
        self.exited = True
        return None

    # -- macro and let expansion ------------------------------------------

    def _expand(self, term: SExpr, bound: dict) -> SExpr:
        if isinstance(term, Atom):
            if term.text in bound:
                return term
            definition = self.defs.get(term.text)
            if definition is not None:
                params, _, body = definition
                if params:
                    raise SolverError(f"{term.text} expects arguments")
                return body
            return term
        if not term.items:
            return term
        op = term.items[0].text if isinstance(term.items[0], Atom) else None
        if op == "let":
            if len(term.items) != 3 or not isinstance(term.items[1], SList):
                raise SolverError("malformed let")
            mapping = {}
            for binding in term.items[1].items:
                if not isinstance(binding, SList) or len(binding.items) != 2 \
                        or not isinstance(binding.items[0], Atom):
                    raise SolverError("malformed let binding")
                mapping[binding.items[0].text] = self._expand(binding.items[1], bound)
            body = self._expand(term.items[2],
                                {**bound, **{k: None for k in mapping}})
            return _substitute(body, mapping)
        if op in ("forall", "exists") and len(term.items) == 3 \
                and isinstance(term.items[1], SList):
            inner = dict(bound)
            for binding in term.items[1].items:
                if isinstance(binding, SList) and binding.items \
                        and isinstance(binding.items[0], Atom):
                    inner[binding.items[0].text] = None
            return SList((term.items[0], term.items[1],
                          self._expand(term.items[2], inner)))
        if op is not None and op in self.defs and op not in bound:
            params, _, body = self.defs[op]
            args = [self._expand(a, bound) for a in term.items[1:]]
            if len(args) != len(params):
                raise SolverError(f"{op} expects {len(params)} arguments")
            return _substitute(body, {p: a for (p, _), a in zip(params, args)})
        return SList(tuple(self._expand(t, bound) for t in term.items))

    # -- quantifier elimination -------------------------------------------

    def _fresh_constant(self, sort: str, funs: dict) -> str:
        self._skolem_counter += 1
        name = f"@sk!{self._skolem_counter}"
        funs[name] = ((), sort)
        return name

    def _universe(self, sort: str, funs: dict) -> list[SExpr]:
        if sort == "Bool":
            return [Atom("true"), Atom("false")]
        members = [Atom(name) for name, (arg_sorts, ret) in funs.items()
                   if not arg_sorts and ret == sort]
        if not members:
            fresh = f"@el!{sort}"
            if fresh not in funs:
                funs[fresh] = ((), sort)
            members = [Atom(fresh)]
        return members

    def _quantifier_sorts(self, bindings: SList) -> list[tuple[str, str]]:
        out = []
        for binding in bindings.items:
            var, sort = binding.items[0].text, binding.items[1].text
            if sort in NUMERIC_SORTS:
                raise _UnsupportedQuantifier(
                    f"quantification over {sort} is not supported")
            if sort != "Bool" and sort not in self.sorts:
                raise SolverError(f"unknown sort {sort}")
            out.append((var, sort))
        return out

    def _skolem_pass(self, term: SExpr, pol: int, funs: dict) -> SExpr:
        """Replace outer existential quantification by fresh constants.

        Runs over every assertion before any grounding so the grounding
        universes include all witnesses. Quantifiers that ground to
        conjunctions are left untouched for the second pass; existential
        blocks are Skolemized through (Bool binders stay, their later
        enumeration is exact and adds no constants).
        """
        if isinstance(term, Atom):
            return term
        op = term.items[0].text if term.items and isinstance(term.items[0], Atom) else None
        args = term.items[1:]
        if op == "not" and len(args) == 1:
            return SList((term.items[0], self._skolem_pass(args[0], -pol, funs)))
        if op in ("and", "or"):
            return SList((term.items[0],)
                         + tuple(self._skolem_pass(a, pol, funs) for a in args))
        if op == "=>" and len(args) >= 2:
            parts = [self._skolem_pass(a, -pol, funs) for a in args[:-1]]
            parts.append(self._skolem_pass(args[-1], pol, funs))
            return SList((term.items[0],) + tuple(parts))
        if op in ("forall", "exists"):
            skolemize = (op == "exists" and pol > 0) or (op == "forall" and pol < 0)
            if not skolemize:
                return term  # grounding pass handles it
            mapping = {}
            bool_binders = []
            for var, sort in self._quantifier_sorts(term.items[1]):
                if sort == "Bool":
                    bool_binders.append(SList((Atom(var), Atom("Bool"))))
                else:
                    mapping[var] = Atom(self._fresh_constant(sort, funs))
            body = self._skolem_pass(_substitute(args[1], mapping), pol, funs)
            if bool_binders:
                return SList((term.items[0], SList(tuple(bool_binders)), body))
            return body
        if _contains_quantifier(term):
            raise _UnsupportedQuantifier(
                "quantifiers under ite/xor/= are not supported")
        return term

    def _ground_pass(self, term: SExpr, pol: int, depth: int, funs: dict,
                     state: dict) -> SExpr:
        """Expand remaining quantifiers over their (finite) universes.

        `depth` counts enclosing uninterpreted-sort groundings: a Skolem
        constant introduced under one arrives too late for the enclosing
        expansion, so a later "sat" must degrade to "unknown" (unsat
        stays sound either way). Bool enumeration is exact and does not
        bump the depth.
        """
        if isinstance(term, Atom):
            return term
        op = term.items[0].text if term.items and isinstance(term.items[0], Atom) else None
        args = term.items[1:]
        if op == "not" and len(args) == 1:
            return SList((term.items[0],
                          self._ground_pass(args[0], -pol, depth, funs, state)))
        if op in ("and", "or"):
            return SList((term.items[0],)
                         + tuple(self._ground_pass(a, pol, depth, funs, state)
                                 for a in args))
        if op == "=>" and len(args) >= 2:
            parts = [self._ground_pass(a, -pol, depth, funs, state)
                     for a in args[:-1]]
            parts.append(self._ground_pass(args[-1], pol, depth, funs, state))
            return SList((term.items[0],) + tuple(parts))
        if op in ("forall", "exists"):
            ground_conj = (op == "forall" and pol > 0) or (op == "exists" and pol < 0)
            variables = self._quantifier_sorts(term.items[1])
            if not ground_conj:
                # Existential block reached the grounding pass: Bool
                # binders enumerate exactly, others Skolemize.
                mapping = {}
                instances = [args[1]]
                next_depth = depth
                for var, sort in variables:
                    if sort == "Bool":
                        instances = [_substitute(inst, {var: member})
                                     for inst in instances
                                     for member in self._universe("Bool", funs)]
                    else:
                        if depth > 0:
                            state["approx"] = True
                        mapping[var] = Atom(self._fresh_constant(sort, funs))
                instances = [_substitute(inst, mapping) for inst in instances]
                expanded = tuple(self._ground_pass(inst, pol, next_depth, funs, state)
                                 for inst in instances)
                if len(expanded) == 1:
                    return expanded[0]
                joiner = "or" if op == "exists" else "and"
                return SList((Atom(joiner),) + expanded)
            instances = [args[1]]
            bumps_depth = False
            for var, sort in variables:
                members = self._universe(sort, funs)
                if sort != "Bool":
                    bumps_depth = True
                instances = [_substitute(inst, {var: member})
                             for inst in instances for member in members]
                if len(instances) > 10000:
                    raise _UnsupportedQuantifier("quantifier grounding too large")
            inner_depth = depth + 1 if bumps_depth else depth
            expanded = tuple(self._ground_pass(inst, pol, inner_depth, funs, state)
                             for inst in instances)
            joiner = "and" if op == "forall" else "or"
            return SList((Atom(joiner),) + expanded)
        if _contains_quantifier(term):
            raise _UnsupportedQuantifier(
                "quantifiers under ite/xor/= are not supported")
        return term

    # -- solving -----------------------------------------------------------

    def _cmd_check_sat(self, args) -> str:
        self._model = None
        funs = dict(self.funs)
        state = {"approx": False}
        try:
            prepared = [self._skolem_pass(a, 1, funs) for a in self.assertions]
            grounded = [self._ground_pass(a, 1, 0, funs, state) for a in prepared]
        except _UnsupportedQuantifier:
            return "unknown"
        compiler = _Compiler(funs)
        roots = tuple(compiler.compile(t) for t in grounded)
        root = ("and", roots) if roots else ("const", True)
        verdict, theory_model = search(root, compiler.atoms, compiler.int_vars)
        if verdict == "sat" and state["approx"]:
            return "unknown"
        if verdict == "sat":
            self._model = self._build_model(compiler, theory_model)
        return verdict

    def _build_model(self, compiler: _Compiler, tm) -> dict:
        atom_index = {}
        for idx, desc in enumerate(compiler.atoms):
            if desc[0] == "b":
                atom_index[desc[1]] = idx
        class_labels: dict[tuple, str] = {}
        model: dict[str, tuple[str, SExpr]] = {}
        for name, (arg_sorts, ret) in self.funs.items():
            if arg_sorts or name.startswith("@"):
                continue
            if ret == "Bool":
                idx = atom_index.get(name)
                value = tm.booleans.get(idx, False) if idx is not None else False
                model[name] = (ret, Atom("true" if value else "false"))
            elif ret in NUMERIC_SORTS:
                value = tm.numerics.get(name, Fraction(0))
                model[name] = (ret, _format_numeric(value, ret))
            else:
                root = tm.euf_root(name)
                key = (ret, root)
                if key not in class_labels:
                    class_labels[key] = f"@{ret}!{len([k for k in class_labels if k[0] == ret])}"
                model[name] = (ret, Atom(class_labels[key]))
        return model

    def _cmd_get_model(self, args) -> str:
        if self._model is None:
            raise SolverError("model is not available")
        lines = ["("]
        for name, (sort, value) in self._model.items():
            lines.append(f"  (define-fun {name} () {sort} {print_sexpr(value)})")
        lines.append(")")
        return "\n".join(lines)

    def _invalidate(self):
        self._model = None


def _truncate(d: dict, size: int):
    while len(d) > size:
        d.popitem()


def _format_numeric(value: Fraction, sort: str) -> SExpr:
    negative = value < 0
    value = -value if negative else value
    if sort == "Int":
        body: SExpr = Atom(str(value.numerator))
    elif value.denominator == 1:
        body = Atom(f"{value.numerator}.0")
    else:
        body = SList((Atom("/"), Atom(str(value.numerator)),
                      Atom(str(value.denominator))))
    if negative:
        return SList((Atom("-"), body))
    return body
