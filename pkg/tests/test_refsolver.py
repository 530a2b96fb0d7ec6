"""Reference solver: oracle-checked verdicts, models, and the command layer."""

import io
import random
import subprocess
import sys
from fractions import Fraction
from functools import reduce

import pytest

from smt_forge.refsolver import Interpreter
from smt_forge.refsolver.__main__ import FormReader, run
from smt_forge.sexpr import Atom, SList, atom, parse_one, parse_sexpr, print_sexpr, slist

SOLVER = [sys.executable, "-m", "smt_forge.refsolver"]


def feed(script: str) -> list[str]:
    """Run commands through one in-process interpreter, collect responses."""
    interp = Interpreter()
    responses = []
    for form in parse_sexpr(script):
        response = interp.execute(form)
        if response is not None:
            responses.append(response)
    return responses


def run_subprocess(script: str):
    proc = subprocess.run(SOLVER, input=script.encode(), capture_output=True)
    return proc.stdout.decode(), proc.returncode


# -- Boolean core against a truth-table oracle --------------------------------


def eval_bool(expr, env):
    """Independent evaluator used as the oracle; no solver involvement."""
    if isinstance(expr, Atom):
        if expr.text == "true":
            return True
        if expr.text == "false":
            return False
        return env[expr.text]
    op = expr.items[0].text
    args = [eval_bool(a, env) for a in expr.items[1:]]
    if op == "and":
        return all(args)
    if op == "or":
        return any(args)
    if op == "not":
        return not args[0]
    if op == "=>":
        result = args[-1]
        for a in reversed(args[:-1]):
            result = (not a) or result
        return result
    if op == "xor":
        return reduce(lambda x, y: x != y, args)
    if op == "=":
        return all(a == args[0] for a in args[1:])
    if op == "distinct":
        return len(set(args)) == len(args)
    if op == "ite":
        return args[1] if args[0] else args[2]
    raise AssertionError(f"oracle cannot evaluate {op}")


VARS = ("p", "q", "r")


def random_bool_formula(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        return atom(rng.choice(VARS + ("true", "false")))
    op = rng.choice(["and", "or", "not", "=>", "xor", "ite", "="])
    if op == "not":
        return slist(atom(op), random_bool_formula(rng, depth - 1))
    if op == "ite":
        return slist(atom(op), *(random_bool_formula(rng, depth - 1)
                                 for _ in range(3)))
    width = rng.randint(2, 3)
    return slist(atom(op), *(random_bool_formula(rng, depth - 1)
                             for _ in range(width)))


def truth_table(expr):
    rows = []
    for bits in range(8):
        env = {v: bool((bits >> i) & 1) for i, v in enumerate(VARS)}
        rows.append(eval_bool(expr, env))
    return rows


def test_boolean_verdicts_match_truth_tables():
    rng = random.Random(987123)
    decls = "".join(f"(declare-const {v} Bool)" for v in VARS)
    for _ in range(120):
        formula = random_bool_formula(rng, 4)
        expected = "sat" if any(truth_table(formula)) else "unsat"
        responses = feed(f"{decls}(assert {print_sexpr(formula)})(check-sat)")
        assert responses == [expected], print_sexpr(formula)


def test_boolean_models_satisfy_their_formula():
    rng = random.Random(555001)
    decls = "".join(f"(declare-const {v} Bool)" for v in VARS)
    checked = 0
    for _ in range(60):
        formula = random_bool_formula(rng, 4)
        if not any(truth_table(formula)):
            continue
        interp = Interpreter()
        for form in parse_sexpr(f"{decls}(assert {print_sexpr(formula)})"):
            interp.execute(form)
        assert interp.execute(parse_one("(check-sat)")) == "sat"
        model_text = interp.execute(parse_one("(get-model)"))
        env = {}
        for entry in parse_one(model_text).items:
            env[entry.items[1].text] = entry.items[4].text == "true"
        assert eval_bool(formula, env), print_sexpr(formula)
        checked += 1
    assert checked > 10


# -- linear integer arithmetic -------------------------------------------------


def brute_force_dogs_cats_mice():
    """Exhaustive scan over triples summing to 100 (independent oracle)."""
    solutions = []
    for dogs in range(101):
        for cats in range(101 - dogs):
            mice = 100 - dogs - cats
            if dogs >= 1 and cats >= 1 and mice >= 1 \
                    and 1500 * dogs + 100 * cats + 25 * mice == 10000:
                solutions.append((dogs, cats, mice))
    return solutions


DOGS_CATS_MICE = """
(declare-const dogs Int)(declare-const cats Int)(declare-const mice Int)
(assert (= (+ dogs cats mice) 100))
(assert (= (+ (* 1500 dogs) (* 100 cats) (* 25 mice)) 10000))
(assert (>= dogs 1))(assert (>= cats 1))(assert (>= mice 1))
"""


def test_dogs_cats_mice_unique_solution():
    assert brute_force_dogs_cats_mice() == [(3, 41, 56)]
    responses = feed(DOGS_CATS_MICE + "(check-sat)(get-model)")
    assert responses[0] == "sat"
    model = {e.items[1].text: int(e.items[4].text)
             for e in parse_one(responses[1]).items}
    assert model == {"dogs": 3, "cats": 41, "mice": 56}


def test_dogs_cats_mice_overconstrained_unsat():
    script = DOGS_CATS_MICE + "(assert (<= 10 cats))(assert (<= cats 20))(check-sat)"
    assert feed(script) == ["unsat"]


def test_integer_strict_bound_model():
    responses = feed("(declare-const x Int)(assert (> x 5))(check-sat)(get-model)")
    assert responses[0] == "sat"
    value = int(parse_one(responses[1]).items[0].items[4].text)
    assert value > 5


def test_blocking_walks_all_three_models():
    interp = Interpreter()
    for form in parse_sexpr("(declare-const x Int)(assert (> x 0))(assert (< x 4))"):
        interp.execute(form)
    seen = set()
    while True:
        verdict = interp.execute(parse_one("(check-sat)"))
        if verdict == "unsat":
            break
        assert verdict == "sat"
        model_text = interp.execute(parse_one("(get-model)"))
        value = int(parse_one(model_text).items[0].items[4].text)
        assert value not in seen
        seen.add(value)
        interp.execute(parse_one(f"(assert (not (= x {value})))"))
    assert seen == {1, 2, 3}


def test_unbounded_parity_gap_is_unknown():
    # 2x = 2y + 1 has no integer solution but an unbounded relaxation:
    # the honest verdict within this fragment is unknown, never sat.
    script = "(declare-const x Int)(declare-const y Int)" \
             "(assert (= (* 2 x) (+ (* 2 y) 1)))(check-sat)"
    assert feed(script) == ["unknown"]


def test_negative_values_print_with_minus_form():
    responses = feed("(declare-const x Int)(assert (< x (- 3)))(check-sat)(get-model)")
    value = parse_one(responses[1]).items[0].items[4]
    assert isinstance(value, SList)
    assert value.items[0].text == "-"
    assert int(value.items[1].text) > 3


def _eval_int_formula(expr, env):
    """Independent evaluator over concrete integers (oracle)."""
    if isinstance(expr, Atom):
        t = expr.text
        if t in env:
            return env[t]
        if t == "true":
            return True
        if t == "false":
            return False
        return int(t)
    op = expr.items[0].text
    args = [_eval_int_formula(a, env) for a in expr.items[1:]]
    if op == "and":
        return all(args)
    if op == "or":
        return any(args)
    if op == "not":
        return not args[0]
    if op == "+":
        return sum(args)
    if op == "-":
        return -args[0] if len(args) == 1 else args[0] - sum(args[1:])
    if op == "*":
        out = 1
        for a in args:
            out *= a
        return out
    if op in ("<=", "<", ">=", ">"):
        import operator
        fn = {"<=": operator.le, "<": operator.lt,
              ">=": operator.ge, ">": operator.gt}[op]
        return all(fn(args[i], args[i + 1]) for i in range(len(args) - 1))
    if op == "=":
        return all(a == args[0] for a in args[1:])
    raise AssertionError(op)


def test_random_integer_systems_against_brute_force():
    """Soundness fuzz: sat models re-verified exactly; unsat claims must
    leave the brute-force box empty. Unknown is always allowed."""
    from itertools import product as iproduct

    rng = random.Random(424271)
    names = ["x", "y", "z"]

    def rand_atom():
        chosen = rng.sample(names, rng.randint(1, 3))
        terms = []
        for v in chosen:
            c = rng.choice([-3, -2, -1, 1, 2, 3])
            terms.append(f"(* {c} {v})" if c != 1 else v)
        lhs = terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"
        op = rng.choice(["<=", "<", ">=", ">", "="])
        formula = f"({op} {lhs} {rng.randint(-5, 5)})"
        return f"(not {formula})" if rng.random() < 0.3 else formula

    def rand_formula(depth=2):
        if depth == 0 or rng.random() < 0.5:
            return rand_atom()
        return f"({rng.choice(['and', 'or'])} {rand_formula(depth - 1)} " \
               f"{rand_formula(depth - 1)})"

    for _ in range(150):
        formulas = [rand_formula() for _ in range(rng.randint(1, 3))]
        script = "".join(f"(declare-const {v} Int)" for v in names)
        script += "".join(f"(assert {f})" for f in formulas)
        interp = Interpreter()
        for form in parse_sexpr(script):
            assert interp.execute(form) is None
        verdict = interp.execute(parse_one("(check-sat)"))
        trees = [parse_one(f) for f in formulas]
        if verdict == "sat":
            model_text = interp.execute(parse_one("(get-model)"))
            env = {}
            for entry in parse_one(model_text).items:
                value = entry.items[4]
                env[entry.items[1].text] = (-int(value.items[1].text)
                                            if isinstance(value, SList)
                                            else int(value.text))
            assert all(_eval_int_formula(t, env) for t in trees), script
        elif verdict == "unsat":
            for xyz in iproduct(range(-10, 11), repeat=3):
                env = dict(zip(names, xyz))
                assert not all(_eval_int_formula(t, env) for t in trees), \
                    (script, env)
        else:
            assert verdict == "unknown"


def test_bare_negative_literals_accepted():
    responses = feed("(declare-const x Int)(assert (> x -3))(assert (< x -1))"
                     "(check-sat)(get-model)")
    assert responses[0] == "sat"
    assert "(- 2)" in responses[1]
    assert feed("(declare-const r Real)(assert (= r -0.5))(check-sat)") == ["sat"]


# -- real arithmetic -----------------------------------------------------------


def test_real_interval_sample_is_exact():
    responses = feed("(declare-const x Real)"
                     "(assert (< x 0.5))(assert (> x 0.25))(check-sat)(get-model)")
    assert responses[0] == "sat"
    value = parse_one(responses[1]).items[0].items[4]
    assert value == slist(atom("/"), atom("3"), atom("8"))


def test_mixed_int_real_comparison():
    responses = feed("(declare-const x Int)(declare-const y Real)"
                     "(assert (< y x))(assert (< x 2))(assert (> y 0.5))(check-sat)")
    assert responses == ["sat"]


def test_real_equality_chain():
    assert feed("(declare-const a Real)(declare-const b Real)"
                "(assert (= a b 1.5))(assert (< a 1))(check-sat)") == ["unsat"]


# -- quantifiers over uninterpreted sorts --------------------------------------


SYLLOGISM = """
(declare-sort Being 0)
(declare-const Socrates Being)
(declare-fun human (Being) Bool)
(declare-fun mortal (Being) Bool)
(assert (forall ((x Being)) (=> (human x) (mortal x))))
(assert (human Socrates))
"""


def test_syllogism_premises_consistent():
    assert feed(SYLLOGISM + "(check-sat)") == ["sat"]


def test_syllogism_refutation_unsat():
    assert feed(SYLLOGISM + "(assert (not (mortal Socrates)))(check-sat)") == ["unsat"]


def test_skolem_witness_meets_later_grounding():
    # the existential witness must be visible when the forall grounds,
    # whatever the assertion order
    script = """(declare-sort U 0)
    (declare-fun P (U) Bool)
    (assert (forall ((x U)) (P x)))
    (assert (exists ((y U)) (not (P y))))
    (check-sat)"""
    assert feed(script) == ["unsat"]


def test_exists_positive_is_satisfiable():
    script = """(declare-sort U 0)
    (declare-fun P (U) Bool)
    (assert (exists ((y U)) (P y)))
    (check-sat)"""
    assert feed(script) == ["sat"]


def test_bool_quantifier_exact():
    assert feed("(declare-fun f (Bool) Bool)" if False else
                "(declare-const c Bool)(assert (forall ((b Bool)) (or b c)))(check-sat)"
                ) == ["sat"]
    assert feed("(assert (forall ((b Bool)) b))(check-sat)") == ["unsat"]


def test_numeric_quantifier_is_unknown():
    assert feed("(assert (forall ((n Int)) (>= n 0)))(check-sat)") == ["unknown"]


def test_equality_over_uninterpreted_sort():
    script = """(declare-sort U 0)
    (declare-const a U)(declare-const b U)(declare-const c U)
    (assert (= a b))(assert (= b c))(assert (not (= a c)))
    (check-sat)"""
    assert feed(script) == ["unsat"]


def test_congruence_of_predicates():
    script = """(declare-sort U 0)
    (declare-const a U)(declare-const b U)
    (declare-fun P (U) Bool)
    (assert (= a b))(assert (P a))(assert (not (P b)))
    (check-sat)"""
    assert feed(script) == ["unsat"]


# -- command layer --------------------------------------------------------------


def test_push_pop_restores_state():
    script = """(declare-const x Int)(assert (> x 0))
    (push 1)(assert (< x 0))(check-sat)(pop 1)(check-sat)"""
    assert feed(script) == ["unsat", "sat"]


def test_define_fun_macro_expansion():
    script = """(declare-const x Int)
    (define-fun double ((n Int)) Int (* 2 n))
    (assert (= (double x) 10))(check-sat)(get-model)"""
    responses = feed(script)
    assert responses[0] == "sat"
    assert "(define-fun x () Int 5)" in responses[1]


def test_let_binding():
    script = """(declare-const x Int)
    (assert (let ((y (+ x 1))) (= y 4)))(check-sat)(get-model)"""
    responses = feed(script)
    assert responses[0] == "sat"
    assert "(define-fun x () Int 3)" in responses[1]


def test_ite_in_numeric_position():
    script = """(declare-const x Int)(declare-const p Bool)
    (assert (= x (ite p 1 2)))(assert (not p))(check-sat)(get-model)"""
    responses = feed(script)
    assert responses[0] == "sat"
    assert "(define-fun x () Int 2)" in responses[1]


def test_distinct_over_integers():
    assert feed("(declare-const a Int)(declare-const b Int)(declare-const c Int)"
                "(assert (distinct a b c))(assert (>= a 0))(assert (<= a 1))"
                "(assert (>= b 0))(assert (<= b 1))"
                "(assert (>= c 0))(assert (<= c 1))(check-sat)") == ["unsat"]


def test_get_model_before_check_errors():
    responses = feed("(get-model)")
    assert responses[0].startswith("(error")


def test_get_model_after_unsat_errors():
    responses = feed("(declare-const p Bool)(assert p)(assert (not p))"
                     "(check-sat)(get-model)")
    assert responses == ["unsat", '(error "model is not available")']


def test_unknown_command_is_error_not_crash():
    responses = feed("(frobnicate 1)(check-sat)")
    assert responses[0].startswith("(error")
    assert responses[1] == "sat"


def test_redeclaration_rejected():
    responses = feed("(declare-const p Bool)(declare-const p Bool)")
    assert responses[0].startswith("(error")


def test_sort_mismatch_rejected():
    responses = feed("(declare-const p Bool)(assert (> p 1))")
    assert responses[0].startswith("(error")


# -- subprocess protocol ---------------------------------------------------------


def test_version_flag():
    proc = subprocess.run(SOLVER + ["--version"], capture_output=True)
    line = proc.stdout.decode().strip()
    assert proc.returncode == 0
    assert line.startswith("smt-forge-refsolver ")


def test_batch_error_exit_code():
    out, code = run_subprocess("(assert")
    assert code == 1
    assert out.startswith("(error")


def test_batch_success_exit_code():
    out, code = run_subprocess("(declare-const p Bool)(assert p)(check-sat)")
    assert code == 0
    assert out == "sat\n"


def test_print_success_protocol():
    script = "(set-option :print-success true)(declare-const p Bool)(check-sat)"
    out, code = run_subprocess(script)
    assert out == "success\nsuccess\nsat\n"


def test_form_reader_handles_comments_and_strings():
    stream = io.StringIO('(echo "a ; not a comment") ; real comment\n(check-sat)')
    forms = [text for text, _ in FormReader(stream).forms()]
    assert forms == ['(echo "a ; not a comment")', "(check-sat)"]


def test_form_reader_tracks_lines():
    stream = io.StringIO("(check-sat)\n\n(assert\n  p)\n")
    forms = list(FormReader(stream).forms())
    assert forms[0] == ("(check-sat)", 1)
    assert forms[1][1] == 3


def test_run_loop_reports_parse_error_line(tmp_path):
    stdin = io.StringIO("(check-sat)\n(assert\n")
    stdout = io.StringIO()
    code = run(stdin, stdout)
    assert code == 1
    assert "line 2" in stdout.getvalue()
