"""Solver sessions: verdicts, models, evaluation, blocking."""

import pytest

from smt_forge.session import (
    EmptyModel,
    IncompleteModel,
    Model,
    NoModelAvailable,
    SolverError,
    SolverSession,
    block_model,
    free_constants,
    parse_model,
)
from smt_forge.sexpr import atom, parse_one, print_sexpr, slist

from conftest import SOLVER_COMMAND


@pytest.fixture
def session():
    with SolverSession(SOLVER_COMMAND, timeout_s=20) as s:
        yield s


def f(text):
    return parse_one(text)


def test_contradiction_unsat(session):
    session.declare_const("p", "Bool")
    assert session.check_sat([f("p"), f("(not p)")]) == "unsat"


def test_disjunction_sat(session):
    session.declare_const("p", "Bool")
    session.declare_const("q", "Bool")
    assert session.check_sat([f("(or p q)")]) == "sat"


def test_forced_int_model(session):
    session.declare_const("x", "Int")
    assert session.check_sat([f("(= x 5)")]) == "sat"
    model = session.get_model()
    assert model.bindings["x"] == atom("5")
    assert model.sorts["x"] == "Int"


def test_forced_bool_model(session):
    session.declare_const("p", "Bool")
    session.declare_const("q", "Bool")
    assert session.check_sat([f("(or p q)"), f("(not p)")]) == "sat"
    model = session.get_model()
    assert model.bindings == {"p": atom("false"), "q": atom("true")}


def test_no_model_after_unsat(session):
    session.declare_const("p", "Bool")
    session.check_sat([f("p"), f("(not p)")])
    with pytest.raises(NoModelAvailable):
        session.get_model()


def test_unknown_on_hard_instance(session):
    # unbounded integer parity gap: the solver honestly answers unknown
    session.declare_const("x", "Int")
    session.declare_const("y", "Int")
    verdict = session.check_sat([f("(= (* 2 x) (+ (* 2 y) 1))")])
    assert verdict == "unknown"


def test_eval_under_model_boundary(session):
    session.declare_const("x", "Int")
    model = Model(bindings={"x": atom("5")}, sorts={"x": "Int"})
    assert session.eval_under_model(f("(> x 5)"), model) is False
    assert session.eval_under_model(f("(>= x 5)"), model) is True


def test_eval_under_model_missing_constant(session):
    session.declare_const("x", "Int")
    model = Model(bindings={"x": atom("5")}, sorts={"x": "Int"})
    with pytest.raises(IncompleteModel) as exc:
        session.eval_under_model(f("(> y 5)"), model)
    assert exc.value.constant == "y"


def test_soundness_link(session):
    session.declare_const("x", "Int")
    session.declare_const("p", "Bool")
    assertions = [f("(or p (> x 2))"), f("(not p)"), f("(< x 10)")]
    assert session.check_sat(assertions) == "sat"
    model = session.get_model()
    for formula in assertions:
        assert session.eval_under_model(formula, model) is True


def test_block_model_single_binding():
    model = Model(bindings={"x": atom("5")})
    assert print_sexpr(block_model(model)) == "(not (= x 5))"


def test_block_model_two_bindings():
    model = Model(bindings={"x": atom("5"), "y": atom("2")})
    assert print_sexpr(block_model(model)) == "(not (and (= x 5) (= y 2)))"


def test_block_empty_model_rejected():
    with pytest.raises(EmptyModel):
        block_model(Model())


def test_blocked_model_not_repeated(session):
    session.declare_const("x", "Int")
    formula = f("(and (> x 0) (< x 5))")
    assert session.check_sat([formula]) == "sat"
    first = session.get_model()
    verdict = session.check_sat([formula, block_model(first)])
    assert verdict in ("sat", "unsat")
    if verdict == "sat":
        assert session.get_model() != first


def test_frames_restore_between_checks(session):
    session.declare_const("x", "Int")
    session.assert_base(f("(> x 0)"))
    assert session.check_sat([f("(< x 0)")]) == "unsat"
    assert session.check_sat([f("(< x 10)")]) == "sat"  # scratch frame popped


def test_solver_error_surfaces(session):
    session.declare_const("p", "Bool")
    with pytest.raises(SolverError):
        session.check_sat([f("(> p 1)")])


def test_session_survives_solver_error(session):
    session.declare_const("p", "Bool")
    with pytest.raises(SolverError):
        session.check_sat([f("(> p 1)")])
    assert session.check_sat([f("p")]) == "sat"


def test_missing_solver_binary():
    with pytest.raises(SolverError):
        SolverSession(["/no/such/solver"])


def test_parse_model_define_fun_style():
    model = parse_model('((define-fun x () Int 5)\n(define-fun p () Bool true))')
    assert model.bindings == {"x": atom("5"), "p": atom("true")}
    assert model.sorts == {"x": "Int", "p": "Bool"}


def test_parse_model_bare_pairs():
    model = parse_model("((x 5) (y (- 2)))")
    assert model.bindings["x"] == atom("5")
    assert model.bindings["y"] == slist(atom("-"), atom("2"))


def test_parse_model_leading_model_atom():
    model = parse_model("(model (define-fun x () Int 1))")
    assert model.bindings == {"x": atom("1")}


def test_free_constants_walk():
    assert free_constants(f("(and p (not (= x 5)))")) == {"p", "x"}
    assert free_constants(f("(forall ((v Int)) (> v x))")) == {"x"}
    assert free_constants(f("(let ((a (+ x 1))) (> a y))")) == {"x", "y"}
