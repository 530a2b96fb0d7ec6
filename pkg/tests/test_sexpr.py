"""S-expression parsing and printing."""

import random

import pytest

from smt_forge.sexpr import (
    Atom,
    SList,
    UnbalancedParen,
    UnterminatedString,
    atom,
    parse_one,
    parse_sexpr,
    print_sexpr,
    slist,
)


def test_parse_nested_boolean_term():
    forms = parse_sexpr("(and p (not q))")
    assert forms == [slist(atom("and"), atom("p"),
                           slist(atom("not"), atom("q")))]


def test_parse_model_shaped_pairs():
    # shape produced by bare-pair model printers: ((x 5))
    forms = parse_sexpr("((x 5))")
    assert forms == [slist(slist(atom("x"), atom("5")))]


def test_unclosed_paren_reports_line_one():
    with pytest.raises(UnbalancedParen) as exc:
        parse_sexpr("(assert")
    assert exc.value.line == 1
    assert exc.value.col == 1


def test_unclosed_paren_reports_deepest_open():
    with pytest.raises(UnbalancedParen) as exc:
        parse_sexpr("(assert p)\n(and (or p\n")
    assert exc.value.line == 2
    assert exc.value.col == 6  # the (or is the deepest pending paren


def test_stray_close_paren_position():
    with pytest.raises(UnbalancedParen) as exc:
        parse_sexpr("(assert p)\n  )")
    assert exc.value.line == 2
    assert exc.value.col == 3


def test_unterminated_string():
    with pytest.raises(UnterminatedString) as exc:
        parse_sexpr('(echo "oops)')
    assert exc.value.line == 1


def test_comments_skipped():
    forms = parse_sexpr("; a comment with (parens\n(check-sat) ; trailing\n")
    assert forms == [slist(atom("check-sat"))]


def test_string_literal_kept_verbatim_with_doubled_quote():
    forms = parse_sexpr('(echo "say ""hi"" now")')
    assert forms[0].items[1] == atom('"say ""hi"" now"')


def test_print_equality():
    assert print_sexpr(slist(atom("="), atom("x"), atom("5"))) == "(= x 5)"


def test_print_bare_atom():
    assert print_sexpr(atom("p")) == "p"


def test_parse_one_rejects_multiple():
    with pytest.raises(Exception):
        parse_one("(a) (b)")


def _random_tree(rng, depth):
    if depth <= 0 or rng.random() < 0.35:
        return atom(rng.choice(["p", "q", "xyz", "42", "-7", "a_b-c", "<=", "true"]))
    width = rng.randint(0, 4)
    return SList(tuple(_random_tree(rng, depth - 1) for _ in range(width)))


def test_parse_print_identity_on_random_trees():
    rng = random.Random(20240717)
    for _ in range(300):
        tree = _random_tree(rng, 6)
        assert parse_one(print_sexpr(tree)) == tree


def test_print_parse_identity_on_canonical_text():
    texts = ["(= x 5)", "p", "(and p (not q))", "(a (b c) () d)"]
    for text in texts:
        assert print_sexpr(parse_one(text)) == text


def test_multiline_positions():
    with pytest.raises(UnbalancedParen) as exc:
        parse_sexpr("(declare-const x Int)\n(assert (> x\n  5)\n")
    assert exc.value.line == 2
