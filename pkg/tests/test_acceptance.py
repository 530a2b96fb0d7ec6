"""Acceptance suite: one test per criterion, one PASS line per criterion.

Run with `pytest tests/test_acceptance.py -v -s`. Every tolerance is
pinned here, not deferred: A1 exact token + 60 s budget, A3 the
[1000, 3000] ms window, A5/A7 exact counts with zero disagreements,
A8 byte identity.
"""

import base64
import json
import random
import sys
import time
from functools import reduce
from pathlib import Path

import pytest

from smt_forge.config import ExecutionPolicy
from smt_forge.corpus import SOCRATES_REFUTATION_ID, validate_corpus
from smt_forge.games import (
    Equivalent,
    Mismatch,
    judge,
    load_game,
    open_session_for,
    parse_formula,
    parse_game,
    validate_game,
)
from smt_forge.mdscan import Snippet
from smt_forge.runner import run_snippet
from smt_forge.sexpr import (
    Atom,
    SList,
    UnbalancedParen,
    atom,
    parse_one,
    parse_sexpr,
    print_sexpr,
    slist,
)
from smt_forge.sitebuild import BuildFailed, build

from conftest import (
    REPO_ROOT,
    SOLVER_COMMAND,
    language_entry,
    write_lang_config,
)

PY = sys.executable


def ok(criterion, detail=""):
    print(f"{criterion}: PASS" + (f" ({detail})" if detail else ""))


# -- A1: Socrates fixture ------------------------------------------------------


def test_a1_socrates_refutation_token_and_build_budget(tmp_path, corpus_copy,
                                                       repo_lang_config):
    started = time.monotonic()
    report = build(corpus_copy, repo_lang_config, tmp_path / "cache",
                   tmp_path / "site")
    elapsed = time.monotonic() - started
    assert not report.failed
    assert elapsed < 60.0, f"cold corpus build took {elapsed:.1f}s"
    manifest = json.loads((tmp_path / "site" / "manifest.json").read_text())
    first_token = manifest[SOCRATES_REFUTATION_ID]["output"].split()[0]
    assert first_token == "unsat"
    assert validate_corpus(tmp_path / "site") == []
    ok("A1", f"cold build {elapsed:.2f}s, refutation token 'unsat'")


# -- A2: cache invalidation triad ------------------------------------------------


def counting_executor():
    calls = []

    def execute(snippet, policy, *, runtime_name, runtime_version):
        calls.append(snippet.id)
        return run_snippet(snippet, policy, runtime_name=runtime_name,
                           runtime_version=runtime_version)

    return execute, calls


def version_controlled_config(tmp_path):
    """Language whose runner is trivial and whose version we can bump."""
    version_file = tmp_path / "runtime-version.txt"
    version_file.write_text("1.0\n", encoding="utf-8")
    runner = [PY, "-c", "import sys; sys.stdin.read(); print('ok')"]
    version = [PY, "-c",
               f"print(open({str(version_file)!r}).read().strip())"]
    config = write_lang_config(tmp_path / "languages.json",
                               [language_entry(runner=runner, version=version)])
    return config, version_file


def test_a2_cache_invalidation_triad(tmp_path):
    config, version_file = version_controlled_config(tmp_path)
    docs = tmp_path / "docs"
    docs.mkdir()
    (docs / "a.md").write_text("```z3\none\n```\n\n```z3\ntwo\n```\n")
    (docs / "b.md").write_text("```z3\nthree\n```\n")
    cache, site = tmp_path / "cache", tmp_path / "site"

    build(docs, config, cache, site)

    # (i) immediate rebuild executes zero runners
    execute, calls = counting_executor()
    report = build(docs, config, cache, site, execute=execute)
    assert calls == [] and report.executed_count == 0
    assert report.cached_count == 3

    # (ii) editing one snippet re-executes exactly that one
    (docs / "b.md").write_text("```z3\nthree edited\n```\n")
    execute, calls = counting_executor()
    report = build(docs, config, cache, site, execute=execute)
    assert calls == ["b.md#0"] and report.executed_count == 1
    assert report.cached_count == 2

    # (iii) bumping the runtime version re-executes all
    version_file.write_text("2.0\n", encoding="utf-8")
    execute, calls = counting_executor()
    report = build(docs, config, cache, site, execute=execute)
    assert report.executed_count == 3 and report.cached_count == 0
    assert sorted(calls) == ["a.md#0", "a.md#1", "b.md#0"]
    ok("A2", "0 on rebuild, 1 after edit, all after version bump")


# -- A3: timeout ------------------------------------------------------------------


def test_a3_timeout_window(tmp_path):
    policy = ExecutionPolicy(
        timeout_ms=1000,
        runner_command=(PY, "-c", "import time; time.sleep(10)"),
        version_command=(PY, "-c", "print('sleepy 1.0')"),
    )
    snippet = Snippet(id="t.md#0", label="z3", flags=frozenset(),
                      code="anything", path="t.md", line=1)
    result = run_snippet(snippet, policy, runtime_name="Sleepy",
                         runtime_version="1.0")
    assert result.status == "timeout"
    assert 1000 <= result.elapsed_ms <= 3000
    ok("A3", f"status=timeout, elapsed {result.elapsed_ms}ms in [1000, 3000]")


# -- A4: error semantics ------------------------------------------------------------


def test_a4_error_semantics(tmp_path, lang_config):
    docs = tmp_path / "docs"
    docs.mkdir()
    cache, site = tmp_path / "cache", tmp_path / "site"

    # without no-build: the build fails and reports the snippet id
    (docs / "bad.md").write_text("```z3\n(assert\n```\n", encoding="utf-8")
    with pytest.raises(BuildFailed) as exc:
        build(docs, lang_config, cache, site, execute=counting_executor()[0])
    assert [f.snippet_id for f in exc.value.report.failures] == ["bad.md#0"]
    assert not site.exists()

    # with no-build: the build succeeds and the snippet provably never runs
    (docs / "bad.md").write_text("```z3 no-build\n(assert\n```\n",
                                 encoding="utf-8")
    execute, calls = counting_executor()
    report = build(docs, lang_config, cache, site, execute=execute)
    assert not report.failed
    assert report.skipped_no_build_count == 1
    assert calls == []
    ok("A4", "failure reported with id; no-build never executed")


# -- A5: game soundness ---------------------------------------------------------------


BOOL_VARS = ("p", "q", "r")


def eval_bool(expr, env):
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
    raise AssertionError(op)


def random_formula(rng, depth=3):
    if depth <= 0 or rng.random() < 0.3:
        return atom(rng.choice(BOOL_VARS))
    op = rng.choice(["and", "or", "not", "=>", "xor"])
    children = 1 if op == "not" else 2
    return SList((atom(op),)
                 + tuple(random_formula(rng, depth - 1) for _ in range(children)))


def tables_equal(a, b):
    for bits in range(8):
        env = {v: bool((bits >> i) & 1) for i, v in enumerate(BOOL_VARS)}
        if eval_bool(a, env) != eval_bool(b, env):
            return False
    return True


def test_a5_game_soundness():
    # boundary mismatch: secret (> x 5), guess (>= x 5)
    threshold = parse_game({
        "id": "threshold", "title": "t", "description": "d",
        "declarations": [{"name": "x", "sort": "Int"}],
        "secret": "(> x 5)",
    })
    with open_session_for(threshold, SOLVER_COMMAND) as session:
        verdict = judge(parse_formula("(>= x 5)"), threshold, session)
        assert isinstance(verdict, Mismatch)
        boundary = [row for row in verdict.rows
                    if row.model.bindings["x"] == atom("5")]
        assert boundary
        assert boundary[0].satisfies_user is True
        assert boundary[0].satisfies_secret is False

    # reflexivity across every shipped game
    for path in sorted((REPO_ROOT / "docs" / "games").glob("*.json")):
        game = load_game(path)
        with open_session_for(game, SOLVER_COMMAND) as session:
            validate_game(game, session)
            assert isinstance(judge(game.secret, game, session), Equivalent), \
                f"reflexivity failed for {game.id}"

    # 100 random Boolean formulas against an exhaustive truth-table oracle
    secret_text = "(or (and p q) (not r))"
    secret = parse_one(secret_text)
    game = parse_game({
        "id": "bool3", "title": "t", "description": "d",
        "declarations": [{"name": v, "sort": "Bool"} for v in BOOL_VARS],
        "secret": secret_text,
    })
    rng = random.Random(13370042)
    disagreements = 0
    with open_session_for(game, SOLVER_COMMAND) as session:
        for _ in range(100):
            user = random_formula(rng)
            verdict = judge(user, game, session)
            if isinstance(verdict, Equivalent) != tables_equal(user, secret):
                disagreements += 1
    assert disagreements == 0
    ok("A5", "boundary row, reflexivity on all games, 100/100 oracle agreement")


# -- A6: dogs, cats, and mice ----------------------------------------------------------


def brute_force_unique_solution():
    solutions = []
    for dogs in range(101):
        for cats in range(101 - dogs):
            mice = 100 - dogs - cats
            if dogs >= 1 and cats >= 1 and mice >= 1 \
                    and 1500 * dogs + 100 * cats + 25 * mice == 10000:
                solutions.append((dogs, cats, mice))
    return solutions


def test_a6_dogs_cats_mice(tmp_path, corpus_copy, repo_lang_config):
    assert brute_force_unique_solution() == [(3, 41, 56)]

    build(corpus_copy, repo_lang_config, tmp_path / "cache", tmp_path / "site")
    manifest = json.loads((tmp_path / "site" / "manifest.json").read_text())

    sat_output = manifest["problems/dogs-cats-mice.md#0"]["output"]
    assert sat_output.split()[0] == "sat"
    model = {e.items[1].text: int(e.items[4].text)
             for e in parse_one(sat_output.split("\n", 1)[1]).items}
    assert model == {"dogs": 3, "cats": 41, "mice": 56}

    flipped = manifest["problems/dogs-cats-mice.md#1"]["output"]
    assert flipped.split()[0] == "unsat"
    ok("A6", "unique (3, 41, 56) brute-force verified; cats bound flips to unsat")


# -- A7: parser properties ----------------------------------------------------------


def _random_tree(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        return atom(rng.choice(["p", "q", "check-sat", "42", "x_1", "<=",
                                "assert", "-7", "true"]))
    width = rng.randint(0, 4)
    return SList(tuple(_random_tree(rng, depth - 1) for _ in range(width)))


CRAFTED_NEGATIVES = [
    ("(assert", 1),
    ("(assert p)\n(and (or q\n", 2),
    ("(a)\n(b)\n(c\n", 3),
    ("\n\n   (unclosed", 3),
    (";comment\n(fine)\n((((", 3),
]


def test_a7_parser_properties():
    rng = random.Random(20240101)
    for _ in range(1000):
        tree = _random_tree(rng, 8)
        assert parse_one(print_sexpr(tree)) == tree
    for text, expected_line in CRAFTED_NEGATIVES:
        with pytest.raises(UnbalancedParen) as exc:
            parse_sexpr(text)
        assert exc.value.line == expected_line, text
    ok("A7", "1000 round-trips, all crafted negatives at the right line")


# -- A8: reproducibility --------------------------------------------------------------


def _bundle_snapshot(root: Path) -> dict:
    files = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            files[str(path.relative_to(root))] = path.read_bytes()
    return files


def test_a8_reproducible_bundles(tmp_path, corpus_copy, repo_lang_config):
    cache = tmp_path / "cache"
    build(corpus_copy, repo_lang_config, cache, tmp_path / "warmup")
    build(corpus_copy, repo_lang_config, cache, tmp_path / "site1")
    build(corpus_copy, repo_lang_config, cache, tmp_path / "site2")
    first = _bundle_snapshot(tmp_path / "site1")
    second = _bundle_snapshot(tmp_path / "site2")
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], f"{name} differs between builds"
    ok("A8", f"{len(first)} bundle files byte-identical across warm builds")
