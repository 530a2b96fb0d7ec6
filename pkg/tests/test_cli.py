"""Command-line surface: subcommands, exit codes, static serving."""

import json
import threading
import urllib.request
from pathlib import Path

import pytest

from smt_forge.cli import EXIT_CONFIG, EXIT_FAILURES, EXIT_MISMATCH, EXIT_OK, main

from conftest import REPO_ROOT, write_lang_config, language_entry


def make_corpus(tmp_path):
    docs = tmp_path / "docs"
    docs.mkdir()
    (docs / "a.md").write_text("# A\n\n```z3\n(check-sat)\n```\n", encoding="utf-8")
    return docs


def args_for(tmp_path, docs, extra=None):
    config = write_lang_config(tmp_path / "languages.json", [language_entry()])
    base = ["--docs", str(docs), "--lang-config", str(config),
            "--cache-dir", str(tmp_path / "cache")]
    return base + (extra or [])


def test_build_and_check_succeed(tmp_path, capsys):
    docs = make_corpus(tmp_path)
    code = main(["build"] + args_for(tmp_path, docs,
                                     ["--out", str(tmp_path / "site")]))
    assert code == EXIT_OK
    assert (tmp_path / "site" / "manifest.json").exists()
    assert main(["check"] + args_for(tmp_path, docs)) == EXIT_OK
    out = capsys.readouterr().out
    assert "cached: 1" in out


def test_build_failure_exit_one(tmp_path, capsys):
    docs = tmp_path / "docs"
    docs.mkdir()
    (docs / "bad.md").write_text("```z3\n(assert\n```\n", encoding="utf-8")
    code = main(["build"] + args_for(tmp_path, docs,
                                     ["--out", str(tmp_path / "site")]))
    assert code == EXIT_FAILURES
    assert not (tmp_path / "site").exists()
    err = capsys.readouterr().err
    assert "bad.md#0" in err


def test_missing_config_exit_two(tmp_path):
    docs = make_corpus(tmp_path)
    code = main(["check", "--docs", str(docs),
                 "--lang-config", str(tmp_path / "nope.json"),
                 "--cache-dir", str(tmp_path / "cache")])
    assert code == EXIT_CONFIG


def test_broken_runner_exit_two(tmp_path):
    docs = make_corpus(tmp_path)
    config = write_lang_config(tmp_path / "languages.json", [
        language_entry(runner=["/no/such/runner"],
                       version=["/no/such/runner", "--version"])])
    code = main(["check", "--docs", str(docs), "--lang-config", str(config),
                 "--cache-dir", str(tmp_path / "cache")])
    assert code == EXIT_CONFIG


def test_clean_reports_count(tmp_path, capsys):
    docs = make_corpus(tmp_path)
    main(["build"] + args_for(tmp_path, docs, ["--out", str(tmp_path / "site")]))
    assert main(["clean", "--cache-dir", str(tmp_path / "cache")]) == EXIT_OK
    assert "removed 1 cache entries" in capsys.readouterr().out


def test_game_judge_exit_codes(tmp_path):
    game = REPO_ROOT / "docs" / "games" / "threshold.json"
    right = tmp_path / "right.smt2"
    right.write_text("(>= x 6)", encoding="utf-8")
    wrong = tmp_path / "wrong.smt2"
    wrong.write_text("(>= x 5)", encoding="utf-8")
    broken = tmp_path / "broken.smt2"
    broken.write_text("(>= x", encoding="utf-8")

    assert main(["game", "judge", "--game", str(game),
                 "--formula", str(right)]) == EXIT_OK
    assert main(["game", "judge", "--game", str(game),
                 "--formula", str(wrong)]) == EXIT_MISMATCH
    assert main(["game", "judge", "--game", str(game),
                 "--formula", str(broken)]) == EXIT_CONFIG


def test_game_judge_prints_table(tmp_path, capsys):
    game = REPO_ROOT / "docs" / "games" / "threshold.json"
    wrong = tmp_path / "wrong.smt2"
    wrong.write_text("(>= x 5)", encoding="utf-8")
    main(["game", "judge", "--game", str(game), "--formula", str(wrong)])
    out = capsys.readouterr().out
    assert "Satisfies your formula?" in out
    assert "x = 5" in out


def test_serve_static_files(tmp_path):
    docs = make_corpus(tmp_path)
    main(["build"] + args_for(tmp_path, docs, ["--out", str(tmp_path / "site")]))

    from functools import partial
    from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

    handler = partial(SimpleHTTPRequestHandler, directory=str(tmp_path / "site"))
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    port = server.server_address[1]
    try:
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/manifest.json") as resp:
            manifest = json.loads(resp.read())
        assert "a.md#0" in manifest
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/a.html") as resp:
            assert b"smt-block" in resp.read()
    finally:
        server.shutdown()
        server.server_close()
