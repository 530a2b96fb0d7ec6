"""The `forge` command line.

    forge build --docs docs --lang-config languages.json --cache-dir .smt-forge-cache --out site
    forge check --docs docs --lang-config languages.json
    forge clean --cache-dir .smt-forge-cache
    forge serve --out site --port 8000
    forge game judge --game docs/games/g.json --formula guess.smt2

Exit codes: 0 success, 1 build/check failures, 2 configuration or
environment errors, 3 game mismatch.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import games as games_mod
from . import sitebuild
from .cache import CacheError, ResultStore
from .config import ConfigError, load_config
from .runner import RunnerError
from .session import DEFAULT_SOLVER_COMMAND, SessionError, SolverSession

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_CONFIG = 2
EXIT_MISMATCH = 3


def _add_common(parser):
    parser.add_argument("--docs", default="docs", help="documentation root")
    parser.add_argument("--lang-config", default="languages.json",
                        help="language configuration file")
    parser.add_argument("--cache-dir", default=".smt-forge-cache",
                        help="content-addressed output cache")
    parser.add_argument("--jobs", type=int, default=None,
                        help="parallel snippet executions (default: CPUs, max 8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forge",
        description="Static-site build engine for executable SMT tutorials")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build the static site bundle")
    _add_common(p_build)
    p_build.add_argument("--out", default="site", help="bundle output directory")

    p_check = sub.add_parser("check", help="run all snippets without emitting a bundle")
    _add_common(p_check)

    p_clean = sub.add_parser("clean", help="empty the output cache")
    p_clean.add_argument("--cache-dir", default=".smt-forge-cache")

    p_serve = sub.add_parser("serve", help="serve a built bundle (static files only)")
    p_serve.add_argument("--out", default="site")
    p_serve.add_argument("--port", type=int, default=8000)

    p_game = sub.add_parser("game", help="secret-formula game tools")
    game_sub = p_game.add_subparsers(dest="game_command", required=True)
    p_judge = game_sub.add_parser("judge", help="judge a formula against a game")
    p_judge.add_argument("--game", required=True, help="game spec JSON file")
    p_judge.add_argument("--formula", required=True, help="file holding the guess")
    p_judge.add_argument("--solver", default=None,
                         help="solver command override (shell-quoted string)")
    p_judge.add_argument("--lang-config", default=None,
                         help="take the solver from this language configuration")
    return parser


def _print_report(report, out=None):
    out = out if out is not None else sys.stdout
    print(f"executed: {report.executed_count}  cached: {report.cached_count}  "
          f"skipped (no-build): {report.skipped_no_build_count}", file=out)
    for failure in report.failures:
        print(f"FAILED {failure.snippet_id} at {failure.location} "
              f"[{failure.status}]", file=out)
        if failure.diagnostics:
            for line in failure.diagnostics.splitlines():
                print(f"    {line}", file=out)


def _cmd_build(args) -> int:
    try:
        report = sitebuild.build(args.docs, args.lang_config, args.cache_dir,
                                 args.out, jobs=args.jobs)
    except sitebuild.BuildFailed as exc:
        _print_report(exc.report, out=sys.stderr)
        print("build failed; bundle not written", file=sys.stderr)
        return EXIT_FAILURES
    except (ConfigError, RunnerError, CacheError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _print_report(report)
    print(f"bundle written to {args.out}")
    return EXIT_OK


def _cmd_check(args) -> int:
    try:
        report = sitebuild.check(args.docs, args.lang_config, args.cache_dir,
                                 jobs=args.jobs)
    except (ConfigError, RunnerError, CacheError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _print_report(report)
    return EXIT_FAILURES if report.failed else EXIT_OK


def _cmd_clean(args) -> int:
    try:
        removed = ResultStore(args.cache_dir).clear()
    except CacheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"removed {removed} cache entries")
    return EXIT_OK


def _cmd_serve(args) -> int:
    root = Path(args.out)
    if not root.is_dir():
        print(f"error: {root} is not a directory (build first)", file=sys.stderr)
        return EXIT_CONFIG
    handler = partial(SimpleHTTPRequestHandler, directory=str(root))
    server = ThreadingHTTPServer(("127.0.0.1", args.port), handler)
    print(f"serving {root} at http://127.0.0.1:{args.port}/ (static files only)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def _solver_command(args) -> tuple:
    if args.solver:
        return tuple(shlex.split(args.solver))
    if args.lang_config:
        config_set = load_config(args.lang_config)
        for config in config_set:
            if config.build_config is not None:
                return config.build_config.runner_command
    return DEFAULT_SOLVER_COMMAND


def _cmd_game_judge(args) -> int:
    try:
        game = games_mod.load_game(args.game)
        formula_text = Path(args.formula).read_text(encoding="utf-8")
        user = games_mod.parse_formula(formula_text)
        command = _solver_command(args)
    except (games_mod.GameError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with games_mod.open_session_for(game, command) as session:
            games_mod.validate_game(game, session)
            verdict = games_mod.judge(user, game, session)
    except (games_mod.GameError, SessionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(games_mod.format_verdict(verdict))
    return EXIT_OK if isinstance(verdict, games_mod.Equivalent) else EXIT_MISMATCH


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "build":
        return _cmd_build(args)
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "clean":
        return _cmd_clean(args)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "game":
        return _cmd_game_judge(args)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
