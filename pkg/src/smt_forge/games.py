"""Secret-formula games: load specs, judge guesses, build verdict tables.

A game hides a secret formula over declared constants. A guess is
equivalent exactly when both difference directions are unsatisfiable;
otherwise the verdict carries model rows showing where the two formulas
disagree (distinguishing models first) and how the guess behaves, each
row's flags independently recomputed under both formulas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .sexpr import Atom, SExpr, SExprError, SList, parse_one, print_sexpr
from .session import (
    Model,
    SolverSession,
    SAT,
    UNKNOWN,
    UNSAT,
    block_model,
    free_constants,
)

SUPPORTED_SORTS = ("Bool", "Int", "Real")
DEFAULT_MAX_ROWS = 4


class GameError(Exception):
    pass


class ParseError(GameError):
    pass


class SortError(GameError):
    def __init__(self, constant: str, message: str | None = None):
        super().__init__(message or f"constant {constant!r} is not declared in this game")
        self.constant = constant


class SolverUnknown(GameError):
    """The solver could not establish a verdict; never silently guessed."""


class MalformedGame(GameError):
    pass


@dataclass(frozen=True)
class GameSpec:
    id: str
    title: str
    description: str
    declarations: tuple            # ((name, sort), ...)
    secret: SExpr
    max_rows: int = DEFAULT_MAX_ROWS


@dataclass(frozen=True)
class ModelRow:
    model: Model
    satisfies_user: bool
    satisfies_secret: bool


@dataclass(frozen=True)
class Equivalent:
    pass


@dataclass(frozen=True)
class Mismatch:
    rows: tuple = field(default_factory=tuple)


Verdict = Equivalent | Mismatch


def parse_formula(text: str) -> SExpr:
    try:
        return parse_one(text)
    except SExprError as exc:
        raise ParseError(str(exc)) from exc


def load_game(path) -> GameSpec:
    """Load and validate a game spec file (secret satisfiability is
    checked separately, against a live session, by validate_game)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise MalformedGame(f"cannot read game file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedGame(f"game file is not valid JSON: {exc}") from exc
    return parse_game(data)


def parse_game(data) -> GameSpec:
    if not isinstance(data, dict):
        raise MalformedGame("game spec must be a JSON object")
    for key in ("id", "title", "description", "declarations", "secret"):
        if key not in data:
            raise MalformedGame(f"game spec is missing {key!r}")
    declarations = []
    if not isinstance(data["declarations"], list) or not data["declarations"]:
        raise MalformedGame("declarations must be a non-empty array")
    for raw in data["declarations"]:
        if not isinstance(raw, dict) or "name" not in raw or "sort" not in raw:
            raise MalformedGame("each declaration needs name and sort")
        if raw["sort"] not in SUPPORTED_SORTS:
            raise MalformedGame(
                f"sort {raw['sort']!r} is outside the supported set {SUPPORTED_SORTS}")
        declarations.append((raw["name"], raw["sort"]))
    secret = parse_formula(data["secret"])
    names = {name for name, _ in declarations}
    for constant in sorted(free_constants(secret)):
        if constant not in names:
            raise MalformedGame(f"secret mentions undeclared constant {constant!r}")
    max_rows = data.get("maxRows", DEFAULT_MAX_ROWS)
    if not isinstance(max_rows, int) or max_rows < 1:
        raise MalformedGame("maxRows must be a positive integer")
    return GameSpec(
        id=str(data["id"]),
        title=str(data["title"]),
        description=str(data["description"]),
        declarations=tuple(declarations),
        secret=secret,
        max_rows=max_rows,
    )


def open_session_for(game: GameSpec, command=None) -> SolverSession:
    session = SolverSession(command) if command else SolverSession()
    for name, sort in game.declarations:
        session.declare_const(name, sort)
    return session


def validate_game(game: GameSpec, session: SolverSession) -> None:
    """An unsatisfiable secret is a malformed game."""
    verdict = session.check_sat([game.secret])
    if verdict == UNSAT:
        raise MalformedGame(f"game {game.id}: secret formula is unsatisfiable")
    if verdict == UNKNOWN:
        raise SolverUnknown(f"game {game.id}: cannot validate secret formula")


def enumerate_models(formula: SExpr, declarations, k: int,
                     session: SolverSession):
    """Up to k pairwise-distinct models via iterated blocking clauses.

    Returns (models, status) with status "exhausted" (no further models
    exist), "limit" (k reached), or "unknown" (solver gave up; models
    found so far are still valid).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    models: list[Model] = []
    while len(models) < k:
        assertions = [formula] + [block_model(m) for m in models]
        verdict = session.check_sat(assertions)
        if verdict == UNKNOWN:
            return models, "unknown"
        if verdict == UNSAT:
            return models, "exhausted"
        models.append(session.get_model())
    return models, "limit"


def judge(user: SExpr, game: GameSpec, session: SolverSession) -> Verdict:
    """Compare a guess against the secret by solver-backed equivalence."""
    declared = {name for name, _ in game.declarations}
    for constant in sorted(free_constants(user)):
        if constant not in declared:
            raise SortError(constant)

    not_secret = SList((Atom("not"), game.secret))
    not_user = SList((Atom("not"), user))

    user_only = session.check_sat([user, not_secret])
    model_user_only = session.get_model() if user_only == SAT else None
    secret_only = session.check_sat([not_user, game.secret])
    model_secret_only = session.get_model() if secret_only == SAT else None
    if UNKNOWN in (user_only, secret_only):
        raise SolverUnknown("equivalence could not be established")
    if user_only == UNSAT and secret_only == UNSAT:
        return Equivalent()

    rows: list[Model] = []
    for model in (model_user_only, model_secret_only):
        if model is not None and model not in rows:
            rows.append(model)
    if len(rows) < game.max_rows:
        extra, _ = enumerate_models(user, game.declarations,
                                    game.max_rows, session)
        for model in extra:
            if len(rows) >= game.max_rows:
                break
            if model not in rows:
                rows.append(model)

    verdict_rows = []
    for model in rows[:game.max_rows]:
        verdict_rows.append(ModelRow(
            model=model,
            satisfies_user=session.eval_under_model(user, model),
            satisfies_secret=session.eval_under_model(game.secret, model),
        ))
    return Mismatch(tuple(verdict_rows))


def format_verdict(verdict: Verdict) -> str:
    """Aligned text table mirroring the game page."""
    if isinstance(verdict, Equivalent):
        return "Equivalent: your formula matches the secret formula.\n"
    header = ("Model", "Satisfies your formula?", "Satisfies the secret formula?")
    table = [header]
    for row in verdict.rows:
        rendered = ", ".join(f"{name} = {print_sexpr(value)}"
                             for name, value in row.model.items())
        table.append((rendered,
                      "yes" if row.satisfies_user else "no",
                      "yes" if row.satisfies_secret else "no"))
    widths = [max(len(line[col]) for line in table) for col in range(3)]
    lines = ["Mismatch: these models tell your formula and the secret apart."]
    for i, line in enumerate(table):
        lines.append("  ".join(cell.ljust(width)
                               for cell, width in zip(line, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"
