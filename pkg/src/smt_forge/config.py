"""Language configuration: which fenced-block labels are live and how.

A configuration file is one JSON array of language objects:

    [{"name": "Z3", "label": "z3", "highlight": "clojure",
      "showLineNumbers": true,
      "buildConfig": {"timeoutMs": 30000,
                      "runnerCommand": ["python3", "-m", "smt_forge.refsolver"],
                      "versionCommand": ["python3", "-m", "smt_forge.refsolver", "--version"]},
      "discussUrl": "https://github.com/Z3Prover/z3/discussions"}]

Omitting buildConfig makes a language read-only: highlighted, never
executed, no Run button. Unknown keys are rejected so typos in a
teacher-edited file surface immediately.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(Exception):
    """Base for configuration-loading failures."""


class FileUnreadable(ConfigError):
    pass


class MalformedConfig(ConfigError):
    def __init__(self, message: str, position: str = ""):
        super().__init__(f"{message}{f' ({position})' if position else ''}")
        self.position = position


class DuplicateLabel(ConfigError):
    def __init__(self, label: str):
        super().__init__(f"duplicate language label {label!r}")
        self.label = label


class InvalidPolicy(ConfigError):
    def __init__(self, fieldname: str, message: str):
        super().__init__(f"invalid buildConfig field {fieldname!r}: {message}")
        self.field = fieldname


_LABEL_RE = re.compile(r"^[a-z0-9_-]+$")

_LANGUAGE_KEYS = {"name", "label", "highlight", "showLineNumbers",
                  "buildConfig", "discussUrl"}
_POLICY_KEYS = {"timeoutMs", "runnerCommand", "versionCommand"}


@dataclass(frozen=True)
class ExecutionPolicy:
    """How to execute one language's snippets at build or session time."""

    timeout_ms: int
    runner_command: tuple[str, ...]
    version_command: tuple[str, ...]


@dataclass(frozen=True)
class LanguageConfig:
    name: str
    label: str
    highlight: str
    show_line_numbers: bool
    build_config: ExecutionPolicy | None = None
    discuss_url: str | None = None

    @property
    def read_only(self) -> bool:
        return self.build_config is None


@dataclass(frozen=True)
class LanguageConfigSet:
    """Immutable, ordered set of language configs; safe to share."""

    configs: tuple[LanguageConfig, ...] = field(default_factory=tuple)

    def lookup(self, label: str) -> LanguageConfig | None:
        for config in self.configs:
            if config.label == label:
                return config
        return None

    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.configs)

    def __iter__(self):
        return iter(self.configs)

    def __len__(self):
        return len(self.configs)


def _require(obj: dict, key: str, kind, position: str):
    if key not in obj:
        raise MalformedConfig(f"missing required key {key!r}", position)
    value = obj[key]
    if kind is bool:
        if not isinstance(value, bool):
            raise MalformedConfig(f"key {key!r} must be a boolean", position)
    elif kind is str:
        if not isinstance(value, str) or not value:
            raise MalformedConfig(f"key {key!r} must be a non-empty string", position)
    return value


def _command_list(raw, fieldname: str) -> tuple[str, ...]:
    if not isinstance(raw, list) or not raw \
            or not all(isinstance(part, str) and part for part in raw):
        raise InvalidPolicy(fieldname, "must be a non-empty list of strings")
    return tuple(raw)


def _parse_policy(raw, position: str) -> ExecutionPolicy:
    if not isinstance(raw, dict):
        raise MalformedConfig("buildConfig must be an object", position)
    unknown = set(raw) - _POLICY_KEYS
    if unknown:
        raise MalformedConfig(f"unknown buildConfig keys {sorted(unknown)}", position)
    for key in _POLICY_KEYS:
        if key not in raw:
            raise InvalidPolicy(key, "missing")
    timeout_ms = raw["timeoutMs"]
    if not isinstance(timeout_ms, int) or isinstance(timeout_ms, bool) or timeout_ms <= 0:
        raise InvalidPolicy("timeoutMs", "must be a positive integer of milliseconds")
    return ExecutionPolicy(
        timeout_ms=timeout_ms,
        runner_command=_command_list(raw["runnerCommand"], "runnerCommand"),
        version_command=_command_list(raw["versionCommand"], "versionCommand"),
    )


def _parse_language(raw, index: int) -> LanguageConfig:
    position = f"language #{index}"
    if not isinstance(raw, dict):
        raise MalformedConfig("each language entry must be an object", position)
    unknown = set(raw) - _LANGUAGE_KEYS
    if unknown:
        raise MalformedConfig(f"unknown keys {sorted(unknown)}", position)
    label = _require(raw, "label", str, position)
    if not _LABEL_RE.match(label):
        raise MalformedConfig(
            f"label {label!r} must match [a-z0-9_-]+", position)
    discuss_url = raw.get("discussUrl")
    if discuss_url is not None and (not isinstance(discuss_url, str)
                                    or not discuss_url.startswith(("http://", "https://"))):
        raise MalformedConfig("discussUrl must be an absolute URL", position)
    build_config = None
    if raw.get("buildConfig") is not None:
        build_config = _parse_policy(raw["buildConfig"], position)
    return LanguageConfig(
        name=_require(raw, "name", str, position),
        label=label,
        highlight=_require(raw, "highlight", str, position),
        show_line_numbers=_require(raw, "showLineNumbers", bool, position),
        build_config=build_config,
        discuss_url=discuss_url,
    )


def parse_config(text: str) -> LanguageConfigSet:
    """Parse and validate configuration JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedConfig(f"not valid JSON: {exc.msg}",
                              f"line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(data, list):
        raise MalformedConfig("top level must be an array of language objects")
    configs = []
    seen: set[str] = set()
    for index, raw in enumerate(data):
        config = _parse_language(raw, index)
        if config.label in seen:
            raise DuplicateLabel(config.label)
        seen.add(config.label)
        configs.append(config)
    return LanguageConfigSet(tuple(configs))


def load_config(path) -> LanguageConfigSet:
    """Load a configuration file. Deterministic: same bytes, equal set."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    return parse_config(text)
