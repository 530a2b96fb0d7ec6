"""Shared fixtures: solver command, scratch language configs, doc trees."""

import json
import shutil
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
DOCS_ROOT = REPO_ROOT / "docs"

SOLVER_COMMAND = [sys.executable, "-m", "smt_forge.refsolver"]
VERSION_COMMAND = [sys.executable, "-m", "smt_forge.refsolver", "--version"]


def language_entry(label="z3", timeout_ms=30000, runner=None, version=None,
                   name="Z3", read_only=False):
    entry = {
        "name": name,
        "label": label,
        "highlight": "clojure",
        "showLineNumbers": True,
    }
    if not read_only:
        entry["buildConfig"] = {
            "timeoutMs": timeout_ms,
            "runnerCommand": runner or SOLVER_COMMAND,
            "versionCommand": version or VERSION_COMMAND,
        }
    return entry


def write_lang_config(path: Path, entries) -> Path:
    path.write_text(json.dumps(entries, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def lang_config(tmp_path):
    """languages.json with the bundled solver wired through sys.executable."""
    return write_lang_config(tmp_path / "languages.json", [language_entry()])


@pytest.fixture
def corpus_copy(tmp_path):
    """A private copy of the shipped docs tree, safe to mutate."""
    target = tmp_path / "docs"
    shutil.copytree(DOCS_ROOT, target)
    return target


@pytest.fixture
def repo_lang_config(tmp_path):
    """The shipped languages.json, rewritten to use this interpreter."""
    entries = json.loads((REPO_ROOT / "languages.json").read_text(encoding="utf-8"))
    for entry in entries:
        build = entry.get("buildConfig")
        if build:
            build["runnerCommand"] = SOLVER_COMMAND
            build["versionCommand"] = VERSION_COMMAND
    return write_lang_config(tmp_path / "languages.json", entries)
