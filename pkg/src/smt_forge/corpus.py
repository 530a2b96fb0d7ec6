"""Expectations for the shipped documentation tree under docs/.

Each fixture pins what a correct build of the corpus must produce:
snippet counts per document and the first output token of every
executed snippet. validate_corpus checks a built bundle against them;
deviations come back as data, not exceptions, so callers can report
all of them at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class CorpusFixture:
    path: str
    expected_snippet_count: int
    expected_outputs: dict = field(default_factory=dict)  # id -> first token
    read_only: bool = False


SOCRATES_REFUTATION_ID = "tutorial/02-socrates.md#1"
DOGS_CATS_MICE_ID = "problems/dogs-cats-mice.md#0"
DOGS_CATS_MICE_OVERCONSTRAINED_ID = "problems/dogs-cats-mice.md#1"
NO_BUILD_ID = "problems/intentional-errors.md#0"

FIXTURES = (
    CorpusFixture(
        path="tutorial/01-basics.md",
        expected_snippet_count=3,
        expected_outputs={
            "tutorial/01-basics.md#0": "sat",
            "tutorial/01-basics.md#1": "sat",
            "tutorial/01-basics.md#2": "unsat",
        },
    ),
    CorpusFixture(
        path="tutorial/02-socrates.md",
        expected_snippet_count=2,
        expected_outputs={
            "tutorial/02-socrates.md#0": "sat",
            SOCRATES_REFUTATION_ID: "unsat",
        },
    ),
    CorpusFixture(
        path="problems/dogs-cats-mice.md",
        expected_snippet_count=2,
        expected_outputs={
            DOGS_CATS_MICE_ID: "sat",
            DOGS_CATS_MICE_OVERCONSTRAINED_ID: "unsat",
        },
    ),
    CorpusFixture(
        path="problems/intentional-errors.md",
        expected_snippet_count=1,
        expected_outputs={},  # no-build: never executed, no output
    ),
    CorpusFixture(
        path="reference/python-examples.md",
        expected_snippet_count=1,
        expected_outputs={},
        read_only=True,
    ),
    CorpusFixture(
        path="playground.md",
        expected_snippet_count=1,
        expected_outputs={"playground.md#0": "sat"},
    ),
)


def validate_corpus(bundle_dir) -> list[str]:
    """Check a built bundle against the fixtures; returns deviations."""
    bundle_dir = Path(bundle_dir)
    deviations: list[str] = []
    manifest_path = bundle_dir / "manifest.json"
    if not manifest_path.is_file():
        return [f"manifest missing at {manifest_path}"]
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    for fixture in FIXTURES:
        ids = [sid for sid in manifest if sid.startswith(fixture.path + "#")]
        if len(ids) != fixture.expected_snippet_count:
            deviations.append(
                f"{fixture.path}: expected {fixture.expected_snippet_count} "
                f"snippets, manifest has {len(ids)}")
        page = bundle_dir / (fixture.path[:-3] + ".html")
        if not page.is_file():
            deviations.append(f"{fixture.path}: page {page.name} missing")
        for snippet_id, expected_token in fixture.expected_outputs.items():
            entry = manifest.get(snippet_id)
            if entry is None:
                deviations.append(f"{snippet_id}: missing from manifest")
                continue
            output = entry.get("output")
            if output is None:
                deviations.append(f"{snippet_id}: expected output, found none")
                continue
            tokens = output.split()
            first = tokens[0] if tokens else ""
            if first != expected_token:
                deviations.append(
                    f"{snippet_id}: first output token {first!r}, "
                    f"expected {expected_token!r}")
        if fixture.read_only:
            for sid in ids:
                if not manifest[sid].get("readOnly"):
                    deviations.append(f"{sid}: expected readOnly entry")
                if "output" in manifest[sid]:
                    deviations.append(f"{sid}: read-only entry carries output")

    entry = manifest.get(NO_BUILD_ID)
    if entry is None:
        deviations.append(f"{NO_BUILD_ID}: missing from manifest")
    elif "output" in entry:
        deviations.append(f"{NO_BUILD_ID}: no-build entry carries output")
    return deviations
