"""Markdown scanning: info strings, snippet extraction, round-trips."""

import json
import random

import pytest

from smt_forge.config import parse_config
from smt_forge.mdscan import (
    InteractiveBlock,
    MarkdownSegment,
    UnknownFlag,
    extract_snippets,
    parse_info_string,
    rewrite_doc,
    serialize_doc,
)

Z3_ONLY = parse_config(json.dumps([{
    "name": "Z3", "label": "z3", "highlight": "clojure", "showLineNumbers": True,
    "buildConfig": {"timeoutMs": 1000, "runnerCommand": ["true"],
                    "versionCommand": ["true"]},
}]))

WITH_READONLY = parse_config(json.dumps([
    {"name": "Z3", "label": "z3", "highlight": "clojure", "showLineNumbers": True,
     "buildConfig": {"timeoutMs": 1000, "runnerCommand": ["true"],
                     "versionCommand": ["true"]},
     "discussUrl": "https://example.org/forum"},
    {"name": "Python", "label": "python", "highlight": "python",
     "showLineNumbers": False},
]))


# -- info strings ---------------------------------------------------------------


def test_info_label_only():
    assert parse_info_string("z3") == ("z3", frozenset())


def test_info_label_with_no_build():
    assert parse_info_string("z3 no-build") == ("z3", frozenset({"no-build"}))


def test_info_empty_is_plain_block():
    assert parse_info_string("") == (None, frozenset())


def test_info_unknown_flag_rejected():
    with pytest.raises(UnknownFlag) as exc:
        parse_info_string("z3 no-biuld")
    assert exc.value.token == "no-biuld"


def test_info_freeform_flag():
    assert parse_info_string("z3 freeform") == ("z3", frozenset({"freeform"}))


# -- extraction -------------------------------------------------------------------


DOC_TWO_BLOCKS = """# Title

```z3
(check-sat)
```

middle prose

```z3
(assert p)
```
"""


def test_two_blocks_ordered_ids():
    snippets = extract_snippets(DOC_TWO_BLOCKS, "a.md", Z3_ONLY)
    assert [s.id for s in snippets] == ["a.md#0", "a.md#1"]
    assert snippets[0].code == "(check-sat)\n"
    assert snippets[1].code == "(assert p)\n"
    assert snippets[0].line == 3


def test_unconfigured_label_ignored():
    doc = "```js\nconsole.log(1)\n```\n"
    assert extract_snippets(doc, "a.md", Z3_ONLY) == []


def test_newly_configured_language_extracts():
    dafny_set = parse_config(json.dumps([
        {"name": "Dafny", "label": "dafny", "highlight": "dafny",
         "showLineNumbers": True}]))
    doc = "```dafny\nmethod M() {}\n```\n"
    snippets = extract_snippets(doc, "a.md", dafny_set)
    assert len(snippets) == 1
    assert snippets[0].label == "dafny"


def test_unknown_flag_reports_location():
    doc = "line one\n\n```z3 explode\n(check-sat)\n```\n"
    with pytest.raises(UnknownFlag) as exc:
        extract_snippets(doc, "d.md", Z3_ONLY)
    assert exc.value.path == "d.md"
    assert exc.value.line == 3


def test_unconfigured_block_flags_not_validated():
    # info-string metadata on an unconfigured block must not break the scan
    doc = '```text title="x.txt"\nhello\n```\n'
    assert extract_snippets(doc, "a.md", Z3_ONLY) == []


def test_code_is_byte_exact_no_trimming():
    doc = "```z3\n(check-sat)\n\n```\n"
    snippets = extract_snippets(doc, "a.md", Z3_ONLY)
    assert snippets[0].code == "(check-sat)\n\n"


def test_tilde_fences():
    doc = "~~~z3\n(check-sat)\n~~~\n"
    snippets = extract_snippets(doc, "a.md", Z3_ONLY)
    assert len(snippets) == 1


def test_longer_fence_contains_backtick_fence():
    doc = "````md\n```z3\n(check-sat)\n```\n````\n"
    assert extract_snippets(doc, "a.md", Z3_ONLY) == []


def test_unclosed_fence_runs_to_eof():
    doc = "```z3\n(check-sat)\n"
    snippets = extract_snippets(doc, "a.md", Z3_ONLY)
    assert snippets[0].code == "(check-sat)\n"


def test_indented_fence_up_to_three_spaces():
    doc = "   ```z3\n(check-sat)\n   ```\n"
    assert len(extract_snippets(doc, "a.md", Z3_ONLY)) == 1
    doc_four = "    ```z3\n(check-sat)\n    ```\n"
    assert extract_snippets(doc_four, "a.md", Z3_ONLY) == []


def test_extraction_is_pure_and_stable():
    first = extract_snippets(DOC_TWO_BLOCKS, "a.md", Z3_ONLY)
    second = extract_snippets(DOC_TWO_BLOCKS, "a.md", Z3_ONLY)
    assert first == second


# -- rewriting --------------------------------------------------------------------


def test_rewrite_attaches_output():
    doc = rewrite_doc(DOC_TWO_BLOCKS, "a.md", Z3_ONLY, {"a.md#0": "sat\n"})
    blocks = [n for n in doc.nodes if isinstance(n, InteractiveBlock)]
    assert blocks[0].output == "sat\n"
    assert blocks[1].output is None


def test_rewrite_no_build_never_carries_output():
    doc_text = "```z3 no-build\n(assert\n```\n"
    doc = rewrite_doc(doc_text, "a.md", Z3_ONLY, {"a.md#0": "should not appear"})
    block = doc.nodes[0]
    assert isinstance(block, InteractiveBlock)
    assert block.output is None
    assert block.no_build


def test_rewrite_read_only_never_carries_output():
    doc_text = "```python\nprint(1)\n```\n"
    doc = rewrite_doc(doc_text, "a.md", WITH_READONLY, {"a.md#0": "1"})
    block = doc.nodes[0]
    assert block.read_only
    assert block.output is None


def test_rewrite_unlabeled_block_passes_through():
    doc_text = "```\nplain\n```\n"
    doc = rewrite_doc(doc_text, "a.md", Z3_ONLY)
    assert all(isinstance(n, MarkdownSegment) for n in doc.nodes)


def test_rewrite_carries_config_fields():
    doc_text = "```z3 freeform\n(check-sat)\n```\n"
    doc = rewrite_doc(doc_text, "a.md", WITH_READONLY)
    block = doc.nodes[0]
    assert block.show_line_numbers is True
    assert block.discuss_url == "https://example.org/forum"
    assert block.always_editable is True


# -- round-trip property -----------------------------------------------------------


ROUND_TRIP_DOCS = [
    "",
    "no blocks at all\n",
    DOC_TWO_BLOCKS,
    "```z3\n(check-sat)\n```",              # no trailing newline after fence
    "```z3\n(check-sat)\n",                  # unclosed fence
    "text\n```z3 no-build\n(assert\n```\nmore\n",
    "~~~z3\ncode\n~~~\ntail",
    "````z3\ncode with ``` inside\n````\n",
    "- list\n\n```python\nx = 1\n```\n\n> quote\n",
]


def test_round_trip_byte_exact_on_crafted_docs():
    for text in ROUND_TRIP_DOCS:
        doc = rewrite_doc(text, "t.md", WITH_READONLY)
        assert serialize_doc(doc) == text


def test_round_trip_byte_exact_on_random_docs():
    rng = random.Random(424242)
    pieces = ["# h\n", "prose line\n", "\n", "```z3\n(check-sat)\n```\n",
              "```python\npass\n```\n", "```\nplain\n```\n",
              "   ```z3\n(a b)\n   ```\n", "~~~z3 no-build\n(assert\n~~~\n",
              "trailing text"]
    for _ in range(200):
        text = "".join(rng.choice(pieces) for _ in range(rng.randint(0, 8)))
        doc = rewrite_doc(text, "t.md", WITH_READONLY)
        assert serialize_doc(doc) == text


def test_snippet_ids_stable_across_scans():
    for _ in range(3):
        snippets = extract_snippets(DOC_TWO_BLOCKS, "a.md", Z3_ONLY)
        assert [s.id for s in snippets] == ["a.md#0", "a.md#1"]
