"""Markdown scanning: extract configured fenced blocks, rewrite documents.

Fenced blocks (``` or ~~~, up to 3 spaces of indentation) whose info
string names a configured language become Snippets and, on rewrite,
interactive-block placeholders. Everything else passes through
byte-for-byte: re-serializing a RenderedDoc reproduces the source
exactly, fences included.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .config import LanguageConfigSet

RECOGNIZED_FLAGS = ("no-build", "freeform")

_OPEN_RE = re.compile(r"^ {0,3}(`{3,}|~{3,})(.*)$")


class ScanError(Exception):
    """Snippet extraction failure with document location."""

    def __init__(self, message: str, path: str = "", line: int = 0):
        where = f" ({path}:{line})" if path else ""
        super().__init__(f"{message}{where}")
        self.path = path
        self.line = line


class UnknownFlag(ScanError):
    def __init__(self, token: str, path: str = "", line: int = 0):
        super().__init__(f"unknown code-block flag {token!r}", path, line)
        self.token = token


@dataclass(frozen=True)
class Snippet:
    """One extracted fenced block of a configured language."""

    id: str                  # "<relative path>#<index among configured blocks>"
    label: str
    flags: frozenset
    code: str                # body bytes exactly as written, fences excluded
    path: str
    line: int                # 1-based line of the opening fence

    @property
    def no_build(self) -> bool:
        return "no-build" in self.flags

    @property
    def freeform(self) -> bool:
        return "freeform" in self.flags


@dataclass(frozen=True)
class MarkdownSegment:
    text: str


@dataclass(frozen=True)
class InteractiveBlock:
    snippet_id: str
    label: str
    code: str
    show_line_numbers: bool
    read_only: bool
    discuss_url: str | None
    output: str | None
    always_editable: bool
    no_build: bool
    raw_open: str            # original opening-fence line, for round-trips
    raw_close: str


@dataclass(frozen=True)
class RenderedDoc:
    path: str
    nodes: tuple = field(default_factory=tuple)


def parse_info_string(info: str) -> tuple[str | None, frozenset]:
    """Split a fence info string into (label, flags).

    The first whitespace-delimited token is the label; the rest are
    flags, all of which must be recognized.
    """
    tokens = info.split()
    if not tokens:
        return None, frozenset()
    label, *rest = tokens
    flags = set()
    for token in rest:
        if token not in RECOGNIZED_FLAGS:
            raise UnknownFlag(token)
        flags.add(token)
    return label, frozenset(flags)


@dataclass(frozen=True)
class _Fence:
    """One fenced block located in a document, by character offsets."""

    open_start: int
    body_start: int
    body_end: int
    block_end: int
    info: str
    line: int


def _locate_fences(text: str) -> list[_Fence]:
    fences = []
    offset = 0
    line_no = 0
    lines = text.splitlines(keepends=True)
    i = 0
    while i < len(lines):
        line = lines[i]
        match = _OPEN_RE.match(line.rstrip("\n"))
        i += 1
        line_no += 1
        start = offset
        offset += len(line)
        if not match:
            continue
        fence_chars, info = match.group(1), match.group(2)
        if fence_chars[0] == "`" and "`" in info:
            continue  # backtick info strings cannot contain backticks
        open_line = line_no
        body_start = offset
        close_re = re.compile(
            r"^ {0,3}%s{%d,}\s*$" % (re.escape(fence_chars[0]), len(fence_chars)))
        body_end = len(text)
        block_end = len(text)
        while i < len(lines):
            candidate = lines[i]
            if close_re.match(candidate.rstrip("\n")):
                body_end = offset
                block_end = offset + len(candidate)
                offset += len(candidate)
                i += 1
                line_no += 1
                break
            offset += len(candidate)
            i += 1
            line_no += 1
        else:
            body_end = len(text)  # unterminated fence runs to EOF
            block_end = len(text)
        fences.append(_Fence(start, body_start, body_end, block_end,
                             info.strip(), open_line))
    return fences


def extract_snippets(text: str, path: str, config_set: LanguageConfigSet) -> list[Snippet]:
    """Snippets for every configured fenced block, in document order.

    Pure: no filesystem or runner access. Blocks whose label is not
    configured are ignored entirely (their flags included).
    """
    snippets = []
    index = 0
    for fence in _locate_fences(text):
        tokens = fence.info.split()
        if not tokens or config_set.lookup(tokens[0]) is None:
            continue
        try:
            label, flags = parse_info_string(fence.info)
        except UnknownFlag as exc:
            raise UnknownFlag(exc.token, path, fence.line) from None
        snippets.append(Snippet(
            id=f"{path}#{index}",
            label=label,
            flags=flags,
            code=text[fence.body_start:fence.body_end],
            path=path,
            line=fence.line,
        ))
        index += 1
    return snippets


def rewrite_doc(text: str, path: str, config_set: LanguageConfigSet,
                outputs: dict | None = None) -> RenderedDoc:
    """Rewrite a document into render-ready nodes.

    `outputs` maps snippet id to the execution output text shown in the
    bundle; it may be partial. Read-only and no-build blocks never carry
    an output, whatever the map says.
    """
    outputs = outputs or {}
    snippets = {s.id: s for s in extract_snippets(text, path, config_set)}
    nodes = []
    cursor = 0
    index = 0
    for fence in _locate_fences(text):
        tokens = fence.info.split()
        if not tokens:
            continue
        config = config_set.lookup(tokens[0])
        if config is None:
            continue
        snippet = snippets[f"{path}#{index}"]
        index += 1
        if fence.open_start > cursor:
            nodes.append(MarkdownSegment(text[cursor:fence.open_start]))
        output = None
        if not config.read_only and not snippet.no_build:
            output = outputs.get(snippet.id)
        nodes.append(InteractiveBlock(
            snippet_id=snippet.id,
            label=snippet.label,
            code=snippet.code,
            show_line_numbers=config.show_line_numbers,
            read_only=config.read_only,
            discuss_url=config.discuss_url,
            output=output,
            always_editable=snippet.freeform,
            no_build=snippet.no_build,
            raw_open=text[fence.open_start:fence.body_start],
            raw_close=text[fence.body_end:fence.block_end],
        ))
        cursor = fence.block_end
    if cursor < len(text) or not nodes:
        nodes.append(MarkdownSegment(text[cursor:]))
    return RenderedDoc(path=path, nodes=tuple(nodes))


def serialize_doc(doc: RenderedDoc) -> str:
    """Expand placeholders back to their original fences. Inverse of rewrite."""
    parts = []
    for node in doc.nodes:
        if isinstance(node, MarkdownSegment):
            parts.append(node.text)
        else:
            parts.append(node.raw_open + node.code + node.raw_close)
    return "".join(parts)


def find_docs(root) -> list[Path]:
    """All .md files under root, ordered lexicographically by relative path."""
    root = Path(root)
    return sorted(root.rglob("*.md"), key=lambda p: str(p.relative_to(root)))
