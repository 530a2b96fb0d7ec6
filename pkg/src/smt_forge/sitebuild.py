"""Full build orchestration: scan, cache, execute, emit the static bundle.

A build discovers Markdown docs lexicographically, resolves every
executable snippet against the content-addressed cache, fans cache
misses out to a bounded worker pool, and emits a bundle (pages,
manifest, static assets, game specs) that any static file server can
host with zero server-side computation. Error or timeout on any
non-`no-build` snippet fails the build: the report is returned, the
bundle withheld, and the previous output directory left untouched.
"""

from __future__ import annotations

import base64
import hashlib
import html
import json
import os
import re
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import games as games_mod
from .sexpr import print_sexpr
from .cache import CacheKey, CorruptEntry, ResultStore, make_key
from .config import LanguageConfigSet, load_config
from .mdscan import (
    InteractiveBlock,
    MarkdownSegment,
    extract_snippets,
    find_docs,
    rewrite_doc,
)
from .runner import (
    ExecutionResult,
    STATUS_SUCCESS,
    STATUS_TIMEOUT,
    probe_runtime_version,
    run_snippet,
)

DEFAULT_PARALLELISM_CAP = 8


class BuildError(Exception):
    pass


class BuildFailed(BuildError):
    def __init__(self, report: "BuildReport"):
        failed = ", ".join(f.snippet_id for f in report.failures)
        super().__init__(f"build failed: {failed}")
        self.report = report


@dataclass(frozen=True)
class BuildFailure:
    snippet_id: str
    location: str
    status: str
    diagnostics: str


@dataclass
class BuildReport:
    executed_count: int = 0
    cached_count: int = 0
    skipped_no_build_count: int = 0
    failures: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return bool(self.failures)


@dataclass(frozen=True)
class DocScan:
    rel_path: str
    text: str
    snippets: tuple


def default_parallelism() -> int:
    return min(os.cpu_count() or 1, DEFAULT_PARALLELISM_CAP)


def scan_docs(docs_root, config_set: LanguageConfigSet) -> list[DocScan]:
    docs_root = Path(docs_root)
    scans = []
    for path in find_docs(docs_root):
        rel = str(path.relative_to(docs_root))
        text = path.read_text(encoding="utf-8")
        snippets = tuple(extract_snippets(text, rel, config_set))
        scans.append(DocScan(rel, text, snippets))
    return scans


def _probe_versions(scans, config_set) -> dict:
    """Version string per label, for labels with snippets to execute."""
    needed = set()
    for scan in scans:
        for snippet in scan.snippets:
            config = config_set.lookup(snippet.label)
            if config is not None and config.build_config is not None \
                    and not snippet.no_build:
                needed.add(snippet.label)
    versions = {}
    for label in sorted(needed):
        config = config_set.lookup(label)
        versions[label] = probe_runtime_version(config.build_config)
    return versions


def _resolve(scans, config_set, versions, store: ResultStore, jobs: int,
             execute, report: BuildReport) -> dict:
    """Cache-or-run every executable snippet; returns id -> ExecutionResult."""
    pending = []   # (snippet, config) cache misses, in deterministic order
    results: dict[str, ExecutionResult] = {}
    keys: dict[str, CacheKey] = {}
    for scan in scans:
        for snippet in scan.snippets:
            config = config_set.lookup(snippet.label)
            if config is None or config.build_config is None:
                continue
            if snippet.no_build:
                report.skipped_no_build_count += 1
                continue
            key = make_key(snippet.code.encode("utf-8"),
                           config.name, versions[snippet.label])
            keys[snippet.id] = key
            try:
                cached = store.get(key)
            except CorruptEntry:
                cached = None  # soft miss: never fail a build the cold path would pass
            if cached is not None:
                results[snippet.id] = cached
                report.cached_count += 1
            else:
                pending.append((snippet, config))

    def work(item):
        snippet, config = item
        return snippet, run_one(snippet, config)

    def run_one(snippet, config):
        return execute(snippet, config.build_config,
                       runtime_name=config.name,
                       runtime_version=versions[snippet.label])

    if pending:
        with ThreadPoolExecutor(max_workers=max(jobs, 1)) as pool:
            outcomes = list(pool.map(work, pending))
        for snippet, result in outcomes:
            results[snippet.id] = result
            report.executed_count += 1
            if result.status != STATUS_TIMEOUT:
                store.put(keys[snippet.id], result)

    for scan in scans:
        for snippet in scan.snippets:
            result = results.get(snippet.id)
            if result is not None and result.status != STATUS_SUCCESS:
                diagnostics = result.diagnostics.strip() or result.output.strip()
                report.failures.append(BuildFailure(
                    snippet_id=snippet.id,
                    location=f"{snippet.path}:{snippet.line}",
                    status=result.status,
                    diagnostics=diagnostics,
                ))
    return results


def check(docs_root, config_path, cache_dir, jobs: int | None = None,
          execute=run_snippet) -> BuildReport:
    """Dry-run of build: executes and caches, but writes no bundle."""
    config_set = load_config(config_path)
    scans = scan_docs(docs_root, config_set)
    versions = _probe_versions(scans, config_set)
    store = ResultStore(cache_dir)
    report = BuildReport()
    _resolve(scans, config_set, versions, store,
             jobs or default_parallelism(), execute, report)
    return report


def build(docs_root, config_path, cache_dir, out_dir,
          jobs: int | None = None, execute=run_snippet) -> BuildReport:
    """Build the site bundle. Raises BuildFailed (report attached) on
    snippet failures, leaving any previous out_dir untouched."""
    config_set = load_config(config_path)
    scans = scan_docs(docs_root, config_set)
    versions = _probe_versions(scans, config_set)
    store = ResultStore(cache_dir)
    report = BuildReport()
    results = _resolve(scans, config_set, versions, store,
                       jobs or default_parallelism(), execute, report)
    if report.failed:
        raise BuildFailed(report)

    out_dir = Path(out_dir)
    staging = out_dir.parent / f".{out_dir.name}.staging"
    if staging.exists():
        shutil.rmtree(staging)
    staging.mkdir(parents=True)
    try:
        _emit_bundle(staging, docs_root, scans, config_set, results)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    _swap_dirs(staging, out_dir)
    return report


def _swap_dirs(staging: Path, out_dir: Path):
    if out_dir.exists():
        graveyard = out_dir.parent / f".{out_dir.name}.old"
        if graveyard.exists():
            shutil.rmtree(graveyard)
        out_dir.rename(graveyard)
        staging.rename(out_dir)
        shutil.rmtree(graveyard)
    else:
        out_dir.parent.mkdir(parents=True, exist_ok=True)
        staging.rename(out_dir)


# -- manifest ---------------------------------------------------------------


def manifest_entries(scans, config_set, results) -> dict:
    entries = {}
    for scan in scans:
        for snippet in scan.snippets:
            config = config_set.lookup(snippet.label)
            entry = {
                "codeDigest": hashlib.sha256(
                    snippet.code.encode("utf-8")).hexdigest(),
                "label": snippet.label,
                "readOnly": config.build_config is None,
                "alwaysEditable": snippet.freeform,
            }
            result = results.get(snippet.id)
            if result is not None and not snippet.no_build \
                    and config.build_config is not None:
                entry["output"] = result.output
            entries[snippet.id] = entry
    return entries


def emit_manifest(scans, config_set, results) -> str:
    """Manifest JSON text: sorted, timestamp-free, byte-stable."""
    entries = manifest_entries(scans, config_set, results)
    return json.dumps(entries, indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


# -- page rendering -----------------------------------------------------------


def _render_inline(text: str) -> str:
    """Inline markdown on already-escaped text: code, bold, italic, links."""
    text = re.sub(r"`([^`]+)`", r"<code>\1</code>", text)
    text = re.sub(r"\*\*([^*]+)\*\*", r"<strong>\1</strong>", text)
    text = re.sub(r"(?<!\*)\*([^*]+)\*(?!\*)", r"<em>\1</em>", text)
    text = re.sub(r"\[([^\]]+)\]\(([^)\s]+)\)", r'<a href="\2">\1</a>', text)
    return text


def render_markdown(text: str) -> str:
    """Small deterministic renderer for the constructs the corpus uses."""
    lines = text.split("\n")
    out: list[str] = []
    paragraph: list[str] = []
    list_tag: str | None = None

    def close_paragraph():
        if paragraph:
            out.append("<p>" + _render_inline(" ".join(paragraph)) + "</p>")
            paragraph.clear()

    def close_list():
        nonlocal list_tag
        if list_tag:
            out.append(f"</{list_tag}>")
            list_tag = None

    for raw in lines:
        line = raw.rstrip()
        stripped = line.strip()
        escaped = html.escape(stripped, quote=False)
        if not stripped:
            close_paragraph()
            close_list()
            continue
        heading = re.match(r"^(#{1,6})\s+(.*)$", stripped)
        if heading:
            close_paragraph()
            close_list()
            level = len(heading.group(1))
            body = _render_inline(html.escape(heading.group(2), quote=False))
            out.append(f"<h{level}>{body}</h{level}>")
            continue
        if re.match(r"^(-{3,}|\*{3,})$", stripped):
            close_paragraph()
            close_list()
            out.append("<hr>")
            continue
        bullet = re.match(r"^[-*]\s+(.*)$", stripped)
        ordered = re.match(r"^\d+\.\s+(.*)$", stripped)
        if bullet or ordered:
            close_paragraph()
            tag = "ul" if bullet else "ol"
            if list_tag != tag:
                close_list()
                out.append(f"<{tag}>")
                list_tag = tag
            body = (bullet or ordered).group(1)
            out.append("<li>" + _render_inline(html.escape(body, quote=False)) + "</li>")
            continue
        if stripped.startswith(">"):
            close_paragraph()
            close_list()
            body = stripped.lstrip("> ").strip()
            out.append("<blockquote><p>"
                       + _render_inline(html.escape(body, quote=False))
                       + "</p></blockquote>")
            continue
        close_list()
        paragraph.append(escaped)
    close_paragraph()
    close_list()
    return "\n".join(out)


def _attr(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return html.escape(str(value), quote=True)


def render_block(block: InteractiveBlock, highlight: str,
                 timeout_ms: int | None = None) -> str:
    attrs = {
        "data-snippet-id": block.snippet_id,
        "data-label": block.label,
        "data-highlight": highlight,
        "data-read-only": block.read_only,
        "data-always-editable": block.always_editable,
        "data-show-line-numbers": block.show_line_numbers,
        "data-no-build": block.no_build,
    }
    if timeout_ms is not None:
        attrs["data-timeout-ms"] = timeout_ms
    if block.discuss_url:
        attrs["data-discuss-url"] = block.discuss_url
    attr_text = " ".join(f'{key}="{_attr(value)}"' for key, value in attrs.items())
    parts = [f'<div class="smt-block" {attr_text}>']
    parts.append(f'<pre class="smt-code">{html.escape(block.code, quote=False)}</pre>')
    if block.output is not None:
        parts.append('<pre class="smt-output" data-status="success">'
                     + html.escape(block.output, quote=False) + "</pre>")
    parts.append("</div>")
    return "\n".join(parts)


_PAGE_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>{title}</title>
<link rel="stylesheet" href="{prefix}static/forge.css">
</head>
<body>
<nav class="site-nav"><a href="{prefix}index.html">SMT Forge</a></nav>
<main>
{content}
</main>
<script>window.__FORGE_PREFIX__ = "{prefix}";</script>
<script type="module" src="{prefix}static/forge.js"></script>
</body>
</html>
"""


def _doc_title(text: str, rel_path: str) -> str:
    for line in text.split("\n"):
        stripped = line.strip()
        if stripped.startswith("#"):
            return stripped.lstrip("#").strip()
    return Path(rel_path).stem


def render_page(scan: DocScan, config_set, results) -> str:
    outputs = {sid: result.output for sid, result in results.items()
               if result.status == STATUS_SUCCESS}
    doc = rewrite_doc(scan.text, scan.rel_path, config_set, outputs)
    pieces = []
    for node in doc.nodes:
        if isinstance(node, MarkdownSegment):
            pieces.append(render_markdown(node.text))
        else:
            config = config_set.lookup(node.label)
            timeout_ms = (config.build_config.timeout_ms
                          if config.build_config is not None else None)
            pieces.append(render_block(node, config.highlight, timeout_ms))
    depth = scan.rel_path.count("/")
    return _PAGE_TEMPLATE.format(
        title=html.escape(_doc_title(scan.text, scan.rel_path), quote=False),
        prefix="../" * depth,
        content="\n".join(pieces),
    )


def _render_index(scans) -> str:
    items = []
    for scan in scans:
        target = scan.rel_path[:-3] + ".html"
        title = html.escape(_doc_title(scan.text, scan.rel_path), quote=False)
        items.append(f'<li><a href="{target}">{title}</a></li>')
    game_link = '<li><a href="games.html">Guess the Secret Formula</a></li>'
    content = "<h1>SMT Forge</h1>\n<ul>\n" + "\n".join(items + [game_link]) + "\n</ul>"
    return _PAGE_TEMPLATE.format(title="SMT Forge", prefix="", content=content)


def _render_games_page(specs) -> str:
    pieces = ["<h1>Guess the Secret Formula</h1>"]
    for spec in specs:
        pieces.append(
            f'<section class="game" data-game-id="{_attr(spec["id"])}">\n'
            f'<h2>{html.escape(spec["title"], quote=False)}</h2>\n'
            f'<p>{html.escape(spec["description"], quote=False)}</p>\n'
            f'<div class="game-editor" data-game-id="{_attr(spec["id"])}"></div>\n'
            "</section>")
    return _PAGE_TEMPLATE.format(title="Guess the Secret Formula",
                                 prefix="", content="\n".join(pieces))


# -- bundle -------------------------------------------------------------------


def _encode_game(path: Path) -> dict:
    """Bundle form of a game spec: the secret ships base64-encoded, so it
    is not casually readable in the page source yet stays client-decodable."""
    spec = games_mod.load_game(path)
    return {
        "id": spec.id,
        "title": spec.title,
        "description": spec.description,
        "declarations": [{"name": n, "sort": s} for n, s in spec.declarations],
        "secretEncoded": base64.b64encode(
            print_sexpr(spec.secret).encode("utf-8")).decode("ascii"),
        "maxRows": spec.max_rows,
    }


def _emit_bundle(staging: Path, docs_root, scans, config_set, results):
    for scan in scans:
        page_path = staging / (scan.rel_path[:-3] + ".html")
        page_path.parent.mkdir(parents=True, exist_ok=True)
        page_path.write_text(render_page(scan, config_set, results),
                             encoding="utf-8")
    (staging / "manifest.json").write_text(
        emit_manifest(scans, config_set, results), encoding="utf-8")

    static_src = Path(__file__).parent / "static"
    static_dst = staging / "static"
    static_dst.mkdir(parents=True, exist_ok=True)
    for asset in sorted(static_src.iterdir()):
        if asset.is_file():
            shutil.copyfile(asset, static_dst / asset.name)

    games_dir = Path(docs_root) / "games"
    specs = []
    if games_dir.is_dir():
        out_games = staging / "games"
        out_games.mkdir(parents=True, exist_ok=True)
        for game_path in sorted(games_dir.glob("*.json")):
            encoded = _encode_game(game_path)
            specs.append(encoded)
            (out_games / f"{encoded['id']}.json").write_text(
                json.dumps(encoded, indent=2, sort_keys=True,
                           ensure_ascii=False) + "\n",
                encoding="utf-8")
        (out_games / "index.json").write_text(
            json.dumps([{"id": s["id"], "title": s["title"]} for s in specs],
                       indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8")
    (staging / "games.html").write_text(_render_games_page(specs),
                                        encoding="utf-8")
    (staging / "index.html").write_text(_render_index(scans), encoding="utf-8")
