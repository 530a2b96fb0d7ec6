"""Content-addressed result store."""

import json
import threading

import pytest

from smt_forge.cache import (
    CorruptEntry,
    META_FILENAME,
    ResultStore,
    make_key,
)
from smt_forge.runner import ExecutionResult

# sha256("(check-sat)" || 0x00 || "Z3" || 0x00 || "4.12.2"), computed once
# with hashlib directly and frozen here as the golden value.
GOLDEN_DIGEST = "debf73ecfeac2e4839410ac877927522cf9ad69bf62789447739cb1794b9abbc"


def result(output="sat\n", status="success") -> ExecutionResult:
    return ExecutionResult(status=status, output=output, diagnostics="",
                           elapsed_ms=12, runtime_name="Z3",
                           runtime_version="4.12.2")


def test_golden_digest():
    key = make_key(b"(check-sat)", "Z3", "4.12.2")
    assert key.digest == GOLDEN_DIGEST
    assert len(key.digest) == 64


def test_key_deterministic():
    assert make_key(b"abc", "Z3", "1") == make_key(b"abc", "Z3", "1")


def test_trailing_newline_changes_key():
    assert make_key(b"(check-sat)", "Z3", "1") != make_key(b"(check-sat)\n", "Z3", "1")


def test_name_and_version_feed_the_key():
    base = make_key(b"c", "Z3", "1")
    assert base != make_key(b"c", "Z4", "1")
    assert base != make_key(b"c", "Z3", "2")


def test_separator_prevents_field_bleed():
    # ("ab", "c") and ("a", "bc") must not collide
    assert make_key(b"ab", "c", "v") != make_key(b"a", "bc", "v")


def test_round_trip(tmp_path):
    store = ResultStore(tmp_path / "cache")
    key = make_key(b"code", "Z3", "1")
    stored = result(output="unsat\n")
    store.put(key, stored)
    loaded = store.get(key)
    assert loaded == stored  # createdAt is not part of the result


def test_fresh_store_misses(tmp_path):
    store = ResultStore(tmp_path / "cache")
    assert store.get(make_key(b"nothing", "Z3", "1")) is None


def test_double_put_idempotent(tmp_path):
    store = ResultStore(tmp_path / "cache")
    key = make_key(b"code", "Z3", "1")
    store.put(key, result())
    store.put(key, result())
    assert store.get(key) == result()


def test_corrupt_entry_raises(tmp_path):
    store = ResultStore(tmp_path / "cache")
    key = make_key(b"code", "Z3", "1")
    store.put(key, result())
    entry_path = tmp_path / "cache" / key.digest[:2] / f"{key.digest}.json"
    entry_path.write_text(entry_path.read_text()[: 10], encoding="utf-8")
    with pytest.raises(CorruptEntry):
        store.get(key)


def test_clear_counts_and_empties(tmp_path):
    store = ResultStore(tmp_path / "cache")
    for i in range(3):
        store.put(make_key(f"code{i}".encode(), "Z3", "1"), result())
    assert store.clear() == 3
    assert store.clear() == 0
    assert store.get(make_key(b"code0", "Z3", "1")) is None


def test_metadata_records_algorithm(tmp_path):
    ResultStore(tmp_path / "cache")
    meta = json.loads((tmp_path / "cache" / META_FILENAME).read_text())
    assert meta["hashAlgorithm"] == "sha256"


def test_entry_file_schema(tmp_path):
    store = ResultStore(tmp_path / "cache")
    key = make_key(b"code", "Z3", "1")
    store.put(key, result())
    raw = json.loads((tmp_path / "cache" / key.digest[:2]
                      / f"{key.digest}.json").read_text())
    assert set(raw) == {"status", "output", "diagnostics", "elapsedMs",
                        "runtimeName", "runtimeVersion", "createdAt"}


def test_concurrent_puts_leave_one_valid_entry(tmp_path):
    store = ResultStore(tmp_path / "cache")
    key = make_key(b"code", "Z3", "1")
    barrier = threading.Barrier(8)

    def writer(i):
        barrier.wait()
        for _ in range(20):
            store.put(key, result())

    threads = [threading.Thread(target=writer, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert store.get(key) == result()  # parses, equals either write
