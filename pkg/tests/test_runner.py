"""Snippet execution: classification, timeout enforcement, version probing."""

import sys
import time

import pytest

from smt_forge.config import ExecutionPolicy
from smt_forge.mdscan import Snippet
from smt_forge.runner import (
    EmptyVersion,
    GRACE_MS,
    OUTPUT_LIMIT,
    RuntimeUnavailable,
    TRUNCATION_MARK,
    probe_runtime_version,
    run_snippet,
)

PY = sys.executable


def snippet(code: str) -> Snippet:
    return Snippet(id="t.md#0", label="z3", flags=frozenset(), code=code,
                   path="t.md", line=1)


def policy(runner, timeout_ms=5000, version=None) -> ExecutionPolicy:
    return ExecutionPolicy(
        timeout_ms=timeout_ms,
        runner_command=tuple(runner),
        version_command=tuple(version or [PY, "-c", "print('fake 1.0')"]),
    )


ECHO_RUNNER = [PY, "-c", "import sys; sys.stdout.write(sys.stdin.read())"]
FAIL_RUNNER = [PY, "-c", "import sys; sys.stderr.write('boom\\n'); sys.exit(3)"]
SLEEP_RUNNER = [PY, "-c", "import time; time.sleep(10)"]
STUBBORN_RUNNER = [PY, "-c",
                   "import signal, time\n"
                   "signal.signal(signal.SIGTERM, signal.SIG_IGN)\n"
                   "time.sleep(30)"]


def run(code, pol):
    return run_snippet(snippet(code), pol, runtime_name="Z3",
                       runtime_version="1.0")


def test_success_captures_stdout():
    result = run("(declare-const p Bool)(assert p)(check-sat)",
                 policy(ECHO_RUNNER))
    assert result.status == "success"
    assert result.output == "(declare-const p Bool)(assert p)(check-sat)"
    assert result.runtime_name == "Z3"
    assert result.runtime_version == "1.0"


def test_solver_runner_reports_sat():
    solver = [PY, "-m", "smt_forge.refsolver"]
    result = run("(declare-const p Bool)(assert p)(check-sat)", policy(solver))
    assert result.status == "success"
    assert result.output.strip() == "sat"


def test_nonzero_exit_is_error():
    result = run("anything", policy(FAIL_RUNNER))
    assert result.status == "error"
    assert "boom" in result.diagnostics


def test_timeout_classification_and_bounds():
    started = time.monotonic()
    result = run("anything", policy(SLEEP_RUNNER, timeout_ms=1000))
    wall_ms = (time.monotonic() - started) * 1000
    assert result.status == "timeout"
    assert 1000 <= result.elapsed_ms <= 1000 + GRACE_MS
    assert wall_ms < 1000 + GRACE_MS + 1000  # returned promptly after terminate


def test_timeout_kills_signal_ignoring_runner():
    started = time.monotonic()
    result = run("anything", policy(STUBBORN_RUNNER, timeout_ms=500))
    wall_ms = (time.monotonic() - started) * 1000
    assert result.status == "timeout"
    assert result.elapsed_ms <= 500 + GRACE_MS
    assert wall_ms < 500 + GRACE_MS + 1500


def test_missing_runner_is_runtime_unavailable():
    with pytest.raises(RuntimeUnavailable):
        run("x", policy(["/nonexistent/runner-binary"]))


def test_determinism_for_deterministic_runner():
    pol = policy(ECHO_RUNNER)
    first = run("same input", pol)
    second = run("same input", pol)
    assert (first.status, first.output) == (second.status, second.output)


def test_timeout_env_var_exported():
    reader = [PY, "-c", "import os; print(os.environ['SMT_FORGE_TIMEOUT_MS'])"]
    result = run("ignored", policy(reader, timeout_ms=7777))
    assert result.output.strip() == "7777"


def test_output_truncated_with_marker():
    noisy = [PY, "-c", f"import sys; sys.stdout.write('x' * {OUTPUT_LIMIT * 2})"]
    result = run("ignored", policy(noisy))
    assert result.output.endswith(TRUNCATION_MARK)
    assert len(result.output) < OUTPUT_LIMIT * 2


def test_probe_version_first_line():
    pol = policy(ECHO_RUNNER,
                 version=[PY, "-c", "print(); print('  Z3 version 4.12.2 - 64 bit  '); print('junk')"])
    assert probe_runtime_version(pol) == "Z3 version 4.12.2 - 64 bit"


def test_probe_version_of_bundled_solver():
    pol = policy(ECHO_RUNNER,
                 version=[PY, "-m", "smt_forge.refsolver", "--version"])
    version = probe_runtime_version(pol)
    assert version.startswith("smt-forge-refsolver ")


def test_probe_missing_command_unavailable():
    pol = policy(ECHO_RUNNER, version=["/no/such/binary", "--version"])
    with pytest.raises(RuntimeUnavailable):
        probe_runtime_version(pol)


def test_probe_nonzero_exit_unavailable():
    pol = policy(ECHO_RUNNER, version=[PY, "-c", "import sys; sys.exit(2)"])
    with pytest.raises(RuntimeUnavailable):
        probe_runtime_version(pol)


def test_probe_empty_output_is_empty_version():
    pol = policy(ECHO_RUNNER, version=[PY, "-c", "pass"])
    with pytest.raises(EmptyVersion):
        probe_runtime_version(pol)
