"""Snippet execution through external runners, with a hard wall clock.

Runner contract: snippet code arrives on stdin (UTF-8), output is read
from stdout, exit 0 means success. SMT_FORGE_TIMEOUT_MS is exported for
runners that want to self-limit. At timeoutMs the runner gets a polite
terminate; GRACE_MS later it is killed outright, so run_snippet returns
for every input, including runners that ignore signals.
"""

from __future__ import annotations

import os
import subprocess
import time
from dataclasses import dataclass

from .config import ExecutionPolicy

GRACE_MS = 2000
OUTPUT_LIMIT = 65536
TRUNCATION_MARK = "…[truncated]"

STATUS_SUCCESS = "success"
STATUS_ERROR = "error"
STATUS_TIMEOUT = "timeout"


class RunnerError(Exception):
    pass


class RuntimeUnavailable(RunnerError):
    """The runner or version command itself is broken: configuration
    problem, aborts the build immediately (unlike a snippet failure)."""


class EmptyVersion(RunnerError):
    pass


@dataclass(frozen=True)
class ExecutionResult:
    status: str              # success | error | timeout
    output: str              # captured stdout, possibly truncated
    diagnostics: str         # captured stderr, possibly truncated
    elapsed_ms: int
    runtime_name: str
    runtime_version: str


def _truncate(text: str) -> str:
    if len(text.encode("utf-8", errors="replace")) <= OUTPUT_LIMIT:
        return text
    clipped = text.encode("utf-8", errors="replace")[:OUTPUT_LIMIT]
    return clipped.decode("utf-8", errors="ignore") + TRUNCATION_MARK


def probe_runtime_version(policy: ExecutionPolicy) -> str:
    """First non-empty output line of the version command, stripped."""
    try:
        proc = subprocess.run(
            list(policy.version_command),
            capture_output=True,
            timeout=max(policy.timeout_ms, 10000) / 1000,
        )
    except FileNotFoundError as exc:
        raise RuntimeUnavailable(
            f"version command not found: {policy.version_command[0]}") from exc
    except subprocess.TimeoutExpired as exc:
        raise RuntimeUnavailable("version command timed out") from exc
    if proc.returncode != 0:
        raise RuntimeUnavailable(
            f"version command exited with {proc.returncode}: "
            f"{proc.stderr.decode('utf-8', errors='replace').strip()}")
    for raw_line in proc.stdout.decode("utf-8", errors="replace").splitlines():
        line = raw_line.strip()
        if line:
            return line
    raise EmptyVersion("version command printed nothing")


def run_snippet(snippet, policy: ExecutionPolicy, *,
                runtime_name: str, runtime_version: str) -> ExecutionResult:
    """Run one snippet. Classification is total: success, error, or timeout."""
    env = dict(os.environ)
    env["SMT_FORGE_TIMEOUT_MS"] = str(policy.timeout_ms)
    code = snippet.code if isinstance(snippet, str) else snippet.code
    started = time.monotonic()
    try:
        proc = subprocess.Popen(
            list(policy.runner_command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            env=env,
        )
    except FileNotFoundError as exc:
        raise RuntimeUnavailable(
            f"runner not found: {policy.runner_command[0]}") from exc

    timed_out = False
    try:
        out, err = proc.communicate(code.encode("utf-8"),
                                    timeout=policy.timeout_ms / 1000)
    except subprocess.TimeoutExpired:
        timed_out = True
        proc.terminate()
        try:
            out, err = proc.communicate(timeout=GRACE_MS / 1000)
        except subprocess.TimeoutExpired:
            proc.kill()
            out, err = proc.communicate()

    elapsed_ms = round((time.monotonic() - started) * 1000)
    if timed_out:
        status = STATUS_TIMEOUT
        # reaping overhead is not execution time: keep the documented bound
        elapsed_ms = min(max(elapsed_ms, policy.timeout_ms),
                         policy.timeout_ms + GRACE_MS)
    else:
        status = STATUS_SUCCESS if proc.returncode == 0 else STATUS_ERROR
    return ExecutionResult(
        status=status,
        output=_truncate(out.decode("utf-8", errors="replace")),
        diagnostics=_truncate(err.decode("utf-8", errors="replace")),
        elapsed_ms=elapsed_ms,
        runtime_name=runtime_name,
        runtime_version=runtime_version,
    )
