"""Bundled reference SMT-LIB runtime.

Drives the interactive sessions and build-time snippet execution when no
external solver binary is configured. Invoke as a subprocess with
``python3 -m smt_forge.refsolver``: commands on stdin, responses on
stdout, exit code 1 if any command errored.
"""

from .core import Interpreter, SolverError, SOLVER_NAME, SOLVER_VERSION

__all__ = ["Interpreter", "SolverError", "SOLVER_NAME", "SOLVER_VERSION"]
