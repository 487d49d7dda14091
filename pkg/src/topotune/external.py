"""Subprocess objective protocol for real measurement backends.

One process per configuration: the configuration is written to the child's
standard input as a single JSON object ``{"params": {name: value, ...}}``
and the child replies with one non-negative decimal number on standard
output.  Any failure to produce a usable number (nonzero exit, garbage
output, negative value, timeout) scores the configuration 0 -- an invalid
evaluation, not an error.  Only a missing or unspawnable program aborts the
run, since no configuration could ever be measured.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess

from .engine import FatalEvaluationError
from .spaces import SearchSpace

DEFAULT_TIMEOUT_MS = 10_000


class EvaluatorSpawnError(FatalEvaluationError):
    """The evaluator program could not be started at all."""


class ExternalEvaluator:
    """Callable objective that shells out to a measurement command.

    The command string is split with shell-like quoting rules and run without
    a shell.  Instances are stateless between calls and safe to invoke from
    multiple threads concurrently (one subprocess each).
    """

    def __init__(
        self,
        command: str,
        space: SearchSpace,
        timeout_ms: int = DEFAULT_TIMEOUT_MS,
    ) -> None:
        self.argv = shlex.split(command)
        if not self.argv:
            raise ValueError("evaluator command is empty")
        self.space = space
        if timeout_ms <= 0:
            raise ValueError(f"timeout_ms must be positive, got {timeout_ms}")
        self.timeout_s = timeout_ms / 1000.0

    def __call__(self, config: tuple) -> float:
        payload = json.dumps({"params": self.space.config_to_json(config)}) + "\n"
        try:
            proc = subprocess.run(
                self.argv,
                input=payload,
                capture_output=True,
                text=True,
                timeout=self.timeout_s,
            )
        except subprocess.TimeoutExpired:
            return 0.0
        except OSError as err:
            raise EvaluatorSpawnError(
                f"could not start evaluator {self.argv[0]!r}: {err}"
            ) from err
        if proc.returncode != 0:
            return 0.0
        try:
            fitness = float(proc.stdout.strip().splitlines()[-1])
        except (ValueError, IndexError):
            return 0.0
        if not (math.isfinite(fitness) and fitness >= 0.0):
            return 0.0
        return fitness
