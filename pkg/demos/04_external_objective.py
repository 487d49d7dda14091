"""Plugging in a real measurement backend through the subprocess protocol.

Any program that reads one JSON object from stdin and prints one number can
serve as the objective.  This demo writes a toy evaluator script to a
temporary directory and tunes against it; failures (nonzero exit, garbage
output, timeouts) score 0 and never abort the run.
"""

import shlex
import sys
import tempfile
from pathlib import Path

from topotune import EngineConfig, ExternalEvaluator, Factorization, SearchSpace, run

EVALUATOR = '''
import json, sys

config = json.load(sys.stdin)["params"]
tile = config["tile"]
# Pretend measurement: balanced tiles run fastest, and one tile shape
# "fails to compile".
if tile == [4, 2, 1]:
    sys.exit(1)
spread = max(tile) / min(tile)
print(8.0 / spread)
'''

with tempfile.TemporaryDirectory() as tmp:
    script = Path(tmp) / "measure.py"
    script.write_text(EVALUATOR)
    command = f"{shlex.quote(sys.executable)} {shlex.quote(str(script))}"

    space = SearchSpace([("tile", Factorization(8, 3))])
    objective = ExternalEvaluator(command, space, timeout_ms=5000)

    best, records = run(space, EngineConfig(parents=4, offspring=4, budget=10, seed=1), objective)

    print(f"evaluator: {command}\n")
    for rec in records:
        note = "  <- invalid (nonzero exit)" if rec.fitness == 0.0 else ""
        print(f"trial {rec.trial:2d}  {rec.config['tile']}  fitness {rec.fitness:.3f}{note}")
    print(f"\nbest: {space.config_to_json(best.config)} fitness {best.fitness:.3f}")
