"""Load a YAML scenario, run it and summarise the report.

    python demos/run_config.py demos/scenarios/opt3a_duplicate.yaml

The same file works with the command line tool: ``dcsim run <file>``.
"""
import json
import sys
from pathlib import Path

from dcsim import load_config, run_scenario

path = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "scenarios" / "opt3a_duplicate.yaml")
report = run_scenario(load_config(path))
print(json.dumps({"totals": report.totals, "availability": report.availability}, indent=2))
