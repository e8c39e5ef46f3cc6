"""Canned scenario outputs as text, shared by the golden-trace check and tools/regen_golden.py."""
from pathlib import Path

from dcsim.harness import run_canned, sweep_csv, trace_csv
from dcsim.scenarios import CATALOG

GOLDEN_DIR = Path(__file__).parent / "golden"


def canned_outputs(name: str) -> dict:
    """Output stem -> CSV text for one catalog entry, run with its own seed."""
    out = {}
    for stem, result in run_canned(name).items():
        out[stem] = sweep_csv(result) if isinstance(result, list) else trace_csv(result.trace)
    return out


def all_names() -> list:
    return [entry.name for entry in CATALOG]
