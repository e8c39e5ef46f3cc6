"""Rewrite tests/golden/*.csv from the current simulator.

Run only after an intentional behaviour change, then review the diff:

    python tools/regen_golden.py [scenario ...]
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from golden_util import GOLDEN_DIR, all_names, canned_outputs  # noqa: E402


def main(names):
    GOLDEN_DIR.mkdir(exist_ok=True)
    for name in names or all_names():
        for stem, text in canned_outputs(name).items():
            path = GOLDEN_DIR / f"{stem}.csv"
            path.write_text(text)
            print(f"wrote {path} ({len(text.splitlines()) - 1} rows)")


if __name__ == "__main__":
    main(sys.argv[1:])
