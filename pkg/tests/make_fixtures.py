"""Regenerate the frozen demo error tables.

Run from the repository root after an intentional change to the demos:

    python3 tests/make_fixtures.py

The acceptance suite compares live sweep output against these tables, so
regenerate only after revalidating the demo configurations by hand.
"""
import json
import tempfile
from pathlib import Path

from qwalklab import ExperimentConfig, run_sweep, write_demo
from qwalklab.experiment import DEMO_NAMES

FIXTURE_PATH = Path(__file__).parent / "fixtures" / "demo_errors.json"


def demo_table(name: str) -> dict:
    with tempfile.TemporaryDirectory() as tmp:
        config = ExperimentConfig.from_file(write_demo(name, tmp))
        report = run_sweep(config).report
    return {
        "h": [row["h"] for row in report["rows"]],
        "generator_gap": [row["generator_gap"] for row in report["rows"]],
        "max_error": [row["max_error"] for row in report["rows"]],
        "errors": [row["errors"] for row in report["rows"]],
        "error_slope_tail": report["error_slope_tail"],
        "gap_slope": report["gap_slope"],
    }


def main() -> None:
    FIXTURE_PATH.parent.mkdir(parents=True, exist_ok=True)
    tables = {name: demo_table(name) for name in DEMO_NAMES}
    FIXTURE_PATH.write_text(json.dumps(tables, indent=1, sort_keys=True) + "\n")
    print(f"wrote {FIXTURE_PATH}")


if __name__ == "__main__":
    main()
