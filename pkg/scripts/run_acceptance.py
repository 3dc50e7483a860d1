"""Run the acceptance criteria and print one PASS/FAIL line each.

    python scripts/run_acceptance.py [extra pytest args]
"""
from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    sys.exit(pytest.main([str(ROOT / "tests" / "test_acceptance.py"), "-q", *sys.argv[1:]]))
