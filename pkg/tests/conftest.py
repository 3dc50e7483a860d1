from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def kappa():
    """Equivalence bands recorded by ``scripts/calibrate_kappa.py``."""
    return json.loads((DATA / "kappa.json").read_text())
