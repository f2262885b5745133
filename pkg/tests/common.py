"""Helpers shared by the test packages."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

FIXTURES_DIR = Path(__file__).parent / "h3bound" / "fixtures"


def load_fixture(filename: str) -> str:
    """Return the text of a fixture file."""
    return (FIXTURES_DIR / filename).read_text(encoding="utf-8")


def load_cases(filename: str) -> list[dict[str, Any]]:
    """Return the test_cases list of a JSON fixture."""
    return json.loads(load_fixture(filename))["test_cases"]
