"""pytest fixtures."""

import numpy as np
import pytest

from h3bound.helpers import HPoint


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test run draws the same cases."""
    return np.random.default_rng(20240601)


@pytest.fixture
def origin() -> HPoint:
    """Center of the ball."""
    return HPoint.origin()
