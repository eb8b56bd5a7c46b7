import numpy as np
import pytest

from todamirror.reps import fundamental_family

ALL_TYPES = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("C", 2), ("G", 2)]


@pytest.fixture(scope="session")
def families():
    """All desk-scope families, built once per session."""
    return {f"{s}{r}": fundamental_family(s, r) for s, r in ALL_TYPES}


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
