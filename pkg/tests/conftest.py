import numpy as np
import pytest


def brute_gram_counts(rows):
    """Integer P P^T by explicit loops; independent of the numpy paths."""
    rows = [list(map(int, r)) for r in rows]
    return [[sum(a * b for a, b in zip(ri, rj)) for rj in rows] for ri in rows]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
