import itertools

import numpy as np
import pytest


def brute_potential(graph, x):
    """Pair-by-pair count of ordered (i, j), i != j, that disagree or are non-adjacent."""
    total = 0
    for i, j in itertools.permutations(range(graph.n), 2):
        if x[i] != x[j] or j not in graph.adjacency[i]:
            total += 1
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
