import random
from itertools import combinations

import networkx as nx
import pytest

from oneplanar.core.generators import generate
from oneplanar.core.graph import Graph


def complete(n: int) -> Graph:
    return generate("complete", {"n": n})


def bipartite(a: int, b: int) -> Graph:
    return generate("completeBipartite", {"a": a, "b": b})


def atlas_graphs(max_n: int = 6):
    """All graphs of the networkx atlas with 1..max_n vertices."""
    for G in nx.graph_atlas_g():
        if 0 < G.number_of_nodes() <= max_n:
            yield Graph.from_networkx(G)


def random_sparse(rng: random.Random, n: int, max_m: int = 0) -> Graph:
    pool = list(combinations(range(n), 2))
    m = rng.randint(n, min(len(pool), max_m or 4 * n - 8))
    return Graph(n, frozenset(rng.sample(pool, m)))


@pytest.fixture
def k5() -> Graph:
    return complete(5)


@pytest.fixture
def k6() -> Graph:
    return complete(6)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)
