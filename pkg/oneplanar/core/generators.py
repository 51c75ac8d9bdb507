import random
from enum import Enum
from itertools import combinations
from typing import Any, Dict, List, Optional

from oneplanar.core.graph import Edge, Graph, make_edge
from oneplanar.utils import logger


class Family(str, Enum):
    """Fixture families understood by `generate`."""
    COMPLETE = "complete"
    COMPLETE_BIPARTITE = "completeBipartite"
    CYCLE = "cycle"
    PATH = "path"
    THETA = "theta"
    CUBIC_HALIN = "cubicHalin"
    RANDOM = "random"
    RANDOM_WITH_COVER = "randomWithCover"
    RANDOM_WITH_CYCLOMATIC = "randomWithCyclomatic"
    COGRAPH_FROM_RANDOM_COTREE = "cographFromRandomCotree"


def _require(params: Dict[str, Any], name: str, minimum: int) -> int:
    if name not in params:
        raise ValueError(f"missing parameter {name!r}")
    value = int(params[name])
    if value < minimum:
        raise ValueError(f"parameter {name!r} must be >= {minimum}, got {value}")
    return value


def generate(family: str, params: Optional[Dict[str, Any]] = None, seed: int = 0) -> Graph:
    """Build a fixture graph; deterministic for a fixed seed."""
    family = Family(family)
    params = params or {}
    rng = random.Random(seed)

    if family == Family.COMPLETE:
        n = _require(params, "n", 0)
        return Graph(n, frozenset(combinations(range(n), 2)))

    if family == Family.COMPLETE_BIPARTITE:
        a = _require(params, "a", 0)
        b = _require(params, "b", 0)
        return Graph(a + b, frozenset((i, a + j) for i in range(a) for j in range(b)))

    if family == Family.CYCLE:
        n = _require(params, "n", 3)
        return Graph(n, frozenset(make_edge(i, (i + 1) % n) for i in range(n)))

    if family == Family.PATH:
        n = _require(params, "n", 1)
        return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))

    if family == Family.THETA:
        length = _require(params, "pathLength", 1)
        branches = int(params.get("paths", 3))
        if branches < 1 or (length == 1 and branches > 1):
            raise ValueError("a theta graph needs pathLength >= 2 when it has several paths")
        edges = set()
        n = 2
        for _ in range(branches):
            prev = 0
            for _ in range(length - 1):
                edges.add(make_edge(prev, n))
                prev = n
                n += 1
            edges.add(make_edge(prev, 1))
        return Graph(n, frozenset(edges))

    if family == Family.CUBIC_HALIN:
        return _cubic_halin(_require(params, "k", 3))

    if family == Family.RANDOM:
        n = _require(params, "n", 0)
        m = _require(params, "m", 0)
        pool = list(combinations(range(n), 2))
        if m > len(pool):
            raise ValueError(f"{m} edges do not fit on {n} vertices")
        return Graph(n, frozenset(rng.sample(pool, m)))

    if family == Family.RANDOM_WITH_COVER:
        n = _require(params, "n", 1)
        k = _require(params, "k", 1)
        p = float(params.get("p", 0.5))
        if k > n:
            raise ValueError("cover size exceeds vertex count")
        edges = {(u, v) for u, v in combinations(range(k), 2) if rng.random() < p}
        for w in range(k, n):
            hubs = [c for c in range(k) if rng.random() < p] or [rng.randrange(k)]
            edges.update((c, w) for c in hubs)
        return Graph(n, frozenset(edges))

    if family == Family.RANDOM_WITH_CYCLOMATIC:
        n = _require(params, "n", 1)
        k = _require(params, "k", 0)
        edges = {make_edge(v, rng.randrange(v)) for v in range(1, n)}
        spare = [e for e in combinations(range(n), 2) if e not in edges]
        if k > len(spare):
            raise ValueError(f"cannot add {k} extra edges on {n} vertices")
        edges.update(rng.sample(spare, k))
        return Graph(n, frozenset(edges))

    # cographFromRandomCotree
    n = _require(params, "n", 1)
    edges: set = set()
    _random_cotree_edges(list(range(n)), rng.random() < 0.5, rng, edges)
    logger.debug("cograph_generated", n=n, m=len(edges), seed=seed)
    return Graph(n, frozenset(edges))


def _cubic_halin(k: int) -> Graph:
    """Halin graph over a caterpillar with k leaves: cubic, 2k - 2 vertices."""
    if k < 3:
        raise ValueError("a cubic Halin graph needs k >= 3 leaves")
    spine = list(range(k - 2))
    edges = {(i, i + 1) for i in range(len(spine) - 1)}
    leaves: List[int] = []
    nxt = len(spine)

    def attach(parent: int) -> None:
        nonlocal nxt
        edges.add((parent, nxt))
        leaves.append(nxt)
        nxt += 1

    if len(spine) == 1:
        for _ in range(3):
            attach(spine[0])
    else:
        # leaves are attached in the planar order they appear around the caterpillar
        attach(spine[0])
        for s in spine[1:-1]:
            attach(s)
        attach(spine[-1])
        attach(spine[-1])
        attach(spine[0])
    cycle = {make_edge(leaves[i], leaves[(i + 1) % k]) for i in range(k)}
    return Graph(nxt, frozenset(edges | cycle))


def _random_cotree_edges(vertices: List[int], join: bool, rng: random.Random, edges: set) -> None:
    """Split the vertices into random groups under a 0/1 node, alternating labels."""
    if len(vertices) <= 1:
        return
    parts = rng.randint(2, min(4, len(vertices)))
    rng.shuffle(vertices)
    cuts = sorted(rng.sample(range(1, len(vertices)), parts - 1))
    groups = [vertices[i:j] for i, j in zip([0] + cuts, cuts + [len(vertices)])]
    if join:
        for a, b in combinations(range(len(groups)), 2):
            edges.update(make_edge(u, v) for u in groups[a] for v in groups[b])
    for group in groups:
        _random_cotree_edges(group, not join, rng, edges)
