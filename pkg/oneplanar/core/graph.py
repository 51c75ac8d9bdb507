from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from oneplanar.utils import logger

Edge = Tuple[int, int]


def make_edge(u: int, v: int) -> Edge:
    """Normalize an unordered vertex pair."""
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on the dense vertex ids 0..n-1.

    Graphs are immutable: every reduction builds a new one.
    """
    n: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {self.n}")
        raw = list(self.edges)
        normalized = set()
        for e in raw:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} has an endpoint outside [0, {self.n})")
            key = make_edge(u, v)
            if key in normalized:
                raise ValueError(f"parallel edge {key}")
            normalized.add(key)
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_networkx(cls, G: nx.Graph) -> "Graph":
        """Relabel the nodes of G to 0..n-1 in sorted order."""
        nodes = sorted(G.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls(len(nodes), frozenset(make_edge(index[u], index[v]) for u, v in G.edges()))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def edge_index(self) -> Dict[Edge, int]:
        return {e: i for i, e in enumerate(self.sorted_edges)}

    @cached_property
    def adjacency(self) -> Tuple[FrozenSet[int], ...]:
        adj: List[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return make_edge(u, v) in self.edges

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.sorted_edges)
        return G

    @cached_property
    def nx_graph(self) -> nx.Graph:
        """Frozen networkx copy shared by read-only queries; to_networkx() gives a mutable one."""
        return nx.freeze(self.to_networkx())

    def components_within(self, vertices: Iterable[int]) -> List[List[int]]:
        """Components of the subgraph induced by vertices, each sorted, ordered by least vertex."""
        parts = nx.connected_components(self.nx_graph.subgraph(vertices))
        return sorted((sorted(part) for part in parts), key=lambda part: part[0])

    def components(self) -> List[List[int]]:
        """Connected components (isolated vertices included)."""
        return self.components_within(range(self.n))

    def induced(self, vertices: Iterable[int]) -> Tuple["Graph", Tuple[int, ...]]:
        """Induced subgraph, compacted; returns it with the map new id -> old id."""
        origin = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(origin)}
        edges = frozenset(
            make_edge(index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        )
        return Graph(len(origin), edges), origin

    def with_edges(self, extra: Iterable[Edge]) -> "Graph":
        return Graph(self.n, self.edges | {make_edge(u, v) for u, v in extra})

    def without_edges(self, removed: Iterable[Edge]) -> "Graph":
        return Graph(self.n, self.edges - {make_edge(u, v) for u, v in removed})


# ---------------------------------------------------------------------------
# Lift plan records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeafRemoval:
    vertex: int
    neighbor: Optional[int]          # None when the vertex was isolated


@dataclass(frozen=True)
class GroupTruncation:
    group_id: int
    hubs: Edge
    removed: Tuple[int, ...]
    anchor: int

    @property
    def removed_count(self) -> int:
        return len(self.removed)


@dataclass(frozen=True)
class PathTruncation:
    path_id: int
    endpoints: Tuple[int, int]
    interior: Tuple[int, ...]        # original interior, in walk order from endpoints[0]
    kept: int

    @property
    def kernel_edge(self) -> Edge:
        """The kernel edge that stands for the cut-off tail of the path."""
        return make_edge(self.interior[self.kept - 1], self.endpoints[1])


@dataclass(frozen=True)
class UncrossableSplit:
    shared: Edge
    parent: int
    children: Tuple[int, ...]
    added_edge: bool


@dataclass(frozen=True)
class BlockSplit:
    parent: int
    children: Tuple[int, ...]


@dataclass(frozen=True)
class VertexCompaction:
    kept: Tuple[int, ...]            # new id i was old id kept[i]
    n_before: int


LiftRecord = Union[LeafRemoval, GroupTruncation, PathTruncation, UncrossableSplit, BlockSplit, VertexCompaction]


@dataclass(frozen=True)
class LiftPlan:
    """Ordered log of reductions; replaying it backwards undoes the kernel."""
    records: Tuple[LiftRecord, ...] = ()

    def extended(self, more: Iterable[LiftRecord]) -> "LiftPlan":
        return LiftPlan(self.records + tuple(more))

    @property
    def leaf_removals(self) -> List[LeafRemoval]:
        return [r for r in self.records if isinstance(r, LeafRemoval)]

    def replay(self, kernel: Graph) -> Graph:
        """Rebuild the pre-kernel graph from the kernel."""
        n = kernel.n
        edges = set(kernel.edges)
        for record in reversed(self.records):
            if isinstance(record, VertexCompaction):
                edges = {make_edge(record.kept[u], record.kept[v]) for u, v in edges}
                n = record.n_before
            elif isinstance(record, LeafRemoval):
                if record.neighbor is not None:
                    edges.add(make_edge(record.vertex, record.neighbor))
            elif isinstance(record, GroupTruncation):
                h1, h2 = record.hubs
                for w in record.removed:
                    edges.add(make_edge(w, h1))
                    edges.add(make_edge(w, h2))
            elif isinstance(record, PathTruncation):
                edges.discard(record.kernel_edge)
                walk = (record.endpoints[0],) + record.interior + (record.endpoints[1],)
                edges.update(make_edge(walk[i], walk[i + 1]) for i in range(len(walk) - 1))
            else:
                raise ValueError(f"{type(record).__name__} spans several instances and cannot be replayed on one graph")
        return Graph(n, frozenset(edges))


def compact(g: Graph, removed: Iterable[int]) -> Tuple[Graph, VertexCompaction]:
    """Drop vertices (which must be isolated by now) and renumber the rest densely."""
    gone = set(removed)
    kept = tuple(v for v in range(g.n) if v not in gone)
    index = {v: i for i, v in enumerate(kept)}
    edges = frozenset(make_edge(index[u], index[v]) for u, v in g.edges)
    return Graph(len(kept), edges), VertexCompaction(kept, g.n)


# ---------------------------------------------------------------------------
# Structural decompositions
# ---------------------------------------------------------------------------

def two_core(g: Graph) -> Tuple[Graph, LiftPlan]:
    """Iteratively strip vertices of degree at most one.

    Works off a queue of low-degree vertices, so the whole pass is linear.
    """
    degree = [g.degree(v) for v in range(g.n)]
    alive = [True] * g.n
    adjacency = g.adjacency
    queue = deque(v for v in range(g.n) if degree[v] <= 1)
    records: List[LiftRecord] = []
    removed_edges = set()

    while queue:
        v = queue.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        neighbor = None
        for w in adjacency[v]:
            if alive[w]:
                neighbor = w
                break
        records.append(LeafRemoval(v, neighbor))
        if neighbor is not None:
            removed_edges.add(make_edge(v, neighbor))
            degree[neighbor] -= 1
            if degree[neighbor] <= 1:
                queue.append(neighbor)

    remaining = Graph(g.n, g.edges - removed_edges)
    core, compaction = compact(remaining, [v for v in range(g.n) if not alive[v]])
    records.append(compaction)
    logger.debug("two_core_built", removed=len(records) - 1, remaining=core.n)
    return core, LiftPlan(tuple(records))


@dataclass(frozen=True)
class Block:
    """A biconnected component (or bridge) with its vertex map into the host."""
    graph: Graph
    vertices: Tuple[int, ...]        # block id -> host id


def blocks(g: Graph) -> List[Block]:
    """Biconnected components; together they partition the edge set."""
    result = []
    for edge_set in nx.biconnected_component_edges(g.nx_graph):
        origin = tuple(sorted({x for e in edge_set for x in e}))
        index = {v: i for i, v in enumerate(origin)}
        sub = Graph(len(origin), frozenset(make_edge(index[u], index[v]) for u, v in edge_set))
        result.append(Block(sub, origin))
    result.sort(key=lambda b: sorted(make_edge(b.vertices[u], b.vertices[v]) for u, v in b.graph.edges))
    return result


def cyclomatic_number(g: Graph) -> int:
    """m - n + c."""
    return g.m - g.n + nx.number_connected_components(g.nx_graph)


@dataclass(frozen=True)
class DegreeTwoPath:
    """A maximal path whose interior vertices all have degree two.

    `endpoints` is None for a component that is a bare cycle; `interior` then
    lists the whole cycle.
    """
    endpoints: Optional[Tuple[int, int]]
    interior: Tuple[int, ...]

    @property
    def is_cycle(self) -> bool:
        return self.endpoints is None

    def walk(self) -> Tuple[int, ...]:
        if self.endpoints is None:
            return self.interior + self.interior[:1]
        return (self.endpoints[0],) + self.interior + (self.endpoints[1],)

    def edges(self) -> List[Edge]:
        w = self.walk()
        return [make_edge(w[i], w[i + 1]) for i in range(len(w) - 1)]


def maximal_degree_two_paths(g: Graph) -> List[DegreeTwoPath]:
    """Split the edges into maximal degree-two paths, plus pure-cycle components."""
    if any(g.degree(v) == 1 for v in range(g.n)):
        raise ValueError("graph has degree-one vertices; take the 2-core first")

    used = set()
    paths: List[DegreeTwoPath] = []
    hubs = [v for v in range(g.n) if g.degree(v) > 2]
    for h in hubs:
        for w in sorted(g.neighbors(h)):
            if make_edge(h, w) in used:
                continue
            used.add(make_edge(h, w))
            interior = []
            prev, cur = h, w
            while g.degree(cur) == 2:
                interior.append(cur)
                nxt = next(x for x in g.neighbors(cur) if x != prev)
                used.add(make_edge(cur, nxt))
                prev, cur = cur, nxt
            paths.append(DegreeTwoPath((h, cur), tuple(interior)))

    # whatever is left lives in components with no vertex of degree > 2
    for v in range(g.n):
        if g.degree(v) != 2 or all(make_edge(v, x) in used for x in g.neighbors(v)):
            continue
        cycle = [v]
        prev, cur = v, min(g.neighbors(v))
        used.add(make_edge(v, cur))
        while cur != v:
            cycle.append(cur)
            nxt = next(x for x in g.neighbors(cur) if x != prev)
            used.add(make_edge(cur, nxt))
            prev, cur = cur, nxt
        paths.append(DegreeTwoPath(None, tuple(cycle)))
    return paths


def complete_bipartite_one_planar(a: int, b: int) -> bool:
    """Closed-form 1-planarity of K_{a,b}."""
    a, b = min(a, b), max(a, b)
    if a <= 2:
        return True
    if a == 3:
        return b <= 6
    if a == 4:
        return b == 4
    return False


def complete_bipartite_sides(g: Graph) -> Optional[Tuple[int, int]]:
    """(a, b) with a <= b when g is exactly K_{a,b} on all its vertices, else None."""
    if g.n < 2 or g.m == 0:
        return None
    G = g.nx_graph
    if not nx.is_connected(G) or not nx.is_bipartite(G):
        return None
    left, right = nx.bipartite.sets(G)
    if len(left) * len(right) != g.m:
        return None
    return min(len(left), len(right)), max(len(left), len(right))


def subdivide(g: Graph, times: Union[int, Dict[Edge, int]]) -> Graph:
    """Replace every edge by a path with `times` new interior vertices."""
    n = g.n
    edges = set()
    for e in g.sorted_edges:
        count = times if isinstance(times, int) else times.get(e, 0)
        prev = e[0]
        for _ in range(count):
            edges.add(make_edge(prev, n))
            prev = n
            n += 1
        edges.add(make_edge(prev, e[1]))
    return Graph(n, frozenset(edges))
