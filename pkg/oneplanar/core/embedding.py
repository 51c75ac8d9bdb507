from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from oneplanar.core.graph import Edge, Graph, make_edge
from oneplanar.utils import logger
from oneplanar.utils.types import InvalidWitnessError

if TYPE_CHECKING:
    from oneplanar.core.solver import ConstraintSet

# A dart is one end of an edge: dart 2*e leaves edges[e][0], dart 2*e + 1 leaves edges[e][1].
Dart = int


def twin(d: Dart) -> Dart:
    return d ^ 1


@dataclass(frozen=True)
class Multigraph:
    """Undirected graph that may repeat edges; edge ids are tuple positions."""
    n: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        for eid, (u, v) in enumerate(self.edges):
            if u == v:
                raise ValueError(f"edge {eid} is a self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {eid} = {(u, v)} leaves [0, {self.n})")

    @classmethod
    def from_graph(cls, g: Graph) -> "Multigraph":
        return cls(g.n, g.sorted_edges)

    def tail(self, d: Dart) -> int:
        return self.edges[d >> 1][d & 1]

    def head(self, d: Dart) -> int:
        return self.edges[d >> 1][1 - (d & 1)]

    def dart_from(self, eid: int, v: int) -> Dart:
        return 2 * eid + (0 if self.edges[eid][0] == v else 1)

    @cached_property
    def parallel_classes(self) -> Dict[Edge, List[int]]:
        classes: Dict[Edge, List[int]] = defaultdict(list)
        for eid, (u, v) in enumerate(self.edges):
            classes[make_edge(u, v)].append(eid)
        return dict(classes)

    def to_simple(self) -> nx.Graph:
        """Parallel copies collapse; they never decide planarity."""
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.parallel_classes.keys())
        return G


@dataclass(frozen=True)
class RotationSystem:
    """Cyclic order of outgoing darts around every vertex."""
    graph: Multigraph
    rotation: Tuple[Tuple[Dart, ...], ...]

    def __post_init__(self):
        if len(self.rotation) != self.graph.n:
            raise ValueError("rotation must list every vertex")
        seen = set()
        for v, darts in enumerate(self.rotation):
            for d in darts:
                if d in seen or self.graph.tail(d) != v:
                    raise ValueError(f"dart {d} misplaced at vertex {v}")
                seen.add(d)
        if len(seen) != 2 * len(self.graph.edges):
            raise ValueError("some edge ends are missing from the rotation")

    @cached_property
    def _position(self) -> Dict[Dart, int]:
        return {d: i for darts in self.rotation for i, d in enumerate(darts)}

    def successor(self, d: Dart) -> Dart:
        darts = self.rotation[self.graph.tail(d)]
        return darts[(self._position[d] + 1) % len(darts)]

    def next_in_face(self, d: Dart) -> Dart:
        return self.successor(twin(d))

    @cached_property
    def faces(self) -> Tuple[Tuple[Dart, ...], ...]:
        """Face boundary walks; every dart lies on exactly one."""
        seen = set()
        faces = []
        for start in range(2 * len(self.graph.edges)):
            if start in seen:
                continue
            walk = []
            d = start
            while d not in seen:
                seen.add(d)
                walk.append(d)
                d = self.next_in_face(d)
            faces.append(tuple(walk))
        return tuple(faces)

    def face_vertices(self, face: int) -> Tuple[int, ...]:
        return tuple(self.graph.tail(d) for d in self.faces[face])

    def face_of(self, d: Dart) -> int:
        for i, walk in enumerate(self.faces):
            if d in walk:
                return i
        raise ValueError(f"dart {d} is not on any face")

    def euler_holds(self) -> bool:
        """v - e + f == 2 on every connected component."""
        sets = nx.utils.UnionFind(range(self.graph.n))
        for u, v in self.graph.edges:
            sets.union(u, v)
        counts: Dict[int, List[int]] = defaultdict(lambda: [0, 0, 0])
        for v in range(self.graph.n):
            counts[sets[v]][0] += 1
        for u, _ in self.graph.edges:
            counts[sets[u]][1] += 1
        for walk in self.faces:
            counts[sets[self.graph.tail(walk[0])]][2] += 1
        for v, e, f in counts.values():
            if e == 0:
                f = 1
            if v - e + f != 2:
                return False
        return True


def planarity_test(g: Union[Multigraph, Graph]) -> Optional[RotationSystem]:
    """Planar embedding of g as a rotation system, or None when g is not planar."""
    mg = g if isinstance(g, Multigraph) else Multigraph.from_graph(g)
    is_planar, embedding = nx.check_planarity(mg.to_simple())
    if not is_planar:
        return None
    classes = mg.parallel_classes
    rotation = []
    for v in range(mg.n):
        darts = []
        for w in embedding.neighbors_cw_order(v):
            ids = classes[make_edge(v, w)]
            # parallel copies fan out in mirrored order at the far end
            for eid in (ids if v < w else reversed(ids)):
                darts.append(mg.dart_from(eid, v))
        rotation.append(tuple(darts))
    return RotationSystem(mg, tuple(rotation))


def is_planar(g: Union[Multigraph, Graph]) -> bool:
    mg = g if isinstance(g, Multigraph) else Multigraph.from_graph(g)
    return nx.check_planarity(mg.to_simple())[0]


def planarity_obstruction(g: Union[Multigraph, Graph]) -> Optional[List[Edge]]:
    """Edges of a Kuratowski subgraph (as vertex pairs), or None when g is planar."""
    mg = g if isinstance(g, Multigraph) else Multigraph.from_graph(g)
    is_planar, certificate = nx.check_planarity(mg.to_simple(), counterexample=True)
    if is_planar:
        return None
    return sorted(make_edge(u, v) for u, v in certificate.edges())


# ---------------------------------------------------------------------------
# Crossing witnesses
# ---------------------------------------------------------------------------

EdgePair = Tuple[Edge, Edge]


def make_pair(e: Edge, f: Edge) -> EdgePair:
    e, f = make_edge(*e), make_edge(*f)
    return (e, f) if e < f else (f, e)


@dataclass(frozen=True)
class CrossingWitness:
    """Pairs of edges that cross each other; each edge crosses at most once."""
    pairs: FrozenSet[EdgePair] = frozenset()

    def __post_init__(self):
        normalized = set()
        for e, f in self.pairs:
            pair = make_pair(e, f)
            if pair[0] == pair[1]:
                raise InvalidWitnessError(f"edge {pair[0]} paired with itself")
            normalized.add(pair)
        object.__setattr__(self, "pairs", frozenset(normalized))

    @classmethod
    def from_quadruples(cls, quads: Iterable[Sequence[int]]) -> "CrossingWitness":
        return cls(frozenset(make_pair((q[0], q[1]), (q[2], q[3])) for q in quads))

    def __len__(self) -> int:
        return len(self.pairs)

    def sorted_pairs(self) -> List[EdgePair]:
        return sorted(self.pairs)

    def quadruples(self) -> List[Tuple[int, int, int, int]]:
        return [(e[0], e[1], f[0], f[1]) for e, f in self.sorted_pairs()]

    def crossed_edges(self) -> FrozenSet[Edge]:
        return frozenset(e for pair in self.pairs for e in pair)

    def partner(self, e: Edge) -> Optional[Edge]:
        e = make_edge(*e)
        for a, b in self.pairs:
            if a == e:
                return b
            if b == e:
                return a
        return None

    def mapped(self, vertex_map: Union[Sequence[int], Callable[[int], int]]) -> "CrossingWitness":
        f = vertex_map if callable(vertex_map) else vertex_map.__getitem__
        return CrossingWitness(frozenset(
            make_pair((f(a[0]), f(a[1])), (f(b[0]), f(b[1]))) for a, b in self.pairs
        ))

    def union(self, other: "CrossingWitness") -> "CrossingWitness":
        return CrossingWitness(self.pairs | other.pairs)

    def validate(self, g: Graph) -> None:
        """Raise InvalidWitnessError unless this is a matching of disjoint host edges."""
        used = set()
        for e, f in self.sorted_pairs():
            for x in (e, f):
                if x not in g.edges:
                    raise InvalidWitnessError(f"edge {x} is not in the graph")
                if x in used:
                    raise InvalidWitnessError(f"edge {x} crosses more than once")
                used.add(x)
            if set(e) & set(f):
                raise InvalidWitnessError(f"edges {e} and {f} share a vertex")


@dataclass(frozen=True)
class Planarization:
    """Kite-augmented planarization with provenance per multigraph edge.

    provenance[eid] is ("edge", host edge index), ("spoke", pair index) or ("kite", pair index).
    """
    graph: Multigraph
    provenance: Tuple[Tuple[str, int], ...]
    pairs: Tuple[EdgePair, ...]

    def dummy(self, pair_index: int) -> int:
        return self.graph.n - len(self.pairs) + pair_index


def planarize_with_kites(g: Graph, w: CrossingWitness) -> Planarization:
    """Replace every crossing by a dummy vertex wrapped in a kite 4-cycle.

    The kite makes the wheel around the dummy rigid, so the two recovered edges
    alternate around it and really cross.
    """
    w.validate(g)
    pairs = tuple(w.sorted_pairs())
    crossed = w.crossed_edges()
    edges: List[Edge] = []
    provenance: List[Tuple[str, int]] = []
    for idx, e in enumerate(g.sorted_edges):
        if e not in crossed:
            edges.append(e)
            provenance.append(("edge", idx))
    for k, ((u, v), (x, y)) in enumerate(pairs):
        c = g.n + k
        for spoke in ((u, c), (c, v), (x, c), (c, y)):
            edges.append(spoke)
            provenance.append(("spoke", k))
        for kite in ((u, x), (x, v), (v, y), (y, u)):
            edges.append(kite)
            provenance.append(("kite", k))
    return Planarization(Multigraph(g.n + len(pairs), tuple(edges)), tuple(provenance), pairs)


def verify_witness(g: Graph, w: CrossingWitness, cs: Optional["ConstraintSet"] = None) -> bool:
    """True iff w is a valid witness allowed by cs whose planarization is planar. Never raises."""
    try:
        w.validate(g)
        if cs is not None:
            for e, f in w.pairs:
                if not cs.allows(e, f):
                    return False
        return planarity_test(planarize_with_kites(g, w).graph) is not None
    except (InvalidWitnessError, ValueError) as e:
        logger.debug("witness_rejected", error=str(e))
        return False


# ---------------------------------------------------------------------------
# Embedding surgery
# ---------------------------------------------------------------------------

def _fresh(rotation: List[List[Dart]], v: int) -> None:
    while len(rotation) <= v:
        rotation.append([])
    if rotation[v]:
        raise ValueError(f"vertex {v} already has edges")


def insert_two_paths(r: RotationSystem, a: int, b: int, face: int, new_vertices: Sequence[int]) -> RotationSystem:
    """Embed new degree-two vertices, each joined to a and b, side by side inside one face.

    The paths fan out from a in the given order and arrive at b in reverse, so
    consecutive ones bound a new quadrilateral face.
    """
    if a == b:
        raise ValueError("a two-path needs distinct ends")
    walk = r.faces[face]
    tails = [r.graph.tail(d) for d in walk]
    if a not in tails or b not in tails:
        raise ValueError(f"vertices {a} and {b} are not both on face {face}")
    # the dart that enters a (resp. b) along the face walk
    enter_a = walk[tails.index(a) - 1]
    enter_b = walk[tails.index(b) - 1]

    edges = list(r.graph.edges)
    rotation = [list(darts) for darts in r.rotation]
    from_a, from_b = [], []
    for x in new_vertices:
        _fresh(rotation, x)
        e1 = len(edges)
        edges.extend([(a, x), (x, b)])
        from_a.append(2 * e1)
        from_b.append(2 * (e1 + 1) + 1)
        rotation[x] = [2 * e1 + 1, 2 * (e1 + 1)]

    at_a = rotation[a].index(twin(enter_a)) + 1
    rotation[a][at_a:at_a] = from_a
    at_b = rotation[b].index(twin(enter_b)) + 1
    rotation[b][at_b:at_b] = list(reversed(from_b))
    return RotationSystem(Multigraph(len(rotation), tuple(edges)), tuple(tuple(d) for d in rotation))


def insert_two_path(r: RotationSystem, a: int, b: int, face: int, new_vertex: int) -> RotationSystem:
    """Embed a new degree-two vertex joined to a and b inside the given face."""
    return insert_two_paths(r, a, b, face, [new_vertex])


def add_pendants(r: RotationSystem, attachments: Sequence[Tuple[Optional[int], int]]) -> RotationSystem:
    """Add new vertices in order, each hanging off an existing vertex or isolated (None)."""
    edges = list(r.graph.edges)
    rotation = [list(darts) for darts in r.rotation]
    for v, leaf in attachments:
        _fresh(rotation, leaf)
        if v is None:
            continue
        eid = len(edges)
        edges.append((v, leaf))
        rotation[v].append(2 * eid)
        rotation[leaf] = [2 * eid + 1]
    return RotationSystem(Multigraph(len(rotation), tuple(edges)), tuple(tuple(d) for d in rotation))


def add_pendant(r: RotationSystem, v: int, leaf: int) -> RotationSystem:
    """Attach a new degree-one vertex to v in any angle at v."""
    return add_pendants(r, [(v, leaf)])


@dataclass(frozen=True)
class EmbeddedPiece:
    """A solved sub-instance in host coordinates."""
    graph: Graph
    witness: CrossingWitness
    rotation: RotationSystem


def merge_at_shared_edge(
    pieces: Sequence[EmbeddedPiece],
    shared: Edge,
    keep_shared: bool = True,
) -> Tuple[Graph, CrossingWitness]:
    """Glue solved pieces along an edge none of them crosses.

    Each piece can be redrawn with the shared edge on its outer face, so the
    drawings nest side by side around it.
    """
    shared = make_edge(*shared)
    n = 0
    edges = set()
    witness = CrossingWitness()
    for piece in pieces:
        if shared not in piece.graph.edges:
            raise ValueError(f"piece does not contain the shared edge {shared}")
        if shared in piece.witness.crossed_edges():
            raise InvalidWitnessError(f"a piece crosses the shared edge {shared}")
        if not piece.rotation.euler_holds():
            raise ValueError("piece embedding fails the Euler check")
        n = max(n, piece.graph.n)
        edges |= piece.graph.edges
        witness = witness.union(piece.witness)
    if not keep_shared:
        edges.discard(shared)
    union = Graph(n, frozenset(edges))
    if not verify_witness(union, witness):
        raise InvalidWitnessError("merged witness does not verify on the glued graph")
    return union, witness
