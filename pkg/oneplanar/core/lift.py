from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from oneplanar.core.embedding import (
    CrossingWitness,
    EmbeddedPiece,
    merge_at_shared_edge,
    planarity_test,
    planarize_with_kites,
)
from oneplanar.core.graph import (
    BlockSplit,
    Graph,
    LiftPlan,
    PathTruncation,
    UncrossableSplit,
    VertexCompaction,
    make_edge,
)
from oneplanar.core.solver import ConstraintSet
from oneplanar.utils.types import InvalidWitnessError

_SPLITS = (UncrossableSplit, BlockSplit)


def lift_witness(plan: LiftPlan, witness: CrossingWitness) -> CrossingWitness:
    """Carry a kernel witness back through every record of a single-instance plan.

    Restored vertices and edges never cross. A crossing on an edge that stands
    for a truncated path moves to the first segment of the restored tail.
    """
    pairs = set(witness.pairs)
    for record in reversed(plan.records):
        if isinstance(record, VertexCompaction):
            kept = record.kept
            pairs = {
                tuple(sorted((make_edge(kept[e[0]], kept[e[1]]), make_edge(kept[f[0]], kept[f[1]]))))
                for e, f in pairs
            }
        elif isinstance(record, PathTruncation):
            stand_in = record.kernel_edge
            segment = make_edge(record.interior[record.kept - 1], record.interior[record.kept])
            moved = set()
            for e, f in pairs:
                if e == stand_in:
                    e = segment
                elif f == stand_in:
                    f = segment
                moved.add(tuple(sorted((e, f))))
            pairs = moved
        elif isinstance(record, _SPLITS):
            raise ValueError(f"{type(record).__name__} needs the piece graphs; use KernelOutcome.reconstruct")
        # leaf and group restorations add uncrossed edges only
    return CrossingWitness(frozenset(pairs))


@dataclass(frozen=True)
class Piece:
    """One instance left by a kernelization, to be solved on its own.

    `origin[i]` is the host vertex of piece vertex i after the piece plan has
    been replayed; an empty origin means the piece already uses host ids.
    """
    graph: Graph
    constraints: ConstraintSet = ConstraintSet()
    origin: Tuple[int, ...] = ()
    plan: LiftPlan = LiftPlan()

    @property
    def active_vertices(self) -> int:
        return sum(1 for v in range(self.graph.n) if self.graph.degree(v) > 0)

    def to_host(self, witness: CrossingWitness) -> CrossingWitness:
        lifted = lift_witness(self.plan, witness)
        return lifted.mapped(self.origin) if self.origin else lifted

    def host_graph(self) -> Graph:
        restored = self.plan.replay(self.graph) if self.plan.records else self.graph
        if not self.origin:
            return restored
        n = max(self.origin) + 1 if self.origin else 0
        return Graph(n, frozenset(make_edge(self.origin[u], self.origin[v]) for u, v in restored.edges))


@dataclass
class KernelOutcome:
    """Result of a kernelization: an early verdict, or pieces plus the plan to undo it."""
    early_verdict: Optional[str] = None
    pieces: List[Piece] = field(default_factory=list)
    plan: LiftPlan = LiftPlan()
    host_n: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def rejected(self) -> bool:
        return self.early_verdict is not None

    @property
    def kernel_size(self) -> int:
        return sum(piece.active_vertices for piece in self.pieces)

    def reconstruct(self, witnesses: Sequence[CrossingWitness]) -> CrossingWitness:
        """Combine per-piece witnesses into one witness on the pre-kernel graph."""
        if len(witnesses) != len(self.pieces):
            raise ValueError(f"expected {len(self.pieces)} witnesses, got {len(witnesses)}")
        lifted = [piece.to_host(w) for piece, w in zip(self.pieces, witnesses)]
        splits = [r for r in self.plan.records if isinstance(r, _SPLITS)]
        if not splits:
            merged = CrossingWitness()
            for w in lifted:
                merged = merged.union(w)
        else:
            merged = self._merge_splits(lifted, splits)
        rest = LiftPlan(tuple(r for r in self.plan.records if not isinstance(r, _SPLITS)))
        return lift_witness(rest, merged)

    def _merge_splits(self, lifted: List[CrossingWitness], splits: list) -> CrossingWitness:
        graphs = [piece.host_graph() for piece in self.pieces]
        n = max([self.host_n] + [g.n for g in graphs])
        graphs = [Graph(n, g.edges) for g in graphs]
        witnesses = list(lifted)
        for record in reversed(splits):
            members = (record.parent,) + record.children
            if isinstance(record, UncrossableSplit):
                embedded = [_embedded(graphs[i], witnesses[i]) for i in members]
                graph, witness = merge_at_shared_edge(embedded, record.shared, keep_shared=not record.added_edge)
            else:
                edges = set()
                witness = CrossingWitness()
                for i in members:
                    edges |= graphs[i].edges
                    witness = witness.union(witnesses[i])
                graph = Graph(n, frozenset(edges))
            graphs[record.parent] = graph
            witnesses[record.parent] = witness
        return witnesses[splits[0].parent]


def _embedded(graph: Graph, witness: CrossingWitness) -> EmbeddedPiece:
    rotation = planarity_test(planarize_with_kites(graph, witness).graph)
    if rotation is None:
        raise InvalidWitnessError("piece witness does not verify")
    return EmbeddedPiece(graph, witness, rotation)
