from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from oneplanar.core.embedding import (
    CrossingWitness,
    add_pendants,
    insert_two_paths,
    planarity_test,
    planarize_with_kites,
    verify_witness,
)
from oneplanar.core.graph import (
    Edge,
    Graph,
    GroupTruncation,
    LeafRemoval,
    LiftPlan,
    VertexCompaction,
    blocks,
    compact,
    complete_bipartite_one_planar,
    complete_bipartite_sides,
    make_edge,
    two_core,
)
from oneplanar.core.solver import ConstraintSet, SolveOutcome, decide
from oneplanar.utils import logger
from oneplanar.utils.types import InvalidWitnessError, NotSplitGraphError, Reason, SearchStats, kernel_rejection

# ---------------------------------------------------------------------------
# Vertex cover
# ---------------------------------------------------------------------------


def _greedy_matching(g: Graph) -> List[Edge]:
    matched = set()
    matching = []
    for u, v in g.sorted_edges:
        if u not in matched and v not in matched:
            matched.update((u, v))
            matching.append((u, v))
    return matching


def _cover_within(adjacency: Dict[int, set], k: int) -> Optional[set]:
    """A cover of at most k vertices for the remaining edges, or None."""
    live = {v: nbrs for v, nbrs in adjacency.items() if nbrs}
    if not live:
        return set()
    if k <= 0:
        return None
    m = sum(len(nbrs) for nbrs in live.values()) // 2
    top = max(live, key=lambda v: (len(live[v]), -v))
    if m > k * len(live[top]):
        return None

    def without(vertices: Iterable[int]) -> Dict[int, set]:
        gone = set(vertices)
        return {v: nbrs - gone for v, nbrs in live.items() if v not in gone}

    taken = _cover_within(without([top]), k - 1)
    if taken is not None:
        return taken | {top}
    if len(live[top]) > k:
        # a cover skipping `top` takes all its neighbors
        return None
    taken = _cover_within(without(live[top]), k - len(live[top]))
    if taken is not None:
        return taken | live[top]
    return None


def vertex_cover(g: Graph, max_k: int) -> Optional[FrozenSet[int]]:
    """Minimum vertex cover when its size is at most max_k, else None.

    A greedy maximal matching M brackets the optimum between |M| and 2|M|;
    any vertex of degree above the upper end lies in every small cover. The
    remaining edges go to bounded branching with iterative deepening.
    """
    matching = _greedy_matching(g)
    if len(matching) > max_k:
        return None
    upper = min(2 * len(matching), max_k)
    forced = {v for v in range(g.n) if g.degree(v) > upper}
    if len(forced) > upper:
        return None
    adjacency = {v: set(g.neighbors(v)) - forced for v in range(g.n) if v not in forced}
    for budget in range(upper - len(forced) + 1):
        rest = _cover_within(adjacency, budget)
        if rest is not None:
            cover = frozenset(forced | rest)
            break
    else:
        return None
    if any(u not in cover and v not in cover for u, v in g.edges):
        raise RuntimeError("vertex cover search returned a non-cover")
    return cover


# ---------------------------------------------------------------------------
# Cover kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverGroup:
    """Outside vertices of degree two that share one hub pair."""
    hubs: Edge
    kept: Tuple[int, ...]
    removed_count: int
    anchor: int


@dataclass
class CoverKernel:
    kernel: Graph
    cover: FrozenSet[int]
    groups: List[CoverGroup] = field(default_factory=list)
    plan: LiftPlan = LiftPlan()
    early_verdict: Optional[str] = None
    high_degree: int = 0             # outside vertices of degree >= 3

    @property
    def k(self) -> int:
        return len(self.cover)

    @property
    def size_bound(self) -> int:
        limit = max(1, 2 * self.k - 3)
        return self.k + self.high_degree + sum(min(len(gr.kept) + gr.removed_count, limit) for gr in self.groups)

    @property
    def anchor_paths(self) -> Tuple[Tuple[Edge, Edge], ...]:
        return tuple(
            (make_edge(gr.hubs[0], gr.anchor), make_edge(gr.anchor, gr.hubs[1]))
            for gr in self.groups
            if gr.removed_count > 0
        )


def _distinct_middle_pairs(g: Graph, cover: FrozenSet[int], outside: List[int]) -> int:
    """Most cover pairs joinable through pairwise distinct outside vertices."""
    B = nx.Graph()
    pairs = set()
    for w in outside:
        for u, v in combinations(sorted(g.neighbors(w)), 2):
            pairs.add(("pair", u, v))
            B.add_edge(("pair", u, v), ("via", w))
    if not pairs:
        return 0
    matching = nx.bipartite.hopcroft_karp_matching(B, top_nodes=pairs)
    return len(matching) // 2


def vc_kernelize(g: Graph, cover: Iterable[int]) -> CoverKernel:
    """Shrink g around a vertex cover; the result is 1-planar iff g is.

    Args:
        g: A biconnected block.
        cover: Vertex cover of g.

    Returns:
        CoverKernel holding the kernel graph, its anchor paths and lift plan, or
        an early NotOnePlanar verdict when a counting rule refutes g.

    Raises:
        ValueError: If cover misses an edge.
    """
    cover = frozenset(cover)
    if any(u not in cover and v not in cover for u, v in g.edges):
        raise ValueError("the given set does not cover every edge")

    core, leaf_plan = two_core(g)
    compaction = leaf_plan.records[-1]
    index = {old: new for new, old in enumerate(compaction.kept)}
    cover = frozenset(index[c] for c in cover if c in index)
    k = len(cover)
    outside = [v for v in range(core.n) if v not in cover]

    def rejected(rule: str) -> CoverKernel:
        logger.info("vc_kernel_rejected", rule=rule, k=k, n=core.n)
        return CoverKernel(core, cover, plan=leaf_plan, early_verdict=kernel_rejection(rule))

    if _distinct_middle_pairs(core, cover, outside) > 5 * k:
        return rejected("pairs")

    neighbor_sets = [core.neighbors(v) for v in range(core.n)]
    for a, b, c in combinations(sorted(cover), 3):
        if len(neighbor_sets[a] & neighbor_sets[b] & neighbor_sets[c]) >= 7:
            return rejected("k37")

    high = [w for w in outside if core.degree(w) >= 3]
    shared: Dict[Edge, int] = {}
    for w in high:
        for pair in combinations(sorted(core.neighbors(w)), 2):
            shared[pair] = shared.get(pair, 0) + 1
    if any(count > 6 * k for count in shared.values()):
        return rejected("pair6k")

    classes: Dict[Edge, List[int]] = {}
    for w in outside:
        if core.degree(w) == 2:
            classes.setdefault(make_edge(*core.neighbors(w)), []).append(w)

    limit = max(1, 2 * k - 3)
    records = []
    removed: List[int] = []
    raw_groups = []
    for group_id, hubs in enumerate(sorted(classes)):
        members = sorted(classes[hubs])
        kept, cut = members[:limit], members[limit:]
        raw_groups.append((hubs, kept, len(cut)))
        if cut:
            records.append(GroupTruncation(group_id, hubs, tuple(cut), kept[0]))
            removed.extend(cut)

    removed_set = set(removed)
    trimmed = Graph(core.n, frozenset(e for e in core.edges if not (set(e) & removed_set)))
    kernel, shrink = compact(trimmed, removed_set)
    renumber = {old: new for new, old in enumerate(shrink.kept)}
    groups = [
        CoverGroup(
            (renumber[hubs[0]], renumber[hubs[1]]),
            tuple(renumber[v] for v in kept),
            cut,
            renumber[kept[0]],
        )
        for hubs, kept, cut in raw_groups
    ]
    ck = CoverKernel(
        kernel,
        frozenset(renumber[c] for c in cover),
        groups,
        leaf_plan.extended(records + [shrink]),
        None,
        len(high),
    )
    logger.info("kernel_built", strategy="vc", k=k, vertices=kernel.n, edges=kernel.m, groups=len(groups))
    return ck


def vc_solve_kernel(ck: CoverKernel, budget: int, workers: int = 1, seed: int = 0) -> SolveOutcome:
    """Solve the kernel with every truncated group's anchor path kept uncrossed.

    Some drawing keeps a whole group planar, and a planar group of this size
    has a member whose two edges are uncrossed. Members are interchangeable,
    so insisting on the anchor loses nothing.
    """
    if ck.early_verdict is not None:
        raise ValueError("kernel was rejected; nothing to solve")
    cs = ConstraintSet(mandatory_uncrossed_paths=ck.anchor_paths)
    return decide(ck.kernel, cs, budget=budget, workers=workers, seed=seed)


def vc_lift(ck: CoverKernel, witness: CrossingWitness) -> CrossingWitness:
    """Carry a kernel witness to the pre-kernel graph, rebuilding its embedding on the way."""
    crossed = witness.crossed_edges()
    for path in ck.anchor_paths:
        if any(e in crossed for e in path):
            raise InvalidWitnessError(f"anchor path {path} is crossed")

    planarization = planarize_with_kites(ck.kernel, witness)
    rotation = planarity_test(planarization.graph)
    if rotation is None:
        raise InvalidWitnessError("witness does not verify on the kernel")

    real_of = {v: v for v in range(ck.kernel.n)}
    next_id = planarization.graph.n
    leaves: List[Tuple[Optional[int], int]] = []
    for record in reversed(ck.plan.records):
        if isinstance(record, VertexCompaction):
            real_of = {record.kept[v]: real for v, real in real_of.items()}
        elif isinstance(record, GroupTruncation):
            a, b = real_of[record.hubs[0]], real_of[record.hubs[1]]
            eid = rotation.graph.parallel_classes[make_edge(a, real_of[record.anchor])][0]
            face = rotation.face_of(rotation.graph.dart_from(eid, a))
            fresh = list(range(next_id, next_id + record.removed_count))
            rotation = insert_two_paths(rotation, a, b, face, fresh)
            real_of.update(zip(record.removed, fresh))
            next_id += record.removed_count
        elif isinstance(record, LeafRemoval):
            neighbor = real_of[record.neighbor] if record.neighbor is not None else None
            leaves.append((neighbor, next_id))
            real_of[record.vertex] = next_id
            next_id += 1
    if leaves:
        rotation = add_pendants(rotation, leaves)
    if not rotation.euler_holds():
        raise RuntimeError("lifted embedding fails the Euler check")

    original_of = {real: v for v, real in real_of.items()}
    lifted = witness.mapped(lambda v: original_of[v])
    original = ck.plan.replay(ck.kernel)
    if not verify_witness(original, lifted):
        raise RuntimeError("lifted witness does not verify")
    return lifted


def _block_cover(cover: FrozenSet[int], vertices: Tuple[int, ...]) -> FrozenSet[int]:
    return frozenset(i for i, v in enumerate(vertices) if v in cover)


def pipeline_vc(
    g: Graph,
    budget: int,
    max_k: int = 10,
    cover: Optional[Iterable[int]] = None,
    workers: int = 1,
    seed: int = 0,
) -> SolveOutcome:
    """Decide 1-planarity through per-block cover kernels.

    Args:
        g: Graph to decide.
        budget: Search nodes allowed per kernel block.
        max_k: Largest cover searched for; a block needing more ends undecided.
        cover: Known vertex cover of g, used instead of searching.
        workers: Process count handed to the kernel solver.
        seed: Tie-break seed for the kernel solver.

    Returns:
        SolveOutcome with the lifted witness, a rejection reason, or BudgetExceeded
        when some block's cover exceeds max_k or its kernel search runs out.
    """
    stats = SearchStats()
    parameters: Dict[str, object] = {"k_vc": []}
    kernel_info: Dict[str, object] = {"vertices": [], "edges": []}

    def finish(outcome: SolveOutcome) -> SolveOutcome:
        outcome.stats = stats
        outcome.parameters = parameters
        outcome.kernel = kernel_info
        logger.info("pipeline_finished", strategy="vc", verdict=outcome.verdict.value, reason=outcome.reason)
        return outcome

    if g.n >= 3 and g.m > 4 * g.n - 8:
        return finish(SolveOutcome.not_one_planar(Reason.EDGE_DENSITY))

    hint = frozenset(cover) if cover is not None else None
    witness = CrossingWitness()
    exceeded = False
    for block in blocks(g):
        bg = block.graph
        sides = complete_bipartite_sides(bg)
        if sides is not None and not complete_bipartite_one_planar(*sides):
            return finish(SolveOutcome.not_one_planar(Reason.BIPARTITE_TABLE))
        block_cover = _block_cover(hint, block.vertices) if hint is not None else vertex_cover(bg, max_k)
        if block_cover is None:
            exceeded = True
            continue
        ck = vc_kernelize(bg, block_cover)
        parameters["k_vc"].append(ck.k)
        kernel_info["vertices"].append(ck.kernel.n)
        kernel_info["edges"].append(ck.kernel.m)
        if ck.early_verdict is not None:
            return finish(SolveOutcome.not_one_planar(ck.early_verdict))
        outcome = vc_solve_kernel(ck, budget, workers, seed)
        stats.absorb(outcome.stats)
        if not outcome.decided:
            exceeded = True
            continue
        if not outcome.is_one_planar:
            return finish(SolveOutcome.not_one_planar(outcome.reason))
        witness = witness.union(vc_lift(ck, outcome.witness).mapped(block.vertices))

    if exceeded:
        return finish(SolveOutcome.budget_exceeded(stats))
    if not verify_witness(g, witness):
        raise RuntimeError("merged block witnesses do not verify")
    return finish(SolveOutcome.one_planar(witness))


def split_partition(g: Graph) -> Optional[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """(clique, independent set) when g is a split graph, from its degree sequence alone."""
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    degrees = [g.degree(v) for v in order]
    size = max((i + 1 for i, d in enumerate(degrees) if d >= i), default=0)
    if sum(degrees[:size]) != size * (size - 1) + sum(degrees[size:]):
        return None
    return frozenset(order[:size]), frozenset(order[size:])


def split_graph_one_planar(g: Graph, budget: int) -> SolveOutcome:
    """Split graphs: a 7-clique rules 1-planarity out, otherwise the clique is a small cover."""
    partition = split_partition(g)
    if partition is None:
        raise NotSplitGraphError("graph is not a split graph")
    clique, _ = partition
    if len(clique) >= 7:
        logger.info("split_graph_rejected", clique=len(clique))
        return SolveOutcome.not_one_planar(kernel_rejection("k7"))
    return pipeline_vc(g, budget, cover=clique)
