import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from oneplanar.core.embedding import CrossingWitness, verify_witness
from oneplanar.core.graph import BlockSplit, Graph, LiftPlan, UncrossableSplit, blocks, make_edge
from oneplanar.core.lift import KernelOutcome, Piece
from oneplanar.core.solver import ConstraintSet, SolveOutcome, decide
from oneplanar.utils import logger
from oneplanar.utils.types import Reason, SearchStats, kernel_rejection

ParentMap = Dict[int, Optional[int]]

# separator-greedy upper bound above this size falls back to max-degree elimination
_GREEDY_SEPARATOR_LIMIT = 64


@dataclass(frozen=True)
class EliminationForest:
    """Rooted forest on the vertices of a graph; parent[v] is None for roots."""
    parent: Tuple[Optional[int], ...]

    @classmethod
    def from_map(cls, n: int, parent: ParentMap) -> "EliminationForest":
        return cls(tuple(parent.get(v) for v in range(n)))

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def children(self) -> Tuple[Tuple[int, ...], ...]:
        kids: List[List[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def roots(self) -> Tuple[int, ...]:
        return tuple(v for v, p in enumerate(self.parent) if p is None)

    @cached_property
    def _depths(self) -> Tuple[int, ...]:
        depths = [0] * self.n
        queue = deque((r, 1) for r in self.roots)
        seen = 0
        while queue:
            v, d = queue.popleft()
            depths[v] = d
            seen += 1
            queue.extend((c, d + 1) for c in self.children[v])
        if seen != self.n:
            raise ValueError("parent map contains a cycle")
        return tuple(depths)

    def depth_of(self, v: int) -> int:
        return self._depths[v]

    @property
    def depth(self) -> int:
        return max(self._depths, default=0)

    def ancestors(self, v: int) -> List[int]:
        """Proper ancestors of v, nearest first."""
        result = []
        p = self.parent[v]
        while p is not None:
            result.append(p)
            p = self.parent[p]
        return result

    def subtree(self, v: int) -> List[int]:
        result = []
        stack = [v]
        while stack:
            x = stack.pop()
            result.append(x)
            stack.extend(self.children[x])
        return sorted(result)

    def is_ancestor(self, a: int, v: int) -> bool:
        while v is not None:
            if v == a:
                return True
            v = self.parent[v]
        return False

    def is_valid_for(self, g: Graph) -> bool:
        """Every edge of g joins an ancestor-descendant pair."""
        if self.n != g.n:
            return False
        try:
            self._depths
        except ValueError:
            return False
        for u, v in g.edges:
            a, b = (u, v) if self.depth_of(u) <= self.depth_of(v) else (v, u)
            if not self.is_ancestor(a, b):
                return False
        return True

    def restricted(self, keep: Iterable[int]) -> "EliminationForest":
        """Same vertex ids; kept vertices hang from their nearest kept ancestor, others become roots."""
        keep = set(keep)
        parent: List[Optional[int]] = [None] * self.n
        for v in keep:
            p = self.parent[v]
            while p is not None and p not in keep:
                p = self.parent[p]
            parent[v] = p
        return EliminationForest(tuple(parent))

    def induced(self, origin: Sequence[int]) -> "EliminationForest":
        """Forest on compact ids, vertex i standing for origin[i]."""
        index = {v: i for i, v in enumerate(origin)}
        narrowed = self.restricted(origin)
        return EliminationForest(tuple(
            None if narrowed.parent[v] is None else index[narrowed.parent[v]]
            for v in origin
        ))


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------


def dfs_forest(g: Graph) -> EliminationForest:
    """A depth-first search forest; it has no cross edges, so it is an elimination forest."""
    parent: ParentMap = dict.fromkeys(range(g.n))
    parent.update(nx.dfs_predecessors(g.nx_graph))
    return EliminationForest.from_map(g.n, parent)


def greedy_forest(g: Graph) -> EliminationForest:
    """Repeatedly eliminate the vertex leaving the smallest largest component."""
    use_separator = g.n <= _GREEDY_SEPARATOR_LIMIT
    parent: ParentMap = {}
    work = [(comp, None) for comp in g.components()]
    while work:
        comp, above = work.pop()
        if use_separator and len(comp) > 2:
            def worst_piece(v: int) -> int:
                return max((len(c) for c in g.components_within([x for x in comp if x != v])), default=0)
            root = min(comp, key=lambda v: (worst_piece(v), v))
        else:
            inside = set(comp)
            root = min(comp, key=lambda v: (-len(g.adjacency[v] & inside), v))
        parent[root] = above
        rest = [v for v in comp if v != root]
        work.extend((c, root) for c in g.components_within(rest))
    return EliminationForest.from_map(g.n, parent)


def _degeneracy(G: nx.Graph, vertices: Iterable[int]) -> int:
    cores = nx.core_number(G.subgraph(vertices))
    return max(cores.values(), default=0)


def tree_depth_lower_bound(g: Graph) -> int:
    """max(degeneracy + 1, tree-depth of the longest root-leaf path of a DFS forest)."""
    if g.n == 0:
        return 0
    longest = dfs_forest(g).depth
    return max(_degeneracy(g.nx_graph, range(g.n)) + 1, math.ceil(math.log2(longest + 1)))


# ---------------------------------------------------------------------------
# Exact tree-depth
# ---------------------------------------------------------------------------


class _TreeDepthSearch:
    """Delete-a-vertex recursion over connected vertex sets, memoized."""

    def __init__(self, g: Graph):
        self.g = g
        self.G = g.nx_graph
        self.solved: Dict[FrozenSet[int], Tuple[int, ParentMap]] = {}
        self.failed: Dict[FrozenSet[int], int] = {}

    def solve(self, S: FrozenSet[int], limit: int) -> Optional[Tuple[int, ParentMap]]:
        """Optimal (depth, parent map) for connected S when its tree-depth is at most limit."""
        if S in self.solved:
            found = self.solved[S]
            return found if found[0] <= limit else None
        if self.failed.get(S, -1) >= limit or limit <= 0:
            return None
        if len(S) == 1:
            (v,) = S
            self.solved[S] = (1, {v: None})
            return self.solved[S]

        lower = _degeneracy(self.G, S) + 1
        if lower > limit:
            self.failed[S] = max(self.failed.get(S, -1), limit)
            return None

        best: Optional[Tuple[int, ParentMap]] = None
        bound = limit
        order = sorted(S, key=lambda v: (-len(self.g.adjacency[v] & S), v))
        for v in order:
            pieces = self.g.components_within(S - {v})
            pieces.sort(key=len, reverse=True)
            depth = 1
            parent: ParentMap = {v: None}
            for piece in pieces:
                sub = self.solve(frozenset(piece), bound - 1)
                if sub is None:
                    break
                depth = max(depth, sub[0] + 1)
                for x, p in sub[1].items():
                    parent[x] = v if p is None else p
            else:
                best = (depth, parent)
                bound = depth - 1
                if depth == lower:
                    break
        if best is None:
            self.failed[S] = max(self.failed.get(S, -1), limit)
            return None
        self.solved[S] = best
        return best


def tree_depth(g: Graph, max_d: int) -> Optional[Tuple[int, EliminationForest]]:
    """Exact tree-depth and an optimal forest, or None when it exceeds max_d."""
    if g.n == 0:
        return 0, EliminationForest(())
    if tree_depth_lower_bound(g) > max_d:
        return None
    search = _TreeDepthSearch(g)
    parent: ParentMap = {}
    depth = 0
    dfs, greedy = dfs_forest(g), greedy_forest(g)
    for comp in g.components():
        S = frozenset(comp)
        # both heuristics root every component at depth 1
        shortcut = min((dfs, greedy), key=lambda f: max(f.depth_of(v) for v in comp))
        upper = max(shortcut.depth_of(v) for v in comp)
        longest = max(dfs.depth_of(v) for v in comp)
        lower = max(_degeneracy(search.G, comp) + 1, math.ceil(math.log2(longest + 1)))
        found = None if lower >= upper else search.solve(S, min(upper - 1, max_d))
        if found is None:
            if upper > max_d:
                return None
            for v in comp:
                parent[v] = shortcut.parent[v]
            depth = max(depth, upper)
        else:
            parent.update(found[1])
            depth = max(depth, found[0])
    forest = EliminationForest.from_map(g.n, parent)
    if forest.depth != depth or not forest.is_valid_for(g):
        raise RuntimeError("tree-depth search built an invalid forest")
    logger.debug("tree_depth_computed", n=g.n, m=g.m, depth=depth, states=len(search.solved))
    return depth, forest


def normalize_forest(g: Graph, f: EliminationForest) -> EliminationForest:
    """Rebuild f so that every child subtree is connected and touches its parent.

    Each connected vertex set hangs from a vertex adjacent to all the others
    when it has one, else from its shallowest vertex, which is an ancestor of
    all the others. The remaining vertices split into their components below
    it. A universal vertex lies on every root-leaf chain of f restricted to the
    set, so lifting it to the top never adds depth; a star comes back rooted
    at its center whatever leaf f started from.
    """
    if not f.is_valid_for(g):
        raise ValueError("forest is not an elimination forest of the graph")
    parent: ParentMap = {}
    work: List[Tuple[List[int], Optional[int]]] = [(comp, None) for comp in g.components()]
    while work:
        comp, above = work.pop()
        inside = set(comp)
        universal = [v for v in comp if len(g.adjacency[v] & inside) == len(comp) - 1]
        root = min(universal or comp, key=lambda v: (f.depth_of(v), v))
        parent[root] = above
        work.extend((c, root) for c in g.components_within([v for v in comp if v != root]))
    return EliminationForest.from_map(g.n, parent)


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChildClassification:
    """Children of one forest node grouped by the ancestors their subtrees attach to."""
    node: int
    attachments: Dict[int, FrozenSet[int]]            # child root -> S_i
    groups: Dict[FrozenSet[int], Tuple[int, ...]]     # S -> child roots with S_i = S


def classify_children(g: Graph, f: EliminationForest, v: int) -> ChildClassification:
    above = frozenset([v] + f.ancestors(v))
    attachments = {}
    groups: Dict[FrozenSet[int], List[int]] = {}
    for c in f.children[v]:
        touched = set()
        for x in f.subtree(c):
            touched |= g.adjacency[x] & above
        S = frozenset(touched)
        attachments[c] = S
        groups.setdefault(S, []).append(c)
    return ChildClassification(v, attachments, {S: tuple(cs) for S, cs in groups.items()})


@dataclass
class _Instance:
    graph: Graph
    forest: EliminationForest
    uncrossable: Set = field(default_factory=set)


def _active(g: Graph) -> List[int]:
    return [v for v in range(g.n) if g.degree(v) > 0]


def td_kernelize(g: Graph, f: EliminationForest, c1: int = 20, reject: bool = True) -> KernelOutcome:
    """Split g along uncrossable hub edges until no attachment group is oversized.

    Instances keep the vertex ids of g; vertices outside an instance are
    isolated in it.

    Args:
        g: A 2-connected graph.
        f: Elimination forest of g.
        c1: Attachment constant for the refutation rule.
        reject: With it off, oversized groups on three or more attachments are
            left for the solver instead of refuting 1-planarity.

    Returns:
        KernelOutcome with one piece per split instance, each carrying its
        uncrossable hub edges, or an early NotOnePlanar verdict.
    """
    if not f.is_valid_for(g):
        raise ValueError("forest is not an elimination forest of the graph")
    active = _active(g)
    if len(active) > 2 and not nx.is_biconnected(g.nx_graph.subgraph(active)):
        raise ValueError("tree-depth kernel expects a 2-connected graph")

    instances = [_Instance(g, f)]
    records = []
    queue = deque([0])
    while queue:
        p = queue.popleft()
        inst = instances[p]
        parts = blocks(inst.graph)
        if len(parts) > 1:
            pieces = []
            for b in parts:
                edges = frozenset(make_edge(b.vertices[u], b.vertices[v]) for u, v in b.graph.edges)
                pieces.append(Graph(g.n, edges))
            inst.graph = pieces[0]
            inst.uncrossable = {e for e in inst.uncrossable if e in pieces[0].edges}
            children = []
            for piece in pieces[1:]:
                children.append(len(instances))
                instances.append(_Instance(piece, inst.forest, {e for e in inst.uncrossable if e in piece.edges}))
            records.append(BlockSplit(p, tuple(children)))
            queue.extend([p] + children)
            continue

        forest = normalize_forest(inst.graph, inst.forest.restricted(_active(inst.graph)))
        inst.forest = forest
        width = 2 ** forest.depth
        split = None
        for v in range(g.n):
            if not forest.children[v]:
                continue
            classes = classify_children(inst.graph, forest, v)
            for S in sorted(classes.groups, key=sorted):
                members = classes.groups[S]
                if len(S) >= 3 and len(members) > c1 * width and reject:
                    logger.info("td_kernel_rejected", node=v, attachments=len(S), children=len(members), depth=forest.depth)
                    return KernelOutcome(kernel_rejection("attachments"), host_n=g.n,
                                         details={"depth": forest.depth})
                if len(S) == 2 and len(members) > width and split is None:
                    split = (S, members)
        if split is None:
            continue

        S, members = split
        shared = make_edge(*sorted(S))
        added = shared not in inst.graph.edges
        children = []
        cut: Set[int] = set()
        for c in members:
            tree = set(forest.subtree(c))
            cut |= tree
            keep = tree | S
            edges = frozenset(e for e in inst.graph.edges if e[0] in keep and e[1] in keep) | {shared}
            children.append(len(instances))
            instances.append(_Instance(
                Graph(g.n, edges),
                forest,
                {e for e in inst.uncrossable if e in edges} | {shared},
            ))
        inst.graph = Graph(g.n, frozenset(e for e in inst.graph.edges if not (set(e) & cut)) | {shared})
        inst.uncrossable = {e for e in inst.uncrossable if e in inst.graph.edges} | {shared}
        records.append(UncrossableSplit(shared, p, tuple(children), added))
        queue.extend([p] + children)

    pieces = [
        Piece(inst.graph, ConstraintSet(uncrossable=frozenset(inst.uncrossable)))
        for inst in instances
    ]
    outcome = KernelOutcome(None, pieces, LiftPlan(tuple(records)), g.n, {"depth": f.depth})
    logger.info("kernel_built", strategy="treedepth", depth=f.depth, pieces=len(pieces), vertices=outcome.kernel_size)
    return outcome


def pipeline_td(
    g: Graph,
    budget: int,
    c1: int = 20,
    reject: bool = True,
    forest: Optional[EliminationForest] = None,
    max_d: int = 6,
    workers: int = 1,
    seed: int = 0,
) -> SolveOutcome:
    """Decide 1-planarity block by block through the tree-depth kernel.

    Args:
        g: Graph to decide.
        budget: Search nodes allowed per kernel piece block.
        c1: Attachment constant; groups on three or more ancestors with more than
            c1 * 2^depth members refute 1-planarity.
        reject: Apply that refutation; off hands such groups to the solver.
        forest: Elimination forest of g to use instead of an optimal one per block.
        max_d: Largest tree-depth searched for; a deeper block ends undecided.
        workers: Process count handed to the piece solver.
        seed: Tie-break seed for the piece solver.

    Returns:
        SolveOutcome with the merged lifted witness, a rejection reason, or
        BudgetExceeded.

    Raises:
        ValueError: If forest is not an elimination forest of g.
    """
    stats = SearchStats()
    parameters: Dict[str, object] = {"d": []}
    kernel_info: Dict[str, object] = {"pieces": [], "vertices": []}

    def finish(outcome: SolveOutcome) -> SolveOutcome:
        outcome.stats = stats
        outcome.parameters = parameters
        outcome.kernel = kernel_info
        logger.info("pipeline_finished", strategy="treedepth", verdict=outcome.verdict.value, reason=outcome.reason)
        return outcome

    if g.n >= 3 and g.m > 4 * g.n - 8:
        return finish(SolveOutcome.not_one_planar(Reason.EDGE_DENSITY))
    if forest is not None and not forest.is_valid_for(g):
        raise ValueError("forest is not an elimination forest of the graph")

    witness = CrossingWitness()
    exceeded = False
    for block in blocks(g):
        bg = block.graph
        if forest is not None:
            bf = forest.induced(block.vertices)
        else:
            found = tree_depth(bg, max_d)
            if found is None:
                exceeded = True
                continue
            bf = found[1]
        bf = normalize_forest(bg, bf)
        parameters["d"].append(bf.depth)
        ko = td_kernelize(bg, bf, c1, reject)
        if ko.rejected:
            return finish(SolveOutcome.not_one_planar(ko.early_verdict))
        kernel_info["pieces"].append(len(ko.pieces))
        kernel_info["vertices"].append(ko.kernel_size)

        solved = []
        block_exceeded = False
        for piece in ko.pieces:
            outcome = decide(piece.graph, piece.constraints, budget=budget, workers=workers, seed=seed)
            stats.absorb(outcome.stats)
            if outcome.decided and not outcome.is_one_planar:
                return finish(SolveOutcome.not_one_planar(outcome.reason))
            if not outcome.decided:
                block_exceeded = True
            solved.append(outcome.witness)
        if block_exceeded:
            exceeded = True
            continue
        witness = witness.union(ko.reconstruct(solved).mapped(block.vertices))

    if exceeded:
        return finish(SolveOutcome.budget_exceeded(stats))
    if not verify_witness(g, witness):
        raise RuntimeError("merged tree-depth witness does not verify")
    return finish(SolveOutcome.one_planar(witness))
