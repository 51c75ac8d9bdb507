from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, List, Optional, Set, Tuple

import networkx as nx

from oneplanar.core.embedding import CrossingWitness
from oneplanar.core.graph import Edge, Graph, make_edge
from oneplanar.core.kernel_treedepth import EliminationForest, ParentMap, pipeline_td
from oneplanar.core.solver import SolveOutcome
from oneplanar.utils import logger
from oneplanar.utils.types import NotACographError, kernel_rejection

UNION = 0
JOIN = 1


@dataclass(frozen=True)
class Cotree:
    """Cotree node: a leaf holds a vertex, an internal node a 0 (union) or 1 (join) label.

    Two vertices are adjacent exactly when their lowest common ancestor is a join.
    """
    label: Optional[int] = None
    vertex: Optional[int] = None
    children: Tuple["Cotree", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.label is None

    @cached_property
    def leaves(self) -> Tuple[int, ...]:
        if self.is_leaf:
            return (self.vertex,)
        return tuple(sorted(v for c in self.children for v in c.leaves))

    def edges(self) -> Set[Edge]:
        result: Set[Edge] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            stack.extend(node.children)
            if node.label == JOIN:
                for i, a in enumerate(node.children):
                    for b in node.children[i + 1:]:
                        result.update(make_edge(u, v) for u in a.leaves for v in b.leaves)
        return result

    def is_canonical(self) -> bool:
        for child in self.children:
            if not child.is_leaf and child.label == self.label:
                return False
            if not child.is_canonical():
                return False
        return self.is_leaf or len(self.children) >= 2


def _split(g: Graph, vertices: List[int], complement: bool) -> List[List[int]]:
    """Components of g[vertices], or of its complement."""
    if not complement:
        return g.components_within(vertices)
    co = nx.complement(g.nx_graph.subgraph(vertices))
    return sorted((sorted(part) for part in nx.connected_components(co)), key=lambda part: part[0])


def _build(g: Graph, vertices: List[int]) -> Optional[Cotree]:
    if len(vertices) == 1:
        return Cotree(vertex=vertices[0])
    for label, complement in ((UNION, False), (JOIN, True)):
        parts = _split(g, vertices, complement)
        if len(parts) > 1:
            children = []
            for part in parts:
                child = _build(g, part)
                if child is None:
                    return None
                children.append(child)
            return Cotree(label, None, tuple(children))
    # connected with a connected complement: not a cograph
    return None


def cotree_build(g: Graph) -> Optional[Cotree]:
    """Canonical cotree of g, or None when g contains an induced P4."""
    if g.n == 0:
        return Cotree(UNION)
    tree = _build(g, list(range(g.n)))
    if tree is None:
        logger.debug("cotree_rejected", n=g.n, m=g.m)
        return None
    if tree.edges() != set(g.edges):
        raise RuntimeError("cotree does not reproduce the graph")
    return tree


def clique_number(t: Cotree) -> int:
    if t.is_leaf:
        return 1
    sizes = [clique_number(c) for c in t.children]
    return sum(sizes) if t.label == JOIN else max(sizes, default=0)


def _biclique_table(t: Cotree, b: int) -> FrozenSet[Tuple[int, int]]:
    """Pairs (p, q), capped at b, such that some K_{p,q} is a subgraph."""
    n = min(len(t.leaves), b)
    one_sided = {(p, 0) for p in range(n + 1)} | {(0, q) for q in range(n + 1)}
    if t.is_leaf:
        return frozenset(one_sided)
    tables = [_biclique_table(c, b) for c in t.children]
    if t.label == UNION:
        # a biclique with both sides nonempty is connected, so it sits in one child
        return frozenset(one_sided.union(*tables))
    acc = {(0, 0)}
    for table in tables:
        acc = {(min(p + x, b), min(q + y, b)) for p, q in acc for x, y in table}
    return frozenset(acc)


def cotree_exclusions(t: Cotree, a: int, b: int) -> Tuple[bool, bool]:
    """(contains K_a, contains K_{b,b}) as subgraphs."""
    return clique_number(t) >= a, (b, b) in _biclique_table(t, b)


def cograph_forest(t: Cotree, a: int, b: int) -> EliminationForest:
    """Elimination forest of depth at most 1 + (a-1)(b-1) for a cograph without K_a and K_{b,b}.

    Every join node contributes a path of the leaves outside its heaviest
    child, unless an ancestor already placed them. Paths hang below the path
    of the nearest join ancestor; remaining vertices become forest leaves.
    """
    has_clique, has_biclique = cotree_exclusions(t, a, b)
    if has_clique or has_biclique:
        raise ValueError(f"cograph contains K_{a} or K_{{{b},{b}}}")
    parent: ParentMap = {}
    claimed: Set[int] = set()
    stack: List[Tuple[Cotree, Optional[int]]] = [(t, None)]
    while stack:
        node, attach = stack.pop()
        if node.is_leaf:
            if node.vertex not in claimed:
                parent[node.vertex] = attach
            continue
        if node.label == JOIN:
            heavy = max(node.children, key=lambda c: (len(c.leaves), -c.leaves[0]))
            skip = set(heavy.leaves) | claimed
            path = [v for v in node.leaves if v not in skip]
            for v in path:
                parent[v] = attach
                attach = v
            claimed.update(path)
        stack.extend((c, attach) for c in node.children)

    forest = EliminationForest.from_map(len(t.leaves), parent)
    if forest.depth > 1 + (a - 1) * (b - 1):
        raise RuntimeError(f"cograph forest has depth {forest.depth}")
    return forest


def pipeline_cograph(
    g: Graph, budget: int, c1: int = 20, reject: bool = True, workers: int = 1, seed: int = 0
) -> SolveOutcome:
    """1-planarity of a cograph: K7 or K_{5,5} refutes it, otherwise a shallow forest drives the tree-depth kernel.

    Args:
        g: A cograph.
        budget: Search nodes allowed per kernel piece block.
        c1: Attachment constant handed to the tree-depth kernel.
        reject: Apply the attachment refutation.
        workers: Process count handed to the piece solver.
        seed: Tie-break seed for the piece solver.

    Returns:
        SolveOutcome from the tree-depth pipeline, or an early K7 / K_{5,5} rejection.

    Raises:
        NotACographError: If g has an induced P4.
    """
    t = cotree_build(g)
    if t is None:
        raise NotACographError("graph contains an induced P4")
    if g.n == 0:
        return SolveOutcome.one_planar(CrossingWitness())
    has_k7, has_k55 = cotree_exclusions(t, 7, 5)
    if has_k7 or has_k55:
        rule = "k7" if has_k7 else "k55"
        logger.info("cograph_rejected", rule=rule, n=g.n)
        return SolveOutcome.not_one_planar(kernel_rejection(rule))
    forest = cograph_forest(t, 7, 5)
    if not forest.is_valid_for(g):
        raise RuntimeError("cograph forest misses an edge")
    return pipeline_td(g, budget, c1=c1, reject=reject, forest=forest, workers=workers, seed=seed)
