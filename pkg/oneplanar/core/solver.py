import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from oneplanar.core.embedding import (
    CrossingWitness,
    EdgePair,
    Multigraph,
    is_planar,
    make_pair,
    planarity_obstruction,
    planarize_with_kites,
    verify_witness,
)
from oneplanar.core.graph import Edge, Graph, blocks, make_edge
from oneplanar.utils import logger
from oneplanar.utils.types import Reason, SearchStats, Verdict

# Edges of this color never cross.
RESERVED_COLOR = 0

DEFAULT_BUDGET = 1_000_000

# search nodes spent shrinking a witness after the first one is found
SHRINK_ALLOWANCE = 2_000


@dataclass(frozen=True)
class ConstraintSet:
    """Restrictions on which edge pairs may cross.

    `uncrossable` is the F of the constrained problem; `colors` implements the
    colored variant (equal colors only, RESERVED_COLOR never).
    """
    uncrossable: FrozenSet[Edge] = frozenset()
    forbidden_pairs: FrozenSet[EdgePair] = frozenset()
    colors: Optional[Mapping[Edge, int]] = field(default=None, hash=False)
    mandatory_uncrossed_paths: Tuple[Tuple[Edge, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "uncrossable", frozenset(make_edge(*e) for e in self.uncrossable))
        object.__setattr__(self, "forbidden_pairs", frozenset(make_pair(e, f) for e, f in self.forbidden_pairs))
        if self.colors is not None:
            object.__setattr__(self, "colors", {make_edge(*e): c for e, c in self.colors.items()})
        object.__setattr__(self, "mandatory_uncrossed_paths", tuple(
            tuple(make_edge(*e) for e in path) for path in self.mandatory_uncrossed_paths
        ))

    @property
    def is_empty(self) -> bool:
        return not (self.uncrossable or self.forbidden_pairs or self.colors or self.mandatory_uncrossed_paths)

    def compiled(self) -> "ConstraintSet":
        """Fold the mandatory paths into `uncrossable`."""
        extra = {e for path in self.mandatory_uncrossed_paths for e in path}
        return ConstraintSet(self.uncrossable | extra, self.forbidden_pairs, self.colors, ())

    def is_crossable(self, e: Edge) -> bool:
        e = make_edge(*e)
        if e in self.uncrossable:
            return False
        if any(e in path for path in self.mandatory_uncrossed_paths):
            return False
        return self.colors is None or self.colors.get(e, RESERVED_COLOR) != RESERVED_COLOR

    def allows(self, e: Edge, f: Edge) -> bool:
        if not (self.is_crossable(e) and self.is_crossable(f)):
            return False
        if make_pair(e, f) in self.forbidden_pairs:
            return False
        return self.colors is None or self.colors[make_edge(*e)] == self.colors[make_edge(*f)]

    def validate(self, g: Graph) -> None:
        for e in self.uncrossable | {e for path in self.mandatory_uncrossed_paths for e in path}:
            if e not in g.edges:
                raise ValueError(f"constraint names unknown edge {e}")
        for e, f in self.forbidden_pairs:
            if e not in g.edges or f not in g.edges:
                raise ValueError(f"forbidden pair {(e, f)} names an unknown edge")
        if self.colors is not None:
            missing = g.edges - set(self.colors)
            if missing:
                raise ValueError(f"color map misses {len(missing)} edges, e.g. {min(missing)}")

    def restricted(self, origin: Sequence[int], local: Graph) -> "ConstraintSet":
        """Translate host-coordinate constraints onto a subgraph whose vertex i is host origin[i]."""
        index = {v: i for i, v in enumerate(origin)}

        def to_local(e: Edge) -> Optional[Edge]:
            if e[0] in index and e[1] in index:
                le = make_edge(index[e[0]], index[e[1]])
                if le in local.edges:
                    return le
            return None

        uncrossable = {le for le in map(to_local, self.uncrossable) if le is not None}
        forbidden = set()
        for e, f in self.forbidden_pairs:
            le, lf = to_local(e), to_local(f)
            if le is not None and lf is not None:
                forbidden.add((le, lf))
        colors = None
        if self.colors is not None:
            colors = {}
            for e, c in self.colors.items():
                le = to_local(e)
                if le is not None:
                    colors[le] = c
        paths = tuple(
            tuple(le for le in map(to_local, path) if le is not None)
            for path in self.mandatory_uncrossed_paths
        )
        return ConstraintSet(frozenset(uncrossable), frozenset(forbidden), colors, paths)


@dataclass
class SolveOutcome:
    """OnePlanar with a witness, NotOnePlanar with a reason, or BudgetExceeded."""
    verdict: Verdict
    witness: Optional[CrossingWitness] = None
    reason: Optional[str] = None
    stats: SearchStats = field(default_factory=SearchStats)
    parameters: Dict[str, Any] = field(default_factory=dict)
    kernel: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def one_planar(cls, witness: CrossingWitness, stats: Optional[SearchStats] = None) -> "SolveOutcome":
        return cls(Verdict.ONE_PLANAR, witness, None, stats or SearchStats())

    @classmethod
    def not_one_planar(cls, reason: str, stats: Optional[SearchStats] = None) -> "SolveOutcome":
        return cls(Verdict.NOT_ONE_PLANAR, None, str(getattr(reason, "value", reason)), stats or SearchStats())

    @classmethod
    def budget_exceeded(cls, stats: SearchStats) -> "SolveOutcome":
        return cls(Verdict.UNKNOWN, None, None, stats)

    @property
    def is_one_planar(self) -> bool:
        return self.verdict == Verdict.ONE_PLANAR

    @property
    def decided(self) -> bool:
        return self.verdict != Verdict.UNKNOWN


def candidate_pairs(g: Graph, cs: Optional[ConstraintSet] = None) -> List[EdgePair]:
    """Vertex-disjoint edge pairs the constraints allow to cross, in edge-id order."""
    cs = cs or ConstraintSet()
    edges = g.sorted_edges
    result = []
    for i, e in enumerate(edges):
        if not cs.is_crossable(e):
            continue
        for f in edges[i + 1:]:
            if e[0] in f or e[1] in f:
                continue
            if cs.allows(e, f):
                result.append((e, f))
    return result


class _BudgetExhausted(Exception):
    pass


class _MatchingSearch:
    """Depth-first search over crossing matchings.

    At every node the kite planarization of the current matching is tested; when
    it is not planar, a Kuratowski subgraph of it is taken and some original,
    still uncrossed edge of that subgraph must join the matching. Candidates are
    tried one after another, each failed candidate staying uncrossed for the
    rest of the node, so no matching is visited twice.
    """

    def __init__(self, g: Graph, cs: ConstraintSet, budget: int, stats: SearchStats, seed: int = 0):
        self.g = g
        self.edges = g.sorted_edges
        self.budget = budget
        self.stats = stats
        self.cap: Optional[int] = None
        # tie-break rank per edge id; seed 0 keeps edge-id order
        m = len(self.edges)
        self.rank = list(range(m)) if seed == 0 else random.Random(seed).sample(range(m), m)
        pairs = candidate_pairs(g, cs)
        index = g.edge_index
        partners: List[List[int]] = [[] for _ in self.edges]
        for e, f in pairs:
            i, j = index[e], index[f]
            partners[i].append(j)
            partners[j].append(i)
        self.partners = [tuple(sorted(p, key=self.rank.__getitem__)) for p in partners]
        # a simple planar graph on n + c vertices has at most 3(n + c) - 6 edges
        self.min_crossings = max(0, g.m - 3 * g.n + 6) if g.n >= 3 else 0

    def run(self) -> Optional[CrossingWitness]:
        """First witness found, then shrunk toward the Euler bound.

        Each shrinking round caps the matching size one below the best witness.
        Rounds share an allowance of SHRINK_ALLOWANCE nodes beyond what the
        first search used; running out keeps the best witness so far.
        """
        best = self._search((), frozenset(), frozenset())
        self.budget = min(self.budget, self.stats.nodes + SHRINK_ALLOWANCE)
        while best is not None and len(best) > self.min_crossings:
            self.cap = len(best) - 1
            try:
                smaller = self._search((), frozenset(), frozenset())
            except _BudgetExhausted:
                break
            if smaller is None:
                break
            best = smaller
        return best

    def _witness(self, matching: Tuple[Tuple[int, int], ...]) -> CrossingWitness:
        return CrossingWitness(frozenset((self.edges[i], self.edges[j]) for i, j in matching))

    def _live_partners(self, i: int, blocked: FrozenSet[int]) -> List[int]:
        return [j for j in self.partners[i] if j not in blocked]

    def _search(self, matching, crossed: FrozenSet[int], frozen: FrozenSet[int]) -> Optional[CrossingWitness]:
        self.stats.nodes += 1
        if self.stats.nodes > self.budget:
            raise _BudgetExhausted()

        blocked = crossed | frozen
        open_edges = {
            i for i in range(len(self.edges))
            if i not in blocked and self._live_partners(i, blocked)
        }
        if len(matching) + len(open_edges) // 2 < self.min_crossings:
            self.stats.prunes += 1
            return None

        witness = self._witness(matching)
        planarization = planarize_with_kites(self.g, witness)
        self.stats.planarity_checks += 1
        obstruction = planarity_obstruction(planarization.graph)
        if obstruction is None:
            return witness
        if self.cap is not None and len(matching) >= self.cap:
            self.stats.prunes += 1
            return None

        # everything that can no longer change must already be planar
        provenance = planarization.provenance
        persistent = tuple(
            e for eid, e in enumerate(planarization.graph.edges)
            if not (provenance[eid][0] == "edge" and provenance[eid][1] in open_edges)
        )
        self.stats.planarity_checks += 1
        if not is_planar(Multigraph(planarization.graph.n, persistent)):
            self.stats.prunes += 1
            return None

        classes = planarization.graph.parallel_classes
        candidates = []
        for pair in obstruction:
            ids = classes[pair]
            if any(provenance[eid][0] != "edge" for eid in ids):
                continue
            i = provenance[ids[0]][1]
            if i in open_edges:
                candidates.append(i)
        # fail first: fewest remaining partners
        candidates.sort(key=lambda i: (len(self._live_partners(i, blocked)), self.rank[i]))

        frozen_here = set(frozen)
        for i in candidates:
            for j in self.partners[i]:
                if j in crossed or j in frozen_here:
                    continue
                step = (min(i, j), max(i, j))
                found = self._search(matching + (step,), crossed | {i, j}, frozenset(frozen_here))
                if found is not None:
                    return found
            frozen_here.add(i)
        self.stats.prunes += 1
        return None


def _solve_block(args) -> Tuple[str, Optional[CrossingWitness], SearchStats]:
    """Solve one block; module level so worker processes can run it."""
    graph, cs, budget, seed = args
    stats = SearchStats()
    if graph.n >= 3 and graph.m > 4 * graph.n - 8:
        return Reason.EDGE_DENSITY.value, None, stats
    if graph.m <= 8 and cs.is_empty:
        # every graph with at most 8 edges is planar
        return "ok", CrossingWitness(), stats
    try:
        found = _MatchingSearch(graph, cs, budget, stats, seed).run()
    except _BudgetExhausted:
        return "budget", None, stats
    if found is None:
        return Reason.EXHAUSTED_SEARCH.value, None, stats
    return "ok", found, stats


def decide(
    g: Graph,
    cs: Optional[ConstraintSet] = None,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    seed: int = 0,
) -> SolveOutcome:
    """Exact constrained 1-planarity, block by block.

    The node budget applies to each block separately, so the verdict does not
    depend on the number of workers.

    Args:
        g: Graph to decide.
        cs: Crossing constraints; None means unconstrained.
        budget: Search nodes allowed per block.
        workers: Process count for solving blocks in parallel.
        seed: Tie-break order among equally constrained candidates; 0 is edge-id order.

    Returns:
        SolveOutcome carrying a verified witness, a refutation reason, or BudgetExceeded.
    """
    cs = (cs or ConstraintSet()).compiled()
    cs.validate(g)
    parts = blocks(g)
    jobs = [(b.graph, cs.restricted(b.vertices, b.graph), budget, seed) for b in parts]

    stats = SearchStats()
    results = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_block, jobs))
    else:
        for job in jobs:
            result = _solve_block(job)
            results.append(result)
            if result[0] not in ("ok", "budget"):
                break

    witness = CrossingWitness()
    exceeded = False
    for block, (status, found, block_stats) in zip(parts, results):
        stats.absorb(block_stats)
        if status == "budget":
            exceeded = True
        elif status != "ok":
            logger.info("decide_finished", verdict="not-one-planar", reason=status, n=g.n, m=g.m, nodes=stats.nodes)
            return SolveOutcome.not_one_planar(status, stats)
        else:
            witness = witness.union(found.mapped(block.vertices))

    if exceeded:
        logger.info("decide_finished", verdict="unknown", n=g.n, m=g.m, nodes=stats.nodes)
        return SolveOutcome.budget_exceeded(stats)

    if not verify_witness(g, witness, cs):
        logger.error("decide_witness_failed", n=g.n, m=g.m, crossings=len(witness))
        raise RuntimeError("search produced a witness that does not verify")
    logger.info("decide_finished", verdict="one-planar", n=g.n, m=g.m, crossings=len(witness), nodes=stats.nodes)
    return SolveOutcome.one_planar(witness, stats)


def _matchings(pairs: Sequence[EdgePair], size: int, start: int = 0, used: FrozenSet[Edge] = frozenset()) -> Iterator[List[EdgePair]]:
    if size == 0:
        yield []
        return
    for k in range(start, len(pairs)):
        e, f = pairs[k]
        if e in used or f in used:
            continue
        for rest in _matchings(pairs, size - 1, k + 1, used | {e, f}):
            yield [pairs[k]] + rest


def exhaustive_oracle(g: Graph, cs: Optional[ConstraintSet] = None, budget: Optional[int] = None) -> SolveOutcome:
    """Try every matching of candidate pairs, smallest first; no pruning at all.

    Meant for graphs of about nine vertices at most. The first witness found
    has minimum size. With a budget, more than that many tried matchings end
    in BudgetExceeded.
    """
    cs = (cs or ConstraintSet()).compiled()
    pairs = candidate_pairs(g, cs)
    stats = SearchStats()
    for size in range(g.m // 2 + 1):
        found_any = False
        for matching in _matchings(pairs, size):
            found_any = True
            stats.nodes += 1
            if budget is not None and stats.nodes > budget:
                return SolveOutcome.budget_exceeded(stats)
            witness = CrossingWitness(frozenset(matching))
            stats.planarity_checks += 1
            if verify_witness(g, witness, cs):
                return SolveOutcome.one_planar(witness, stats)
        if not found_any:
            break
    return SolveOutcome.not_one_planar(Reason.EXHAUSTED_SEARCH, stats)
