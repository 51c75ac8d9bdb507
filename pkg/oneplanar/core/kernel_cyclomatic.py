import math
from typing import Dict, List

from oneplanar.core.embedding import CrossingWitness, verify_witness
from oneplanar.core.graph import (
    Graph,
    LiftPlan,
    PathTruncation,
    blocks,
    compact,
    cyclomatic_number,
    make_edge,
    maximal_degree_two_paths,
    two_core,
)
from oneplanar.core.lift import KernelOutcome, Piece, lift_witness
from oneplanar.core.solver import SolveOutcome, decide
from oneplanar.utils import logger
from oneplanar.utils.types import InvalidWitnessError, Reason, SearchStats


def interior_cap(paths: int) -> int:
    """Most interior vertices a degree-two path keeps when the block has `paths` of them."""
    return 2 * math.factorial(paths) + 1


def cyclo_kernelize(g: Graph) -> KernelOutcome:
    """Two-core, then truncate long degree-two paths block by block.

    Blocks that are bare cycles or single edges are planar on their own and
    leave no piece behind.

    Args:
        g: Any graph.

    Returns:
        KernelOutcome whose pieces are the truncated blocks of the 2-core, each
        with its own truncation plan and block vertex map; the outcome plan
        holds the tree stripping. Details list k_cyclo and path counts per block.
    """
    core, plan = two_core(g)
    pieces: List[Piece] = []
    per_block_k: List[int] = []
    per_block_p: List[int] = []
    dropped = 0
    for block in blocks(core):
        bg = block.graph
        if bg.m <= 1 or all(bg.degree(v) == 2 for v in range(bg.n)):
            dropped += 1
            continue
        paths = maximal_degree_two_paths(bg)
        cap = interior_cap(len(paths))
        records = []
        removed = set()
        edges = set(bg.edges)
        for path_id, path in enumerate(paths):
            if len(path.interior) <= cap:
                continue
            record = PathTruncation(path_id, path.endpoints, path.interior, cap)
            records.append(record)
            tail = path.walk()[cap:]
            edges.difference_update(make_edge(tail[i], tail[i + 1]) for i in range(len(tail) - 1))
            edges.add(record.kernel_edge)
            removed.update(path.interior[cap:])
        kernel, compaction = compact(Graph(bg.n, frozenset(edges)), removed)
        pieces.append(Piece(kernel, origin=block.vertices, plan=LiftPlan(tuple(records) + (compaction,))))
        per_block_k.append(cyclomatic_number(bg))
        per_block_p.append(len(paths))
        logger.debug("block_truncated", k=per_block_k[-1], paths=len(paths), cap=cap, truncated=len(records))

    outcome = KernelOutcome(None, pieces, plan, g.n, {
        "k_cyclo": per_block_k,
        "paths": per_block_p,
        "dropped_blocks": dropped,
    })
    logger.info("kernel_built", strategy="cyclomatic", pieces=len(pieces), vertices=outcome.kernel_size)
    return outcome


def cyclo_lift(plan: LiftPlan, kernel: Graph, witness: CrossingWitness) -> CrossingWitness:
    """Undo path truncations and leaf removals; the crossing count stays the same."""
    witness.validate(kernel)
    lifted = lift_witness(plan, witness)
    original = plan.replay(kernel)
    if len(lifted) != len(witness) or not verify_witness(original, lifted):
        raise InvalidWitnessError("lifted witness does not verify on the original graph")
    return lifted


def pipeline_cyclo(g: Graph, budget: int, workers: int = 1, seed: int = 0) -> SolveOutcome:
    """Decide 1-planarity on the cyclomatic kernel of every block and lift the result.

    Args:
        g: Graph to decide.
        budget: Search nodes allowed per kernel block.
        workers: Process count handed to the kernel solver.
        seed: Tie-break seed for the kernel solver.

    Returns:
        SolveOutcome with a witness lifted through every truncated path and
        stripped tree, a refutation reason, or BudgetExceeded.
    """
    stats = SearchStats()
    if g.n >= 3 and g.m > 4 * g.n - 8:
        outcome = SolveOutcome.not_one_planar(Reason.EDGE_DENSITY, stats)
        logger.info("pipeline_finished", strategy="cyclomatic", verdict=outcome.verdict.value, reason=outcome.reason)
        return outcome

    ko = cyclo_kernelize(g)
    parameters: Dict[str, object] = {"k_cyclo": ko.details["k_cyclo"]}
    kernel_info: Dict[str, object] = {
        "vertices": [piece.graph.n for piece in ko.pieces],
        "edges": [piece.graph.m for piece in ko.pieces],
    }

    witnesses = []
    exceeded = False
    verdict = None
    for piece in ko.pieces:
        result = decide(piece.graph, piece.constraints, budget=budget, workers=workers, seed=seed)
        stats.absorb(result.stats)
        if result.decided and not result.is_one_planar:
            verdict = SolveOutcome.not_one_planar(result.reason, stats)
            break
        exceeded = exceeded or not result.decided
        witnesses.append(result.witness)

    if verdict is None and exceeded:
        verdict = SolveOutcome.budget_exceeded(stats)
    if verdict is None:
        merged = CrossingWitness()
        for piece, w in zip(ko.pieces, witnesses):
            merged = merged.union(cyclo_lift(piece.plan, piece.graph, w).mapped(piece.origin))
        witness = lift_witness(ko.plan, merged)
        if not verify_witness(g, witness):
            raise RuntimeError("lifted cyclomatic witness does not verify")
        verdict = SolveOutcome.one_planar(witness, stats)
    verdict.parameters = parameters
    verdict.kernel = kernel_info
    logger.info("pipeline_finished", strategy="cyclomatic", verdict=verdict.verdict.value, reason=verdict.reason)
    return verdict
