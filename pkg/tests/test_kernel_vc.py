import random
from itertools import combinations
from typing import Optional

import pytest

from oneplanar.core.embedding import verify_witness
from oneplanar.core.engine import vc_size_prediction
from oneplanar.core.generators import generate
from oneplanar.core.graph import Graph, blocks
from oneplanar.core.kernel_vc import (
    pipeline_vc,
    split_graph_one_planar,
    split_partition,
    vc_kernelize,
    vc_lift,
    vc_solve_kernel,
    vertex_cover,
)
from oneplanar.core.solver import decide
from oneplanar.utils.types import NotSplitGraphError, Reason, Verdict, kernel_rejection
from tests.conftest import bipartite, complete


@pytest.mark.parametrize("g, size", [
    (complete(5), 4),
    (bipartite(3, 9), 3),
    (generate("cycle", {"n": 7}), 4),
    (generate("path", {"n": 6}), 3),
])
def test_vertex_cover_is_minimum(g, size):
    cover = vertex_cover(g, 10)
    assert len(cover) == size
    assert all(u in cover or v in cover for u, v in g.edges)


def test_vertex_cover_cap():
    assert vertex_cover(complete(8), 5) is None


def test_kernelize_rejects_non_cover():
    with pytest.raises(ValueError):
        vc_kernelize(complete(4), {0, 1})


@pytest.mark.parametrize("k, members", [(2, 6), (3, 2), (3, 10), (4, 9)])
def test_group_truncation_size(k, members):
    # hubs 0 and 1; the other cover vertices and all outside vertices join both
    edges = {(h, c) for h in (0, 1) for c in range(2, k + members)}
    g = Graph(k + members, frozenset(edges))
    ck = vc_kernelize(g, range(k))
    (group,) = ck.groups
    assert len(group.kept) == min(members, max(1, 2 * k - 3))
    assert group.removed_count == members - len(group.kept)
    assert ck.plan.replay(ck.kernel) == g


def test_outside_vertex_groups():
    # K_{3,i}: every outside vertex has degree three, so nothing truncates
    ck = vc_kernelize(bipartite(3, 5), range(3))
    assert ck.kernel.n == 8
    assert ck.high_degree == 5
    # K_{2,i} with an extra cover vertex c joined to both hubs: groups of 2k - 3 = 3
    edges = {(0, 2), (1, 2)} | {(0, w) for w in range(3, 13)} | {(1, w) for w in range(3, 13)}
    ck = vc_kernelize(Graph(13, frozenset(edges)), range(3))
    (group,) = ck.groups
    assert len(group.kept) == 3
    assert group.removed_count == 7
    assert ck.kernel.n == 6


def test_k37_rejection():
    ck = vc_kernelize(bipartite(3, 7), range(3))
    assert ck.early_verdict == kernel_rejection("k37")


def test_kernel_solve_and_lift():
    edges = {(0, 2), (1, 2)} | {(0, w) for w in range(3, 40)} | {(1, w) for w in range(3, 40)} | {(0, 40)}
    g = Graph(41, frozenset(edges))
    ck = vc_kernelize(g, range(3))
    outcome = vc_solve_kernel(ck, budget=10_000)
    assert outcome.is_one_planar
    lifted = vc_lift(ck, outcome.witness)
    assert len(lifted) == len(outcome.witness)
    assert verify_witness(g, lifted)


def test_pipeline_bipartite_table():
    outcome = pipeline_vc(bipartite(3, 7), budget=1000)
    assert outcome.reason == Reason.BIPARTITE_TABLE.value
    assert pipeline_vc(bipartite(3, 6), budget=1_000_000).is_one_planar


def test_pipeline_density_guard():
    assert pipeline_vc(complete(7), budget=10).reason == Reason.EDGE_DENSITY.value


def test_pipeline_cover_over_cap_is_unknown():
    outcome = pipeline_vc(generate("cycle", {"n": 30}), budget=10, max_k=3)
    assert outcome.verdict == Verdict.UNKNOWN


def kernel_reference(g: Graph) -> Optional[Verdict]:
    """Verdict from each block's kernel solved without anchor constraints; None when undecided."""
    verdict = Verdict.ONE_PLANAR
    for block in blocks(g):
        bg = block.graph
        ck = vc_kernelize(bg, vertex_cover(bg, 4))
        if ck.early_verdict is not None:
            return Verdict.NOT_ONE_PLANAR
        assert ck.kernel.n <= vc_size_prediction(ck.k)
        plain = decide(ck.kernel, budget=200_000)
        anchored = vc_solve_kernel(ck, budget=200_000)
        if plain.decided and anchored.decided:
            assert plain.verdict == anchored.verdict, sorted(bg.edges)
        if anchored.is_one_planar:
            lifted = vc_lift(ck, anchored.witness)
            assert len(lifted) == len(anchored.witness)
            assert verify_witness(bg, lifted)
        if not plain.decided:
            verdict = None
        elif not plain.is_one_planar:
            return Verdict.NOT_ONE_PLANAR
    return verdict


def test_pipeline_matches_decide_on_planted_covers():
    rng = random.Random(5)
    compared = 0
    for seed in range(300):
        n = rng.randint(6, 60)
        k = rng.randint(1, min(4, n))
        p = rng.choice([0.2, 0.35, 0.5])
        g = generate("randomWithCover", {"n": n, "k": k, "p": p}, seed=seed)
        via_kernel = pipeline_vc(g, budget=200_000, max_k=4)
        if n <= 12:
            direct = decide(g, budget=200_000)
            assert via_kernel.decided and direct.decided
            expected = direct.verdict
        elif g.m > 4 * n - 8:
            expected = Verdict.NOT_ONE_PLANAR
        else:
            expected = kernel_reference(g)
        if via_kernel.is_one_planar:
            assert verify_witness(g, via_kernel.witness)
        if via_kernel.decided and expected is not None:
            assert via_kernel.verdict == expected, (seed, sorted(g.edges))
            compared += 1
    assert compared >= 150


def test_split_partition():
    g = Graph(6, frozenset(set(combinations(range(3), 2)) | {(0, 3), (1, 4), (2, 5), (0, 5)}))
    clique, independent = split_partition(g)
    assert clique == {0, 1, 2}
    assert independent == {3, 4, 5}
    assert split_partition(generate("cycle", {"n": 5})) is None


def test_split_graph_decisions():
    assert split_graph_one_planar(complete(7), budget=10).reason == kernel_rejection("k7")
    star_clique = Graph(7, frozenset(set(combinations(range(4), 2)) | {(0, 4), (1, 5), (2, 6)}))
    assert split_graph_one_planar(star_clique, budget=10_000).is_one_planar
    with pytest.raises(NotSplitGraphError):
        split_graph_one_planar(generate("cycle", {"n": 5}), budget=10)
