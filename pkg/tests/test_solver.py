import random
from itertools import combinations

import pytest

from oneplanar.core.embedding import verify_witness
from oneplanar.core.generators import generate
from oneplanar.core.graph import Graph
from oneplanar.core.solver import (
    RESERVED_COLOR,
    ConstraintSet,
    candidate_pairs,
    decide,
    exhaustive_oracle,
)
from oneplanar.utils.types import Reason, Verdict
from tests.conftest import atlas_graphs, bipartite, complete, random_sparse


def test_candidate_pairs_are_disjoint_and_ordered(k5):
    pairs = candidate_pairs(k5)
    assert len(pairs) == 15
    assert pairs == sorted(pairs)
    assert all(not set(e) & set(f) for e, f in pairs)


def test_candidate_pairs_respect_constraints(k5):
    cs = ConstraintSet(uncrossable=frozenset({(0, 1)}), forbidden_pairs=frozenset({((0, 2), (1, 3))}))
    pairs = candidate_pairs(k5, cs)
    assert all((0, 1) not in pair for pair in pairs)
    assert ((0, 2), (1, 3)) not in pairs
    assert len(pairs) == 15 - 3 - 1


def test_constraint_validation(k5):
    with pytest.raises(ValueError):
        ConstraintSet(uncrossable=frozenset({(0, 9)})).validate(k5)
    with pytest.raises(ValueError):
        ConstraintSet(colors={(0, 1): 1}).validate(k5)


def test_mandatory_paths_fold_into_uncrossable():
    cs = ConstraintSet(mandatory_uncrossed_paths=(((0, 1), (1, 2)),))
    assert not cs.is_crossable((2, 1))
    assert cs.compiled().uncrossable == {(0, 1), (1, 2)}
    assert cs.compiled().mandatory_uncrossed_paths == ()


def test_reserved_color_is_uncrossable():
    cs = ConstraintSet(colors={(0, 1): RESERVED_COLOR, (2, 3): 4, (4, 5): 4})
    assert not cs.is_crossable((0, 1))
    assert cs.allows((2, 3), (4, 5))


@pytest.mark.parametrize("a, b", [(1, 8), (2, 8), (3, 6), (4, 4)])
def test_one_planar_bipartite(a, b):
    outcome = decide(bipartite(a, b))
    assert outcome.verdict == Verdict.ONE_PLANAR
    assert verify_witness(bipartite(a, b), outcome.witness)


@pytest.mark.parametrize("a, b", [(3, 7), (4, 5)])
def test_not_one_planar_bipartite(a, b):
    outcome = decide(bipartite(a, b))
    assert outcome.verdict == Verdict.NOT_ONE_PLANAR
    assert outcome.reason == Reason.EXHAUSTED_SEARCH.value


def test_complete_graphs():
    for n in range(1, 7):
        assert decide(complete(n)).is_one_planar
    k7 = decide(complete(7))
    assert k7.verdict == Verdict.NOT_ONE_PLANAR
    assert k7.reason == Reason.EDGE_DENSITY.value


def test_budget_exceeded_is_an_outcome():
    outcome = decide(bipartite(3, 7), budget=3)
    assert outcome.verdict == Verdict.UNKNOWN
    assert not outcome.decided
    assert outcome.stats.nodes > 3


def test_decide_is_blockwise():
    # two K6 sharing vertex 0
    edges = set(combinations(range(6), 2)) | {(0, v) for v in range(6, 11)} | set(combinations(range(6, 11), 2))
    g = Graph(11, frozenset(edges))
    outcome = decide(g)
    assert outcome.is_one_planar
    assert len(outcome.witness) >= 6
    assert verify_witness(g, outcome.witness)


def test_uncrossable_constraint_can_refute(k5):
    # K5 needs one crossing; forbid every edge except (0, 1) from crossing
    cs = ConstraintSet(uncrossable=frozenset(k5.edges - {(0, 1)}))
    assert decide(k5, cs).verdict == Verdict.NOT_ONE_PLANAR
    assert exhaustive_oracle(k5, cs).verdict == Verdict.NOT_ONE_PLANAR


def test_minimum_witnesses():
    assert len(exhaustive_oracle(complete(5)).witness) == 1
    assert len(exhaustive_oracle(complete(6)).witness) == 3


def test_agrees_with_oracle_on_atlas():
    for g in atlas_graphs(6):
        fast = decide(g)
        slow = exhaustive_oracle(g)
        assert fast.verdict == slow.verdict, sorted(g.edges)


ORACLE_BUDGET = 500


def constraints_for(regime: str, g: Graph, rng: random.Random):
    edges = g.sorted_edges
    if regime == "uncrossable":
        return ConstraintSet(uncrossable=frozenset(rng.sample(edges, len(edges) // 4)))
    if regime == "colors":
        return ConstraintSet(colors={e: rng.randint(1, 2) for e in edges})
    return None


@pytest.mark.parametrize("regime", ["none", "uncrossable", "colors"])
def test_agrees_with_oracle_on_random_graphs(regime):
    rng = random.Random({"none": 1, "uncrossable": 2, "colors": 3}[regime])
    compared = 0
    for _ in range(200):
        n = rng.randint(7, 9)
        g = random_sparse(rng, n)
        assert g.m <= 4 * n - 8
        cs = constraints_for(regime, g, rng)
        fast = decide(g, cs)
        if fast.is_one_planar:
            assert verify_witness(g, fast.witness, cs)
        slow = exhaustive_oracle(g, cs, budget=ORACLE_BUDGET)
        if fast.decided and slow.decided:
            assert fast.verdict == slow.verdict, (sorted(g.edges), regime)
            compared += 1
    assert compared >= 20


def test_oracle_budget_ends_in_unknown():
    outcome = exhaustive_oracle(bipartite(3, 7), budget=10)
    assert outcome.verdict == Verdict.UNKNOWN
    assert outcome.stats.nodes == 11


def test_k6_witness_is_minimum(k6):
    outcome = decide(k6)
    assert outcome.is_one_planar
    assert len(outcome.witness) == 3


def test_adding_constraints_never_helps():
    rng = random.Random(5)
    for g in atlas_graphs(6):
        edges = g.sorted_edges
        few = frozenset(rng.sample(edges, len(edges) // 4))
        more = few | frozenset(rng.sample(edges, len(edges) // 3))
        verdicts = [decide(g, ConstraintSet(uncrossable=u)).verdict for u in (frozenset(), few, more)]
        for looser, tighter in zip(verdicts, verdicts[1:]):
            assert not (looser == Verdict.NOT_ONE_PLANAR and tighter == Verdict.ONE_PLANAR), sorted(g.edges)


def test_edge_deletion_keeps_one_planarity():
    for g in atlas_graphs(6):
        if not decide(g).is_one_planar:
            continue
        for e in g.sorted_edges:
            assert decide(Graph(g.n, g.edges - {e})).is_one_planar, (sorted(g.edges), e)


@pytest.mark.parametrize("seed", [0, 7])
def test_seeded_search_is_deterministic(seed):
    g = generate("randomWithCyclomatic", {"n": 12, "k": 7}, seed=4)
    first = decide(g, seed=seed)
    again = decide(g, seed=seed)
    assert first.verdict == again.verdict == decide(g).verdict
    assert first.witness == again.witness
    if first.is_one_planar:
        assert verify_witness(g, first.witness)


def test_parallel_workers_agree():
    g = generate("randomWithCyclomatic", {"n": 18, "k": 8}, seed=11)
    assert decide(g, workers=2).verdict == decide(g).verdict
