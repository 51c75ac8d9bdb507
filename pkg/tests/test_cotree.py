import pytest

from oneplanar.core.cotree import (
    JOIN,
    UNION,
    clique_number,
    cograph_forest,
    cotree_build,
    cotree_exclusions,
    pipeline_cograph,
)
from oneplanar.core.embedding import verify_witness
from oneplanar.core.generators import generate
from oneplanar.core.solver import decide
from oneplanar.utils.types import NotACographError, Verdict, kernel_rejection
from tests.conftest import bipartite, complete


def test_cotree_of_complete_bipartite():
    t = cotree_build(bipartite(3, 4))
    assert t.label == JOIN
    assert sorted(len(c.leaves) for c in t.children) == [3, 4]
    assert all(c.label == UNION for c in t.children)
    assert t.is_canonical()


def test_cotree_rejects_p4():
    assert cotree_build(generate("path", {"n": 4})) is None
    assert cotree_build(generate("cycle", {"n": 5})) is None


def test_cotree_of_empty_graph():
    assert cotree_build(generate("complete", {"n": 0})).leaves == ()


def test_random_cotrees_reproduce_their_graph():
    for seed in range(30):
        g = generate("cographFromRandomCotree", {"n": 25}, seed=seed)
        t = cotree_build(g)
        assert t is not None
        assert t.edges() == set(g.edges)
        assert t.is_canonical()


@pytest.mark.parametrize("g, omega", [(complete(6), 6), (bipartite(3, 3), 2), (generate("path", {"n": 3}), 2)])
def test_clique_number(g, omega):
    assert clique_number(cotree_build(g)) == omega


def test_exclusions():
    assert cotree_exclusions(cotree_build(complete(7)), 7, 5) == (True, False)
    assert cotree_exclusions(cotree_build(bipartite(5, 5)), 7, 5) == (False, True)
    assert cotree_exclusions(cotree_build(bipartite(4, 6)), 7, 5) == (False, False)


def test_forest_for_k33():
    g = bipartite(3, 3)
    f = cograph_forest(cotree_build(g), 3, 4)
    assert f.is_valid_for(g)
    assert f.depth <= 1 + 2 * 3


def test_forest_refuses_excluded_graphs():
    with pytest.raises(ValueError):
        cograph_forest(cotree_build(complete(7)), 7, 5)


def test_random_cograph_forests_are_shallow():
    for seed in range(60):
        g = generate("cographFromRandomCotree", {"n": 30}, seed=seed)
        t = cotree_build(g)
        has_clique, has_biclique = cotree_exclusions(t, 7, 5)
        if has_clique or has_biclique:
            continue
        f = cograph_forest(t, 7, 5)
        assert f.is_valid_for(g)
        assert f.depth <= 25


def test_pipeline_rejects_without_search():
    k7 = pipeline_cograph(complete(7), budget=1)
    assert k7.reason == kernel_rejection("k7")
    assert k7.stats.nodes == 0
    assert pipeline_cograph(bipartite(5, 5), budget=1).reason == kernel_rejection("k55")


def test_pipeline_requires_cograph():
    with pytest.raises(NotACographError):
        pipeline_cograph(generate("path", {"n": 5}), budget=10)


def test_pipeline_matches_decide():
    for seed in range(20):
        g = generate("cographFromRandomCotree", {"n": 9}, seed=seed)
        outcome = pipeline_cograph(g, budget=200_000)
        direct = decide(g, budget=200_000)
        if outcome.decided and direct.decided:
            assert outcome.verdict == direct.verdict, sorted(g.edges)
        if outcome.is_one_planar:
            assert verify_witness(g, outcome.witness)
