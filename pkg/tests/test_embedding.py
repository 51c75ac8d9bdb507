import pytest

from oneplanar.core.embedding import (
    CrossingWitness,
    EmbeddedPiece,
    Multigraph,
    add_pendant,
    add_pendants,
    insert_two_path,
    insert_two_paths,
    is_planar,
    merge_at_shared_edge,
    planarity_obstruction,
    planarity_test,
    planarize_with_kites,
    verify_witness,
)
from oneplanar.core.graph import Graph
from oneplanar.core.solver import ConstraintSet
from oneplanar.utils.types import InvalidWitnessError
from tests.conftest import bipartite, complete


def test_planarity_of_small_graphs():
    assert is_planar(complete(4))
    assert not is_planar(complete(5))
    assert not is_planar(bipartite(3, 3))


def test_obstruction_is_a_subgraph():
    g = bipartite(3, 4)
    obstruction = planarity_obstruction(g)
    assert obstruction is not None
    assert set(obstruction) <= g.edges
    assert planarity_obstruction(complete(4)) is None


def test_rotation_system_faces_satisfy_euler():
    r = planarity_test(complete(4))
    assert r is not None
    assert len(r.faces) == 4
    assert r.euler_holds()


def test_parallel_edges_do_not_change_planarity():
    mg = Multigraph(3, ((0, 1), (1, 2), (0, 2), (0, 1), (1, 0)))
    r = planarity_test(mg)
    assert r is not None
    assert sorted(len(darts) for darts in r.rotation) == [2, 4, 4]


def test_witness_normalizes_pairs():
    w = CrossingWitness.from_quadruples([(3, 2, 1, 0)])
    assert w.quadruples() == [(0, 1, 2, 3)]
    assert w.partner((2, 3)) == (0, 1)
    assert w.partner((0, 2)) is None


def test_witness_rejects_self_pair():
    with pytest.raises(InvalidWitnessError):
        CrossingWitness(frozenset({((0, 1), (1, 0))}))


@pytest.mark.parametrize("quads", [
    [(0, 1, 1, 2)],                     # adjacent edges
    [(0, 1, 2, 3), (0, 1, 2, 4)],       # (0, 1) crosses twice
    [(0, 1, 2, 9)],                     # not an edge
])
def test_witness_validation(quads, k5):
    with pytest.raises(InvalidWitnessError):
        CrossingWitness.from_quadruples(quads).validate(k5)


def test_planarization_provenance(k5):
    w = CrossingWitness.from_quadruples([(0, 1, 2, 3)])
    p = planarize_with_kites(k5, w)
    assert p.graph.n == 6
    assert p.dummy(0) == 5
    kinds = [kind for kind, _ in p.provenance]
    assert kinds.count("edge") == 8
    assert kinds.count("spoke") == 4
    assert kinds.count("kite") == 4


def test_verify_witness_on_k5(k5):
    assert not verify_witness(k5, CrossingWitness())
    assert verify_witness(k5, CrossingWitness.from_quadruples([(0, 1, 2, 3)]))
    # never raises, even on garbage
    assert not verify_witness(k5, CrossingWitness.from_quadruples([(0, 1, 1, 2)]))


def test_verify_witness_respects_constraints(k5):
    w = CrossingWitness.from_quadruples([(0, 1, 2, 3)])
    assert not verify_witness(k5, w, ConstraintSet(uncrossable=frozenset({(0, 1)})))
    assert not verify_witness(k5, w, ConstraintSet(forbidden_pairs=frozenset({((2, 3), (0, 1))})))
    colors = {e: 1 for e in k5.edges}
    assert verify_witness(k5, w, ConstraintSet(colors=colors))
    colors[(2, 3)] = 2
    assert not verify_witness(k5, w, ConstraintSet(colors=colors))


def test_insert_two_paths_keeps_embedding_planar():
    r = planarity_test(Graph(4, frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})))
    face = next(i for i in range(len(r.faces)) if {0, 2} <= set(r.face_vertices(i)))
    grown = insert_two_paths(r, 0, 2, face, [4, 5, 6])
    assert grown.graph.n == 7
    assert len(grown.graph.edges) == 10
    assert grown.euler_holds()


def test_insert_two_path_requires_shared_face():
    r = planarity_test(complete(4))
    face = next(i for i in range(len(r.faces)) if 3 not in r.face_vertices(i))
    with pytest.raises(ValueError):
        insert_two_path(r, 0, 3, face, 4)


def test_add_pendants():
    r = planarity_test(complete(3))
    grown = add_pendants(r, [(0, 3), (3, 4), (None, 5)])
    assert grown.graph.n == 6
    assert grown.euler_holds()
    assert add_pendant(r, 1, 3).euler_holds()


def test_merge_at_shared_edge():
    shared = (0, 1)
    left = Graph(4, frozenset({(0, 1), (0, 2), (1, 2)}))
    right = Graph(4, frozenset({(0, 1), (0, 3), (1, 3)}))
    pieces = [EmbeddedPiece(g, CrossingWitness(), planarity_test(g)) for g in (left, right)]
    union, witness = merge_at_shared_edge(pieces, shared, keep_shared=False)
    assert union.edges == {(0, 2), (1, 2), (0, 3), (1, 3)}
    assert len(witness) == 0


def test_merge_refuses_crossed_shared_edge(k5):
    shared = (0, 1)
    triangle = Graph(5, frozenset({(0, 1), (0, 4), (1, 4)}))
    crossed = CrossingWitness.from_quadruples([(0, 1, 2, 3)])
    assert verify_witness(k5, crossed)
    pieces = [
        EmbeddedPiece(triangle, CrossingWitness(), planarity_test(triangle)),
        EmbeddedPiece(k5, crossed, planarity_test(planarize_with_kites(k5, crossed).graph)),
    ]
    with pytest.raises(InvalidWitnessError):
        merge_at_shared_edge(pieces, shared)
