import random

import pytest

from oneplanar.core import kernel_cyclomatic
from oneplanar.core.embedding import CrossingWitness, verify_witness
from oneplanar.core.generators import generate
from oneplanar.core.graph import Graph, LiftPlan, PathTruncation, make_edge, subdivide
from oneplanar.core.kernel_cyclomatic import cyclo_kernelize, cyclo_lift, interior_cap, pipeline_cyclo
from oneplanar.core.lift import lift_witness
from oneplanar.core.solver import decide
from oneplanar.utils.types import InvalidWitnessError, Reason, Verdict
from tests.conftest import bipartite, complete


@pytest.mark.parametrize("p, cap", [(1, 3), (2, 5), (3, 13), (4, 49)])
def test_interior_cap(p, cap):
    assert interior_cap(p) == cap


def test_theta_paths_are_truncated():
    g = generate("theta", {"pathLength": 20, "paths": 3})
    ko = cyclo_kernelize(g)
    (piece,) = ko.pieces
    assert ko.details["k_cyclo"] == [2]
    assert ko.details["paths"] == [3]
    assert piece.graph.n == 2 + 3 * 13
    assert piece.graph.m == 3 * 14
    truncations = [r for r in piece.plan.records if isinstance(r, PathTruncation)]
    assert len(truncations) == 3
    assert all(r.kept == 13 and len(r.interior) == 19 for r in truncations)
    assert piece.host_graph() == g


def test_short_paths_are_kept():
    g = generate("theta", {"pathLength": 5, "paths": 3})
    (piece,) = cyclo_kernelize(g).pieces
    assert piece.graph == g


def test_cycles_and_trees_leave_no_pieces():
    assert cyclo_kernelize(generate("cycle", {"n": 40})).pieces == []
    ko = cyclo_kernelize(generate("path", {"n": 10}))
    assert ko.pieces == []
    assert pipeline_cyclo(generate("cycle", {"n": 40}), budget=10).is_one_planar


def test_pendant_trees_are_stripped():
    theta = generate("theta", {"pathLength": 2, "paths": 4})
    g = Graph(theta.n + 3, theta.edges | {(0, theta.n), (theta.n, theta.n + 1), (2, theta.n + 2)})
    ko = cyclo_kernelize(g)
    assert ko.kernel_size == theta.n
    outcome = pipeline_cyclo(g, budget=1000)
    assert outcome.is_one_planar
    assert verify_witness(g, outcome.witness)


def test_crossing_moves_to_restored_segment():
    record = PathTruncation(0, (0, 1), (2, 3, 4, 5), 2)
    assert record.kernel_edge == (1, 3)
    witness = CrossingWitness(frozenset({((1, 3), (6, 7))}))
    lifted = lift_witness(LiftPlan((record,)), witness)
    assert lifted.pairs == {((3, 4), (6, 7))}


def test_cyclo_lift_rejects_foreign_witness():
    g = generate("theta", {"pathLength": 20, "paths": 3})
    (piece,) = cyclo_kernelize(g).pieces
    with pytest.raises(InvalidWitnessError):
        cyclo_lift(piece.plan, piece.graph, CrossingWitness.from_quadruples([(0, 2, 90, 91)]))


def test_cyclo_lift_keeps_crossing_count():
    g = subdivide(complete(5), 1)
    (piece,) = cyclo_kernelize(g).pieces
    kernel_outcome = decide(piece.graph)
    lifted = cyclo_lift(piece.plan, piece.graph, kernel_outcome.witness)
    assert len(lifted) == len(kernel_outcome.witness)


def test_density_guard():
    assert pipeline_cyclo(complete(8), budget=10).reason == Reason.EDGE_DENSITY.value


DIAMOND = Graph(4, frozenset({(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)}))


def glue(a: Graph, b: Graph) -> Graph:
    """a and b joined at their vertex 0."""
    shift = a.n - 1
    moved = {make_edge(u and u + shift, v and v + shift) for u, v in b.edges}
    return Graph(a.n + b.n - 1, a.edges | moved)


def long_paths(rng: random.Random, skeleton: Graph, most: int) -> Graph:
    return subdivide(skeleton, {e: rng.randint(0, most) for e in skeleton.edges})


def skeleton_instance(rng: random.Random, i: int) -> Graph:
    kind = i % 8
    if kind == 0:
        return long_paths(rng, DIAMOND, 30)
    if kind == 1:
        return long_paths(rng, bipartite(2, 4), 40)
    if kind == 2:
        return glue(complete(7), long_paths(rng, DIAMOND, 30))
    if kind == 3 and i % 50 == 3:
        return glue(bipartite(3, 7), long_paths(rng, DIAMOND, 20))
    skeleton = rng.choice([complete(4), complete(5), bipartite(3, 3), generate("cubicHalin", {"k": 5})])
    return long_paths(rng, skeleton, 2)


def test_pipeline_matches_decide_on_subdivided_skeletons():
    rng = random.Random(9)
    compared = truncated = refuted = 0
    for i in range(200):
        g = skeleton_instance(rng, i)
        ko = cyclo_kernelize(g)
        if any(isinstance(r, PathTruncation) for piece in ko.pieces for r in piece.plan.records):
            truncated += 1
        via_kernel = pipeline_cyclo(g, budget=200_000)
        direct = decide(g, budget=200_000)
        if via_kernel.is_one_planar:
            assert verify_witness(g, via_kernel.witness)
        if via_kernel.decided and direct.decided:
            assert via_kernel.verdict == direct.verdict, (i, sorted(g.edges))
            compared += 1
            refuted += via_kernel.verdict == Verdict.NOT_ONE_PLANAR
    assert compared >= 180
    assert truncated >= 20
    assert refuted >= 20


def test_kernel_vertex_count_bound():
    rng = random.Random(3)
    for i in range(40):
        g = skeleton_instance(rng, i)
        ko = cyclo_kernelize(g)
        for piece, k, p in zip(ko.pieces, ko.details["k_cyclo"], ko.details["paths"]):
            assert p <= 3 * k - 3
            assert piece.graph.n <= 2 * k - 2 + p * interior_cap(p)
            assert piece.graph.n <= 2 * k - 2 + (3 * k - 3) * interior_cap(3 * k - 3)


def test_theta_with_long_paths():
    g = generate("theta", {"pathLength": 100, "paths": 3})
    ko = cyclo_kernelize(g)
    (piece,) = ko.pieces
    assert piece.graph.n == 2 + 3 * interior_cap(3)
    truncations = [r for r in piece.plan.records if isinstance(r, PathTruncation)]
    assert [len(r.interior) for r in truncations] == [99, 99, 99]
    outcome = pipeline_cyclo(g, budget=1000)
    assert outcome.is_one_planar
    assert outcome.kernel["vertices"] == [41]


def test_pipeline_lifts_through_cyclo_lift(monkeypatch):
    calls = []

    def spy(plan, kernel, witness):
        calls.append(kernel.n)
        return cyclo_lift(plan, kernel, witness)

    monkeypatch.setattr(kernel_cyclomatic, "cyclo_lift", spy)
    g = glue(subdivide(complete(5), 1), generate("theta", {"pathLength": 30, "paths": 3}))
    outcome = pipeline_cyclo(g, budget=200_000)
    assert outcome.is_one_planar
    assert sorted(calls) == sorted(piece.graph.n for piece in cyclo_kernelize(g).pieces)
    assert verify_witness(g, outcome.witness)
