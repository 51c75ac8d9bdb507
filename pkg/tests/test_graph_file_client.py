import io
import random

import pytest

from oneplanar.clients.graph_file_client import (
    GraphFileClient,
    format_graph,
    format_witness,
    parse_constraints,
    parse_graph,
    parse_witness,
)
from oneplanar.core.embedding import CrossingWitness
from oneplanar.core.generators import generate
from oneplanar.core.solver import RESERVED_COLOR
from oneplanar.utils.types import GraphFormatError
from tests.conftest import complete


def test_parse_graph_with_comments_and_header():
    g = parse_graph("# a triangle plus an isolated vertex\nn 4\n0 1\n1 2  # second edge\n\n2 0\n")
    assert g.n == 4
    assert g.edges == {(0, 1), (1, 2), (0, 2)}


def test_vertex_count_defaults_to_largest_id():
    assert parse_graph("0 5\n").n == 6
    assert parse_graph("# nothing\n").n == 0


@pytest.mark.parametrize("text, line", [
    ("0 1\n2 2\n", 2),
    ("0 1\n1 0\n", 2),
    ("0 1\n\n1 x\n", 3),
    ("0 1 2\n", 1),
    ("n 3\n0 3\n", 2),
    ("0 1\nn 4\n", 2),
    ("-1 2\n", 1),
])
def test_parse_graph_errors_carry_line_numbers(text, line):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert info.value.line_number == line
    assert str(info.value).startswith(f"line {line}:")


def test_parse_constraints():
    g = complete(5)
    cs = parse_constraints("uncrossable 1 0\nforbid 0 2 1 3\n# comment\n", g)
    assert cs.uncrossable == {(0, 1)}
    assert cs.forbidden_pairs == {((0, 2), (1, 3))}
    assert cs.colors is None


def test_partial_coloring_reserves_the_rest():
    g = complete(4)
    cs = parse_constraints("color 3 0 1\ncolor 3 2 3\n", g)
    assert cs.colors[(0, 1)] == 3
    assert cs.colors[(0, 2)] == RESERVED_COLOR
    assert set(cs.colors) == set(g.edges)


@pytest.mark.parametrize("text", [
    "uncrossable 0 9\n",
    "forbid 0 1 0 1\n",
    "color 1 0 1\ncolor 2 1 0\n",
    "cross 0 1 2 3\n",
    "uncrossable 0\n",
])
def test_parse_constraints_errors(text):
    with pytest.raises(GraphFormatError):
        parse_constraints(text, complete(4))


def test_parse_witness_skips_report_lines():
    w = parse_witness("verdict: one-planar\ncrossings: 1\ncross 2 3 0 1\n")
    assert w.quadruples() == [(0, 1, 2, 3)]
    with pytest.raises(GraphFormatError):
        parse_witness("cross 0 1 2\n")


def test_format_witness():
    w = CrossingWitness.from_quadruples([(4, 5, 0, 1), (2, 3, 6, 7)])
    assert format_witness(w) == "cross 0 1 4 5\ncross 2 3 6 7\n"
    assert parse_witness(format_witness(w)) == w


def test_echo_round_trip():
    rng = random.Random(17)
    for seed in range(100):
        n = rng.randint(0, 15)
        m = rng.randint(0, n * (n - 1) // 2)
        g = generate("random", {"n": n, "m": m}, seed=seed)
        assert parse_graph(format_graph(g)) == g


def test_client_streams(tmp_path):
    client = GraphFileClient()
    path = tmp_path / "g.txt"
    client.write_graph(path, complete(3))
    assert client.read_graph(path) == complete(3)
    assert client.read_graph(io.StringIO("0 1\n")).m == 1
    out = io.StringIO()
    client.write(out, "hello")
    assert out.getvalue() == "hello"
    assert client.read_constraints(None, complete(3)) is None
    with pytest.raises(OSError):
        client.read_graph(tmp_path / "missing.txt")
