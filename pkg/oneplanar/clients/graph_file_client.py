import sys
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Set, TextIO, Tuple, Union

from oneplanar.core.embedding import CrossingWitness
from oneplanar.core.graph import Edge, Graph, make_edge
from oneplanar.core.solver import RESERVED_COLOR, ConstraintSet
from oneplanar.utils import logger
from oneplanar.utils.types import GraphFormatError

Source = Union[str, Path, TextIO]


def _lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Numbered, comment-stripped, non-empty token lists."""
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield number, tokens


def _ints(tokens: List[str], number: int) -> List[int]:
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise GraphFormatError(f"expected integers, got {' '.join(tokens)!r}", number)
    if any(v < 0 for v in values):
        raise GraphFormatError("vertex ids must be nonnegative", number)
    return values


def parse_graph(text: str) -> Graph:
    """Parse `u v` edge lines with an optional `n <N>` header.

    Without a header the vertex count is 1 + the largest id seen.
    """
    declared: Optional[int] = None
    seen: Dict[Edge, int] = {}
    for number, tokens in _lines(text):
        if tokens[0] == "n":
            if declared is not None or seen:
                raise GraphFormatError("the `n` header must come first and only once", number)
            if len(tokens) != 2:
                raise GraphFormatError("header is `n <N>`", number)
            declared = _ints(tokens[1:], number)[0]
            continue
        if len(tokens) != 2:
            raise GraphFormatError(f"edge lines hold two vertex ids, got {len(tokens)} tokens", number)
        u, v = _ints(tokens, number)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", number)
        e = make_edge(u, v)
        if e in seen:
            raise GraphFormatError(f"duplicate edge {u} {v} (first on line {seen[e]})", number)
        if declared is not None and e[1] >= declared:
            raise GraphFormatError(f"vertex {e[1]} is outside n = {declared}", number)
        seen[e] = number
    n = declared if declared is not None else 1 + max((e[1] for e in seen), default=-1)
    return Graph(n, frozenset(seen))


def _known_edge(g: Graph, u: int, v: int, number: int) -> Edge:
    if u == v or not g.has_edge(u, v):
        raise GraphFormatError(f"{u} {v} is not an edge of the graph", number)
    return make_edge(u, v)


def parse_constraints(text: str, g: Graph) -> ConstraintSet:
    """Parse `uncrossable u v`, `forbid u1 v1 u2 v2` and `color <c> u v` lines against g.

    Once any edge is colored, edges left without a color line get the reserved
    color and stay uncrossed.
    """
    uncrossable: Set[Edge] = set()
    forbidden: Set[Tuple[Edge, Edge]] = set()
    colors: Dict[Edge, int] = {}
    for number, tokens in _lines(text):
        keyword, args = tokens[0], tokens[1:]
        if keyword == "uncrossable" and len(args) == 2:
            uncrossable.add(_known_edge(g, *_ints(args, number), number))
        elif keyword == "forbid" and len(args) == 4:
            u1, v1, u2, v2 = _ints(args, number)
            e, f = _known_edge(g, u1, v1, number), _known_edge(g, u2, v2, number)
            if e == f:
                raise GraphFormatError("an edge cannot be paired with itself", number)
            forbidden.add((e, f))
        elif keyword == "color" and len(args) == 3:
            c, u, v = _ints(args, number)
            e = _known_edge(g, u, v, number)
            if colors.get(e, c) != c:
                raise GraphFormatError(f"edge {u} {v} already has color {colors[e]}", number)
            colors[e] = c
        else:
            raise GraphFormatError(f"unrecognized constraint {' '.join(tokens)!r}", number)
    color_map = None
    if colors:
        color_map = {e: colors.get(e, RESERVED_COLOR) for e in g.edges}
    return ConstraintSet(frozenset(uncrossable), frozenset(forbidden), color_map)


def parse_witness(text: str) -> CrossingWitness:
    """Parse `cross u1 v1 u2 v2` lines; other report lines are skipped."""
    quads = []
    for number, tokens in _lines(text):
        if tokens[0] != "cross":
            continue
        if len(tokens) != 5:
            raise GraphFormatError("crossing lines are `cross u1 v1 u2 v2`", number)
        quads.append(_ints(tokens[1:], number))
    try:
        return CrossingWitness.from_quadruples(quads)
    except ValueError as e:
        raise GraphFormatError(str(e))


def format_graph(g: Graph) -> str:
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges)
    return "\n".join(lines) + "\n"


def format_witness(w: CrossingWitness) -> str:
    return "".join("cross " + " ".join(map(str, q)) + "\n" for q in w.quadruples())


class GraphFileClient:
    """Reads and writes graphs, constraints and witnesses; `-` means the standard streams."""

    def __init__(self, encoding: str = "utf-8"):
        self.encoding = encoding

    def _read(self, source: Source) -> str:
        if hasattr(source, "read"):
            return source.read()
        if str(source) == "-":
            return sys.stdin.read()
        try:
            return Path(source).read_text(encoding=self.encoding)
        except OSError as e:
            logger.error("read_failed", path=str(source), error=str(e))
            raise

    def read_graph(self, source: Source) -> Graph:
        g = parse_graph(self._read(source))
        logger.debug("graph_loaded", source=str(source), n=g.n, m=g.m)
        return g

    def read_constraints(self, source: Optional[Source], g: Graph) -> Optional[ConstraintSet]:
        if source is None:
            return None
        cs = parse_constraints(self._read(source), g)
        logger.debug("constraints_loaded", source=str(source), uncrossable=len(cs.uncrossable),
                     forbidden=len(cs.forbidden_pairs), colored=cs.colors is not None)
        return cs

    def read_witness(self, source: Source) -> CrossingWitness:
        return parse_witness(self._read(source))

    def write(self, target: Optional[Source], text: str) -> None:
        if target is None or str(target) == "-":
            sys.stdout.write(text)
            return
        if hasattr(target, "write"):
            target.write(text)
            return
        Path(target).write_text(text, encoding=self.encoding)

    def write_graph(self, target: Optional[Source], g: Graph) -> None:
        self.write(target, format_graph(g))

    def write_graphs(self, target: Optional[Source], graphs: Iterable[Graph]) -> None:
        self.write(target, "".join(format_graph(g) for g in graphs))
