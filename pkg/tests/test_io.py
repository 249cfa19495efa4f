import numpy as np
import pytest

from sublinear_sf.core import EdgeSetOracle, from_matrix
from sublinear_sf.gen import gen_gnp, gen_i1, gen_i2, gen_random_euclid
from sublinear_sf.io import (
    ParseError,
    format_graph,
    format_instance,
    parse_graph,
    parse_instance,
    read_any,
    read_instance,
    write_graph,
    write_instance,
)


def same(a, b):
    return (a.kind == b.kind and a.pairs == b.pairs and np.array_equal(a.dist, b.dist))


@pytest.mark.parametrize("inst", [
    gen_i1(3), gen_i2(4, 200), gen_random_euclid(9, 3, 3, 2),
    from_matrix(np.array([[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]]), [(0, 2)]),
])
def test_instance_round_trip(tmp_path, inst):
    path = tmp_path / "inst.txt"
    write_instance(inst, path)
    back = read_instance(path)
    assert same(inst, back)
    assert format_instance(back) == path.read_text()


def test_graph_round_trip(tmp_path):
    g = gen_gnp(30, 0.2, 1)
    write_graph(g, tmp_path / "g.txt")
    back = read_any(tmp_path / "g.txt")
    assert isinstance(back, EdgeSetOracle) and back.edges() == g.edges()


def test_comments_and_blank_lines():
    text = "# two points\nmetric 2 1 line\n\n0\n4  # right end\n0 1\n"
    assert parse_instance(text).dist[0, 1] == 4


@pytest.mark.parametrize("text,line,fragment", [
    ("metric 3 1 matrix\n0 1 2\n1 0\n2 1 0\n0 2\n", 3, "matrix row 1"),
    ("metric 2 1 hyperbolic\n", 1, "unknown format"),
    ("metric 2 1 line\n0\n1\n", 3, "pair 0"),
    ("metric 2 1 line\n0\n", 2, "coordinate row 1"),
    ("metric 2 1 line\n0\nx\n0 1\n", 3, "non-numeric"),
    ("metric 2 1 line\n0\n1\n0 5\n", 4, "outside"),
    ("metric 2 1 euclid\n", 1, "dimension"),
    ("metric 2 1 line\n0\n1\n0 1\n7\n", 5, "unexpected"),
    ("graph 3 1\n1 1\n", 2, "self-loop"),
    ("graph 3\n", 1, "header"),
])
def test_parse_errors_name_the_line(text, line, fragment):
    parse = parse_graph if text.startswith("graph") else parse_instance
    with pytest.raises(ParseError, match=fragment) as exc:
        parse(text)
    assert exc.value.line == line


def test_invalid_metric_reported():
    with pytest.raises(ParseError, match="metric"):
        parse_instance("metric 3 1 matrix\n0 1 5\n1 0 1\n5 1 0\n0 2\n")


def test_empty_graph_file():
    assert format_graph(parse_graph("graph 4 0\n")) == "graph 4 0\n"
