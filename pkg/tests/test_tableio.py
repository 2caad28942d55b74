import numpy as np
import pytest

from etacone.errors import TableFormatError
from etacone.fixtures import eta_metric_3pt, three_point_cone
from etacone.tableio import format_table, parse_map, parse_table

GOOD = """# a comment
points: a b c
d a b 1
d b c 1   # trailing comment
d c a 1.5
eta a c 2
"""


def test_parse_good_table():
    t = parse_table(GOOD)
    assert t.labels == ["a", "b", "c"]
    assert t.d[2, 0, 0] == 1.5 and t.d[0, 2, 0] == 1.5
    assert t.eta[0, 2] == 2 and t.eta[2, 0] == 2 and t.eta[0, 1] == 1
    assert t.to_space().D("a", "c") == 1.5


@pytest.mark.parametrize("text, line", [
    ("points: 1 2\nd 1 x 5\n", 2),
    ("points: 1 2\nd 1 2 five\n", 2),
    ("points: 1 2\nfoo 1 2 3\n", 2),
    ("d 1 2 3\npoints: 1 2\n", 1),
    ("points: 1 2\neta 1 2 0.5\n", 2),
    ("points: 1 2 3\nd 1 2 1 1\nd 1 3 1\n", 3),
    ("points: 1 1\n", 1),
    ("points: 1 2\nnorm: l7\n", 2),
    ("points: 1 2\nd 1 2 inf\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(TableFormatError, match=f"^line {line}:"):
        parse_table(text)


def test_missing_pair_and_header():
    with pytest.raises(TableFormatError, match="missing distance"):
        parse_table("points: 1 2 3\nd 1 2 1\nd 2 3 1\n")
    with pytest.raises(TableFormatError, match="missing points"):
        parse_table("# nothing\n")


def test_vector_distances_and_norm():
    t = parse_table("points: 1 2\nnorm: sum\nd 1 2 3 4\n")
    assert t.d.shape == (2, 2, 2)
    assert t.to_space().D("1", "2") == 7


@pytest.mark.parametrize("entry", [three_point_cone(alpha=1.0, norm="euclidean"), eta_metric_3pt()])
def test_round_trip(entry):
    text = format_table(entry.space, "round trip")
    space = parse_table(text).to_space()
    a, b = entry.space.tables(), space.tables()
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert space.cone.norm == entry.space.cone.norm


def test_parse_map():
    assert parse_map("map 1 2\nmap 2 2\n", ["1", "2"]) == {"1": "2", "2": "2"}
    with pytest.raises(TableFormatError, match="undefined"):
        parse_map("map 1 2\n", ["1", "2"])
    with pytest.raises(TableFormatError, match="line 1"):
        parse_map("map 1 9\n", ["1", "2"])
    with pytest.raises(TableFormatError, match="twice"):
        parse_map("map 1 2\nmap 1 1\n", ["1", "2"])
