import math

import pytest

from etacone.fixtures import (FIXTURE_NAMES, UnknownFixture, fixture, nat_infinity,
                              nat_infinity_distance)
from etacone.space import check_axioms, classify, derive_eta_metric
from etacone.tableio import format_table, load_table


def test_catalog_names():
    assert set(FIXTURE_NAMES) == {"three_point_cone", "three_point_cone_sin", "function_space",
                                  "half_map", "square_map", "nat_infinity", "eta_metric_3pt"}
    with pytest.raises(UnknownFixture, match="valid names"):
        fixture("nope")


@pytest.mark.parametrize("name", [n for n in FIXTURE_NAMES if n != "nat_infinity"])
def test_fixture_passes_axioms(name):
    assert check_axioms(fixture(name).space).ok


def test_three_point_distances():
    s = fixture("three_point_cone").space
    assert s.d(1, 2).tolist() == [80.0, 0.0]
    assert s.d(2, 1).tolist() == [80.0, 0.0]
    assert s.d(1, 3).tolist() == [1000.0, 0.0]
    assert s.eta(2, 3) == 6.0
    assert fixture("three_point_cone", alpha=1.0).space.d(2, 3).tolist() == [600.0, 600.0]


def test_eta_metric_3pt_values():
    e = fixture("eta_metric_3pt")
    s = e.space
    assert (s.D(1, 2), s.D(2, 3), s.D(1, 3)) == (0.2, 0.25, 0.5)
    assert s.eta(1, 2) == 2.5 and s.eta(2, 1) == 2.0
    c = classify(derive_eta_metric(s))
    assert c.witness == e.expected["witness"]


def test_function_space_values():
    s = fixture("function_space").space
    assert s.D("0", "1") == 1.0
    assert s.D("1", "1-t") == pytest.approx(1.0)
    assert s.eta("2t-1", "t^2") == 4.0


def test_nat_infinity_table():
    f = nat_infinity_distance
    assert f(3, 5) == 5.0
    assert f(2, 4) == 0.25
    assert f(2, 3) == 2.0
    assert f(2, math.inf) == 0.5
    assert f(3, math.inf) == pytest.approx(1 / 3)
    assert f(1, math.inf) == 1.0
    assert f(3, math.inf, "five") == 5.0


def test_nat_infinity_literal_table_breaks_d3():
    # D(1,3) = 5 but 3 * (D(1,inf) + D(inf,3)) = 4
    rep = check_axioms(nat_infinity().space)
    assert not rep.d3_ok
    assert any(v.points == (1, math.inf, 3) for v in rep.violations)


def test_nat_infinity_five_variant_passes():
    assert check_axioms(nat_infinity(odd_to_infinity="five").space).ok


def test_bad_parameters():
    with pytest.raises(ValueError):
        fixture("nat_infinity", bound=1)
    with pytest.raises(ValueError):
        fixture("function_space", a=1.0, b=0.0)
    with pytest.raises(ValueError):
        fixture("three_point_cone", alpha=-1.0)


@pytest.mark.parametrize("name", ["three_point_cone", "three_point_cone_sin", "function_space",
                                  "eta_metric_3pt", "nat_infinity"])
def test_shipped_tables_match_fixtures(name, fixture_dir):
    space = fixture(name).space
    loaded = load_table(fixture_dir / f"{name}.tbl")
    a, b = space.tables(), loaded.tables()
    assert (a[0] == b[0]).all() and (a[1] == b[1]).all()
    assert format_table(loaded, space.name) == (fixture_dir / f"{name}.tbl").read_text()
