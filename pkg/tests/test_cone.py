import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etacone.cone import (ConeSpace, as_vector, cone_contains, cone_slack, leq, norm_of,
                          normal_constant_estimate, strictly_interior)
from etacone.errors import ContractViolation

WEDGE = [[1.0, 0.0], [1.0, 1.0]]  # cone between the x-axis and the diagonal


def test_orthant_basics():
    P = ConeSpace.orthant(3)
    assert P.is_orthant and P.normal_constant == 1.0 and P.normal_constant_exact
    assert cone_contains(P, [0, 1, 2])
    assert not cone_contains(P, [0, -1e-6, 2])
    assert cone_contains(P, [0, -1e-12, 2])  # within default tolerance
    assert cone_slack(P, [3, 1, 2]) == 1
    assert leq(P, [1, 1, 1], [1, 2, 3])
    assert not leq(P, [1, 1, 1], [0, 2, 3])


def test_interior_uses_margin():
    P = ConeSpace.orthant(2)
    assert strictly_interior(P, [1e-3, 1e-3], 1e-6)
    assert not strictly_interior(P, [1e-3, 0.0], 1e-6)
    assert not strictly_interior(P, [1e-9, 1.0], 1e-6)


def test_norms():
    v = np.array([3.0, -4.0])
    assert norm_of(ConeSpace.orthant(2, "max"), v) == 4
    assert norm_of(ConeSpace.orthant(2, "sum"), v) == 7
    assert norm_of(ConeSpace.orthant(2, "euclidean"), v) == 5


def test_ray_cone_membership():
    W = ConeSpace.from_rays(WEDGE)
    assert not W.is_orthant
    assert cone_contains(W, [2.0, 1.0])
    assert cone_contains(W, [1.0, 1.0])
    assert not cone_contains(W, [1.0, 2.0])
    assert not cone_contains(W, [-1.0, 0.0])
    assert cone_slack(W, [1.0, 2.0]) < 0
    assert strictly_interior(W, [2.0, 1.0], 1e-3)
    assert not strictly_interior(W, [1.0, 1.0], 1e-3)


@pytest.mark.parametrize("norm", ["max", "sum", "euclidean"])
def test_ray_cone_norms_agree(norm):
    W = ConeSpace.from_rays(WEDGE, norm=norm)
    assert cone_contains(W, [3.0, 2.0])
    assert not cone_contains(W, [0.0, 1.0])


def test_validation():
    with pytest.raises(ContractViolation):
        ConeSpace.orthant(0)
    with pytest.raises(ContractViolation):
        ConeSpace.orthant(2, "l3")
    with pytest.raises(ContractViolation):
        ConeSpace.from_rays([[1.0, 0.0], [-1.0, 0.0]])  # a line, not pointed
    with pytest.raises(ContractViolation):
        ConeSpace.from_rays([[0.0, 0.0]])
    with pytest.raises(ContractViolation):
        ConeSpace.from_rays(WEDGE, normal_constant=0.5)
    with pytest.raises(ContractViolation):
        as_vector(ConeSpace.orthant(2), [1.0, 2.0, 3.0])


def test_normal_constant():
    assert normal_constant_estimate(ConeSpace.orthant(2, "sum")) == 1.0
    W = ConeSpace.from_rays(WEDGE)
    assert not W.normal_constant_exact
    assert W.normal_constant >= 1.0
    # a narrow cone has a large normal constant under the max norm
    narrow = ConeSpace.from_rays([[1.0, 0.99], [0.99, 1.0]], norm="euclidean")
    assert narrow.normal_constant >= 1.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=2, max_size=2),
       st.lists(st.floats(0, 10), min_size=2, max_size=2))
def test_conic_combinations_stay_in_cone(a, b):
    W = ConeSpace.from_rays(WEDGE)
    G = W.generators
    v = a[0] * G[0] + a[1] * G[1]
    w = b[0] * G[0] + b[1] * G[1]
    assert cone_contains(W, v, 1e-9)
    assert leq(W, v, v + w, 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=3, max_size=3),
       st.lists(st.floats(0, 100), min_size=3, max_size=3))
def test_orthant_normality(x, y):
    # 0 <= x <= x + y  implies  |x| <= K |x + y|  with K = 1
    P = ConeSpace.orthant(3, "euclidean")
    x, y = np.array(x), np.array(y)
    assert norm_of(P, x) <= P.normal_constant * norm_of(P, x + y) + 1e-9
