import math

import numpy as np
import pytest

from etacone.cone import ConeSpace
from etacone.errors import ContractViolation
from etacone.fixtures import half_map, nat_infinity, three_point_cone
from etacone.space import EtaConeSpace, PointSet
from etacone.topology import (SequencePrefix, ball_contains, closure_contains,
                              detect_metric_discontinuity, is_cauchy_prefix, is_convergent,
                              local_base)


@pytest.fixture
def line():
    return half_map().space


def test_ball_membership(line):
    assert ball_contains(line, 0.0, [1.0], 0.5)  # 0.25 << 1
    assert not ball_contains(line, 0.0, [1.0], 1.0)  # 1 is on the boundary
    with pytest.raises(ContractViolation):
        ball_contains(line, 0.0, [0.0], 0.5)


def test_ball_in_plane_needs_both_coordinates():
    space = three_point_cone(alpha=0.0).space
    # d(1,2) = (80, 0): its second coordinate is never strictly below c_2 - margin if c_2 tiny
    assert ball_contains(space, 1, [100.0, 1.0], 2)
    assert not ball_contains(space, 1, [50.0, 1.0], 2)


def test_local_base(line):
    radii = local_base(line, 0.0, [1.0], 4)
    assert [r[0] for r in radii] == [1.0, 0.5, 1 / 3, 0.25]
    with pytest.raises(ContractViolation):
        local_base(line, 0.0, [1.0], 0)


def test_convergent_sequence(line):
    seq = [2.0 ** -n for n in range(40)]
    v = is_convergent(line, seq, 0.0)
    assert v.converging and v.thresholds_met == 20
    assert v.witness is not None


def test_divergent_and_stalled(line):
    v = is_convergent(line, [1.0 + (n % 2) for n in range(30)], 0.0)
    assert v.status == "diverging"
    stalled = [0.01 + 2.0 ** -n for n in range(40)]
    v = is_convergent(line, stalled, 0.0)
    assert v.status == "stalled" and 0 < v.thresholds_met < 20


def test_inconclusive_when_still_shrinking(line):
    seq = [1.0 / (n + 1) for n in range(20)]
    assert is_convergent(line, seq, 0.0).status == "inconclusive"


def test_cauchy_prefix(line):
    assert is_cauchy_prefix(line, [2.0 ** -n for n in range(60)]).converging
    assert not is_cauchy_prefix(line, [float(n % 3) for n in range(60)]).converging
    with pytest.raises(ContractViolation):
        is_cauchy_prefix(line, [0.0, 1.0], window=1)


def test_prefix_and_schedule_validation(line):
    with pytest.raises(ContractViolation):
        SequencePrefix([1.0])
    with pytest.raises(ContractViolation):
        is_convergent(line, [1.0, 0.5], 0.0, threshold_schedule=[0.1, 0.2])


def test_closure_on_finite_space():
    pts = [0.0, 0.001, 1.0]
    D = np.array([[abs(a - b) for b in pts] for a in pts])
    space = EtaConeSpace.from_tables(pts, D, None, ConeSpace.orthant(1))
    assert closure_contains(space, [0.001], 0.0, [1.0], depth=100)
    assert not closure_contains(space, [0.001], 0.0, [1.0], depth=2000)
    assert closure_contains(space, [0.0], 0.0, [1.0], depth=5000)


def test_discontinuity_on_naturals_with_infinity():
    space = nat_infinity().space
    seq = [2 * n for n in range(1, 33)]
    finding = detect_metric_discontinuity(space, seq, math.inf, 1)
    assert finding.pair == (2.0, 1.0)
    assert finding.discontinuous
    assert is_convergent(space, seq, math.inf, [2.0 ** -k for k in range(1, 5)]).converging


def test_continuous_case_not_flagged(line):
    seq = [2.0 ** -n for n in range(40)]
    finding = detect_metric_discontinuity(line, seq, 0.0, 1.0)
    assert not finding.discontinuous
    assert finding.trail_limit == pytest.approx(1.0)


def test_discontinuity_requires_convergence_when_asked(line):
    with pytest.raises(ContractViolation):
        detect_metric_discontinuity(line, [1.0, 2.0, 1.0, 2.0], 0.0, 1.0, threshold_schedule=[0.5, 0.25])
