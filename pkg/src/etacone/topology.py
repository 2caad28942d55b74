"""Balls, sequence convergence and closure in eta-cone metric spaces.

A sequence prefix can only give evidence, never proof, of convergence: every
test here takes an explicit decreasing threshold schedule and reports a
:class:`ConvergenceVerdict` describing how far the data supports the claim.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .cone import as_vector, strictly_interior
from .errors import ContractViolation
from .space import EtaConeSpace, Point

DEFAULT_SCHEDULE = tuple(2.0 ** -k for k in range(1, 21))
DEFAULT_WINDOW = 8
DEFAULT_MARGIN = 1e-12


@dataclass
class SequencePrefix:
    points: List[Point]
    source: str = "user"

    def __post_init__(self):
        self.points = list(self.points)
        if len(self.points) < 2:
            raise ContractViolation("a sequence prefix needs at least two points")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass
class ConvergenceVerdict:
    """``status`` is one of converging, stalled, diverging, inconclusive.

    ``witness`` is the first index from which the trail stays below the last
    threshold that was met (``None`` if none was met); ``thresholds_met``
    counts the schedule entries the trail satisfied, in order.
    """

    status: str
    witness: Optional[int]
    trail: List[Tuple[int, float]]
    thresholds_met: int = 0
    schedule: Tuple[float, ...] = field(default=(), repr=False)

    @property
    def converging(self) -> bool:
        return self.status == "converging"

    def to_dict(self):
        return {"status": self.status, "witness": self.witness,
                "thresholds_met": self.thresholds_met,
                "trail": [[n, v] for n, v in self.trail]}


def _as_prefix(seq) -> SequencePrefix:
    return seq if isinstance(seq, SequencePrefix) else SequencePrefix(list(seq))


def _check_schedule(schedule: Sequence[float]) -> Tuple[float, ...]:
    sched = tuple(float(t) for t in schedule)
    if not sched:
        raise ContractViolation("threshold schedule is empty")
    if sched[-1] <= 0 or any(b >= a for a, b in zip(sched, sched[1:])):
        raise ContractViolation("threshold schedule must decrease strictly to a positive floor")
    return sched


def _verdict(values: np.ndarray, schedule: Tuple[float, ...]) -> ConvergenceVerdict:
    """Shared verdict logic over a trail of nonnegative values."""
    trail = [(i, float(v)) for i, v in enumerate(values)]
    N = len(values)
    # suffix_max[n] = max(values[n:])
    suffix_max = np.maximum.accumulate(values[::-1])[::-1]
    met, witness = 0, None
    for t in schedule:
        below = np.nonzero(suffix_max < t)[0]
        if len(below) == 0:
            break
        met += 1
        witness = int(below[0])
    if met == len(schedule):
        return ConvergenceVerdict("converging", witness, trail, met, schedule)

    half = values[N // 2:]
    tail_min = float(half.min())
    flat = tail_min > 0 and float(half[-1]) >= 0.5 * float(half.max())
    if flat and met == 0:
        status = "diverging"
    elif flat:
        status = "stalled"
    else:
        status = "inconclusive"
    return ConvergenceVerdict(status, witness, trail, met, schedule)


def ball_contains(space: EtaConeSpace, center, c, p, margin: float = DEFAULT_MARGIN) -> bool:
    """Is *p* in the open ball ``{y : d(center, y) << c}``?

    ``<<`` is decided with an explicit interior *margin*; *c* itself must be
    interior with that margin.
    """
    c = as_vector(space.cone, c)
    if not strictly_interior(space.cone, c, margin):
        raise ContractViolation(f"ball radius {c.tolist()} is not interior to the cone")
    return strictly_interior(space.cone, c - space.d(center, p), margin)


def local_base(space: EtaConeSpace, p, c0, depth: int) -> List[np.ndarray]:
    """Radii ``c0, c0/2, ..., c0/depth`` of the countable local base at *p*."""
    if depth < 1:
        raise ContractViolation("depth must be >= 1")
    c0 = as_vector(space.cone, c0)
    if not strictly_interior(space.cone, c0 / depth, DEFAULT_MARGIN):
        raise ContractViolation(f"c0 = {c0.tolist()} is not interior to the cone")
    return [c0 / k for k in range(1, depth + 1)]


def is_convergent(space: EtaConeSpace, seq, limit, threshold_schedule=DEFAULT_SCHEDULE) -> ConvergenceVerdict:
    """Does ``D(x_n, limit)`` fall below every threshold and stay there?

    ``converging`` when each threshold ``t_k`` has an index after which all
    observed distances are below it; ``diverging`` when the second half of
    the trail is flat and bounded away from 0 without ever meeting the first
    threshold; ``stalled`` when it met some thresholds and then flattened;
    ``inconclusive`` when it is still decreasing as the data runs out.
    """
    seq = _as_prefix(seq)
    sched = _check_schedule(threshold_schedule)
    values = np.array([space.D(x, limit) for x in seq])
    return _verdict(values, sched)


def window_sups(space: EtaConeSpace, seq, window: int) -> np.ndarray:
    """``w_n = max D(x_i, x_j)`` over ``n <= i < j < n + window``."""
    pts = list(seq)
    N = len(pts)
    D = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1, min(N, i + window)):
            D[i, j] = space.D(pts[i], pts[j])
    out = np.empty(max(N - window + 1, 1))
    for n in range(len(out)):
        out[n] = D[n:n + window, n:n + window].max()
    return out


def is_cauchy_prefix(space: EtaConeSpace, seq, threshold_schedule=DEFAULT_SCHEDULE,
                     window: int = DEFAULT_WINDOW) -> ConvergenceVerdict:
    """Cauchy evidence from the sliding-window diameters of the prefix."""
    if window < 2:
        raise ContractViolation("window must be >= 2")
    seq = _as_prefix(seq)
    sched = _check_schedule(threshold_schedule)
    return _verdict(window_sups(space, seq, window), sched)


def closure_contains(space: EtaConeSpace, A: Sequence[Point], x, c0, depth: int = 32,
                     margin: float = DEFAULT_MARGIN) -> bool:
    """True iff every ball ``B(x, c0/k)``, ``k = 1..depth``, meets *A*."""
    if not space.points.is_finite:
        raise ContractViolation("closure is only computed on finite spaces")
    A = list(A)
    if not A:
        raise ContractViolation("A must be nonempty")
    for r in local_base(space, x, c0, depth):
        if not any(ball_contains(space, x, r, a, margin) for a in A):
            return False
    return True


@dataclass
class DiscontinuityFinding:
    """``trail_limit`` estimates ``lim D(x_n, probe)``; ``limit_distance`` is
    ``D(limit, probe)``.  The estimate is the last trail value and
    ``uncertainty`` is its movement over the second half of the trail."""

    trail_limit: float
    limit_distance: float
    uncertainty: float
    discontinuous: bool

    @property
    def pair(self) -> Tuple[float, float]:
        return (self.trail_limit, self.limit_distance)

    def to_dict(self):
        return {"trail_limit": self.trail_limit, "limit_distance": self.limit_distance,
                "uncertainty": self.uncertainty, "discontinuous": self.discontinuous}


def detect_metric_discontinuity(space: EtaConeSpace, seq, limit, probe, tol: float = 1e-9,
                                threshold_schedule=None) -> DiscontinuityFinding:
    """Compare ``lim D(x_n, probe)`` with ``D(limit, probe)`` along a convergent prefix.

    Flags a discontinuity when the two differ by more than
    ``tol + 2 * uncertainty``.  If *threshold_schedule* is given the prefix is
    first required to be converging under it.
    """
    seq = _as_prefix(seq)
    if threshold_schedule is not None:
        verdict = is_convergent(space, seq, limit, threshold_schedule)
        if not verdict.converging:
            raise ContractViolation(f"sequence is not converging to {limit!r} ({verdict.status})")
    values = np.array([space.D(x, probe) for x in seq])
    est = float(values[-1])
    unc = float(abs(values[-1] - values[len(values) // 2]))
    at_limit = space.D(limit, probe)
    return DiscontinuityFinding(est, at_limit, unc, abs(est - at_limit) > tol + 2 * unc)
