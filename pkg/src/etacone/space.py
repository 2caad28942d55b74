"""Eta-cone metric spaces and their real-valued eta-metric view.

An eta-cone metric assigns every pair of points a cone-valued distance
``d(x, y)`` and a scale ``eta(x, y) >= 1`` so that

    d(x, z) <= eta(x, z) * (d(x, y) + d(y, z))

in the cone order.  Finite spaces are checked exhaustively; interval spaces
are checked on a deterministic sample (see :class:`SamplingPlan`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .cone import DEFAULT_TOL, ConeSpace, as_vector, cone_contains, cone_slack, norm_of
from .errors import ContractViolation, DataError, InfeasibleError, PreconditionError

Point = Hashable


@dataclass(frozen=True)
class SamplingPlan:
    """How to pick points from an interval domain.

    ``count`` points in total: both endpoints plus a scrambled Halton sequence
    seeded by ``seed``.  Unbounded intervals are sampled on
    ``[lower, PointSet.sample_upper]``.
    """

    count: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.count < 2:
            raise ContractViolation("a sampling plan needs at least 2 points")


DEFAULT_PLAN = SamplingPlan()


@dataclass(frozen=True, eq=False)
class PointSet:
    """Either an enumerated finite set or a real interval ``[lower, upper]``.

    Interval sets may carry sentinel points (e.g. ``math.inf`` standing for an
    adjoined point at infinity) and ``upper`` may be ``inf`` provided a
    ``sample_upper`` is given for sampling.
    """

    kind: str
    points: Tuple[Point, ...] = ()
    lower: float = math.nan
    upper: float = math.nan
    sentinels: Tuple[Point, ...] = ()
    sample_upper: Optional[float] = None
    _index: dict = field(default_factory=dict, repr=False)

    @classmethod
    def finite(cls, points: Iterable[Point]) -> "PointSet":
        pts = tuple(points)
        if not pts:
            raise ContractViolation("a finite point set needs at least one point")
        index = {p: i for i, p in enumerate(pts)}
        if len(index) != len(pts):
            raise ContractViolation("point labels must be distinct")
        return cls("finite", pts, _index=index)

    @classmethod
    def interval(cls, lower: float, upper: float, sentinels: Sequence[Point] = (),
                 sample_upper: Optional[float] = None) -> "PointSet":
        lower, upper = float(lower), float(upper)
        if not (math.isfinite(lower) and lower < upper) or math.isnan(upper):
            raise ContractViolation(f"need finite lower < upper, got [{lower}, {upper}]")
        if not math.isfinite(upper):
            if sample_upper is None or not lower < sample_upper < math.inf:
                raise ContractViolation("unbounded interval requires a finite sample_upper")
        if len(set(sentinels)) != len(sentinels):
            raise ContractViolation("sentinel labels must be distinct")
        for s in sentinels:
            if isinstance(s, (int, float)) and lower <= s <= upper:
                raise ContractViolation(f"sentinel {s!r} collides with a numeric point")
        return cls("interval", (), lower, upper, tuple(sentinels), sample_upper)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def __contains__(self, p) -> bool:
        if self.is_finite:
            try:
                return p in self._index
            except TypeError:
                return False
        if p in self.sentinels:
            return True
        if isinstance(p, bool) or not isinstance(p, (int, float, np.floating, np.integer)):
            return False
        return self.lower <= float(p) <= self.upper

    def __len__(self) -> int:
        if not self.is_finite:
            raise TypeError("interval point sets have no length")
        return len(self.points)

    def index(self, p) -> int:
        return self._index[p]

    def sample(self, plan: SamplingPlan = DEFAULT_PLAN) -> List[Point]:
        """Every point of a finite set, or a deterministic sample of an interval."""
        if self.is_finite:
            return list(self.points)
        hi = self.upper if math.isfinite(self.upper) else self.sample_upper
        inner = max(plan.count - 2, 0)
        if inner:
            u = qmc.Halton(d=1, scramble=True, seed=plan.seed).random(inner)[:, 0]
            xs = self.lower + (hi - self.lower) * u
        else:
            xs = np.empty(0)
        xs = np.unique(np.r_[self.lower, xs, hi])
        return [float(x) for x in xs] + list(self.sentinels)


class EtaConeSpace:
    """A point set with a cone-valued distance ``d`` and a scale ``eta``.

    ``d`` and ``eta`` are callables on pairs of points.  Use
    :meth:`from_tables` for finite spaces given as arrays.  ``eta`` values
    below 1 are rejected rather than clamped.
    """

    def __init__(self, points: PointSet, cone: ConeSpace,
                 d: Callable[[Point, Point], Any], eta: Callable[[Point, Point], float],
                 name: str = ""):
        self.points = points
        self.cone = cone
        self._d = d
        self._eta = eta
        self.name = name

    @classmethod
    def from_tables(cls, labels: Sequence[Point], d_table, eta_table=None,
                    cone: Optional[ConeSpace] = None, name: str = "") -> "EtaConeSpace":
        """Build a finite space from an ``(n, n)`` or ``(n, n, m)`` distance array."""
        pts = PointSet.finite(labels)
        n = len(pts)
        dt = np.asarray(d_table, dtype=float)
        if dt.ndim == 2:
            dt = dt[:, :, None]
        if dt.shape[:2] != (n, n):
            raise ContractViolation(f"distance table has shape {dt.shape}, expected ({n}, {n}, m)")
        if cone is None:
            cone = ConeSpace.orthant(dt.shape[2])
        elif cone.dimension != dt.shape[2]:
            raise ContractViolation("distance vectors do not match the cone dimension")
        et = np.ones((n, n)) if eta_table is None else np.asarray(eta_table, dtype=float)
        if et.shape != (n, n):
            raise ContractViolation(f"eta table has shape {et.shape}, expected ({n}, {n})")
        for (i, j) in zip(*np.nonzero(~np.isfinite(dt).all(axis=2))):
            raise DataError(f"distance ({labels[i]!r}, {labels[j]!r}) is not finite")
        for (i, j) in zip(*np.nonzero(~np.isfinite(et))):
            raise DataError(f"eta ({labels[i]!r}, {labels[j]!r}) is not finite")
        for (i, j) in zip(*np.nonzero(et < 1)):
            raise PreconditionError(f"eta ({labels[i]!r}, {labels[j]!r}) = {et[i, j]} is below 1")
        dt = dt.copy()
        et = et.copy()
        dt.setflags(write=False)
        et.setflags(write=False)
        idx = pts.index
        space = cls(pts, cone, lambda x, y: dt[idx(x), idx(y)], lambda x, y: et[idx(x), idx(y)], name)
        space._tables = (dt, et)
        return space

    def _check_point(self, p):
        if p not in self.points:
            raise ContractViolation(f"point {p!r} is not in the space")

    def d(self, x, y) -> np.ndarray:
        self._check_point(x)
        self._check_point(y)
        v = np.atleast_1d(np.asarray(self._d(x, y), dtype=float))
        if v.shape != (self.cone.dimension,):
            raise DataError(f"d({x!r}, {y!r}) has shape {v.shape}, expected ({self.cone.dimension},)")
        if not np.all(np.isfinite(v)):
            raise DataError(f"d({x!r}, {y!r}) is not finite: {v.tolist()}")
        return v

    def eta(self, x, y) -> float:
        self._check_point(x)
        self._check_point(y)
        s = float(self._eta(x, y))
        if math.isnan(s):
            raise DataError(f"eta({x!r}, {y!r}) is NaN")
        if s < 1:
            raise PreconditionError(f"eta({x!r}, {y!r}) = {s} is below 1")
        return s

    def D(self, x, y) -> float:
        """Real-valued distance ``||d(x, y)||``."""
        return norm_of(self.cone, self.d(x, y))

    def tables(self, points: Optional[Sequence[Point]] = None) -> Tuple[np.ndarray, np.ndarray]:
        """``(d, eta)`` arrays of shapes ``(n, n, m)`` and ``(n, n)`` over *points*."""
        if points is None:
            if hasattr(self, "_tables"):
                return self._tables
            points = self.points.sample()
        n = len(points)
        dt = np.empty((n, n, self.cone.dimension))
        et = np.empty((n, n))
        for i, x in enumerate(points):
            for j, y in enumerate(points):
                dt[i, j] = self.d(x, y)
                et[i, j] = self.eta(x, y)
        return dt, et

    def with_eta(self, eta: Callable[[Point, Point], float], name: str = "") -> "EtaConeSpace":
        """Same points and distances, different scale function."""
        return EtaConeSpace(self.points, self.cone, self._d, eta, name or self.name)

    def __repr__(self):
        return f"EtaConeSpace({self.name or self.points.kind!r}, {self.cone!r})"


# ---------------------------------------------------------------- axioms ---

@dataclass
class Violation:
    axiom: str
    points: Tuple[Point, ...]
    lhs: List[float]
    rhs: List[float]
    slack: float

    def to_dict(self):
        return {"axiom": self.axiom, "points": [_label(p) for p in self.points],
                "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack}


@dataclass
class TripleCheck:
    """One instance ``d(x,z) <= eta(x,z) (d(x,y) + d(y,z))`` with its slack."""

    x: Point
    y: Point
    z: Point
    eta: float
    lhs: List[float]
    rhs: List[float]
    slack: float

    @property
    def ok(self) -> bool:
        return self.slack >= 0

    def to_dict(self):
        return {"triple": [_label(self.x), _label(self.y), _label(self.z)], "eta": self.eta,
                "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack}


@dataclass
class AxiomReport:
    d1_ok: bool
    d2_ok: bool
    d3_ok: bool
    violations: List[Violation]
    triples_checked: int
    pairs_checked: int
    exhaustive: bool
    tol: float
    tolerance_consumed: float
    binding: List[TripleCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.d1_ok and self.d2_ok and self.d3_ok

    def binding_check(self, x, z) -> Optional[TripleCheck]:
        """Tightest non-degenerate triangle check for the ordered pair (x, z)."""
        for c in self.binding:
            if c.x == x and c.z == z:
                return c
        return None

    def to_dict(self):
        return {
            "d1_ok": self.d1_ok, "d2_ok": self.d2_ok, "d3_ok": self.d3_ok, "ok": self.ok,
            "exhaustive": self.exhaustive, "tol": self.tol,
            "tolerance_consumed": self.tolerance_consumed,
            "pairs_checked": self.pairs_checked, "triples_checked": self.triples_checked,
            "violations": [v.to_dict() for v in self.violations],
            "binding": [c.to_dict() for c in self.binding],
        }


def _label(p):
    if isinstance(p, (float, np.floating)):
        return float(p) if math.isfinite(p) else str(p)
    if isinstance(p, (int, np.integer)):
        return int(p)
    return str(p)


def _triangle_slack(cone: ConeSpace, dt: np.ndarray, et: np.ndarray) -> np.ndarray:
    """Array ``s[x, y, z]`` of scalar slacks of the scaled triangle inequality."""
    n = dt.shape[0]
    # rhs[x, y, z] = eta[x, z] * (d[x, y] + d[y, z])
    rhs = et[:, None, :, None] * (dt[:, :, None, :] + dt[None, :, :, :])
    diff = rhs - dt[:, None, :, :]
    if cone.is_orthant:
        return diff.min(axis=3)
    out = np.empty((n, n, n))
    for idx in np.ndindex(n, n, n):
        out[idx] = cone_slack(cone, diff[idx])
    return out


def check_axioms(space: EtaConeSpace, tol: float = DEFAULT_TOL,
                 sampling: SamplingPlan = DEFAULT_PLAN) -> AxiomReport:
    """Check (d1) positivity/identity, (d2) symmetry and (d3) the scaled triangle
    inequality on every pair and ordered triple of the point set (or sample)."""
    if tol < 0:
        raise ContractViolation("tol must be nonnegative")
    pts = space.points.sample(sampling)
    dt, et = space.tables(None if space.points.is_finite else pts)
    cone = space.cone
    n = len(pts)
    violations: List[Violation] = []
    zero = [0.0] * cone.dimension

    d1_ok = d2_ok = True
    for i in range(n):
        for j in range(n):
            v = dt[i, j]
            nv = norm_of(cone, v)
            if i == j:
                if nv > tol:
                    d1_ok = False
                    violations.append(Violation("d1", (pts[i], pts[j]), v.tolist(), zero, -nv))
                continue
            if not cone_contains(cone, v, tol):
                d1_ok = False
                violations.append(Violation("d1", (pts[i], pts[j]), zero, v.tolist(), cone_slack(cone, v)))
            elif nv <= tol:
                d1_ok = False
                violations.append(Violation("d1", (pts[i], pts[j]), v.tolist(), zero, -nv))
            if i < j:
                asym = norm_of(cone, v - dt[j, i])
                if asym > tol:
                    d2_ok = False
                    violations.append(Violation("d2", (pts[i], pts[j]), v.tolist(), dt[j, i].tolist(), -asym))

    slack = _triangle_slack(cone, dt, et)
    d3_ok = True
    for (i, j, k) in zip(*np.nonzero(slack < -tol)):
        d3_ok = False
        rhs = et[i, k] * (dt[i, j] + dt[j, k])
        violations.append(Violation("d3", (pts[i], pts[j], pts[k]), dt[i, k].tolist(),
                                    rhs.tolist(), float(slack[i, j, k])))

    binding: List[TripleCheck] = []
    if n >= 3:
        masked = slack.copy()
        ar = np.arange(n)
        masked[ar, ar, :] = np.inf
        masked[:, ar, ar] = np.inf
        best_y = masked.argmin(axis=1)
        for i in range(n):
            for k in range(n):
                if i == k:
                    continue
                j = int(best_y[i, k])
                rhs = et[i, k] * (dt[i, j] + dt[j, k])
                binding.append(TripleCheck(pts[i], pts[j], pts[k], float(et[i, k]),
                                           dt[i, k].tolist(), rhs.tolist(), float(slack[i, j, k])))

    consumed = max(0.0, -float(slack.min())) if n else 0.0
    return AxiomReport(d1_ok, d2_ok, d3_ok, violations, n ** 3, n * n,
                       space.points.is_finite, tol, consumed, binding)


def sine_eta(x, y) -> float:
    return 1.0 + math.sin(float(x)) + math.sin(float(y))


def check_axioms_sin_variant(space: EtaConeSpace, tol: float = DEFAULT_TOL) -> AxiomReport:
    """Rerun :func:`check_axioms` on *space* with ``eta(x,y) = 1 + sin x + sin y``.

    Point labels must be numeric (or numeric strings).  Raises
    :class:`PreconditionError` if the sine scale drops below 1 anywhere.
    """
    pts = space.points.sample()
    for x in pts:
        for y in pts:
            if sine_eta(x, y) < 1:
                raise PreconditionError(f"1 + sin({x}) + sin({y}) = {sine_eta(x, y):.6g} is below 1")
    return check_axioms(space.with_eta(sine_eta, (space.name or "space") + "+sin"), tol)


# ------------------------------------------------------ derived eta-metric ---

class DerivedEtaMetric:
    """Real-valued view ``D(x, y) = ||d(x, y)||`` of an eta-cone metric space.

    ``d3_ok`` and ``violations`` record whether
    ``D(x,z) <= K eta(x,z) (D(x,y) + D(y,z))`` held on the checked triples,
    with ``K`` the cone's normal constant.
    """

    def __init__(self, base: EtaConeSpace):
        self.base = base
        self.K = float(base.cone.normal_constant)
        self.d3_ok = True
        self.violations: List[Violation] = []
        self.triples_checked = 0

    @property
    def points(self) -> PointSet:
        return self.base.points

    def D(self, x, y) -> float:
        return self.base.D(x, y)

    def eta(self, x, y) -> float:
        return self.base.eta(x, y)

    def table(self, points: Optional[Sequence[Point]] = None) -> np.ndarray:
        dt, _ = self.base.tables(points)
        return _norm_table(self.base.cone, dt)

    def eta_table(self, points: Optional[Sequence[Point]] = None) -> np.ndarray:
        return self.base.tables(points)[1]


def _norm_table(cone: ConeSpace, dt: np.ndarray) -> np.ndarray:
    if cone.norm == "max":
        return np.abs(dt).max(axis=2)
    if cone.norm == "sum":
        return np.abs(dt).sum(axis=2)
    return np.sqrt((dt ** 2).sum(axis=2))


def derive_eta_metric(space: EtaConeSpace, tol: float = DEFAULT_TOL,
                      sampling: SamplingPlan = DEFAULT_PLAN, verify: bool = True) -> DerivedEtaMetric:
    """Return the eta-metric ``D = ||d||`` of *space*.

    With ``verify=True`` the space must pass :func:`check_axioms` (otherwise
    :class:`PreconditionError`); the derived (D3) inequality with factor
    ``K * eta`` is then confirmed on the same triples.
    """
    if verify:
        report = check_axioms(space, tol, sampling)
        if not report.ok:
            raise PreconditionError(
                f"space fails the axioms ({len(report.violations)} violations); pass verify=False to skip")
    metric = DerivedEtaMetric(space)
    pts = space.points.sample(sampling)
    Dt = metric.table(None if space.points.is_finite else pts)
    et = metric.eta_table(None if space.points.is_finite else pts)
    n = len(pts)
    rhs = metric.K * et[:, None, :] * (Dt[:, :, None] + Dt[None, :, :])
    bad = np.nonzero(Dt[:, None, :] - rhs > tol)
    for (i, j, k) in zip(*bad):
        metric.d3_ok = False
        metric.violations.append(Violation("D3", (pts[i], pts[j], pts[k]), [float(Dt[i, k])],
                                           [float(rhs[i, j, k])], float(rhs[i, j, k] - Dt[i, k])))
    metric.triples_checked = n ** 3
    return metric


# ---------------------------------------------------- minimal eta / class ---

def _as_distance_table(metric) -> Tuple[np.ndarray, List[Point]]:
    if isinstance(metric, DerivedEtaMetric):
        if not metric.points.is_finite:
            raise ContractViolation("minimal eta needs a finite point set")
        return metric.table(), list(metric.points.points)
    D = np.asarray(metric, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ContractViolation(f"distance table must be square, got shape {D.shape}")
    return D, list(range(1, D.shape[0] + 1))


def _ratio_scan(D: np.ndarray, labels: Sequence[Point]):
    """Per-pair maximal ratio ``D(x,z) / (D(x,y) + D(y,z))`` and its argmax y."""
    n = D.shape[0]
    if not np.all(np.isfinite(D)):
        raise DataError("distance table has non-finite entries")
    if np.any(D < 0):
        raise ContractViolation("distances must be nonnegative")
    if np.any(np.diag(D) != 0):
        raise ContractViolation("distance table must have a zero diagonal")
    if not np.array_equal(D, D.T):
        raise ContractViolation("distance table must be symmetric")
    ratio = np.full((n, n), -np.inf)
    arg = np.full((n, n), -1, dtype=int)
    if n < 3:
        return ratio, arg
    den = D[:, :, None] + D[None, :, :]  # den[x, y, z]
    num = np.broadcast_to(D[:, None, :], den.shape)
    valid = np.ones((n, n, n), dtype=bool)
    ar = np.arange(n)
    valid[ar, ar, :] = False
    valid[:, ar, ar] = False
    zero = valid & (den == 0)
    for (i, j, k) in zip(*np.nonzero(zero & (num > 0))):
        raise InfeasibleError(
            f"triple ({labels[i]!r}, {labels[j]!r}, {labels[k]!r}): D(x,z) > 0 but D(x,y) + D(y,z) = 0",
            (labels[i], labels[j], labels[k]))
    valid &= ~zero
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(valid, num / np.where(den == 0, 1.0, den), -np.inf)
    arg = r.argmax(axis=1)
    ratio = r.max(axis=1)
    return ratio, arg


def minimal_eta(metric) -> np.ndarray:
    """Pointwise least ``eta >= 1`` making ``D(x,z) <= eta(x,z)(D(x,y)+D(y,z))`` hold.

    Accepts a :class:`DerivedEtaMetric` over a finite space or a square
    symmetric real distance table.  Triples whose denominator vanishes are
    skipped when ``D(x, z) = 0`` and are infeasible otherwise.
    """
    D, labels = _as_distance_table(metric)
    ratio, _ = _ratio_scan(D, labels)
    return np.maximum(1.0, ratio)


@dataclass
class Classification:
    """Outcome of :func:`classify`.

    ``kind`` is ``"metric"`` or ``"metric-type"``; for the latter ``L`` is the
    best constant and ``witness = (x, y, z)`` attains it, with
    ``lhs = D(x, z)`` and ``rhs = D(x, y) + D(y, z)``.
    """

    kind: str
    L: float
    eta_min: np.ndarray
    labels: List[Point]
    witness: Optional[Tuple[Point, Point, Point]] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None

    @property
    def is_metric(self) -> bool:
        return self.kind == "metric"

    def __str__(self):
        if self.is_metric:
            return "metric"
        x, y, z = self.witness
        return (f"metric-type L={self.L:.17g} (not a metric: D({x},{z}) = {self.lhs:.17g} > "
                f"D({x},{y}) + D({y},{z}) = {self.rhs:.17g})")

    def to_dict(self):
        return {"kind": self.kind, "L": self.L, "is_metric": self.is_metric,
                "witness": None if self.witness is None else [_label(p) for p in self.witness],
                "lhs": self.lhs, "rhs": self.rhs,
                "labels": [_label(p) for p in self.labels],
                "eta_min": self.eta_min.tolist()}


def classify(metric, labels: Optional[Sequence[Point]] = None) -> Classification:
    """Metric if every triangle holds, otherwise metric-type with ``L = max eta_min``."""
    D, default_labels = _as_distance_table(metric)
    labels = list(labels) if labels is not None else default_labels
    if len(labels) != D.shape[0]:
        raise ContractViolation("label count does not match the table")
    ratio, arg = _ratio_scan(D, labels)
    eta_min = np.maximum(1.0, ratio)
    n = D.shape[0]
    best, where = 1.0, None
    for i in range(n):
        for k in range(i + 1, n):
            if ratio[i, k] > best:
                best, where = float(ratio[i, k]), (i, int(arg[i, k]), k)
    if where is None:
        return Classification("metric", 1.0, eta_min, labels)
    i, j, k = where
    return Classification("metric-type", best, eta_min, labels, (labels[i], labels[j], labels[k]),
                          float(D[i, k]), float(D[i, j] + D[j, k]))


# ------------------------------------------------------------ chain bound ---

def chain_triangle_bound(metric: DerivedEtaMetric, x, y, chain: Sequence[Point]) -> float:
    """Upper bound on ``D(x, y)`` through the stops ``z_1 .. z_n`` (n >= 2).

    ``eta(x,y) * (D(x,z_1) + sum_j P_j D(z_j, z_{j+1}) + P_{n-1} D(z_n, y))``
    where ``P_j = prod_{i<=j} eta(z_i, y)``.
    """
    chain = list(chain)
    if len(chain) < 2:
        raise ContractViolation("chain needs at least two intermediate points")
    total = metric.D(x, chain[0])
    prod = 1.0
    for j in range(len(chain) - 1):
        prod *= metric.eta(chain[j], y)
        total += prod * metric.D(chain[j], chain[j + 1])
    total += prod * metric.D(chain[-1], y)
    return metric.eta(x, y) * total
