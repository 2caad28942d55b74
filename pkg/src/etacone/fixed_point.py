"""Picard iteration and fixed-point solvers with numerically checked hypotheses.

Every solver returns a :class:`SolveReport` carrying the measured value of
each hypothesis (contraction factor, orbit scale, aggregate Hardy-Rogers
coefficient, ...) next to the iteration result, so a converged run that was
never guaranteed is distinguishable from a certified one.  Guarantees are
scoped to the start point that was tested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from .errors import ContractViolation, DomainError, EstimationError, InconsistentDataError
from .space import DEFAULT_PLAN, EtaConeSpace, Point, PointSet, SamplingPlan, _label

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10000
DEFAULT_TAIL_WINDOW = 16

PASS, FAIL, UNVERIFIED = "pass", "fail", "unverified"

# relative slack for step-ratio monitors; absorbs one or two roundings
_RTOL = 1e-12


class SelfMap:
    """A map ``T : X -> X``; every evaluation is checked against the domain."""

    def __init__(self, domain: PointSet, apply: Callable[[Point], Point], description: str = ""):
        self.domain = domain
        self.apply = apply
        self.description = description

    @classmethod
    def from_table(cls, mapping: Dict[Point, Point], domain: Optional[PointSet] = None,
                   description: str = "table") -> "SelfMap":
        domain = domain or PointSet.finite(list(mapping))
        missing = [p for p in domain.points if p not in mapping]
        if missing:
            raise ContractViolation(f"map is undefined at {missing!r}")
        table = dict(mapping)
        return cls(domain, table.__getitem__, description)

    def __call__(self, x):
        y = self.apply(x)
        if isinstance(y, np.floating):
            y = float(y)
        if y not in self.domain:
            raise DomainError(f"{self.description or 'map'} sends {x!r} to {y!r}, outside the domain", y)
        return y

    def power(self, n: int) -> "SelfMap":
        """The n-fold composition ``T^n``."""
        if n < 1:
            raise ContractViolation("power must be >= 1")
        if n == 1:
            return self

        def composed(x):
            for _ in range(n):
                x = self(x)
            return x

        return SelfMap(self.domain, composed, f"({self.description})^{n}")

    def __repr__(self):
        return f"SelfMap({self.description!r})"


@dataclass
class CheckResult:
    """Outcome of one numerical hypothesis check: ``value`` against ``bound``."""

    name: str
    status: str
    value: float
    bound: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def margin(self) -> float:
        return self.bound - self.value

    def to_dict(self):
        return {"name": self.name, "status": self.status, "value": self.value,
                "bound": self.bound, "margin": self.margin, "detail": self.detail}


@dataclass
class OrbitTrace:
    """Iterates ``x_0 .. x_N`` of a Picard orbit and its step distances.

    ``orbit_eta`` holds ``eta(x_i, x_j)`` over the last ``tail_window``
    iterates; :meth:`eta` and :meth:`D` evaluate arbitrary orbit pairs.
    """

    iterates: List[Point]
    step_distances: List[float]
    orbit_eta: np.ndarray
    tail_window: int
    stop_reason: str
    space: EtaConeSpace = field(repr=False)

    def __len__(self):
        return len(self.iterates)

    def eta(self, i: int, j: int) -> float:
        return self.space.eta(self.iterates[i], self.iterates[j])

    def D(self, i: int, j: int) -> float:
        return self.space.D(self.iterates[i], self.iterates[j])

    @property
    def eta_tail_max(self) -> float:
        return float(self.orbit_eta.max())


def _tail_eta(space: EtaConeSpace, iterates: Sequence[Point], window: int) -> np.ndarray:
    tail = list(iterates[-window:])
    return np.array([[space.eta(a, b) for b in tail] for a in tail])


def picard_orbit(space: EtaConeSpace, T: SelfMap, x0, max_iter: int = DEFAULT_MAX_ITER,
                 stop_tol: float = DEFAULT_TOL, tail_window: int = DEFAULT_TAIL_WINDOW) -> OrbitTrace:
    """Iterate ``x_{n+1} = T x_n`` from *x0*.

    Stops when a step ``d_n = D(x_n, x_{n+1})`` is below *stop_tol* (or zero),
    when a cycle is detected (a revisited point on finite domains; a
    non-shrinking near-return with period 2..4 on intervals), or after
    *max_iter* applications of T.
    """
    if max_iter < 1:
        raise ContractViolation("max_iter must be >= 1")
    if tail_window < 2:
        raise ContractViolation("tail_window must be >= 2")
    if x0 not in T.domain:
        raise DomainError(f"start point {x0!r} is outside the domain", x0)
    finite = space.points.is_finite
    x = x0
    iterates, steps = [x0], []
    seen = {x0} if finite else None
    reason = "max_iter"
    for _ in range(max_iter):
        y = T(x)
        dn = space.D(x, y)
        iterates.append(y)
        steps.append(dn)
        if dn < stop_tol or dn == 0:
            reason = "converged"
            break
        if finite:
            if y in seen:
                reason = "cycle"
                break
            seen.add(y)
        elif len(steps) >= 2 and steps[-1] >= steps[-2]:
            if any(len(iterates) > p and space.D(y, iterates[-1 - p]) < stop_tol for p in (2, 3, 4)):
                reason = "cycle"
                break
        x = y
    return OrbitTrace(iterates, steps, _tail_eta(space, iterates, tail_window),
                      tail_window, reason, space)


def _pairs(space: EtaConeSpace, sampling: SamplingPlan, distinct: bool = True):
    pts = space.points.sample(sampling)
    return [(x, y) for i, x in enumerate(pts) for j, y in enumerate(pts) if not (distinct and i == j)]


def _contraction_scan(space: EtaConeSpace, T: SelfMap, sampling: SamplingPlan):
    best, witness, used = -math.inf, None, 0
    images = {}
    for x, y in _pairs(space, sampling):
        dxy = space.D(x, y)
        if dxy == 0:
            continue
        if x not in images:
            images[x] = T(x)
        if y not in images:
            images[y] = T(y)
        used += 1
        r = space.D(images[x], images[y]) / dxy
        if r > best:
            best, witness = r, (x, y)
    if used == 0:
        raise EstimationError("every sampled pair has zero distance")
    return float(best), witness, used


def estimate_contraction(space: EtaConeSpace, T: SelfMap, pair_samples: SamplingPlan = DEFAULT_PLAN) -> float:
    """Largest observed ``D(Tx, Ty) / D(x, y)`` over distinct pairs.

    Exact on finite spaces (every pair); a lower bound on the Lipschitz
    constant for interval spaces.
    """
    return _contraction_scan(space, T, pair_samples)[0]


def orbit_eta_condition(trace: OrbitTrace, k: float, tail_window: Optional[int] = None) -> CheckResult:
    """``max eta(x_n, x_m)`` over the orbit tail must stay below ``1/k``."""
    if k < 0:
        raise ContractViolation("k must be nonnegative")
    w = tail_window or trace.tail_window
    if w < 2:
        raise ContractViolation("tail_window must be >= 2")
    tail = trace.orbit_eta if w == trace.tail_window else _tail_eta(trace.space, trace.iterates, w)
    value = float(tail.max())
    bound = math.inf if k == 0 else 1.0 / k
    detail = f"max over the last {min(w, len(trace.iterates))} iterates"
    if value < bound:
        status = PASS
    elif trace.stop_reason == "converged":
        status = FAIL
    else:
        # the condition is about the limit; an unsettled orbit cannot refute it
        status = UNVERIFIED
        detail += f"; orbit stopped by {trace.stop_reason}, tail may not reflect the limit"
    return CheckResult("orbit_eta", status, value, bound, detail)


def partial_sums(trace: OrbitTrace, k: float, m_witness: int) -> List[float]:
    """``S_n = sum_{j=1}^{n} k^j prod_{i=1}^{j} eta(x_i, x_m)`` for ``n = 1 .. m-1``."""
    if not 0 <= k < 1:
        raise ContractViolation("k must lie in [0, 1)")
    if not 1 <= m_witness < len(trace.iterates):
        raise ContractViolation(f"witness index must lie in [1, {len(trace.iterates) - 1}]")
    out, total, prod = [], 0.0, 1.0
    for j in range(1, m_witness):
        prod *= trace.eta(j, m_witness)
        total += k ** j * prod
        out.append(total)
    return out


def partial_sum_bound(trace: OrbitTrace, k: float, n: int, m: int) -> float:
    """Right-hand side ``(S_{m-1} - S_n) * D(x_0, x_1)`` with ``S_0 = 0``."""
    if not 0 <= n < m:
        raise ContractViolation("need 0 <= n < m")
    S = [0.0] + partial_sums(trace, k, m)
    return (S[m - 1] - S[n]) * trace.step_distances[0]


def orbit_distance_bound(trace: OrbitTrace, k: float, n: int, m: int) -> float:
    """Bound on ``D(x_n, x_m)`` from folding the scaled triangle inequality.

    ``D(x_0, x_1) * sum_{j=n}^{m-1} k^j prod_{i=n}^{j} eta(x_i, x_m)``; valid
    whenever every step satisfies ``d_j <= k d_{j-1}``.
    """
    if not 0 <= n < m < len(trace.iterates):
        raise ContractViolation("need 0 <= n < m <= last index")
    total, prod = 0.0, 1.0
    for j in range(n, m):
        prod *= trace.eta(j, m)
        total += k ** j * prod
    return total * trace.step_distances[0]


def cauchy_rate_check(trace: OrbitTrace, lam: float) -> CheckResult:
    """Every step shrinks by ``lam`` and the orbit tail keeps ``eta < 1/lam``."""
    if not 0 < lam < 1:
        raise ContractViolation("lambda must lie in (0, 1)")
    d = trace.step_distances
    worst = 0.0
    for n in range(1, len(d)):
        if d[n] > lam * d[n - 1] * (1 + _RTOL):
            return CheckResult("cauchy_rate", FAIL, d[n] / d[n - 1] if d[n - 1] else math.inf, lam,
                               f"d_{n} = {d[n]:.6g} > lambda * d_{n - 1} = {lam * d[n - 1]:.6g}")
        if d[n - 1] > 0:
            worst = max(worst, d[n] / d[n - 1])
    eta_tail = trace.eta_tail_max
    if eta_tail >= 1 / lam:
        return CheckResult("cauchy_rate", FAIL, worst, lam,
                           f"orbit eta tail {eta_tail:.6g} >= 1/lambda = {1 / lam:.6g}")
    return CheckResult("cauchy_rate", PASS, worst, lam,
                       f"{max(len(d) - 1, 0)} step ratios checked; eta tail {eta_tail:.6g}")


@dataclass
class SolveReport:
    """Result of a fixed-point solve.

    ``fixed_point`` is the first iterate whose step fell below the tolerance
    (``None`` if the iteration never got there); ``residual`` is
    ``D(x, Tx)`` at that point (or at the last iterate).  ``status`` is one of
    converged, precondition_failed, max_iter, cycle_detected.
    """

    scheme: str
    status: str
    fixed_point: Optional[Point]
    residual: float
    iterations: int
    preconditions: Dict[str, CheckResult]
    tol: float
    trace: Optional[OrbitTrace] = field(default=None, repr=False)
    extra: Dict[str, object] = field(default_factory=dict)
    scope: str = ""

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_dict(self):
        return {
            "scheme": self.scheme, "status": self.status,
            "fixed_point": None if self.fixed_point is None else _label(self.fixed_point),
            "residual": self.residual, "iterations": self.iterations, "tol": self.tol,
            "preconditions": {k: v.to_dict() for k, v in self.preconditions.items()},
            "extra": {k: (_label(v) if not isinstance(v, (list, dict, str, type(None))) else v)
                      for k, v in self.extra.items()},
            "scope": self.scope,
        }


def _finish(scheme: str, space: EtaConeSpace, T: SelfMap, trace: OrbitTrace,
            checks: Dict[str, CheckResult], tol: float) -> SolveReport:
    if trace.stop_reason == "converged":
        candidate = trace.iterates[-2]
        fixed, iterations = candidate, len(trace.iterates) - 2
    else:
        candidate = trace.iterates[-1]
        fixed, iterations = None, len(trace.step_distances)
    residual = space.D(candidate, T(candidate))
    if any(c.status == FAIL for c in checks.values()):
        status = "precondition_failed"
    elif trace.stop_reason == "converged" and residual <= tol:
        status = "converged"
    elif trace.stop_reason == "cycle":
        status = "cycle_detected"
    else:
        status = "max_iter"
    scope = f"guarantee covers the orbit from x0 = {_label(trace.iterates[0])!r}"
    if not space.points.is_finite:
        scope += "; domain checks are sampled"
    return SolveReport(scheme, status, fixed, residual, iterations, checks, tol, trace, {}, scope)


def _contraction_check(space, T, sampling) -> CheckResult:
    k, witness, used = _contraction_scan(space, T, sampling)
    how = (f"exact over all {used} distinct pairs" if space.points.is_finite
           else f"sampled lower bound over {used} pairs")
    return CheckResult("contraction", PASS if k < 1 else FAIL, k, 1.0,
                       f"{how}; attained at {tuple(_label(p) for p in witness)}")


def _step_decay_check(trace: OrbitTrace, k: float) -> CheckResult:
    d = trace.step_distances
    worst = 0.0
    for n, dn in enumerate(d):
        bound = k ** n * d[0]
        if dn > bound * (1 + _RTOL):
            return CheckResult("step_decay", FAIL, dn, bound, f"d_{n} exceeds k^{n} d_0")
        if bound > 0:
            worst = max(worst, dn / bound)
    return CheckResult("step_decay", PASS, worst, 1.0, f"d_n <= k^n d_0 for {len(d)} steps")


def solve_banach(space: EtaConeSpace, T: SelfMap, x0, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, tail_window: int = DEFAULT_TAIL_WINDOW,
                 sampling: SamplingPlan = DEFAULT_PLAN) -> SolveReport:
    """Picard iteration under a contraction ``D(Tx,Ty) <= k D(x,y)`` whose orbit
    satisfies ``lim eta(x_n, x_m) < 1/k``.

    The iteration runs even when a hypothesis fails; the report then has
    status ``precondition_failed`` and its fixed point carries no guarantee.
    """
    if tol <= 0:
        raise ContractViolation("tol must be positive")
    contraction = _contraction_check(space, T, sampling)
    trace = picard_orbit(space, T, x0, max_iter, tol, tail_window)
    k = contraction.value
    checks = {"contraction": contraction,
              "orbit_eta": orbit_eta_condition(trace, k),
              "step_decay": _step_decay_check(trace, k)}
    return _finish("banach", space, T, trace, checks, tol)


def solve_banach_iterate_power(space: EtaConeSpace, T: SelfMap, n_power: int, x0,
                               tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                               tail_window: int = DEFAULT_TAIL_WINDOW,
                               sampling: SamplingPlan = DEFAULT_PLAN) -> SolveReport:
    """Solve with the contraction hypothesis imposed on ``T^n`` only.

    The orbit scale condition is evaluated along the orbit of T itself, and
    the returned point is additionally checked as a fixed point of T.
    """
    Tn = T.power(n_power)
    report = solve_banach(space, Tn, x0, tol, max_iter, tail_window, sampling)
    report.scheme = f"power {n_power}"
    if n_power > 1:
        base = picard_orbit(space, T, x0, max(n_power * max(report.iterations, 1), 2), tol, tail_window)
        report.preconditions["orbit_eta"] = orbit_eta_condition(base, report.preconditions["contraction"].value)
        report.preconditions["orbit_eta"].detail += " of T"
    if report.fixed_point is not None:
        base_residual = space.D(report.fixed_point, T(report.fixed_point))
        report.extra["base_residual"] = base_residual
        report.preconditions["base_fixed_point"] = CheckResult(
            "base_fixed_point", PASS if base_residual <= tol else FAIL, base_residual, tol,
            "D(x*, T x*) for the original map")
        if base_residual > tol and report.status == "converged":
            report.status = "precondition_failed"
    return report


def solve_strict_compact(space: EtaConeSpace, T: SelfMap, x0) -> SolveReport:
    """Fixed point of a strict contraction ``D(Tx,Ty) < D(x,y)`` on a finite space.

    Strictness is checked on every distinct pair; the orbit must then settle
    within ``|X|`` steps, and an exhaustive scan confirms uniqueness.
    """
    if not space.points.is_finite:
        raise ContractViolation("strict-contraction solver needs a finite space")
    pts = list(space.points.points)
    images = {p: T(p) for p in pts}
    worst, witness = -math.inf, None
    strict = True
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            dxy = space.D(x, y)
            dT = space.D(images[x], images[y])
            ratio = dT / dxy if dxy > 0 else math.inf
            if ratio > worst:
                worst, witness = ratio, (x, y)
            if not dT < dxy:
                strict = False
    detail = "" if witness is None else f"largest ratio at {tuple(_label(p) for p in witness)}"
    if not strict:
        detail = "not strict: " + detail
    checks = {"strict_contraction": CheckResult("strict_contraction", PASS if strict else FAIL,
                                                max(worst, 0.0), 1.0, detail)}
    trace = picard_orbit(space, T, x0, max_iter=len(pts) + 1, stop_tol=0.0,
                         tail_window=max(2, min(DEFAULT_TAIL_WINDOW, len(pts) + 1)))
    fixed_points = [p for p in pts if space.D(p, images[p]) == 0]
    checks["uniqueness"] = CheckResult(
        "uniqueness", PASS if len(fixed_points) == 1 else FAIL, float(len(fixed_points)), 1.0,
        f"fixed points found: {[_label(p) for p in fixed_points]}")
    report = _finish("strict", space, T, trace, checks, 0.0)
    report.extra["fixed_points"] = [_label(p) for p in fixed_points]
    return report


Coefficient = Union[float, Callable[[Point, Point], float]]


def _coef(c: Coefficient) -> Callable[[Point, Point], float]:
    if callable(c):
        return c
    value = float(c)
    return lambda x, y: value


def solve_hardy_rogers(space: EtaConeSpace, T: SelfMap, alpha: Coefficient = 0.0,
                       beta: Coefficient = 0.0, gamma: Coefficient = 0.0, delta: Coefficient = 0.0,
                       x0=None, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                       tail_window: int = DEFAULT_TAIL_WINDOW,
                       sampling: SamplingPlan = DEFAULT_PLAN) -> SolveReport:
    """Fixed point under the five-distance contractive condition

        D(Tx,Ty) <= a D(x,y) + b D(x,Tx) + g D(y,Ty) + e [D(x,Ty) + D(y,Tx)]

    with ``lam = sup(a + b + g + 2 eta e) < 1`` and ``sup eta < 1/lam``.

    ``lam``, ``sup eta`` and the condition itself are evaluated on every
    ordered pair of a finite space, or on the sampled pairs of an interval.
    While iterating, each step must shrink by ``lam``; if it does not although
    every hypothesis passed, :class:`InconsistentDataError` is raised.
    """
    if x0 is None:
        raise ContractViolation("x0 is required")
    if tol <= 0:
        raise ContractViolation("tol must be positive")
    a, b, g, e = (_coef(c) for c in (alpha, beta, gamma, delta))
    lam, sup_eta, worst_excess, where = 0.0, 1.0, -math.inf, None
    images = {}
    for x, y in _pairs(space, sampling, distinct=False):
        coeffs = (a(x, y), b(x, y), g(x, y), e(x, y))
        if not all(0 <= c < 1 for c in coeffs):
            raise ContractViolation(f"coefficients at ({x!r}, {y!r}) leave [0, 1): {coeffs}")
        eta = space.eta(x, y)
        sup_eta = max(sup_eta, eta)
        lam = max(lam, coeffs[0] + coeffs[1] + coeffs[2] + 2 * eta * coeffs[3])
        for p in (x, y):
            if p not in images:
                images[p] = T(p)
        Tx, Ty = images[x], images[y]
        rhs = (coeffs[0] * space.D(x, y) + coeffs[1] * space.D(x, Tx) + coeffs[2] * space.D(y, Ty)
               + coeffs[3] * (space.D(x, Ty) + space.D(y, Tx)))
        excess = space.D(Tx, Ty) - rhs * (1 + _RTOL)
        if excess > worst_excess:
            worst_excess, where = excess, (x, y)
    how = "exact over all pairs" if space.points.is_finite else "sampled"
    inv = math.inf if lam == 0 else 1.0 / lam
    checks = {
        "lambda": CheckResult("lambda", PASS if lam < 1 else FAIL, lam, 1.0, how),
        "sup_eta": CheckResult("sup_eta", PASS if sup_eta < inv else FAIL, sup_eta, inv, how),
        "contractive_condition": CheckResult(
            "contractive_condition", PASS if worst_excess <= 0 else FAIL, max(worst_excess, 0.0), 0.0,
            f"{how}; worst pair {tuple(_label(p) for p in where)}"),
    }
    trace = picard_orbit(space, T, x0, max_iter, tol, tail_window)
    checks["orbit_eta"] = orbit_eta_condition(trace, lam)
    if all(c.passed for c in checks.values()):
        d = trace.step_distances
        for n in range(1, len(d)):
            if d[n] > lam * d[n - 1] * (1 + _RTOL):
                raise InconsistentDataError(
                    f"step {n}: D(x_n, x_n+1) = {d[n]:.6g} exceeds lambda * D(x_n-1, x_n) = "
                    f"{lam * d[n - 1]:.6g}; the coefficients do not bound this map")
        if lam > 0:
            checks["cauchy_rate"] = cauchy_rate_check(trace, lam)
    report = _finish("hardy-rogers", space, T, trace, checks, tol)
    report.extra["lambda"] = lam
    report.extra["sup_eta"] = sup_eta
    report.extra["orbit_eta_tail"] = trace.eta_tail_max
    return report
