"""Ready-made spaces, maps and counterexamples.

``fixture(name, **params)`` returns a :class:`FixtureEntry`.  Available names
are listed in :data:`FIXTURE_NAMES`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .cone import ConeSpace
from .fixed_point import SelfMap
from .space import EtaConeSpace, PointSet, sine_eta

INF = math.inf


@dataclass
class FixtureEntry:
    name: str
    space: EtaConeSpace
    map: Optional[SelfMap] = None
    coefficients: Dict[str, float] = field(default_factory=dict)
    x0: object = None
    expected: Dict[str, object] = field(default_factory=dict)
    description: str = ""


def _three_point_tables(alpha: float):
    base = {(1, 2): 80.0, (1, 3): 1000.0, (2, 3): 600.0}
    direction = np.array([1.0, alpha])
    dt = np.zeros((3, 3, 2))
    for (i, j), v in base.items():
        dt[i - 1, j - 1] = dt[j - 1, i - 1] = v * direction
    et = np.array([[1.0 + x + y for y in (1, 2, 3)] for x in (1, 2, 3)])
    return dt, et


def three_point_cone(alpha: float = 0.0, norm: str = "max") -> FixtureEntry:
    """Three points in the plane orthant with ``eta(x, y) = 1 + x + y``.

    ``d(1,2) = 80 (1, alpha)``, ``d(1,3) = 1000 (1, alpha)``,
    ``d(2,3) = 600 (1, alpha)``.  The pair (1, 3) breaks the plain triangle
    inequality (1000 > 680) but ``eta(1, 3) = 5`` repairs it.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    dt, et = _three_point_tables(alpha)
    space = EtaConeSpace.from_tables([1, 2, 3], dt, et, ConeSpace.orthant(2, norm),
                                     name=f"three_point_cone(alpha={alpha:g})")
    return FixtureEntry("three_point_cone", space,
                        expected={"axioms_pass": True, "binding_13": (1000.0, 3400.0),
                                  "binding_12": (80.0, 6400.0), "L": 1000.0 / 680.0},
                        description="three-point plane cone example")


def three_point_cone_sin(alpha: float = 0.0, norm: str = "max") -> FixtureEntry:
    """Same distances as :func:`three_point_cone`, ``eta = 1 + sin x + sin y``."""
    entry = three_point_cone(alpha, norm)
    space = entry.space.with_eta(sine_eta, f"three_point_cone_sin(alpha={alpha:g})")
    return FixtureEntry("three_point_cone_sin", space, expected={"axioms_pass": True},
                        description="three-point example with a sine scale")


# (label, coefficients c0..c3 of c0 + c1 t + c2 t^2 + c3 t^3)
_POLYNOMIALS = (
    ("0", (0, 0, 0, 0)),
    ("1", (1, 0, 0, 0)),
    ("t", (0, 1, 0, 0)),
    ("t^2", (0, 0, 1, 0)),
    ("t^3", (0, 0, 0, 1)),
    ("1-t", (1, -1, 0, 0)),
    ("2t-1", (-1, 2, 0, 0)),
    ("t^3-t", (0, -1, 0, 1)),
)


def function_space(a: float = 0.0, b: float = 1.0, nodes: int = 33) -> FixtureEntry:
    """Continuous functions on ``[a, b]`` sampled on a uniform grid.

    Points are a fixed family of polynomials of degree <= 3.  Distances are
    ``sup_t |x(t) - y(t)|^2`` and the scale is read as
    ``eta(x, y) = sup_t |x(t)| + sup_t |y(t)| + 2`` (sup over the grid; the
    free ``t`` in the pointwise formula is resolved by taking the sup).
    """
    if not a < b or nodes < 2:
        raise ValueError("need a < b and at least two grid nodes")
    grid = np.linspace(a, b, nodes)
    values = {label: np.polynomial.polynomial.polyval(grid, c) for label, c in _POLYNOMIALS}
    sup = {label: float(np.abs(v).max()) for label, v in values.items()}

    def d(x, y):
        return float(np.abs(values[x] - values[y]).max()) ** 2

    def eta(x, y):
        return sup[x] + sup[y] + 2.0

    space = EtaConeSpace(PointSet.finite(values), ConeSpace.orthant(1), d, eta,
                         name=f"function_space([{a:g}, {b:g}], nodes={nodes})")
    return FixtureEntry("function_space", space, expected={"axioms_pass": True},
                        description="sampled continuous functions with squared sup distance")


def _squared_gap(x, y):
    return (x - y) ** 2


def _shifted_sum(x, y):
    return x + y + 2.0


def half_map(sample_upper: float = 8.0) -> FixtureEntry:
    """``T x = x / 2`` on ``[0, inf)`` with ``d = (x - y)^2``, ``eta = x + y + 2``."""
    points = PointSet.interval(0.0, INF, sample_upper=sample_upper)
    space = EtaConeSpace(points, ConeSpace.orthant(1), _squared_gap, _shifted_sum, name="half_map")
    T = SelfMap(points, lambda x: x / 2, "half")
    return FixtureEntry("half_map", space, T, x0=1.0,
                        expected={"fixed_point": 0.0, "contraction": 0.25, "orbit_eta_limit": 2.0},
                        description="halving map on the half line")


def square_map() -> FixtureEntry:
    """``T x = x^2`` on ``[0, 1/4]``; the five-coefficient condition holds with
    ``alpha = 1/4`` and ``beta = gamma = delta = 0``."""
    points = PointSet.interval(0.0, 0.25)
    space = EtaConeSpace(points, ConeSpace.orthant(1), _squared_gap, _shifted_sum, name="square_map")
    T = SelfMap(points, lambda x: x * x, "square")
    return FixtureEntry("square_map", space, T,
                        coefficients={"alpha": 0.25, "beta": 0.0, "gamma": 0.0, "delta": 0.0},
                        x0=0.25, expected={"fixed_point": 0.0, "lambda": 0.25},
                        description="squaring map on [0, 1/4]")


def _reciprocal(n):
    return 0.0 if n == INF else 1.0 / n


def _is_odd(n):
    return n != INF and n % 2 == 1


def nat_infinity_distance(m, n, odd_to_infinity: str = "reciprocal") -> float:
    """Four-case distance on the naturals with a point at infinity (``1/inf = 0``).

    ``odd_to_infinity="five"`` puts odd numbers at distance 5 from infinity
    instead of ``1/n``; that variant satisfies the scaled triangle inequality
    with constant 3.
    """
    if m == n:
        return 0.0
    if INF in (m, n) and odd_to_infinity == "five" and (_is_odd(m) or _is_odd(n)):
        return 5.0
    if (m != INF and n != INF and m % 2 == 0 and n % 2 == 0) or INF in (m, n):
        return abs(_reciprocal(m) - _reciprocal(n))
    if _is_odd(m) and _is_odd(n):
        return 5.0
    return 2.0


def nat_infinity(bound: int = 64, eta: float = 3.0, odd_to_infinity: str = "reciprocal") -> FixtureEntry:
    """``{1, .., bound} u {inf}`` with the four-case distance and constant scale.

    ``x_n = 2n`` converges to ``inf`` while ``D(x_n, 1) = 2`` and
    ``D(inf, 1) = 1``: the distance is not sequentially continuous.
    """
    if bound < 2:
        raise ValueError("bound must be >= 2")
    if odd_to_infinity not in ("reciprocal", "five"):
        raise ValueError("odd_to_infinity must be 'reciprocal' or 'five'")
    points = PointSet.finite(list(range(1, bound + 1)) + [INF])
    space = EtaConeSpace(points, ConeSpace.orthant(1),
                         lambda m, n: nat_infinity_distance(m, n, odd_to_infinity),
                         lambda m, n: eta, name=f"nat_infinity(bound={bound})")
    return FixtureEntry("nat_infinity", space,
                        expected={"discontinuity_pair": (2.0, 1.0) if odd_to_infinity == "reciprocal"
                                  else (2.0, 5.0)},
                        description="naturals with infinity; discontinuous distance")


def eta_metric_3pt() -> FixtureEntry:
    """``D(1,2) = 1/5``, ``D(2,3) = 1/4``, ``D(1,3) = 1/2`` with ``eta(x, y) = x/2 + y``.

    Not a metric (1/2 > 9/20); the scale is not symmetric.
    """
    D = np.array([[0.0, 0.2, 0.5], [0.2, 0.0, 0.25], [0.5, 0.25, 0.0]])
    et = np.array([[x / 2 + y for y in (1, 2, 3)] for x in (1, 2, 3)])
    space = EtaConeSpace.from_tables([1, 2, 3], D, et, ConeSpace.orthant(1), name="eta_metric_3pt")
    return FixtureEntry("eta_metric_3pt", space,
                        expected={"axioms_pass": True, "classification": "metric-type",
                                  "L": 10.0 / 9.0, "witness": (1, 2, 3)},
                        description="three-point eta-metric that is not a metric")


_BUILDERS: Dict[str, Callable[..., FixtureEntry]] = {
    "three_point_cone": three_point_cone,
    "three_point_cone_sin": three_point_cone_sin,
    "function_space": function_space,
    "half_map": half_map,
    "square_map": square_map,
    "nat_infinity": nat_infinity,
    "eta_metric_3pt": eta_metric_3pt,
}
FIXTURE_NAMES = tuple(_BUILDERS)


class UnknownFixture(LookupError):
    pass


def fixture(name: str, **params) -> FixtureEntry:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; valid names: {', '.join(FIXTURE_NAMES)}") from None
    return builder(**params)
