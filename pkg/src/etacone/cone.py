"""Finite-dimensional ordered vector spaces.

A :class:`ConeSpace` is ``R^m`` equipped with a closed pointed cone ``P``, the
partial order ``x <= y  iff  y - x in P`` and one of three norms.  The cone is
either the nonnegative orthant or the conic hull of a finite list of
generating rays.  Membership in a ray-generated cone is decided by a small
nonnegative least-residual problem (``nnls`` for the Euclidean norm, a linear
program for the max and sum norms).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog, nnls

from .errors import ContractViolation

DEFAULT_TOL = 1e-9
NORMS = ("max", "sum", "euclidean")

# residuals returned by the LP/NNLS solvers are never exactly zero
_SOLVER_FLOOR = 1e-12
_MAX_VERTEX_DIM = 16


@dataclass(frozen=True, eq=False)
class ConeSpace:
    """Ordered coordinate space ``(R^m, P, ||.||)``.

    ``rays=None`` selects the nonnegative orthant.  When ``normal_constant`` is
    omitted it is filled in by :func:`normal_constant_estimate`; the
    ``normal_constant_exact`` flag records whether the value is exact or a
    sampled lower bound.
    """

    dimension: int
    rays: Optional[np.ndarray] = None
    norm: str = "max"
    normal_constant: Optional[float] = None
    normal_constant_exact: bool = field(default=True)

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ContractViolation(f"dimension must be a positive integer, got {self.dimension!r}")
        object.__setattr__(self, "dimension", int(self.dimension))
        if self.norm not in NORMS:
            raise ContractViolation(f"unknown norm {self.norm!r}; choose one of {NORMS}")
        if self.rays is not None:
            rays = np.atleast_2d(np.asarray(self.rays, dtype=float))
            if rays.shape[1] != self.dimension:
                raise ContractViolation(
                    f"generators have {rays.shape[1]} coordinates, expected {self.dimension}"
                )
            if not np.all(np.isfinite(rays)):
                raise ContractViolation("generators must be finite")
            rays = rays[np.abs(rays).max(axis=1) > 0]
            if len(rays) == 0:
                raise ContractViolation("cone must contain a nonzero vector")
            rays.setflags(write=False)
            object.__setattr__(self, "rays", rays)
            # pointedness: P and -P share only theta
            for g in rays:
                if _distance_to_cone(self, -g) <= DEFAULT_TOL * max(1.0, _norm(self.norm, g)):
                    raise ContractViolation(f"cone is not pointed: -{g.tolist()} lies in the cone")

        if self.normal_constant is None:
            if self.is_orthant:
                object.__setattr__(self, "normal_constant", 1.0)
                object.__setattr__(self, "normal_constant_exact", True)
            else:
                object.__setattr__(self, "normal_constant", normal_constant_estimate(self, 512, 0))
                object.__setattr__(self, "normal_constant_exact", False)
        elif not np.isfinite(self.normal_constant) or self.normal_constant < 1:
            raise ContractViolation(f"normal constant must be >= 1, got {self.normal_constant!r}")

    @classmethod
    def orthant(cls, dimension: int = 1, norm: str = "max") -> "ConeSpace":
        return cls(dimension, None, norm)

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence[float]], norm: str = "max",
                  normal_constant: Optional[float] = None) -> "ConeSpace":
        rays = np.atleast_2d(np.asarray(rays, dtype=float))
        exact = normal_constant is not None
        return cls(rays.shape[1], rays, norm, normal_constant, exact)

    @property
    def is_orthant(self) -> bool:
        return self.rays is None

    @property
    def generators(self) -> np.ndarray:
        if self.rays is None:
            return np.eye(self.dimension)
        return self.rays

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def __repr__(self):
        kind = "orthant" if self.is_orthant else f"rays={self.rays.tolist()}"
        return f"ConeSpace(dim={self.dimension}, {kind}, norm={self.norm!r}, K={self.normal_constant:g})"


def as_vector(space: ConeSpace, v) -> np.ndarray:
    """Coerce *v* to a finite float vector of the space's dimension."""
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1 or arr.shape[0] != space.dimension:
        raise ContractViolation(
            f"dimension mismatch: got shape {arr.shape}, expected ({space.dimension},)"
        )
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"vector has non-finite coordinates: {arr.tolist()}")
    return arr


def _norm(kind: str, v: np.ndarray) -> float:
    if kind == "max":
        return float(np.max(np.abs(v)))
    if kind == "sum":
        return float(np.sum(np.abs(v)))
    return float(np.linalg.norm(v))


def norm_of(space: ConeSpace, v) -> float:
    return _norm(space.norm, as_vector(space, v))


def _distance_to_cone(space: ConeSpace, v: np.ndarray) -> float:
    """Distance (in the space norm) from *v* to the ray-generated cone."""
    G = space.rays.T  # columns are generators
    m, r = G.shape
    if space.norm == "euclidean":
        _, residual = nnls(G, v)
        return float(residual)
    if space.norm == "max":
        # variables: lambda (r), t ; minimise t with |G lambda - v| <= t
        c = np.r_[np.zeros(r), 1.0]
        ones = np.ones((m, 1))
        A = np.block([[G, -ones], [-G, -ones]])
        b = np.r_[v, -v]
    else:
        # variables: lambda (r), s (m) ; minimise sum(s) with |G lambda - v| <= s
        c = np.r_[np.zeros(r), np.ones(m)]
        eye = np.eye(m)
        A = np.block([[G, -eye], [-G, -eye]])
        b = np.r_[v, -v]
    res = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if res.status != 0:  # pragma: no cover - the problem is always feasible and bounded
        raise RuntimeError(f"cone membership LP failed: {res.message}")
    return float(res.fun)


def cone_contains(space: ConeSpace, v, tol: float = DEFAULT_TOL) -> bool:
    """True iff *v* lies within *tol* of the cone.

    For the orthant this is ``min(v) >= -tol``.  For a generated cone the
    distance to the cone is computed in the space norm; solver round-off of up
    to ``1e-12 * max(1, ||v||)`` is absorbed.
    """
    if tol < 0:
        raise ContractViolation(f"tol must be nonnegative, got {tol}")
    v = as_vector(space, v)
    if space.is_orthant:
        return bool(np.min(v) >= -tol)
    dist = _distance_to_cone(space, v)
    return dist <= tol + _SOLVER_FLOOR * max(1.0, _norm(space.norm, v))


def cone_slack(space: ConeSpace, v) -> float:
    """Signed membership margin of *v*.

    Orthant: the smallest coordinate (negative when outside).  Generated cone:
    minus the distance to the cone, so members score 0.
    """
    v = as_vector(space, v)
    if space.is_orthant:
        return float(np.min(v))
    dist = _distance_to_cone(space, v)
    if dist <= _SOLVER_FLOOR * max(1.0, _norm(space.norm, v)):
        return 0.0
    return -dist


def leq(space: ConeSpace, x, y, tol: float = DEFAULT_TOL) -> bool:
    """Partial order ``x <= y``, i.e. ``y - x`` in the cone."""
    return cone_contains(space, as_vector(space, y) - as_vector(space, x), tol)


def strictly_interior(space: ConeSpace, v, margin: float) -> bool:
    """True iff the closed ball of radius *margin* around *v* lies in the cone.

    On the orthant this reduces to ``min(v) >= margin`` for all three norms.
    For generated cones the ball is tested through its extreme points: the
    ``2m`` axis offsets for the sum norm (exact), the ``2^m`` cube corners
    for the max norm (exact) and for the Euclidean norm (sufficient).
    """
    if not margin > 0:
        raise ContractViolation(f"margin must be positive, got {margin}")
    v = as_vector(space, v)
    if space.is_orthant:
        return bool(np.min(v) >= margin)
    m = space.dimension
    if space.norm == "sum":
        offsets = np.vstack([np.eye(m), -np.eye(m)])
    else:
        if m > _MAX_VERTEX_DIM:
            raise ContractViolation(f"interior test limited to dimension <= {_MAX_VERTEX_DIM}")
        offsets = np.array(list(itertools.product((-1.0, 1.0), repeat=m)))
    return all(cone_contains(space, v + margin * o, 0.0) for o in offsets)


def normal_constant_estimate(space: ConeSpace, sample_count: int = 512, seed: int = 0) -> float:
    """Least K with ``0 <= x <= y  =>  ||x|| <= K ||y||``.

    Exact (1.0) for the orthant under the max and sum norms.  Otherwise a
    sampled lower bound: pairs ``x = G mu``, ``y = G lam`` with
    ``0 <= mu <= lam`` coordinatewise, so that ``0 <= x <= y`` by construction,
    plus the generator pairs ``(g_i, g_i + g_j)``.
    """
    if sample_count < 1:
        raise ContractViolation("sample_count must be >= 1")
    if space.is_orthant and space.norm in ("max", "sum"):
        return 1.0
    G = space.generators
    r = len(G)
    best = 1.0
    for i in range(r):
        for j in range(r):
            y = G[i] + G[j]
            ny = _norm(space.norm, y)
            if ny > 0:
                best = max(best, _norm(space.norm, G[i]) / ny)
    rng = np.random.default_rng(seed)
    lam = rng.exponential(size=(sample_count, r)) * (rng.random((sample_count, r)) < 0.7)
    mu = lam * rng.random((sample_count, r))
    for a, b in zip(mu @ G, lam @ G):
        nb = _norm(space.norm, b)
        if nb > 0:
            best = max(best, _norm(space.norm, a) / nb)
    return float(best)
