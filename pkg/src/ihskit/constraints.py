"""Constraint sets and exact Euclidean projections.

Matrix variables (nuclear-norm balls) are flattened column-major, so
the vector solvers apply unchanged. The l1-ball and simplex projections
are the exact O(n log n) sort-and-threshold algorithms; ties are broken
by index order, which does not affect the (unique) projection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionError
from .linalg import ensure_vector, thin_svd


@dataclass(frozen=True)
class Unconstrained:
    pass


@dataclass(frozen=True)
class L1Ball:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"l1-ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class NuclearBall:
    radius: float
    d1: int
    d2: int

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"nuclear-ball radius must be positive, got {self.radius}")
        if self.d1 < 1 or self.d2 < 1:
            raise ValueError(f"matrix dimensions must be positive, got {self.d1}x{self.d2}")


@dataclass(frozen=True)
class Simplex:
    pass


class Box:
    """Coordinatewise interval constraints ``lo <= x <= hi``.

    Bounds may be scalars (applied to every coordinate) or vectors.
    """

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
        if self.lo.shape != self.hi.shape:
            raise DimensionError("box bounds must have matching shapes")
        if np.any(self.lo > self.hi):
            raise ValueError("box requires lo <= hi coordinatewise")

    def __eq__(self, other):
        return (isinstance(other, Box) and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))

    def __repr__(self):
        return f"Box(lo={self.lo!r}, hi={self.hi!r})"

    def bounds_for(self, dim: int):
        if self.lo.size == dim:
            return self.lo, self.hi
        if self.lo.size == 1:
            return np.full(dim, self.lo.item()), np.full(dim, self.hi.item())
        raise DimensionError(f"box bounds have size {self.lo.size}, vector has {dim}")


ConstraintSet = Union[Unconstrained, L1Ball, NuclearBall, Simplex, Box]


def _project_l1(x: np.ndarray, radius: float) -> np.ndarray:
    if np.abs(x).sum() <= radius:
        return x.copy()
    u = np.sort(np.abs(x))[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, x.size + 1)
    rho = np.nonzero(u > (css - radius) / ks)[0][-1]
    theta = (css[rho] - radius) / (rho + 1.0)
    return np.sign(x) * np.maximum(np.abs(x) - theta, 0.0)


def _project_simplex(x: np.ndarray) -> np.ndarray:
    u = np.sort(x)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, x.size + 1)
    rho = np.nonzero(u - (css - 1.0) / ks > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(x - theta, 0.0)


def _check_nuclear_dim(cset: NuclearBall, size: int):
    if size != cset.d1 * cset.d2:
        raise DimensionError(
            f"vector of length {size} does not flatten to a {cset.d1}x{cset.d2} matrix"
        )


def project(cset: ConstraintSet, x) -> np.ndarray:
    """Euclidean projection ``argmin_{z in C} ||z - x||_2``."""
    xv = ensure_vector(x, "x")
    if isinstance(cset, Unconstrained):
        return xv.copy()
    if isinstance(cset, L1Ball):
        return _project_l1(xv, cset.radius)
    if isinstance(cset, Simplex):
        return _project_simplex(xv)
    if isinstance(cset, Box):
        lo, hi = cset.bounds_for(xv.size)
        return np.clip(xv, lo, hi)
    if isinstance(cset, NuclearBall):
        _check_nuclear_dim(cset, xv.size)
        xm = xv.reshape((cset.d1, cset.d2), order="F")
        u, s, vt = thin_svd(xm)
        s_proj = _project_l1(s, cset.radius)
        return ((u * s_proj) @ vt).ravel(order="F")
    raise TypeError(f"unknown constraint set {cset!r}")


def contains(cset: ConstraintSet, x, tol: float = 0.0) -> bool:
    """Whether ``x`` satisfies the constraint up to additive slack ``tol``."""
    xv = ensure_vector(x, "x")
    if isinstance(cset, Unconstrained):
        return True
    if isinstance(cset, L1Ball):
        return float(np.abs(xv).sum()) <= cset.radius + tol
    if isinstance(cset, Simplex):
        return bool(np.all(xv >= -tol) and abs(xv.sum() - 1.0) <= tol)
    if isinstance(cset, Box):
        lo, hi = cset.bounds_for(xv.size)
        return bool(np.all(xv >= lo - tol) and np.all(xv <= hi + tol))
    if isinstance(cset, NuclearBall):
        _check_nuclear_dim(cset, xv.size)
        s = thin_svd(xv.reshape((cset.d1, cset.d2), order="F")).singular_values
        return float(s.sum()) <= cset.radius + tol
    raise TypeError(f"unknown constraint set {cset!r}")


def ambient_dim(cset: ConstraintSet):
    """Dimension the set pins down, or None when any dimension fits."""
    if isinstance(cset, NuclearBall):
        return cset.d1 * cset.d2
    if isinstance(cset, Box) and cset.lo.size > 1:
        return cset.lo.size
    return None


def constraint_from_json(text: str) -> ConstraintSet:
    """Parse the serialized descriptor used by the CLI.

    Format: ``{"type": "...", ...}`` with types ``unconstrained``,
    ``l1`` (radius), ``nuclear`` (radius, d1, d2), ``simplex`` and
    ``box`` (lo, hi as scalars or lists).
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"constraint descriptor is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("constraint descriptor must be an object with a 'type' key")
    kind = str(obj["type"]).lower()
    if kind == "unconstrained":
        return Unconstrained()
    if kind in ("l1", "l1ball", "l1_ball"):
        return L1Ball(float(obj["radius"]))
    if kind in ("nuclear", "nuclearball", "nuclear_ball"):
        return NuclearBall(float(obj["radius"]), int(obj["d1"]), int(obj["d2"]))
    if kind == "simplex":
        return Simplex()
    if kind == "box":
        return Box(obj.get("lo", -1.0), obj.get("hi", 1.0))
    raise ValueError(f"unknown constraint type {obj['type']!r}")


def constraint_to_json(cset: ConstraintSet) -> str:
    """Inverse of :func:`constraint_from_json`."""
    if isinstance(cset, Unconstrained):
        obj = {"type": "unconstrained"}
    elif isinstance(cset, L1Ball):
        obj = {"type": "l1", "radius": cset.radius}
    elif isinstance(cset, NuclearBall):
        obj = {"type": "nuclear", "radius": cset.radius, "d1": cset.d1, "d2": cset.d2}
    elif isinstance(cset, Simplex):
        obj = {"type": "simplex"}
    elif isinstance(cset, Box):
        lo = cset.lo.item() if cset.lo.size == 1 else cset.lo.tolist()
        hi = cset.hi.item() if cset.hi.size == 1 else cset.hi.tolist()
        obj = {"type": "box", "lo": lo, "hi": hi}
    else:
        raise TypeError(f"unknown constraint set {cset!r}")
    return json.dumps(obj)
