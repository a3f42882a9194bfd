"""Inner solver for sketched quadratics over a constraint set.

The objective is ``g(x) = 0.5 ||B x||^2 - <c, x>``. Unconstrained
problems are solved directly through the normal equations; constrained
problems by projected gradient, by default with Nesterov momentum that
restarts whenever the objective fails to decrease, which keeps the
accepted iterates monotone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constraints import ConstraintSet, Unconstrained, project
from .errors import DimensionError, RankDeficiencyError, SingularMatrixError
from .linalg import ensure_matrix, ensure_vector, estimate_opnorm_sq, solve_psd


@dataclass
class SketchedQuadratic:
    """Data of ``g(x) = 0.5 ||B x||^2 - <c, x>`` minimized over ``set``."""

    B: np.ndarray
    c: np.ndarray
    set: ConstraintSet = field(default_factory=Unconstrained)

    def __post_init__(self):
        self.B = ensure_matrix(self.B, "B")
        self.c = ensure_vector(self.c, "c")
        if self.B.shape[1] != self.c.shape[0]:
            raise DimensionError(
                f"B has {self.B.shape[1]} columns but c has length {self.c.shape[0]}"
            )

    def gram(self) -> np.ndarray:
        return self.B.T @ self.B

    def value(self, x: np.ndarray) -> float:
        bx = self.B @ x
        return 0.5 * float(bx @ bx) - float(self.c @ x)


@dataclass
class SolverControls:
    """Termination controls for the projected-gradient solver.

    ``tol`` bounds the gradient-mapping norm; ``None`` selects the
    default ``1e-10 * max(1, ||c||_2)``, tight enough that outer
    contraction arguments treating inner solves as exact stay valid.
    """

    tol: Optional[float] = None
    max_iter: int = 5000
    acceleration: bool = True

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")

    def resolve_tol(self, c: np.ndarray) -> float:
        if self.tol is not None:
            return self.tol
        return 1e-10 * max(1.0, float(np.linalg.norm(c)))


@dataclass
class SubsolveResult:
    x: np.ndarray
    converged: bool
    iterations: int
    grad_map_norm: float


def solve_unconstrained(q: SketchedQuadratic) -> np.ndarray:
    """Exact minimizer ``(B^T B)^{-1} c`` of the unconstrained quadratic."""
    try:
        return solve_psd(q.gram(), q.c)
    except SingularMatrixError as exc:
        raise RankDeficiencyError(
            "sketched Gram matrix B^T B is singular; increase the sketch size m "
            f"(pivot {exc.pivot})"
        ) from exc


def solve_constrained(
    q: SketchedQuadratic,
    x0: Optional[np.ndarray] = None,
    ctl: Optional[SolverControls] = None,
) -> SubsolveResult:
    """Projected-gradient minimization of ``q`` over its constraint set.

    Starts from the projection of ``x0`` (zero if omitted), keeps every
    iterate feasible, and stops once the gradient mapping
    ``L ||x - P_C(x - grad g(x)/L)||`` drops below the tolerance.
    """
    ctl = ctl or SolverControls()
    gram = q.gram()
    tol = ctl.resolve_tol(q.c)
    lip = estimate_opnorm_sq(q.B)
    if lip <= 0.0:
        lip = 1.0

    def value(v):
        return 0.5 * float(v @ (gram @ v)) - float(q.c @ v)

    x = project(q.set, np.zeros(q.c.shape[0]) if x0 is None else ensure_vector(x0, "x0"))
    z = x.copy()
    tk = 1.0
    fx = value(x)
    grad_map = np.inf
    iterations = 0
    for iterations in range(1, ctl.max_iter + 1):
        if ctl.acceleration:
            x_new = project(q.set, z - (gram @ z - q.c) / lip)
            f_new = value(x_new)
            if f_new > fx:
                # momentum overshot: restart from the last accepted iterate
                z = x.copy()
                tk = 1.0
                x_new = project(q.set, z - (gram @ z - q.c) / lip)
                f_new = value(x_new)
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
            z = x_new + ((tk - 1.0) / t_next) * (x_new - x)
            tk = t_next
            step = project(q.set, x_new - (gram @ x_new - q.c) / lip)
            grad_map = lip * float(np.linalg.norm(x_new - step))
        else:
            x_new = project(q.set, x - (gram @ x - q.c) / lip)
            f_new = value(x_new)
            grad_map = lip * float(np.linalg.norm(x - x_new))
        x, fx = x_new, f_new
        if grad_map <= tol:
            return SubsolveResult(x, True, iterations, grad_map)
    return SubsolveResult(x, False, iterations, grad_map)
