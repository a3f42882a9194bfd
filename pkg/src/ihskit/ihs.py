"""Top-level least-squares solvers.

All solvers minimize ``f(x) = (1/2n) ||A x - y||^2`` over a constraint
set C (n = number of rows). Three sketched routes exist beside the
exact solve:

* classical sketch - compress both sides once and solve
  ``min (1/2nm) ||S A x - S y||^2`` (same minimizer as the usual
  ``1/2n`` scaling);
* Hessian sketch - compress only the quadratic term,
  ``min (1/2nm) ||S A x||^2 - <A^T y / n, x>``;
* iterative Hessian sketch - repeat the Hessian sketch on residual
  problems with a fresh independent operator per round,

    x_{t+1} = argmin_C (1/2m) ||S_{t+1} A (x - x_t)||^2
                       - <A^T (y - A x_t), x>,

  which contracts geometrically toward the exact solution.

For unconstrained problems the per-round contraction is certified by
the pair ``(Z1, Z2)``: the smallest restricted eigenvalue of
``S^T S / m`` on the range of A, and the deviation of the same matrix
from identity between the current error direction and that range.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .constraints import ConstraintSet, Unconstrained, ambient_dim, project
from .errors import DimensionError, MissingHintError, RankDeficiencyError
from .linalg import ensure_matrix, ensure_vector, solve_psd, thin_svd
from .sketch import SketchOperator, SketchSpec, build_sketch, leverage_scores
from .subsolver import (
    SketchedQuadratic,
    SolverControls,
    solve_constrained,
    solve_unconstrained,
)

__all__ = [
    "LsProblem", "IhsConfig", "IhsReport",
    "solve_exact", "classical_sketch_solve", "hessian_sketch_solve", "ihs_solve",
    "recommend_sketch_size", "recommend_iterations",
    "contraction_certificates_unconstrained",
]


@dataclass
class LsProblem:
    """A constrained least-squares instance, optionally with ground truth.

    ``sketch_blocks`` > 1 marks A as ``I_blocks (x) A_base`` (a stacked
    multiple-response problem); sketches then act blockwise on A_base
    rather than on the full stacked matrix.
    """

    A: np.ndarray
    y: np.ndarray
    set: ConstraintSet = field(default_factory=Unconstrained)
    truth: Optional[np.ndarray] = None
    sigma: Optional[float] = None
    sketch_blocks: int = 1

    def __post_init__(self):
        self.A = ensure_matrix(self.A, "A")
        self.y = ensure_vector(self.y, "y")
        if self.A.shape[0] != self.y.shape[0]:
            raise DimensionError(
                f"A has {self.A.shape[0]} rows but y has length {self.y.shape[0]}"
            )
        if self.truth is not None:
            self.truth = ensure_vector(self.truth, "truth")
            if self.truth.shape[0] != self.A.shape[1]:
                raise DimensionError(
                    f"truth has length {self.truth.shape[0]}, expected {self.A.shape[1]}"
                )
        want = ambient_dim(self.set)
        if want is not None and want != self.A.shape[1]:
            raise DimensionError(
                f"constraint set expects dimension {want}, A has {self.A.shape[1]} columns"
            )
        if self.sketch_blocks < 1 or self.A.shape[0] % self.sketch_blocks:
            raise DimensionError(
                f"{self.A.shape[0]} rows do not split into {self.sketch_blocks} blocks"
            )

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def seminorm(self, v) -> float:
        """Prediction seminorm ``||A v||_2 / sqrt(n)``."""
        return float(np.linalg.norm(self.A @ v)) / math.sqrt(self.n)


@dataclass
class IhsConfig:
    """Controls for the iterative solver: per-round sketch, round count,
    target contraction (bookkeeping for the recommenders) and inner
    solver settings."""

    spec: SketchSpec
    rounds: int
    rho: float = 0.5
    inner: SolverControls = field(default_factory=SolverControls)
    collect_certificates: bool = False
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if not 0.0 < self.rho <= 0.5:
            raise ValueError(f"rho must lie in (0, 1/2], got {self.rho}")


@dataclass
class IhsReport:
    """Per-round trace of one iterative solve.

    ``iterates`` and the error lists have length rounds + 1 (the leading
    entry is the feasible starting point); timings, certificates and
    convergence flags have one entry per round.
    """

    iterates: List[np.ndarray]
    errors_to_ls: Optional[List[float]]
    errors_to_truth: Optional[List[float]]
    per_round_seconds: List[float]
    certificates: Optional[List[Tuple[float, float]]]
    round_converged: List[bool]

    @property
    def x(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def all_converged(self) -> bool:
        return all(self.round_converged)


def _leverage_for(problem: LsProblem, spec: SketchSpec):
    if spec.kind != "rowsample_leverage":
        return None
    if problem.sketch_blocks != 1:
        raise DimensionError("leverage sampling is not supported for block-structured problems")
    return leverage_scores(problem.A)


def solve_exact(problem: LsProblem, ctl: Optional[SolverControls] = None) -> np.ndarray:
    """Reference solution of ``min_C (1/2n) ||A x - y||^2``.

    Unconstrained problems go through the normal equations; otherwise
    the projected-gradient subsolver runs on ``B = A / sqrt(n)``,
    ``c = A^T y / n``.
    """
    n = problem.n
    c = problem.A.T @ problem.y / n
    if isinstance(problem.set, Unconstrained):
        try:
            return solve_psd(problem.A.T @ problem.A / n, c)
        except Exception as exc:
            raise RankDeficiencyError(f"A^T A is singular: {exc}") from exc
    q = SketchedQuadratic(problem.A / math.sqrt(n), c, problem.set)
    return solve_constrained(q, x0=None, ctl=ctl).x


def _minimize(q: SketchedQuadratic, x0, ctl) -> Tuple[np.ndarray, bool]:
    if isinstance(q.set, Unconstrained):
        return solve_unconstrained(q), True
    res = solve_constrained(q, x0=x0, ctl=ctl)
    return res.x, res.converged


def classical_sketch_solve(
    problem: LsProblem,
    spec: Optional[SketchSpec] = None,
    ctl: Optional[SolverControls] = None,
    full_result: bool = False,
    operator: Optional[SketchOperator] = None,
):
    """Solve the fully sketched problem ``min_C (1/2nm) ||S(Ax - y)||^2``.

    ``operator`` overrides the random draw with a fixed realized sketch
    (e.g. the scaled identity), in which case ``spec`` may be omitted.
    """
    if operator is None and spec is None:
        raise ValueError("either a sketch spec or a realized operator is required")
    op = operator if operator is not None else build_sketch(
        spec, problem.n, leverage_p=_leverage_for(problem, spec),
        blocks=problem.sketch_blocks)
    sa = op.apply(problem.A)
    sy = op.apply_vec(problem.y)
    scale = problem.n * op.m
    q = SketchedQuadratic(sa / math.sqrt(scale), sa.T @ sy / scale, problem.set)
    x, converged = _minimize(q, None, ctl)
    return (x, converged) if full_result else x


def hessian_sketch_solve(
    problem: LsProblem,
    spec: Optional[SketchSpec] = None,
    ctl: Optional[SolverControls] = None,
    full_result: bool = False,
    operator: Optional[SketchOperator] = None,
):
    """Solve with the quadratic term sketched and the exact linear term,
    ``min_C (1/2nm) ||S A x||^2 - <A^T y / n, x>``."""
    if operator is None and spec is None:
        raise ValueError("either a sketch spec or a realized operator is required")
    op = operator if operator is not None else build_sketch(
        spec, problem.n, leverage_p=_leverage_for(problem, spec),
        blocks=problem.sketch_blocks)
    sa = op.apply(problem.A)
    q = SketchedQuadratic(
        sa / math.sqrt(problem.n * op.m),
        problem.A.T @ problem.y / problem.n,
        problem.set,
    )
    x, converged = _minimize(q, None, ctl)
    return (x, converged) if full_result else x


def _round_certificates(op: SketchOperator, u_basis: np.ndarray, direction: np.ndarray):
    """(Z1, Z2) of one operator for the unconstrained cone.

    ``u_basis`` is an orthonormal basis of range(A); ``direction`` the
    un-normalized reference direction A(x_ref - x_t) in response space.
    """
    su = op.apply(u_basis)
    w = su.T @ su / op.m
    z1 = float(np.linalg.eigvalsh(w)[0])
    nv = float(np.linalg.norm(direction))
    if nv <= 0.0:
        return z1, 0.0
    u = direction / nv
    z2 = float(np.linalg.norm(op.apply_vec(u) @ su / op.m - u @ u_basis))
    return z1, z2


def contraction_certificates_unconstrained(
    a, op: SketchOperator, x_ls, x_start=None
) -> Tuple[float, float]:
    """Certificate pair (Z1, Z2) of a sketch for an unconstrained problem.

    Z1 is the smallest eigenvalue of ``U^T (S^T S / m) U`` with U an
    orthonormal basis of range(A); Z2 measures ``S^T S / m - I``
    between U and the unit vector along ``A (x_ls - x_start)``
    (``x_start`` defaults to zero, matching a first round started at
    the origin). A zero direction yields Z2 = 0.
    """
    am = ensure_matrix(a, "A")
    xv = ensure_vector(x_ls, "x_ls")
    u, s, _ = thin_svd(am)
    if s.size == 0 or s[0] <= 0 or np.sum(s > 1e-10 * s[0]) < am.shape[1]:
        raise RankDeficiencyError("certificates require A with full column rank")
    start = np.zeros_like(xv) if x_start is None else ensure_vector(x_start, "x_start")
    return _round_certificates(op, u, am @ (xv - start))


def ihs_solve(
    problem: LsProblem,
    config: IhsConfig,
    reference: Optional[np.ndarray] = None,
    operator_factory=None,
) -> IhsReport:
    """Run the iterative Hessian sketch and return the full trace.

    Each round draws an independent sketch from the config's seed
    (stream id = round index) and solves the sketched residual problem
    warm-started at the current iterate. When ``reference`` (usually
    the exact solution) is supplied, per-round errors to it are
    recorded, and certificates as well if requested and the problem is
    unconstrained. ``operator_factory(t)`` overrides the draw of round
    t (1-based) with a fixed realized sketch.
    """
    a, y, cset = problem.A, problem.y, problem.set
    n = problem.n
    ref = None if reference is None else ensure_vector(reference, "reference")
    x = np.zeros(problem.d) if config.x0 is None else ensure_vector(config.x0, "x0")
    x = project(cset, x)

    want_certs = (
        config.collect_certificates and ref is not None and isinstance(cset, Unconstrained)
    )
    u_basis = None
    if want_certs:
        u_basis, sv, _ = thin_svd(a)
        if sv.size == 0 or np.sum(sv > 1e-10 * sv[0]) < problem.d:
            raise RankDeficiencyError("certificates require A with full column rank")

    lev = _leverage_for(problem, config.spec)
    iterates = [x.copy()]
    errs_ls = None if ref is None else [problem.seminorm(x - ref)]
    errs_truth = None if problem.truth is None else [problem.seminorm(x - problem.truth)]
    seconds: List[float] = []
    certs: Optional[List[Tuple[float, float]]] = [] if want_certs else None
    flags: List[bool] = []

    for t in range(1, config.rounds + 1):
        tic = time.perf_counter()
        if operator_factory is not None:
            op = operator_factory(t)
        else:
            op = build_sketch(config.spec.for_round(t), n, leverage_p=lev,
                              blocks=problem.sketch_blocks)
        if want_certs:
            certs.append(_round_certificates(op, u_basis, a @ (ref - x)))
        sa = op.apply(a)
        b = sa / math.sqrt(n * op.m)
        gram = b.T @ b
        c = gram @ x + a.T @ (y - a @ x) / n
        if isinstance(cset, Unconstrained):
            x = solve_psd(gram, c)
            converged = True
        else:
            res = solve_constrained(SketchedQuadratic(b, c, cset), x0=x, ctl=config.inner)
            x, converged = res.x, res.converged
        seconds.append(time.perf_counter() - tic)
        flags.append(converged)
        iterates.append(x.copy())
        if errs_ls is not None:
            errs_ls.append(problem.seminorm(x - ref))
        if errs_truth is not None:
            errs_truth.append(problem.seminorm(x - problem.truth))

    return IhsReport(iterates, errs_ls, errs_truth, seconds, certs, flags)


_WIDTH_FAMILIES = ("unconstrained", "sparse", "lowrank")
_FAMILY_ALIASES = {"l1": "sparse", "nuclear": "lowrank", "gaussian": "unconstrained"}


def recommend_sketch_size(
    family: str,
    d: Optional[int] = None,
    s: Optional[int] = None,
    d1: Optional[int] = None,
    d2: Optional[int] = None,
    r: Optional[int] = None,
    rho: float = 0.5,
    c0: float = 1.5,
) -> int:
    """Per-round sketch size ``m = ceil((c0 / rho^2) W^2)``.

    The squared width W^2 of the relevant cone is ``d`` for
    unconstrained problems, ``s log(e d / s)`` for l1 balls with
    sparsity hint s, and ``r (d1 + d2)`` for nuclear balls with rank
    hint r.
    """
    fam = _FAMILY_ALIASES.get(family, family)
    if fam not in _WIDTH_FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {_WIDTH_FAMILIES}")
    if not 0.0 < rho <= 0.5:
        raise ValueError(f"rho must lie in (0, 1/2], got {rho}")
    if fam == "unconstrained":
        if d is None:
            raise MissingHintError("unconstrained width needs the dimension d")
        width_sq = float(d)
    elif fam == "sparse":
        if d is None or s is None:
            raise MissingHintError("sparse width needs the dimension d and a sparsity hint s")
        if not 1 <= s <= d:
            raise ValueError(f"sparsity hint must satisfy 1 <= s <= d, got s={s}, d={d}")
        width_sq = s * math.log(math.e * d / s)
    else:
        if d1 is None or d2 is None or r is None:
            raise MissingHintError("low-rank width needs d1, d2 and a rank hint r")
        if not 1 <= r <= min(d1, d2):
            raise ValueError(f"rank hint must satisfy 1 <= r <= min(d1, d2), got {r}")
        width_sq = r * (d1 + d2)
    return int(math.ceil((c0 / rho ** 2) * width_sq))


def recommend_iterations(n: int, semi_norm_ls: float, sigma: float, rho: float) -> int:
    """Round count ``N = 1 + ceil(log(sqrt(n) r / sigma) / log(1/rho))``.

    ``r`` is the prediction seminorm of the exact solution. Clamps at 1
    when the log argument does not exceed one.
    """
    if n < 1 or semi_norm_ls <= 0 or sigma <= 0:
        raise ValueError("n, semi_norm_ls and sigma must be positive")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    arg = math.sqrt(n) * semi_norm_ls / sigma
    if arg <= 1.0:
        return 1
    return max(1, 1 + math.ceil(math.log(arg) / math.log(1.0 / rho)))
