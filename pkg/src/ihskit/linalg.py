"""Dense linear-algebra kernels.

Row-major float64 arrays throughout. Provides the normalized fast
Walsh-Hadamard transform, a thin SVD wrapper, a positive-definite
solver, and a power-iteration operator-norm estimate with a fixed
safety inflation.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    DimensionError,
    NonFiniteError,
    PowerOfTwoError,
    SingularMatrixError,
    SvdConvergenceError,
)
from .seeding import derive_rng

# Multiplier applied to the power-iteration Rayleigh estimate so the
# result is a usable Lipschitz upper bound for gradient steps.
OPNORM_SAFETY = 1.05


def ensure_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a 2-D finite float64 C-order array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return m


def ensure_vector(v, name: str = "vector") -> np.ndarray:
    """Validate and return ``v`` as a 1-D finite float64 array."""
    w = np.ascontiguousarray(v, dtype=np.float64)
    if w.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got ndim={w.ndim}")
    if w.size and not np.all(np.isfinite(w)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return w


class SvdResult(NamedTuple):
    U: np.ndarray
    singular_values: np.ndarray
    Vt: np.ndarray


def fwht_normalized(x) -> np.ndarray:
    """Apply the orthonormal Walsh-Hadamard transform along axis 0.

    ``x`` may be a vector or a matrix whose columns are transformed
    independently; the length along axis 0 must be a power of two.
    The transform matrix has entries +-1/sqrt(n), so the map is an
    involution and preserves Euclidean norms.
    """
    a = np.asarray(x, dtype=np.float64)
    squeeze = a.ndim == 1
    if squeeze:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionError(f"input must be 1-D or 2-D, got ndim={a.ndim}")
    n = a.shape[0]
    if n == 0 or n & (n - 1):
        raise PowerOfTwoError(f"transform length must be a power of two, got {n}")
    out = a.copy()
    h = 1
    while h < n:
        out = out.reshape(n // (2 * h), 2, h, -1)
        top = out[:, 0] + out[:, 1]
        bot = out[:, 0] - out[:, 1]
        out[:, 0] = top
        out[:, 1] = bot
        out = out.reshape(n, -1)
        h *= 2
    out *= 1.0 / np.sqrt(n)
    return out[:, 0] if squeeze else out


def thin_svd(a) -> SvdResult:
    """Thin SVD ``A = U diag(s) Vt`` with nonincreasing singular values."""
    m = ensure_matrix(a, "A")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
        return SvdResult(u, s, vt)
    except np.linalg.LinAlgError:
        pass
    try:
        # gesdd occasionally fails where the slower gesvd succeeds
        u, s, vt = scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
        return SvdResult(u, s, vt)
    except Exception as exc:
        raise SvdConvergenceError(f"SVD failed to converge: {exc}", attempts=2) from exc


def _first_bad_pivot(g: np.ndarray) -> int:
    """Index of the first leading minor whose Cholesky pivot is non-positive."""
    for k in range(1, g.shape[0] + 1):
        try:
            np.linalg.cholesky(g[:k, :k])
        except np.linalg.LinAlgError:
            return k - 1
    return g.shape[0] - 1


def solve_psd(g, b) -> np.ndarray:
    """Solve ``G x = b`` for symmetric positive definite G via Cholesky."""
    gm = ensure_matrix(g, "G")
    bv = ensure_vector(b, "b")
    if gm.shape[0] != gm.shape[1]:
        raise DimensionError(f"G must be square, got {gm.shape}")
    if gm.shape[0] != bv.shape[0]:
        raise DimensionError(f"G is {gm.shape} but b has length {bv.shape[0]}")
    try:
        low = np.linalg.cholesky(gm)
    except np.linalg.LinAlgError as exc:
        pivot = _first_bad_pivot(gm)
        raise SingularMatrixError(
            f"matrix is not positive definite (pivot {pivot} <= tolerance)", pivot=pivot
        ) from exc
    z = scipy.linalg.solve_triangular(low, bv, lower=True)
    return scipy.linalg.solve_triangular(low.T, z, lower=False)


def estimate_opnorm_sq(b, iters: int = 100, seed: int = 0) -> float:
    """Upper estimate of ``lambda_max(B^T B)`` by power iteration.

    Runs ``iters`` rounds of power iteration on ``B^T B`` from a seeded
    random start and inflates the final Rayleigh quotient by a fixed
    5% so the result can serve as a gradient Lipschitz constant.
    Deterministic given ``seed``; returns 0 for the zero matrix.
    """
    bm = ensure_matrix(b, "B")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if bm.size == 0 or not np.any(bm):
        return 0.0
    rng = derive_rng(seed, 0x0B)
    v = rng.standard_normal(bm.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = bm.T @ (bm @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # v fell exactly in the kernel; restart from a fresh direction
            v = rng.standard_normal(bm.shape[1])
            v /= np.linalg.norm(v)
            continue
        lam = v @ w
        v = w / nw
    return OPNORM_SAFETY * float(lam)
