"""Problem generators, error metrics and figure-style experiment runners.

Each runner regenerates one of the benchmark experiments at desk scale
and emits rows with the fixed CSV schema

    experiment,trial,n,d,method,iter,err_ls_semi,err_truth_semi,err_truth_l2,seconds,flag

Floats are written with 17 significant digits (round-trip exact); empty
fields mean "not applicable". Every row is reproducible from
``(experiment id, overrides, seed)`` apart from the wall-clock seconds
column. Trials may run on a thread pool; rows are always emitted in
deterministic (grid, trial) order.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from .constraints import L1Ball, NuclearBall
from .errors import IhskitError
from .ihs import IhsConfig, LsProblem, ihs_solve, solve_exact
from .ihs import classical_sketch_solve
from .linalg import ensure_matrix, ensure_vector
from .seeding import derive_rng
from .sketch import SketchSpec

CSV_HEADER = (
    "experiment", "trial", "n", "d", "method", "iter",
    "err_ls_semi", "err_truth_semi", "err_truth_l2", "seconds", "flag",
)

EXPERIMENT_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6a")
_FIG_STREAM = {name: i + 1 for i, name in enumerate(EXPERIMENT_IDS)}


@dataclass
class ExperimentRow:
    experiment: str
    trial: int
    n: int
    d: int
    method: str
    iteration: int
    err_ls_semi: Optional[float]
    err_truth_semi: Optional[float]
    err_truth_l2: Optional[float]
    seconds: float
    flag: str = ""


@dataclass(frozen=True)
class EnsembleSpec:
    """Declarative description of a random problem family.

    ``family`` selects the generator: ``unconstrained`` (needs n, d),
    ``sparse`` (n, d, s) or ``lowrank`` (n, d1, d2, r). ``trials``
    problems are reachable through :meth:`generate`, all derived from
    the master ``seed``.
    """

    family: str
    n: int
    seed: int
    d: Optional[int] = None
    d1: Optional[int] = None
    d2: Optional[int] = None
    s: Optional[int] = None
    r: Optional[int] = None
    sigma: float = 1.0
    trials: int = 1

    def __post_init__(self):
        if self.family not in ("unconstrained", "sparse", "lowrank"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.family in ("unconstrained", "sparse") and self.d is None:
            raise ValueError(f"{self.family} ensemble needs d")
        if self.family == "sparse" and (self.s is None or not 1 <= self.s <= self.d):
            raise ValueError("sparse ensemble needs 1 <= s <= d")
        if self.family == "lowrank":
            if self.d1 is None or self.d2 is None or self.r is None:
                raise ValueError("lowrank ensemble needs d1, d2 and r")
            if not 1 <= self.r <= min(self.d1, self.d2):
                raise ValueError("lowrank ensemble needs 1 <= r <= min(d1, d2)")

    def generate(self, trial: int = 0) -> "LsProblem":
        """Problem instance for one trial index (deterministic)."""
        if not 0 <= trial < self.trials:
            raise ValueError(f"trial must lie in [0, {self.trials}), got {trial}")
        stream = (self.seed, trial)
        if self.family == "unconstrained":
            return gen_unconstrained(self.n, self.d, self.sigma, stream)
        if self.family == "sparse":
            return gen_sparse(self.n, self.d, self.s, self.sigma, stream)
        return gen_lowrank(self.n, self.d1, self.d2, self.r, self.sigma, stream)


def prediction_seminorm(a, x, xref) -> float:
    """``||A (x - xref)||_2 / sqrt(n)`` with n the row count of A."""
    am = ensure_matrix(a, "A")
    xv = ensure_vector(x, "x")
    rv = ensure_vector(xref, "xref")
    if xv.shape != rv.shape or am.shape[1] != xv.shape[0]:
        raise ValueError("A, x and xref have inconsistent dimensions")
    return float(np.linalg.norm(am @ (xv - rv))) / math.sqrt(am.shape[0])


def gen_unconstrained(n: int, d: int, sigma: float, seed) -> LsProblem:
    """Random unconstrained instance: A with i.i.d. N(0,1) entries,
    truth uniform on the unit sphere, y = A x* + N(0, sigma^2) noise."""
    if not n > d >= 1:
        raise ValueError(f"need n > d >= 1, got n={n}, d={d}")
    rng = _gen_rng(seed)
    a = rng.standard_normal((n, d))
    x_star = rng.standard_normal(d)
    x_star /= np.linalg.norm(x_star)
    y = a @ x_star + sigma * rng.standard_normal(n)
    return LsProblem(a, y, truth=x_star, sigma=sigma)


def gen_sparse(n: int, d: int, s: int, sigma: float, seed) -> LsProblem:
    """Sparse instance: truth has s spikes of size +-1/sqrt(s) on a
    uniform random support, constraint set the l1 ball of radius
    ||x*||_1 = sqrt(s)."""
    if not 1 <= s <= d:
        raise ValueError(f"need 1 <= s <= d, got s={s}, d={d}")
    rng = _gen_rng(seed)
    a = rng.standard_normal((n, d))
    support = rng.choice(d, size=s, replace=False)
    x_star = np.zeros(d)
    x_star[support] = (2.0 * rng.integers(0, 2, size=s) - 1.0) / math.sqrt(s)
    y = a @ x_star + sigma * rng.standard_normal(n)
    return LsProblem(a, y, set=L1Ball(float(np.abs(x_star).sum())), truth=x_star, sigma=sigma)


def gen_lowrank(n: int, d1: int, d2: int, r: int, sigma: float, seed) -> LsProblem:
    """Low-rank multi-response instance, stacked column-major.

    The truth is a rank-r d1 x d2 matrix with unit Frobenius norm, the
    constraint set the nuclear ball of radius ||X*||_nuc, and the design
    matrix the block-diagonal stacking I_{d2} (x) A_base so that the
    vector solvers apply unchanged. ``sketch_blocks`` is set to d2:
    sketches draw one m x n base operator shared by all response
    columns.
    """
    if not 1 <= r <= min(d1, d2):
        raise ValueError(f"need 1 <= r <= min(d1, d2), got r={r}")
    rng = _gen_rng(seed)
    a_base = rng.standard_normal((n, d1))
    x_mat = rng.standard_normal((d1, r)) @ rng.standard_normal((r, d2))
    x_mat /= np.linalg.norm(x_mat)
    radius = float(np.linalg.svd(x_mat, compute_uv=False).sum())
    w = sigma * rng.standard_normal((n, d2))
    y_mat = a_base @ x_mat + w
    a = np.kron(np.eye(d2), a_base)
    return LsProblem(
        a,
        y_mat.ravel(order="F"),
        set=NuclearBall(radius, d1, d2),
        truth=x_mat.ravel(order="F"),
        sigma=sigma,
        sketch_blocks=d2,
    )


def _gen_rng(seed) -> np.random.Generator:
    if isinstance(seed, (int, np.integer)):
        return derive_rng(int(seed))
    seq = tuple(int(v) for v in seed)
    return derive_rng(seq[0], *seq[1:])


def _row(exp, trial, n, d, method, iteration, problem, x, x_ls, seconds, flag=""):
    err_ls = None if x_ls is None else problem.seminorm(x - x_ls)
    err_ts = None if problem.truth is None else problem.seminorm(x - problem.truth)
    err_tl = None if problem.truth is None else float(np.linalg.norm(x - problem.truth))
    return ExperimentRow(exp, trial, n, d, method, iteration, err_ls, err_ts, err_tl,
                         seconds, flag)


def _fail_row(exp, trial, n, d, method, exc):
    return ExperimentRow(exp, trial, n, d, method, 0, None, None, None, 0.0,
                         f"failed:{type(exc).__name__}")


def _execute(tasks: Sequence[Callable[[], List[ExperimentRow]]], threads: int):
    if threads <= 1:
        chunks = [task() for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda task: task(), tasks))
    rows: List[ExperimentRow] = []
    for chunk in chunks:
        rows.extend(chunk)
    return rows


def _timed(fn):
    tic = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - tic


def _run_fig1(seed, d=10, m_factor=7, n_grid=(100, 400, 1600, 6400), trials=30,
              sigma=1.0, kind="gaussian", threads=1):
    fig = _FIG_STREAM["fig1"]
    m = m_factor * d

    def task(ni, n, t):
        try:
            prob = gen_unconstrained(n, d, sigma, (seed, fig, ni, t, 0))
            rounds = 1 + math.ceil(math.log(n))
            x_ls, sec_exact = _timed(lambda: solve_exact(prob))
            spec = SketchSpec(kind, m, seed, stream=(fig, ni, t, 1))
            report, sec_ihs = _timed(
                lambda: ihs_solve(prob, IhsConfig(spec, rounds), reference=x_ls))
            cl_spec = SketchSpec(kind, rounds * m, seed, stream=(fig, ni, t, 2))
            x_cl, sec_cl = _timed(lambda: classical_sketch_solve(prob, cl_spec))
            return [
                _row("fig1", t, n, d, "exact", 0, prob, x_ls, x_ls, sec_exact),
                _row("fig1", t, n, d, "ihs", rounds, prob, report.x, x_ls, sec_ihs,
                     "" if report.all_converged else "nonconverged"),
                _row("fig1", t, n, d, "classical", 0, prob, x_cl, x_ls, sec_cl),
            ]
        except IhskitError as exc:
            return [_fail_row("fig1", t, n, d, "all", exc)]

    tasks = [
        (lambda ni=ni, n=n, t=t: task(ni, n, t))
        for ni, n in enumerate(n_grid) for t in range(trials)
    ]
    return _execute(tasks, threads)


def _run_fig2(seed, d=200, n=6000, gammas=(4, 6, 8), rounds=6, trials=10,
              sigma=1.0, kind="gaussian", threads=1):
    fig = _FIG_STREAM["fig2"]

    def task(gi, gamma, t):
        try:
            prob = gen_unconstrained(n, d, sigma, (seed, fig, gi, t, 0))
            x_ls = solve_exact(prob)
            spec = SketchSpec(kind, gamma * d, seed, stream=(fig, gi, t, 1))
            tic = time.perf_counter()
            report = ihs_solve(prob, IhsConfig(spec, rounds), reference=x_ls)
            per_iter = (time.perf_counter() - tic) / rounds
            rows = []
            for it, x in enumerate(report.iterates):
                flag = f"gamma={gamma}"
                if it > 0 and not report.round_converged[it - 1]:
                    flag += ";nonconverged"
                rows.append(_row("fig2", t, n, d, "ihs", it, prob, x, x_ls,
                                 per_iter if it else 0.0, flag))
            return rows
        except IhskitError as exc:
            return [_fail_row("fig2", t, n, d, "ihs", exc)]

    tasks = [
        (lambda gi=gi, g=g, t=t: task(gi, g, t))
        for gi, g in enumerate(gammas) for t in range(trials)
    ]
    return _execute(tasks, threads)


def _run_fig3(seed, d_grid=(16, 32, 64), n_factor=100, gamma=6, classical_budget=24,
              rounds=None, trials=10, sigma=1.0, kind="gaussian", threads=1):
    fig = _FIG_STREAM["fig3"]

    def task(di, d, t):
        n = n_factor * d
        m = gamma * d
        nrounds = rounds if rounds else 1 + math.ceil(math.log2(math.sqrt(n / d)))
        try:
            prob = gen_unconstrained(n, d, sigma, (seed, fig, di, t, 0))
            x_ls, sec_exact = _timed(lambda: solve_exact(prob))
            spec = SketchSpec(kind, m, seed, stream=(fig, di, t, 1))
            report, sec_ihs = _timed(
                lambda: ihs_solve(prob, IhsConfig(spec, nrounds), reference=x_ls))
            cl_spec = SketchSpec(kind, classical_budget * d, seed, stream=(fig, di, t, 2))
            x_cl, sec_cl = _timed(lambda: classical_sketch_solve(prob, cl_spec))
            return [
                _row("fig3", t, n, d, "exact", 0, prob, x_ls, x_ls, sec_exact),
                _row("fig3", t, n, d, "ihs", nrounds, prob, report.x, x_ls, sec_ihs,
                     "" if report.all_converged else "nonconverged"),
                _row("fig3", t, n, d, "classical", 0, prob, x_cl, x_ls, sec_cl),
            ]
        except IhskitError as exc:
            return [_fail_row("fig3", t, n, d, "all", exc)]

    tasks = [
        (lambda di=di, d=d, t=t: task(di, d, t))
        for di, d in enumerate(d_grid) for t in range(trials)
    ]
    return _execute(tasks, threads)


def _run_fig4(seed, d=256, n=8872, s=32, gammas=(2, 5, 25), rounds=6, trials=5,
              sigma=1.0, kind="gaussian", threads=1):
    fig = _FIG_STREAM["fig4"]

    def task(gi, gamma, t):
        m = int(math.ceil(gamma * s * math.log(d)))
        try:
            prob = gen_sparse(n, d, s, sigma, (seed, fig, gi, t, 0))
            x_ls = solve_exact(prob)
            spec = SketchSpec(kind, m, seed, stream=(fig, gi, t, 1))
            tic = time.perf_counter()
            report = ihs_solve(prob, IhsConfig(spec, rounds), reference=x_ls)
            per_iter = (time.perf_counter() - tic) / rounds
            rows = []
            for it, x in enumerate(report.iterates):
                flag = f"gamma={gamma}"
                if it > 0 and not report.round_converged[it - 1]:
                    flag += ";nonconverged"
                rows.append(_row("fig4", t, n, d, "ihs", it, prob, x, x_ls,
                                 per_iter if it else 0.0, flag))
            return rows
        except IhskitError as exc:
            return [_fail_row("fig4", t, n, d, "ihs", exc)]

    tasks = [
        (lambda gi=gi, g=g, t=t: task(gi, g, t))
        for gi, g in enumerate(gammas) for t in range(trials)
    ]
    return _execute(tasks, threads)


def _run_fig5(seed, d_grid=(32, 64, 128), gamma=4, rounds=4, trials=10,
              sigma=1.0, kind="gaussian", threads=1):
    fig = _FIG_STREAM["fig5"]

    def task(di, d, t):
        s = math.ceil(2.0 * math.sqrt(d))
        width_sq = s * math.log(math.e * d / s)
        n = int(round(100.0 * width_sq))
        m = int(math.ceil(gamma * width_sq))
        try:
            prob = gen_sparse(n, d, s, sigma, (seed, fig, di, t, 0))
            x_ls, sec_exact = _timed(lambda: solve_exact(prob))
            spec = SketchSpec(kind, m, seed, stream=(fig, di, t, 1))
            report, sec_ihs = _timed(
                lambda: ihs_solve(prob, IhsConfig(spec, rounds), reference=x_ls))
            cl_spec = SketchSpec(kind, rounds * m, seed, stream=(fig, di, t, 2))
            x_cl, sec_cl = _timed(lambda: classical_sketch_solve(prob, cl_spec))
            return [
                _row("fig5", t, n, d, "exact", 0, prob, x_ls, x_ls, sec_exact),
                _row("fig5", t, n, d, "ihs", rounds, prob, report.x, x_ls, sec_ihs,
                     "" if report.all_converged else "nonconverged"),
                _row("fig5", t, n, d, "classical", 0, prob, x_cl, x_ls, sec_cl),
            ]
        except IhskitError as exc:
            return [_fail_row("fig5", t, n, d, "all", exc)]

    tasks = [
        (lambda di=di, d=d, t=t: task(di, d, t))
        for di, d in enumerate(d_grid) for t in range(trials)
    ]
    return _execute(tasks, threads)


def _run_fig6a(seed, d1=20, d2=20, r=2, m=60, n_grid=(40, 80), rounds=None, trials=5,
               sigma=0.25, kind="gaussian", threads=1):
    fig = _FIG_STREAM["fig6a"]
    d_amb = d1 * d2

    def task(ni, n, t):
        nrounds = rounds if rounds else 1 + math.ceil(math.log(n))
        try:
            prob = gen_lowrank(n, d1, d2, r, sigma, (seed, fig, ni, t, 0))
            x_ls, sec_exact = _timed(lambda: solve_exact(prob))
            spec = SketchSpec(kind, m, seed, stream=(fig, ni, t, 1))
            report, sec_ihs = _timed(
                lambda: ihs_solve(prob, IhsConfig(spec, nrounds), reference=x_ls))
            # naive sketch with the same total row budget, applied to the
            # full stacked problem (a block sketch of N*m rows would be
            # nearly exact here since N*m >> n)
            flat = replace(prob, sketch_blocks=1)
            cl_spec = SketchSpec(kind, nrounds * m, seed, stream=(fig, ni, t, 2))
            x_cl, sec_cl = _timed(lambda: classical_sketch_solve(flat, cl_spec))
            return [
                _row("fig6a", t, n, d_amb, "exact", 0, prob, x_ls, x_ls, sec_exact),
                _row("fig6a", t, n, d_amb, "ihs", nrounds, prob, report.x, x_ls, sec_ihs,
                     "" if report.all_converged else "nonconverged"),
                _row("fig6a", t, n, d_amb, "classical", 0, prob, x_cl, x_ls, sec_cl),
            ]
        except IhskitError as exc:
            return [_fail_row("fig6a", t, n, d_amb, "all", exc)]

    tasks = [
        (lambda ni=ni, n=n, t=t: task(ni, n, t))
        for ni, n in enumerate(n_grid) for t in range(trials)
    ]
    return _execute(tasks, threads)


_RUNNERS = {
    "fig1": _run_fig1,
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "fig6a": _run_fig6a,
}

# paper-scale settings reachable through the --full-scale CLI flag
FULL_SCALE_OVERRIDES = {
    "fig1": {"n_grid": tuple(100 * 2 ** k for k in range(9)), "trials": 300},
    "fig2": {"trials": 10},
    "fig3": {"d_grid": (16, 32, 64, 128, 256), "trials": 20},
    "fig4": {"trials": 20},
    "fig5": {"d_grid": (16, 32, 64, 128, 256), "trials": 20},
    "fig6a": {"n_grid": (10, 20, 40, 60, 80, 100), "trials": 20},
}


def run_experiment(exp_id: str, seed: int, out_path=None, threads: int = 1, **overrides):
    """Run one figure-style experiment; optionally write the CSV.

    Returns the row list. ``overrides`` are the runner keyword
    arguments (grids, trial counts, sketch kind, ...).
    """
    if exp_id not in _RUNNERS:
        raise ValueError(f"unknown experiment {exp_id!r}; valid ids: {', '.join(EXPERIMENT_IDS)}")
    rows = _RUNNERS[exp_id](seed, threads=threads, **overrides)
    if out_path is not None:
        write_rows(rows, out_path)
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_rows(rows: Sequence[ExperimentRow], path) -> None:
    """Write rows as CSV atomically (temp file + rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                rec = asdict(row)
                writer.writerow([_fmt(rec[k]) for k in (
                    "experiment", "trial", "n", "d", "method", "iteration",
                    "err_ls_semi", "err_truth_semi", "err_truth_l2", "seconds", "flag")])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_rows(path) -> List[ExperimentRow]:
    """Read back a CSV written by :func:`write_rows`."""
    rows: List[ExperimentRow] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(ExperimentRow(
                experiment=rec["experiment"],
                trial=int(rec["trial"]),
                n=int(rec["n"]),
                d=int(rec["d"]),
                method=rec["method"],
                iteration=int(rec["iter"]),
                err_ls_semi=float(rec["err_ls_semi"]) if rec["err_ls_semi"] else None,
                err_truth_semi=float(rec["err_truth_semi"]) if rec["err_truth_semi"] else None,
                err_truth_l2=float(rec["err_truth_l2"]) if rec["err_truth_l2"] else None,
                seconds=float(rec["seconds"]),
                flag=rec["flag"],
            ))
    return rows


def summarize(rows: Sequence[ExperimentRow]) -> str:
    """One summary line: mean final err_truth_semi per method."""
    finals = {}
    for row in rows:
        if row.err_truth_semi is None:
            continue
        finals.setdefault(row.method, {}).setdefault(row.trial, (0, None))
        it, _ = finals[row.method][row.trial]
        if row.iteration >= it:
            finals[row.method][row.trial] = (row.iteration, row.err_truth_semi)
    parts = []
    for method in sorted(finals):
        vals = [v for _, v in finals[method].values() if v is not None]
        if vals:
            parts.append(f"{method}: mean err_truth={np.mean(vals):.4g} (trials={len(vals)})")
    failed = sum(1 for row in rows if row.flag.startswith("failed"))
    if failed:
        parts.append(f"failed rows={failed}")
    return "; ".join(parts) if parts else "no rows"
