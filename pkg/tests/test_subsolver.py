import numpy as np
import pytest

from ihskit.constraints import Box, L1Ball, Simplex, Unconstrained, contains, project
from ihskit.errors import RankDeficiencyError
from ihskit.subsolver import (
    SketchedQuadratic,
    SolverControls,
    solve_constrained,
    solve_unconstrained,
)

rng = np.random.default_rng(888)


class TestUnconstrained:
    def test_identity(self):
        q = SketchedQuadratic(np.eye(2), [1.0, 2.0])
        assert solve_unconstrained(q) == pytest.approx([1, 2])

    def test_diagonal(self):
        q = SketchedQuadratic(np.diag([2.0, 1.0]), [4.0, 1.0])
        assert solve_unconstrained(q) == pytest.approx([1, 1])

    def test_matches_pseudo_inverse(self):
        b = rng.standard_normal((30, 5))
        c = rng.standard_normal(5)
        x = solve_unconstrained(SketchedQuadratic(b, c))
        want = np.linalg.pinv(b.T @ b) @ c
        assert np.max(np.abs(x - want)) <= 1e-8

    def test_singular_gram_rejected(self):
        b = np.ones((4, 3))  # rank one
        with pytest.raises(RankDeficiencyError, match="sketch size m"):
            solve_unconstrained(SketchedQuadratic(b, np.ones(3)))


class TestConstrained:
    def test_matches_direct_solve_when_unconstrained(self):
        b = rng.standard_normal((25, 6))
        c = rng.standard_normal(6)
        q = SketchedQuadratic(b, c, Unconstrained())
        res = solve_constrained(q, ctl=SolverControls(max_iter=20000))
        want = solve_unconstrained(q)
        assert res.converged
        assert np.max(np.abs(res.x - want)) <= 1e-6

    def test_box_clamps_separable_optimum(self):
        q = SketchedQuadratic(np.eye(2), [5.0, -0.2], Box(-1.0, 1.0))
        res = solve_constrained(q)
        assert res.x == pytest.approx([1.0, -0.2], abs=1e-9)

    def test_l1_ball_is_projection_of_linear_term(self):
        # with B = I the minimizer is the projection of c onto the ball
        q = SketchedQuadratic(np.eye(2), [3.0, 1.0], L1Ball(1.0))
        res = solve_constrained(q)
        assert res.x == pytest.approx([1.0, 0.0], abs=1e-9)

    @pytest.mark.parametrize("cset", [L1Ball(0.8), Simplex(), Box(-0.5, 0.5)],
                             ids=lambda c: type(c).__name__)
    def test_output_feasible(self, cset):
        b = rng.standard_normal((20, 5))
        c = rng.standard_normal(5)
        res = solve_constrained(SketchedQuadratic(b, c, cset))
        assert contains(cset, res.x, tol=1e-9)

    def test_monotone_descent_plain_gradient(self):
        b = rng.standard_normal((15, 4))
        c = rng.standard_normal(4)
        q = SketchedQuadratic(b, c, L1Ball(0.7))
        values = []
        for k in range(1, 40):
            ctl = SolverControls(tol=1e-300, max_iter=k, acceleration=False)
            values.append(q.value(solve_constrained(q, ctl=ctl).x))
        diffs = np.diff(values)
        assert np.all(diffs <= 1e-12)

    def test_accepted_iterates_monotone_with_acceleration(self):
        b = rng.standard_normal((15, 4))
        c = rng.standard_normal(4)
        q = SketchedQuadratic(b, c, L1Ball(0.7))
        values = []
        for k in range(1, 40):
            ctl = SolverControls(tol=1e-300, max_iter=k, acceleration=True)
            values.append(q.value(solve_constrained(q, ctl=ctl).x))
        assert np.all(np.diff(values) <= 1e-12)

    @pytest.mark.parametrize("cset", [L1Ball(0.9), Simplex(), Box(-1.0, 1.0)],
                             ids=lambda c: type(c).__name__)
    def test_variational_inequality_at_output(self, cset):
        b = rng.standard_normal((30, 6))
        c = rng.standard_normal(6)
        q = SketchedQuadratic(b, c, cset)
        ctl = SolverControls(tol=1e-9)
        res = solve_constrained(q, ctl=ctl)
        assert res.converged
        grad = b.T @ (b @ res.x) - c
        for _ in range(100):
            z = project(cset, 2.0 * rng.standard_normal(6))
            slack = ctl.tol * (1.0 + np.linalg.norm(z - res.x))
            assert grad @ (z - res.x) >= -slack

    def test_nonconvergence_flagged(self):
        b = rng.standard_normal((40, 10))
        c = 5.0 * rng.standard_normal(10)
        res = solve_constrained(
            SketchedQuadratic(b, c, L1Ball(1.0)),
            ctl=SolverControls(tol=1e-14, max_iter=2),
        )
        assert not res.converged
        assert res.grad_map_norm > 0
        assert res.iterations == 2

    def test_warm_start_infeasible_point_projected(self):
        q = SketchedQuadratic(np.eye(3), np.zeros(3), Simplex())
        res = solve_constrained(q, x0=np.zeros(3))
        assert contains(Simplex(), res.x, tol=1e-9)

    def test_default_tolerance_scales_with_c(self):
        assert SolverControls().resolve_tol(np.zeros(3)) == pytest.approx(1e-10)
        assert SolverControls().resolve_tol(200.0 * np.ones(1)) == pytest.approx(2e-8)
        assert SolverControls(tol=1e-5).resolve_tol(np.ones(3)) == 1e-5
