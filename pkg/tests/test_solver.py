import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powpath.pathwise import omega_min
from powpath.solver import (
    ProblemInstance,
    SolveConfig,
    coordinate_omega,
    coordinate_update,
    objective_value,
    ridge_closed_form,
    solve,
)
from powpath.threshold import PenaltyPoint, soft_threshold, threshold

from conftest import lasso_cd_reference


def grid_argmin_1d(f, lo=-10.0, hi=10.0, num=2_000_001):
    g = np.linspace(lo, hi, num)
    return g[np.argmin(f(g))]


class TestProblemInstance:
    def test_cached_products(self, small_problem):
        X, y = small_problem.X, small_problem.y
        np.testing.assert_allclose(small_problem.col_sq_norms, (X * X).sum(0), rtol=1e-12)
        np.testing.assert_allclose(small_problem.col_y_products, X.T @ y, rtol=1e-12)

    def test_zero_column_rejected(self):
        X = np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
        with pytest.raises(ValueError, match="zero columns"):
            ProblemInstance(np.ones(3), X)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            ProblemInstance(np.ones(4), np.ones((3, 2)))

    def test_immutable(self, small_problem):
        with pytest.raises(ValueError):
            small_problem.X[0, 0] = 1.0


class TestObjective:
    def test_zero_beta(self, small_problem):
        v = objective_value(small_problem, np.zeros(6), PenaltyPoint(1.0, 0.5))
        assert v == pytest.approx(0.5 * small_problem.y @ small_problem.y, rel=1e-15)

    def test_ridge_penalty_is_half_norm(self, small_problem):
        beta = np.arange(6.0) / 3
        r = small_problem.y - small_problem.X @ beta
        for omega in (0.1, 3.0):
            v = objective_value(small_problem, beta, PenaltyPoint(omega, 2.0))
            assert v == pytest.approx(0.5 * r @ r + 0.5 * beta @ beta, rel=1e-14)

    def test_scalar_case(self):
        prob = ProblemInstance(np.array([2.0]), np.array([[1.0]]))
        assert objective_value(prob, np.array([1.0]), PenaltyPoint(1.0, 1.0)) == 1.5

    def test_dimension_mismatch(self, small_problem):
        with pytest.raises(ValueError):
            objective_value(small_problem, np.zeros(3), PenaltyPoint(1.0, 1.0))


class TestCoordinateUpdate:
    def test_unit_column(self):
        X = np.array([[0.6], [0.8]])
        y = np.array([2.0, 1.0])
        prob = ProblemInstance(y, X)
        beta, r = np.zeros(1), y.copy()
        pt = PenaltyPoint(0.7, 0.5)
        new, _ = coordinate_update(prob, beta, r, 0, pt)
        assert new == threshold(pt, float(X[:, 0] @ y))

    def test_lasso_scaling(self):
        # q=1 with x'x = c reproduces sign(b)(|b| - omega/c)+
        X = np.array([[1.0], [2.0], [-1.0]])
        y = np.array([3.0, 1.0, 0.5])
        prob = ProblemInstance(y, X)
        c = 6.0
        b = (X[:, 0] @ y) / c
        new, _ = coordinate_update(prob, np.zeros(1), y.copy(), 0, PenaltyPoint(2.0, 1.0))
        assert new == pytest.approx(soft_threshold(b, 2.0 / c), abs=1e-15)
        f = lambda t: 0.5 * ((y[:, None] - X[:, [0]] * t) ** 2).sum(0) + 2.0 * np.abs(t)
        assert new == pytest.approx(grid_argmin_1d(f), abs=1e-5)

    @pytest.mark.parametrize("q", [0.3, 0.6, 1.3, 1.8])
    def test_scaled_subproblem_matches_grid(self, q):
        X = np.array([[1.0, 0.2], [2.0, -0.4], [-1.5, 1.0]])
        y = np.array([3.0, 1.0, -0.5])
        prob = ProblemInstance(y, X)
        beta = np.array([0.0, 0.7])
        r = y - X @ beta
        pt = PenaltyPoint(1.1, q)
        lam = 1.1 ** (2 - q) / q
        other = y - X[:, 1] * 0.7

        def f(t):
            return 0.5 * ((other[:, None] - X[:, [0]] * t) ** 2).sum(0) + lam * np.abs(t) ** q

        new, _ = coordinate_update(prob, beta, r, 0, pt)
        assert new == pytest.approx(grid_argmin_1d(f), abs=2e-5)
        np.testing.assert_allclose(r, y - X @ beta, atol=1e-14)

    def test_zero_b(self):
        X = np.array([[1.0], [-1.0]])
        prob = ProblemInstance(np.array([1.0, 1.0]), X)
        new, _ = coordinate_update(prob, np.zeros(1), prob.y.copy(), 0, PenaltyPoint(0.1, 0.5))
        assert new == 0.0

    def test_index_check(self, small_problem):
        with pytest.raises(IndexError):
            coordinate_update(small_problem, np.zeros(6), small_problem.y.copy(), 6,
                              PenaltyPoint(1.0, 1.0))

    def test_coordinate_omega(self):
        assert coordinate_omega(PenaltyPoint(2.0, 1.0), 4.0) == 0.5
        assert coordinate_omega(PenaltyPoint(2.0, 0.5), 8.0) == pytest.approx(2.0 * 8.0 ** (-2 / 3))


class TestSolve:
    def test_scalar_soft_threshold(self, backend):
        prob = ProblemInstance(np.array([2.0]), np.array([[1.0]]))
        sol = solve(prob, PenaltyPoint(0.5, 1.0), backend=backend)
        assert sol.beta.tolist() == [1.5]
        assert sol.converged

    def test_ridge_equivalence(self, small_problem, backend):
        sol = solve(small_problem, PenaltyPoint(4.2, 2.0), backend=backend)
        np.testing.assert_allclose(sol.beta, ridge_closed_form(small_problem), atol=1e-8)

    @pytest.mark.parametrize("q", [0.25, 0.5, 0.75, 1.0])
    def test_zero_above_omega_min(self, small_problem, q, backend):
        w = omega_min(q, small_problem)
        sol = solve(small_problem, PenaltyPoint(1.000001 * w, q), backend=backend)
        assert not sol.beta.any()
        sol = solve(small_problem, PenaltyPoint(0.99 * w, q), backend=backend)
        assert sol.beta.any()

    def test_objective_consistency(self, small_problem, backend):
        pt = PenaltyPoint(1.3, 0.7)
        sol = solve(small_problem, pt, backend=backend)
        assert sol.objective == pytest.approx(objective_value(small_problem, sol.beta, pt), rel=1e-10)

    @pytest.mark.parametrize("q", [0.2, 0.5, 0.9, 1.0, 1.3, 1.7])
    def test_fixed_point(self, small_problem, q, backend):
        pt = PenaltyPoint(0.8, q)
        sol = solve(small_problem, pt, backend=backend)
        assert sol.converged
        r = small_problem.y - small_problem.X @ sol.beta
        for j in range(small_problem.p):
            c = small_problem.col_sq_norms[j]
            b = small_problem.X[:, j] @ r / c + sol.beta[j]
            h = threshold(PenaltyPoint(coordinate_omega(pt, c), q), b)
            assert abs(h - sol.beta[j]) <= 1e-9

    def test_lasso_equivalence(self, small_problem, backend):
        for omega in (0.5, 2.0, 6.0):
            sol = solve(small_problem, PenaltyPoint(omega, 1.0), backend=backend)
            ref = lasso_cd_reference(small_problem.X, small_problem.y, omega)
            np.testing.assert_allclose(sol.beta, ref, atol=1e-8)

    @pytest.mark.parametrize("q", [1.0, 1.4, 2.0])
    def test_permutation_coherence(self, small_problem, q):
        perm = np.array([4, 2, 5, 0, 3, 1])
        permuted = ProblemInstance(small_problem.y, small_problem.X[:, perm])
        pt = PenaltyPoint(0.9, q)
        a = solve(small_problem, pt, config=SolveConfig(tol=1e-13))
        b = solve(permuted, pt, config=SolveConfig(tol=1e-13))
        back = np.empty_like(b.beta)
        back[perm] = b.beta
        np.testing.assert_allclose(back, a.beta, atol=1e-10)

    def test_nonconvergence_is_flagged(self, small_problem):
        sol = solve(small_problem, PenaltyPoint(0.01, 1.5), config=SolveConfig(max_sweeps=1))
        assert not sol.converged and sol.sweeps == 1

    def test_bad_start(self, small_problem):
        with pytest.raises(ValueError):
            solve(small_problem, PenaltyPoint(1.0, 1.0), np.array([np.nan] * 6))

    def test_bad_ordering(self, small_problem):
        with pytest.raises(ValueError):
            solve(small_problem, PenaltyPoint(1.0, 1.0), config=SolveConfig(ordering=[0, 0, 1, 2, 3, 4]))

    @settings(max_examples=25, deadline=None)
    @given(omega=st.floats(0.01, 8.0), q=st.sampled_from([0.1, 0.3, 0.5, 0.8, 1.0, 1.2, 1.6, 2.0]),
           seed=st.integers(0, 10_000))
    def test_monotone_descent(self, small_problem, omega, q, seed):
        order = np.random.default_rng(seed).permutation(6)
        start = np.random.default_rng(seed + 1).normal(size=6)
        sol = solve(small_problem, PenaltyPoint(omega, q), start, SolveConfig(ordering=order),
                    instrument=True)
        assert sol.max_increase <= 1e-12


class TestRidge:
    def test_identity_design(self):
        y = np.array([1.0, -2.0, 4.0])
        np.testing.assert_allclose(ridge_closed_form(ProblemInstance(y, np.eye(3))), y / 2)

    def test_single_column(self):
        x = np.array([1.0, 2.0, 2.0])
        y = np.array([1.0, 0.0, 3.0])
        beta = ridge_closed_form(ProblemInstance(y, x[:, None]))
        assert beta[0] == pytest.approx((x @ y) / (x @ x + 1))

    def test_linear_system_residual(self):
        rng = np.random.default_rng(3)
        X, y = rng.normal(size=(5, 3)), rng.normal(size=5)
        beta = ridge_closed_form(ProblemInstance(y, X))
        lhs = (X.T @ X + np.eye(3)) @ beta
        assert np.linalg.norm(lhs - X.T @ y) <= 1e-10 * np.linalg.norm(X.T @ y)
        sol = solve(ProblemInstance(y, X), PenaltyPoint(3.3, 2.0))
        np.testing.assert_allclose(sol.beta, beta, atol=1e-8)

    def test_wide_design(self):
        rng = np.random.default_rng(4)
        X, y = rng.normal(size=(4, 9)), rng.normal(size=4)
        beta = ridge_closed_form(ProblemInstance(y, X))
        np.testing.assert_allclose((X.T @ X + np.eye(9)) @ beta, X.T @ y, atol=1e-10)


def test_rejects_tiny_q(small_problem):
    with pytest.raises(ValueError, match="supported minimum"):
        solve(small_problem, PenaltyPoint(1.0, 0.005))
