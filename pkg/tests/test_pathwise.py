import numpy as np
import pytest

from powpath.pathwise import (
    Axis,
    GridOrigin,
    OmegaGrid,
    QGrid,
    Strategy,
    base_omega_grid,
    build_omega_grid,
    cold_path_fixed_omega,
    cold_path_fixed_q,
    default_q_grid,
    omega_min,
    path_fixed_omega,
    path_fixed_q,
    surface,
)
from powpath.solver import ProblemInstance, objective_value, ridge_closed_form
from powpath.threshold import PenaltyPoint


@pytest.fixture(scope="module")
def tiny(synth):
    # first eight columns of the shared synthetic instance keep lattice runs quick
    return ProblemInstance(synth.problem.y, synth.problem.X[:, :8])


class TestGrids:
    def test_base_grid_endpoints(self, small_problem):
        g = base_omega_grid(small_problem, k=20, floor=1e-7)
        assert g.size == 20
        assert g[0] == omega_min(1.0, small_problem) and g[-1] == 1e-7
        assert np.allclose(np.diff(np.log(g)), np.log(g[1] / g[0]))

    def test_bad_floor(self, small_problem):
        with pytest.raises(ValueError):
            base_omega_grid(small_problem, floor=10 * omega_min(1.0, small_problem))

    @pytest.mark.parametrize("q", [0.3, 1.0, 1.5])
    def test_head_then_filtered(self, small_problem, q):
        g = build_omega_grid(small_problem, q)
        base = base_omega_grid(small_problem)
        assert g.origin is GridOrigin.FromOmegaMin
        assert g.values[0] == omega_min(q, small_problem)
        assert np.all(g.values[1:] < g.values[0])
        assert set(g.values[1:]) <= set(base)

    def test_omega_min_q_above_one(self, small_problem):
        assert omega_min(1.7, small_problem) == np.abs(small_problem.col_y_products).max()

    def test_omega_min_q_one_is_lasso_bound(self, small_problem):
        assert omega_min(1.0, small_problem) == pytest.approx(
            np.abs(small_problem.X.T @ small_problem.y).max(), rel=1e-14)

    def test_default_q_grid(self):
        qs = default_q_grid().values
        assert qs.size == 20 and qs[0] == 2.0 and qs[-1] == 0.1
        assert 1.0 in qs
        assert np.allclose(np.diff(qs), -0.1)

    @pytest.mark.parametrize("vals", [[1.0, 1.0], [1.0, 2.0], [0.5, -1.0], []])
    def test_omega_grid_validation(self, vals):
        with pytest.raises(ValueError):
            OmegaGrid(np.array(vals))

    @pytest.mark.parametrize("vals", [[1.5, 1.0], [2.0, 2.5], [2.0, 1.0, 1.0], [2.0, 0.0]])
    def test_q_grid_validation(self, vals):
        with pytest.raises(ValueError):
            QGrid(np.array(vals))


class TestPaths:
    @pytest.mark.parametrize("q", [0.25, 0.6, 1.0])
    def test_warm_zero_head(self, tiny, q, backend):
        path = path_fixed_q(tiny, q, build_omega_grid(tiny, q, k=8), backend=backend)
        assert path.axis is Axis.Omega
        assert not path.columns[:, 0].any()
        assert path.per_column[0].updates == tiny.p
        assert path.columns.shape == (tiny.p, len(path.grid))

    @pytest.mark.parametrize("q", [1.0, 1.3, 1.8])
    def test_convex_fixed_q_agreement(self, tiny, q):
        grid = build_omega_grid(tiny, q, k=8, floor=1e-3)
        warm = path_fixed_q(tiny, q, grid)
        cold = cold_path_fixed_q(tiny, q, grid)
        for l, (a, b) in enumerate(zip(warm.per_column, cold.per_column)):
            assert abs(a.objective - b.objective) <= 1e-7, l

    def test_convex_fixed_omega_agreement(self, tiny):
        grid = default_q_grid(k=11)
        omega = 0.3 * omega_min(1.0, tiny)
        warm = path_fixed_omega(tiny, omega, grid)
        cold = cold_path_fixed_omega(tiny, omega, grid)
        assert warm.axis is Axis.Q
        for q, a, b in zip(grid.values, warm.per_column, cold.per_column):
            if q >= 1.0:
                assert abs(a.objective - b.objective) <= 1e-7, q

    def test_fixed_omega_head_is_ridge(self, tiny):
        path = path_fixed_omega(tiny, 0.7, default_q_grid(k=5))
        np.testing.assert_array_equal(path.columns[:, 0], ridge_closed_form(tiny))
        assert path.per_column[0].updates == 0

    def test_path_objectives_recomputed(self, tiny):
        path = path_fixed_q(tiny, 0.5, build_omega_grid(tiny, 0.5, k=6))
        for l, sol in enumerate(path.per_column):
            assert sol.objective == pytest.approx(
                objective_value(tiny, path.columns[:, l], path.point(l)), rel=1e-10)

    def test_warm_cheaper_than_cold(self, synth):
        prob = synth.problem
        grid = build_omega_grid(prob, 0.7)
        assert path_fixed_q(prob, 0.7, grid).total_updates < cold_path_fixed_q(prob, 0.7, grid).total_updates

    @pytest.mark.parametrize("q", [0.2, 0.5, 0.9, 1.0])
    def test_orthonormal_support_nesting(self, q):
        rng = np.random.default_rng(11)
        Q, _ = np.linalg.qr(rng.normal(size=(40, 10)))
        y = Q @ rng.normal(scale=3, size=10) + 0.1 * rng.normal(size=40)
        prob = ProblemInstance(y, Q)
        path = path_fixed_q(prob, q, build_omega_grid(prob, q, k=25, floor=1e-4))
        support = path.columns != 0
        for l in range(support.shape[1] - 1):
            assert np.all(support[:, l] <= support[:, l + 1])

    def test_objective_sanity(self, tiny):
        zero_obj = 0.5 * tiny.y @ tiny.y
        for q in (0.3, 0.8):
            for sol in path_fixed_q(tiny, q, build_omega_grid(tiny, q, k=8)).per_column:
                assert sol.objective <= zero_obj + 1e-12
        ridge = ridge_closed_form(tiny)
        omega = 0.05
        path = path_fixed_omega(tiny, omega, default_q_grid(k=10))
        for l, sol in enumerate(path.per_column):
            assert sol.objective <= objective_value(tiny, ridge, path.point(l)) + 1e-12


class TestSurface:
    def test_single_cell(self, small_problem):
        lattice = [0.5]
        for strat in Strategy:
            cells = surface(small_problem, lattice, [2.0], strat)
            assert len(cells) == 1
            np.testing.assert_allclose(cells[0].beta, ridge_closed_form(small_problem), atol=1e-8)

    def test_q_two_row_is_ridge(self, tiny):
        lattice = base_omega_grid(tiny, k=5, floor=1e-3)
        for strat in Strategy:
            for c in surface(tiny, lattice, default_q_grid(k=4), strat):
                if c.q == 2.0:
                    np.testing.assert_allclose(c.beta, ridge_closed_form(tiny), atol=1e-8)

    def test_layout_and_zero_cells(self, tiny):
        lattice = base_omega_grid(tiny, k=6, floor=1e-3)
        qgrid = default_q_grid(k=5, q_min=0.2)
        cells = surface(tiny, lattice, qgrid, Strategy.WarmFixedQ)
        assert [(c.omega, c.q) for c in cells] == [(float(w), float(q)) for w in lattice for q in qgrid.values]
        for c in cells:
            if c.q <= 1.0 and c.omega >= omega_min(c.q, tiny):
                assert not c.beta.any() and c.updates == 0

    def test_fixed_omega_requires_ridge_start(self, tiny):
        with pytest.raises(ValueError):
            surface(tiny, [0.5], [1.5, 1.0], Strategy.WarmFixedOmega)

    def test_instrumented_surface(self, tiny, backend):
        lattice = base_omega_grid(tiny, k=4, floor=1e-3)
        for strat in Strategy:
            cells = surface(tiny, lattice, default_q_grid(k=4), strat, backend=backend, instrument=True)
            assert max(c.max_increase for c in cells) <= 1e-12

    def test_strategy_flags(self):
        assert Strategy.WarmFixedQ.fixed_q and Strategy.WarmFixedQ.warm
        assert not Strategy.ColdFixedOmega.fixed_q and not Strategy.ColdFixedOmega.warm
        assert Strategy("cold_fixed_q") is Strategy.ColdFixedQ


def test_point_accessor(tiny):
    path = path_fixed_omega(tiny, 0.4, default_q_grid(k=3))
    assert path.point(1) == PenaltyPoint(0.4, 1.05)
