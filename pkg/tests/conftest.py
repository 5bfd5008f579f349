import numpy as np
import pytest

from powpath import _backend
from powpath.data import synth_instance
from powpath.solver import ProblemInstance

BACKENDS = sorted(_backend.AVAILABLE)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def synth():
    """Desk-scale acceptance instance: n=100, p=50, rho=0.3."""
    return synth_instance(seed=0, n=100, p=50, sparsity=5, correlation_rho=0.3, noise_sd=1.0)


@pytest.fixture(scope="session")
def small_problem():
    rng = np.random.default_rng(12)
    X = rng.standard_normal((30, 6))
    y = X @ np.array([1.5, -1.0, 0.0, 0.0, 0.5, 0.0]) + 0.3 * rng.standard_normal(30)
    return ProblemInstance(y - y.mean(), X - X.mean(axis=0))


def lasso_cd_reference(X, y, lam, tol=1e-14, max_sweeps=200_000):
    """Textbook lasso coordinate descent, kept independent of the package."""
    n, p = X.shape
    beta = np.zeros(p)
    r = y.astype(float).copy()
    sq = (X * X).sum(axis=0)
    for _ in range(max_sweeps):
        biggest = 0.0
        for j in range(p):
            z = X[:, j] @ r + sq[j] * beta[j]
            new = np.sign(z) * max(abs(z) - lam, 0.0) / sq[j]
            d = new - beta[j]
            if d:
                r -= d * X[:, j]
                beta[j] = new
                biggest = max(biggest, abs(d))
        if biggest <= tol:
            break
    return beta


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
