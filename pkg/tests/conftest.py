import numpy as np
import pytest

from mdopt.problems import PROBLEM_IDS, fixture_path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def have_fixture(name):
    return fixture_path(name).exists()


requires_fixtures = pytest.mark.skipif(
    not all(have_fixture(n) for n in PROBLEM_IDS),
    reason="reference fixtures not generated (run tools/make_fixtures.py)",
)


def random_problem(rng):
    """Small random problem: convex quadratic objective, 1-3 strongly convex quadratic constraints
    on a ball, with M_g, M_f and Theta0 derived from the ball radius."""
    import math
    from dataclasses import replace

    from mdopt.oracles import ConstraintOracle, quadratic_oracle
    from mdopt.problems import Problem
    from mdopt.prox import ball

    n = int(rng.integers(2, 6))
    B = rng.standard_normal((n, n))
    f = quadratic_oracle(B @ B.T / n, rng.standard_normal(n), 0.0)
    members = []
    for _ in range(int(rng.integers(1, 4))):
        C = rng.standard_normal((n, n))
        members.append(quadratic_oracle(C @ C.T / n + np.eye(n), rng.standard_normal(n) * 0.3, -0.5))
    radius = float(rng.uniform(0.5, 2.0))
    # |A x - b| <= |A| r + |b| on the ball
    M_g = max(np.linalg.norm(g.subgrad(np.zeros(n))) + g.lipschitz_grad * radius for g in members)
    M_f = f.lipschitz_grad * radius + np.linalg.norm(f.subgrad(np.zeros(n)))
    x0 = np.full(n, radius / math.sqrt(n))
    # V(x0, x*) <= (2r)^2 / 2 on the ball
    theta0 = math.sqrt(2.0) * radius
    return Problem("random", n, replace(f, lipschitz=float(M_f)),
                   ConstraintOracle(tuple(members), float(M_g)), ball(n, radius), theta0, x0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
