import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mdopt.exceptions import InvalidArgument
from mdopt.oracles import (
    ConstraintOracle,
    FunctionOracle,
    first_violated,
    linear_oracle,
    max_oracle,
    max_violated,
    quadratic_oracle,
)
from mdopt.problems import PROBLEM_IDS, get_problem, strongly_convex_example


def const(v):
    return FunctionOracle(lambda x: v, lambda x: np.zeros(1), 1, name=str(v))


def test_max_oracle_examples():
    up, down = linear_oracle([1.0]), linear_oracle([-1.0])
    m = max_oracle([up, down])
    assert m.value(np.array([2.0])) == 2.0
    np.testing.assert_array_equal(m.subgrad(np.array([2.0])), [1.0])
    # tie at 0: lowest index wins
    assert m.value(np.array([0.0])) == 0.0
    np.testing.assert_array_equal(m.subgrad(np.array([0.0])), [1.0])


def test_max_oracle_example2_at_origin():
    f = strongly_convex_example(2).objective
    assert f.value(np.zeros(10)) == 7.0
    np.testing.assert_array_equal(f.subgrad(np.zeros(10)), -np.arange(21, 31))


def test_max_oracle_metadata():
    a = quadratic_oracle(np.diag([1.0, 3.0]), [0, 0])
    b = quadratic_oracle(np.diag([2.0, 0.5]), [1, 0])
    m = max_oracle([a, b])
    assert m.lipschitz_grad == 3.0 and m.mu == 0.5
    with pytest.raises(InvalidArgument):
        max_oracle([])
    with pytest.raises(InvalidArgument):
        max_oracle([linear_oracle([1.0]), linear_oracle([1.0, 2.0])])


@settings(max_examples=100, deadline=None)
@given(x=arrays(float, 3, elements=st.floats(-10, 10)), seed=st.integers(0, 2**16))
def test_max_oracle_value_and_active_member(x, seed):
    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(4):
        B = rng.standard_normal((3, 3))
        parts.append(quadratic_oracle(B @ B.T, rng.standard_normal(3), rng.standard_normal()))
    m = max_oracle(parts)
    vals = [p.value(x) for p in parts]
    assert m.value(x) == max(vals)
    i = int(np.argmax(vals))
    assert vals[i] - m.value(x) == 0.0
    np.testing.assert_array_equal(m.subgrad(x), parts[i].subgrad(x))


def test_quadratic_oracle_examples():
    f = quadratic_oracle(np.eye(2), [0, 0], 0)
    assert f.value(np.array([3.0, 4.0])) == 12.5
    np.testing.assert_array_equal(f.subgrad(np.array([3.0, 4.0])), [3, 4])
    f = quadratic_oracle(np.zeros((2, 2)), [1, 1], 5)
    assert f.value(np.array([1.0, 1.0])) == 3.0
    np.testing.assert_array_equal(f.subgrad(np.array([1.0, 1.0])), [-1, -1])
    f = quadratic_oracle(np.diag([2.0, 4.0]), [1, 0], 0)
    assert f.value(np.array([1.0, 1.0])) == 2.0
    np.testing.assert_array_equal(f.subgrad(np.array([1.0, 1.0])), [1, 4])
    assert f.lipschitz_grad == 4.0 and f.mu == 2.0


def test_quadratic_oracle_rejects_asymmetric():
    with pytest.raises(InvalidArgument):
        quadratic_oracle([[1.0, 2.0], [0.0, 1.0]], [0, 0])


def test_constraint_oracle_validation():
    with pytest.raises(InvalidArgument):
        ConstraintOracle((), 1.0)
    with pytest.raises(InvalidArgument):
        ConstraintOracle((linear_oracle([1.0]),), 0.0)


def test_max_violated_examples():
    # indices are 0-based
    cons = ConstraintOracle((const(-1.0), const(-2.0)), 1.0)
    assert max_violated(cons, np.zeros(1), 0.1) is None
    cons = ConstraintOracle((const(0.05), const(0.5)), 1.0)
    assert max_violated(cons, np.zeros(1), 0.1) == (1, 0.5)
    cons = ConstraintOracle((const(0.5), const(0.5)), 1.0)
    assert max_violated(cons, np.zeros(1), 0.1) == (0, 0.5)


def test_first_violated_prefers_lowest_index():
    cons = ConstraintOracle((const(0.0), const(0.3), const(0.9)), 1.0)
    assert first_violated(cons, np.zeros(1), 0.1) == (1, 0.3)
    assert max_violated(cons, np.zeros(1), 0.1) == (2, 0.9)
    assert first_violated(cons, np.zeros(1), 1.0) is None


@pytest.mark.parametrize("name", PROBLEM_IDS)
def test_shipped_oracles_are_valid_subgradients(name, rng):
    prob = get_problem(name, with_reference=False)
    xs = prob.feasible_set.sample(rng, 1000)
    ys = prob.feasible_set.sample(rng, 1000)
    for oracle in (prob.objective, *prob.constraints.members):
        fx = np.array([oracle.value(x) for x in xs])
        fy = np.array([oracle.value(y) for y in ys])
        lin = np.array([oracle.subgrad(x) @ (y - x) for x, y in zip(xs, ys)])
        scale = np.maximum(1.0, np.abs(fy))
        assert np.all(fy - fx - lin >= -1e-8 * scale)
        if oracle.mu > 0:
            strong = fx + lin + 0.5 * oracle.mu * np.sum((ys - xs) ** 2, axis=1)
            assert np.all(fy - strong >= -1e-8 * scale)


@pytest.mark.parametrize("name", PROBLEM_IDS)
def test_constraint_subgradients_bounded_by_M_g(name, rng):
    prob = get_problem(name, with_reference=False)
    for x in prob.feasible_set.sample(rng, 500):
        for g in prob.constraints.members:
            assert np.linalg.norm(g.subgrad(x)) <= prob.M_g + 1e-6


@pytest.mark.parametrize("name", PROBLEM_IDS)
def test_vectorized_values_match_members(name, rng):
    prob = get_problem(name, with_reference=False)
    for x in prob.feasible_set.sample(rng, 50):
        direct = np.array([g.value(x) for g in prob.constraints.members])
        np.testing.assert_allclose(prob.constraints.values(x), direct, rtol=1e-12, atol=1e-12)
