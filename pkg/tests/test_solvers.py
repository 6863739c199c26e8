import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdopt.exceptions import InfeasibilityCertificate, InvalidArgument, TheoryContradiction
from mdopt.oracles import ConstraintOracle, FunctionOracle, linear_oracle, quadratic_oracle
from mdopt.problems import Problem, fts_quadratic, get_problem, toy_problem
from mdopt.prox import ball, box
from mdopt.solvers import (
    adaptive_iteration_bound,
    lipschitz_iteration_bound,
    partial_iteration_count,
    solve_adaptive,
    solve_lipschitz,
    solve_multi_constraint,
    solve_partially_adaptive,
    v_f,
)

from conftest import random_problem

SOLVERS = [solve_adaptive, solve_partially_adaptive, solve_lipschitz, solve_multi_constraint]


@pytest.fixture
def toy():
    prob = toy_problem()
    return prob, prob.prox_setup()


def test_toy_adaptive(toy):
    prob, setup = toy
    res = solve_adaptive(prob, setup, 0.1)
    assert res.iterations == 100 and res.productive_count == 100
    assert res.stop_reason == "criterion_met" and res.output_rule == "best_productive"
    assert res.output[0] == pytest.approx(-1.0)
    assert res.iterations == res.productive_count + res.nonproductive_count


def test_toy_partially_adaptive_matches_adaptive(toy):
    prob, setup = toy
    a = solve_adaptive(prob, setup, 0.1)
    b = solve_partially_adaptive(prob, setup, 0.1)
    assert b.iterations == partial_iteration_count(1.0, 0.5, 0.1) == 100
    assert [r.step_size for r in a.trace] == pytest.approx([r.step_size for r in b.trace])
    np.testing.assert_allclose(a.output, b.output)


def test_toy_lipschitz_average(toy):
    prob, setup = toy
    res = solve_lipschitz(prob, setup, 0.1)
    assert res.iterations == 100 and res.output_rule == "weighted_average"
    # iterates 0, -0.1, ..., -1 then pinned at -1; average of the first 100
    iterates = np.maximum(-0.1 * np.arange(100), -1.0)
    assert res.output[0] == pytest.approx(iterates.mean())
    assert prob.g_max(res.output) <= 0.1


def test_partial_iteration_formula():
    assert partial_iteration_count(4.0, 9.0, 0.5) == 1152
    prob = fts_quadratic(unit_ball=True)
    res = solve_partially_adaptive(prob, prob.prox_setup(), 0.5, keep_trace=False)
    assert res.iterations == 1152


def _constant_objective_problem():
    f = FunctionOracle(lambda x: 3.0, lambda x: np.zeros(2), 2, lipschitz=0.0)
    g = linear_oracle([1.0, 0.0], -0.5)
    return Problem("flat", 2, f, ConstraintOracle((g,), 1.0), ball(2), 1.0, np.zeros(2))


@pytest.mark.parametrize("solver", SOLVERS)
def test_zero_objective_gradient(solver):
    prob = _constant_objective_problem()
    res = solver(prob, prob.prox_setup(), 0.1)
    assert res.stop_reason == "zero_objective_gradient"
    assert res.iterations == 0
    np.testing.assert_array_equal(res.output, prob.x0)


def test_infeasibility_certificate():
    # g has its minimum value 1 at the origin: a violated point with zero subgradient
    f = linear_oracle([1.0, 0.0])
    g = quadratic_oracle(np.eye(2), np.zeros(2), 1.0)
    prob = Problem("infeasible", 2, f, ConstraintOracle((g,), 2.0), ball(2), 1.0, np.zeros(2))
    for solver in (solve_adaptive, solve_lipschitz, solve_multi_constraint):
        with pytest.raises(InfeasibilityCertificate):
            solver(prob, prob.prox_setup(), 0.1)


def test_partial_without_productive_steps():
    # M_g far too large: fixed steps never reach the feasible region
    f = linear_oracle([1.0])
    g = linear_oracle([1.0], -0.5)
    prob = Problem("tiny", 1, f, ConstraintOracle((g,), 1.0), box([-1.0], [1.0]), 0.1, np.array([1.0]))
    with pytest.raises(TheoryContradiction) as info:
        solve_partially_adaptive(prob, prob.prox_setup(), 0.1, M_g=30.0)
    assert len(info.value.trace) > 0


def test_bad_arguments(toy):
    prob, setup = toy
    with pytest.raises(InvalidArgument):
        solve_adaptive(prob, setup, 0.0)
    with pytest.raises(InvalidArgument):
        solve_adaptive(prob, setup, 0.1, start=[3.0])
    with pytest.raises(InvalidArgument):
        solve_multi_constraint(prob, setup, 0.1, selection="random")


def test_iteration_cap(toy):
    prob, setup = toy
    res = solve_adaptive(prob, setup, 0.1, cap=10)
    assert res.stop_reason == "iteration_cap" and res.iterations == 10 and not res.converged


def test_v_f_examples():
    f = linear_oracle([1.0, 0.0])
    prob = Problem("lin", 2, f, ConstraintOracle((linear_oracle([0.0, 1.0], -1.0),), 1.0),
                   ball(2, 2.0), 1.0, np.zeros(2))
    setup = prob.prox_setup()
    assert v_f(prob, setup, [1, 0], [0, 0]) == 1.0
    assert v_f(prob, setup, [1, 0], [1, 0]) == 0.0
    flat = _constant_objective_problem()
    assert v_f(flat, flat.prox_setup(), [0.3, 0], [0, 0.2]) == 0.0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**20))
def test_v_f_bounded_by_distance(seed):
    rng = np.random.default_rng(seed)
    prob = fts_quadratic()
    setup = prob.prox_setup()
    x, y = prob.feasible_set.sample(rng, 2)
    assert abs(v_f(prob, setup, x, y)) <= np.linalg.norm(x - y) + 1e-12


def test_multi_constraint_single_member_matches_adaptive():
    prob = get_problem("sc-ex3", with_reference=False)
    setup = prob.prox_setup()
    a = solve_adaptive(prob, setup, 0.5)
    b = solve_multi_constraint(prob, setup, 0.5)
    assert a.iterations == b.iterations
    assert [r.step_size for r in a.trace] == [r.step_size for r in b.trace]
    np.testing.assert_array_equal(a.output, b.output)


def test_multi_constraint_selection_rules():
    prob = fts_quadratic()
    setup = prob.prox_setup()
    first = solve_multi_constraint(prob, setup, 0.5, selection="first")
    most = solve_multi_constraint(prob, setup, 0.5, selection="max")
    for res in (first, most):
        assert res.converged
        idx = [r.constraint_index for r in res.trace if r.kind == "nonproductive"]
        assert idx and all(i is not None and 0 <= i < 10 for i in idx)
    # the most-violated rule steps on argmax at the start point (1,...,1): all tie, lowest index
    assert most.trace[0].constraint_index == 0


def _trace_invariants(prob, res, eps):
    for rec in res.trace:
        assert rec.step_size > 0
        assert (rec.kind == "productive") == (rec.g_value <= eps)
        assert (rec.f_value is None) == (rec.kind == "nonproductive")
    assert res.productive_count >= 1
    assert prob.g_max(res.output) <= eps + 1e-9


@pytest.mark.parametrize("name", ["fts-quadratic", "fts-nonsmooth", "sc-ex2", "sc-ex5"])
@pytest.mark.parametrize("solver", SOLVERS)
def test_run_invariants(name, solver):
    prob = get_problem(name, with_reference=False)
    eps = 0.5
    res = solver(prob, prob.prox_setup(), eps)
    _trace_invariants(prob, res, eps)
    if solver is solve_adaptive:
        assert res.iterations <= adaptive_iteration_bound(prob.M_g, prob.theta0_sq, eps)
    if solver is solve_partially_adaptive:
        assert res.iterations == partial_iteration_count(prob.M_g, prob.theta0_sq, eps)
    if solver is solve_lipschitz and prob.objective.lipschitz is not None:
        assert res.iterations <= lipschitz_iteration_bound(prob.objective.lipschitz, prob.M_g,
                                                           prob.theta0_sq, eps)


def test_determinism():
    prob = get_problem("fts-nonsmooth", with_reference=False)
    a = solve_adaptive(prob, prob.prox_setup(), 0.5)
    b = solve_adaptive(prob, prob.prox_setup(), 0.5)
    assert [r.to_dict() for r in a.trace] == [r.to_dict() for r in b.trace]
    np.testing.assert_array_equal(a.output, b.output)


def test_audit_clean_on_toy(toy):
    prob, setup = toy
    for solver in SOLVERS:
        assert solver(prob, setup, 0.1, audit=True).audit_violations == []


def test_bounds_on_random_problems():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        prob = random_problem(rng)
        setup = prob.prox_setup()
        eps = float(rng.uniform(0.2, 0.6))
        a = solve_adaptive(prob, setup, eps, keep_trace=False)
        assert a.converged
        assert a.iterations <= adaptive_iteration_bound(prob.M_g, prob.theta0_sq, eps)
        b = solve_partially_adaptive(prob, setup, eps, keep_trace=False)
        assert b.iterations == partial_iteration_count(prob.M_g, prob.theta0_sq, eps)
        c = solve_lipschitz(prob, setup, eps, keep_trace=False)
        assert c.iterations <= lipschitz_iteration_bound(prob.objective.lipschitz, prob.M_g,
                                                         prob.theta0_sq, eps)
