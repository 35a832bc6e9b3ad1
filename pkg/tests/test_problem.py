import math

import pytest

from rewardesign.control import problem as problem_module
from rewardesign.control.problem import (
    ConstraintFunction,
    CostKind,
    check_closure_if_small,
    evaluate_cost,
    is_feasible_state,
    is_terminal_state,
)
from rewardesign.core.errors import ConfigurationError, DomainError
from rewardesign.envs.grid import STAY
from tests.conftest import RIGHT, single, two_action_line


def test_joint_actions_are_lexicographic(micro_coverage):
    _, problem = micro_coverage
    assert problem.num_joint_actions == 25
    assert problem.joint_actions[0] == (0, 0)
    assert problem.joint_actions[1] == (0, 1)
    assert problem.joint_actions[-1] == (4, 4)


def test_constraint_budget_domain():
    with pytest.raises(DomainError):
        ConstraintFunction(lambda s: 0.0, budget=-1.0)
    with pytest.raises(DomainError):
        ConstraintFunction(lambda s: 0.0, budget=math.nan)

    unbounded = ConstraintFunction(lambda s: 1e9, budget=math.inf)
    assert unbounded.is_feasible("anything")


def test_constraint_strictness():
    loose = ConstraintFunction(lambda s: s, budget=0.0)
    strict = ConstraintFunction(lambda s: s, budget=0.0, strict=True)
    assert loose.is_feasible(0.0)
    assert not strict.is_feasible(0.0)
    assert strict.is_feasible(-0.1)


def test_problem_validation():
    with pytest.raises(ConfigurationError):
        two_action_line(initial_set=())
    with pytest.raises(ConfigurationError):
        two_action_line(initial_set=(7,))
    with pytest.raises(ConfigurationError):
        two_action_line(horizon=0)
    with pytest.raises(ConfigurationError):
        two_action_line(cost_kind=CostKind.MINIMUM_ACTION)
    with pytest.raises(ConfigurationError):
        two_action_line(cost_kind=CostKind.CUSTOM)


def test_check_state_and_action(line_problem):
    assert line_problem.check_state(single(2)) == 2
    with pytest.raises(DomainError):
        line_problem.check_state(single(5))
    with pytest.raises(DomainError):
        line_problem.check_action((RIGHT, RIGHT))
    with pytest.raises(DomainError):
        line_problem.check_action((9,))


def test_closure_detects_escaping_dynamics():
    two_action_line().check_closure()
    leaky = two_action_line(dynamics=lambda s, a: s + 1)
    with pytest.raises(ConfigurationError):
        leaky.check_closure()


def test_closure_check_is_skipped_on_large_problems(monkeypatch):
    leaky = two_action_line(dynamics=lambda s, a: s + 1)
    with pytest.raises(ConfigurationError):
        check_closure_if_small(leaky)
    monkeypatch.setattr(problem_module, "CLOSURE_CHECK_LIMIT", 5)
    check_closure_if_small(leaky)


def test_minimum_time_cost(line_problem):
    assert evaluate_cost(line_problem, single(0), (RIGHT,)) == 1.0


def test_minimum_fuel_cost(micro_coverage):
    _, problem = micro_coverage
    fuel = problem.with_cost(CostKind.MINIMUM_FUEL)
    state = problem.initial_set[0]
    assert evaluate_cost(fuel, state, (RIGHT, RIGHT)) == pytest.approx(math.sqrt(2))
    assert evaluate_cost(fuel, state, (STAY, STAY)) == 0.0


def test_minimum_action_cost(micro_coverage):
    _, problem = micro_coverage
    action = problem.with_cost(CostKind.MINIMUM_ACTION)
    state = problem.initial_set[0]
    assert evaluate_cost(action, state, (RIGHT, STAY)) == 1.0
    assert evaluate_cost(action, state, (RIGHT, 0)) == 2.0
    assert evaluate_cost(action, state, (STAY, STAY)) == 0.0


def test_custom_cost_must_be_finite_and_nonnegative():
    problem = two_action_line(cost_kind=CostKind.CUSTOM, custom_cost=lambda s, a: 0.5 * s)
    assert evaluate_cost(problem, 2, (1,)) == 1.0

    negative = two_action_line(cost_kind=CostKind.CUSTOM, custom_cost=lambda s, a: -1.0)
    with pytest.raises(DomainError):
        evaluate_cost(negative, 0, (1,))
    infinite = two_action_line(cost_kind=CostKind.CUSTOM, custom_cost=lambda s, a: math.inf)
    with pytest.raises(DomainError):
        evaluate_cost(infinite, 0, (1,))


def test_variants_share_dynamics(blocked_problem):
    relaxed = blocked_problem.relaxed()
    hazard = single(1)
    assert not is_feasible_state(blocked_problem, hazard)
    assert is_feasible_state(relaxed, hazard)
    assert relaxed.dynamics is blocked_problem.dynamics
    assert is_terminal_state(blocked_problem, single(2))
