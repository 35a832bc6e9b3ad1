import math

import pytest

from rewardesign.core.errors import ConfigurationError
from rewardesign.envs import coverage
from rewardesign.envs.grid import GridState


def pair(a, b, crossed=False) -> GridState:
    return GridState((a, b), crossed)


def test_standard_instance(standard_coverage):
    config, problem = standard_coverage
    assert problem.num_states == 2 * 25 * 25
    assert problem.num_joint_actions == 25
    assert problem.horizon == 10
    assert len(problem.initial_set) == 2


def test_coverage_sum_and_terminal(standard_coverage):
    config, problem = standard_coverage
    start = pair((0, 2), (2, 0))
    assert coverage.coverage_sum(config, start) == pytest.approx(1.0)
    assert not problem.terminal(start)
    assert problem.terminal(pair((0, 0), (4, 3)))
    assert not problem.terminal(pair((0, 1), (4, 3)))


def test_covering_one_landmark_together_is_unsafe(standard_coverage):
    _, problem = standard_coverage
    # percorso più breve: entrambi verso (0,0) in due passi
    together = pair((0, 0), (1, 0))
    assert problem.terminal(together)
    assert not problem.constraint.is_feasible(together)
    # in diagonale la distanza è sicura ma la copertura non basta
    assert problem.constraint.is_feasible(pair((0, 0), (1, 1)))
    assert not problem.terminal(pair((0, 0), (1, 1)))
    spread = pair((0, 0), (3, 4))
    assert problem.terminal(spread) and problem.constraint.is_feasible(spread)


def test_safety_constraint(standard_coverage):
    config, problem = standard_coverage
    # celle adiacenti: 0.25 < 0.3
    assert not problem.constraint.is_feasible(pair((1, 1), (2, 1)))
    # diagonale: 0.354 > 0.3
    assert problem.constraint.is_feasible(pair((1, 1), (2, 2)))
    assert not problem.constraint.is_feasible(pair((1, 1), (2, 2), crossed=True))
    assert not problem.constraint.is_feasible(pair((2, 2), (2, 2)))


def test_strict_constraint_at_equality():
    config = coverage.standard_config(safety_distance=0.25)
    problem = coverage.build(config)
    state = pair((1, 1), (2, 1))
    assert problem.constraint.g(state) == 0.0
    assert not problem.constraint.is_feasible(state)


def test_relaxed_problem_allows_collisions(standard_coverage):
    _, problem = standard_coverage
    assert problem.relaxed().constraint.is_feasible(pair((2, 2), (2, 2)))


def test_single_agent_has_no_pairwise_distance():
    config = coverage.standard_config(num_agents=1, landmark_positions=[(2, 2)], initial_positions=[[(0, 0)]])
    assert coverage.min_pairwise_distance(config, GridState(((0, 0),), False)) == math.inf
    problem = coverage.build(config)
    assert problem.constraint.is_feasible(problem.initial_set[0])


def test_observation_is_local(standard_coverage):
    _, problem = standard_coverage
    own, offsets, neighbors = problem.observe(pair((0, 2), (2, 0)), 0)
    assert own == (0, 2)
    assert offsets == ((0, -2), (4, 2))
    assert neighbors == ((2, 0),)


def test_guidance_is_bounded(micro_coverage):
    config, problem = micro_coverage
    gf = coverage.guidance_function(config)
    worst = gf.check_bound(problem)
    assert worst < gf.rho
    assert gf.rho == math.nextafter(0.5 * coverage.max_coverage_sum(config) + 1.35, math.inf)


def test_config_validation():
    with pytest.raises(ConfigurationError) as e:
        coverage.build(coverage.standard_config(landmark_positions=[(1, 1), (1, 1)]))
    assert e.value.key == "landmark_positions"
    with pytest.raises(ConfigurationError) as e:
        coverage.build(coverage.standard_config(initial_positions=[[(0, 0)]]))
    assert e.value.key == "initial_positions"
    with pytest.raises(ConfigurationError):
        coverage.build(coverage.standard_config(landmark_positions=[(9, 9)]))
