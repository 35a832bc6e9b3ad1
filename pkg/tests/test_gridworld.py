import math

import pytest
from pydantic import ValidationError

from rewardesign.core.errors import ConfigurationError
from rewardesign.envs import gridworld
from rewardesign.envs.grid import GridState, joint_states, move
from tests.conftest import LEFT, RIGHT, STAY, UP, single


def test_moves_are_clamped_to_the_grid():
    state = GridState(((0, 0),), False)
    assert move(state, (LEFT,), 3, 2) == state
    assert move(state, (UP,), 3, 2) == GridState(((0, 1),), False)
    assert move(state, (RIGHT,), 1, 1) == state


def test_swaps_are_detected():
    state = GridState(((0, 0), (1, 0)), False)
    swapped = move(state, (RIGHT, LEFT), 2, 1)
    assert swapped == GridState(((1, 0), (0, 0)), True)
    assert not move(state, (STAY, RIGHT), 3, 1).crossed


def test_joint_state_space():
    assert len(joint_states(3, 1, 1)) == 3
    # due agenti: posizioni x flag di scambio
    assert len(joint_states(2, 2, 2)) == 2 * 16


def test_build_line(line_problem):
    assert line_problem.num_states == 3
    assert line_problem.initial_set == (single(0),)
    assert line_problem.terminal(single(2))
    line_problem.check_closure()


def test_constraint_flags_hazards_collisions_and_swaps():
    config = gridworld.GridworldConfig(
        width=3, num_agents=2, starts=[[(0, 0), (2, 0)]], goals=[(1, 0)], hazards=[(2, 0)], horizon=3
    )
    problem = gridworld.build(config)
    assert not problem.constraint.is_feasible(GridState(((0, 0), (2, 0)), False))
    assert not problem.constraint.is_feasible(GridState(((1, 0), (1, 0)), False))
    assert not problem.constraint.is_feasible(GridState(((0, 0), (1, 0)), True))
    assert problem.constraint.is_feasible(GridState(((0, 0), (1, 0)), False))


def test_config_validation():
    with pytest.raises(ConfigurationError) as e:
        gridworld.build(gridworld.GridworldConfig(width=3, starts=[[(0, 0)]], goals=[], horizon=3))
    assert e.value.key == "goals"
    with pytest.raises(ConfigurationError):
        gridworld.build(gridworld.GridworldConfig(width=3, starts=[[(5, 0)]], goals=[(1, 0)], horizon=3))
    with pytest.raises(ConfigurationError):
        gridworld.build(gridworld.GridworldConfig(width=3, num_agents=2, starts=[[(0, 0)]], goals=[(1, 0)], horizon=3))
    with pytest.raises(ValidationError):
        gridworld.GridworldConfig(width=3, starts=[[(0, 0)]], goals=[(1, 0)], horizon=3, unknown=1)


def test_guidance_bound_is_tight():
    config = gridworld.GridworldConfig(
        width=4, starts=[[(0, 0)]], goals=[(3, 0)], horizon=4, distance_weight=0.5, bonus=[(1, 0, 0.25)]
    )
    gf = gridworld.guidance(config)
    # |l| massimo in (0,0): 0.5·3
    assert gf.rho == math.nextafter(1.5, math.inf)
    assert gf(single(1), (STAY,)) == pytest.approx(-0.75)
    assert gf.check_bound(gridworld.build(config)) == 1.5


def test_guidance_defaults_to_unit_bound(line_config):
    gf = gridworld.guidance(line_config)
    assert gf.rho == 1.0
    assert gf(single(0), (STAY,)) == 0.0


def test_clean_time_avoids_hazards():
    config = gridworld.GridworldConfig(
        width=3, height=2, starts=[[(0, 0)]], goals=[(2, 0)], hazards=[(1, 0)], horizon=5
    )
    problem = gridworld.build(config)
    assert gridworld.clean_time(problem, single(0)) == 4
    blocked = gridworld.build(config.model_copy(update={"height": 1}))
    assert gridworld.clean_time(blocked, single(0)) is None
    short = gridworld.build(config.model_copy(update={"horizon": 3}))
    assert gridworld.clean_time(short, single(0)) is None


def test_clean_time_with_two_agents():
    config = gridworld.GridworldConfig(
        width=3, height=2, num_agents=2, starts=[[(0, 0), (2, 0)]], goals=[(1, 0), (1, 1)], horizon=4
    )
    problem = gridworld.build(config)
    # entrambi a un passo da (1,0): uno dei due passa per la riga superiore
    assert gridworld.clean_time(problem, problem.initial_set[0]) == 2
    one_goal = gridworld.build(config.model_copy(update={"goals": [(1, 0)]}))
    assert gridworld.clean_time(one_goal, one_goal.initial_set[0]) is None
