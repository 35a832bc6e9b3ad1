import pytest

from rewardesign.control.problem import ConstraintFunction, ControlProblem, CostKind
from rewardesign.envs import coverage, gridworld
from rewardesign.envs.grid import GridState

RIGHT, LEFT, UP, STAY = 3, 2, 0, 4


class ConstantPolicy:
    """Stessa azione congiunta a ogni passo."""

    def __init__(self, *joint_action: int):
        self.joint_action = tuple(joint_action)

    def act(self, problem, aug_state):
        return self.joint_action


@pytest.fixture
def constant_policy():
    return ConstantPolicy


def single(x: int, y: int = 0) -> GridState:
    return GridState(((x, y),), False)


def two_action_line(**overrides) -> ControlProblem:
    """Linea 0..2 con azioni sinistra/destra, goal in 2."""
    values = dict(
        name="line2",
        num_agents=1,
        states=(0, 1, 2),
        action_labels=("left", "right"),
        dynamics=lambda s, a: max(s - 1, 0) if a[0] == 0 else min(s + 1, 2),
        initial_set=(0,),
        terminal=lambda s: s == 2,
        constraint=ConstraintFunction(lambda s: 0.0),
        horizon=3,
    )
    values.update(overrides)
    return ControlProblem(**values)


@pytest.fixture
def line_config():
    """Linea di 3 celle, goal a due passi dalla partenza."""
    return gridworld.GridworldConfig(name="line", width=3, starts=[[(0, 0)]], goals=[(2, 0)], horizon=3)


@pytest.fixture
def line_problem(line_config):
    return gridworld.build(line_config)


@pytest.fixture
def blocked_problem():
    """Corridoio bloccato: l'unico percorso verso il goal passa per un hazard."""
    config = gridworld.GridworldConfig(
        name="blocked", width=3, starts=[[(0, 0)]], goals=[(2, 0)], hazards=[(1, 0)], horizon=3
    )
    return gridworld.build(config)


@pytest.fixture
def hazard_goal_config():
    """Goal pericoloso a un passo, goal sicuro a tre passi."""
    return gridworld.GridworldConfig(
        name="hazard_goal",
        width=5,
        starts=[[(1, 0)]],
        goals=[(0, 0), (4, 0)],
        hazards=[(0, 0)],
        horizon=4,
        cost_kind=CostKind.MINIMUM_TIME,
    )


@pytest.fixture
def micro_coverage():
    config = coverage.micro_config()
    return config, coverage.build(config)


@pytest.fixture
def standard_coverage():
    config = coverage.standard_config()
    return config, coverage.build(config)
