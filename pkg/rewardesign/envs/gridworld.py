"""
Gridworld piccoli per l'oracle, i testimoni di necessità dei limiti e gli
esempi del solver esatto.

- terminale: ogni agente su una cella goal
- vincolo di stato g(x) = 1 se un agente è su un hazard, due agenti
  condividono una cella o si sono scambiati di posto; altrimenti 0 (budget 0)
- guida: l = −w·Σ_i manhattan(agente_i, goal più vicino) + Σ_i bonus[cella_i]
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from rewardesign.control.problem import ConstraintFunction, ControlProblem, CostKind, check_closure_if_small
from rewardesign.control.reward import GuidanceFunction
from rewardesign.core.errors import ConfigurationError
from rewardesign.envs.grid import (
    ACTION_LABELS,
    STAY,
    Cell,
    GridState,
    action_vectors,
    cells,
    in_grid,
    joint_states,
    move,
)

logger = logging.getLogger(__name__)

TWO_AGENT_SHARE = 0.25


class GridworldConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "gridworld"
    width: int = Field(ge=1)
    height: int = Field(default=1, ge=1)
    num_agents: int = Field(default=1, ge=1)
    # ogni elemento è una configurazione iniziale congiunta (una cella per agente)
    starts: List[List[Cell]]
    goals: List[Cell]
    hazards: List[Cell] = Field(default_factory=list)
    horizon: int = Field(ge=1)
    cost_kind: CostKind = CostKind.MINIMUM_TIME
    distance_weight: float = Field(default=0.0, ge=0)
    # (x, y, valore)
    bonus: List[Tuple[int, int, float]] = Field(default_factory=list)


def _validate(config: GridworldConfig) -> None:
    if not config.goals:
        raise ConfigurationError("gridworld needs at least one goal", key="goals")
    for key, group in (("goals", config.goals), ("hazards", config.hazards)):
        for c in group:
            if not in_grid(c, config.width, config.height):
                raise ConfigurationError(f"cell {c} outside the {config.width}x{config.height} grid", key=key)
    if not config.starts:
        raise ConfigurationError("gridworld needs at least one start configuration", key="starts")
    for start in config.starts:
        if len(start) != config.num_agents:
            raise ConfigurationError(f"start {start} must place {config.num_agents} agents", key="starts")
        for c in start:
            if not in_grid(c, config.width, config.height):
                raise ConfigurationError(f"start cell {c} outside the grid", key="starts")


def build(config: GridworldConfig) -> ControlProblem:
    _validate(config)
    width, height = config.width, config.height
    goals = frozenset(tuple(g) for g in config.goals)
    hazards = frozenset(tuple(h) for h in config.hazards)
    n = config.num_agents

    def dynamics(state: GridState, joint_action) -> GridState:
        return move(state, joint_action, width, height)

    def terminal(state: GridState) -> bool:
        return all(p in goals for p in state.positions)

    def g(state: GridState) -> float:
        unsafe = state.crossed or len(set(state.positions)) < n or any(p in hazards for p in state.positions)
        return 1.0 if unsafe else 0.0

    initial = []
    for start in config.starts:
        s = GridState(tuple(tuple(c) for c in start), False)
        if s not in initial:
            initial.append(s)

    problem = ControlProblem(
        name=config.name,
        num_agents=n,
        states=joint_states(width, height, n),
        action_labels=ACTION_LABELS,
        dynamics=dynamics,
        initial_set=tuple(initial),
        terminal=terminal,
        constraint=ConstraintFunction(g, budget=0.0),
        horizon=config.horizon,
        cost_kind=config.cost_kind,
        action_vectors=action_vectors(),
        stationary_action=STAY,
    )
    check_closure_if_small(problem)
    return problem


def guidance(config: GridworldConfig) -> GuidanceFunction:
    goals = [tuple(g) for g in config.goals]
    bonus: Dict[Cell, float] = {}
    for x, y, value in config.bonus:
        bonus[(x, y)] = bonus.get((x, y), 0.0) + value
    w = config.distance_weight

    def cell_value(c: Cell) -> float:
        nearest = min(abs(c[0] - gx) + abs(c[1] - gy) for gx, gy in goals)
        return -w * nearest + bonus.get(c, 0.0)

    def l(state: GridState, joint_action) -> float:
        total = 0.0
        for p in state.positions:
            total += cell_value(p)
        return total

    # |l| massimo valutato con la stessa funzione su tutti gli stati
    worst = max(abs(l(s, None)) for s in joint_states(config.width, config.height, config.num_agents))
    rho = math.nextafter(worst, math.inf) if worst > 0 else 1.0
    return GuidanceFunction(l=l, rho=rho)


# ====================================================================
# ISTANZE CASUALI
# ====================================================================


def clean_time(problem: ControlProblem, start: GridState) -> Optional[int]:
    """
    Tempo minimo di una traccia che raggiunge il terminale senza mai violare il
    vincolo (BFS sugli stati congiunti entro l'orizzonte); None se non esiste.
    """
    seen = {start}
    frontier = [start]
    for t in range(1, problem.horizon + 1):
        nxt_frontier = []
        for state in frontier:
            for joint_action in problem.joint_actions:
                nxt = problem.dynamics(state, joint_action)
                if not problem.constraint.is_feasible(nxt):
                    continue
                if problem.terminal(nxt):
                    return t
                if nxt not in seen:
                    seen.add(nxt)
                    nxt_frontier.append(nxt)
        frontier = nxt_frontier
    return None


def _random_candidate(rng: np.random.Generator, max_width: int, max_height: int) -> Optional[GridworldConfig]:
    kinds = [CostKind.MINIMUM_TIME, CostKind.MINIMUM_ACTION, CostKind.MINIMUM_FUEL]
    # due agenti: griglia 3x2 e orizzonte <= 4, al più 25^4 sequenze da enumerare
    if rng.random() < TWO_AGENT_SHARE:
        n, width, height = 2, 3, 2
        horizon = int(rng.integers(3, 5))
        n_goals = 2
        n_hazards = int(rng.integers(0, 2))
    else:
        n = 1
        width = int(rng.integers(2, max_width + 1))
        height = int(rng.integers(1, max_height + 1))
        horizon = int(rng.integers(3, 6))
        n_goals = int(rng.integers(1, 3))
        n_hazards = int(rng.integers(0, 4))

    grid = cells(width, height)
    if n_goals > len(grid):
        return None
    goals = [grid[i] for i in rng.choice(len(grid), size=n_goals, replace=False)]
    n_hazards = min(n_hazards, len(grid) - 1)
    hazards = [grid[i] for i in rng.choice(len(grid), size=n_hazards, replace=False)]
    free = [c for c in grid if c not in goals and c not in hazards]
    if len(free) < n:
        return None
    start = [free[i] for i in rng.choice(len(free), size=n, replace=False)]
    bonus_cell = grid[int(rng.integers(len(grid)))]
    return GridworldConfig(
        name="random_gridworld" if n == 1 else "random_gridworld_2a",
        width=width,
        height=height,
        num_agents=n,
        starts=[start],
        goals=goals,
        hazards=hazards,
        horizon=horizon,
        cost_kind=kinds[int(rng.integers(len(kinds)))],
        distance_weight=round(float(rng.uniform(0.0, 1.0)), 3),
        bonus=[(bonus_cell[0], bonus_cell[1], round(float(rng.uniform(-1.0, 1.0)), 3))],
    )


def random_config(rng: np.random.Generator, max_width: int = 4, max_height: int = 3, max_tries: int = 1000) -> GridworldConfig:
    """Istanza casuale a uno o due agenti con almeno una traccia che soddisfa entrambi i vincoli da ogni start."""
    for _ in range(max_tries):
        config = _random_candidate(rng, max_width, max_height)
        if config is None:
            continue
        problem = build(config)
        if all(clean_time(problem, s) is not None for s in problem.initial_set):
            return config
    raise ConfigurationError(f"no feasible random gridworld found in {max_tries} tries")


# ====================================================================
# TESTIMONI DI NECESSITÀ DEI LIMITI
# ====================================================================


def shortcut_witness() -> GridworldConfig:
    """Goal pericoloso a un passo, goal sicuro a quattro: con λ troppo basso conviene la scorciatoia."""
    return GridworldConfig(
        name="shortcut_witness",
        width=8,
        starts=[[(3, 0)]],
        goals=[(2, 0), (7, 0)],
        hazards=[(2, 0)],
        horizon=6,
        cost_kind=CostKind.MINIMUM_ACTION,
    )


def dead_end_witness() -> GridworldConfig:
    """Bonus di guida su un vicolo cieco: con β troppo alto conviene restarci."""
    return GridworldConfig(
        name="dead_end_witness",
        width=5,
        starts=[[(1, 0)]],
        goals=[(4, 0)],
        horizon=3,
        cost_kind=CostKind.MINIMUM_TIME,
        bonus=[(0, 0, 1.0)],
    )


def costly_goal_witness() -> GridworldConfig:
    """Goal a due mosse: con μ sotto −α/τ conviene restare fermi."""
    return GridworldConfig(
        name="costly_goal_witness",
        width=3,
        starts=[[(0, 0)]],
        goals=[(2, 0)],
        horizon=3,
        cost_kind=CostKind.MINIMUM_ACTION,
    )
