"""
Coverage control discretizzato: n agenti e n landmark su una griglia.

- terminale:  Σ_i min_k d_ik < coverage_threshold
- vincolo:    g(x) = safety_distance − min_{i<j} r_ij, ammissibile se g < budget
              (budget 0: ogni r_ij > safety_distance); uno scambio di celle
              conta come distanza 0
- guida:      l = sign·0.5·Σ_i min_k d_ik + 1.35

Le distanze sono euclidee sulle coordinate scalate di cell_scale.
"""

import itertools
import logging
import math
from typing import List

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

# Stato coverage: posizioni degli agenti + flag di scambio
CoverageState = GridState


class CoverageConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "coverage"
    grid_size: int = Field(default=5, ge=1)
    num_agents: int = Field(default=2, ge=1)
    landmark_positions: List[Cell] = Field(default_factory=lambda: [(0, 0), (4, 4)])
    coverage_threshold: float = Field(default=0.6, gt=0)
    safety_distance: float = Field(default=0.3, ge=0)
    horizon: int = Field(default=10, ge=1)
    cell_scale: float = Field(default=0.25, gt=0)
    initial_positions: List[List[Cell]] = Field(default_factory=lambda: [[(0, 2), (2, 0)], [(4, 2), (2, 4)]])
    cost_kind: CostKind = CostKind.MINIMUM_TIME
    # +1 formula letterale (cresce con la distanza), −1 guida verso la copertura
    guidance_sign: float = 1.0
    guidance_scale: float = Field(default=0.5, ge=0)
    guidance_offset: float = 1.35


def standard_config(**overrides) -> CoverageConfig:
    """
    Istanza standard: griglia 5x5, 2 agenti, landmark agli angoli (0,0) e (4,4),
    orizzonte 10.

    Entrambi gli agenti partono a due passi dallo stesso landmark: il percorso
    più breve li porta a coprirlo insieme. Con coverage_threshold 0.3 (non
    superiore a safety_distance) due agenti sullo stesso landmark hanno
    distanza < 0.3 e quindi violano il vincolo: la copertura pulita richiede
    che uno dei due raggiunga il landmark lontano (5 passi contro 2).
    """
    values = dict(coverage_threshold=0.3)
    values.update(overrides)
    return CoverageConfig(**values)


def micro_config(**overrides) -> CoverageConfig:
    """Micro-istanza per l'oracle: 3x3, agenti agli angoli opposti ai landmark."""
    values = dict(
        name="coverage_micro",
        grid_size=3,
        num_agents=2,
        landmark_positions=[(0, 0), (2, 2)],
        coverage_threshold=0.6,
        horizon=4,
        cell_scale=0.5,
        initial_positions=[[(0, 2), (2, 0)]],
    )
    values.update(overrides)
    return CoverageConfig(**values)


# ====================================================================
# GEOMETRIA
# ====================================================================


def _distance(a: Cell, b: Cell, scale: float) -> float:
    return scale * math.hypot(a[0] - b[0], a[1] - b[1])


def coverage_sum(config: CoverageConfig, state: CoverageState) -> float:
    """Σ_i min_k d_ik."""
    total = 0.0
    for p in state.positions:
        total += min(_distance(p, lm, config.cell_scale) for lm in config.landmark_positions)
    return total


def min_pairwise_distance(config: CoverageConfig, state: CoverageState) -> float:
    if state.crossed:
        return 0.0
    pairs = itertools.combinations(state.positions, 2)
    return min((_distance(a, b, config.cell_scale) for a, b in pairs), default=math.inf)


def max_coverage_sum(config: CoverageConfig) -> float:
    worst_cell = max(
        min(_distance(c, lm, config.cell_scale) for lm in config.landmark_positions)
        for c in cells(config.grid_size, config.grid_size)
    )
    return config.num_agents * worst_cell


# ====================================================================
# BUILDER
# ====================================================================


def _validate(config: CoverageConfig) -> None:
    size = config.grid_size
    landmarks = [tuple(lm) for lm in config.landmark_positions]
    if not landmarks:
        raise ConfigurationError("at least one landmark is required", key="landmark_positions")
    if len(set(landmarks)) != len(landmarks):
        raise ConfigurationError(f"landmarks must be distinct: {landmarks}", key="landmark_positions")
    for lm in landmarks:
        if not in_grid(lm, size, size):
            raise ConfigurationError(f"landmark {lm} outside the {size}x{size} grid", key="landmark_positions")
    if not config.initial_positions:
        raise ConfigurationError("initial_positions must be nonempty", key="initial_positions")
    for start in config.initial_positions:
        if len(start) != config.num_agents:
            raise ConfigurationError(f"initial configuration {start} must place {config.num_agents} agents", key="initial_positions")
        for c in start:
            if not in_grid(c, size, size):
                raise ConfigurationError(f"initial cell {c} outside the grid", key="initial_positions")


def build(config: CoverageConfig) -> ControlProblem:
    _validate(config)
    size = config.grid_size

    def dynamics(state: CoverageState, joint_action) -> CoverageState:
        return move(state, joint_action, size, size)

    def terminal(state: CoverageState) -> bool:
        return coverage_sum(config, state) < config.coverage_threshold

    def g(state: CoverageState) -> float:
        return config.safety_distance - min_pairwise_distance(config, state)

    def observe(state: CoverageState, agent: int):
        own = state.positions[agent]
        offsets = tuple((lm[0] - own[0], lm[1] - own[1]) for lm in config.landmark_positions)
        neighbors = tuple(p for i, p in enumerate(state.positions) if i != agent)
        return own, offsets, neighbors

    initial = []
    for start in config.initial_positions:
        s = CoverageState(tuple(tuple(c) for c in start), False)
        if s not in initial:
            initial.append(s)

    problem = ControlProblem(
        name=config.name,
        num_agents=config.num_agents,
        states=joint_states(size, size, config.num_agents),
        action_labels=ACTION_LABELS,
        dynamics=dynamics,
        initial_set=tuple(initial),
        terminal=terminal,
        constraint=ConstraintFunction(g, budget=0.0, strict=True),
        horizon=config.horizon,
        cost_kind=config.cost_kind,
        action_vectors=action_vectors(),
        stationary_action=STAY,
        observation_map=observe,
    )
    check_closure_if_small(problem)
    logger.info(f"Coverage problem '{config.name}': {problem.num_states} states, {problem.num_joint_actions} joint actions")
    return problem


# ====================================================================
# GUIDA
# ====================================================================


def guidance(config: CoverageConfig, state: CoverageState) -> float:
    return config.guidance_sign * config.guidance_scale * coverage_sum(config, state) + config.guidance_offset


def rho(config: CoverageConfig) -> float:
    """Limite stretto su |l|: appena sopra |sign|·0.5·(Σ massima) + |1.35|."""
    bound = abs(config.guidance_sign) * config.guidance_scale * max_coverage_sum(config) + abs(config.guidance_offset)
    return math.nextafter(bound, math.inf) if bound > 0 else 1.0


def guidance_function(config: CoverageConfig) -> GuidanceFunction:
    return GuidanceFunction(l=lambda state, joint_action: guidance(config, state), rho=rho(config))
