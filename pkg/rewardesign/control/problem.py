"""
Problema di controllo ottimo vincolato a tempo finale libero, su spazi finiti.

Il ControlProblem raccoglie dinamica deterministica, insieme iniziale, vincolo
terminale, vincolo di stato (con budget), orizzonte e tipo di costo. È
immutabile dopo la costruzione: rollout concorrenti possono condividerlo.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, Hashable, Optional, Sequence, Tuple

import numpy as np

from rewardesign.core.errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

State = Hashable
JointAction = Tuple[int, ...]

# Oltre questa soglia di coppie (stato, azione congiunta) il check di chiusura viene saltato
CLOSURE_CHECK_LIMIT = 200_000


class CostKind(str, Enum):
    MINIMUM_TIME = "minimum_time"
    MINIMUM_FUEL = "minimum_fuel"
    MINIMUM_ACTION = "minimum_action"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ConstraintFunction:
    """
    Vincolo di stato g(x) con budget b: lo stato è ammissibile se g(x) <= b
    (oppure g(x) < b quando strict=True). Con b = +inf ogni stato è ammissibile.
    """

    g: Callable[[State], float]
    budget: float = 0.0
    strict: bool = False

    def __post_init__(self):
        if math.isnan(self.budget) or self.budget < 0:
            raise DomainError(f"Constraint budget must be >= 0 or +inf, got {self.budget}")

    def is_feasible(self, state: State) -> bool:
        if math.isinf(self.budget):
            return True
        value = self.g(state)
        if self.strict:
            return value < self.budget
        return value <= self.budget

    def with_budget(self, budget: float) -> "ConstraintFunction":
        return replace(self, budget=budget)


@dataclass(frozen=True, eq=False)
class ControlProblem:
    name: str
    num_agents: int
    states: Tuple[State, ...]
    action_labels: Tuple[str, ...]
    dynamics: Callable[[State, JointAction], State]
    initial_set: Tuple[State, ...]
    terminal: Callable[[State], bool]
    constraint: ConstraintFunction
    horizon: int
    cost_kind: CostKind = CostKind.MINIMUM_TIME
    # vettore di controllo u_i associato a ogni azione (serve al costo minimum-fuel)
    action_vectors: Optional[Tuple[Tuple[float, ...], ...]] = None
    # indice dell'azione "ferma" (serve al costo minimum-action)
    stationary_action: Optional[int] = None
    custom_cost: Optional[Callable[[State, JointAction], float]] = None
    observation_map: Optional[Callable[[State, int], Hashable]] = field(default=None)

    def __post_init__(self):
        if self.num_agents < 1:
            raise ConfigurationError(f"num_agents must be positive, got {self.num_agents}")
        if self.horizon < 1:
            raise ConfigurationError(f"horizon must be >= 1, got {self.horizon}")
        if not self.action_labels:
            raise ConfigurationError("action space per agent is empty")
        if not self.initial_set:
            raise ConfigurationError("initial_set must be nonempty")
        unknown = [s for s in self.initial_set if s not in self.state_index]
        if unknown:
            raise ConfigurationError(f"initial_set contains states outside state_space: {unknown[:3]}")
        if self.cost_kind == CostKind.MINIMUM_FUEL:
            if self.action_vectors is None or len(self.action_vectors) != len(self.action_labels):
                raise ConfigurationError("minimum-fuel cost needs one control vector per action")
        if self.cost_kind == CostKind.MINIMUM_ACTION:
            if self.stationary_action is None or not 0 <= self.stationary_action < len(self.action_labels):
                raise ConfigurationError("minimum-action cost needs a valid stationary action index")
        if self.cost_kind == CostKind.CUSTOM and self.custom_cost is None:
            raise ConfigurationError("custom cost kind needs a cost function")

    # -----------------------------
    # ENUMERAZIONI
    # -----------------------------

    @cached_property
    def state_index(self) -> Dict[State, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def joint_actions(self) -> Tuple[JointAction, ...]:
        """Azioni congiunte in ordine lessicografico: l'indice è anche l'ordine di tie-break."""
        return tuple(itertools.product(range(len(self.action_labels)), repeat=self.num_agents))

    @cached_property
    def joint_action_index(self) -> Dict[JointAction, int]:
        return {a: i for i, a in enumerate(self.joint_actions)}

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_joint_actions(self) -> int:
        return len(self.joint_actions)

    # -----------------------------
    # VALIDAZIONI
    # -----------------------------

    def check_state(self, state: State) -> int:
        try:
            return self.state_index[state]
        except (KeyError, TypeError):
            raise DomainError(f"Unknown state for problem '{self.name}': {state!r}")

    def check_action(self, joint_action: Sequence[int]) -> JointAction:
        joint_action = tuple(joint_action)
        if len(joint_action) != self.num_agents:
            raise DomainError(f"Joint action {joint_action} has {len(joint_action)} entries, expected {self.num_agents}")
        for agent, a in enumerate(joint_action):
            if not isinstance(a, (int, np.integer)) or not 0 <= a < len(self.action_labels):
                raise DomainError(f"Invalid action {a!r} for agent {agent}")
        return joint_action

    def check_closure(self) -> None:
        """La dinamica deve essere totale e chiusa su state_space (verifica esaustiva)."""
        for s in self.states:
            for a in self.joint_actions:
                nxt = self.dynamics(s, a)
                if nxt not in self.state_index:
                    raise ConfigurationError(f"dynamics leaves the state space: {s!r} --{a}--> {nxt!r}")

    # -----------------------------
    # VARIANTI
    # -----------------------------

    def with_budget(self, budget: float) -> "ControlProblem":
        return replace(self, constraint=self.constraint.with_budget(budget))

    def relaxed(self) -> "ControlProblem":
        """Stesso problema senza vincolo di stato (budget = +inf)."""
        return self.with_budget(math.inf)

    def with_cost(self, cost_kind: CostKind, custom_cost=None) -> "ControlProblem":
        return replace(self, cost_kind=cost_kind, custom_cost=custom_cost or self.custom_cost)

    def observe(self, state: State, agent: int) -> Hashable:
        if self.observation_map is None:
            return state
        return self.observation_map(state, agent)


def check_closure_if_small(problem: ControlProblem) -> None:
    pairs = problem.num_states * problem.num_joint_actions
    if pairs <= CLOSURE_CHECK_LIMIT:
        problem.check_closure()
    else:
        logger.debug(f"Closure check skipped for '{problem.name}' ({pairs} pairs)")


# ====================================================================
# OPERAZIONI
# ====================================================================


def evaluate_cost(problem: ControlProblem, state: State, joint_action: Sequence[int]) -> float:
    """Costo c(x(t), u(t)) secondo il cost_kind del problema; sempre >= 0."""
    problem.check_state(state)
    joint_action = problem.check_action(joint_action)

    if problem.cost_kind == CostKind.MINIMUM_TIME:
        return 1.0
    if problem.cost_kind == CostKind.MINIMUM_FUEL:
        u = np.concatenate([np.asarray(problem.action_vectors[a], dtype=float) for a in joint_action])
        return float(np.linalg.norm(u, ord=2))
    if problem.cost_kind == CostKind.MINIMUM_ACTION:
        return float(sum(1 for a in joint_action if a != problem.stationary_action))

    value = float(problem.custom_cost(state, joint_action))
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"Custom cost must be a finite nonnegative real, got {value} at {state!r}, {joint_action}")
    return value


def is_feasible_state(problem: ControlProblem, state: State) -> bool:
    problem.check_state(state)
    return problem.constraint.is_feasible(state)


def is_terminal_state(problem: ControlProblem, state: State) -> bool:
    problem.check_state(state)
    return bool(problem.terminal(state))
