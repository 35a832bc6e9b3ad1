"""
Processo decisionale episodico costruito sopra un ControlProblem.

Regola del passo terminale: dopo ogni transizione l'episodio termina se
(1) lo stato successore soddisfa il vincolo terminale, altrimenti
(2) se viola il vincolo di stato, altrimenti (3) se t = horizon − 1.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, NamedTuple, Protocol, Sequence, Tuple, Union

from rewardesign.control.problem import ControlProblem, JointAction, State
from rewardesign.control.reward import RewardComponents, RewardScheme
from rewardesign.core.errors import DomainError, UsageError

logger = logging.getLogger(__name__)


class TerminationCause(str, Enum):
    TERMINAL_CONSTRAINT_MET = "terminal_constraint_met"
    STATE_CONSTRAINT_VIOLATED = "state_constraint_violated"
    HORIZON_EXHAUSTED = "horizon_exhausted"
    RUNNING = "running"


class AugmentedState(NamedTuple):
    control_state: State
    time: int


class Policy(Protocol):
    def act(self, problem: ControlProblem, aug_state: AugmentedState) -> JointAction: ...


@dataclass(frozen=True)
class StepRecord:
    state: AugmentedState
    joint_action: JointAction
    components: RewardComponents
    reward: float
    next_state: State


@dataclass(frozen=True)
class EpisodeTrace:
    initial_state: State
    steps: Tuple[StepRecord, ...]
    cause: TerminationCause
    discount: float

    def __post_init__(self):
        if self.cause == TerminationCause.RUNNING or not self.steps:
            raise UsageError("EpisodeTrace must describe a completed episode")

    @property
    def terminal_time(self) -> int:
        """Indice dell'ultimo passo (T_f)."""
        return len(self.steps) - 1

    @property
    def final_time(self) -> int:
        """Tempo dello stato finale (t_f): numero di transizioni."""
        return len(self.steps)

    @property
    def terminal_met(self) -> bool:
        return self.cause == TerminationCause.TERMINAL_CONSTRAINT_MET

    @property
    def violated(self) -> bool:
        # vincolo terminale e violazione possono coincidere all'ultimo passo
        return any(s.components.r_p < 0 for s in self.steps)

    @property
    def final_state(self) -> State:
        return self.steps[-1].next_state

    @property
    def rewards(self) -> Tuple[float, ...]:
        return tuple(s.reward for s in self.steps)

    @property
    def cumulative_cost(self) -> float:
        total = 0.0
        for s in self.steps:
            total += s.components.r_c
        return total

    @property
    def episode_return(self) -> float:
        return discounted_return(self, self.discount)


class EpisodeSummary(NamedTuple):
    """Riassunto minimo di un episodio, usato da metriche e convergenza."""

    terminal_met: bool
    violated: bool
    final_time: int
    cumulative_cost: float

    @classmethod
    def from_trace(cls, trace: EpisodeTrace) -> "EpisodeSummary":
        return cls(trace.terminal_met, trace.violated, trace.final_time, trace.cumulative_cost)


# ====================================================================
# OPERAZIONI
# ====================================================================


def step(
    problem: ControlProblem,
    aug_state: AugmentedState,
    joint_action: Sequence[int],
    cause: TerminationCause = TerminationCause.RUNNING,
) -> Tuple[AugmentedState, TerminationCause]:
    if cause != TerminationCause.RUNNING:
        raise UsageError(f"Cannot step a finished episode (cause={cause.value})")
    if aug_state.time >= problem.horizon:
        raise UsageError(f"Cannot step past the horizon (t={aug_state.time}, horizon={problem.horizon})")

    problem.check_state(aug_state.control_state)
    joint_action = problem.check_action(joint_action)
    next_state = problem.dynamics(aug_state.control_state, joint_action)
    next_aug = AugmentedState(next_state, aug_state.time + 1)

    if problem.terminal(next_state):
        return next_aug, TerminationCause.TERMINAL_CONSTRAINT_MET
    if not problem.constraint.is_feasible(next_state):
        return next_aug, TerminationCause.STATE_CONSTRAINT_VIOLATED
    if aug_state.time == problem.horizon - 1:
        return next_aug, TerminationCause.HORIZON_EXHAUSTED
    return next_aug, TerminationCause.RUNNING


def rollout(problem: ControlProblem, policy: Policy, initial_state: State, reward_config: RewardScheme) -> EpisodeTrace:
    if initial_state not in problem.initial_set:
        raise DomainError(f"Initial state {initial_state!r} is not in the initial set of '{problem.name}'")

    aug = AugmentedState(initial_state, 0)
    cause = TerminationCause.RUNNING
    records = []
    while cause == TerminationCause.RUNNING:
        joint_action = tuple(policy.act(problem, aug))
        next_aug, cause = step(problem, aug, joint_action)
        next_state = next_aug.control_state
        components = reward_config.components(
            problem,
            aug.control_state,
            joint_action,
            next_state,
            next_terminal=bool(problem.terminal(next_state)),
            next_feasible=problem.constraint.is_feasible(next_state),
        )
        records.append(StepRecord(aug, joint_action, components, reward_config.combine(components), next_state))
        aug = next_aug

    return EpisodeTrace(initial_state, tuple(records), cause, reward_config.discount)


def discounted_return(trace: Union[EpisodeTrace, Sequence[float]], discount: float) -> float:
    """Σ γ^t r_t, accumulato all'indietro (acc = r_t + γ·acc)."""
    if math.isnan(discount) or not 0 < discount <= 1:
        raise DomainError(f"discount must lie in (0, 1], got {discount}")
    rewards = trace.rewards if isinstance(trace, EpisodeTrace) else tuple(trace)
    acc = 0.0
    for r in reversed(rewards):
        acc = r + discount * acc
    return acc


def observation_key(problem: ControlProblem, aug_state: AugmentedState, agent: int) -> Hashable:
    """Chiave delle policy per agente: (agente, osservazione locale, t)."""
    return (agent, problem.observe(aug_state.control_state, agent), aug_state.time)
