"""
Solver per la coppia (problema, schema di reward).

- exact_dp: induzione all'indietro sugli stati aumentati (x, t)
- q_learning: Q tabellare sulle azioni congiunte, esplorazione ε-greedy lineare

Entrambi leggono un TransitionModel precalcolato (successori, componenti del
reward, flag di terminazione per ogni coppia stato/azione congiunta). Il
tie-break è sempre l'azione congiunta di indice più basso.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Hashable, NamedTuple, Optional, Protocol, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from rewardesign.control.pomdp import (
    AugmentedState,
    EpisodeSummary,
    TerminationCause,
    observation_key,
    rollout,
)
from rewardesign.control.problem import ControlProblem, JointAction, State
from rewardesign.control.reward import RewardComponents, RewardScheme, WeightVector
from rewardesign.core.errors import CapacityError, ConfigurationError, NumericalError
from rewardesign.core.settings import settings

logger = logging.getLogger(__name__)

SampleCallback = Callable[[int, np.ndarray], None]


# ====================================================================
# TABELLE
# ====================================================================


class PolicyScope(str, Enum):
    CENTRALIZED = "centralized"
    PER_AGENT = "per_agent"


@dataclass(frozen=True)
class PolicyTable:
    """
    Policy deterministica.

    CENTRALIZED: chiave (stato, t) -> azione congiunta
    PER_AGENT:   chiave (agente, osservazione, t) -> azione del singolo agente
    """

    mapping: Dict[Hashable, Any]
    scope: PolicyScope = PolicyScope.CENTRALIZED

    def __len__(self) -> int:
        return len(self.mapping)

    def act(self, problem: ControlProblem, aug_state: AugmentedState) -> JointAction:
        state, t = aug_state
        if self.scope == PolicyScope.CENTRALIZED:
            try:
                return self.mapping[(state, t)]
            except KeyError:
                raise ConfigurationError(f"Policy undefined at observation {(state, t)!r}")

        actions = []
        for agent in range(problem.num_agents):
            key = observation_key(problem, aug_state, agent)
            try:
                actions.append(self.mapping[key])
            except KeyError:
                raise ConfigurationError(f"Policy undefined at observation {key!r}")
        return tuple(actions)

    @classmethod
    def from_actions(cls, problem: ControlProblem, actions: np.ndarray) -> "PolicyTable":
        """Da una matrice (horizon, |S|) di indici di azione congiunta."""
        joint = problem.joint_actions
        mapping = {}
        for t, row in enumerate(actions.tolist()):
            for s, a in enumerate(row):
                mapping[(problem.states[s], t)] = joint[a]
        return cls(mapping)

    def to_actions(self, problem: ControlProblem) -> np.ndarray:
        if self.scope != PolicyScope.CENTRALIZED:
            raise ConfigurationError("Only centralized policies can be tabulated by state")
        out = np.empty((problem.horizon, problem.num_states), dtype=np.int64)
        for t in range(problem.horizon):
            for s, state in enumerate(problem.states):
                key = (state, t)
                if key not in self.mapping:
                    raise ConfigurationError(f"Policy undefined at observation {key!r}")
                out[t, s] = problem.joint_action_index[tuple(self.mapping[key])]
        return out


@dataclass(frozen=True)
class ValueTable:
    """Valori ottimi V[t, s] per t in [0, horizon)."""

    problem: ControlProblem
    values: np.ndarray

    def value(self, state: State, t: int = 0) -> float:
        return float(self.values[t, self.problem.check_state(state)])

    def bellman_residual(self, model: "TransitionModel") -> float:
        horizon = self.values.shape[0]
        worst = 0.0
        for t in range(horizon):
            q = model.q_values(self.values[t + 1] if t + 1 < horizon else None)
            worst = max(worst, float(np.max(np.abs(q.max(axis=1) - self.values[t]))))
        return worst


# ====================================================================
# MODELLO DI TRANSIZIONE
# ====================================================================


class TransitionModel:
    """Tabelle (|S|, |A|) di successori, componenti del reward e flag di terminazione."""

    def __init__(self, problem: ControlProblem, scheme: Optional[RewardScheme] = None):
        pairs = problem.num_states * problem.num_joint_actions
        if pairs > settings.DP_CAP:
            raise CapacityError("Transition table exceeds DP_CAP", size=pairs)

        self.problem = problem
        S, A = problem.num_states, problem.num_joint_actions
        index = problem.state_index
        state_terminal = np.array([bool(problem.terminal(s)) for s in problem.states], dtype=bool)
        state_feasible = np.array([problem.constraint.is_feasible(s) for s in problem.states], dtype=bool)

        succ = np.empty((S, A), dtype=np.int64)
        r_g = np.zeros((S, A))
        r_c = np.empty((S, A))
        probe = scheme or RewardScheme(WeightVector(alpha=1.0))
        for i, state in enumerate(problem.states):
            for j, joint_action in enumerate(problem.joint_actions):
                nxt = problem.dynamics(state, joint_action)
                k = index.get(nxt)
                if k is None:
                    raise ConfigurationError(f"dynamics leaves the state space: {state!r} --{joint_action}--> {nxt!r}")
                succ[i, j] = k
                comps = probe.components(
                    problem, state, joint_action, nxt, bool(state_terminal[k]), bool(state_feasible[k])
                )
                r_g[i, j] = comps.r_g
                r_c[i, j] = comps.r_c

        self.succ = succ
        self.next_terminal = state_terminal[succ]
        self.next_violated = ~state_feasible[succ]
        self.done = self.next_terminal | self.next_violated
        self.r_a = self.next_terminal.astype(float)
        self.r_p = np.where(self.next_violated, -1.0, 0.0)
        self.r_g = r_g
        self.r_c = r_c
        self.scheme = probe
        self.reward = self._rewards(probe)
        logger.debug(f"TransitionModel built for '{problem.name}' ({S} states x {A} joint actions)")

    def _rewards(self, scheme: RewardScheme) -> np.ndarray:
        r_g = self.r_g if scheme.guidance is not None else np.zeros_like(self.r_g)
        return np.asarray(scheme.combine(RewardComponents(self.r_a, r_g, self.r_p, self.r_c)), dtype=float)

    def with_scheme(self, scheme: RewardScheme) -> "TransitionModel":
        """Stesse transizioni, reward ricalcolato (la funzione di guida deve essere la stessa)."""
        if (scheme.guidance is None) != (self.scheme.guidance is None) or (
            scheme.guidance is not None and scheme.guidance is not self.scheme.guidance
        ):
            return TransitionModel(self.problem, scheme)
        clone = object.__new__(TransitionModel)
        clone.__dict__.update(self.__dict__)
        clone.scheme = scheme
        clone.reward = self._rewards(scheme)
        return clone

    def q_values(self, next_values: Optional[np.ndarray]) -> np.ndarray:
        """Q(s, a) = R(s, a) + γ·V_next(succ), con continuazione nulla sulle transizioni terminali."""
        if next_values is None:
            cont = np.zeros_like(self.reward)
        else:
            cont = np.where(self.done, 0.0, next_values[self.succ])
        return self.reward + self.scheme.discount * cont

    def summarize(self, actions: np.ndarray, start: int) -> EpisodeSummary:
        """Rollout veloce della policy tabellare `actions` dallo stato di indice `start`."""
        horizon = self.problem.horizon
        s, cost = start, 0.0
        for t in range(horizon):
            a = int(actions[t, s])
            cost += float(self.r_c[s, a])
            if self.done[s, a] or t == horizon - 1:
                return EpisodeSummary(bool(self.next_terminal[s, a]), bool(self.next_violated[s, a]), t + 1, cost)
            s = int(self.succ[s, a])
        raise AssertionError("unreachable")

    def path_return(self, actions: np.ndarray, start: int) -> float:
        horizon = self.problem.horizon
        rewards, s = [], start
        for t in range(horizon):
            a = int(actions[t, s])
            rewards.append(float(self.reward[s, a]))
            if self.done[s, a] or t == horizon - 1:
                break
            s = int(self.succ[s, a])
        acc = 0.0
        for r in reversed(rewards):
            acc = r + self.scheme.discount * acc
        return acc


def model_for(problem: ControlProblem, scheme: RewardScheme, model: Optional[TransitionModel]) -> TransitionModel:
    if model is None:
        return TransitionModel(problem, scheme)
    if model.problem is not problem:
        raise ConfigurationError("TransitionModel was built for a different problem")
    return model.with_scheme(scheme)


# ====================================================================
# PROGRAMMAZIONE DINAMICA ESATTA
# ====================================================================


def exact_dp(
    problem: ControlProblem,
    reward_scheme: RewardScheme,
    weights: Optional[WeightVector] = None,
    model: Optional[TransitionModel] = None,
    cap: Optional[int] = None,
) -> Tuple[PolicyTable, ValueTable]:
    cap = settings.DP_CAP if cap is None else cap
    size = problem.num_states * problem.horizon * problem.num_joint_actions
    if size > cap:
        raise CapacityError("Exact DP table exceeds capacity", size=size)

    scheme = reward_scheme.with_weights(weights) if weights is not None else reward_scheme
    model = model_for(problem, scheme, model)
    actions, values, _ = _backward_induction(model)
    return PolicyTable.from_actions(problem, actions), ValueTable(problem, values)


def _backward_induction(model: TransitionModel) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Azioni greedy (horizon, |S|), valori (horizon, |S|) e tabella Q ottima (horizon, |S|, |A|)."""
    horizon, S = model.problem.horizon, model.problem.num_states
    values = np.zeros((horizon, S))
    actions = np.zeros((horizon, S), dtype=np.int64)
    q_table = np.zeros((horizon, S, model.problem.num_joint_actions))
    rows = np.arange(S)
    next_values = None
    for t in range(horizon - 1, -1, -1):
        q = model.q_values(next_values)
        best = np.argmax(q, axis=1)
        q_table[t] = q
        actions[t] = best
        values[t] = q[rows, best]
        next_values = values[t]
    return actions, values, q_table


# ====================================================================
# Q-LEARNING TABELLARE
# ====================================================================


class QLearningParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    episodes: int = Field(default=5000, ge=0)
    learning_rate: float = Field(default=1.0, gt=0, le=1)
    epsilon_start: float = Field(default=1.0, ge=0, le=1)
    epsilon_end: float = Field(default=0.05, ge=0, le=1)
    # frazione degli episodi su cui ε decresce linearmente
    decay_fraction: float = Field(default=0.8, gt=0, le=1)
    seed: int = 0
    sample_every: int = Field(default=0, ge=0)


@dataclass
class QLearningResult:
    policy: PolicyTable
    q: np.ndarray
    actions: np.ndarray


def greedy_actions(q: np.ndarray) -> np.ndarray:
    return np.argmax(q, axis=2)


def exploration_rate(params: QLearningParams, episode: int) -> float:
    decay = params.decay_fraction * params.episodes
    if decay <= 0:
        return params.epsilon_end
    frac = min(1.0, episode / decay)
    return params.epsilon_start + (params.epsilon_end - params.epsilon_start) * frac


def q_learning(
    problem: ControlProblem,
    reward_scheme: RewardScheme,
    hyperparams: QLearningParams,
    weights: Optional[WeightVector] = None,
    initial_q: Optional[np.ndarray] = None,
    on_sample: Optional[SampleCallback] = None,
    model: Optional[TransitionModel] = None,
    stream: int = 0,
) -> QLearningResult:
    scheme = reward_scheme.with_weights(weights) if weights is not None else reward_scheme
    model = model_for(problem, scheme, model)
    horizon, S, A = problem.horizon, problem.num_states, problem.num_joint_actions

    if initial_q is not None:
        if initial_q.shape != (horizon, S, A):
            raise ConfigurationError(f"Warm-start Q table has shape {initial_q.shape}, expected {(horizon, S, A)}")
        q = np.array(initial_q, dtype=float, copy=True)
    else:
        q = np.zeros((horizon, S, A))

    rng = np.random.default_rng([hyperparams.seed, stream])
    starts = [problem.state_index[s] for s in problem.initial_set]
    succ = model.succ.tolist()
    reward = model.reward.tolist()
    done = model.done.tolist()
    gamma = scheme.discount
    lr = hyperparams.learning_rate

    for episode in range(hyperparams.episodes):
        eps = exploration_rate(hyperparams, episode)
        s = starts[int(rng.integers(len(starts)))]
        for t in range(horizon):
            if rng.random() < eps:
                a = int(rng.integers(A))
            else:
                a = int(np.argmax(q[t, s]))
            nxt = succ[s][a]
            last = done[s][a] or t == horizon - 1
            cont = 0.0 if last else float(q[t + 1, nxt].max())
            target = reward[s][a] + gamma * cont
            if lr == 1.0:
                updated = target
            else:
                updated = float(q[t, s, a]) + lr * (target - float(q[t, s, a]))
            if not math.isfinite(updated):
                entry = (t, problem.states[s], problem.joint_actions[a])
                raise NumericalError(f"Non-finite Q value {updated} at {entry}", entry=entry)
            q[t, s, a] = updated
            if last:
                break
            s = nxt

        if on_sample is not None and hyperparams.sample_every and (episode + 1) % hyperparams.sample_every == 0:
            on_sample(episode + 1, greedy_actions(q))

    actions = greedy_actions(q)
    if on_sample is not None and (not hyperparams.sample_every or hyperparams.episodes % hyperparams.sample_every):
        on_sample(hyperparams.episodes, actions)
    return QLearningResult(PolicyTable.from_actions(problem, actions), q, actions)


# ====================================================================
# VALUTAZIONE
# ====================================================================


class StateOutcome(NamedTuple):
    episode_return: float
    cause: TerminationCause
    terminal_met: bool
    violated: bool
    final_time: int
    cumulative_cost: float


@dataclass
class PolicyEvaluation:
    outcomes: Dict[State, StateOutcome]

    @property
    def all_terminal(self) -> bool:
        return all(o.terminal_met for o in self.outcomes.values())

    @property
    def any_violation(self) -> bool:
        return any(o.violated for o in self.outcomes.values())

    @property
    def clean(self) -> bool:
        return self.all_terminal and not self.any_violation

    def failing_states(self):
        return [s for s, o in self.outcomes.items() if o.violated or not o.terminal_met]

    def to_frame(self) -> pd.DataFrame:
        rows = [{"initial_state": str(s), **o._asdict()} for s, o in self.outcomes.items()]
        df = pd.DataFrame(rows)
        if not df.empty:
            df["cause"] = df["cause"].map(lambda c: c.value)
        return df


def evaluate_policy(problem: ControlProblem, policy: PolicyTable, reward_scheme: RewardScheme) -> PolicyEvaluation:
    outcomes = {}
    for s0 in problem.initial_set:
        trace = rollout(problem, policy, s0, reward_scheme)
        outcomes[s0] = StateOutcome(
            episode_return=trace.episode_return,
            cause=trace.cause,
            terminal_met=trace.terminal_met,
            violated=trace.violated,
            final_time=trace.final_time,
            cumulative_cost=trace.cumulative_cost,
        )
    return PolicyEvaluation(outcomes)


def decentralize(policy: PolicyTable, problem: ControlProblem) -> PolicyTable:
    """Proietta una policy centralizzata su tabelle per agente (agente, osservazione, t)."""
    if policy.scope == PolicyScope.PER_AGENT:
        return policy

    mapping: Dict[Hashable, int] = {}
    for s0 in problem.initial_set:
        aug = AugmentedState(s0, 0)
        for _ in range(problem.horizon):
            joint_action = policy.act(problem, aug)
            for agent, a in enumerate(joint_action):
                key = observation_key(problem, aug, agent)
                if mapping.setdefault(key, a) != a:
                    raise ConfigurationError(f"Observation {key!r} needs different actions; policy is not decentralizable")
            nxt = problem.dynamics(aug.control_state, joint_action)
            if problem.terminal(nxt) or not problem.constraint.is_feasible(nxt):
                break
            aug = AugmentedState(nxt, aug.time + 1)
    return PolicyTable(mapping, PolicyScope.PER_AGENT)


# ====================================================================
# TRAINER
# ====================================================================


@dataclass
class TrainOutcome:
    policy: PolicyTable
    actions: np.ndarray
    q: Optional[np.ndarray] = None
    value: Optional[ValueTable] = None


class Trainer(Protocol):
    name: str

    def train(
        self,
        problem: ControlProblem,
        scheme: RewardScheme,
        episodes: int,
        stage_index: int,
        warm_start: Optional[TrainOutcome] = None,
        on_sample: Optional[SampleCallback] = None,
    ) -> TrainOutcome: ...


class ExactTrainer:
    """
    Ogni stage risolto con exact_dp: il warm start non serve. Restituisce anche
    la tabella Q ottima, da cui un QLearningTrainer successivo può ripartire.
    """

    name = "exact"

    def train(self, problem, scheme, episodes, stage_index, warm_start=None, on_sample=None) -> TrainOutcome:
        size = problem.num_states * problem.horizon * problem.num_joint_actions
        if size > settings.DP_CAP:
            raise CapacityError("Exact DP table exceeds capacity", size=size)
        actions, values, q = _backward_induction(TransitionModel(problem, scheme))
        if on_sample is not None:
            on_sample(episodes, actions)
        return TrainOutcome(PolicyTable.from_actions(problem, actions), actions, q=q, value=ValueTable(problem, values))


class QLearningTrainer:
    name = "q_learning"

    def __init__(self, params: QLearningParams):
        self.params = params

    def train(self, problem, scheme, episodes, stage_index, warm_start=None, on_sample=None) -> TrainOutcome:
        params = self.params.model_copy(update={"episodes": episodes})
        initial_q = warm_start.q if warm_start is not None else None
        if warm_start is not None and initial_q is None:
            logger.warning(f"Q-learning stage {stage_index}: the previous stage left no Q table, starting from zeros")
        result = q_learning(problem, scheme, params, initial_q=initial_q, on_sample=on_sample, stream=stage_index)
        logger.info(f"Q-learning stage {stage_index}: {episodes} episodes (seed={params.seed})")
        return TrainOutcome(result.policy, result.actions, q=result.q)
