"""
Stima dei parametri a priori τ e t_c eseguendo una policy da ogni stato iniziale.

τ    massimo, sugli stati iniziali, del costo cumulato di una policy che
     rispetta entrambi i vincoli
t_c  minimo, sugli stati iniziali, del tempo finale della policy minimum-time
     addestrata senza vincolo di stato
"""

import logging
from typing import Dict, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from rewardesign.control.pomdp import rollout
from rewardesign.control.problem import ControlProblem
from rewardesign.control.reward import RewardScheme, WeightVector
from rewardesign.control.solver import PolicyTable
from rewardesign.core.errors import EstimationError

logger = logging.getLogger(__name__)


class TauEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=0)
    per_initial_state: Dict[str, float]
    policy_id: str = "policy"

    @model_validator(mode="after")
    def _value_is_max(self):
        if self.per_initial_state and self.value != max(self.per_initial_state.values()):
            raise ValueError("τ must equal the maximum per-initial-state cost")
        return self

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"initial_state": list(self.per_initial_state), "cumulative_cost": list(self.per_initial_state.values())})


class TcEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: int = Field(ge=1)
    per_initial_state: Dict[str, int]
    policy_id: str = "policy"

    @model_validator(mode="after")
    def _value_is_min(self):
        if self.per_initial_state and self.value != min(self.per_initial_state.values()):
            raise ValueError("t_c must equal the minimum per-initial-state final time")
        return self

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"initial_state": list(self.per_initial_state), "final_time": list(self.per_initial_state.values())})


def _neutral_scheme() -> RewardScheme:
    # le stime non dipendono dai pesi
    return RewardScheme(WeightVector(alpha=1.0))


def estimate_tau(
    problem: ControlProblem,
    constraint_satisfying_policy: PolicyTable,
    policy_id: str = "policy",
    scheme: Optional[RewardScheme] = None,
) -> TauEstimate:
    scheme = scheme or _neutral_scheme()
    costs: Dict[str, float] = {}
    for s0 in problem.initial_set:
        trace = rollout(problem, constraint_satisfying_policy, s0, scheme)
        if trace.violated or not trace.terminal_met:
            raise EstimationError(
                f"Policy '{policy_id}' is not constraint-satisfying from {s0!r} (cause={trace.cause.value}, "
                f"violated={trace.violated})",
                initial_state=s0,
            )
        costs[str(s0)] = trace.cumulative_cost

    estimate = TauEstimate(value=max(costs.values()), per_initial_state=costs, policy_id=policy_id)
    logger.info(f"τ estimate from '{policy_id}': {estimate.value} over {len(costs)} initial states")
    return estimate


def estimate_tc(
    problem_without_state_constraint: ControlProblem,
    unconstrained_min_time_policy: PolicyTable,
    policy_id: str = "policy",
    scheme: Optional[RewardScheme] = None,
) -> TcEstimate:
    problem = problem_without_state_constraint
    scheme = scheme or _neutral_scheme()
    times: Dict[str, int] = {}
    for s0 in problem.initial_set:
        trace = rollout(problem, unconstrained_min_time_policy, s0, scheme)
        if not trace.terminal_met:
            raise EstimationError(
                f"Policy '{policy_id}' does not reach the terminal set from {s0!r} (cause={trace.cause.value})",
                initial_state=s0,
            )
        times[str(s0)] = trace.final_time

    estimate = TcEstimate(value=min(times.values()), per_initial_state=times, policy_id=policy_id)
    logger.info(f"t_c estimate from '{policy_id}': {estimate.value} over {len(times)} initial states")
    return estimate
