"""
Componenti del reward e loro composizione.

    R = α·r_a + β·r_g + λ·r_p + μ·r_c

r_a  terminale (1 se lo stato successore soddisfa il vincolo terminale)
r_g  guida (funzione l limitata da ρ)
r_p  penalità (−1 se lo stato successore viola il vincolo di stato)
r_c  costo c(x, u) della transizione

Lo schema minimum-time ignora μ e usa uno sconto γ_m < 1.
"""

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field

from rewardesign.control.problem import (
    ControlProblem,
    JointAction,
    State,
    evaluate_cost,
)
from rewardesign.core.errors import ConfigurationError, DomainError, RewardDesignWarning

logger = logging.getLogger(__name__)


class WeightVector(BaseModel):
    """Pesi (α, β, λ, μ) e sconto; nel file di configurazione λ si chiama `lambda`."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    alpha: float = Field(gt=0)
    beta: float = Field(default=0.0, ge=0)
    lambda_pen: float = Field(default=0.0, ge=0, alias="lambda")
    mu: float = Field(default=0.0, le=0)
    discount: float = Field(default=1.0, gt=0, le=1)

    def scaled(self, **multipliers: float) -> "WeightVector":
        """Copia con i pesi indicati moltiplicati (es. scaled(lambda_pen=0.1))."""
        values = self.model_dump()
        for name, factor in multipliers.items():
            values[name] = values[name] * factor
        return WeightVector(**values)

    def with_values(self, **values: float) -> "WeightVector":
        return WeightVector(**{**self.model_dump(), **values})


class RewardComponents(NamedTuple):
    r_a: float
    r_g: float
    r_p: float
    r_c: float


@dataclass(frozen=True)
class GuidanceFunction:
    """Funzione di guida l(s, a) con limite uniforme |l| < ρ."""

    l: Callable[[State, JointAction], float]
    rho: float

    def __post_init__(self):
        if not self.rho > 0 or not math.isfinite(self.rho):
            raise DomainError(f"Guidance bound rho must be a positive finite real, got {self.rho}")

    def __call__(self, state: State, joint_action: JointAction) -> float:
        return float(self.l(state, joint_action))

    def check_bound(self, problem: ControlProblem) -> float:
        """Verifica esaustiva di |l| < ρ; ritorna il massimo |l| osservato."""
        worst = 0.0
        for s in problem.states:
            for a in problem.joint_actions:
                value = abs(self(s, a))
                if not value < self.rho:
                    raise ConfigurationError(f"Guidance bound violated: |l({s!r}, {a})| = {value} >= rho = {self.rho}")
                worst = max(worst, value)
        return worst


# ====================================================================
# COMPONENTI
# ====================================================================


def terminal_reward(successor_state_is_terminal: bool) -> float:
    return 1.0 if successor_state_is_terminal else 0.0


def penalty_reward(successor_state_is_feasible: bool) -> float:
    return 0.0 if successor_state_is_feasible else -1.0


def guidance_reward(gf: Optional[GuidanceFunction], state: State, joint_action: JointAction) -> float:
    if gf is None:
        return 0.0
    return gf(state, joint_action)


def composite_reward(weights: WeightVector, components: RewardComponents) -> float:
    r_a, r_g, r_p, r_c = components
    return weights.alpha * r_a + weights.beta * r_g + weights.lambda_pen * r_p + weights.mu * r_c


def minimum_time_reward(weights: WeightVector, components: RewardComponents, warn: bool = True) -> float:
    if warn and weights.discount == 1.0:
        _warn_minimum_time_discount()
    r_a, r_g, r_p, _ = components
    return weights.alpha * r_a + weights.beta * r_g + weights.lambda_pen * r_p


def _warn_minimum_time_discount() -> None:
    message = "Minimum-time reward used with discount = 1: time preference is lost (use gamma_m < 1)"
    logger.warning(message)
    warnings.warn(message, RewardDesignWarning, stacklevel=3)


# ====================================================================
# SCHEMA
# ====================================================================


@dataclass(frozen=True)
class RewardScheme:
    """
    Configurazione del reward di un episodio: pesi, funzione di guida e
    variante (composita oppure minimum-time).
    """

    weights: WeightVector
    guidance: Optional[GuidanceFunction] = None
    minimum_time: bool = False

    def __post_init__(self):
        if self.minimum_time and self.weights.discount == 1.0:
            _warn_minimum_time_discount()

    @property
    def discount(self) -> float:
        return self.weights.discount

    def with_weights(self, weights: WeightVector) -> "RewardScheme":
        return replace(self, weights=weights)

    def components(
        self,
        problem: ControlProblem,
        state: State,
        joint_action: JointAction,
        next_state: State,
        next_terminal: bool,
        next_feasible: bool,
    ) -> RewardComponents:
        # r_a, r_g, r_p sullo stato successore; r_c sulla coppia (stato, azione)
        return RewardComponents(
            r_a=terminal_reward(next_terminal),
            r_g=guidance_reward(self.guidance, next_state, joint_action),
            r_p=penalty_reward(next_feasible),
            r_c=evaluate_cost(problem, state, joint_action),
        )

    def combine(self, components: RewardComponents) -> float:
        if self.minimum_time:
            return minimum_time_reward(self.weights, components, warn=False)
        return composite_reward(self.weights, components)
