"""
Curriculum a stadi per l'acquisizione dei parametri del reward.

stage 1        nessun vincolo di stato (b = +inf), pesi del corollario; stima t_c
stage 2..s     budget decrescente b_j = ξ − (j−2)·ξ/(s−2), ultimo budget 0;
               pesi del teorema 2 (calcolati con t_c); dopo lo stage s si stima τ
stage s+1      solo se il costo non è minimum-time: problema completo con i
               pesi del teorema 1 (calcolati con τ), sconto 1, β = 0

Ogni stage parte dalla policy (o tabella Q) dello stage precedente.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from rewardesign.control.bounds import (
    DEFAULT_EPSILON,
    BoundCertificate,
    BoundInputs,
    Theorem,
    certify,
    preset_weights,
)
from rewardesign.control.estimators import TauEstimate, TcEstimate, estimate_tau, estimate_tc
from rewardesign.control.problem import ControlProblem, CostKind
from rewardesign.control.reward import GuidanceFunction, RewardScheme, WeightVector
from rewardesign.control.solver import PolicyEvaluation, PolicyTable, Trainer, TrainOutcome, evaluate_policy
from rewardesign.core.errors import ConfigurationError, DomainError, EstimationError, StageError

logger = logging.getLogger("Curriculum")

MULTIPLIER_FIELDS = {"lambda": "lambda_pen", "beta": "beta", "mu": "mu"}


class WeightPolicy(BaseModel):
    """Come popolare i pesi degli stage a partire dai limiti."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(default=10.0, gt=0)
    gamma_m: float = Field(default=0.99, gt=0, lt=1)
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0, lt=1)
    use_guidance: bool = True
    rho: Optional[float] = Field(default=None, gt=0)
    t_max: int = Field(ge=1)
    # moltiplicatori di ablazione (lambda / beta / mu), applicati dagli stage >= 2
    multipliers: Dict[str, float] = Field(default_factory=dict)
    # valori espliciti per stage: {indice: {alpha, beta, lambda, mu, discount}}
    overrides: Dict[int, Dict[str, float]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        unknown = set(self.multipliers) - set(MULTIPLIER_FIELDS)
        if unknown:
            raise ValueError(f"unknown multiplier keys: {sorted(unknown)}")
        if any(m < 0 for m in self.multipliers.values()):
            raise ValueError("multipliers must be nonnegative")
        if self.use_guidance and self.rho is None:
            raise ValueError("rho is required when use_guidance is true")
        return self

    def inputs(self, theorem: Theorem, t_c: Optional[int] = None, tau: Optional[float] = None) -> BoundInputs:
        rho = self.rho if self.rho is not None else 1.0
        if theorem == Theorem.T1:
            return BoundInputs(alpha=self.alpha, tau=tau)
        if theorem == Theorem.T2:
            return BoundInputs(alpha=self.alpha, gamma_m=self.gamma_m, t_max=self.t_max, t_c=t_c, rho=rho)
        return BoundInputs(alpha=self.alpha, gamma_m=self.gamma_m, t_max=self.t_max, rho=rho)

    def weights(self, theorem: Theorem, stage_index: int, inputs: BoundInputs) -> WeightVector:
        weights = preset_weights(theorem, inputs, self.epsilon, use_guidance=self.use_guidance)
        if stage_index >= 2 and self.multipliers:
            weights = weights.scaled(**{MULTIPLIER_FIELDS[k]: v for k, v in self.multipliers.items()})
        override = self.overrides.get(stage_index)
        if override:
            values = {("lambda_pen" if k == "lambda" else k): v for k, v in override.items()}
            weights = weights.with_values(**values)
        return weights


class CurriculumStage(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    index: int = Field(ge=1)
    budget: float = Field(ge=0)
    weights: WeightVector
    theorem: Theorem
    inputs: BoundInputs
    training_steps: int = Field(ge=0)
    warm_start_from: Optional[int] = None
    cost_kind: CostKind = CostKind.MINIMUM_TIME
    # True finché i pesi dipendono da stime (t_c, τ) non ancora disponibili
    provisional: bool = False


class CurriculumPlan(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    stages: List[CurriculumStage]
    xi: float = Field(gt=0)
    total_stages_min_time: int = Field(ge=2)
    target_cost_kind: CostKind = CostKind.MINIMUM_TIME
    weight_policy: WeightPolicy

    @model_validator(mode="after")
    def _check_budgets(self):
        first = self.stages[0]
        if not (math.isinf(first.budget) and first.theorem == Theorem.C1):
            raise ValueError("stage 1 must be unconstrained (budget = +inf) under the corollary")
        budgets = [s.budget for s in self.stages]
        if any(b2 > b1 for b1, b2 in zip(budgets, budgets[1:])):
            raise ValueError(f"budgets must be non-increasing: {budgets}")
        if self.stages[self.total_stages_min_time - 1].budget != 0.0:
            raise ValueError("the last constrained stage must have budget 0")
        return self

    @property
    def budgets(self) -> List[float]:
        return [s.budget for s in self.stages]


def budget_schedule(xi: float, s: int) -> List[float]:
    """[+inf, ξ, ..., 0]: stage j in 2..s ha budget ξ − (j−2)·ξ/(s−2)."""
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    if s < 2:
        raise DomainError(f"s must be >= 2, got {s}")
    if s == 2:
        return [math.inf, 0.0]
    budgets = [math.inf] + [xi - (j - 2) * xi / (s - 2) for j in range(2, s + 1)]
    budgets[-1] = 0.0
    return budgets


def build_plan(
    xi: float,
    s: int,
    steps_per_stage: Union[int, Sequence[int]],
    weight_policy: WeightPolicy,
    cost_kind: CostKind = CostKind.MINIMUM_TIME,
) -> CurriculumPlan:
    budgets = budget_schedule(xi, s)
    has_final = cost_kind != CostKind.MINIMUM_TIME
    n_stages = s + 1 if has_final else s

    if isinstance(steps_per_stage, int):
        steps = [steps_per_stage] * n_stages
    else:
        steps = list(steps_per_stage)
        if len(steps) != n_stages:
            raise ConfigurationError(f"steps_per_stage has {len(steps)} entries, plan has {n_stages} stages", key="steps_per_stage")

    stages = []
    for j in range(1, n_stages + 1):
        if j == 1:
            theorem, budget, provisional, inputs = Theorem.C1, budgets[0], False, weight_policy.inputs(Theorem.C1)
        elif j <= s:
            # provvisorio: t_c = t_max finché lo stage 1 non fornisce la stima
            theorem, budget, provisional = Theorem.T2, budgets[j - 1], True
            inputs = weight_policy.inputs(Theorem.T2, t_c=weight_policy.t_max)
        else:
            theorem, budget, provisional = Theorem.T1, 0.0, True
            inputs = weight_policy.inputs(Theorem.T1, tau=float(weight_policy.t_max))
        stages.append(
            CurriculumStage(
                index=j,
                budget=budget,
                weights=weight_policy.weights(theorem, j, inputs),
                theorem=theorem,
                inputs=inputs,
                training_steps=steps[j - 1],
                warm_start_from=j - 1 if j > 1 else None,
                cost_kind=cost_kind if theorem == Theorem.T1 else CostKind.MINIMUM_TIME,
                provisional=provisional,
            )
        )

    plan = CurriculumPlan(
        stages=stages,
        xi=xi,
        total_stages_min_time=s,
        target_cost_kind=cost_kind,
        weight_policy=weight_policy,
    )
    logger.info(f"Plan built: {n_stages} stages, budgets {plan.budgets}")
    return plan


def refine_stage(
    stage: CurriculumStage, weight_policy: WeightPolicy, t_c: Optional[int], tau: Optional[float]
) -> CurriculumStage:
    """Ricalcola i pesi di uno stage provvisorio con le stime disponibili."""
    if not stage.provisional:
        return stage
    if stage.theorem == Theorem.T2 and t_c is not None:
        inputs = weight_policy.inputs(Theorem.T2, t_c=t_c)
    elif stage.theorem == Theorem.T1 and tau is not None:
        inputs = weight_policy.inputs(Theorem.T1, tau=tau)
    else:
        return stage
    weights = weight_policy.weights(stage.theorem, stage.index, inputs)
    return stage.model_copy(update={"weights": weights, "inputs": inputs, "provisional": False})


# ====================================================================
# ESECUZIONE
# ====================================================================

StageMonitor = Callable[[CurriculumStage, int, np.ndarray], None]


def stage_scheme(stage: CurriculumStage, guidance: Optional[GuidanceFunction]) -> RewardScheme:
    # T2 / C1 usano il reward minimum-time, T1 quello con costo
    gf = guidance if stage.weights.beta > 0 else None
    return RewardScheme(stage.weights, gf, minimum_time=stage.theorem != Theorem.T1)


def is_converged(stage: CurriculumStage, evaluation: PolicyEvaluation) -> bool:
    """Stage 1: terminale da ogni stato iniziale. Stage successivi: anche nessuna violazione."""
    return evaluation.all_terminal if stage.index == 1 else evaluation.clean


@dataclass
class StageArtifact:
    stage: CurriculumStage
    outcome: TrainOutcome
    evaluation: PolicyEvaluation
    certificate: BoundCertificate
    converged: bool
    tc: Optional[TcEstimate] = None
    tau: Optional[TauEstimate] = None
    notes: List[str] = field(default_factory=list)

    @property
    def policy(self) -> PolicyTable:
        return self.outcome.policy


@dataclass
class PlanResult:
    artifacts: List[StageArtifact] = field(default_factory=list)
    tc: Optional[TcEstimate] = None
    tau: Optional[TauEstimate] = None
    failed: bool = False
    failure: Optional[str] = None

    @property
    def final_policy(self) -> Optional[PolicyTable]:
        return self.artifacts[-1].policy if self.artifacts else None

    @property
    def converged(self) -> bool:
        return bool(self.artifacts) and all(a.converged for a in self.artifacts)


def _stage_metrics(evaluation: PolicyEvaluation) -> Dict[str, float]:
    outcomes = list(evaluation.outcomes.values())
    n = len(outcomes)
    return {
        "initial_states": n,
        "terminal_rate": sum(o.terminal_met for o in outcomes) / n,
        "violation_rate": sum(o.violated for o in outcomes) / n,
    }


def run_plan(
    plan: CurriculumPlan,
    problem: ControlProblem,
    trainer: Trainer,
    guidance: Optional[GuidanceFunction] = None,
    halt_on_failure: bool = True,
    monitor: Optional[StageMonitor] = None,
    fixed_tau: Optional[float] = None,
) -> PlanResult:
    """
    Esegue gli stage in ordine. Con fixed_tau il τ non viene stimato dopo lo
    stage s ma preso così com'è (deve essere > 0).
    """
    if fixed_tau is not None and not fixed_tau > 0:
        raise DomainError(f"fixed τ must be positive, got {fixed_tau}")
    if problem.cost_kind != plan.target_cost_kind:
        raise ConfigurationError(
            f"problem cost kind {problem.cost_kind.value} differs from plan target {plan.target_cost_kind.value}"
        )
    policy = plan.weight_policy
    s = plan.total_stages_min_time
    result = PlanResult()
    warm: Optional[TrainOutcome] = None
    t_c: Optional[int] = None
    tau: Optional[float] = None

    def fail(stage_index: int, reason: str, metrics: Dict[str, float]) -> None:
        result.failed = True
        result.failure = f"stage {stage_index}: {reason}"
        raise StageError(stage_index, metrics, partial=result, reason=reason)

    for planned in plan.stages:
        stage = refine_stage(planned, policy, t_c, tau)
        stage_problem = problem.with_budget(stage.budget).with_cost(stage.cost_kind)
        scheme = stage_scheme(stage, guidance)
        certificate = certify(stage.weights, stage.theorem, stage.inputs)
        logger.info(
            f"Stage {stage.index} ({stage.theorem.value}, budget={stage.budget}): "
            f"alpha={stage.weights.alpha} beta={stage.weights.beta:.6g} lambda={stage.weights.lambda_pen:.6g} "
            f"mu={stage.weights.mu:.6g} discount={stage.weights.discount}"
        )

        on_sample = None
        if monitor is not None:

            def on_sample(episode: int, actions: np.ndarray, _stage=stage) -> None:
                monitor(_stage, episode, actions)

        outcome = trainer.train(stage_problem, scheme, stage.training_steps, stage.index, warm, on_sample)
        evaluation = evaluate_policy(stage_problem, outcome.policy, scheme)
        converged = is_converged(stage, evaluation)
        artifact = StageArtifact(stage, outcome, evaluation, certificate, converged)
        result.artifacts.append(artifact)

        if not converged:
            metrics = _stage_metrics(evaluation)
            logger.warning(f"Stage {stage.index} did not converge: {metrics}")
            if halt_on_failure:
                fail(stage.index, "greedy policy fails a constraint from some initial state", metrics)
            artifact.notes.append("not converged")

        if stage.index == 1:
            try:
                result.tc = artifact.tc = estimate_tc(stage_problem, outcome.policy, policy_id=f"stage{stage.index}")
                t_c = result.tc.value
            except EstimationError as e:
                if halt_on_failure:
                    fail(stage.index, f"t_c estimation failed: {e}", _stage_metrics(evaluation))
                t_c = policy.t_max
                artifact.notes.append(f"t_c estimation failed, using t_max={t_c}")
                logger.warning(artifact.notes[-1])

        if stage.index == s and fixed_tau is not None:
            tau = fixed_tau
            artifact.notes.append(f"τ fixed by configuration: {tau}")
        elif stage.index == s:
            needs_tau = plan.target_cost_kind != CostKind.MINIMUM_TIME
            target = problem.with_budget(stage.budget)
            try:
                result.tau = artifact.tau = estimate_tau(target, outcome.policy, policy_id=f"stage{stage.index}")
                tau = result.tau.value
                if needs_tau and tau <= 0:
                    raise EstimationError("τ is zero: the cost term cannot be bounded")
            except EstimationError as e:
                if needs_tau and halt_on_failure:
                    fail(stage.index, f"τ estimation failed: {e}", _stage_metrics(evaluation))
                tau = float(problem.horizon * problem.num_agents)
                artifact.notes.append(f"τ estimation failed, using fallback τ={tau}")
                logger.warning(artifact.notes[-1])

        warm = outcome

    if not result.converged:
        result.failure = "some stages did not converge"
    return result
