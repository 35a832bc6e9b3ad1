"""
Oracle a forza bruta.

Enumera tutte le sequenze di azioni congiunte da uno stato iniziale (ogni ramo
troncato alla sua terminazione), classifica le tracce nelle classi di policy e
verifica che, con pesi entro i limiti, il ritorno massimo cada nella classe
che soddisfa entrambi i vincoli con l'obiettivo ottimo.

Con dinamica deterministica e stato iniziale fissato ogni policy deterministica
induce esattamente una traccia: enumerare le tracce equivale a enumerare le policy.

Classi (vincolo di stato presente):
    Pi0  viola terminale e stato      Pi1  viola terminale, rispetta lo stato
    Pi2  rispetta terminale, viola stato   Pi3  rispetta entrambi
Senza vincolo di stato (budget = +inf):
    Pi4  viola terminale              Pi5  rispetta terminale
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from rewardesign.control.bounds import (
    DEFAULT_EPSILON,
    BoundInputs,
    Theorem,
    corollary1_bounds,
    preset_weights,
    theorem1_bounds,
    theorem2_bounds,
)
from rewardesign.control.problem import ControlProblem, CostKind, State
from rewardesign.control.reward import GuidanceFunction, RewardScheme, WeightVector
from rewardesign.control.solver import TransitionModel, model_for
from rewardesign.core.errors import CapacityError, DomainError, PreconditionError
from rewardesign.core.settings import settings

logger = logging.getLogger(__name__)

# quante tracce di argmax conservare come esempio/controesempio
ARGMAX_EXAMPLES = 20


class PolicyClass(str, Enum):
    PI0 = "Pi0"
    PI1 = "Pi1"
    PI2 = "Pi2"
    PI3 = "Pi3"
    PI4 = "Pi4"
    PI5 = "Pi5"


FEASIBLE_CLASSES = (PolicyClass.PI3, PolicyClass.PI5)


def classify(terminal_met: bool, violated: bool, constrained: bool = True) -> PolicyClass:
    if not constrained:
        return PolicyClass.PI5 if terminal_met else PolicyClass.PI4
    if terminal_met:
        return PolicyClass.PI2 if violated else PolicyClass.PI3
    return PolicyClass.PI0 if violated else PolicyClass.PI1


class TraceRecord(NamedTuple):
    actions: Tuple[int, ...]
    policy_class: PolicyClass
    episode_return: float
    final_time: int
    cumulative_cost: float
    objective: float


@dataclass
class EnumerationReport:
    initial_state: State
    constrained: bool
    objective_kind: str
    records: List[TraceRecord] = field(default_factory=list)
    count: int = 0
    class_counts: Counter = field(default_factory=Counter)
    class_best: Dict[PolicyClass, float] = field(default_factory=dict)
    best_return: float = -math.inf
    argmax_count: int = 0
    argmax_classes: Counter = field(default_factory=Counter)
    argmax_examples: List[TraceRecord] = field(default_factory=list)
    argmax_times: Tuple[int, int] = (0, 0)
    argmax_costs: Tuple[float, float] = (0.0, 0.0)
    feasible_min_time: Optional[int] = None
    feasible_min_cost: Optional[float] = None
    feasible_max_cost: Optional[float] = None
    # per tempo finale: (ritorno minimo, ritorno massimo) delle tracce ammissibili
    feasible_time_bands: Dict[int, Tuple[float, float]] = field(default_factory=dict)
    orderings_verified: Dict[str, bool] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.feasible_min_time is not None

    @property
    def best_constrained(self) -> Optional[float]:
        """Obiettivo ottimo tra le tracce ammissibili (None se il problema è infeasible)."""
        if not self.feasible:
            return None
        return float(self.feasible_min_time) if self.objective_kind == "time" else self.feasible_min_cost

    def add(self, record: TraceRecord, keep: bool) -> None:
        self.count += 1
        cls = record.policy_class
        self.class_counts[cls] += 1
        if record.episode_return > self.class_best.get(cls, -math.inf):
            self.class_best[cls] = record.episode_return
        if keep:
            self.records.append(record)

        if record.episode_return > self.best_return:
            self.best_return = record.episode_return
            self.argmax_count = 1
            self.argmax_classes = Counter({cls: 1})
            self.argmax_examples = [record]
            self.argmax_times = (record.final_time, record.final_time)
            self.argmax_costs = (record.cumulative_cost, record.cumulative_cost)
        elif record.episode_return == self.best_return:
            self.argmax_count += 1
            self.argmax_classes[cls] += 1
            if len(self.argmax_examples) < ARGMAX_EXAMPLES:
                self.argmax_examples.append(record)
            self.argmax_times = (min(self.argmax_times[0], record.final_time), max(self.argmax_times[1], record.final_time))
            self.argmax_costs = (
                min(self.argmax_costs[0], record.cumulative_cost),
                max(self.argmax_costs[1], record.cumulative_cost),
            )

        if cls in FEASIBLE_CLASSES:
            t, c = record.final_time, record.cumulative_cost
            self.feasible_min_time = t if self.feasible_min_time is None else min(self.feasible_min_time, t)
            self.feasible_min_cost = c if self.feasible_min_cost is None else min(self.feasible_min_cost, c)
            self.feasible_max_cost = c if self.feasible_max_cost is None else max(self.feasible_max_cost, c)
            lo, hi = self.feasible_time_bands.get(t, (math.inf, -math.inf))
            self.feasible_time_bands[t] = (min(lo, record.episode_return), max(hi, record.episode_return))

    def to_frame(self, problem: ControlProblem) -> pd.DataFrame:
        rows = [
            {
                "actions": " ".join(
                    "/".join(problem.action_labels[a] for a in problem.joint_actions[j]) for j in r.actions
                ),
                "class": r.policy_class.value,
                "return": r.episode_return,
                "final_time": r.final_time,
                "cost": r.cumulative_cost,
                "objective": r.objective,
            }
            for r in self.records
        ]
        return pd.DataFrame(rows, columns=["actions", "class", "return", "final_time", "cost", "objective"])


# ====================================================================
# ENUMERAZIONE
# ====================================================================


def enumerate_traces(
    problem: ControlProblem,
    reward_scheme: RewardScheme,
    initial_state: State,
    cap: Optional[int] = None,
    keep_records: bool = True,
    model: Optional[TransitionModel] = None,
) -> EnumerationReport:
    cap = settings.ORACLE_CAP if cap is None else cap
    A, horizon = problem.num_joint_actions, problem.horizon
    required = A**horizon
    if required > cap:
        raise CapacityError("Enumeration exceeds the oracle cap", size=required)

    start = problem.check_state(initial_state)
    model = model_for(problem, reward_scheme, model)
    succ = model.succ.tolist()
    reward = model.reward.tolist()
    cost = model.r_c.tolist()
    done = model.done.tolist()
    terminal = model.next_terminal.tolist()
    violated = model.next_violated.tolist()
    gamma = reward_scheme.discount
    constrained = not math.isinf(problem.constraint.budget)
    use_time = problem.cost_kind == CostKind.MINIMUM_TIME

    report = EnumerationReport(initial_state, constrained, "time" if use_time else "cost")
    rewards: List[float] = []
    actions: List[int] = []

    def walk(s: int, t: int, spent: float) -> None:
        for a in range(A):
            c = spent + cost[s][a]
            rewards.append(reward[s][a])
            actions.append(a)
            if done[s][a] or t == horizon - 1:
                ret = 0.0
                for r in reversed(rewards):
                    ret = r + gamma * ret
                cls = classify(terminal[s][a], violated[s][a], constrained)
                record = TraceRecord(tuple(actions), cls, ret, t + 1, c, float(t + 1) if use_time else c)
                report.add(record, keep_records)
            else:
                walk(succ[s][a], t + 1, c)
            rewards.pop()
            actions.pop()

    walk(start, 0, 0.0)
    logger.debug(f"Enumerated {report.count} traces from {initial_state!r} (best return {report.best_return})")
    return report


# ====================================================================
# VERDETTI
# ====================================================================


@dataclass
class Verdict:
    theorem: Theorem
    passed: bool
    weights: WeightVector
    inputs: BoundInputs
    checks: Dict[str, bool] = field(default_factory=dict)
    counterexamples: List[Tuple[State, TraceRecord]] = field(default_factory=list)
    argmax_classes: Dict[State, Dict[str, int]] = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, ok in self.checks.items() if not ok]
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"{self.theorem.value}: {status}{detail}"


def _decreasing_in_time(bands: Dict[int, Tuple[float, float]]) -> bool:
    times = sorted(bands)
    for i, early in enumerate(times):
        for late in times[i + 1 :]:
            if not bands[early][0] > bands[late][1]:
                return False
    return True


def _same_cost(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def verify_weights(
    problem: ControlProblem,
    scheme: RewardScheme,
    theorem: Theorem,
    inputs: Optional[BoundInputs] = None,
    cap: Optional[int] = None,
    model: Optional[TransitionModel] = None,
) -> Verdict:
    """
    Applica i controlli del teorema con pesi dati (validi o deliberatamente fuori limite).

    T1  argmax ⊂ Pi3 e costo minimo tra le Pi3
    T2  argmax ⊂ Pi3 con tempo minimo; Pi3 migliore > ogni Pi0/Pi1/Pi2;
        ritorni Pi3 strettamente decrescenti nel tempo finale
    C1  argmax ⊂ Pi5 con tempo minimo (problema senza vincolo di stato)
    """
    theorem = Theorem(theorem)
    expected = PolicyClass.PI5 if theorem == Theorem.C1 else PolicyClass.PI3
    model = model_for(problem, scheme, model)
    checks = {"argmax_class": True, "argmax_objective": True}
    if theorem == Theorem.T2:
        checks["class_ordering"] = True
    if theorem in (Theorem.T2, Theorem.C1):
        checks["time_ordering"] = True
    counterexamples: List[Tuple[State, TraceRecord]] = []
    argmax_classes: Dict[State, Dict[str, int]] = {}

    for s0 in problem.initial_set:
        report = enumerate_traces(problem, scheme, s0, cap=cap, keep_records=False, model=model)
        if not report.feasible:
            raise PreconditionError(f"No {expected.value} trace from initial state {s0!r}: instance infeasible")
        argmax_classes[s0] = {k.value: v for k, v in report.argmax_classes.items()}

        class_ok = set(report.argmax_classes) == {expected}
        if theorem == Theorem.T1:
            lo, hi = report.argmax_costs
            objective_ok = _same_cost(lo, report.feasible_min_cost) and _same_cost(hi, report.feasible_min_cost)
        else:
            objective_ok = report.argmax_times == (report.feasible_min_time, report.feasible_min_time)
        objective_ok = objective_ok and class_ok

        report.orderings_verified["argmax_class"] = class_ok
        report.orderings_verified["argmax_objective"] = objective_ok
        checks["argmax_class"] &= class_ok
        checks["argmax_objective"] &= objective_ok

        if theorem == Theorem.T2:
            best_feasible = report.class_best[PolicyClass.PI3]
            others = [report.class_best[c] for c in (PolicyClass.PI0, PolicyClass.PI1, PolicyClass.PI2) if c in report.class_best]
            ordering_ok = all(best_feasible > other for other in others)
            report.orderings_verified["class_ordering"] = ordering_ok
            checks["class_ordering"] &= ordering_ok
        if theorem in (Theorem.T2, Theorem.C1):
            time_ok = _decreasing_in_time(report.feasible_time_bands)
            report.orderings_verified["time_ordering"] = time_ok
            checks["time_ordering"] &= time_ok

        if not objective_ok:
            for record in report.argmax_examples:
                bad_class = record.policy_class != expected
                if theorem == Theorem.T1:
                    bad_objective = not _same_cost(record.cumulative_cost, report.feasible_min_cost)
                else:
                    bad_objective = record.final_time != report.feasible_min_time
                if bad_class or bad_objective:
                    counterexamples.append((s0, record))

    verdict = Verdict(
        theorem=theorem,
        passed=all(checks.values()),
        weights=scheme.weights,
        inputs=inputs or BoundInputs(alpha=scheme.weights.alpha),
        checks=checks,
        counterexamples=counterexamples,
        argmax_classes=argmax_classes,
    )
    log = logger.info if verdict.passed else logger.warning
    log(f"[{problem.name}] {verdict.summary()}")
    return verdict


def _probe_scheme(alpha: float) -> RewardScheme:
    return RewardScheme(WeightVector(alpha=alpha))


def oracle_tau(problem: ControlProblem, alpha: float = 1.0, mode: str = "optimal", cap: Optional[int] = None) -> float:
    """
    τ dell'oracle: massimo sugli stati iniziali del costo di una traccia Pi3.

    mode="optimal": costo della traccia Pi3 a costo minimo
    mode="worst":   costo massimo tra tutte le tracce Pi3
    """
    if mode not in ("optimal", "worst"):
        raise DomainError(f"tau mode must be 'optimal' or 'worst', got {mode!r}")
    scheme = _probe_scheme(alpha)
    model = TransitionModel(problem, scheme)
    tau = 0.0
    for s0 in problem.initial_set:
        report = enumerate_traces(problem, scheme, s0, cap=cap, keep_records=False, model=model)
        if not report.feasible:
            raise PreconditionError(f"No Pi3 trace from initial state {s0!r}: τ undefined")
        tau = max(tau, report.feasible_min_cost if mode == "optimal" else report.feasible_max_cost)
    if tau <= 0:
        raise PreconditionError("τ is zero: the cost term cannot be bounded")
    return tau


def oracle_tc(problem: ControlProblem, cap: Optional[int] = None) -> int:
    """t_c dell'oracle: tempo finale minimo sul problema senza vincolo di stato."""
    relaxed = problem.relaxed()
    scheme = _probe_scheme(1.0)
    model = TransitionModel(relaxed, scheme)
    t_c = None
    for s0 in relaxed.initial_set:
        report = enumerate_traces(relaxed, scheme, s0, cap=cap, keep_records=False, model=model)
        if not report.feasible:
            raise PreconditionError(f"Terminal set unreachable from {s0!r} within the horizon")
        t_c = report.feasible_min_time if t_c is None else min(t_c, report.feasible_min_time)
    return t_c


def verify_theorem1(
    problem: ControlProblem,
    alpha: float = 10.0,
    epsilon: float = DEFAULT_EPSILON,
    tau_mode: str = "optimal",
    cap: Optional[int] = None,
) -> Verdict:
    tau = oracle_tau(problem, alpha, tau_mode, cap)
    theorem1_bounds(alpha, tau)
    inputs = BoundInputs(alpha=alpha, tau=tau)
    weights = preset_weights(Theorem.T1, inputs, epsilon)
    return verify_weights(problem, RewardScheme(weights), Theorem.T1, inputs, cap)


def verify_theorem2(
    problem: ControlProblem,
    alpha: float = 10.0,
    gamma_m: float = 0.99,
    guidance: Optional[GuidanceFunction] = None,
    epsilon: float = DEFAULT_EPSILON,
    cap: Optional[int] = None,
) -> Verdict:
    t_c = oracle_tc(problem, cap)
    rho = guidance.rho if guidance is not None else 1.0
    theorem2_bounds(alpha, gamma_m, t_c, problem.horizon, rho)
    inputs = BoundInputs(alpha=alpha, gamma_m=gamma_m, t_max=problem.horizon, t_c=t_c, rho=rho)
    weights = preset_weights(Theorem.T2, inputs, epsilon, use_guidance=guidance is not None)
    scheme = RewardScheme(weights, guidance, minimum_time=True)
    return verify_weights(problem, scheme, Theorem.T2, inputs, cap)


def verify_corollary1(
    problem: ControlProblem,
    alpha: float = 10.0,
    gamma_m: float = 0.99,
    guidance: Optional[GuidanceFunction] = None,
    epsilon: float = DEFAULT_EPSILON,
    cap: Optional[int] = None,
) -> Verdict:
    relaxed = problem.relaxed()
    rho = guidance.rho if guidance is not None else 1.0
    corollary1_bounds(alpha, gamma_m, relaxed.horizon, rho)
    inputs = BoundInputs(alpha=alpha, gamma_m=gamma_m, t_max=relaxed.horizon, rho=rho)
    weights = preset_weights(Theorem.C1, inputs, epsilon, use_guidance=guidance is not None)
    scheme = RewardScheme(weights, guidance, minimum_time=True)
    return verify_weights(relaxed, scheme, Theorem.C1, inputs, cap)


# ====================================================================
# SUITE
# ====================================================================


@dataclass
class SuiteResult:
    name: str
    verdicts: List[Tuple[str, Verdict]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for _, v in self.verdicts)

    @property
    def failures(self) -> List[str]:
        return [name for name, v in self.verdicts if not v.passed]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for name, v in self.verdicts:
            rows.append({"instance": name, "theorem": v.theorem.value, "passed": v.passed, **v.checks})
        return pd.DataFrame(rows)


def run_random_suite(
    theorem: Theorem,
    instances: int = 50,
    seed: int = 0,
    alpha: float = 10.0,
    epsilon: float = DEFAULT_EPSILON,
    cap: Optional[int] = None,
) -> SuiteResult:
    # import locale: gli ambienti dipendono dal pacchetto control
    from rewardesign.envs import gridworld

    theorem = Theorem(theorem)
    rng = np.random.default_rng(seed)
    suite = SuiteResult(f"random_{theorem.value}")
    for i in range(instances):
        config = gridworld.random_config(rng)
        problem = gridworld.build(config)
        gamma_m = round(float(rng.uniform(0.5, 0.99)), 3)
        if theorem == Theorem.T1:
            verdict = verify_theorem1(problem, alpha, epsilon, cap=cap)
        elif theorem == Theorem.T2:
            verdict = verify_theorem2(problem, alpha, gamma_m, gridworld.guidance(config), epsilon, cap)
        else:
            verdict = verify_corollary1(problem, alpha, gamma_m, gridworld.guidance(config), epsilon, cap)
        suite.verdicts.append((f"{config.name}_{i}", verdict))
    logger.info(f"Suite {suite.name}: {len(suite.verdicts) - len(suite.failures)}/{len(suite.verdicts)} passed")
    return suite


@dataclass
class WitnessResult:
    name: str
    theorem: Theorem
    ablation: str
    valid: Verdict
    ablated: Verdict
    flipped_to: List[str]

    @property
    def demonstrated(self) -> bool:
        """Pesi validi superano la verifica, pesi ablati la falliscono."""
        return self.valid.passed and not self.ablated.passed


def run_witness_suite(alpha: float = 10.0, epsilon: float = DEFAULT_EPSILON) -> List[WitnessResult]:
    from rewardesign.envs import gridworld

    results = []

    # (a) λ = 0.5·α sotto il limite del teorema 1: la scorciatoia pericolosa vince
    problem = gridworld.build(gridworld.shortcut_witness())
    valid = verify_theorem1(problem, alpha, epsilon)
    weights = valid.weights.with_values(lambda_pen=0.5 * alpha)
    ablated = verify_weights(problem, RewardScheme(weights), Theorem.T1, valid.inputs)
    results.append(_witness("shortcut_witness", "lambda=0.5*bound", valid, ablated))

    # (b) β = 10·limite con guida che premia un vicolo cieco
    config = gridworld.dead_end_witness()
    problem = gridworld.build(config)
    gf = gridworld.guidance(config)
    valid = verify_theorem2(problem, alpha, 0.5, gf, epsilon)
    _, beta_upper = theorem2_bounds(alpha, 0.5, valid.inputs.t_c, problem.horizon, gf.rho)
    weights = valid.weights.with_values(beta=10 * beta_upper)
    ablated = verify_weights(problem, RewardScheme(weights, gf, minimum_time=True), Theorem.T2, valid.inputs)
    results.append(_witness("dead_end_witness", "beta=10*bound", valid, ablated))

    # (c) μ = 10·(−α/τ): raggiungere il goal costa più di quanto renda
    problem = gridworld.build(gridworld.costly_goal_witness())
    valid = verify_theorem1(problem, alpha, epsilon)
    _, _, mu_lower = theorem1_bounds(alpha, valid.inputs.tau)
    weights = valid.weights.with_values(mu=10 * mu_lower)
    ablated = verify_weights(problem, RewardScheme(weights), Theorem.T1, valid.inputs)
    results.append(_witness("costly_goal_witness", "mu=10*bound", valid, ablated))
    return results


def _witness(name: str, ablation: str, valid: Verdict, ablated: Verdict) -> WitnessResult:
    flipped = sorted({cls for classes in ablated.argmax_classes.values() for cls in classes})
    return WitnessResult(name, valid.theorem, ablation, valid, ablated, flipped)
