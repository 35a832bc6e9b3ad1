"""
Esperimenti da file di configurazione YAML.

Un esperimento è ambiente + piano di curriculum + trainer + metriche, ripetuto
per ogni seed. Nella directory di output:

  metrics_seed{seed}.csv           step, stage, p_m, p_s, objective (+ colonne *_smooth)
  policy_seed{seed}_stage{j}.tsv   policy greedy di ogni stage
  certificates_seed{seed}.json     certificati dei pesi di ogni stage
  report.md                        report leggibile (Jinja2)
  run_record.json                  RunRecord, percorsi relativi alla directory

Nessun timestamp nei file: stessa configurazione + stesso seed = stessi byte.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from rewardesign.control.bounds import DEFAULT_EPSILON, BoundCertificate, Theorem, certify
from rewardesign.control.curriculum import (
    MULTIPLIER_FIELDS,
    StageArtifact,
    WeightPolicy,
    build_plan,
    is_converged,
    run_plan,
    stage_scheme,
)
from rewardesign.control.estimators import TauEstimate, TcEstimate
from rewardesign.control.pomdp import rollout
from rewardesign.control.problem import ControlProblem, CostKind
from rewardesign.control.reward import GuidanceFunction, RewardScheme, WeightVector
from rewardesign.control.solver import (
    ExactTrainer,
    PolicyTable,
    QLearningParams,
    QLearningTrainer,
    Trainer,
    TransitionModel,
    evaluate_policy,
)
from rewardesign.core.errors import ConfigurationError, StageError
from rewardesign.core.records import write_policy
from rewardesign.core.settings import settings
from rewardesign.envs import coverage, gridworld
from rewardesign.harness.metrics import (
    METRIC_COLUMNS,
    MetricSample,
    compute_metrics,
    objective_fail_value,
    sample_episodes,
    samples_frame,
    smooth_frame,
)

logger = logging.getLogger("Experiment")

CONFIGS_FOLDER = Path(__file__).resolve().parent.parent / "configs"

# stream del generatore delle valutazioni, distinto dagli stream degli stage (1, 2, ...)
EVAL_STREAM = 10_000

WEIGHT_KEYS = {"alpha", "beta", "lambda", "mu", "discount"}

BENCH_VARIANTS: Dict[str, Dict[str, float]] = {
    "certified": {},
    "lambda_x0.1": {"lambda": 0.1},
    "lambda_x10": {"lambda": 10.0},
    "beta_x0.1": {"beta": 0.1},
    "beta_x10": {"beta": 10.0},
    "beta_0": {"beta": 0.0},
    "mu_x0.1": {"mu": 0.1},
    "mu_x10": {"mu": 10.0},
}


# ====================================================================
# CONFIGURAZIONE
# ====================================================================


class EnvironmentSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["coverage", "gridworld"] = "coverage"
    cost_kind: CostKind = CostKind.MINIMUM_TIME
    # campi di CoverageConfig / GridworldConfig
    params: Dict[str, Any] = Field(default_factory=dict)


class WeightsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=10.0, gt=0)
    gamma_m: float = Field(default=0.99, gt=0, lt=1)
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0, lt=1)
    use_guidance: bool = True
    # default: ρ della funzione di guida dell'ambiente
    rho: Optional[float] = Field(default=None, gt=0)
    overrides: Dict[int, Dict[str, float]] = Field(default_factory=dict)

    @field_validator("overrides")
    @classmethod
    def _known_keys(cls, value: Dict[int, Dict[str, float]]):
        for stage, values in value.items():
            unknown = set(values) - WEIGHT_KEYS
            if unknown:
                raise ValueError(f"stage {stage}: unknown weight keys {sorted(unknown)}")
        return value


class PlanSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    xi: float = Field(default=0.3, gt=0)
    stages: int = Field(default=3, ge=2)
    steps_per_stage: Union[int, List[int]] = 5000
    halt_on_failure: bool = False
    estimate_tau: bool = True
    tau: Optional[float] = Field(default=None, gt=0)
    weights: WeightsSection = Field(default_factory=WeightsSection)


class TrainerSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["exact", "q_learning"] = "q_learning"
    learning_rate: float = Field(default=1.0, gt=0, le=1)
    epsilon_start: float = Field(default=1.0, ge=0, le=1)
    epsilon_end: float = Field(default=0.05, ge=0, le=1)
    decay_fraction: float = Field(default=0.8, gt=0, le=1)


class MetricsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sample_every: int = Field(default=500, ge=1)
    episodes: int = Field(default=30, ge=1)
    window: int = Field(default=10, ge=1)


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: Optional[str] = None
    report: bool = True


class AcceptanceSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_p_m: Optional[float] = Field(default=None, ge=0, le=1)
    max_p_s: Optional[float] = Field(default=None, ge=0, le=1)
    max_objective: Optional[float] = Field(default=None, ge=0)
    require_certified: bool = False
    require_converged: bool = False


class AblationSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # moltiplicatori lambda / beta / mu sui pesi degli stage >= 2
    multipliers: Dict[str, float] = Field(default_factory=dict)
    variants: List[str] = Field(default_factory=lambda: list(BENCH_VARIANTS))

    @field_validator("multipliers")
    @classmethod
    def _known_multipliers(cls, value: Dict[str, float]):
        unknown = set(value) - set(MULTIPLIER_FIELDS)
        if unknown:
            raise ValueError(f"unknown multiplier keys {sorted(unknown)}")
        if any(m < 0 for m in value.values()):
            raise ValueError("multipliers must be nonnegative")
        return value

    @field_validator("variants")
    @classmethod
    def _known_variants(cls, value: List[str]):
        unknown = [v for v in value if v not in BENCH_VARIANTS]
        if unknown:
            raise ValueError(f"unknown bench variants {unknown}, expected some of {list(BENCH_VARIANTS)}")
        return value


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    environment: EnvironmentSection = Field(default_factory=EnvironmentSection)
    plan: PlanSection = Field(default_factory=PlanSection)
    trainer: TrainerSection = Field(default_factory=TrainerSection)
    metrics: MetricsSection = Field(default_factory=MetricsSection)
    output: OutputSection = Field(default_factory=OutputSection)
    acceptance: AcceptanceSection = Field(default_factory=AcceptanceSection)
    ablation: AblationSection = Field(default_factory=AblationSection)


def _first_error(e: ValidationError, prefix: str = "") -> Tuple[str, str]:
    first = e.errors()[0]
    key = ".".join(str(p) for p in first["loc"])
    return first["msg"], f"{prefix}{key}" if key else prefix.rstrip(".")


def resolve_config_path(config: Union[str, Path]) -> Path:
    """Percorso esistente, oppure nome di una configurazione inclusa nel pacchetto."""
    path = Path(config)
    if path.is_file():
        return path
    if path.parent == Path("."):
        candidate = CONFIGS_FOLDER / (path.name if path.suffix else f"{path.name}.yaml")
        if candidate.is_file():
            return candidate
    raise ConfigurationError("Configuration file not found", path=str(config))


def load_config(config: Union[str, Path]) -> ExperimentConfig:
    path = resolve_config_path(config)
    try:
        with path.open("r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML: {e}", path=str(path))
    if not isinstance(raw, dict):
        raise ConfigurationError("The configuration must be a mapping", path=str(path))

    try:
        parsed = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        msg, key = _first_error(e)
        raise ConfigurationError(f"Invalid configuration: {msg}", path=str(path), key=key)

    check_config(parsed, str(path))
    logger.info(f"Configuration '{parsed.name}' loaded from {path}")
    return parsed


def check_config(config: ExperimentConfig, path: Optional[str] = None) -> None:
    """Controlli che coinvolgono più sezioni, fatti prima di qualsiasi addestramento."""
    environment_config(config.environment, path)

    cost_kind = config.environment.cost_kind
    n_stages = config.plan.stages + (0 if cost_kind == CostKind.MINIMUM_TIME else 1)
    steps = config.plan.steps_per_stage
    if isinstance(steps, list) and len(steps) != n_stages:
        raise ConfigurationError(
            f"steps_per_stage has {len(steps)} entries, the plan has {n_stages} stages", path=path, key="plan.steps_per_stage"
        )
    if cost_kind != CostKind.MINIMUM_TIME and not config.plan.estimate_tau and config.plan.tau is None:
        raise ConfigurationError(
            f"A {cost_kind.value} plan ends with a cost-weighted stage that needs τ: set plan.tau or plan.estimate_tau",
            path=path,
            key="plan.tau",
        )


# ====================================================================
# AMBIENTE, PESI, TRAINER
# ====================================================================


def environment_config(section: EnvironmentSection, path: Optional[str] = None):
    params = {**section.params, "cost_kind": section.cost_kind}
    model = coverage.CoverageConfig if section.kind == "coverage" else gridworld.GridworldConfig
    try:
        return model.model_validate(params)
    except ValidationError as e:
        msg, key = _first_error(e, "environment.params.")
        raise ConfigurationError(f"Invalid {section.kind} parameters: {msg}", path=path, key=key)


def build_environment(section: EnvironmentSection) -> Tuple[ControlProblem, GuidanceFunction]:
    env_config = environment_config(section)
    if section.kind == "coverage":
        return coverage.build(env_config), coverage.guidance_function(env_config)
    return gridworld.build(env_config), gridworld.guidance(env_config)


def weight_policy(
    config: ExperimentConfig,
    problem: ControlProblem,
    guidance: GuidanceFunction,
    multipliers: Optional[Dict[str, float]] = None,
) -> WeightPolicy:
    w = config.plan.weights
    return WeightPolicy(
        alpha=w.alpha,
        gamma_m=w.gamma_m,
        epsilon=w.epsilon,
        use_guidance=w.use_guidance,
        rho=w.rho if w.rho is not None else guidance.rho,
        t_max=problem.horizon,
        multipliers=config.ablation.multipliers if multipliers is None else multipliers,
        overrides=w.overrides,
    )


def make_trainer(section: TrainerSection, seed: int, sample_every: int = 0) -> Trainer:
    if section.kind == "exact":
        return ExactTrainer()
    params = QLearningParams(
        learning_rate=section.learning_rate,
        epsilon_start=section.epsilon_start,
        epsilon_end=section.epsilon_end,
        decay_fraction=section.decay_fraction,
        seed=seed,
        sample_every=sample_every,
    )
    return QLearningTrainer(params)


def output_dir(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> Path:
    if out is not None:
        return Path(out)
    if config.output.directory:
        return Path(config.output.directory)
    return Path(settings.OUTPUT_DIR) / config.name


# ====================================================================
# RECORD
# ====================================================================


class StageSummary(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    index: int
    theorem: Theorem
    budget: float
    weights: WeightVector
    certified: bool
    converged: bool
    terminal_rate: float
    violation_rate: float
    policy_path: str
    notes: List[str] = Field(default_factory=list)


class SeedRun(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    seed: int
    variant: str = "certified"
    stages: List[StageSummary] = Field(default_factory=list)
    metrics_path: Optional[str] = None
    certificates_path: Optional[str] = None
    tc: Optional[TcEstimate] = None
    tau: Optional[TauEstimate] = None
    # ultima riga smussata della serie
    final_metrics: Optional[MetricSample] = None
    # distribuzione di g(x) lungo le traiettorie dello stage 1, per scegliere ξ
    constraint_profile: Dict[str, float] = Field(default_factory=dict)
    converged: bool = False
    failed: bool = False
    failure: Optional[str] = None
    warnings: List[str] = Field(default_factory=list)

    @property
    def certified(self) -> bool:
        return all(s.certified for s in self.stages)


class CertificateLog(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    seed: int
    variant: str
    certificates: List[BoundCertificate]


class AcceptanceOutcome(BaseModel):
    passed: bool = True
    failures: List[str] = Field(default_factory=list)


class RunRecord(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    name: str
    config: Dict[str, Any]
    runs: List[SeedRun]
    acceptance: AcceptanceOutcome = Field(default_factory=AcceptanceOutcome)
    report_path: Optional[str] = None

    @property
    def certified(self) -> bool:
        return all(run.certified for run in self.runs)


def write_json(model: BaseModel, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(model.model_dump_json(indent=2))
        f.write("\n")
    return path


def constraint_profile(problem: ControlProblem, policy: PolicyTable) -> Dict[str, float]:
    """Statistiche di g(x) sugli stati visitati dalla policy dello stage 1 (problema senza vincolo)."""
    relaxed = problem.relaxed()
    scheme = RewardScheme(WeightVector(alpha=1.0))
    g = problem.constraint.g
    values = []
    for s0 in relaxed.initial_set:
        trace = rollout(relaxed, policy, s0, scheme)
        values.append(g(s0))
        values.extend(g(record.next_state) for record in trace.steps)
    arr = np.asarray(values, dtype=float)
    arr = arr[np.isfinite(arr)]
    if arr.size == 0:
        return {}
    return {
        "min": float(arr.min()),
        "mean": float(arr.mean()),
        "p90": float(np.quantile(arr, 0.9)),
        "max": float(arr.max()),
    }


# ====================================================================
# ESECUZIONE
# ====================================================================


def run_seed(
    config: ExperimentConfig,
    problem: ControlProblem,
    guidance: GuidanceFunction,
    seed: int,
    out_dir: Path,
    variant: str = "certified",
    multipliers: Optional[Dict[str, float]] = None,
) -> SeedRun:
    plan_cfg = config.plan
    policy = weight_policy(config, problem, guidance, multipliers)
    plan = build_plan(plan_cfg.xi, plan_cfg.stages, plan_cfg.steps_per_stage, policy, problem.cost_kind)
    trainer = make_trainer(config.trainer, seed, config.metrics.sample_every)

    target = TransitionModel(problem)
    rng = np.random.default_rng([seed, EVAL_STREAM])
    fail_value = objective_fail_value(problem.cost_kind, problem.horizon, problem.num_agents)
    offsets = np.concatenate([[0], np.cumsum([s.training_steps for s in plan.stages])]).astype(int)
    samples: List[MetricSample] = []

    def monitor(stage, episode: int, actions: np.ndarray) -> None:
        summaries = sample_episodes(target, actions, rng, config.metrics.episodes)
        step = int(offsets[stage.index - 1]) + episode
        samples.append(compute_metrics(summaries, fail_value, problem.cost_kind, step=step, stage=stage.index))

    logger.info(f"[{variant}] seed {seed}: {len(plan.stages)} stages, budgets {plan.budgets}")
    run = SeedRun(seed=seed, variant=variant)
    try:
        result = run_plan(
            plan,
            problem,
            trainer,
            guidance,
            halt_on_failure=plan_cfg.halt_on_failure,
            monitor=monitor,
            fixed_tau=None if plan_cfg.estimate_tau else plan_cfg.tau,
        )
    except StageError as e:
        logger.error(f"[{variant}] seed {seed}: {e}")
        result = e.partial

    prefix = f"seed{seed}"
    out_dir.mkdir(parents=True, exist_ok=True)

    frame = samples_frame(samples)
    frame = smooth_frame(frame, config.metrics.window)
    metrics_file = out_dir / f"metrics_{prefix}.csv"
    frame.to_csv(metrics_file, index=False, lineterminator="\n")
    run.metrics_path = metrics_file.name

    certificates = []
    for artifact in result.artifacts:
        stage = artifact.stage
        policy_file = write_policy(artifact.policy, problem, out_dir / f"policy_{prefix}_stage{stage.index}.tsv")
        outcomes = list(artifact.evaluation.outcomes.values())
        run.stages.append(
            StageSummary(
                index=stage.index,
                theorem=stage.theorem,
                budget=stage.budget,
                weights=stage.weights,
                certified=artifact.certificate.satisfied,
                converged=artifact.converged,
                terminal_rate=float(np.mean([o.terminal_met for o in outcomes])),
                violation_rate=float(np.mean([o.violated for o in outcomes])),
                policy_path=policy_file.name,
                notes=list(artifact.notes),
            )
        )
        certificates.append(artifact.certificate)
        if not artifact.certificate.satisfied:
            failed = [k for k, ok in artifact.certificate.checks.items() if not ok]
            run.warnings.append(f"stage {stage.index}: certificate not satisfied ({', '.join(failed)})")

    run.certificates_path = write_json(
        CertificateLog(seed=seed, variant=variant, certificates=certificates), out_dir / f"certificates_{prefix}.json"
    ).name

    if len(frame):
        last = frame.iloc[-1]
        run.final_metrics = MetricSample(
            step=int(last["step"]),
            stage=int(last["stage"]),
            **{col: float(last[f"{col}_smooth"]) for col in METRIC_COLUMNS},
        )
    if result.artifacts:
        run.constraint_profile = constraint_profile(problem, result.artifacts[0].policy)

    run.tc, run.tau = result.tc, result.tau
    run.converged = result.converged
    run.failed = result.failed
    run.failure = result.failure
    logger.info(f"[{variant}] seed {seed} done: converged={run.converged} final={run.final_metrics}")
    return run


def check_acceptance(acceptance: AcceptanceSection, runs: List[SeedRun]) -> AcceptanceOutcome:
    failures = []
    thresholds = {"p_m": acceptance.max_p_m, "p_s": acceptance.max_p_s, "objective": acceptance.max_objective}
    for run in runs:
        tag = f"seed {run.seed}"
        if run.failed:
            failures.append(f"{tag}: {run.failure}")
        metrics = run.final_metrics
        for name, limit in thresholds.items():
            if limit is None:
                continue
            if metrics is None:
                failures.append(f"{tag}: no metric samples")
                break
            value = getattr(metrics, name)
            if value > limit:
                failures.append(f"{tag}: smoothed {name} = {value:.4g} > {limit}")
        if acceptance.require_certified and not run.certified:
            failures.append(f"{tag}: some stage certificates are not satisfied")
        if acceptance.require_converged and not run.converged:
            failures.append(f"{tag}: some stages did not converge")
    return AcceptanceOutcome(passed=not failures, failures=failures)


def execute(config: ExperimentConfig, seed: Optional[int] = None, out: Optional[Union[str, Path]] = None) -> RunRecord:
    # import locale: il report importa i tipi di questo modulo
    from rewardesign.harness.report import write_report

    seeds = [seed] if seed is not None else list(config.seeds)
    out_dir = output_dir(config, out)
    problem, guidance = build_environment(config.environment)

    runs = [run_seed(config, problem, guidance, s, out_dir) for s in seeds]
    record = RunRecord(
        name=config.name,
        config=config.model_dump(mode="json"),
        runs=runs,
        acceptance=check_acceptance(config.acceptance, runs),
    )
    for failure in record.acceptance.failures:
        logger.warning(f"Acceptance: {failure}")
    if config.output.report:
        record.report_path = write_report(record, out_dir).name
    write_json(record, out_dir / "run_record.json")
    logger.info(f"Run '{config.name}' written to {out_dir} (acceptance passed={record.acceptance.passed})")
    return record


def run_experiment(
    config_path: Union[str, Path], seed: Optional[int] = None, out: Optional[Union[str, Path]] = None
) -> RunRecord:
    return execute(load_config(config_path), seed, out)


# ====================================================================
# STAGE SINGOLO
# ====================================================================


def train_stage(
    config_path: Union[str, Path],
    stage_index: int,
    seed: Optional[int] = None,
    out: Optional[Union[str, Path]] = None,
) -> Tuple[StageArtifact, Path]:
    """
    Addestra un solo stage del piano, senza warm start. Gli stage che dipendono
    da stime (t_c, τ) usano i valori provvisori del piano.
    """
    config = load_config(config_path)
    seed = config.seeds[0] if seed is None else seed
    problem, guidance = build_environment(config.environment)
    plan = build_plan(
        config.plan.xi,
        config.plan.stages,
        config.plan.steps_per_stage,
        weight_policy(config, problem, guidance),
        problem.cost_kind,
    )
    if not 1 <= stage_index <= len(plan.stages):
        raise ConfigurationError(f"Stage {stage_index} is not in the plan (1..{len(plan.stages)})", key="stage")

    stage = plan.stages[stage_index - 1]
    stage_problem = problem.with_budget(stage.budget).with_cost(stage.cost_kind)
    scheme = stage_scheme(stage, guidance)
    trainer = make_trainer(config.trainer, seed)
    outcome = trainer.train(stage_problem, scheme, stage.training_steps, stage.index)
    evaluation = evaluate_policy(stage_problem, outcome.policy, scheme)
    artifact = StageArtifact(
        stage, outcome, evaluation, certify(stage.weights, stage.theorem, stage.inputs), is_converged(stage, evaluation)
    )
    if stage.provisional:
        artifact.notes.append("provisional weights: estimates from earlier stages were not available")

    path = write_policy(outcome.policy, problem, output_dir(config, out) / f"policy_seed{seed}_stage{stage.index}.tsv")
    logger.info(f"Stage {stage.index} trained (converged={artifact.converged}), policy written to {path}")
    return artifact, path


# ====================================================================
# ABLAZIONI
# ====================================================================


@dataclass
class BenchResult:
    frame: pd.DataFrame
    summary: pd.DataFrame
    records: Dict[str, List[SeedRun]] = field(default_factory=dict)
    dominates_lambda: Optional[bool] = None
    dominates_beta: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.dominates_lambda is not False and self.dominates_beta is not False


def _dominates(summary: pd.DataFrame, metric: str, other: str) -> Optional[bool]:
    """La variante certificata ha `metric` strettamente minore di `other` (media sui seed)."""
    means = summary.set_index("variant")[metric]
    if "certified" not in means.index or other not in means.index:
        return None
    a, b = means["certified"], means[other]
    if math.isnan(a) or math.isnan(b):
        return None
    return bool(a < b)


def run_bench(
    config_path: Union[str, Path], seed: Optional[int] = None, out: Optional[Union[str, Path]] = None
) -> BenchResult:
    config = load_config(config_path)
    seeds = [seed] if seed is not None else list(config.seeds)
    base = output_dir(config, out)
    problem, guidance = build_environment(config.environment)

    rows, records = [], {}
    for variant in config.ablation.variants:
        runs = [
            run_seed(config, problem, guidance, s, base / variant, variant, BENCH_VARIANTS[variant]) for s in seeds
        ]
        records[variant] = runs
        for run in runs:
            m = run.final_metrics
            rows.append(
                {
                    "variant": variant,
                    "seed": run.seed,
                    "p_m": m.p_m if m else math.nan,
                    "p_s": m.p_s if m else math.nan,
                    "objective": m.objective if m else math.nan,
                    "certified": run.certified,
                    "converged": run.converged,
                }
            )

    frame = pd.DataFrame(rows, columns=["variant", "seed", *METRIC_COLUMNS, "certified", "converged"])
    summary = frame.groupby("variant", sort=False)[METRIC_COLUMNS].mean().reset_index()
    result = BenchResult(
        frame,
        summary,
        records,
        dominates_lambda=_dominates(summary, "p_s", "lambda_x0.1"),
        dominates_beta=_dominates(summary, "p_m", "beta_x10"),
    )

    base.mkdir(parents=True, exist_ok=True)
    frame.to_csv(base / "bench.csv", index=False, lineterminator="\n")
    summary.to_csv(base / "bench_summary.csv", index=False, lineterminator="\n")
    logger.info(
        f"Bench '{config.name}': certified beats lambda_x0.1 on p_s: {result.dominates_lambda}, "
        f"beats beta_x10 on p_m: {result.dominates_beta}"
    )
    return result
