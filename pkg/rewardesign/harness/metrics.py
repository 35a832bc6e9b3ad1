"""
Metriche di addestramento.

p_m        frazione di episodi con collisione o copertura incompleta
p_s        frazione di episodi con collisione
objective  media del tempo finale (o del costo cumulato); gli episodi che
           violano un vincolo valgono objective_fail_value
"""

import logging
from typing import Iterable, List, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from rewardesign.control.pomdp import EpisodeSummary
from rewardesign.control.problem import CostKind
from rewardesign.control.solver import TransitionModel
from rewardesign.core.errors import DomainError

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["p_m", "p_s", "objective"]


class MetricSample(BaseModel):
    step: int = Field(ge=0)
    stage: int = Field(default=1, ge=1)
    p_m: float = Field(ge=0, le=1)
    p_s: float = Field(ge=0, le=1)
    objective: float = Field(ge=0)


def objective_fail_value(cost_kind: CostKind, horizon: int, num_agents: int) -> float:
    """2·horizon per il tempo, horizon·agenti per azioni (e carburante/costi custom)."""
    if cost_kind == CostKind.MINIMUM_TIME:
        return float(2 * horizon)
    return float(horizon * num_agents)


def compute_metrics(
    evaluations: Sequence[EpisodeSummary],
    objective_fail_value: float,
    cost_kind: CostKind = CostKind.MINIMUM_TIME,
    step: int = 0,
    stage: int = 1,
) -> MetricSample:
    if len(evaluations) == 0:
        raise DomainError("compute_metrics needs at least one episode")

    failed = np.array([e.violated or not e.terminal_met for e in evaluations], dtype=bool)
    collided = np.array([e.violated for e in evaluations], dtype=bool)
    raw = np.array(
        [e.final_time if cost_kind == CostKind.MINIMUM_TIME else e.cumulative_cost for e in evaluations], dtype=float
    )
    objective = np.where(failed, objective_fail_value, raw)

    sample = MetricSample(
        step=step,
        stage=stage,
        p_m=float(failed.mean()),
        p_s=float(collided.mean()),
        objective=float(objective.mean()),
    )
    logger.debug(f"step={step} stage={stage} p_m={sample.p_m:.3f} p_s={sample.p_s:.3f} objective={sample.objective:.3f}")
    return sample


def sample_episodes(model: TransitionModel, actions: np.ndarray, rng: np.random.Generator, episodes: int) -> List[EpisodeSummary]:
    """Episodi greedy da stati iniziali estratti uniformemente dall'insieme iniziale."""
    problem = model.problem
    starts = [problem.state_index[s] for s in problem.initial_set]
    picks = rng.integers(len(starts), size=episodes)
    return [model.summarize(actions, starts[int(i)]) for i in picks]


def smooth_metrics(series: Iterable[float], window: int) -> List[float]:
    """
    Media mobile centrata: finestra di esattamente `window` campioni che parte
    da i − window//2, spostata per restare dentro la serie ai bordi. Se la
    serie è più corta della finestra si usa la media dell'intera serie.
    """
    values = np.asarray(list(series), dtype=float)
    n = len(values)
    if n == 0:
        raise DomainError("cannot smooth an empty series")
    if window < 1:
        raise DomainError(f"window must be >= 1, got {window}")
    if window == 1:
        return values.tolist()
    if n <= window:
        return [float(values.mean())] * n

    starts = np.clip(np.arange(n) - window // 2, 0, n - window)
    return [float(values[s : s + window].mean()) for s in starts]


def smooth_frame(df: pd.DataFrame, window: int, columns: Sequence[str] = METRIC_COLUMNS) -> pd.DataFrame:
    out = df.copy()
    for col in columns:
        out[f"{col}_smooth"] = smooth_metrics(df[col], window) if len(df) else []
    return out


def samples_frame(samples: Sequence[MetricSample]) -> pd.DataFrame:
    return pd.DataFrame([s.model_dump() for s in samples], columns=["step", "stage", *METRIC_COLUMNS])
