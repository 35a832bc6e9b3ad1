import numpy as np
import pytest

from rewardesign.control.pomdp import EpisodeSummary
from rewardesign.control.problem import CostKind
from rewardesign.control.reward import RewardScheme, WeightVector
from rewardesign.control.solver import TransitionModel, exact_dp
from rewardesign.core.errors import DomainError
from rewardesign.harness.metrics import (
    compute_metrics,
    objective_fail_value,
    sample_episodes,
    samples_frame,
    smooth_frame,
    smooth_metrics,
)

CLEAN = EpisodeSummary(terminal_met=True, violated=False, final_time=3, cumulative_cost=2.0)
COLLISION = EpisodeSummary(terminal_met=False, violated=True, final_time=1, cumulative_cost=1.0)
TIMEOUT = EpisodeSummary(terminal_met=False, violated=False, final_time=10, cumulative_cost=10.0)


def test_fail_values():
    assert objective_fail_value(CostKind.MINIMUM_TIME, 10, 2) == 20.0
    assert objective_fail_value(CostKind.MINIMUM_ACTION, 10, 2) == 20.0
    assert objective_fail_value(CostKind.MINIMUM_FUEL, 4, 3) == 12.0


def test_compute_metrics_pads_failures():
    sample = compute_metrics([CLEAN, COLLISION, TIMEOUT, CLEAN], 20.0, step=500, stage=2)
    assert sample.p_m == 0.5
    assert sample.p_s == 0.25
    assert sample.objective == pytest.approx((3 + 20 + 20 + 3) / 4)
    assert (sample.step, sample.stage) == (500, 2)


def test_compute_metrics_uses_cost_for_cost_objectives():
    sample = compute_metrics([CLEAN, CLEAN], 20.0, CostKind.MINIMUM_ACTION)
    assert sample.objective == 2.0


def test_compute_metrics_needs_episodes():
    with pytest.raises(DomainError):
        compute_metrics([], 20.0)


def test_smoothing_window():
    assert smooth_metrics([1, 2, 3, 4, 5], 3) == [2.0, 2.0, 3.0, 4.0, 4.0]
    assert smooth_metrics([1, 2, 3], 1) == [1.0, 2.0, 3.0]
    assert smooth_metrics([1, 2, 3], 5) == [2.0, 2.0, 2.0]
    with pytest.raises(DomainError):
        smooth_metrics([], 3)
    with pytest.raises(DomainError):
        smooth_metrics([1.0], 0)


def test_smooth_frame_adds_columns():
    samples = [compute_metrics([CLEAN], 20.0, step=s) for s in (1, 2, 3)]
    frame = smooth_frame(samples_frame(samples), 2)
    assert list(frame.columns) == [
        "step",
        "stage",
        "p_m",
        "p_s",
        "objective",
        "p_m_smooth",
        "p_s_smooth",
        "objective_smooth",
    ]
    assert frame["objective_smooth"].tolist() == [3.0, 3.0, 3.0]


def test_sample_episodes_follow_the_greedy_policy(line_problem):
    scheme = RewardScheme(WeightVector(alpha=10.0, discount=0.9), minimum_time=True)
    policy, _ = exact_dp(line_problem, scheme)
    model = TransitionModel(line_problem)
    summaries = sample_episodes(model, policy.to_actions(line_problem), np.random.default_rng(0), 5)
    assert summaries == [EpisodeSummary(True, False, 2, 2.0)] * 5
