import math

import pytest
from pydantic import ValidationError

from rewardesign.control.bounds import Theorem
from rewardesign.control.curriculum import (
    WeightPolicy,
    budget_schedule,
    build_plan,
    refine_stage,
    run_plan,
)
from rewardesign.control.problem import CostKind
from rewardesign.control.solver import ExactTrainer, QLearningParams, QLearningTrainer
from rewardesign.core.errors import ConfigurationError, DomainError, StageError
from rewardesign.envs import gridworld
from tests.conftest import single


@pytest.fixture
def weight_policy():
    return WeightPolicy(alpha=10.0, gamma_m=0.9, rho=1.0, t_max=4)


def test_budget_schedule():
    assert budget_schedule(0.3, 2) == [math.inf, 0.0]
    assert budget_schedule(0.3, 3) == [math.inf, 0.3, 0.0]
    assert budget_schedule(0.3, 4) == pytest.approx([math.inf, 0.3, 0.15, 0.0])
    assert budget_schedule(0.4, 4) == [math.inf, 0.4, 0.2, 0.0]
    assert budget_schedule(0.5, 5) == [math.inf, 0.5, 0.5 - 0.5 / 3, 0.5 - 1.0 / 3, 0.0]
    with pytest.raises(DomainError):
        budget_schedule(0.0, 3)
    with pytest.raises(DomainError):
        budget_schedule(0.3, 1)


def test_minimum_time_plan(weight_policy):
    plan = build_plan(0.3, 3, 100, weight_policy)
    assert [s.theorem for s in plan.stages] == [Theorem.C1, Theorem.T2, Theorem.T2]
    assert plan.budgets == [math.inf, 0.3, 0.0]
    assert [s.warm_start_from for s in plan.stages] == [None, 1, 2]
    assert plan.stages[0].weights.lambda_pen == 0.0
    assert not plan.stages[0].provisional
    assert plan.stages[1].provisional


def test_minimum_action_plan_adds_a_cost_stage(weight_policy):
    plan = build_plan(0.3, 3, [10, 20, 30, 40], weight_policy, CostKind.MINIMUM_ACTION)
    final = plan.stages[-1]
    assert len(plan.stages) == 4
    assert final.theorem == Theorem.T1
    assert final.budget == 0.0
    assert final.cost_kind == CostKind.MINIMUM_ACTION
    assert final.weights.discount == 1.0
    assert final.weights.beta == 0.0
    assert [s.training_steps for s in plan.stages] == [10, 20, 30, 40]
    assert all(s.cost_kind == CostKind.MINIMUM_TIME for s in plan.stages[:-1])


def test_steps_must_match_the_stage_count(weight_policy):
    with pytest.raises(ConfigurationError) as e:
        build_plan(0.3, 3, [10, 20], weight_policy)
    assert e.value.key == "steps_per_stage"


def test_weight_policy_validation():
    with pytest.raises(ValidationError):
        WeightPolicy(t_max=4)
    with pytest.raises(ValidationError):
        WeightPolicy(rho=1.0, t_max=4, multipliers={"alpha": 2.0})
    assert WeightPolicy(use_guidance=False, t_max=4).rho is None


def test_refine_uses_the_estimates(weight_policy):
    plan = build_plan(0.3, 3, 100, weight_policy)
    refined = refine_stage(plan.stages[1], weight_policy, t_c=1, tau=None)
    assert not refined.provisional
    assert refined.inputs.t_c == 1
    assert refined.weights.lambda_pen == pytest.approx(1.05 * 10.0 * 0.9 ** (1 - 4))
    assert refine_stage(plan.stages[1], weight_policy, t_c=None, tau=None) is plan.stages[1]


def test_multipliers_and_overrides_apply_from_stage_two():
    policy = WeightPolicy(alpha=10.0, gamma_m=0.9, rho=1.0, t_max=4, multipliers={"lambda": 0.1}, overrides={3: {"beta": 0.0}})
    plan = build_plan(0.3, 3, 100, policy)
    reference = build_plan(0.3, 3, 100, WeightPolicy(alpha=10.0, gamma_m=0.9, rho=1.0, t_max=4))
    assert plan.stages[0].weights == reference.stages[0].weights
    assert plan.stages[1].weights.lambda_pen == pytest.approx(0.1 * reference.stages[1].weights.lambda_pen)
    assert plan.stages[2].weights.beta == 0.0


def test_run_plan_estimates_and_converges(hazard_goal_config, weight_policy):
    problem = gridworld.build(hazard_goal_config)
    guidance = gridworld.guidance(hazard_goal_config)
    plan = build_plan(0.3, 3, 10, weight_policy)
    seen = []

    result = run_plan(plan, problem, ExactTrainer(), guidance, monitor=lambda stage, e, a: seen.append((stage.index, e)))
    assert result.converged
    assert not result.failed
    assert result.tc.value == 1
    assert result.tau.value == 3.0
    assert seen == [(1, 10), (2, 10), (3, 10)]
    assert all(a.certificate.satisfied for a in result.artifacts)
    # lo stage 1 va al goal pericoloso, poi il vincolo lo esclude
    assert result.artifacts[0].evaluation.outcomes[single(1)].final_time == 1
    assert result.artifacts[-1].evaluation.outcomes[single(1)].final_time == 3
    assert result.artifacts[-1].evaluation.clean


@pytest.mark.parametrize("first", ["exact", "q_learning"])
def test_each_stage_starts_from_the_previous_policy(hazard_goal_config, weight_policy, first):
    problem = gridworld.build(hazard_goal_config)
    guidance = gridworld.guidance(hazard_goal_config)
    learner = QLearningTrainer(QLearningParams(seed=4))

    class FirstStageTrainer:
        name = "mixed"

        def train(self, problem, scheme, episodes, stage_index, warm_start=None, on_sample=None):
            if stage_index == 1 and first == "exact":
                return ExactTrainer().train(problem, scheme, episodes, stage_index, warm_start, on_sample)
            return learner.train(problem, scheme, episodes, stage_index, warm_start, on_sample)

    # stage 2 e 3 senza episodi: ogni stage parte dalla policy del precedente
    plan = build_plan(0.3, 3, [400, 0, 0], weight_policy)
    result = run_plan(plan, problem, FirstStageTrainer(), guidance, halt_on_failure=False)
    tables = [a.policy.mapping for a in result.artifacts]
    assert tables[1] == tables[0]
    assert tables[2] == tables[1]


def test_run_plan_with_a_cost_stage(hazard_goal_config, weight_policy):
    config = hazard_goal_config.model_copy(update={"cost_kind": CostKind.MINIMUM_ACTION})
    problem = gridworld.build(config)
    plan = build_plan(0.3, 3, 10, weight_policy, CostKind.MINIMUM_ACTION)

    result = run_plan(plan, problem, ExactTrainer(), gridworld.guidance(config))
    final = result.artifacts[-1]
    assert result.converged
    assert result.tau.value == 3.0
    assert final.stage.theorem == Theorem.T1
    assert final.stage.weights.mu == pytest.approx(-10.0 / 3.0 * 0.95)
    assert final.certificate.satisfied
    assert final.evaluation.clean


def test_fixed_tau_skips_estimation(hazard_goal_config, weight_policy):
    config = hazard_goal_config.model_copy(update={"cost_kind": CostKind.MINIMUM_ACTION})
    problem = gridworld.build(config)
    plan = build_plan(0.3, 3, 10, weight_policy, CostKind.MINIMUM_ACTION)

    result = run_plan(plan, problem, ExactTrainer(), fixed_tau=5.0)
    assert result.tau is None
    assert result.artifacts[-1].stage.inputs.tau == 5.0
    assert any("fixed" in note for note in result.artifacts[2].notes)
    with pytest.raises(DomainError):
        run_plan(plan, problem, ExactTrainer(), fixed_tau=0.0)


def test_cost_kind_must_match_the_plan(hazard_goal_config, weight_policy):
    problem = gridworld.build(hazard_goal_config)
    plan = build_plan(0.3, 3, 10, weight_policy, CostKind.MINIMUM_ACTION)
    with pytest.raises(ConfigurationError):
        run_plan(plan, problem, ExactTrainer())


def test_halting_on_a_failed_stage(hazard_goal_config):
    problem = gridworld.build(hazard_goal_config)
    policy = WeightPolicy(alpha=10.0, gamma_m=0.9, rho=1.0, t_max=4, multipliers={"lambda": 0.0})
    plan = build_plan(0.3, 3, 10, policy)

    with pytest.raises(StageError) as e:
        run_plan(plan, problem, ExactTrainer(), halt_on_failure=True)
    assert e.value.stage_index == 2
    assert e.value.metrics["violation_rate"] == 1.0
    assert len(e.value.partial.artifacts) == 2
    assert e.value.partial.failed


def test_continuing_past_a_failed_stage(hazard_goal_config):
    problem = gridworld.build(hazard_goal_config)
    policy = WeightPolicy(alpha=10.0, gamma_m=0.9, rho=1.0, t_max=4, multipliers={"lambda": 0.0})
    plan = build_plan(0.3, 3, 10, policy)

    result = run_plan(plan, problem, ExactTrainer(), halt_on_failure=False)
    assert len(result.artifacts) == 3
    assert not result.converged
    assert "not converged" in result.artifacts[1].notes
    assert result.failure == "some stages did not converge"
