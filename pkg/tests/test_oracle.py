import numpy as np
import pytest

from rewardesign.control.bounds import BoundInputs, Theorem, preset_weights
from rewardesign.control.oracle import (
    PolicyClass,
    classify,
    enumerate_traces,
    oracle_tau,
    oracle_tc,
    run_random_suite,
    run_witness_suite,
    verify_corollary1,
    verify_theorem1,
    verify_theorem2,
    verify_weights,
)
from rewardesign.control.reward import RewardScheme, WeightVector
from rewardesign.control.solver import TransitionModel, exact_dp
from rewardesign.core.errors import CapacityError, PreconditionError
from rewardesign.core.records import write_enumeration
from rewardesign.envs import gridworld
from tests.conftest import single, two_action_line


@pytest.fixture
def min_time_scheme():
    return RewardScheme(WeightVector(alpha=10.0, discount=0.9), minimum_time=True)


def test_classify():
    assert classify(True, False) == PolicyClass.PI3
    assert classify(True, True) == PolicyClass.PI2
    assert classify(False, False) == PolicyClass.PI1
    assert classify(False, True) == PolicyClass.PI0
    assert classify(True, True, constrained=False) == PolicyClass.PI5
    assert classify(False, False, constrained=False) == PolicyClass.PI4


def test_enumeration_truncates_at_termination(min_time_scheme):
    problem = two_action_line()
    report = enumerate_traces(problem, min_time_scheme, 0)
    # LLL LLR LRL LRR RLL RLR RR
    assert report.count == 7
    assert report.class_counts[PolicyClass.PI3] == 2
    assert report.class_counts[PolicyClass.PI1] == 5
    assert report.best_return == pytest.approx(9.0)
    assert report.argmax_count == 1
    assert report.argmax_examples[0].actions == (1, 1)
    assert report.feasible_min_time == 2
    assert report.best_constrained == 2.0


def test_enumeration_capacity(line_problem, min_time_scheme):
    with pytest.raises(CapacityError) as e:
        enumerate_traces(line_problem, min_time_scheme, single(0), cap=100)
    assert e.value.size == 5**3


def test_dp_and_enumeration_agree(hazard_goal_config):
    problem = gridworld.build(hazard_goal_config)
    weights = preset_weights(Theorem.T2, BoundInputs(alpha=10.0, gamma_m=0.9, t_max=4, t_c=1, rho=1.0), use_guidance=False)
    scheme = RewardScheme(weights, minimum_time=True)
    _, values = exact_dp(problem, scheme)
    report = enumerate_traces(problem, scheme, single(1), keep_records=False)
    assert values.value(single(1)) == report.best_return


def test_enumeration_frame(line_problem, min_time_scheme, tmp_path):
    report = enumerate_traces(line_problem, min_time_scheme, single(0))
    frame = report.to_frame(line_problem)
    assert len(frame) == report.count
    assert list(frame.columns) == ["actions", "class", "return", "final_time", "cost", "objective"]

    path = write_enumeration(report, line_problem, tmp_path / "enum.csv")
    assert path.read_text().splitlines()[0] == "actions,class,return,final_time,cost,objective"


def test_verify_weights_requires_a_feasible_instance(blocked_problem):
    scheme = RewardScheme(WeightVector(alpha=10.0, lambda_pen=11.0, mu=-1.0))
    with pytest.raises(PreconditionError):
        verify_weights(blocked_problem, scheme, Theorem.T1)
    with pytest.raises(PreconditionError):
        oracle_tau(blocked_problem)


def test_oracle_parameters():
    costly = gridworld.build(gridworld.costly_goal_witness())
    assert oracle_tau(costly) == 2.0
    assert oracle_tau(costly, mode="worst") == 3.0
    assert oracle_tc(gridworld.build(gridworld.dead_end_witness())) == 3


def test_theorem_checks_on_the_hazardous_goal(hazard_goal_config):
    problem = gridworld.build(hazard_goal_config)
    assert verify_theorem1(problem).passed
    assert verify_theorem2(problem, gamma_m=0.9).passed
    verdict = verify_corollary1(problem, gamma_m=0.9)
    assert verdict.passed
    # senza vincolo di stato il goal pericoloso è il più vicino
    assert verdict.argmax_classes[single(1)] == {"Pi5": 1}


def test_too_small_penalty_is_caught(hazard_goal_config):
    problem = gridworld.build(hazard_goal_config)
    valid = verify_theorem2(problem, gamma_m=0.9)
    weights = valid.weights.with_values(lambda_pen=0.0)
    verdict = verify_weights(problem, RewardScheme(weights, minimum_time=True), Theorem.T2, valid.inputs)
    assert not verdict.passed
    assert verdict.checks["argmax_class"] is False
    assert verdict.counterexamples[0][1].policy_class == PolicyClass.PI2
    assert "FAIL" in verdict.summary()


def test_witnesses_show_each_bound_is_needed():
    results = {w.name: w for w in run_witness_suite()}
    assert all(w.demonstrated for w in results.values())
    assert results["shortcut_witness"].flipped_to == ["Pi2"]
    assert results["dead_end_witness"].flipped_to == ["Pi1"]
    assert results["costly_goal_witness"].flipped_to == ["Pi1"]


@pytest.mark.parametrize("theorem", [Theorem.T1, Theorem.T2, Theorem.C1])
def test_random_suites(theorem):
    suite = run_random_suite(theorem, instances=5, seed=1)
    assert suite.passed, suite.failures
    assert len(suite.to_frame()) == 5


@pytest.mark.slow
@pytest.mark.parametrize("theorem", [Theorem.T1, Theorem.T2, Theorem.C1])
def test_full_random_suites(theorem):
    suite = run_random_suite(theorem, instances=50, seed=0)
    assert suite.passed, suite.failures


def test_random_configs_are_feasible():
    rng = np.random.default_rng(4)
    agents = set()
    for _ in range(40):
        config = gridworld.random_config(rng)
        problem = gridworld.build(config)
        agents.add(config.num_agents)
        for s0 in problem.initial_set:
            time = gridworld.clean_time(problem, s0)
            assert time is not None and time <= config.horizon
    assert agents == {1, 2}


def test_two_agents_must_not_share_a_goal_cell():
    config = gridworld.GridworldConfig(
        name="shared_goal", width=3, height=2, num_agents=2, starts=[[(0, 0), (2, 0)]], goals=[(1, 0), (1, 1)], horizon=3
    )
    problem = gridworld.build(config)
    # senza vincolo entrambi entrano in (1,0) al primo passo
    assert oracle_tc(problem) == 1
    assert gridworld.clean_time(problem, problem.initial_set[0]) == 2
    verdict = verify_theorem2(problem, 10.0, 0.9, gridworld.guidance(config))
    assert verdict.passed, verdict.summary()


def _random_scheme(theorem: Theorem, config, problem) -> RewardScheme:
    if theorem == Theorem.T1:
        tau = oracle_tau(problem, 10.0)
        return RewardScheme(preset_weights(Theorem.T1, BoundInputs(alpha=10.0, tau=tau)))
    gf = gridworld.guidance(config)
    inputs = BoundInputs(alpha=10.0, gamma_m=0.9, t_max=problem.horizon, t_c=oracle_tc(problem), rho=gf.rho)
    return RewardScheme(preset_weights(Theorem.T2, inputs), gf, minimum_time=True)


@pytest.mark.slow
@pytest.mark.parametrize("theorem", [Theorem.T1, Theorem.T2])
def test_exact_dp_matches_the_best_enumerated_return(theorem):
    rng = np.random.default_rng(0)
    for i in range(50):
        config = gridworld.random_config(rng)
        problem = gridworld.build(config)
        scheme = _random_scheme(theorem, config, problem)
        model = TransitionModel(problem, scheme)
        _, values = exact_dp(problem, scheme, model=model)
        for s0 in problem.initial_set:
            report = enumerate_traces(problem, scheme, s0, keep_records=False, model=model)
            assert values.value(s0) == report.best_return, f"instance {i} ({config.num_agents} agents)"
