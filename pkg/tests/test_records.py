import pytest

from rewardesign.control.pomdp import rollout
from rewardesign.control.reward import RewardScheme, WeightVector
from rewardesign.control.solver import PolicyScope, PolicyTable, exact_dp
from rewardesign.core.errors import ConfigurationError
from rewardesign.core.records import read_policy, trace_frame, write_policy, write_trace_csv
from tests.conftest import RIGHT, single


@pytest.fixture
def scheme():
    return RewardScheme(WeightVector(alpha=10.0, discount=0.9), minimum_time=True)


def test_policy_file_round_trip(line_problem, scheme, tmp_path):
    policy, _ = exact_dp(line_problem, scheme)
    path = write_policy(policy, line_problem, tmp_path / "policy.tsv")

    lines = path.read_text().splitlines()
    assert len(lines) == line_problem.horizon * line_problem.num_states
    assert lines[0].split("\t")[:2] == ["0", "0"]
    assert read_policy(line_problem, path).mapping == policy.mapping


def test_policy_files_are_sorted_by_state_then_time(line_problem, tmp_path):
    mapping = {(single(2), 1): (RIGHT,), (single(0), 2): (RIGHT,), (single(0), 0): (RIGHT,)}
    path = write_policy(PolicyTable(mapping), line_problem, tmp_path / "p.tsv")
    assert path.read_text() == "0\t0\t3\n0\t2\t3\n2\t1\t3\n"


def test_per_agent_policies_are_not_written(line_problem, tmp_path):
    policy = PolicyTable({}, PolicyScope.PER_AGENT)
    with pytest.raises(ConfigurationError):
        write_policy(policy, line_problem, tmp_path / "p.tsv")


def test_reading_bad_policy_files(line_problem, tmp_path):
    with pytest.raises(ConfigurationError) as e:
        read_policy(line_problem, tmp_path / "missing.tsv")
    assert e.value.path.endswith("missing.tsv")

    bad = tmp_path / "bad.tsv"
    bad.write_text("0\t0\n")
    with pytest.raises(ConfigurationError):
        read_policy(line_problem, bad)

    unknown_state = tmp_path / "unknown.tsv"
    unknown_state.write_text("99\t0\t3\n")
    with pytest.raises(ConfigurationError):
        read_policy(line_problem, unknown_state)


def test_trace_csv(line_problem, scheme, constant_policy, tmp_path):
    trace = rollout(line_problem, constant_policy(RIGHT), single(0), scheme)
    frame = trace_frame(trace, line_problem)
    assert frame["t"].tolist() == [0, 1]
    assert frame["state_id"].tolist() == [0, 1]
    assert frame["reward"].tolist() == [0.0, 10.0]

    path = write_trace_csv(trace, line_problem, tmp_path / "traces" / "trace.csv")
    assert path.read_text().splitlines()[0] == "t,state_id,actions,r_a,r_g,r_p,r_c,reward"
