"""
Formati su file degli artefatti.

- tracce: CSV, una riga per passo (t, state_id, azioni, r_a, r_g, r_p, r_c, reward)
- policy: testo, righe ordinate "state_id<TAB>t<TAB>a_1 ... a_n"
- report di enumerazione: CSV (azioni, classe, ritorno, tempo, costo, obiettivo)
"""

import logging
from pathlib import Path
from typing import Union

import pandas as pd

from rewardesign.core.errors import ConfigurationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# -----------------------------
# TRACCE
# -----------------------------


def trace_frame(trace, problem) -> pd.DataFrame:
    rows = []
    for record in trace.steps:
        rows.append(
            {
                "t": record.state.time,
                "state_id": problem.state_index[record.state.control_state],
                "actions": " ".join(str(a) for a in record.joint_action),
                "r_a": record.components.r_a,
                "r_g": record.components.r_g,
                "r_p": record.components.r_p,
                "r_c": record.components.r_c,
                "reward": record.reward,
            }
        )
    return pd.DataFrame(rows, columns=["t", "state_id", "actions", "r_a", "r_g", "r_p", "r_c", "reward"])


def write_trace_csv(trace, problem, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(trace, problem).to_csv(path, index=False, lineterminator="\n")
    return path


# -----------------------------
# POLICY
# -----------------------------


def write_policy(policy, problem, path: PathLike) -> Path:
    from rewardesign.control.solver import PolicyScope

    if policy.scope != PolicyScope.CENTRALIZED:
        raise ConfigurationError("Only centralized policies can be written as state tables")
    lines = []
    for (state, t), joint_action in policy.mapping.items():
        lines.append((problem.state_index[state], t, " ".join(str(a) for a in joint_action)))
    lines.sort()

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for state_id, t, actions in lines:
            f.write(f"{state_id}\t{t}\t{actions}\n")
    logger.debug(f"Policy written to {path} ({len(lines)} entries)")
    return path


def read_policy(problem, path: PathLike):
    from rewardesign.control.solver import PolicyTable

    path = Path(path)
    if not path.exists():
        raise ConfigurationError("Policy file not found", path=str(path))

    mapping = {}
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                state_id, t, actions = line.split("\t")
                state = problem.states[int(state_id)]
                joint_action = problem.check_action(tuple(int(a) for a in actions.split()))
                mapping[(state, int(t))] = joint_action
            except (ValueError, IndexError) as e:
                raise ConfigurationError(f"Malformed policy record at line {lineno}: {e}", path=str(path))
    return PolicyTable(mapping)


# -----------------------------
# ENUMERAZIONE
# -----------------------------


def write_enumeration(report, problem, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report.to_frame(problem).to_csv(path, index=False, lineterminator="\n")
    return path
