"""
rewardesign estimate --config X --policy FILE --kind tau|tc

Stima τ o t_c eseguendo la policy salvata da ogni stato iniziale
dell'ambiente configurato. t_c usa il problema senza vincolo di stato.
"""

from pathlib import Path

from rewardesign.commands import add_common_flags
from rewardesign.control.estimators import estimate_tau, estimate_tc
from rewardesign.core.errors import ConfigurationError
from rewardesign.core.records import read_policy


def register(subparsers) -> None:
    parser = subparsers.add_parser("estimate", help="estimate tau or t_c from a policy file")
    add_common_flags(parser, seed=False)
    parser.add_argument("--policy", required=True, help="policy table written by train or run")
    parser.add_argument("--kind", choices=["tau", "tc"], default="tau")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    from rewardesign.harness.experiment import build_environment, load_config

    if not args.config:
        raise ConfigurationError("estimate needs --config to rebuild the environment", key="config")
    config = load_config(args.config)
    problem, _ = build_environment(config.environment)
    policy_id = Path(args.policy).stem

    if args.kind == "tau":
        policy = read_policy(problem, args.policy)
        estimate = estimate_tau(problem, policy, policy_id=policy_id)
    else:
        relaxed = problem.relaxed()
        policy = read_policy(relaxed, args.policy)
        estimate = estimate_tc(relaxed, policy, policy_id=policy_id)

    print(f"{args.kind} = {estimate.value}")
    print(estimate.to_frame().to_string(index=False))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        estimate.to_frame().to_csv(out / f"{args.kind}_{policy_id}.csv", index=False, lineterminator="\n")
        with (out / f"{args.kind}_{policy_id}.json").open("w", encoding="utf-8", newline="\n") as f:
            f.write(estimate.model_dump_json(indent=2))
    return 0
