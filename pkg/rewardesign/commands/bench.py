from rewardesign.commands import add_common_flags
from rewardesign.harness.experiment import run_bench


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="run the weight ablation grid")
    add_common_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    result = run_bench(args.config or "golden_min_time", args.seed, args.out)
    print(result.summary.to_string(index=False))
    print(f"certified beats lambda_x0.1 on p_s: {result.dominates_lambda}")
    print(f"certified beats beta_x10 on p_m: {result.dominates_beta}")
    return 0 if result.passed else 1
