from rewardesign.commands import add_common_flags
from rewardesign.harness.experiment import run_experiment


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="run the full curriculum experiment")
    add_common_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    record = run_experiment(args.config or "golden_min_time", args.seed, args.out)
    for run in record.runs:
        m = run.final_metrics
        final = f"p_m={m.p_m:.3f} p_s={m.p_s:.3f} objective={m.objective:.3f}" if m else "no samples"
        print(f"seed {run.seed}: converged={run.converged} certified={run.certified} {final}")
    for failure in record.acceptance.failures:
        print(f"acceptance: {failure}")
    return 0 if record.acceptance.passed else 1
