from rewardesign.commands import add_common_flags
from rewardesign.harness.experiment import train_stage


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train a single curriculum stage")
    add_common_flags(parser)
    parser.add_argument("--stage", type=int, default=1, help="stage index in the configured plan")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    artifact, path = train_stage(args.config or "golden_min_time", args.stage, args.seed, args.out)
    print(f"stage {artifact.stage.index} ({artifact.stage.theorem.value}, budget {artifact.stage.budget})")
    print(artifact.evaluation.to_frame().to_string(index=False))
    for note in artifact.notes:
        print(f"note: {note}")
    print(f"policy: {path}")
    if not artifact.certificate.satisfied:
        print("certificate: NOT satisfied")
        return 1
    return 0
