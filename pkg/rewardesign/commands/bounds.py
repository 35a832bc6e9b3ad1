"""
rewardesign bounds

Senza --config: certificato di un vettore di pesi (o dei pesi preset con
--preset) rispetto ai limiti del teorema scelto.
Con --config: certificati dei pesi di ogni stage del piano configurato.
"""

import logging

from pydantic import ValidationError

from rewardesign.commands import add_common_flags
from rewardesign.control.bounds import DEFAULT_EPSILON, BoundInputs, Theorem, certify, preset_weights
from rewardesign.control.curriculum import build_plan
from rewardesign.control.reward import WeightVector
from rewardesign.core.errors import ConfigurationError

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("bounds", help="check reward weights against the bounds")
    add_common_flags(parser, seed=False, out=False)
    parser.add_argument("--theorem", choices=[t.value for t in Theorem], default=Theorem.T2.value)
    parser.add_argument("--alpha", type=float, default=10.0)
    parser.add_argument("--gamma-m", type=float, default=None)
    parser.add_argument("--t-max", type=int, default=None)
    parser.add_argument("--t-c", type=int, default=None)
    parser.add_argument("--rho", type=float, default=None)
    parser.add_argument("--tau", type=float, default=None)
    parser.add_argument("--lambda", dest="lambda_pen", type=float, default=0.0)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.add_argument("--mu", type=float, default=0.0)
    parser.add_argument("--discount", type=float, default=None, help="default: 1 for T1, gamma_m otherwise")
    parser.add_argument("--preset", action="store_true", help="certify the preset weights instead of the given ones")
    parser.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    parser.add_argument("--no-guidance", action="store_true", help="preset with beta = 0")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    if args.config:
        return _plan_certificates(args)

    theorem = Theorem(args.theorem)
    try:
        inputs = BoundInputs(
            alpha=args.alpha, gamma_m=args.gamma_m, t_max=args.t_max, t_c=args.t_c, rho=args.rho, tau=args.tau
        )
        if args.preset:
            weights = preset_weights(theorem, inputs, args.epsilon, use_guidance=not args.no_guidance)
        else:
            discount = args.discount
            if discount is None:
                discount = 1.0 if theorem == Theorem.T1 or args.gamma_m is None else args.gamma_m
            weights = WeightVector(
                alpha=args.alpha, beta=args.beta, lambda_pen=args.lambda_pen, mu=args.mu, discount=discount
            )
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigurationError(f"Invalid weights: {first['msg']}", key=".".join(str(p) for p in first["loc"]))

    certificate = certify(weights, theorem, inputs)
    print(certificate.model_dump_json(indent=2))
    return 0 if certificate.satisfied else 1


def _plan_certificates(args) -> int:
    # import locale: evita di caricare l'harness per il caso semplice
    from rewardesign.harness.experiment import build_environment, load_config, weight_policy

    config = load_config(args.config)
    problem, guidance = build_environment(config.environment)
    plan = build_plan(
        config.plan.xi,
        config.plan.stages,
        config.plan.steps_per_stage,
        weight_policy(config, problem, guidance),
        problem.cost_kind,
    )
    satisfied = True
    for stage in plan.stages:
        certificate = certify(stage.weights, stage.theorem, stage.inputs)
        satisfied = satisfied and certificate.satisfied
        note = " (provisional inputs)" if stage.provisional else ""
        print(f"# stage {stage.index}, budget {stage.budget}{note}")
        print(certificate.model_dump_json(indent=2))
    return 0 if satisfied else 1
