import argparse
from typing import List

from supra_fixpoint.core.config import settings
from supra_fixpoint.models.run_config import Command
from supra_fixpoint.models.space import ConstructionKind, SpaceVariant


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("run options")
    group.add_argument("--seed", type=int, help=f"random seed (default {settings.seed})")
    group.add_argument("--samples", type=int, help=f"sample count (default {settings.samples})")
    group.add_argument("--out", help="write the JSON report to this path as well as stdout")
    group.add_argument("--stamp", action="store_true", help="add a generated_at timestamp to the report")
    group.add_argument("--log-level", dest="log_level", help=f"log level (default {settings.log_level})")
    return common


def _space_options() -> argparse.ArgumentParser:
    space = argparse.ArgumentParser(add_help=False)
    group = space.add_argument_group("space")
    group.add_argument("--kind", choices=[k.value for k in ConstructionKind], help="construction kind")
    group.add_argument("--a", type=float, help="quadratic coefficient a > 0")
    group.add_argument("--scale", type=float, help="quadratic offset >= 1")
    group.add_argument("--beta", type=float, help="exp-square exponent >= 1")
    group.add_argument("--gamma", type=float, help="exp multiplier > 0")
    group.add_argument("--p", type=float, help="lp / Lp exponent in (0, 1)")
    group.add_argument("--dim", type=int, help="vector dimension")
    group.add_argument("--grid", type=int, help="grid cells for Lp")
    group.add_argument("--compose", action="store_true", help="wrap the construction in d (d + 1)")
    group.add_argument("--b", type=float, help="override b (>= 1)")
    group.add_argument("--rho", type=float, help="override rho (>= 0)")
    return space


def _problem_options() -> argparse.ArgumentParser:
    problem = argparse.ArgumentParser(add_help=False)
    group = problem.add_argument_group("problem")
    group.add_argument("--map", help='self-map: affine:a,c | scale:a | constant:c | expression in x, e.g. "x/2+1"')
    group.add_argument("--psi", help="comparison function: linear:c | rational | sqrt-shift | expression in t")
    group.add_argument("--x0", help="starting point: number, comma list for vectors, or 0 / 1 / 1/n")
    group.add_argument("--max-iter", dest="max_iter", type=int, help=f"iteration cap (default {settings.max_iter})")
    group.add_argument("--step-tol", dest="step_tol", type=float, help=f"stop when a step is below this (default {settings.step_tol:g})")
    group.add_argument("--trace", action="store_true", help="include the iterate trace in the report")
    return problem


def build_parser() -> argparse.ArgumentParser:
    """The ``supra-fixpoint`` argument tree; one subcommand per Command."""
    parser = argparse.ArgumentParser(
        prog="supra-fixpoint",
        description="b-suprametric spaces, comparison functions and certified Picard iteration.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common, space, problem = _common_options(), _space_options(), _problem_options()

    verify = commands.add_parser(
        Command.VERIFY_SPACE.value, parents=[common, space],
        help="sample the axioms of a construction",
    )
    verify.add_argument("--class", dest="space_class", choices=[v.value for v in SpaceVariant],
                        help="axiom system to check (default: the declared b-suprametric parameters)")
    verify.add_argument("--tolerance", type=float, help=f"defect tolerance (default {settings.axiom_tolerance:g})")
    verify.add_argument("--estimate", action="store_true", help="also estimate the Pareto front of (b, rho)")

    commands.add_parser(
        Command.SOLVE.value, parents=[common, space, problem],
        help="run Picard iteration and check the contraction",
    )

    certify = commands.add_parser(
        Command.CERTIFY.value, parents=[common, space, problem],
        help="solve and build convergence certificates",
    )
    certify.add_argument("--epsilon", type=_floats, help="comma list of ball radii (default 1)")
    certify.add_argument("--max-m", dest="max_m", type=int, help="invariant ball search cap (default 1000)")
    certify.add_argument("--ball-samples", dest="ball_samples", type=int,
                         help=f"points sampled per ball (default {settings.ball_samples})")
    certify.add_argument("--starts", help="semicolon-separated extra starting points for the uniqueness check")

    psi = commands.add_parser(Command.PSI_CHECK.value, parents=[common], help="classify a comparison function")
    psi.add_argument("--psi", required=True, help="linear:c | rational | sqrt-shift | expression in t")
    psi.add_argument("--b", type=float, help="also test the ratio condition against 1/b")
    psi.add_argument("--t-grid", dest="t_grid", type=_floats, help="comma list of probe points")
    psi.add_argument("--n-max", dest="n_max", type=int, help=f"iterations for vanishing (default {settings.membership_n_max})")
    psi.add_argument("--n-window", dest="n_window", type=int, help=f"ratio window (default {settings.ratio_window})")
    psi.add_argument("--margin", type=float, help=f"1/b margin (default {settings.membership_margin:g})")

    discrete = commands.add_parser(
        Command.DEMO_DISCRETE.value, parents=[common], help="report on the discrete space {0, 1, 1/2, ...}",
    )
    discrete.add_argument("--N", dest="N", type=int, help=f"largest denominator (default {settings.discrete_n})")
    discrete.add_argument("--lemma-samples", dest="lemma_samples", type=int,
                          help=f"samples for the exponential inequalities (default {settings.lemma_samples})")

    bounds = commands.add_parser(Command.BOUNDS.value, parents=[common], help="evaluate the chain and four-point bounds")
    bounds.add_argument("--b", type=float, help="b (default 1)")
    bounds.add_argument("--rho", type=float, help="rho (default 0)")
    bounds.add_argument("--ds", type=_floats, help="comma list of consecutive distances")
    bounds.add_argument("--u", type=_floats, help="four distances u1,u2,u3,u4")
    bounds.add_argument("--epsilon", type=_floats, help="radius for the simplified four-point bound")
    bounds.add_argument("--q", type=int, help="q for the c_q constant")

    return parser
