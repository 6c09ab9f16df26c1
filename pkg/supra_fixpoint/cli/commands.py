"""Command handlers and the ``run`` entry point.

Every run prints one JSON report:

    {"schema": ..., "command": ..., "config": {...}, "result": {...}}

with ``"error"`` in place of ``"result"`` when the run failed. Exit codes:
0 success, 1 findings (violations, escapes, non-convergence), 2 usage or
configuration errors.
"""

import argparse
import sys
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from supra_fixpoint.cli.expression import parse_map_expression, parse_psi_expression
from supra_fixpoint.cli.router import build_parser
from supra_fixpoint.core.config import settings
from supra_fixpoint.core.error_handlers import HandlerResult, create_error_response, with_error_handling
from supra_fixpoint.core.exceptions import EXIT_FINDINGS, EXIT_OK, EXIT_USAGE, ConfigurationError, DomainError, SupraError
from supra_fixpoint.core.logging import get_logger, setup_logging
from supra_fixpoint.core.utils import dump_report, jsonable_float, write_report
from supra_fixpoint.models.points import DPoint, GridFn, Point, Scalar, Vector
from supra_fixpoint.models.run_config import Command, RunConfig, SpaceSpec
from supra_fixpoint.models.space import (
    ConstructionDescriptor,
    ConstructionKind,
    ConstructionParams,
    SpaceClass,
    SpaceParams,
    SpaceVariant,
)
from supra_fixpoint.services.constructions import build_construction, default_sampler
from supra_fixpoint.services.core_spaces import DistanceFn, check_axioms, estimate_min_params, sample_triples
from supra_fixpoint.services.discrete_example import pathology_report
from supra_fixpoint.services.fixpoint import (
    ContractionProblem,
    c_q_constant,
    certify,
    chain_bound,
    check_step_law,
    esp,
    esp_bound,
    four_point_expansion,
    four_point_simplified,
    invariant_ball_check,
    picard,
    uniqueness_check,
    verify_contraction,
)
from supra_fixpoint.services.matkowski import (
    ComparisonFunction,
    Verdict,
    check_M,
    check_Mb,
    linear,
    rational,
    sqrt_shift,
)

logger = get_logger(__name__)

# Violations listed in solve/certify reports; counts are always complete
REPORTED_VIOLATIONS = 10

_CONSTRUCTION_FIELDS = ("a", "scale", "beta", "gamma", "p", "dim", "grid")
_CONFIG_FIELDS = (
    "space_class", "b", "rho", "map", "psi", "x0", "epsilon", "max_m", "estimate",
    "seed", "samples", "tolerance", "step_tol", "max_iter", "ball_samples", "N",
    "lemma_samples", "t_grid", "n_max", "n_window", "margin", "ds", "u", "q",
    "out", "trace", "stamp", "log_level",
)


# -- argument resolution ---------------------------------------------------


def _numbers(text: str, what: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"{what}: expected comma-separated numbers, got {text!r}") from exc


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields: Dict[str, Any] = {"command": args.command}
    for name in _CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None and value is not False:
            fields[name] = value
    if getattr(args, "kind", None):
        params = {name: getattr(args, name) for name in _CONSTRUCTION_FIELDS if getattr(args, name, None) is not None}
        fields["space"] = SpaceSpec(
            kind=args.kind, params=ConstructionParams(**params), compose=bool(getattr(args, "compose", False)),
        )
    if getattr(args, "starts", None):
        fields["starts"] = [s.strip() for s in args.starts.split(";") if s.strip()]
    return RunConfig(**fields)


def _elementwise(f: Callable[[float], float]) -> Callable[[Point], Point]:
    def apply(point: Point) -> Point:
        if isinstance(point, Scalar):
            return Scalar(f(point.value))
        if isinstance(point, Vector):
            return Vector(tuple(f(v) for v in point.values))
        if isinstance(point, GridFn):
            return GridFn(tuple(f(v) for v in point.values))
        raise DomainError(f"Builtin maps do not act on {type(point).__name__} points")

    return apply


def resolve_map(spec: str) -> Callable[[Point], Point]:
    """affine:a,c | scale:a | constant:c, or an expression in x."""
    name, sep, rest = spec.partition(":")
    if not sep:
        return parse_map_expression(spec)
    coefficients = _numbers(rest, f"map {name}")
    arity = {"affine": 2, "scale": 1, "constant": 1}.get(name.strip())
    if arity is None:
        raise ConfigurationError(f"Unknown map builtin {name!r}; use affine, scale or constant")
    if len(coefficients) != arity:
        raise ConfigurationError(f"map {name} takes {arity} coefficient(s), got {len(coefficients)}")
    if name.strip() == "affine":
        a, c = coefficients
        return _elementwise(lambda v: a * v + c)
    if name.strip() == "scale":
        (a,) = coefficients
        return _elementwise(lambda v: a * v)
    (c,) = coefficients
    return _elementwise(lambda v: c)


def resolve_psi(spec: str) -> ComparisonFunction:
    """linear:c | rational | sqrt-shift, or an expression in t."""
    name, sep, rest = spec.partition(":")
    name = name.strip()
    if sep:
        if name != "linear":
            raise ConfigurationError(f"Unknown psi builtin {name!r}; use linear:c, rational or sqrt-shift")
        coefficients = _numbers(rest, "psi linear")
        if len(coefficients) != 1:
            raise ConfigurationError("psi linear takes one coefficient")
        return linear(coefficients[0])
    if name == "rational":
        return rational()
    if name == "sqrt-shift":
        return sqrt_shift()
    return parse_psi_expression(spec)


def _innermost(desc: ConstructionDescriptor) -> ConstructionDescriptor:
    while desc.base is not None:
        desc = desc.base
    return desc


def parse_point(text: str, desc: ConstructionDescriptor) -> Point:
    """Read a point of the construction's kind: number, comma list, or 0 / 1 / 1/n."""
    kind = _innermost(desc).kind
    if kind is ConstructionKind.DISCRETE:
        text = text.strip()
        if text in ("0", "1"):
            return DPoint.from_index(int(text))
        numerator, sep, denominator = text.partition("/")
        if sep and numerator.strip() == "1" and denominator.strip().isdigit():
            return DPoint.recip(int(denominator))
        raise ConfigurationError(f"Discrete points are 0, 1 or 1/n, got {text!r}")
    values = _numbers(text, "point")
    if kind in (ConstructionKind.EUCLIDEAN, ConstructionKind.LP):
        return Vector(tuple(values))
    if kind is ConstructionKind.BIG_LP:
        return GridFn(tuple(values))
    if len(values) != 1:
        raise ConfigurationError(f"{kind.value} points are scalars, got {text!r}")
    return Scalar(values[0])


def _space(config: RunConfig) -> Tuple[DistanceFn, ConstructionDescriptor, Optional[SpaceParams]]:
    """Build the construction; params are the declared ones with --b/--rho applied on top."""
    desc = config.space.descriptor()  # type: ignore[union-attr]
    d, declared = build_construction(desc)
    if config.b is None and config.rho is None:
        return d, desc, declared
    base = declared or SpaceParams()
    params = SpaceParams(
        b=base.b if config.b is None else config.b,
        rho=base.rho if config.rho is None else config.rho,
    )
    return d, desc, params


def _space_class(config: RunConfig, params: Optional[SpaceParams]) -> SpaceClass:
    variant = config.space_class or SpaceVariant.B_SUPRAMETRIC
    if variant is SpaceVariant.SEMIMETRIC:
        return SpaceClass.semimetric()
    if params is None:
        raise ConfigurationError("The construction declares no (b, rho); pass --b and --rho")
    if variant is SpaceVariant.B_METRIC:
        return SpaceClass.b_metric(params.b)
    if variant is SpaceVariant.SUPRAMETRIC:
        return SpaceClass.suprametric(params.rho)
    return SpaceClass.b_suprametric(params.b, params.rho)


def _problem(config: RunConfig, x0: Optional[Point] = None) -> Tuple[ContractionProblem, ConstructionDescriptor]:
    d, desc, params = _space(config)
    if params is None:
        raise ConfigurationError("The construction declares no (b, rho); pass --b and --rho")
    problem = ContractionProblem(
        distance=d,
        params=params,
        map=resolve_map(config.map),  # type: ignore[arg-type]
        psi=resolve_psi(config.psi),  # type: ignore[arg-type]
        x0=x0 if x0 is not None else parse_point(config.x0, desc),  # type: ignore[arg-type]
        label=config.map or "f",
    )
    return problem, desc


def _truncated(report: Any) -> Dict[str, Any]:
    payload = report.model_copy(update={"violations": report.violations[:REPORTED_VIOLATIONS]}).model_dump(mode="json")
    payload["violation_count"] = len(report.violations)
    return payload


def _solution(result: Any, include_trace: bool) -> Dict[str, Any]:
    return result.model_dump(mode="json", exclude=None if include_trace else {"trace"})


# -- handlers --------------------------------------------------------------


@with_error_handling
def handle_verify_space(config: RunConfig) -> HandlerResult:
    d, desc, params = _space(config)
    cls = _space_class(config, params)
    sampler = default_sampler(desc, config.N)
    report = check_axioms(d, cls, sampler, config.samples, config.tolerance, config.seed)
    result: Dict[str, Any] = {
        "construction": desc.model_dump(mode="json"),
        "sampler": sampler.describe(),
        "report": report.model_dump(mode="json", by_alias=True),
    }
    if config.estimate:
        front = estimate_min_params(d, sample_triples(sampler, config.samples, config.seed))
        result["front"] = [{"b": b, "rho": rho} for b, rho in front]
    return (EXIT_OK if report.passed else EXIT_FINDINGS), {"result": result}


@with_error_handling
def handle_solve(config: RunConfig) -> HandlerResult:
    problem, desc = _problem(config)
    sampler = default_sampler(desc, config.N)
    contraction = verify_contraction(problem, sampler, config.samples, seed=config.seed)
    solution = picard(problem, config.max_iter, config.step_tol)
    step_law = check_step_law(problem, solution.trace)
    result = {
        "construction": desc.model_dump(mode="json"),
        "params": problem.params.model_dump(mode="json"),
        "psi": problem.psi.label,
        "solution": _solution(solution, config.trace),
        "contraction": _truncated(contraction),
        "step_law": _truncated(step_law),
    }
    ok = solution.converged and contraction.passed and step_law.passed
    return (EXIT_OK if ok else EXIT_FINDINGS), {"result": result}


@with_error_handling
def handle_certify(config: RunConfig) -> HandlerResult:
    problem, desc = _problem(config)
    solution = picard(problem, config.max_iter, config.step_tol)
    certificates, balls = [], []
    for epsilon in config.epsilon:
        certificates.append(certify(problem, solution, epsilon).model_dump(mode="json"))
        ball = invariant_ball_check(problem, epsilon, config.max_m, config.ball_samples, config.seed)
        balls.append(ball)
    result: Dict[str, Any] = {
        "construction": desc.model_dump(mode="json"),
        "params": problem.params.model_dump(mode="json"),
        "psi": problem.psi.label,
        "solution": _solution(solution, config.trace),
        "certificates": certificates,
        "invariant_balls": [
            ball.model_dump(mode="json", exclude={"contraction": {"violations"}}) for ball in balls
        ],
    }
    ok = solution.converged and all(ball.passed for ball in balls)
    if config.starts:
        starts = [problem.x0] + [parse_point(s, desc) for s in config.starts]
        uniqueness = uniqueness_check(problem, starts, max_iter=config.max_iter, step_tol=config.step_tol)
        result["uniqueness"] = uniqueness.model_dump(mode="json")
        ok = ok and uniqueness.unique
    return (EXIT_OK if ok else EXIT_FINDINGS), {"result": result}


@with_error_handling
def handle_psi_check(config: RunConfig) -> HandlerResult:
    psi = resolve_psi(config.psi)  # type: ignore[arg-type]
    if config.b is None:
        report = check_M(psi, config.t_grid, config.n_max)
    else:
        report = check_Mb(psi, config.b, config.t_grid, config.n_window, config.margin, config.n_max)
    code = EXIT_OK if report.verdict is Verdict.MEMBER else EXIT_FINDINGS
    return code, {"result": report.model_dump(mode="json")}


@with_error_handling
def handle_demo_discrete(config: RunConfig) -> HandlerResult:
    report = pathology_report(config.N, config.lemma_samples, config.seed)
    result = report.model_dump(mode="json")
    result["passed"] = report.passed
    return (EXIT_OK if report.passed else EXIT_FINDINGS), {"result": result}


@with_error_handling
def handle_bounds(config: RunConfig) -> HandlerResult:
    params = SpaceParams(b=1.0 if config.b is None else config.b, rho=0.0 if config.rho is None else config.rho)
    result: Dict[str, Any] = {"params": params.model_dump(mode="json")}
    ok = True
    if config.ds:
        chain, bound = chain_bound(params, config.ds), esp_bound(params, config.ds)
        dominated = chain <= bound + 1e-12 * max(1.0, abs(bound))
        result["chain"] = {
            "ds": config.ds,
            "esp": [jsonable_float(esp(i, config.ds)) for i in range(1, len(config.ds) + 1)],
            "chain_bound": jsonable_float(chain),
            "esp_bound": jsonable_float(bound),
            "dominated": dominated,
        }
        ok = ok and dominated
    if config.u:
        epsilon = config.epsilon[0]
        expansion = four_point_expansion(params, *config.u)
        simplified = four_point_simplified(params, epsilon)
        applies = all(u < epsilon for u in config.u)
        result["four_point"] = {
            "u": config.u,
            "epsilon": epsilon,
            "expansion": jsonable_float(expansion),
            "simplified": jsonable_float(simplified),
            "applies": applies,
            "dominated": expansion <= simplified,
        }
        ok = ok and (not applies or expansion <= simplified)
    if config.q is not None:
        result["c_q"] = {"q": config.q, "value": jsonable_float(c_q_constant(params, config.q))}
    return (EXIT_OK if ok else EXIT_FINDINGS), {"result": result}


HANDLERS: Dict[Command, Callable[[RunConfig], HandlerResult]] = {
    Command.VERIFY_SPACE: handle_verify_space,
    Command.SOLVE: handle_solve,
    Command.CERTIFY: handle_certify,
    Command.PSI_CHECK: handle_psi_check,
    Command.DEMO_DISCRETE: handle_demo_discrete,
    Command.BOUNDS: handle_bounds,
}


@with_error_handling
def _configure(args: argparse.Namespace) -> HandlerResult:
    return EXIT_OK, config_from_args(args)


def run(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """Parse ``argv``, run the command, print its JSON report and return the exit code."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    setup_logging(getattr(args, "log_level", None))
    report: Dict[str, Any] = {"schema": settings.schema_version, "command": args.command}
    code, outcome = _configure(args)
    config: Optional[RunConfig] = outcome if code == EXIT_OK else None
    if config is None:
        report["config"] = None
        report["error"] = outcome
    else:
        report["config"] = config.model_dump(mode="json")
        try:
            code, payload = HANDLERS[config.command](config)
        except SupraError as exc:
            response = create_error_response(exc)
            code, payload = response.exit_code, response.model_dump(mode="json", by_alias=True)
        if "result" in payload:
            report["result"] = payload["result"]
        else:
            report["error"] = payload
    if getattr(args, "stamp", False):
        report["generated_at"] = datetime.now(timezone.utc).isoformat()

    text = dump_report(report)
    stdout.write(text)
    write_report(text, getattr(args, "out", None))
    logger.info(f"{args.command} finished with exit code {code}")
    return code
