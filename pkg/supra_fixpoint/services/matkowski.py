"""Comparison functions and numeric membership tests for M and M_b.

M holds the nondecreasing psi: R+ -> R+ whose iterates psi^n(t) vanish for
every t > 0. M_b additionally asks

    limsup_n psi^{n+1}(t) / psi^n(t) < 1/b    for every t > 0.

Both are limit statements, so the checks here are evidence on a finite grid,
never proofs.
"""

import math
import sys
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from supra_fixpoint.core.config import settings
from supra_fixpoint.core.exceptions import DivergenceError, DomainError
from supra_fixpoint.core.logging import get_logger, log_structured
from supra_fixpoint.models.matkowski import MembershipDiagnostics, MembershipReport, Verdict

logger = get_logger(__name__)

# Explicit composition above this many steps switches to the closed form when one exists
CLOSED_FORM_THRESHOLD = 10_000
_TINY = sys.float_info.min


@dataclass(frozen=True)
class ComparisonFunction:
    evaluator: Callable[[float], float]
    label: str
    closed_form_iterate: Optional[Callable[[int, float], float]] = None

    def __call__(self, t: float) -> float:
        return self.evaluator(t)


def linear(c: float) -> ComparisonFunction:
    """psi(t) = c t, psi^n(t) = c^n t."""
    if c < 0 or not math.isfinite(c):
        raise DomainError(f"linear needs a finite c >= 0, got {c}")
    return ComparisonFunction(
        evaluator=lambda t: c * t,
        label=f"linear({c:g})",
        closed_form_iterate=lambda n, t: (c ** n) * t,
    )


def rational() -> ComparisonFunction:
    """psi(t) = t / (1 + t), psi^n(t) = t / (1 + n t)."""
    return ComparisonFunction(
        evaluator=lambda t: t / (1.0 + t),
        label="rational",
        closed_form_iterate=lambda n, t: t / (1.0 + n * t),
    )


def sqrt_shift() -> ComparisonFunction:
    """psi(t) = sqrt(1 + t) - 1, psi^n(t) = (1 + t)^(2^-n) - 1.

    Under d = e^{|x-y|} - 1 it is the exact modulus of x -> x/2.
    Evaluated as t / (sqrt(1 + t) + 1) to avoid cancellation for small t.
    """
    return ComparisonFunction(
        evaluator=lambda t: t / (math.sqrt(1.0 + t) + 1.0),
        label="sqrt-shift",
        closed_form_iterate=lambda n, t: math.expm1(math.log1p(t) * 0.5 ** n),
    )


def _step(psi: ComparisonFunction, t: float) -> float:
    value = float(psi(t))
    if not math.isfinite(value):
        raise DivergenceError(f"{psi.label} returned {value} at t={t}")
    return value


def iterate(psi: ComparisonFunction, n: int, t: float, closed_form: bool = False) -> float:
    """psi^n(t); n = 0 returns t.

    Explicit composition by default, so iterate(m + n) == iterate(m, iterate(n))
    holds exactly. ``closed_form=True`` uses the closed form when psi has one.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if closed_form and psi.closed_form_iterate is not None:
        return psi.closed_form_iterate(n, t)
    value = float(t)
    for _ in range(n):
        value = _step(psi, value)
    return value


def _closed(psi: ComparisonFunction, n: int, t: float) -> Optional[float]:
    try:
        value = psi.closed_form_iterate(n, t)  # type: ignore[misc]
    except (OverflowError, ZeroDivisionError, ValueError):
        return None
    return value if math.isfinite(value) else None


def _vanishing_orbit(
    psi: ComparisonFunction, t: float, n_max: int, vanish_tol: float
) -> Tuple[float, int, str]:
    """Final value of the orbit of t (or the value at which it provably stays small)."""
    if psi.closed_form_iterate is not None and n_max > CLOSED_FORM_THRESHOLD:
        value = _closed(psi, n_max, t)
        if value is not None:
            return value, n_max, "closed-form"
    value = float(t)
    for k in range(1, n_max + 1):
        nxt = _step(psi, value)
        # A nondecreasing psi keeps the orbit below value once psi(value) <= value
        if value < vanish_tol and nxt <= value:
            return nxt, k, "explicit"
        if nxt == value:
            return nxt, k, "explicit"
        value = nxt
    return value, n_max, "explicit"


def _check_grid(t_grid: Sequence[float]) -> List[float]:
    grid = [float(t) for t in t_grid]
    if not grid:
        raise DomainError("t_grid must not be empty")
    if any(t <= 0 or not math.isfinite(t) for t in grid):
        raise DomainError(f"t_grid must be positive and finite: {grid}")
    if any(a > b for a, b in zip(grid, grid[1:])):
        raise DomainError(f"t_grid must be sorted ascending: {grid}")
    return grid


def _membership(
    psi: ComparisonFunction, grid: List[float], n_max: int, vanish_tol: float
) -> Tuple[dict, MembershipDiagnostics]:
    psi_zero = _step(psi, 0.0)
    values = [_step(psi, t) for t in grid]
    chain = [psi_zero] + values
    finals, counts, methods = [], [], []
    for t in grid:
        final, count, method = _vanishing_orbit(psi, t, n_max, vanish_tol)
        finals.append(final)
        counts.append(count)
        methods.append(method)
    flags = {
        "is_monotone": all(a <= b for a, b in zip(chain, chain[1:])),
        "iterates_vanish": all(0.0 <= v < vanish_tol for v in finals),
        "below_identity": all(v < t for v, t in zip(values, grid)),
        "vanishes_at_zero": abs(psi_zero) <= settings.diagonal_tolerance,
    }
    diagnostics = MembershipDiagnostics(
        psi_values=values, final_iterates=finals, iterations=counts, methods=methods,
    )
    return flags, diagnostics


def check_M(
    psi: ComparisonFunction,
    t_grid: Optional[Sequence[float]] = None,
    n_max: Optional[int] = None,
    vanish_tol: Optional[float] = None,
) -> MembershipReport:
    """Monotonicity on the grid and psi^{n_max}(t) < vanish_tol for every grid t."""
    grid = _check_grid(settings.t_grid if t_grid is None else t_grid)
    n_max = settings.membership_n_max if n_max is None else n_max
    vanish_tol = settings.vanish_tol if vanish_tol is None else vanish_tol
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")

    flags, diagnostics = _membership(psi, grid, n_max, vanish_tol)
    in_M = flags["is_monotone"] and flags["iterates_vanish"]
    report = MembershipReport(
        label=psi.label,
        grid=grid,
        n_max=n_max,
        vanish_tol=vanish_tol,
        in_M=in_M,
        verdict=Verdict.MEMBER if in_M else Verdict.NON_MEMBER,
        diagnostics=diagnostics,
        **flags,
    )
    log_structured(logger, "info", "M membership checked", {"psi": psi.label, "in_M": in_M})
    return report


def _is_normal(value: Optional[float]) -> bool:
    return value is not None and math.isfinite(value) and value >= _TINY


def _ratios(values: Sequence[float]) -> List[float]:
    return [b / a for a, b in zip(values, values[1:])]


def _ratio_estimate(
    psi: ComparisonFunction, t: float, n_window: int, depths: Sequence[int]
) -> Tuple[Optional[float], str]:
    half = max(2, n_window // 2)
    if psi.closed_form_iterate is not None:
        for depth in sorted(depths, reverse=True):
            values = [_closed(psi, n, t) for n in range(depth, depth + half + 1)]
            if all(_is_normal(v) for v in values):
                return max(_ratios(values)), f"closed-form@{depth}"  # type: ignore[arg-type]

    orbit = [float(t)]
    for _ in range(n_window):
        orbit.append(_step(psi, orbit[-1]))
    valid = []
    for value in orbit:
        if not _is_normal(value):
            break
        valid.append(value)
    if len(valid) < 2:
        return None, "underflow"
    tail = valid[-(min(half, len(valid) - 1) + 1):]
    return max(_ratios(tail)), "explicit"


def check_Mb(
    psi: ComparisonFunction,
    b: float,
    t_grid: Optional[Sequence[float]] = None,
    n_window: Optional[int] = None,
    margin: Optional[float] = None,
    n_max: Optional[int] = None,
    vanish_tol: Optional[float] = None,
    probe_depths: Optional[Sequence[int]] = None,
) -> MembershipReport:
    """check_M plus the limsup ratio condition against 1/b.

    The estimate is the largest ratio psi^{n+1}(t)/psi^n(t) over the last
    n_window/2 indices of a window, maximized over the grid. With a closed
    form the window is also placed at the configured deep indices and the
    deepest window whose values are all normal floats is used.
    """
    if b < 1 or not math.isfinite(b):
        raise DomainError(f"b must be a finite value >= 1, got {b}")
    grid = _check_grid(settings.t_grid if t_grid is None else t_grid)
    n_window = settings.ratio_window if n_window is None else n_window
    margin = settings.membership_margin if margin is None else margin
    depths = settings.ratio_probe_depths if probe_depths is None else probe_depths
    if n_window < 2:
        raise DomainError(f"n_window must be >= 2, got {n_window}")

    base = check_M(psi, grid, n_max, vanish_tol)
    estimates: List[Optional[float]] = []
    sources: List[str] = []
    for t in grid:
        estimate, source = _ratio_estimate(psi, t, n_window, depths)
        estimates.append(estimate)
        sources.append(source)
    known = [e for e in estimates if e is not None]
    estimate = max(known) if known else None

    bound = 1.0 / b
    inconclusive = estimate is None or abs(estimate - bound) <= margin
    in_Mb = base.in_M and estimate is not None and estimate < bound - margin
    if in_Mb:
        verdict = Verdict.MEMBER
    elif inconclusive and base.in_M:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.NON_MEMBER

    diagnostics = base.diagnostics.model_copy(
        update={"ratio_estimates": estimates, "methods": [f"{m}; ratio {s}" for m, s in zip(base.diagnostics.methods, sources)]}
    )
    report = base.model_copy(update={
        "b": b,
        "ratio_limsup_estimate": estimate,
        "margin": margin,
        "in_Mb": in_Mb,
        "inconclusive": inconclusive,
        "verdict": verdict,
        "diagnostics": diagnostics,
    })
    log_structured(logger, "info", "M_b membership checked", {
        "psi": psi.label, "b": b, "estimate": estimate, "in_Mb": in_Mb, "inconclusive": inconclusive,
    })
    return report
