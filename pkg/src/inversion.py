"""The series f(s, w) solving L(s - w f) = exp(f), and its verification checks"""
import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .config import settings
from .errors import BoundViolationError, DomainError, NonConvergenceError, TruncationCapError
from .lfunction import (
    DomainSpec,
    EvalMode,
    LFunctionContext,
    SeriesValue,
    L_eval,
    adaptive_sum,
    analytic_abscissa,
    doubling_ratio,
    ln_L,
    ln_L_on_circle,
    ln_L_derivative,
    make_context,
)
from .multiplicative import factor_table
from .spec_models import MultiplicativeSpec

logger = logging.getLogger(__name__)

_SLACK = 1e-12
_V_LIMIT = 1e-8
# |G| this small is rounding noise; damping stops comparing below it
_G_FLOOR = 1e-15
# Summation tolerance of f relative to the residual tolerance of a check
_SERIES_HEADROOM = 0.25
# Newton residual target relative to the tolerance it is compared at
_ORACLE_HEADROOM = 1e-3

ZETA_2 = math.pi**2 / 6
EXPLICIT_SERIES_SIGMA = 1.4
EXPLICIT_SERIES_RADIUS = 0.13


def _pair(z: Optional[complex]) -> Optional[List[float]]:
    return None if z is None else [z.real, z.imag]


@dataclass(frozen=True)
class InversionQuery:
    s: complex
    w: complex
    v: Optional[complex] = None

    def in_domain(self, ctx: LFunctionContext) -> bool:
        """(s, w) lies in D_{sigma + gamma rho, rho} with rho = |w|"""
        if abs(self.w) == 0:
            return self.s.real >= ctx.sigma - _SLACK
        return DomainSpec.for_rho(ctx, abs(self.w)).contains(self.s, self.w)


@dataclass(frozen=True)
class VerificationRecord:
    """One verified point: residual plus the truncation data behind it"""

    check: str
    s: complex
    w: complex
    residual: float
    terms: int
    tail: float
    ok: bool
    v: Optional[complex] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        row = {
            "check": self.check,
            "s": _pair(self.s),
            "w": _pair(self.w),
            "residual": self.residual,
            "terms": self.terms,
            "tail": self.tail,
            "ok": self.ok,
        }
        if self.v is not None:
            row["v"] = _pair(self.v)
        row.update(self.extra)
        return row


def _f_terms(ctx: LFunctionContext, s: complex, w: complex, v: Optional[complex] = None):
    """Terms d~_{v + w ln n}(n) a(n) n^-s for n in [lo, hi)"""

    def terms(lo: int, hi: int) -> np.ndarray:
        table = factor_table(hi - 1)
        log_n = table.log_n(lo, hi)
        z = w * log_n if v is None else v + w * log_n
        return table.d_tilde(z, lo, hi) * table.coefficients(ctx.spec, lo, hi) * np.exp(-s * log_n)

    return terms


def _require_domain(ctx: LFunctionContext, s: complex, w: complex, best_effort: bool) -> bool:
    inside = InversionQuery(s, w).in_domain(ctx)
    if inside:
        return True
    bound = ctx.sigma + ctx.gamma * abs(w)
    message = f"(s, w) outside the convergence domain: Re(s) = {s.real!r} < sigma + gamma|w| = {bound!r}"
    if not best_effort:
        raise DomainError(message, parameter="s")
    logger.warning(f"{message}; summing in best-effort mode")
    return False


def _sum_series(ctx, terms, s: complex, tol: float, best_effort: bool, label: str) -> SeriesValue:
    try:
        return adaptive_sum(terms, 2, tol, ratio=doubling_ratio(s.real), label=label)
    except TruncationCapError as e:
        if not best_effort:
            raise
        logger.warning(f"{e}; returning the partial sum")
        return e.partial


# -- layered tail completion -----------------------------------------------------

_U_NODES = 32
_RADIUS_FRACTION = 0.7
_MAX_RADIUS = 1.5
_RATIO_LIMIT = 0.95
_LAYER_CAP = 400
_ROUNDING = 1e-15


def _moment_integrals(orders: np.ndarray, y: np.ndarray) -> np.ndarray:
    """J_m(y) = int_0^1 t^m e^(t y) dt = sum_k y^k / (k! (m + k + 1)), broadcast over m and y"""
    y = np.asarray(y, dtype=complex)
    total = np.zeros(np.broadcast(orders, y).shape, dtype=complex)
    term = np.ones(y.shape, dtype=complex)
    for k in range(int(math.e * float(np.abs(y).max(initial=0.0))) + 40):
        total += term / (orders + k + 1)
        term = term * y / (k + 1)
    return total


def _layer_coefficients(v: complex, lo: int, hi: int, layers: int) -> np.ndarray:
    """kappa[m, n - lo]: coefficient of u^m in d~_{v + u}(n), m < min(layers, 32)"""
    table = factor_table(hi - 1)
    nodes = np.exp(2j * np.pi * np.arange(_U_NODES) / _U_NODES)
    samples = np.stack([table.d_tilde(v + u, lo, hi) for u in nodes])
    return (np.fft.fft(samples, axis=0) / _U_NODES)[: min(layers, _U_NODES)]


def _layer_remainder(scale: float, ratio: float, layers: int) -> float:
    return scale * ratio**layers / ((layers + 1) * (1 - ratio))


def _completed_series(
    ctx: LFunctionContext, s: complex, w: complex, v: Optional[complex], tol: float
) -> Optional[SeriesValue]:
    """Head n <= N summed term by term, the rest completed layer by layer.

    Grouping the terms by powers (w ln n)^m splits the series into layers
    sum_n kappa_m(v; n) (w ln n)^m a(n) n^-s. The full sum of layer m is the
    circle mean of ln L (-w ln L e^(-i theta) / r)^m J_m(v ln L) around s,
    so its tail past N is that mean minus the head part. Every layer holding
    head terms (m < max Omega(n)) is included; the neglected layers are
    bounded by a geometric series in q = |w| max|ln L| / r. Returns None when
    no circle gives q below the limit or the layer cap is reached first.
    """
    v = 0j if v is None else complex(v)
    radius = min(_RADIUS_FRACTION * (s.real - analytic_abscissa(ctx)), _MAX_RADIUS)
    if not radius > 0:
        return None
    try:
        ell = ln_L_on_circle(ctx, s, radius)
    except DomainError as e:
        logger.debug(f"Completion circle rejected: {e}")
        return None
    bound = float(np.abs(ell).max())
    ratio = abs(w) * bound / radius
    if ratio >= _RATIO_LIMIT:
        return None
    scale = bound * math.exp(abs(v) * bound)

    N = ctx.prefix_terms
    table = factor_table(N)
    layers = max(int(table.big_omega[2 : N + 1].max()), 1)
    while layers < _LAYER_CAP and _layer_remainder(scale, ratio, layers) > tol:
        layers += 1
    remainder = _layer_remainder(scale, ratio, layers)
    if remainder > tol:
        return None

    orders = np.arange(layers)[:, None]
    theta = 2 * np.pi * np.arange(ell.size) / ell.size
    z = -w * ell * np.exp(-1j * theta) / radius
    moments = 1 / (orders + 1) if v == 0 else _moment_integrals(orders, v * ell[None, :])
    full = (ell[None, :] * z[None, :] ** orders * moments).mean(axis=1)

    log_n = table.log_n(2, N + 1)
    weights = table.coefficients(ctx.spec, 2, N + 1) * np.exp(-s * log_n)
    kappa = _layer_coefficients(v, 2, N + 1, layers)
    head_layers = (kappa * (w * log_n)[None, :] ** orders[: kappa.shape[0]] * weights[None, :]).sum(axis=1)
    head = complex((table.d_tilde(v + w * log_n, 2, N + 1) * weights).sum())
    tails = full.copy()
    tails[: head_layers.size] -= head_layers
    rounding = _ROUNDING * float(np.abs(full).sum() + np.abs(head_layers).sum())
    logger.debug(f"Completed series at s={s}, w={w}: r={radius:.3f}, q={ratio:.3f}, {layers} layers")
    return SeriesValue(head + complex(tails.sum()), N, remainder + rounding)


def shifted_series(
    ctx: LFunctionContext,
    s: complex,
    w: complex,
    v: Optional[complex] = None,
    tol: Optional[float] = None,
    best_effort: bool = False,
    mode: EvalMode = EvalMode.ACCELERATED,
    label: str = "f(s, w)",
) -> SeriesValue:
    """sum_{n >= 2} d~_{v + w ln n}(n) a(n) n^-s; v = None gives the series of f itself.

    Accelerated mode completes the tail layer by layer and falls back to
    doubling the truncation when no completion circle exists. Raw mode always
    doubles, up to settings.max_terms.
    """
    s, w = complex(s), complex(w)
    tol = ctx.tol if tol is None else tol
    if EvalMode(mode) == EvalMode.ACCELERATED:
        completed = _completed_series(ctx, s, w, v, tol)
        if completed is not None:
            return completed
        logger.info(f"No completion circle for {label} at s={s}, w={w}; summing term by term")
    return _sum_series(ctx, _f_terms(ctx, s, w, v), s, tol, best_effort, label)


def f_eval(
    ctx: LFunctionContext,
    s: complex,
    w: complex,
    best_effort: bool = False,
    tol: Optional[float] = None,
    mode: EvalMode = EvalMode.ACCELERATED,
) -> SeriesValue:
    """f(s, w) = sum_{n >= 2} d~_{w ln n}(n) a(n) n^-s.

    In strict mode (s, w) must satisfy Re(s) >= sigma + gamma |w| and the
    result must satisfy |f| < gamma up to its tail estimate.
    """
    s, w = complex(s), complex(w)
    tol = ctx.tol if tol is None else tol
    guaranteed = _require_domain(ctx, s, w, best_effort)
    result = shifted_series(ctx, s, w, None, tol, best_effort, mode)
    if guaranteed and abs(result.value) > ctx.gamma + result.tail_estimate + _SLACK:
        raise BoundViolationError(
            f"|f({s}, {w})| = {abs(result.value)!r} exceeds gamma = {ctx.gamma!r} "
            f"beyond the tail estimate {result.tail_estimate:.3e}"
        )
    return SeriesValue(result.value, result.terms_used, result.tail_estimate, guaranteed and result.guaranteed)


def verify_functional_equation(
    ctx: LFunctionContext,
    s: complex,
    w: complex,
    tol: Optional[float] = None,
    best_effort: bool = False,
) -> VerificationRecord:
    """Residual |L(s - w f) - exp(f)| at f = f_eval(s, w)"""
    s, w = complex(s), complex(w)
    tol = ctx.tol if tol is None else tol
    f = f_eval(ctx, s, w, best_effort=best_effort, tol=tol * _SERIES_HEADROOM)
    argument = s - w * f.value
    if argument.real < ctx.sigma - _SLACK:
        raise DomainError(
            f"argument left of abscissa: Re(s - w f) = {argument.real!r} < sigma = {ctx.sigma!r}",
            parameter="w",
        )
    L = L_eval(ctx, argument)
    residual = abs(L.value - cmath.exp(f.value))
    return VerificationRecord(
        check="functional_equation",
        s=s,
        w=w,
        residual=residual,
        terms=f.terms_used,
        tail=f.tail_estimate,
        ok=residual < tol,
        extra={"f": _pair(f.value), "guaranteed": f.guaranteed},
    )


def exp_vf_identity(
    ctx: LFunctionContext,
    v: complex,
    s: complex,
    w: complex,
    tol: Optional[float] = None,
    best_effort: bool = False,
    mode: EvalMode = EvalMode.ACCELERATED,
) -> Tuple[complex, complex]:
    """(1 + v sum d~_{v + w ln n}(n) a(n) n^-s, exp(v f(s, w)))"""
    v, s, w = complex(v), complex(s), complex(w)
    tol = ctx.tol if tol is None else tol
    if v == 0:
        _require_domain(ctx, s, w, best_effort)
        return 1 + 0j, 1 + 0j
    f = f_eval(ctx, s, w, best_effort=best_effort, tol=tol * _SERIES_HEADROOM / max(abs(v), 1.0), mode=mode)
    shifted = shifted_series(
        ctx, s, w, v, tol * _SERIES_HEADROOM / abs(v), best_effort, mode, label="exp(v f) series"
    )
    return 1 + v * shifted.value, cmath.exp(v * f.value)


def newton_oracle(
    ctx: LFunctionContext,
    s: complex,
    w: complex,
    tol: Optional[float] = None,
    max_iter: int = 50,
    best_effort: bool = False,
) -> complex:
    """Solve ln L(s - w g) = g by damped Newton iteration from g = ln L(s)"""
    s, w = complex(s), complex(w)
    tol = ctx.tol if tol is None else tol
    _require_domain(ctx, s, w, best_effort)

    def G(g: complex) -> complex:
        return ln_L(ctx, s - w * g).value - g

    g = ln_L(ctx, s).value
    residual = float("inf")
    for iteration in range(max_iter + 1):
        argument = s - w * g
        residual = abs(L_eval(ctx, argument).value - cmath.exp(g))
        if residual < tol:
            logger.debug(f"Newton converged after {iteration} steps, residual {residual:.3e}")
            return g
        if iteration == max_iter:
            break
        current = G(g)
        slope = -w * ln_L_derivative(ctx, argument).value - 1
        step = -current / slope
        scale = 1.0
        while True:
            candidate = g + scale * step
            if (s - w * candidate).real >= ctx.sigma:
                trial = abs(G(candidate))
                if trial < abs(current) or trial < _G_FLOOR:
                    break
            scale /= 2
            if scale < 1e-10:
                raise NonConvergenceError(
                    f"Newton step could not reduce |G| at s={s}, w={w}", last_iterate=g, residual=residual
                )
        g = candidate
    raise NonConvergenceError(
        f"Newton did not reach residual {tol:g} in {max_iter} steps at s={s}, w={w}",
        last_iterate=g,
        residual=residual,
    )


def corollary_check(
    ctx: LFunctionContext, s: complex, w: complex, tol: Optional[float] = None
) -> VerificationRecord:
    """|f(s + w ln L(s), w) - ln L(s)| for Re(s) >= sigma + 2 gamma |w|"""
    s, w = complex(s), complex(w)
    tol = ctx.tol if tol is None else tol
    bound = ctx.sigma + 2 * ctx.gamma * abs(w)
    if s.real < bound - _SLACK:
        raise DomainError(f"corollary needs Re(s) >= sigma + 2 gamma|w| = {bound!r}, got {s.real!r}", parameter="s")
    log_L = ln_L(ctx, s)
    f = f_eval(ctx, s + w * log_L.value, w, tol=tol * _SERIES_HEADROOM)
    residual = abs(f.value - log_L.value)
    return VerificationRecord(
        check="corollary",
        s=s,
        w=w,
        residual=residual,
        terms=f.terms_used,
        tail=f.tail_estimate + log_L.tail_estimate,
        ok=residual < tol,
        extra={"ln_L": _pair(log_L.value)},
    )


def zeta_series_context() -> LFunctionContext:
    """The all-ones context at sigma = 1.4 behind the explicit series"""
    return make_context(MultiplicativeSpec.all_ones(), EXPLICIT_SERIES_SIGMA)


def explicit_series_rhs(v: complex) -> complex:
    v = complex(v)
    if abs(v) < _V_LIMIT:
        return complex(math.log(ZETA_2))
    return (ZETA_2**v - 1) / v


def explicit_series_demo(
    v: complex,
    z: complex,
    tol: Optional[float] = None,
    ctx: Optional[LFunctionContext] = None,
    mode: EvalMode = EvalMode.ACCELERATED,
) -> Tuple[complex, complex]:
    """(sum_{n >= 2} d~_{v + w ln n}(n) n^-z, ((pi^2/6)^v - 1) / v) with w = (z - 2) / ln(pi^2/6).

    The left side does not depend on z inside the disk |z - 2| <= 0.13.
    """
    v, z = complex(v), complex(z)
    if abs(z - 2) > EXPLICIT_SERIES_RADIUS + _SLACK:
        raise DomainError(f"z must satisfy |z - 2| <= {EXPLICIT_SERIES_RADIUS}, got {z}", parameter="z")
    ctx = ctx or zeta_series_context()
    tol = ctx.tol if tol is None else tol
    w = (z - 2) / math.log(ZETA_2)
    lhs = shifted_series(ctx, z, w, v, tol * _SERIES_HEADROOM, mode=mode, label="explicit series")
    return lhs.value, explicit_series_rhs(v)


def identity_from_kendall(
    ctx: LFunctionContext, x: float, c: float, s: complex, tol: Optional[float] = None
) -> Tuple[complex, complex]:
    """(sum d~_{cx + c ln n}(n) a(n) n^-s, (exp(cx f(s, c)) - 1) / (cx)) for x, c > 0"""
    if x <= 0 or c <= 0:
        raise DomainError("identity_from_kendall needs x > 0 and c > 0", parameter="x" if x <= 0 else "c")
    v = c * x
    lhs, rhs = exp_vf_identity(ctx, v, s, c, tol=tol)
    return (lhs - 1) / v, (rhs - 1) / v


def theorem_grid(ctx: LFunctionContext, rho: float, size: int = 5) -> List[Tuple[complex, complex]]:
    """size x size points: Re(s) in [sigma + gamma rho, +1], Im(s) in [-1, 1], |w| = rho"""
    base = DomainSpec.for_rho(ctx, rho).sigma0
    points = []
    for j, re in enumerate(np.linspace(base, base + 1, size)):
        for k, im in enumerate(np.linspace(-1, 1, size)):
            index = j * size + k
            w = rho * cmath.exp(2j * math.pi * index / (size * size))
            points.append((complex(re, im), w))
    return points


def _theorem_point(ctx: LFunctionContext, s: complex, w: complex, tol: float) -> VerificationRecord:
    record = verify_functional_equation(ctx, s, w, tol=tol)
    f_value = complex(*record.extra["f"])
    try:
        newton = newton_oracle(ctx, s, w, tol=tol * _ORACLE_HEADROOM)
        newton_diff = abs(newton - f_value)
    except NonConvergenceError as e:
        logger.warning(f"Newton oracle failed at s={s}, w={w}: {e}")
        newton, newton_diff = e.last_iterate, float("inf")
    bound_ok = abs(f_value) < ctx.gamma + record.tail + _SLACK
    extra = dict(record.extra)
    extra.update({"newton": _pair(newton), "newton_diff": newton_diff, "bound_ok": bound_ok, "gamma": ctx.gamma})
    return VerificationRecord(
        check="theorem",
        s=s,
        w=w,
        residual=record.residual,
        terms=record.terms,
        tail=record.tail,
        ok=record.ok and bound_ok and newton_diff < tol,
        extra=extra,
    )


def verify_theorem_grid(
    ctx: LFunctionContext,
    rho: float,
    tol: Optional[float] = None,
    size: int = 5,
    workers: Optional[int] = None,
) -> List[VerificationRecord]:
    """Functional equation, |f| < gamma and Newton agreement over the theorem grid"""
    tol = ctx.tol if tol is None else tol
    workers = workers or settings.workers
    points = theorem_grid(ctx, rho, size)
    logger.info(f"Verifying {len(points)} grid points with rho={rho}, tol={tol:g}, workers={workers}")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(lambda p: _theorem_point(ctx, p[0], p[1], tol), points))
    failed = sum(not r.ok for r in records)
    logger.info(f"Grid verification finished: {len(records) - failed} passed, {failed} failed")
    return records


def corollary_points(
    ctx: LFunctionContext, count: int = 10, radius: float = 0.05, offset: float = 1.5
) -> List[Tuple[complex, complex]]:
    """count points with Re(s) = sigma + 2 gamma radius + offset and |w| = radius"""
    base = ctx.sigma + 2 * ctx.gamma * radius + offset
    points = []
    for k in range(count):
        im = -1 + 2 * k / max(count - 1, 1)
        w = radius * cmath.exp(2j * math.pi * k / count)
        points.append((complex(base, im), w))
    return points


def verify_corollary_points(
    ctx: LFunctionContext, points: Iterable[Tuple[complex, complex]], tol: Optional[float] = None
) -> List[VerificationRecord]:
    return [corollary_check(ctx, s, w, tol=tol) for s, w in points]
