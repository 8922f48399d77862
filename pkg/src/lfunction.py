"""L-function evaluation: L(s), ln L(s), (ln L)'(s), L(s)^t and the constant gamma"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple

import mpmath
import numpy as np

from .config import settings
from .errors import DomainError, SeriesDivergenceError, TruncationCapError
from .multiplicative import factor_table, prime_sieve
from .spec_models import MultiplicativeSpec

logger = logging.getLogger(__name__)

Terms = Callable[[int, int], np.ndarray]

_CHUNK = 1 << 20
_ABSCISSA_SLACK = 1e-12
_BRANCH_TERMS = 1 << 16
_ROUNDING = 1e-15


class EvalMode(str, Enum):
    ACCELERATED = "accelerated"
    RAW = "raw"


@dataclass(frozen=True)
class SeriesValue:
    """A series value with its truncation index and estimated remaining error"""

    value: complex
    terms_used: int
    tail_estimate: float
    guaranteed: bool = True

    def __post_init__(self):
        if not self.tail_estimate >= 0:
            raise ValueError(f"tail_estimate must be nonnegative, got {self.tail_estimate}")
        if self.terms_used < 1:
            raise ValueError(f"terms_used must be >= 1, got {self.terms_used}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": [self.value.real, self.value.imag],
            "terms": self.terms_used,
            "tail": self.tail_estimate,
            "guaranteed": self.guaranteed,
        }


@dataclass(frozen=True)
class LFunctionContext:
    """A multiplicative spec together with its abscissa sigma and gamma = ln sum |a(n)| n^-sigma.

    Immutable after make_context; `prefix` holds the first 2 * prefix_terms
    coefficients (and, for explicit specs, the supporting primes).
    """

    spec: MultiplicativeSpec
    sigma: float
    gamma: float
    tol: float
    prefix_terms: int
    prefix: Dict[str, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    @property
    def abs_sum(self) -> float:
        return math.exp(self.gamma)

    def check_abscissa(self, s: complex, parameter: str = "s") -> None:
        if s.real < self.sigma - _ABSCISSA_SLACK:
            raise DomainError(
                f"argument left of abscissa: Re({parameter}) = {s.real!r} < sigma = {self.sigma!r}",
                parameter=parameter,
            )

    def summary(self) -> Dict[str, Any]:
        return {"spec": self.spec.to_json_dict(), "sigma": self.sigma, "gamma": self.gamma, "tol": self.tol}


@dataclass(frozen=True)
class DomainSpec:
    """The region Re(s) >= sigma0, |w| <= rho"""

    sigma0: float
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}", parameter="rho")

    @classmethod
    def for_rho(cls, ctx: LFunctionContext, rho: float) -> "DomainSpec":
        return cls(sigma0=ctx.sigma + ctx.gamma * rho, rho=rho)

    def contains(self, s: complex, w: complex) -> bool:
        return complex(s).real >= self.sigma0 - _ABSCISSA_SLACK and abs(w) <= self.rho + _ABSCISSA_SLACK


# -- generic truncated summation -------------------------------------------------


def chunked_sum(terms: Terms, lo: int, hi: int) -> complex:
    """sum of terms(a, b) over [lo, hi) in bounded-size chunks"""
    total = 0j
    for a in range(lo, hi, _CHUNK):
        total += complex(terms(a, min(a + _CHUNK, hi)).sum())
    return total


def adaptive_sum(
    terms: Terms,
    first: int,
    tol: float,
    start: Optional[int] = None,
    cap: Optional[int] = None,
    ratio: Optional[float] = None,
    label: str = "series",
) -> SeriesValue:
    """Sum terms over n >= first, doubling the truncation N until two
    consecutive increments are below tol.

    The tail estimate is the last increment, extrapolated geometrically when
    the caller knows the per-doubling decay `ratio` (< 1).
    """
    start = start or settings.start_terms
    cap = cap or settings.max_terms
    n_terms = max(start, first)
    value = chunked_sum(terms, first, n_terms + 1)
    increment = 0j
    quiet = 0
    while quiet < 2:
        if 2 * n_terms > cap:
            partial = SeriesValue(value, n_terms, abs(increment), guaranteed=False)
            raise TruncationCapError(
                f"truncation cap reached: {label} not stable to {tol:g} within {cap} terms "
                f"(last increment {abs(increment):.3e})",
                partial=partial,
            )
        increment = chunked_sum(terms, n_terms + 1, 2 * n_terms + 1)
        value += increment
        n_terms *= 2
        quiet = quiet + 1 if abs(increment) < tol else 0
    tail = abs(increment)
    if ratio is not None and 0 < ratio < 1:
        tail *= ratio / (1 - ratio)
    return SeriesValue(value, n_terms, tail)


def doubling_ratio(re_s: float) -> Optional[float]:
    """Per-doubling decay 2^(1 - Re s) of increments of n^-s type series"""
    return 2.0 ** (1.0 - re_s) if re_s > 1 else None


# -- context construction --------------------------------------------------------


def _prefix_arrays(spec: MultiplicativeSpec, n_terms: int) -> Dict[str, np.ndarray]:
    table = factor_table(2 * n_terms)
    prefix = {
        "a": table.coefficients(spec, 1, 2 * n_terms + 1),
        "log_n": table.log_n(1, 2 * n_terms + 1),
    }
    if spec.periodic_form() is None:
        primes = prime_sieve.primes_up_to(spec.horizon)
        values = spec.prime_values(primes)
        support = values != 0
        prefix["primes"] = primes[support]
        prefix["prime_values"] = values[support]
        prefix["log_p"] = np.log(primes[support].astype(np.float64))
    return prefix


def _dominating_sum(abs_spec: MultiplicativeSpec, sigma: float) -> float:
    """Closed form of sum |a(n)| n^-sigma"""
    periodic = abs_spec.periodic_form()
    if periodic is not None:
        if sigma <= 1:
            raise SeriesDivergenceError("series not absolutely convergent at sigma", parameter="sigma")
        q, values = periodic
        with mpmath.workdps(25):
            total = mpmath.mpf(0)
            for r in range(1, q + 1):
                v = values[r % q].real
                if v != 0:
                    total += v * mpmath.power(q, -sigma) * mpmath.zeta(sigma, mpmath.mpf(r) / q)
            return float(total)
    total = 1.0
    for p, v in abs_spec.explicit_values().items():
        x = v.real * p ** (-sigma)
        if x >= 1:
            raise SeriesDivergenceError("series not absolutely convergent at sigma", parameter="sigma")
        total /= 1 - x
    return total


def _convergence_self_check(abs_spec: MultiplicativeSpec, sigma: float, total: float, n_terms: int) -> None:
    """Partial sums must stay below the closed form and their doubling increments must shrink"""
    table = factor_table(4 * n_terms)
    weights = table.coefficients(abs_spec, 1, 4 * n_terms + 1).real * np.exp(
        -sigma * table.log_n(1, 4 * n_terms + 1)
    )
    partial = np.cumsum(weights)
    s1, s2, s4 = partial[n_terms - 1], partial[2 * n_terms - 1], partial[4 * n_terms - 1]
    slack = 1e-12 * max(total, 1.0)
    if s4 > total + slack or (s4 - s2) > (s2 - s1) + slack:
        raise SeriesDivergenceError("series not absolutely convergent at sigma", parameter="sigma")


def make_context(spec: MultiplicativeSpec, sigma: float, tol: Optional[float] = None) -> LFunctionContext:
    """Validate sigma as an abscissa of absolute convergence and compute gamma.

    gamma comes from the closed form of sum |a(n)| n^-sigma (Hurwitz zeta or
    a finite Euler product), so tol plays no part in it; tol is stored as the
    default target of every later series evaluation on the context.
    """
    tol = settings.tol if tol is None else tol
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}", parameter="tol")
    sigma = float(sigma)
    if not math.isfinite(sigma):
        raise DomainError(f"sigma must be finite, got {sigma}", parameter="sigma")
    abs_spec = spec.absolute()
    total = _dominating_sum(abs_spec, sigma)
    n_terms = settings.start_terms
    _convergence_self_check(abs_spec, sigma, total, n_terms)
    gamma = math.log(total)
    logger.info(f"Context built: kind={spec.kind.value} sigma={sigma} gamma={gamma:.12g}")
    return LFunctionContext(
        spec=spec,
        sigma=sigma,
        gamma=gamma,
        tol=tol,
        prefix_terms=n_terms,
        prefix=_prefix_arrays(spec, n_terms),
    )


# -- accelerated evaluation ------------------------------------------------------


def _hurwitz_tails(
    q: int, values: np.ndarray, s: complex, n_terms: int, with_log: bool = True
) -> Tuple[complex, complex]:
    """(sum_{n > N} a(n) n^-s, sum_{n > N} a(n) ln(n) n^-s) for a(n) periodic mod q

    Valid for every s except the pole at 1; with_log=False skips the second sum.
    """
    with mpmath.workdps(25):
        ss = mpmath.mpc(s.real, s.imag)
        scale = mpmath.power(q, -ss)
        log_q = mpmath.log(q)
        tail = mpmath.mpc(0)
        tail_log = mpmath.mpc(0)
        for r in range(q):
            v = complex(values[r])
            if v == 0:
                continue
            first = n_terms + 1 + (r - (n_terms + 1)) % q
            shift = mpmath.mpf(first) / q
            zeta = mpmath.zeta(ss, shift)
            weight = mpmath.mpc(v.real, v.imag) * scale
            tail += weight * zeta
            if with_log:
                tail_log += weight * (log_q * zeta - mpmath.zeta(ss, shift, 1))
        return complex(tail), complex(tail_log)


def _periodic_sums(ctx: LFunctionContext, s: complex, n_terms: int) -> Tuple[complex, complex]:
    q, values = ctx.spec.periodic_form()
    log_n = ctx.prefix["log_n"][:n_terms]
    powers = ctx.prefix["a"][:n_terms] * np.exp(-s * log_n)
    tail, tail_log = _hurwitz_tails(q, values, s, n_terms)
    return complex(powers.sum()) + tail, complex((powers * log_n).sum()) + tail_log


def _periodic_L_and_prime(ctx: LFunctionContext, s: complex) -> Tuple[SeriesValue, SeriesValue]:
    """L(s) and L'(s) from two truncations, each completed by its exact tail"""
    n_terms = ctx.prefix_terms
    value_1, log_1 = _periodic_sums(ctx, s, n_terms)
    value_2, log_2 = _periodic_sums(ctx, s, 2 * n_terms)
    L = SeriesValue(value_2, 2 * n_terms, abs(value_2 - value_1) + _ROUNDING * abs(value_2))
    L_prime = SeriesValue(-log_2, 2 * n_terms, abs(log_2 - log_1) + _ROUNDING * abs(log_2))
    return L, L_prime


def _explicit_factors(ctx: LFunctionContext, s: complex) -> Tuple[np.ndarray, int]:
    x = ctx.prefix["prime_values"] * np.exp(-s * ctx.prefix["log_p"])
    return x, max(len(x), 1)


# -- public evaluation API -------------------------------------------------------


def _raw_terms(ctx: LFunctionContext, s: complex, weight: str) -> Terms:
    def terms(lo: int, hi: int) -> np.ndarray:
        table = factor_table(hi - 1)
        log_n = table.log_n(lo, hi)
        base = table.coefficients(ctx.spec, lo, hi) * np.exp(-s * log_n)
        if weight == "plain":
            return base
        lam = table.von_mangoldt(lo, hi)
        if weight == "log":
            return base * lam / log_n
        return -base * lam

    return terms


def _abs_partial(ctx: LFunctionContext, n_terms: int, weight: str) -> float:
    abs_spec = ctx.spec.absolute()

    def terms(lo: int, hi: int) -> np.ndarray:
        table = factor_table(hi - 1)
        log_n = table.log_n(lo, hi)
        base = table.coefficients(abs_spec, lo, hi).real * np.exp(-ctx.sigma * log_n)
        if weight == "plain":
            return base
        return base * table.von_mangoldt(lo, hi) / log_n

    first = 1 if weight == "plain" else 2
    return chunked_sum(terms, first, n_terms + 1).real


def L_eval(ctx: LFunctionContext, s: complex, mode: EvalMode = EvalMode.ACCELERATED) -> SeriesValue:
    """L(s) = sum a(n) n^-s for Re(s) >= sigma"""
    s = complex(s)
    ctx.check_abscissa(s)
    if mode == EvalMode.RAW:
        result = adaptive_sum(_raw_terms(ctx, s, "plain"), 1, ctx.tol, label="L(s)")
        delta = s.real - ctx.sigma
        if delta > _ABSCISSA_SLACK:
            remainder = max(ctx.abs_sum - _abs_partial(ctx, result.terms_used, "plain"), 0.0)
            bound = (result.terms_used + 1) ** (-delta) * remainder
            result = SeriesValue(result.value, result.terms_used, bound)
        return result
    if ctx.spec.periodic_form() is None:
        x, count = _explicit_factors(ctx, s)
        value = complex(np.prod(1 / (1 - x)))
        return SeriesValue(value, count, _ROUNDING * count * abs(value))
    return _periodic_L_and_prime(ctx, s)[0]


def ln_L(ctx: LFunctionContext, s: complex, mode: EvalMode = EvalMode.ACCELERATED) -> SeriesValue:
    """ln L(s) on the branch of sum Lambda(n) a(n) / (ln(n) n^s)"""
    s = complex(s)
    ctx.check_abscissa(s)
    if mode == EvalMode.RAW:
        result = adaptive_sum(_raw_terms(ctx, s, "log"), 2, ctx.tol, label="ln L(s)")
        delta = s.real - ctx.sigma
        if delta > _ABSCISSA_SLACK:
            remainder = max(ctx.gamma - _abs_partial(ctx, result.terms_used, "log"), 0.0)
            bound = (result.terms_used + 1) ** (-delta) * remainder
            result = SeriesValue(result.value, result.terms_used, bound)
        return result
    if ctx.spec.periodic_form() is None:
        x, count = _explicit_factors(ctx, s)
        value = complex(-np.log(1 - x).sum())
        return SeriesValue(value, count, _ROUNDING * count * (1 + abs(value)))
    L = _periodic_L_and_prime(ctx, s)[0]
    value = cmath.log(L.value)
    if ctx.gamma >= math.pi:
        # |ln L| <= gamma no longer pins the branch; follow the raw series
        raw = chunked_sum(_raw_terms(ctx, s, "log"), 2, _BRANCH_TERMS + 1)
        value += 2j * math.pi * round((raw.imag - value.imag) / (2 * math.pi))
    return SeriesValue(value, L.terms_used, L.tail_estimate / abs(L.value))


def ln_L_derivative(ctx: LFunctionContext, s: complex, mode: EvalMode = EvalMode.ACCELERATED) -> SeriesValue:
    """(ln L)'(s) = -sum Lambda(n) a(n) n^-s"""
    s = complex(s)
    ctx.check_abscissa(s)
    if mode == EvalMode.RAW:
        return adaptive_sum(
            _raw_terms(ctx, s, "derivative"), 2, ctx.tol, ratio=doubling_ratio(s.real), label="(ln L)'(s)"
        )
    if ctx.spec.periodic_form() is None:
        x, count = _explicit_factors(ctx, s)
        value = complex((-ctx.prefix["log_p"] * x / (1 - x)).sum())
        return SeriesValue(value, count, _ROUNDING * count * (1 + abs(value)))
    L, L_prime = _periodic_L_and_prime(ctx, s)
    value = L_prime.value / L.value
    tail = (abs(L_prime.value) * L.tail_estimate + abs(L.value) * L_prime.tail_estimate) / abs(L.value) ** 2
    return SeriesValue(value, L.terms_used, tail)


def L_power_coefficients(ctx: LFunctionContext, t: complex, N: int) -> np.ndarray:
    """Dirichlet coefficients d_t(n) a(n) of L(s)^t for n = 1..N (entry k is n = k + 1)"""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}", parameter="N")
    table = factor_table(N)
    return table.d(complex(t), 1, N + 1) * table.coefficients(ctx.spec, 1, N + 1)


def euler_product(ctx: LFunctionContext, s: complex, P: int) -> complex:
    """prod_{p <= P} (1 - a(p) p^-s)^-1"""
    s = complex(s)
    primes = prime_sieve.primes_up_to(P)
    x = ctx.spec.prime_values(primes) * np.exp(-s * np.log(primes.astype(np.float64)))
    return complex(np.prod(1 / (1 - x)))


def phi_X(ctx: LFunctionContext, z: complex) -> complex:
    """Laplace exponent ln L(sigma) - ln L(sigma + z) of the jump process"""
    z = complex(z)
    if z.real < -_ABSCISSA_SLACK:
        raise DomainError(f"phi_X needs Re(z) >= 0, got {z}", parameter="z")
    return ln_L(ctx, ctx.sigma).value - ln_L(ctx, ctx.sigma + z).value


# -- analytic continuation on circles --------------------------------------------

_CIRCLE_NODES = 128


def analytic_abscissa(ctx: LFunctionContext) -> float:
    """Real part right of which ln L is analytic: 1 for periodic specs, max ln|a(p)| / ln p otherwise"""
    if ctx.spec.periodic_form() is not None:
        return 1.0
    values = ctx.prefix["prime_values"]
    if values.size == 0:
        return -math.inf
    return float(np.max(np.log(np.abs(values)) / ctx.prefix["log_p"]))


def circle_nodes(center: complex, radius: float, count: int = _CIRCLE_NODES) -> np.ndarray:
    """center + radius e^(2 pi i k / count) for k = 0..count-1"""
    return complex(center) + radius * np.exp(2j * np.pi * np.arange(count) / count)


def ln_L_on_circle(
    ctx: LFunctionContext, center: complex, radius: float, count: int = _CIRCLE_NODES
) -> np.ndarray:
    """ln L at circle_nodes(center, radius, count).

    The circle may reach left of sigma, where L is continued through the
    Hurwitz tail or the finite Euler product; it must stay right of
    analytic_abscissa. The values follow one continuous branch, pinned to
    ln_L at the first node when that node is right of sigma.
    """
    center = complex(center)
    edge = analytic_abscissa(ctx)
    if not radius > 0 or center.real - radius <= edge:
        raise DomainError(
            f"circle |x - {center}| = {radius} reaches Re(x) <= {edge!r} where ln L may be singular",
            parameter="s",
        )
    x = circle_nodes(center, radius, count)
    if ctx.spec.periodic_form() is None:
        factors = ctx.prefix["prime_values"][None, :] * np.exp(-np.outer(x, ctx.prefix["log_p"]))
        return -np.log1p(-factors).sum(axis=1)
    q, values = ctx.spec.periodic_form()
    n_terms = ctx.prefix_terms
    log_n = ctx.prefix["log_n"][:n_terms]
    head = (ctx.prefix["a"][:n_terms][None, :] * np.exp(-np.outer(x, log_n))).sum(axis=1)
    tails = np.array([_hurwitz_tails(q, values, xk, n_terms, with_log=False)[0] for xk in x])
    L = head + tails
    phase = np.unwrap(np.append(np.angle(L), np.angle(L[0])))
    if abs(phase[-1] - phase[0]) > math.pi:
        raise DomainError(f"L has a zero or pole inside |x - {center}| = {radius}", parameter="s")
    logs = np.log(np.abs(L)) + 1j * phase[:-1]
    if x[0].real >= ctx.sigma:
        anchor = ln_L(ctx, x[0]).value
        logs += 2j * math.pi * round((anchor.imag - logs[0].imag) / (2 * math.pi))
    return logs
