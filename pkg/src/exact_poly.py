"""Exact multivariate rational polynomials and the divisor-function semigroup identities"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .multiplicative import d_exact, d_tilde_polynomial, divisors, factorize

logger = logging.getLogger(__name__)

Monomial = Tuple[Tuple[str, int], ...]
Scalar = Union[int, Fraction]

CONVENTIONS = ("reciprocal", "unit", "zero")


def _merge(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for var, e in b:
        powers[var] = powers.get(var, 0) + e
    return tuple(sorted(powers.items()))


class RationalPolynomial:
    """Sparse polynomial over Q in named variables; zero coefficients are never stored"""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, Scalar]] = None):
        self.terms: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in (terms or {}).items():
            coefficient = Fraction(coefficient)
            if coefficient != 0:
                key = tuple(sorted((v, e) for v, e in monomial if e != 0))
                self.terms[key] = self.terms.get(key, Fraction(0)) + coefficient
        self.terms = {m: c for m, c in self.terms.items() if c != 0}

    @classmethod
    def constant(cls, value: Scalar) -> "RationalPolynomial":
        return cls({(): value})

    @classmethod
    def variable(cls, name: str) -> "RationalPolynomial":
        return cls({((name, 1),): 1})

    @staticmethod
    def _coerce(other) -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial.constant(other)
        return NotImplemented

    def __add__(self, other) -> "RationalPolynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return RationalPolynomial(terms)

    __radd__ = __add__

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "RationalPolynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "RationalPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "RationalPolynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _merge(m1, m2)
                terms[m] = terms.get(m, Fraction(0)) + c1 * c2
        return RationalPolynomial(terms)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    __hash__ = None

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            monomial = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            parts.append(f"{c}" if not monomial else f"{c}*{monomial}")
        return " + ".join(parts)

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    @property
    def variables(self) -> List[str]:
        return sorted({v for m in self.terms for v, _ in m})

    def degree_in(self, name: str) -> int:
        return max((e for m in self.terms for v, e in m if v == name), default=0)

    def evaluate(self, assignment: Dict[str, Union[Scalar, float, complex]]):
        """Value at a full assignment; exact when every assigned value is rational"""
        total = 0
        for m, c in self.terms.items():
            value = c
            for v, e in m:
                value = value * assignment[v] ** e
            total = total + value
        return total

    def specialise(self, assignment: Dict[str, Scalar]) -> "RationalPolynomial":
        """Substitute rational values for some variables, keeping the rest symbolic"""
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            kept = []
            for v, e in m:
                if v in assignment:
                    c = c * Fraction(assignment[v]) ** e
                else:
                    kept.append((v, e))
            key = tuple(kept)
            terms[key] = terms.get(key, Fraction(0)) + c
        return RationalPolynomial(terms)


def log_symbol(prime: int) -> str:
    """Name of the variable standing for w * ln(prime)"""
    return f"wln{prime}"


def w_log(m: int) -> RationalPolynomial:
    """w ln(m) = sum_p j_p (w ln p), exact on the basis {w ln p}"""
    return RationalPolynomial({((log_symbol(p), 1),): j for p, j in factorize(m)})


def w_zero(poly: RationalPolynomial) -> RationalPolynomial:
    """The specialisation w = 0"""
    return poly.specialise({v: 0 for v in poly.variables if v.startswith("wln")})


def _as_poly(var: Union[str, RationalPolynomial]) -> RationalPolynomial:
    if isinstance(var, RationalPolynomial):
        return var
    total = RationalPolynomial()
    for name in var.split("+"):
        total = total + RationalPolynomial.variable(name.strip())
    return total


def d_tilde_shifted(
    n: int, var: Union[str, RationalPolynomial], shift_of: Optional[int] = None
) -> RationalPolynomial:
    """d~_z(n) at z = var + w ln(m), m = shift_of (default n), as an exact polynomial"""
    z = _as_poly(var) + w_log(n if shift_of is None else shift_of)
    result = RationalPolynomial()
    for coefficient in reversed(d_tilde_polynomial(n).coefficients):
        result = result * z + coefficient
    return result


def d_polynomial(n: int, var: Union[str, RationalPolynomial]) -> RationalPolynomial:
    """d_v(n) = prod_{p^j || n} prod_{i=1..j} (v + i - 1) / i"""
    v = _as_poly(var)
    result = RationalPolynomial.constant(1)
    for _, j in factorize(n):
        for i in range(1, j + 1):
            result = result * (v + (i - 1)) * Fraction(1, i)
    return result


@lru_cache(maxsize=None)
def _scaled_term(var: str, k: int, convention: str) -> RationalPolynomial:
    """v d~_{v + w ln k}(k), with the k = 1 value fixed by the boundary convention"""
    v = _as_poly(var)
    if k == 1:
        if convention == "reciprocal":
            return RationalPolynomial.constant(1)
        if convention == "unit":
            return v
        if convention == "zero":
            return RationalPolynomial()
        raise ValueError(f"Unknown boundary convention {convention!r}. Choices: {list(CONVENTIONS)}")
    return v * d_tilde_shifted(k, v)


def semigroup_sides(n: int, convention: str) -> Tuple[RationalPolynomial, RationalPolynomial]:
    """(t+s) d~_{t+s+w ln n}(n) and ts sum_{k|n} d~_{t+w ln k}(k) d~_{s+w ln(n/k)}(n/k)"""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    lhs = _scaled_term("t+s", n, convention)
    rhs = RationalPolynomial()
    for k in divisors(n):
        rhs = rhs + _scaled_term("t", k, convention) * _scaled_term("s", n // k, convention)
    return lhs, rhs


@lru_cache(maxsize=None)
def resolve_boundary_convention(max_n: int = 12) -> Optional[str]:
    """First convention for the k in {1, n} terms that is exact for every 2 <= n <= max_n"""
    for convention in CONVENTIONS:
        failures = [n for n in range(2, max_n + 1) if not _sides_equal(n, convention)]
        if not failures:
            logger.info(f"Boundary convention '{convention}' is exact for 2 <= n <= {max_n}")
            return convention
        logger.debug(f"Boundary convention '{convention}' fails at n = {failures[:5]}")
    logger.error(f"No boundary convention is exact for 2 <= n <= {max_n}")
    return None


def _sides_equal(n: int, convention: str) -> bool:
    lhs, rhs = semigroup_sides(n, convention)
    return lhs == rhs


def semigroup_identity_check(n: int, convention: Optional[str] = None) -> bool:
    """Exact coefficient-wise check of the shifted semigroup identity at n"""
    convention = convention or resolve_boundary_convention()
    if convention is None:
        return False
    return _sides_equal(n, convention)


def classical_convolution_check(n: int, trials: int = 0, seed: int = 0) -> bool:
    """d_{t+s}(n) = sum_{k|n} d_t(k) d_s(n/k), exactly and at `trials` random rational points"""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    lhs = d_polynomial(n, "t+s")
    rhs = RationalPolynomial()
    for k in divisors(n):
        rhs = rhs + d_polynomial(k, "t") * d_polynomial(n // k, "s")
    if lhs != rhs:
        return False
    rng = np.random.default_rng([seed, n])
    for _ in range(trials):
        t = Fraction(int(rng.integers(-60, 61)), int(rng.integers(1, 25)))
        s = Fraction(int(rng.integers(-60, 61)), int(rng.integers(1, 25)))
        if d_exact(t + s, n) != sum(d_exact(t, k) * d_exact(s, n // k) for k in divisors(n)):
            return False
    return True


def semigroup_report(max_n: int, convention: Optional[str] = None, trials: int = 2) -> List[Dict]:
    """One row per 2 <= n <= max_n: {n, ok, convention, max_degree, num_terms, classical_ok}"""
    convention = convention or resolve_boundary_convention()
    rows = []
    for n in range(2, max_n + 1):
        if convention is None:
            ok, degree, terms = False, 0, 0
        else:
            lhs, rhs = semigroup_sides(n, convention)
            ok = lhs == rhs
            degree, terms = max(lhs.degree, rhs.degree), lhs.num_terms
        rows.append(
            {
                "n": n,
                "ok": ok,
                "convention": convention,
                "max_degree": degree,
                "num_terms": terms,
                "classical_ok": classical_convolution_check(n, trials=trials),
            }
        )
    failed = [r["n"] for r in rows if not (r["ok"] and r["classical_ok"])]
    logger.info(f"Semigroup report up to {max_n}: {len(rows) - len(failed)} exact, failures at {failed[:10]}")
    return rows

