"""Factorisation and the general divisor function family d_z(n), d~_z(n)"""
import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .config import settings
from .errors import DomainError

logger = logging.getLogger(__name__)

Number = Union[int, float, complex, Fraction]

# Deterministic Miller-Rabin bases, valid for n < 3.3 * 10**24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _as_positive_int(n: Any, name: str = "n", minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {n!r}", parameter=name)
    n = int(n)
    if n < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {n}", parameter=name)
    return n


def _miller_rabin(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeSieve:
    """Sieve of Eratosthenes up to a fixed bound, built once and read-only afterwards"""

    def __init__(self, limit: int):
        self.limit = max(int(limit), 16)
        table = np.ones(self.limit + 1, dtype=bool)
        table[:2] = False
        for i in range(2, math.isqrt(self.limit) + 1):
            if table[i]:
                table[i * i :: i] = False
        self.table = table
        self.primes = np.flatnonzero(table)
        self.prime_list: List[int] = self.primes.tolist()
        logger.debug(f"Prime sieve built: {len(self.prime_list)} primes up to {self.limit}")

    def is_prime(self, n: int) -> bool:
        if n <= self.limit:
            return bool(self.table[n]) if n >= 0 else False
        return _miller_rabin(n)

    def primes_up_to(self, bound: int) -> np.ndarray:
        if bound > self.limit:
            raise DomainError(
                f"prime bound {bound} exceeds the sieve limit {self.limit}", parameter="bound"
            )
        return self.primes[: np.searchsorted(self.primes, bound, side="right")]


@dataclass(frozen=True)
class PrimeFactorization:
    """Prime factorisation as (prime, exponent) pairs with strictly increasing primes"""

    factors: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        last = 1
        for p, j in self.factors:
            if p <= last or j < 1 or not is_prime(p):
                raise DomainError(f"invalid factor entry ({p}, {j})", parameter="factors")
            last = p

    @property
    def n(self) -> int:
        value = 1
        for p, j in self.factors:
            value *= p**j
        return value

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        return sum(j for _, j in self.factors)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.factors)

    def to_list(self) -> List[List[int]]:
        return [[p, j] for p, j in self.factors]


def factorize(n: int) -> PrimeFactorization:
    """Trial division by sieve primes, then 6k +/- 1 beyond the sieve.

    Stops early once the cofactor tests prime. Fine up to 2**63 - 1 unless n has
    two prime factors both well above the sieve limit.
    """
    n = _as_positive_int(n)
    factors: List[Tuple[int, int]] = []
    m = n
    for p in prime_sieve.prime_list:
        if p * p > m:
            break
        if m % p == 0:
            j = 0
            while m % p == 0:
                m //= p
                j += 1
            factors.append((p, j))
    else:
        if m > 1 and not is_prime(m):
            p = prime_sieve.limit + 1
            p += (5 - p % 6) % 6  # next number of the form 6k - 1
            step = 2
            while p * p <= m:
                if m % p == 0:
                    j = 0
                    while m % p == 0:
                        m //= p
                        j += 1
                    factors.append((p, j))
                    if m > 1 and is_prime(m):
                        break
                p += step
                step = 6 - step
    if m > 1:
        factors.append((m, 1))
    return PrimeFactorization(tuple(factors))


def is_prime(n: int) -> bool:
    """Sieve lookup below the sieve limit, Miller-Rabin above it"""
    if n < 2:
        return False
    return prime_sieve.is_prime(int(n))


def omega(n: int) -> int:
    """Number of distinct prime factors of n"""
    return factorize(n).omega


def big_omega(n: int) -> int:
    """Number of prime factors of n counted with multiplicity"""
    return factorize(n).big_omega


def _binomial_product(z: Number, j: int, start: int = 1) -> Number:
    """prod_{i=start..j} (z + i - 1) / i, exact for Fraction z"""
    value: Number = 1
    for i in range(start, j + 1):
        value = value * (z + (i - 1)) / i
    return value


def d(z: Number, n: int) -> complex:
    """General divisor function: prod over p^j || n of binom(j + z - 1, j)"""
    result: Number = 1
    for _, j in factorize(n):
        result = result * _binomial_product(z, j)
    return complex(result)


def d_exact(z: Union[int, Fraction], n: int) -> Fraction:
    """d_z(n) in exact rational arithmetic"""
    z = Fraction(z)
    result = Fraction(1)
    for _, j in factorize(n):
        result *= _binomial_product(z, j)
    return result


def d_tilde(z: Number, n: int) -> complex:
    """d_z(n) / z with the z = 0 singularity removed.

    One factor z is taken out of every prime's binomial product, leaving
    z^(omega - 1) times a product that is regular at 0.
    """
    n = _as_positive_int(n, minimum=2)
    factorization = factorize(n)
    result: Number = 1
    for _ in range(factorization.omega - 1):
        result = result * z
    for _, j in factorization:
        result = result * _binomial_product(z, j, start=2)
    return complex(result)


def _poly_mul(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


@dataclass(frozen=True)
class DivisorPolynomial:
    """d~_z(n) as an exact polynomial in z, coefficients in ascending degree"""

    n: int
    coefficients: Tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, z: Number) -> Number:
        value: Number = 0
        for coefficient in reversed(self.coefficients):
            value = value * z + coefficient
        return value

    def roots(self) -> List[int]:
        """All roots, with multiplicity: 0 (omega - 1 times) and -1..-(j-1) per p^j"""
        factorization = factorize(self.n)
        found = [0] * (factorization.omega - 1)
        for _, j in factorization:
            found.extend(-(i - 1) for i in range(2, j + 1))
        return sorted(found)


def d_tilde_polynomial(n: int) -> DivisorPolynomial:
    """d~_z(n) as an exact polynomial in z of degree big_omega(n) - 1"""
    n = _as_positive_int(n, minimum=2)
    factorization = factorize(n)
    coefficients = [Fraction(1)]
    for _ in range(factorization.omega - 1):
        coefficients = _poly_mul(coefficients, [Fraction(0), Fraction(1)])
    for _, j in factorization:
        for i in range(2, j + 1):
            coefficients = _poly_mul(coefficients, [Fraction(i - 1, i), Fraction(1, i)])
    return DivisorPolynomial(n=n, coefficients=tuple(coefficients))


def von_mangoldt(n: int) -> float:
    """ln p when n is a power of the prime p, else 0"""
    factorization = factorize(n)
    if factorization.omega == 1:
        return math.log(factorization.factors[0][0])
    return 0.0


def mobius(n: int) -> int:
    """mu(n) = d_{-1}(n)"""
    return int(d_exact(-1, n))


def coefficient(spec: Any, n: int) -> complex:
    """a(n) = prod a(p)^j for a completely multiplicative spec"""
    value = 1 + 0j
    for p, j in factorize(n):
        value *= spec.value_at_prime(p) ** j
    return value


def dirichlet_convolve(a: Sequence[Any], b: Sequence[Any]) -> np.ndarray:
    """(a * b)(n) = sum_{k | n} a(k) b(n / k) for n = 1..N; index 0 is unused"""
    a = np.asarray(a)
    b = np.asarray(b)
    size = min(len(a), len(b)) - 1
    out = np.zeros(size + 1, dtype=np.result_type(a, b))
    for k in range(1, size + 1):
        if a[k] == 0:
            continue
        m = size // k
        out[k : size + 1 : k] += a[k] * b[1 : m + 1]
    return out


@dataclass(frozen=True)
class FactorTable:
    """Factorisations of 1..size in array form, indexed directly by n.

    Only the exponents >= 2 are kept per n (rows of `powerful_exponents`,
    aligned with the sorted `powerful_index`); exponent-one primes contribute
    a plain factor z which the omega count already accounts for.
    """

    size: int
    spf: np.ndarray
    omega: np.ndarray
    big_omega: np.ndarray
    powerful_index: np.ndarray
    powerful_exponents: np.ndarray

    def log_n(self, lo: int, hi: int) -> np.ndarray:
        return np.log(np.arange(lo, hi, dtype=np.float64))

    def von_mangoldt(self, lo: int, hi: int) -> np.ndarray:
        spf = self.spf[lo:hi]
        prime_power = self.omega[lo:hi] == 1
        out = np.zeros(hi - lo, dtype=np.float64)
        out[prime_power] = np.log(spf[prime_power].astype(np.float64))
        return out

    def _regular_part(self, z: np.ndarray, lo: int, hi: int) -> np.ndarray:
        """prod over p^j || n of prod_{i=2..j} (z + i - 1) / i"""
        out = np.ones(hi - lo, dtype=complex)
        a = np.searchsorted(self.powerful_index, lo)
        b = np.searchsorted(self.powerful_index, hi)
        if a == b:
            return out
        local = self.powerful_index[a:b] - lo
        exps = self.powerful_exponents[a:b]
        zz = z[local]
        g = np.ones(b - a, dtype=complex)
        for col in range(exps.shape[1]):
            j = exps[:, col]
            for i in range(2, int(j.max()) + 1):
                mask = j >= i
                g[mask] *= (zz[mask] + (i - 1)) / i
        out[local] = g
        return out

    def _z_power(self, z: np.ndarray, power: np.ndarray) -> np.ndarray:
        out = np.ones(power.shape, dtype=complex)
        top = int(power.max()) if power.size else 0
        for k in range(1, top + 1):
            mask = power >= k
            out[mask] *= z[mask]
        return out

    def _broadcast(self, z: Any, lo: int, hi: int) -> np.ndarray:
        return np.broadcast_to(np.asarray(z, dtype=complex), (hi - lo,))

    def d(self, z: Any, lo: int, hi: int) -> np.ndarray:
        """d_z(n) for n in [lo, hi); z scalar or one value per n"""
        z = self._broadcast(z, lo, hi)
        return self._z_power(z, self.omega[lo:hi]) * self._regular_part(z, lo, hi)

    def d_tilde(self, z: Any, lo: int, hi: int) -> np.ndarray:
        """d~_z(n) for n in [lo, hi), lo >= 2"""
        if lo < 2:
            raise DomainError("d_tilde is undefined at n = 1", parameter="n")
        z = self._broadcast(z, lo, hi)
        power = self.omega[lo:hi].astype(np.int64) - 1
        return self._z_power(z, power) * self._regular_part(z, lo, hi)

    def coefficients(self, spec: Any, lo: int, hi: int) -> np.ndarray:
        """a(n) for n in [lo, hi)"""
        periodic = spec.periodic_form()
        if periodic is not None:
            q, values = periodic
            return values[np.arange(lo, hi) % q]
        rem = np.arange(lo, hi, dtype=np.int64)
        out = np.ones(hi - lo, dtype=complex)
        active = np.flatnonzero(rem > 1)
        while active.size:
            p = self.spf[rem[active]]
            out[active] *= spec.prime_values(p)
            rem[active] //= p
            active = active[rem[active] > 1]
        return out


def _build_factor_table(size: int) -> FactorTable:
    spf = np.zeros(size + 1, dtype=np.int64)
    for p in prime_sieve.primes_up_to(math.isqrt(size)).tolist():
        block = spf[p * p :: p]
        block[block == 0] = p
    n = np.arange(size + 1, dtype=np.int64)
    unset = spf == 0
    spf[unset] = n[unset]
    spf[:2] = (0, 1)

    omega_arr = np.zeros(size + 1, dtype=np.int8)
    big_omega_arr = np.zeros(size + 1, dtype=np.int8)
    rem = n.copy()
    rem[0] = 1
    hit_index: List[np.ndarray] = []
    hit_exponent: List[np.ndarray] = []
    active = np.flatnonzero(rem > 1)
    while active.size:
        r = rem[active]
        p = spf[r]
        e = np.zeros(active.size, dtype=np.int8)
        divisible = r % p == 0
        while divisible.any():
            r[divisible] //= p[divisible]
            e[divisible] += 1
            divisible = r % p == 0
        rem[active] = r
        omega_arr[active] += 1
        big_omega_arr[active] += e
        square = e >= 2
        if square.any():
            hit_index.append(active[square])
            hit_exponent.append(e[square])
        active = active[r > 1]

    if hit_index:
        index = np.concatenate(hit_index)
        exponent = np.concatenate(hit_exponent)
        order = np.argsort(index, kind="stable")
        index, exponent = index[order], exponent[order]
        rows, start, counts = np.unique(index, return_index=True, return_counts=True)
        slot = np.arange(index.size) - np.repeat(start, counts)
        row = np.repeat(np.arange(rows.size), counts)
        matrix = np.zeros((rows.size, int(counts.max())), dtype=np.int8)
        matrix[row, slot] = exponent
    else:
        rows = np.zeros(0, dtype=np.int64)
        matrix = np.zeros((0, 1), dtype=np.int8)

    return FactorTable(
        size=size,
        spf=spf,
        omega=omega_arr,
        big_omega=big_omega_arr,
        powerful_index=rows,
        powerful_exponents=matrix,
    )


_table_lock = threading.Lock()
_cached_table: Dict[str, FactorTable] = {}


def factor_table(n_max: int) -> FactorTable:
    """Shared FactorTable covering 1..n_max, sized to the next power of two"""
    n_max = _as_positive_int(n_max, "n_max")
    size = max(1024, 1 << (n_max - 1).bit_length())
    with _table_lock:
        table = _cached_table.get("table")
        if table is None or table.size < size:
            logger.info(f"Building factor table up to {size}")
            table = _build_factor_table(size)
            _cached_table["table"] = table
    return table


def divisors(n: int) -> List[int]:
    """All positive divisors in increasing order"""
    found = [1]
    for p, j in factorize(n):
        found = [k * p**i for k in found for i in range(j + 1)]
    return sorted(found)


# Global instance
prime_sieve = PrimeSieve(settings.sieve_limit)
