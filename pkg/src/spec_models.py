"""Pydantic schemas for multiplicative-function specs and CLI run configurations"""
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .multiplicative import is_prime

ComplexPair = Tuple[float, float]

_CHARACTER_TOL = 1e-12


def _to_pair(value: Any) -> ComplexPair:
    """Accept [re, im], a bare real number, or a Python complex"""
    if isinstance(value, complex):
        return (value.real, value.imag)
    if isinstance(value, (int, float)):
        return (float(value), 0.0)
    re, im = value
    return (float(re), float(im))


class SpecKind(str, Enum):
    ALL_ONES = "all_ones"
    CHARACTER = "character"
    EXPLICIT_PRIMES = "explicit_primes"


class MultiplicativeSpec(BaseModel):
    """A completely multiplicative a(n), determined by its values on primes"""

    model_config = ConfigDict(frozen=True)

    kind: SpecKind
    modulus: Optional[int] = None
    values: Optional[Union[List[ComplexPair], Dict[str, ComplexPair]]] = None
    prime_horizon: Optional[int] = None

    @field_validator("values", mode="before")
    @classmethod
    def _normalise_values(cls, values: Any) -> Any:
        if values is None:
            return None
        if isinstance(values, dict):
            return {str(int(k)): _to_pair(v) for k, v in values.items()}
        return [_to_pair(v) for v in values]

    @model_validator(mode="after")
    def _check_kind(self) -> "MultiplicativeSpec":
        if self.kind == SpecKind.CHARACTER:
            self._check_character()
        elif self.kind == SpecKind.EXPLICIT_PRIMES:
            self._check_explicit()
        return self

    def _check_character(self) -> None:
        q = self.modulus
        if q is None or q < 1:
            raise ValueError("character spec needs a positive 'modulus'")
        if not isinstance(self.values, list) or len(self.values) != q:
            raise ValueError(f"character spec needs {q} residue values, one per residue mod {q}")
        chi = self.character_values()
        if abs(chi[1 % q] - 1) > _CHARACTER_TOL:
            raise ValueError("character must satisfy chi(1) = 1")
        for r in range(q):
            if math.gcd(r, q) != 1 and abs(chi[r]) > _CHARACTER_TOL:
                raise ValueError(f"character value at residue {r} must vanish (gcd with {q} > 1)")
        for a in range(q):
            for b in range(q):
                if abs(chi[(a * b) % q] - chi[a] * chi[b]) > _CHARACTER_TOL:
                    raise ValueError(f"character values are not multiplicative at residues {a}, {b}")

    def _check_explicit(self) -> None:
        values = self.values or {}
        if not isinstance(values, dict):
            raise ValueError("explicit_primes spec needs a prime -> [re, im] mapping")
        primes = [int(k) for k in values]
        for p in primes:
            if not is_prime(p):
                raise ValueError(f"explicit_primes key {p} is not prime")
        if self.prime_horizon is not None:
            if self.prime_horizon < 1:
                raise ValueError("prime_horizon must be positive")
            if primes and max(primes) > self.prime_horizon:
                raise ValueError(f"prime {max(primes)} lies beyond prime_horizon {self.prime_horizon}")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def all_ones(cls) -> "MultiplicativeSpec":
        return cls(kind=SpecKind.ALL_ONES)

    @classmethod
    def character(cls, modulus: int, values: List[Any]) -> "MultiplicativeSpec":
        return cls(kind=SpecKind.CHARACTER, modulus=modulus, values=values)

    @classmethod
    def explicit_primes(
        cls, values: Dict[int, Any], prime_horizon: Optional[int] = None
    ) -> "MultiplicativeSpec":
        return cls(
            kind=SpecKind.EXPLICIT_PRIMES,
            values={str(p): v for p, v in values.items()},
            prime_horizon=prime_horizon,
        )

    @classmethod
    def builtin(cls, name: str) -> "MultiplicativeSpec":
        """Named specs available without a file: 'zeta' and 'chi4'"""
        if name == "zeta":
            return cls.all_ones()
        if name == "chi4":
            return cls.character(4, [0, 1, 0, -1])
        raise ValueError(f"Unknown builtin spec {name!r}. Choices: ['zeta', 'chi4']")

    @classmethod
    def load(cls, source: Union[str, Path]) -> "MultiplicativeSpec":
        """Load a builtin name or a JSON file"""
        if str(source) in ("zeta", "chi4"):
            return cls.builtin(str(source))
        with open(source, "r") as f:
            return cls.model_validate(json.load(f))

    def to_json_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind == SpecKind.CHARACTER:
            data["modulus"] = self.modulus
            data["values"] = [list(v) for v in self.values]
        elif self.kind == SpecKind.EXPLICIT_PRIMES:
            data["values"] = {k: list(v) for k, v in sorted((self.values or {}).items(), key=lambda kv: int(kv[0]))}
            data["prime_horizon"] = self.horizon
        return data

    # -- evaluation helpers ---------------------------------------------------

    def character_values(self) -> np.ndarray:
        """Residue values chi(0..q-1) as complex numbers"""
        return np.array([complex(re, im) for re, im in self.values], dtype=complex)

    def explicit_values(self) -> Dict[int, complex]:
        """Prime -> a(p) for the primes given an explicit value"""
        return {int(k): complex(re, im) for k, (re, im) in (self.values or {}).items()}

    @property
    def horizon(self) -> Optional[int]:
        """Largest prime with a possibly nonzero value (None: unbounded)"""
        if self.kind != SpecKind.EXPLICIT_PRIMES:
            return None
        if self.prime_horizon is not None:
            return self.prime_horizon
        primes = [int(k) for k in (self.values or {})]
        return max(primes) if primes else 1

    def periodic_form(self) -> Optional[Tuple[int, np.ndarray]]:
        """(period, values indexed by residue) when a(n) depends only on n mod q"""
        if self.kind == SpecKind.ALL_ONES:
            return 1, np.ones(1, dtype=complex)
        if self.kind == SpecKind.CHARACTER:
            return self.modulus, self.character_values()
        return None

    def value_at_prime(self, p: int) -> complex:
        """a(p); primes an explicit spec does not list give 0"""
        if self.kind == SpecKind.ALL_ONES:
            return 1 + 0j
        if self.kind == SpecKind.CHARACTER:
            return complex(self.character_values()[p % self.modulus])
        return self.explicit_values().get(int(p), 0j)

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        """Vectorised a(p) for an array of primes"""
        primes = np.asarray(primes, dtype=np.int64)
        if self.kind == SpecKind.ALL_ONES:
            return np.ones(primes.shape, dtype=complex)
        if self.kind == SpecKind.CHARACTER:
            return self.character_values()[primes % self.modulus]
        lookup = np.zeros(self.horizon + 1, dtype=complex)
        for p, v in self.explicit_values().items():
            lookup[p] = v
        out = np.zeros(primes.shape, dtype=complex)
        inside = primes <= self.horizon
        out[inside] = lookup[primes[inside]]
        return out

    def absolute(self) -> "MultiplicativeSpec":
        """The spec of |a(n)|, which is again completely multiplicative"""
        if self.kind == SpecKind.ALL_ONES:
            return self
        if self.kind == SpecKind.CHARACTER:
            return MultiplicativeSpec(
                kind=SpecKind.CHARACTER,
                modulus=self.modulus,
                values=[abs(v) for v in self.character_values()],
            )
        return MultiplicativeSpec(
            kind=SpecKind.EXPLICIT_PRIMES,
            values={k: abs(complex(*v)) for k, v in (self.values or {}).items()},
            prime_horizon=self.prime_horizon,
        )

    def is_nonnegative(self) -> bool:
        """True when every a(p), hence every a(n), is a nonnegative real"""
        if self.kind == SpecKind.ALL_ONES:
            return True
        if self.kind == SpecKind.CHARACTER:
            vals = self.character_values()
        else:
            vals = np.array(list(self.explicit_values().values()) or [0j])
        return bool(np.all(vals.imag == 0) and np.all(vals.real >= 0))


class Command(str, Enum):
    EVAL_F = "eval-f"
    EVAL_L = "eval-L"
    VERIFY_THM1 = "verify-thm1"
    VERIFY_COROLLARY = "verify-corollary"
    VERIFY_SEMIGROUP = "verify-semigroup"
    DEMO_EXPLICIT_SERIES = "demo-explicit-series"
    SIMULATE = "simulate"
    CHECK_KENDALL = "check-kendall"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    HUMAN = "human"


_NEEDS_SPEC = {
    Command.EVAL_F,
    Command.EVAL_L,
    Command.VERIFY_THM1,
    Command.VERIFY_COROLLARY,
    Command.SIMULATE,
    Command.CHECK_KENDALL,
}

_REQUIRED = {
    Command.EVAL_F: ("sigma", "s", "w"),
    Command.EVAL_L: ("sigma", "s"),
    Command.VERIFY_THM1: ("sigma", "rho"),
    Command.VERIFY_COROLLARY: ("sigma",),
    Command.VERIFY_SEMIGROUP: ("max_n",),
    Command.DEMO_EXPLICIT_SERIES: ("v", "z"),
    Command.SIMULATE: ("sigma",),
    Command.CHECK_KENDALL: ("sigma", "c", "y", "t"),
}


class RunConfig(BaseModel):
    """Validated parameter set of one CLI invocation"""

    command: Command
    spec_path: Optional[str] = None
    sigma: Optional[float] = None
    s: Optional[ComplexPair] = None
    w: Optional[ComplexPair] = None
    v: Optional[ComplexPair] = None
    z: Optional[ComplexPair] = None
    rho: Optional[float] = Field(default=None, gt=0)
    tol: float = Field(default=1e-8, gt=0)
    max_n: Optional[int] = Field(default=None, ge=1)
    n_max: int = Field(default=20, ge=1)
    paths: int = Field(default=100_000, ge=1)
    seed: int = Field(default=0, ge=0)
    c: Optional[float] = Field(default=None, gt=0)
    x: Optional[float] = Field(default=None, gt=0)
    y: Optional[float] = Field(default=None, gt=0)
    t: Optional[float] = Field(default=None, gt=0)
    workers: Optional[int] = Field(default=None, ge=1)
    best_effort: bool = False
    mode: str = Field(default="accelerated", pattern="^(accelerated|raw)$")
    output: Optional[str] = None
    reference: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON

    @field_validator("s", "w", "v", "z", mode="before")
    @classmethod
    def _complex_flag(cls, value: Any) -> Any:
        if value is None:
            return None
        if isinstance(value, (list, tuple)) and len(value) == 1:
            return (float(value[0]), 0.0)
        return _to_pair(value)

    @model_validator(mode="after")
    def _check_command_parameters(self) -> "RunConfig":
        if self.command in _NEEDS_SPEC and not self.spec_path:
            raise ValueError(f"{self.command.value} needs --spec")
        for name in _REQUIRED[self.command]:
            if getattr(self, name) is None:
                raise ValueError(f"{self.command.value} needs --{name.replace('_', '-')}")
        if self.command == Command.SIMULATE and self.t is None and self.x is None:
            raise ValueError("simulate needs --t (marginal law) and/or --x with --c (first passage)")
        if self.command == Command.SIMULATE and self.x is not None and self.c is None:
            raise ValueError("simulate --x needs --c")
        return self

    def complex_param(self, name: str) -> complex:
        pair = getattr(self, name)
        return complex(pair[0], pair[1])
