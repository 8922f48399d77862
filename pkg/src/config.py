"""Runtime settings loaded from the environment (and an optional .env file)"""
import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


@dataclass(frozen=True)
class Settings:
    """Numeric defaults shared by every module"""

    sieve_limit: int = 10**6
    start_terms: int = 2**10
    max_terms: int = 2**24
    tol: float = 1e-10
    atom_terms: int = 2**16
    atom_tail_tol: float = 1e-4
    block_paths: int = 2**15
    workers: int = 1
    horizon_factor: float = 20.0
    z_threshold: float = 4.0
    chi2_pmin: float = 1e-4
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            sieve_limit=_env_int("DIRICHLET_SIEVE_LIMIT", cls.sieve_limit),
            start_terms=_env_int("DIRICHLET_START_TERMS", cls.start_terms),
            max_terms=_env_int("DIRICHLET_MAX_TERMS", cls.max_terms),
            tol=_env_float("DIRICHLET_TOL", cls.tol),
            atom_terms=_env_int("DIRICHLET_ATOM_TERMS", cls.atom_terms),
            atom_tail_tol=_env_float("DIRICHLET_ATOM_TAIL_TOL", cls.atom_tail_tol),
            block_paths=_env_int("DIRICHLET_BLOCK_PATHS", cls.block_paths),
            workers=_env_int("DIRICHLET_WORKERS", cls.workers),
            horizon_factor=_env_float("DIRICHLET_HORIZON_FACTOR", cls.horizon_factor),
            z_threshold=_env_float("DIRICHLET_Z_THRESHOLD", cls.z_threshold),
            chi2_pmin=_env_float("DIRICHLET_CHI2_PMIN", cls.chi2_pmin),
            log_level=os.getenv("DIRICHLET_LOG_LEVEL", cls.log_level).upper(),
        )


settings = Settings.from_env()

logging.basicConfig(level=getattr(logging, settings.log_level, logging.INFO))
