"""Monte Carlo simulation of the compound Poisson jump process X with atoms at ln n,
its first-passage times Y_x, and checks of their laws against closed forms"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .config import settings
from .errors import DomainError
from .inversion import f_eval
from .lfunction import LFunctionContext, ln_L, phi_X
from .multiplicative import coefficient, d, factor_table

logger = logging.getLogger(__name__)

_MIN_EXPECTED = 10.0
_LABEL_GUARD = 1e-6
_CENSOR_LIMIT = 1e-3
_DETERMINISTIC_TOL = 1e-12


@dataclass(frozen=True)
class SubordinatorModel:
    """Atoms x = ln n (n a prime power <= N) with masses a(n) / (j n^sigma) for n = p^j"""

    ctx: LFunctionContext
    sigma: float
    atom_n: np.ndarray
    atom_x: np.ndarray
    atom_mass: np.ndarray
    total_mass: float
    log_L_sigma: float
    cdf: np.ndarray

    @property
    def jump_atoms(self) -> List[Tuple[float, float]]:
        return list(zip(self.atom_x.tolist(), self.atom_mass.tolist()))

    @property
    def mass_defect(self) -> float:
        return self.log_L_sigma - self.total_mass

    @property
    def mean_rate(self) -> float:
        """E[X_1] = sum of mass * ln n"""
        return float(np.dot(self.atom_mass, self.atom_x))

    def draw_atoms(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if size == 0 or self.total_mass == 0:
            return np.zeros(size, dtype=np.int64)
        index = np.searchsorted(self.cdf, rng.random(size), side="right")
        return np.minimum(index, self.atom_x.size - 1)

    def phi(self, z: float) -> float:
        """Laplace exponent of the simulated (atom-truncated) process"""
        return float(np.dot(self.atom_mass, 1 - np.exp(-z * self.atom_x)))

    def phi_prime(self, z: float) -> float:
        return float(np.dot(self.atom_mass * self.atom_x, np.exp(-z * self.atom_x)))


@dataclass(frozen=True)
class PathRecord:
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    horizon: float

    def value_at(self, t: float) -> float:
        """X_t: sum of the jumps up to time t"""
        return float(self.jump_sizes[self.jump_times <= t].sum())


@dataclass(frozen=True)
class FirstPassageSample:
    x: float
    y: float
    n_label: Optional[int]

    @property
    def hit(self) -> bool:
        return math.isfinite(self.y)


@dataclass
class MonteCarloReport:
    """Outcome of one Monte Carlo check, with per-cell rows where the check has cells"""

    check: str
    params: Dict[str, Any]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    ok: bool = True
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "params": self.params,
            "rows": self.rows,
            "summary": self.summary,
            "ok": self.ok,
            "warnings": self.warnings,
        }


def build_model(ctx: LFunctionContext, sigma: Optional[float] = None, N: Optional[int] = None) -> SubordinatorModel:
    """Atoms of the Levy measure for n = 2..N"""
    sigma = ctx.sigma if sigma is None else float(sigma)
    N = N or settings.atom_terms
    if not ctx.spec.is_nonnegative():
        raise DomainError("probabilistic mode requires nonnegative coefficients", parameter="spec")
    ctx.check_abscissa(complex(sigma), parameter="sigma")
    table = factor_table(N)
    n = np.arange(2, N + 1)
    prime_power = table.omega[2 : N + 1] == 1
    n = n[prime_power]
    j = table.big_omega[2 : N + 1][prime_power].astype(np.float64)
    a = table.coefficients(ctx.spec, 2, N + 1)[prime_power].real
    mass = a / (j * np.exp(sigma * np.log(n)))
    keep = mass > 0
    n, mass = n[keep], mass[keep]
    total = math.fsum(mass.tolist())
    log_L = ln_L(ctx, sigma).value.real
    defect = log_L - total
    if defect > settings.atom_tail_tol:
        raise DomainError(
            f"atom truncation N={N} leaves mass defect {defect:.3e} > {settings.atom_tail_tol:g}; increase N",
            parameter="N",
        )
    cdf = np.cumsum(mass) / total if total > 0 else np.zeros(0)
    if cdf.size:
        cdf[-1] = 1.0
    logger.info(f"Jump model: {n.size} atoms up to {N}, total mass {total:.10g}, defect {defect:.3e}")
    return SubordinatorModel(
        ctx=ctx,
        sigma=sigma,
        atom_n=n,
        atom_x=np.log(n.astype(np.float64)),
        atom_mass=mass,
        total_mass=total,
        log_L_sigma=log_L,
        cdf=cdf,
    )


# -- randomness and block scheduling ---------------------------------------------


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent counter-based stream for one block of paths"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def run_blocks(
    paths: int, seed: int, block_fn: Callable[[np.random.Generator, int], Any], workers: Optional[int] = None
) -> List[Any]:
    """Run block_fn over fixed-size path blocks; results come back in block order"""
    size = settings.block_paths
    blocks = [(b, min(size, paths - b * size)) for b in range(math.ceil(paths / size))]
    workers = workers or settings.workers

    def run(item: Tuple[int, int]) -> Any:
        return block_fn(block_rng(seed, item[0]), item[1])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, blocks))
    return [run(item) for item in blocks]


def _simulate_jumps(model: SubordinatorModel, t: float, rng: np.random.Generator, count: int):
    """Jump counts per path and the atom index of every jump, path-major"""
    if model.total_mass == 0:
        return np.zeros(count, dtype=np.int64), np.zeros(0, dtype=np.int64)
    jumps = rng.poisson(model.total_mass * t, size=count)
    return jumps, model.draw_atoms(rng, int(jumps.sum()))


def _simulate_levels(model: SubordinatorModel, t: float, rng: np.random.Generator, count: int) -> np.ndarray:
    jumps, atoms = _simulate_jumps(model, t, rng, count)
    owner = np.repeat(np.arange(count), jumps)
    return np.bincount(owner, weights=model.atom_x[atoms], minlength=count) if atoms.size else np.zeros(count)


def _labels(levels: np.ndarray, n_max: int) -> np.ndarray:
    """n with ln n = level for levels up to ln n_max, else 0"""
    labels = np.zeros(levels.shape, dtype=np.int64)
    small = levels < math.log(n_max + 0.5)
    labels[small] = np.rint(np.exp(levels[small])).astype(np.int64)
    return labels


# -- closed forms ----------------------------------------------------------------


def marginal_probability(model: SubordinatorModel, n: int, t: float, truncated: bool = True) -> float:
    """P(X_t = ln n) = L(sigma)^-t d_t(n) a(n) n^-sigma"""
    rate = model.total_mass if truncated else model.log_L_sigma
    return math.exp(-rate * t) * (d(t, n) * coefficient(model.ctx.spec, n)).real * n ** (-model.sigma)


def passage_probability(model: SubordinatorModel, n: int, x: float, c: float, truncated: bool = True) -> float:
    """P(Y_x = cx + c ln n) = P(X_{cx + c ln n} = ln n) x / (x + ln n)"""
    log_n = math.log(n)
    return marginal_probability(model, n, c * (x + log_n), truncated) * x / (x + log_n)


def _goodness_of_fit(counts: np.ndarray, probabilities: np.ndarray, paths: int) -> Dict[str, Any]:
    """Pearson chi-square over cells with expected count >= 10 plus the lumped remainder"""
    expected = paths * probabilities
    tested = expected >= _MIN_EXPECTED
    observed_cells = counts[tested].astype(np.float64).tolist()
    expected_cells = expected[tested].tolist()
    rest_observed = paths - sum(observed_cells)
    rest_expected = paths - sum(expected_cells)
    if rest_expected >= _MIN_EXPECTED or not observed_cells:
        observed_cells.append(rest_observed)
        expected_cells.append(rest_expected)
    else:
        smallest = int(np.argmin(expected_cells))
        observed_cells[smallest] += rest_observed
        expected_cells[smallest] += rest_expected
    observed_arr, expected_arr = np.array(observed_cells), np.array(expected_cells)
    usable = expected_arr > 0
    chi2 = float((((observed_arr - expected_arr) ** 2)[usable] / expected_arr[usable]).sum())
    dof = int(usable.sum()) - 1
    p_value = float(stats.chi2.sf(chi2, dof)) if dof > 0 else 1.0
    return {"tested": tested, "chi2": chi2, "dof": dof, "p_value": p_value}


def _cell_rows(
    counts: np.ndarray, theoretical: np.ndarray, closed_form: np.ndarray, paths: int, tested: np.ndarray
) -> Tuple[List[Dict[str, Any]], float]:
    rows = []
    worst = 0.0
    for k in range(counts.size):
        p = float(theoretical[k])
        variance = paths * p * (1 - p)
        if variance > 0:
            z = (float(counts[k]) - paths * p) / math.sqrt(variance)
        else:
            z = 0.0 if counts[k] == 0 else math.inf
        if tested[k]:
            worst = max(worst, abs(z))
        rows.append(
            {
                "n": k + 1,
                "count": int(counts[k]),
                "empirical": float(counts[k]) / paths,
                "theoretical": p,
                "closed_form": float(closed_form[k]),
                "expected": paths * p,
                "z": z,
                "tested": bool(tested[k]),
            }
        )
    return rows, worst


# -- single-path API -------------------------------------------------------------


def sample_path(model: SubordinatorModel, t_max: float, seed: int) -> PathRecord:
    """One path on [0, t_max]: Poisson(lambda t_max) jumps at uniform times"""
    if t_max <= 0:
        raise DomainError(f"t_max must be positive, got {t_max}", parameter="t_max")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))
    if model.total_mass == 0:
        return PathRecord(np.zeros(0), np.zeros(0), t_max)
    count = int(rng.poisson(model.total_mass * t_max))
    times = np.sort(rng.uniform(0, t_max, size=count))
    sizes = model.atom_x[model.draw_atoms(rng, count)]
    return PathRecord(times, sizes, t_max)


def label_from_level(level: float) -> Optional[int]:
    """n with ln n = level, or None outside the guard band"""
    value = math.exp(level)
    n = round(value)
    if n < 1 or abs(value - n) > _LABEL_GUARD * n:
        return None
    return n


def first_passage(path: PathRecord, x: float, c: float) -> FirstPassageSample:
    """First time Z_t = t/c - X_t exceeds x; not hit when that lies past the horizon"""
    if c <= 0 or x <= 0:
        raise DomainError("first passage needs c > 0 and x > 0", parameter="c" if c <= 0 else "x")
    level = 0.0
    for time, size in zip(path.jump_times.tolist(), path.jump_sizes.tolist()):
        target = c * (x + level)
        if target < time:
            break
        level += size
    target = c * (x + level)
    if target > path.horizon:
        return FirstPassageSample(x=x, y=math.inf, n_label=None)
    return FirstPassageSample(x=x, y=target, n_label=label_from_level((target - c * x) / c))


# -- first passage in bulk -------------------------------------------------------


def passage_horizon(model: SubordinatorModel, x: float, c: float) -> Tuple[float, Optional[str]]:
    """Simulation horizon for Y_x and a warning when passage is not certain"""
    drift = c * model.mean_rate
    if drift < 1:
        return settings.horizon_factor * c * (x + 1) / (1 - drift), None
    warning = f"unstable drift: c * E[X_1] = {drift:.4g} >= 1, passage is not certain"
    logger.warning(warning)
    return settings.horizon_factor * c * (x + 1) * 10, warning


def _simulate_passage(
    model: SubordinatorModel, x: float, c: float, t_max: float, rng: np.random.Generator, count: int
) -> Tuple[np.ndarray, np.ndarray]:
    """(Y_x, X at passage) per path; Y_x = inf when censored at t_max"""
    level = np.zeros(count)
    clock = np.zeros(count)
    y = np.full(count, np.inf)
    active = np.arange(count)
    while active.size:
        target = c * (x + level[active])
        if model.total_mass > 0:
            next_jump = clock[active] + rng.exponential(1 / model.total_mass, size=active.size)
        else:
            next_jump = np.full(active.size, np.inf)
        hit = target < next_jump
        reached = hit & (target <= t_max)
        y[active[reached]] = target[reached]
        jumped = ~hit & (next_jump <= t_max)
        moving = active[jumped]
        if moving.size:
            level[moving] += model.atom_x[model.draw_atoms(rng, moving.size)]
            clock[moving] = next_jump[jumped]
        active = moving
    return y, level


def _passage_samples(
    model: SubordinatorModel, x: float, c: float, paths: int, seed: int, workers: Optional[int]
) -> Tuple[np.ndarray, np.ndarray, float, List[str]]:
    t_max, warning = passage_horizon(model, x, c)
    results = run_blocks(paths, seed, lambda rng, count: _simulate_passage(model, x, c, t_max, rng, count), workers)
    y = np.concatenate([r[0] for r in results])
    level = np.concatenate([r[1] for r in results])
    return y, level, t_max, [warning] if warning else []


def passage_law_check(
    model: SubordinatorModel,
    x: float,
    c: float,
    paths: int,
    seed: int,
    n_max: int = 10,
    workers: Optional[int] = None,
) -> MonteCarloReport:
    """Empirical P(Y_x = cx + c ln n) against p(n, x) for n = 1..n_max"""
    if x <= 0 or c <= 0:
        raise DomainError("passage law needs x > 0 and c > 0", parameter="x" if x <= 0 else "c")
    y, level, t_max, warnings = _passage_samples(model, x, c, paths, seed, workers)
    finite = np.isfinite(y)
    censored = 1 - finite.mean()
    labels = np.where(finite, _labels(level, n_max), 0)
    counts = np.bincount(labels, minlength=n_max + 1)[1 : n_max + 1]
    ns = range(1, n_max + 1)
    theoretical = np.array([passage_probability(model, n, x, c) for n in ns])
    closed_form = np.array([passage_probability(model, n, x, c, truncated=False) for n in ns])
    fit = _goodness_of_fit(counts, theoretical, paths)
    rows, worst = _cell_rows(counts, theoretical, closed_form, paths, fit["tested"])

    small = finite & (level < 30)
    support_error = 0.0
    if small.any():
        recovered = np.rint(np.exp(level[small]))
        support_error = float(np.abs((y[small] - c * x) / c - np.log(recovered)).max())
    if censored > _CENSOR_LIMIT:
        warnings.append(f"censoring fraction {censored:.3e} exceeds {_CENSOR_LIMIT:g}")
        logger.warning(warnings[-1])
    ok = worst <= settings.z_threshold and fit["p_value"] > settings.chi2_pmin and censored <= _CENSOR_LIMIT
    logger.info(f"Passage law check: max |z| = {worst:.3f}, chi2 p = {fit['p_value']:.3e}, censored {censored:.2e}")
    return MonteCarloReport(
        check="passage_law",
        params={"x": x, "c": c, "paths": paths, "seed": seed, "n_max": n_max, "sigma": model.sigma},
        rows=rows,
        summary={
            "max_abs_z": worst,
            "chi2": fit["chi2"],
            "dof": fit["dof"],
            "p_value": fit["p_value"],
            "censored_fraction": float(censored),
            "horizon": t_max,
            "drift_ratio": c * model.mean_rate,
            "support_max_error": support_error,
            "mass_covered": float(theoretical.sum()),
        },
        ok=bool(ok),
        warnings=warnings,
    )


# -- marginal law of X_t -----------------------------------------------------------


def marginal_law_check(
    model: SubordinatorModel,
    t: float,
    paths: int,
    seed: int,
    n_max: int = 20,
    workers: Optional[int] = None,
) -> MonteCarloReport:
    """Empirical P(X_t = ln n) against L(sigma)^-t d_t(n) a(n) n^-sigma for n = 1..n_max"""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}", parameter="t")

    def block(rng: np.random.Generator, count: int) -> np.ndarray:
        labels = _labels(_simulate_levels(model, t, rng, count), n_max)
        return np.bincount(labels, minlength=n_max + 1)

    counts = np.sum(run_blocks(paths, seed, block, workers), axis=0)[1 : n_max + 1]
    ns = range(1, n_max + 1)
    theoretical = np.array([marginal_probability(model, n, t) for n in ns])
    closed_form = np.array([marginal_probability(model, n, t, truncated=False) for n in ns])
    fit = _goodness_of_fit(counts, theoretical, paths)
    rows, worst = _cell_rows(counts, theoretical, closed_form, paths, fit["tested"])
    ok = worst <= settings.z_threshold and fit["p_value"] > settings.chi2_pmin
    logger.info(f"Marginal law check: max |z| = {worst:.3f}, chi2 p = {fit['p_value']:.3e}")
    return MonteCarloReport(
        check="marginal_law",
        params={"t": t, "paths": paths, "seed": seed, "n_max": n_max, "sigma": model.sigma},
        rows=rows,
        summary={
            "max_abs_z": worst,
            "chi2": fit["chi2"],
            "dof": fit["dof"],
            "p_value": fit["p_value"],
            "mass_covered": float(theoretical.sum()),
            "total_mass": model.total_mass,
            "mass_defect": model.mass_defect,
        },
        ok=bool(ok),
    )


def jump_census(
    model: SubordinatorModel, t: float, paths: int, seed: int, n_max: int = 20, workers: Optional[int] = None
) -> MonteCarloReport:
    """Mean jump count against lambda t and per-atom frequencies against mass / lambda"""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}", parameter="t")
    listed = np.flatnonzero(model.atom_n <= n_max)

    def block(rng: np.random.Generator, count: int) -> Tuple[int, np.ndarray]:
        jumps, atoms = _simulate_jumps(model, t, rng, count)
        return int(jumps.sum()), np.bincount(atoms, minlength=model.atom_n.size)[listed]

    results = run_blocks(paths, seed, block, workers)
    total_jumps = sum(r[0] for r in results)
    atom_counts = np.sum([r[1] for r in results], axis=0) if results else np.zeros(listed.size)
    mean_rate = model.total_mass * t
    mean_jumps = total_jumps / paths
    z_count = (mean_jumps - mean_rate) / math.sqrt(mean_rate / paths) if mean_rate > 0 else 0.0
    rows = []
    worst = abs(z_count)
    for k, index in enumerate(listed.tolist()):
        p = model.atom_mass[index] / model.total_mass
        variance = total_jumps * p * (1 - p)
        z = (atom_counts[k] - total_jumps * p) / math.sqrt(variance) if variance > 0 else 0.0
        worst = max(worst, abs(z))
        rows.append(
            {
                "n": int(model.atom_n[index]),
                "count": int(atom_counts[k]),
                "empirical": float(atom_counts[k]) / total_jumps if total_jumps else 0.0,
                "theoretical": float(p),
                "z": float(z),
            }
        )
    return MonteCarloReport(
        check="jump_census",
        params={"t": t, "paths": paths, "seed": seed, "n_max": n_max},
        rows=rows,
        summary={"mean_jumps": mean_jumps, "expected_jumps": mean_rate, "z_count": z_count, "max_abs_z": worst},
        ok=bool(worst <= settings.z_threshold),
    )


def laplace_transform_check(
    model: SubordinatorModel,
    t: float,
    zs: Sequence[float] = (0.5, 1.0, 2.0),
    paths: int = 100_000,
    seed: int = 0,
    workers: Optional[int] = None,
) -> MonteCarloReport:
    """E[exp(-z X_t)] against (L(sigma + z) / L(sigma))^t"""
    zs = np.asarray(zs, dtype=np.float64)

    def block(rng: np.random.Generator, count: int) -> Tuple[np.ndarray, np.ndarray]:
        weights = np.exp(-np.outer(zs, _simulate_levels(model, t, rng, count)))
        return weights.sum(axis=1), (weights**2).sum(axis=1)

    results = run_blocks(paths, seed, block, workers)
    first = np.sum([r[0] for r in results], axis=0)
    second = np.sum([r[1] for r in results], axis=0)
    rows = []
    worst = 0.0
    for k, z in enumerate(zs.tolist()):
        mean = first[k] / paths
        se = math.sqrt(max(second[k] / paths - mean**2, 0.0) / paths)
        theoretical = math.exp(-t * model.phi(z))
        closed_form = math.exp(-t * phi_X(model.ctx, z).real) if model.sigma == model.ctx.sigma else theoretical
        score = (mean - theoretical) / se if se > 0 else 0.0
        worst = max(worst, abs(score))
        rows.append({"z": z, "empirical": mean, "se": se, "theoretical": theoretical, "closed_form": closed_form, "score": score})
    return MonteCarloReport(
        check="laplace_transform",
        params={"t": t, "zs": zs.tolist(), "paths": paths, "seed": seed},
        rows=rows,
        summary={"max_abs_z": worst},
        ok=bool(worst <= settings.z_threshold),
    )


def _passage_laplace(
    model: SubordinatorModel, x: float, c: float, w: float, paths: int, seed: int, workers: Optional[int]
) -> Tuple[float, float, float]:
    """(E[exp(-w Y_x)], its standard error, censored fraction)"""
    y, _, _, _ = _passage_samples(model, x, c, paths, seed, workers)
    weights = np.exp(-w * y)
    mean = float(weights.mean())
    se = float(weights.std() / math.sqrt(paths))
    return mean, se, float(1 - np.isfinite(y).mean())


def phi_y_check(
    model: SubordinatorModel,
    x: float,
    c: float,
    w: float,
    paths: int,
    seed: int,
    workers: Optional[int] = None,
) -> MonteCarloReport:
    """Empirical exponent phi_Y(w) = -ln E[exp(-w Y_x)] / x must solve z/c - phi_X(z) = w"""
    if w <= 0:
        raise DomainError(f"w must be positive, got {w}", parameter="w")
    mean, se, censored = _passage_laplace(model, x, c, w, paths, seed, workers)
    exponent = -math.log(mean) / x
    exponent_se = se / (mean * x)
    residual = exponent / c - model.phi(exponent) - w
    residual_se = abs(1 / c - model.phi_prime(exponent)) * exponent_se
    ok = abs(residual) <= settings.z_threshold * residual_se and censored <= _CENSOR_LIMIT
    return MonteCarloReport(
        check="phi_y",
        params={"x": x, "c": c, "w": w, "paths": paths, "seed": seed},
        summary={
            "phi_y": exponent,
            "phi_y_se": exponent_se,
            "residual": residual,
            "residual_se": residual_se,
            "censored_fraction": censored,
        },
        ok=bool(ok),
    )


def inversion_consistency_check(
    model: SubordinatorModel,
    s: float,
    c: float,
    x: float,
    paths: int,
    seed: int,
    workers: Optional[int] = None,
) -> MonteCarloReport:
    """f(s, c) = (s - phi_Y((s - sigma)/c - ln L(sigma)) - sigma) / c from simulation against f_eval(s, c)"""
    w = (s - model.sigma) / c - model.log_L_sigma
    if w <= 0:
        raise DomainError(f"needs s > sigma + c ln L(sigma); got s = {s}", parameter="s")
    mean, se, censored = _passage_laplace(model, x, c, w, paths, seed, workers)
    exponent = -math.log(mean) / x
    simulated = (s - exponent - model.sigma) / c
    simulated_se = se / (mean * x * c)
    series = f_eval(model.ctx, s, c)
    difference = simulated - series.value.real
    ok = abs(difference) <= settings.z_threshold * simulated_se + series.tail_estimate and censored <= _CENSOR_LIMIT
    return MonteCarloReport(
        check="inversion_consistency",
        params={"s": s, "c": c, "x": x, "paths": paths, "seed": seed},
        summary={
            "f_simulated": simulated,
            "f_simulated_se": simulated_se,
            "f_series": series.value.real,
            "difference": difference,
            "censored_fraction": censored,
        },
        ok=bool(ok),
    )


# -- Kendall's identity ------------------------------------------------------------


def _kendall_block(
    model: SubordinatorModel, y: float, t: float, c: float, rng: np.random.Generator, count: int
) -> np.ndarray:
    """Pathwise integrals of both sides; returns sums of L, L^2, R, R^2, (L-R), (L-R)^2"""
    jumps, atoms = _simulate_jumps(model, t, rng, count)
    total = int(jumps.sum())
    times = rng.uniform(0, t, size=total)
    owner = np.repeat(np.arange(count), jumps)
    times = times[np.lexsort((times, owner))]
    sizes = model.atom_x[atoms]

    first_jump = np.cumsum(jumps) - jumps
    offsets = np.cumsum(jumps + 1) - (jumps + 1)
    position = offsets[owner] + (np.arange(total) - first_jump[owner])
    starts = np.zeros(total + count)
    ends = np.full(total + count, float(t))
    levels = np.zeros(total + count)
    ends[position] = times
    starts[position + 1] = times
    running = np.concatenate(([0.0], np.cumsum(sizes)))
    levels[position + 1] = running[1:] - running[first_jump[owner]]

    peak = np.maximum.reduceat(ends / c - levels, offsets)
    lhs = np.log(np.maximum(peak, y) / y)
    entry = np.maximum(starts, c * (y + levels))
    rhs = np.add.reduceat(np.log(np.maximum(ends, entry) / entry), offsets)
    gap = lhs - rhs
    return np.array([lhs.sum(), (lhs**2).sum(), rhs.sum(), (rhs**2).sum(), gap.sum(), (gap**2).sum()])


def kendall_integral_check(
    model: SubordinatorModel,
    y: float,
    t: float,
    c: float,
    paths: int,
    seed: int,
    workers: Optional[int] = None,
) -> MonteCarloReport:
    """int_y^inf P(Y_x <= t) dx/x against int_0^t P(Z_s > y) ds/s.

    Both integrals are evaluated exactly per path: the left side is
    ln(max_{s <= t} Z_s / y)^+ and the right side sums ln(b/a) over the drift
    intervals [a, b) on which Z exceeds y.
    """
    if y <= 0 or t <= 0 or c <= 0:
        raise DomainError("Kendall check needs y, t, c > 0", parameter="y" if y <= 0 else ("t" if t <= 0 else "c"))
    sums = np.sum(run_blocks(paths, seed, lambda rng, count: _kendall_block(model, y, t, c, rng, count), workers), axis=0)
    lhs, rhs, gap = sums[0] / paths, sums[2] / paths, sums[4] / paths

    def standard_error(total_sq: float, mean: float) -> float:
        return math.sqrt(max(total_sq / paths - mean**2, 0.0) / paths)

    se_lhs, se_rhs, se_gap = standard_error(sums[1], lhs), standard_error(sums[3], rhs), standard_error(sums[5], gap)
    if se_gap > 0:
        ok = abs(gap) <= settings.z_threshold * se_gap
    else:
        ok = abs(gap) <= _DETERMINISTIC_TOL
    logger.info(f"Kendall check y={y}, t={t}: lhs={lhs:.6f} rhs={rhs:.6f} gap={gap:.2e} (se {se_gap:.2e})")
    return MonteCarloReport(
        check="kendall",
        params={"y": y, "t": t, "c": c, "paths": paths, "seed": seed, "sigma": model.sigma},
        summary={
            "lhs": lhs,
            "rhs": rhs,
            "se_lhs": se_lhs,
            "se_rhs": se_rhs,
            "difference": gap,
            "se_difference": se_gap,
            "combined_se": math.sqrt(se_lhs**2 + se_rhs**2),
        },
        ok=bool(ok),
    )
