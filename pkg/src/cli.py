"""Command-line front end: evaluation, verification suites and simulation"""
import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from .errors import DirichletError, DomainError, TruncationCapError
from .exact_poly import semigroup_report
from .inversion import (
    corollary_points,
    explicit_series_demo,
    explicit_series_rhs,
    f_eval,
    verify_corollary_points,
    verify_theorem_grid,
)
from .kendall_sim import MonteCarloReport, build_model, kendall_integral_check, marginal_law_check, passage_law_check
from .lfunction import EvalMode, L_eval, ln_L, make_context
from .report_pipeline import report_pipeline
from .spec_models import Command, MultiplicativeSpec, RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# passage-law cells stop here even when --n-max is larger
_PASSAGE_N_MAX = 10

Outcome = Tuple[List[Dict[str, Any]], bool]


def _pair(z: complex) -> List[float]:
    return [z.real, z.imag]


def _context(config: RunConfig):
    spec = MultiplicativeSpec.load(config.spec_path)
    return make_context(spec, config.sigma, tol=config.tol)


def _eval_f(config: RunConfig) -> Outcome:
    ctx = _context(config)
    s, w = config.complex_param("s"), config.complex_param("w")
    value = f_eval(ctx, s, w, best_effort=config.best_effort, tol=config.tol, mode=EvalMode(config.mode))
    record = {"quantity": "f", "s": _pair(s), "w": _pair(w), "sigma": ctx.sigma, "gamma": ctx.gamma}
    record.update(value.to_dict())
    return [record], True


def _eval_L(config: RunConfig) -> Outcome:
    ctx = _context(config)
    s = config.complex_param("s")
    records = []
    for quantity, evaluate in (("L", L_eval), ("ln_L", ln_L)):
        record = {"quantity": quantity, "s": _pair(s), "sigma": ctx.sigma}
        record.update(evaluate(ctx, s, EvalMode(config.mode)).to_dict())
        records.append(record)
    return records, True


def _verify_thm1(config: RunConfig) -> Outcome:
    ctx = _context(config)
    records = verify_theorem_grid(ctx, config.rho, tol=config.tol, workers=config.workers)
    return [dict(r.to_dict(), index=i) for i, r in enumerate(records)], all(r.ok for r in records)


def _verify_corollary(config: RunConfig) -> Outcome:
    ctx = _context(config)
    points = corollary_points(ctx, radius=config.rho) if config.rho else corollary_points(ctx)
    records = verify_corollary_points(ctx, points, tol=config.tol)
    return [dict(r.to_dict(), index=i) for i, r in enumerate(records)], all(r.ok for r in records)


def _verify_semigroup(config: RunConfig) -> Outcome:
    rows = semigroup_report(config.max_n)
    return rows, all(r["ok"] and r["classical_ok"] for r in rows)


def _demo_explicit_series(config: RunConfig) -> Outcome:
    v, z = config.complex_param("v"), config.complex_param("z")
    guaranteed = True
    try:
        lhs, rhs = explicit_series_demo(v, z, tol=config.tol, mode=EvalMode(config.mode))
    except TruncationCapError as e:
        if not config.best_effort:
            raise
        logger.warning(f"{e}; reporting the partial sum")
        lhs, rhs, guaranteed = e.partial.value, explicit_series_rhs(v), False
    residual = abs(lhs - rhs)
    ok = residual < config.tol
    record = {
        "v": _pair(v),
        "z": _pair(z),
        "lhs": _pair(lhs),
        "rhs": _pair(rhs),
        "residual": residual,
        "ok": ok,
        "guaranteed": guaranteed,
    }
    return [record], ok


def _simulate(config: RunConfig) -> Outcome:
    ctx = _context(config)
    model = build_model(ctx)
    reports = []
    if config.t is not None:
        reports.append(marginal_law_check(model, config.t, config.paths, config.seed, config.n_max, config.workers))
    if config.x is not None:
        n_max = min(config.n_max, _PASSAGE_N_MAX)
        reports.append(
            passage_law_check(model, config.x, config.c, config.paths, config.seed, n_max, config.workers)
        )
    return _monte_carlo_records(reports, config), all(r.ok for r in reports)


def _check_kendall(config: RunConfig) -> Outcome:
    ctx = _context(config)
    model = build_model(ctx)
    report = kendall_integral_check(model, config.y, config.t, config.c, config.paths, config.seed, config.workers)
    return _monte_carlo_records([report], config), report.ok


def _monte_carlo_records(reports: List[MonteCarloReport], config: RunConfig) -> List[Dict[str, Any]]:
    """Whole reports for JSON; one row per cell (or the summary) for tables"""
    if config.format.value == "json":
        return [r.to_dict() for r in reports]
    records = []
    for report in reports:
        base = {"check": report.check, "ok": report.ok}
        if report.rows:
            records.extend(dict(base, **row) for row in report.rows)
        else:
            records.append(dict(base, **report.summary))
    return records


_COMMANDS: Dict[Command, Callable[[RunConfig], Outcome]] = {
    Command.EVAL_F: _eval_f,
    Command.EVAL_L: _eval_L,
    Command.VERIFY_THM1: _verify_thm1,
    Command.VERIFY_COROLLARY: _verify_corollary,
    Command.VERIFY_SEMIGROUP: _verify_semigroup,
    Command.DEMO_EXPLICIT_SERIES: _demo_explicit_series,
    Command.SIMULATE: _simulate,
    Command.CHECK_KENDALL: _check_kendall,
}


def run(config: RunConfig) -> int:
    """Execute one validated command; 0 when everything passed, 1 on a failed check, 2 on bad input"""
    try:
        records, passed = _COMMANDS[config.command](config)
    except (DomainError, ValidationError, OSError, ValueError) as e:
        parameter = getattr(e, "parameter", None)
        where = f" (parameter: {parameter})" if parameter else ""
        logger.error(f"{config.command.value} rejected its input{where}: {e}")
        return EXIT_USAGE
    except DirichletError as e:
        logger.error(f"{config.command.value} failed: {e}")
        return EXIT_FAILED
    report_pipeline.write(records, config.format.value, config.output)
    if config.reference:
        try:
            same = report_pipeline.matches_report(records, config.reference)
        except (OSError, ValueError) as e:
            logger.error(f"Could not read reference report {config.reference}: {e}")
            return EXIT_USAGE
        if not same:
            logger.error(f"{config.command.value}: output differs from reference {config.reference}")
            return EXIT_FAILED
    if not passed:
        logger.error(f"{config.command.value}: at least one check failed")
        return EXIT_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirichlet-inversion",
        description="Evaluate and verify the Dirichlet-series solution of L(s - w f) = exp(f).",
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="What to run.")
    parser.add_argument("--spec", dest="spec_path", help="Spec JSON file, or a builtin name: zeta, chi4.")
    parser.add_argument("--sigma", type=float, help="Abscissa of absolute convergence used for the context.")
    for name in ("s", "w", "v", "z"):
        parser.add_argument(f"--{name}", type=float, nargs="+", metavar="RE [IM]", help=f"Complex {name}.")
    parser.add_argument("--rho", type=float, help="Radius |w| of the verification grid.")
    parser.add_argument("--tol", type=float, default=1e-8, help="Residual tolerance (default: 1e-8).")
    parser.add_argument("--max-n", dest="max_n", type=int, help="Largest n of the semigroup suite.")
    parser.add_argument("--n-max", dest="n_max", type=int, default=20, help="Largest n in law reports.")
    parser.add_argument("--paths", type=int, default=100_000, help="Monte Carlo paths (default: 100000).")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0).")
    parser.add_argument("--c", type=float, help="Drift parameter: Z_t = t/c - X_t.")
    parser.add_argument("--x", type=float, help="First-passage level.")
    parser.add_argument("--t", type=float, help="Time horizon.")
    parser.add_argument("--y", type=float, help="Level of the Kendall identity.")
    parser.add_argument("--workers", type=int, help="Thread pool size for grids and Monte Carlo blocks.")
    parser.add_argument("--best-effort", dest="best_effort", action="store_true", help="Report partial sums.")
    parser.add_argument(
        "--mode",
        choices=[m.value for m in EvalMode],
        default="accelerated",
        help="Series evaluation: tail completion (accelerated) or plain doubling (raw).",
    )
    parser.add_argument("--format", choices=["json", "csv", "human"], default="json", help="Output format.")
    parser.add_argument("--output", help="Output file (default: stdout).")
    parser.add_argument("--reference", help="Saved report (.json, .jsonl or .csv) to compare the output against.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    values = {k: v for k, v in vars(args).items() if v is not None}
    try:
        config = RunConfig(**values)
    except ValidationError as e:
        logger.error(f"Invalid arguments for {args.command}: {e}")
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
