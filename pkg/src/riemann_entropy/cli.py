"""Command-line front end.

    riemann-entropy solve  --problem P.json [--tol X] [--out PATH]
    riemann-entropy verify --problem P.json [--tol X] [--out PATH]
    riemann-entropy sample --problem P.json [--window LO HI] [--count N] [--format csv|json]
    riemann-entropy oracle --problem P.json [--L X] [--h X] [--t-final X] [--cfl X]
    riemann-entropy all    --problem P.json --out DIR

Exit status: 0 success, 1 bad input or parameters, 2 verification failed,
3 the optimizer did not converge. ``RIEMANN_ENTROPY_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .entropy import E, E1, coercivity_box
from .errors import MaxIterationsExceeded, RiemannEntropyError
from .fd_oracle import compare, solve_fd
from .model import PiecewiseProblem, load_problem
from .optimizer import initial_point, minimize
from .profile import build, format_float
from .verifier import verify

log = logging.getLogger("riemann_entropy")

COMMANDS = ("solve", "verify", "sample", "oracle", "all")
EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_NOCONV = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    problem_path: str
    tol: float = 1e-10
    verify_tol: float | None = None
    window: tuple[float, float] | None = None
    count: int = 1001
    L: float | None = None
    h: float = 0.01
    t_final: float = 1.0
    cfl: float = 0.4
    format: str | None = None
    out: str | None = None


class UsageError(Exception):
    pass


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant
    digits, non-finite floats as ``null``."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj)) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        items = [pad + dumps(x, indent, _level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _default_window(problem: PiecewiseProblem) -> tuple[float, float]:
    if problem.d == 0:
        spread = 6.0 * float(problem.a[0]) + 1.0
        return float(problem.v[0]) - spread, float(problem.v[0]) + spread
    start = initial_point(problem)
    box = coercivity_box(problem, E(problem, start))
    return box.r1 - 1.0, box.r2 + 1.0


def _solve_payload(problem, result) -> dict:
    return {
        "xi": result.xi.tolist(),
        "E": E(problem, result.xi),
        "E1": E1(problem, result.xi),
        "kkt_report": result.report.to_dict(),
        "iterations": result.iterations,
    }


def _summary(problem, result, report, comparison) -> str:
    lines = [
        "Riemann problem entropy solution",
        f"states alpha={format_float(problem.alpha)} beta={format_float(problem.beta)}, "
        f"n={problem.n}, d={problem.d}",
        f"E={format_float(result.value)}  E1={format_float(E1(problem, result.xi))}  "
        f"iterations={result.iterations}  kkt_violation={result.report.max_violation:.3e}",
        f"verification: {'passed' if report.passed else 'FAILED'} "
        f"(max equality residual {report.max_equality_residual:.3e}, tol {report.tol:.3e})",
        "",
        f"{'speed':>24}  {'type':<6}  {'config':<6}  {'u-':>12}  {'u+':>12}  min Oleinik margin",
    ]
    for check in report.per_jump:
        j = check.jump
        margin = min(check.oleinik_margins) if check.oleinik_margins else None
        lines.append(
            f"{format_float(j.c):>24}  {j.kind:<6}  {check.config:<6}  "
            f"{j.u_minus:12.6g}  {j.u_plus:12.6g}  {'-' if margin is None else f'{margin:.6g}'}"
        )
    if not report.per_jump:
        lines.append("(no discontinuities: smooth profile)")
    if comparison is not None:
        lines += [
            "",
            f"finite-volume check: l1={comparison.l1_error:.6g}  "
            f"linf away from jumps={comparison.linf_error_away_from_jumps:.6g}",
        ]
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    try:
        problem = load_problem(cfg.problem_path)
    except (OSError, RiemannEntropyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    fmt = cfg.format
    try:
        if cfg.command in ("solve", "verify") and fmt not in (None, "json"):
            raise UsageError(f"{cfg.command} writes JSON only")
        if cfg.command == "all" and cfg.out is None:
            raise UsageError("all needs --out DIR")

        try:
            result = minimize(problem, tol=cfg.tol)
        except MaxIterationsExceeded as exc:
            print(f"error: {exc}", file=sys.stderr)
            if cfg.command == "solve" and exc.best is not None:
                payload = {"xi": np.asarray(exc.best).tolist(), "converged": False,
                           "kkt_report": exc.report.to_dict() if exc.report else None,
                           "iterations": exc.iterations}
                _emit(dumps(payload) + "\n", cfg.out)
            return EXIT_NOCONV

        if cfg.command == "solve":
            _emit(dumps(_solve_payload(problem, result)) + "\n", cfg.out)
            return EXIT_OK

        profile = build(problem, result.xi)
        if cfg.command == "verify":
            report = verify(profile, cfg.verify_tol)
            _emit(dumps(report.to_dict()) + "\n", cfg.out)
            return EXIT_OK if report.passed else EXIT_VERIFY

        if cfg.command == "sample":
            lo, hi = cfg.window if cfg.window else _default_window(problem)
            table = profile.sample(lo, hi, cfg.count)
            if fmt == "json":
                _emit(dumps(table.to_records()) + "\n", cfg.out)
            else:
                _emit(table.to_csv(), cfg.out)
            return EXIT_OK

        if cfg.command == "oracle":
            fd = solve_fd(problem, L=cfg.L, h=cfg.h, t_final=cfg.t_final, cfl=cfg.cfl)
            comparison = compare(fd, profile).to_dict()
            comparison.update(h=fd.h, L=fd.L, t_final=fd.t_final, steps_taken=fd.steps_taken)
            if fmt == "json":
                payload = {"x": fd.x_centers.tolist(), "u": fd.values.tolist(), "comparison": comparison}
                _emit(dumps(payload) + "\n", cfg.out)
            else:
                _emit(fd.to_csv(), cfg.out)
                text = dumps(comparison) + "\n"
                if cfg.out is None:
                    sys.stderr.write(text)
                else:
                    Path(str(cfg.out) + ".compare.json").write_text(text)
            return EXIT_OK

        # all
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        report = verify(profile, cfg.verify_tol)
        lo, hi = cfg.window if cfg.window else _default_window(problem)
        fd = solve_fd(problem, L=cfg.L, h=cfg.h, t_final=cfg.t_final, cfl=cfg.cfl)
        comparison = compare(fd, profile)
        (outdir / "solve.json").write_text(dumps(_solve_payload(problem, result)) + "\n")
        (outdir / "verify.json").write_text(dumps(report.to_dict()) + "\n")
        (outdir / "profile.csv").write_text(profile.sample(lo, hi, cfg.count).to_csv())
        (outdir / "fd.csv").write_text(fd.to_csv())
        (outdir / "compare.json").write_text(dumps(comparison.to_dict()) + "\n")
        (outdir / "summary.txt").write_text(_summary(problem, result, report, comparison))
        return EXIT_OK if report.passed else EXIT_VERIFY
    except (UsageError, RiemannEntropyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="riemann-entropy",
        description="Entropy solution of a piecewise-constant convection-diffusion Riemann problem.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--problem", required=True, help="JSON file with fields u, v, a")
    parser.add_argument("--tol", type=float, default=1e-10, help="KKT tolerance (default 1e-10)")
    parser.add_argument("--verify-tol", type=float, default=None,
                        help="verifier tolerance (default 1e-8 (1+max|v|)(beta-alpha))")
    parser.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    parser.add_argument("--count", type=int, default=1001)
    parser.add_argument("--L", type=float, default=None, help="FD half-width (default: minimal safe)")
    parser.add_argument("--h", type=float, default=0.01)
    parser.add_argument("--t-final", type=float, default=1.0)
    parser.add_argument("--cfl", type=float, default=0.4)
    parser.add_argument("--out", default=None, help="output file (directory for 'all')")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("RIEMANN_ENTROPY_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = RunConfig(
        command=args.command,
        problem_path=args.problem,
        tol=args.tol,
        verify_tol=args.verify_tol,
        window=tuple(args.window) if args.window else None,
        count=args.count,
        L=args.L,
        h=args.h,
        t_final=args.t_final,
        cfl=args.cfl,
        format=args.format,
        out=args.out,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
