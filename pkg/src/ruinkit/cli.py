"""Command-line front end.

Exit codes: 0 success, 1 reference-example mismatch, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import paper_examples
from .distribution import ClaimsDistribution, load_distribution
from .errors import DistributionError, NumericalError
from .oracle import McConfig, recursion_oracle, simulate_ruin
from .roots import RootConfig
from .ruin import (
    Ab0Params,
    RuinSolution,
    ab0_approx,
    approx1,
    approx2,
    evaluate,
    geometric_exact,
    solve,
)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
ENV_PREFIX = "RUINKIT_"
DEFAULT_U_MAX = 10
CLIP_WARN = 1e-12

CSV_COLUMNS = ("u", "psi", "approx1", "approx2", "oracle", "abs_err_approx1", "abs_err_approx2")


class UsageError(ValueError):
    pass


def fmt(x: Optional[float]) -> str:
    return "" if x is None else format(float(x), ".10g")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def emit(text: str, out: Optional[str]) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


# -- config -----------------------------------------------------------------


def _env(name: str, kind):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return None
    try:
        return kind(raw)
    except ValueError:
        raise UsageError(f"{ENV_PREFIX}{name}={raw!r} is not a valid {kind.__name__}") from None


def root_config(args) -> RootConfig:
    tol = args.tol_cluster if args.tol_cluster is not None else _env("TOL_CLUSTER", float)
    if tol is None:
        return RootConfig()
    return RootConfig(cluster_tol=tol)


def seed_value(args) -> int:
    if args.seed is not None:
        return args.seed
    env = _env("SEED", int)
    return 0 if env is None else env


def u_values(args) -> list[int]:
    if args.u is not None:
        try:
            us = [int(s) for s in args.u.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"--u expects a comma-separated list of integers, got {args.u!r}") from None
        if not us or min(us) < 0:
            raise UsageError("--u values must be nonnegative integers")
        return us
    u_max = DEFAULT_U_MAX if args.u_max is None else args.u_max
    if u_max < 0:
        raise UsageError("--u-max must be >= 0")
    return list(range(u_max + 1))


# -- solve ------------------------------------------------------------------


@dataclass
class RunReport:
    distribution: ClaimsDistribution
    roots: list[tuple[int, complex, int, list[complex]]]
    rows: list[tuple]
    diagnostics: dict = field(default_factory=dict)

    def csv(self) -> str:
        return csv_text(CSV_COLUMNS, self.rows)

    def roots_csv(self) -> str:
        rows = []
        for k, z, n, bs in self.roots:
            for j, b in enumerate(bs, start=1):
                rows.append((str(k + 1), z.real, z.imag, str(n), str(j), b.real, b.imag))
        return csv_text(("k", "z_re", "z_im", "multiplicity", "j", "b_re", "b_im"), rows)

    def json(self) -> str:
        def num(x):
            return None if x is None else float(fmt(x))

        doc = {
            "distribution": {
                "pmf": [str(p) for p in self.distribution.exact],
                "mean": num(self.distribution.mean),
            },
            "roots": [
                {
                    "k": k + 1,
                    "z": [num(z.real), num(z.imag)],
                    "multiplicity": n,
                    "b": [[num(b.real), num(b.imag)] for b in bs],
                }
                for k, z, n, bs in self.roots
            ],
            "rows": [dict(zip(CSV_COLUMNS, (r[0],) + tuple(num(v) for v in r[1:]))) for r in self.rows],
            "diagnostics": {
                key: (num(v) if isinstance(v, float) else v) for key, v in self.diagnostics.items()
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _clip(x: float, notes: list[str], label: str) -> float:
    if 0.0 <= x <= 1.0:
        return x
    y = min(max(x, 0.0), 1.0)
    if abs(y - x) > CLIP_WARN:
        notes.append(f"{label} = {x:.3e} clipped to [0, 1]")
    return y


def build_report(d: ClaimsDistribution, sol: RuinSolution, us: Sequence[int]) -> RunReport:
    notes = list(sol.warnings)
    oracle = recursion_oracle(d, max(us))
    rows = []
    for u in us:
        psi = _clip(evaluate(sol, u), notes, f"psi({u})")
        ref = float(oracle[u])
        if u == 0:
            rows.append((u, psi, None, None, ref, None, None))
            continue
        a1 = _clip(approx1(sol, u), notes, f"approx1({u})")
        a2 = _clip(approx2(sol.initial, u), notes, f"approx2({u})")
        rows.append((u, psi, a1, a2, ref, abs(a1 - psi), abs(a2 - psi)))
    roots = [
        (k, z, n, sol.coeffs.for_root(k)) for k, (z, n) in enumerate(sol.all_roots)
    ]
    diag = {
        "max_root_residual": float(max(sol.roots.residuals, default=0.0)),
        "dominance_gap": float(sol.classification.dominance_gap),
        "solve_residual": float(sol.coeffs.residual_norm),
        "root_method": sol.roots.method,
        "warnings": notes,
    }
    return RunReport(d, roots, rows, diag)


def cmd_solve(args) -> int:
    us = u_values(args)
    cfg = root_config(args)
    d = load_distribution(args.dist)
    sol = solve(d, cfg)
    report = build_report(d, sol, us)
    text = report.json() if args.format == "json" else report.csv()
    if args.roots_out:
        write_atomic(args.roots_out, report.roots_csv())
    else:
        sys.stderr.write(report.roots_csv())
    emit(text, args.output)
    for note in report.diagnostics["warnings"]:
        print(f"warning: {note}", file=sys.stderr)
    return EXIT_OK


# -- mc ---------------------------------------------------------------------


def cmd_mc(args) -> int:
    if args.u < 0:
        raise UsageError("--u must be >= 0")
    cfg = McConfig(n_paths=args.paths, horizon=args.horizon, seed=seed_value(args))
    d = load_distribution(args.dist)
    est = simulate_ruin(d, args.u, cfg, workers=args.workers)
    lines = [
        f"u {args.u}",
        f"estimate {fmt(est.estimate)}",
        f"half_width_95 {fmt(est.half_width_95)}",
        f"ruined_count {est.ruined_count}",
        f"n_paths {est.n_paths}",
        f"horizon {cfg.horizon}",
        f"seed {cfg.seed}",
        f"alive_fraction {fmt(est.alive_fraction)}",
    ]
    emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# -- paper-examples ---------------------------------------------------------


def cmd_paper_examples(args) -> int:
    cfg = root_config(args)
    reports = paper_examples.run_all(paper_examples.FIXTURES, cfg)
    failed = 0
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status} {r.example} ({r.cells} cells, {len(r.mismatches)} mismatches)")
        for m in r.mismatches:
            print(f"  mismatch {m}")
        failed += not r.ok
    if args.emit_plots:
        out = Path(args.emit_plots)
        for fx in paper_examples.FIXTURES:
            rows = paper_examples.plot_rows(fx, cfg)
            write_atomic(out / f"{fx.name}.csv", csv_text(("u", "psi", "approx1", "approx2"), rows))
    print(f"{len(reports) - failed}/{len(reports)} examples passed")
    return EXIT_MISMATCH if failed else EXIT_OK


# -- approx -----------------------------------------------------------------


def cmd_approx(args) -> int:
    us = [u for u in u_values(args) if u >= 1]
    if not us:
        raise UsageError("approximations are defined for u >= 1")
    chosen = [args.dist is not None, args.ab0 is not None, args.geometric is not None]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of DIST, --ab0 A B, --geometric P")
    if args.geometric is not None:
        p = args.geometric
        f0, f1, mean = p, p * (1 - p), (1 - p) / p
        rows = [(u, approx2((f0, f1, mean), u), geometric_exact(p, u)) for u in us]
        text = csv_text(("u", "approx2", "exact"), rows)
    elif args.ab0 is not None:
        params = Ab0Params(*args.ab0)
        text = csv_text(("u", "approx2"), [(u, ab0_approx(params, u)) for u in us])
    else:
        d = load_distribution(args.dist)
        text = csv_text(("u", "approx2"), [(u, approx2(d, u)) for u in us])
    emit(text, args.output)
    return EXIT_OK


# -- entry point ------------------------------------------------------------


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ruinkit",
        description="Ultimate ruin probabilities for the discrete-time compound binomial risk model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_u(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--u-max", type=int, help=f"evaluate u = 0..N (default {DEFAULT_U_MAX})")
        g.add_argument("--u", help="comma-separated list of u values")

    def add_tol(p):
        p.add_argument("--tol-cluster", type=float, help="root clustering distance (env RUINKIT_TOL_CLUSTER)")

    p = sub.add_parser("solve", help="exact psi with approximations and recursion check")
    p.add_argument("dist", help="distribution file (JSON or 'k value' text)")
    add_u(p)
    add_tol(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--roots-out", help="write the roots table here instead of stderr")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mc", help="Monte Carlo estimate of psi(u)")
    p.add_argument("dist")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--paths", type=_positive_int, default=McConfig.n_paths)
    p.add_argument("--horizon", type=_positive_int, default=McConfig.horizon)
    p.add_argument("--seed", type=int, help="RNG seed (env RUINKIT_SEED, default 0)")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("paper-examples", help="check the built-in reference examples")
    p.add_argument("--emit-plots", metavar="DIR", help="write u, psi, approx1, approx2 CSVs here")
    add_tol(p)
    p.set_defaults(func=cmd_paper_examples)

    p = sub.add_parser("approx", help="two-point approximation without root finding")
    p.add_argument("dist", nargs="?")
    p.add_argument("--ab0", nargs=2, type=float, metavar=("A", "B"))
    p.add_argument("--geometric", type=float, metavar="P")
    add_u(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_approx)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DistributionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
