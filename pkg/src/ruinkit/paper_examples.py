"""Reference examples with published roots, coefficients and ruin tables.

Each fixture holds the claims law plus the printed values, and ``check``
reruns the pipeline and reports every cell that misses its tolerance.
Printed tables are rounded to three or four decimals, so table cells use
``TABLE_TOL``; values that are exact by construction use ``EXACT_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .distribution import ClaimsDistribution, binomial, new_distribution
from .roots import RootConfig
from .ruin import RuinSolution, approx1, approx2, evaluate, solve

TABLE_TOL = 5e-4
EXACT_TOL = 1e-10
# some roots are printed truncated to three decimals rather than rounded
TRUNCATED_TOL = 1e-3


@dataclass(frozen=True)
class RootCell:
    value: complex
    multiplicity: int
    b: tuple[complex, ...] = ()
    tol: float = TABLE_TOL
    b_tol: float = TABLE_TOL


@dataclass(frozen=True)
class Fixture:
    """``table`` rows are ``(u, psi, approx1, approx2)``; ``None`` skips a cell."""

    name: str
    build: Callable[[], ClaimsDistribution]
    roots: tuple[RootCell, ...]
    table: tuple[tuple[int, Optional[float], Optional[float], Optional[float]], ...]
    table_tol: float = TABLE_TOL
    plot_u_max: int = 10


@dataclass(frozen=True)
class Mismatch:
    example: str
    cell: str
    expected: complex
    actual: complex
    tol: float

    def __str__(self) -> str:
        return (
            f"{self.example}: {self.cell} expected {_fmt(self.expected)}, "
            f"got {_fmt(self.actual)} (tol {self.tol:g})"
        )


@dataclass
class Report:
    example: str
    cells: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _fmt(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _pmf(*values: str) -> Callable[[], ClaimsDistribution]:
    return lambda: new_distribution(list(values))


def _gambler(p: str) -> Callable[[], ClaimsDistribution]:
    q = 1 - Fraction(p)
    return lambda: new_distribution([p, "0", str(q)])


def _gambler_table(p: str, u_max: int = 50):
    r = (1 - Fraction(p)) / Fraction(p)
    return tuple((u, float(r**u), None, None) for u in range(1, u_max + 1))


EX1 = Fixture(
    "example-1",
    _pmf("1/2", "1/4", "1/4"),
    (RootCell(0.5, 1, (1.0,), EXACT_TOL, EXACT_TOL),),
    ((0, 0.75, None, None),)
    + tuple((u, 0.5**u, 0.5**u, 0.5**u) for u in range(1, 21)),
    table_tol=EXACT_TOL,
    plot_u_max=6,
)

EX2 = Fixture(
    "example-2",
    lambda: binomial(5, "99/500"),
    (
        RootCell(0.975, 1, (0.995,)),
        RootCell(-0.080, 1, (1.556e-3,), TRUNCATED_TOL),
        RootCell(complex(-0.057, 0.091), 1, (complex(1.721e-3, 1.025e-3),), TRUNCATED_TOL),
        RootCell(complex(-0.057, -0.091), 1, (complex(1.721e-3, -1.025e-3),), TRUNCATED_TOL),
    ),
    (
        (0, 0.99, None, None),
        (1, 0.9699, 0.9704, 0.9699),
        (5, 0.8778, 0.8778, 0.8792),
        (10, 0.7744, 0.7744, 0.7778),
        (20, 0.6027, 0.6027, 0.6087),
        (50, 0.2842, 0.2842, 0.2917),
        (75, 0.1519, 0.1519, 0.1580),
        (100, 0.0812, 0.0812, 0.0856),
    ),
    plot_u_max=100,
)

EX3 = Fixture(
    "example-3",
    _pmf("7/8", "0", "0", "0", "0", "0", "0", "1/8"),
    (
        RootCell(0.9577, 1, (0.9305,)),
        RootCell(-0.6556, 1, (0.0125,)),
        RootCell(complex(-0.3674, 0.5577), 1, (complex(1.29e-2, 0.54e-2),)),
        RootCell(complex(-0.3674, -0.5577), 1, (complex(1.29e-2, -0.54e-2),)),
        RootCell(complex(0.2878, 0.6536), 1, (complex(1.56e-2, 1.47e-2),)),
        RootCell(complex(0.2878, -0.6536), 1, (complex(1.56e-2, -1.47e-2),)),
    ),
    (
        (0, 0.875, None, None),
        (1, 0.8571, 0.8911, 0.8571),
        (12, 0.5535, 0.5537, 0.6576),
        (24, 0.3294, 0.3294, 0.4924),
        (36, 0.1960, 0.1960, 0.3688),
        (48, 0.1166, 0.1166, 0.2762),
        (60, 0.0694, 0.0694, 0.2068),
    ),
    plot_u_max=60,
)

EX4 = Fixture(
    "example-4",
    _pmf("1/2", "3/7", "3/392", "145/2744", "775/76832", "219/268912", "67/2151296", "1/2151296"),
    (
        RootCell(0.5, 1, (0.7242,)),
        RootCell(-1 / 14, 5, (0.2758, 0.4150, 0.2133, 0.0454, 0.0034)),
    ),
    (
        (0, 0.6470, None, None),
        (1, 0.2940, 0.3621, 0.2940),
        (2, 0.1932, 0.1810, 0.1932),
        (4, 0.0455, 0.0453, 0.0834),
        (6, 0.0113, 0.0113, 0.0360),
        (8, 0.0028, 0.0028, 0.0155),
        (10, 0.0007, 0.0007, 0.0067),
    ),
)

# The published f(5) = 4462/3813049 is used as printed. The pmf it belongs
# to (with double roots exactly at -1/7 and 1/28 +- i/8) has
# f(5) = 46033/39337984; see EX5_CORRECTED_PMF.
EX5_PMF = (
    "1/2", "9/28", "477/3136", "543/21952", "9433/19668992", "4462/3813049",
    "146689/1927561216", "7155/1927561216", "2809/1927561216",
)
EX5_CORRECTED_PMF = EX5_PMF[:5] + ("46033/39337984",) + EX5_PMF[6:]

EX5 = Fixture(
    "example-5",
    _pmf(*EX5_PMF),
    (
        RootCell(0.5, 1, (0.82594,)),
        RootCell(-1 / 7, 2, (0.07341, 0.02094)),
        # coefficients listed for u^0 then u^1
        RootCell(complex(1 / 28, 1 / 8), 2, (complex(0.05033, -0.03952), complex(0.01243, -0.00945))),
        RootCell(complex(1 / 28, -1 / 8), 2, (complex(0.05033, 0.03952), complex(0.01243, 0.00945))),
    ),
    (
        (0, 0.7081, None, None),
        (1, 0.4162, 0.4130, 0.4162),
        (2, 0.2077, 0.2065, 0.2077),
        (4, 0.0517, 0.0516, 0.0517),
        (6, 0.0129, 0.0129, 0.0129),
        (8, 0.0032, 0.0032, 0.0032),
        (10, 0.0008, 0.0008, 0.0008),
    ),
)

GAMBLER_PS = ("51/100", "3/5", "3/4", "9/10")


def _gambler_fixture(p: str) -> Fixture:
    r = (1 - Fraction(p)) / Fraction(p)
    return Fixture(
        f"gambler-{float(Fraction(p)):g}",
        _gambler(p),
        (RootCell(float(r), 1, (), EXACT_TOL),),
        _gambler_table(p),
        table_tol=EXACT_TOL,
        plot_u_max=50,
    )


FIXTURES: tuple[Fixture, ...] = (EX1, EX2, EX3, EX4, EX5) + tuple(
    _gambler_fixture(p) for p in GAMBLER_PS
)


def _match_root(sol: RuinSolution, target: complex, multiplicity: int) -> Optional[int]:
    best, best_gap = None, float("inf")
    for k, (z, n) in enumerate(sol.all_roots):
        if n != multiplicity or z == 1:
            continue
        gap = abs(z - target)
        if gap < best_gap:
            best, best_gap = k, gap
    return best


def check(fx: Fixture, cfg: Optional[RootConfig] = None) -> Report:
    """Compare one fixture against a fresh solve."""
    report = Report(fx.name)
    sol = solve(fx.build(), cfg)

    def cell(name: str, expected, actual, tol: float) -> None:
        report.cells += 1
        if not abs(complex(actual) - complex(expected)) <= tol:
            report.mismatches.append(Mismatch(fx.name, name, expected, actual, tol))

    total = sum(n for _, n in sol.all_roots)
    cell("sum of multiplicities", sol.m, total, 0)
    for i, rc in enumerate(fx.roots, start=2):
        k = _match_root(sol, rc.value, rc.multiplicity)
        if k is None:
            report.cells += 1
            report.mismatches.append(
                Mismatch(fx.name, f"z{i} (multiplicity {rc.multiplicity})", rc.value, float("nan"), rc.tol)
            )
            continue
        cell(f"z{i}", rc.value, sol.all_roots[k].value, rc.tol)
        got = sol.coeffs.for_root(k)
        for j, expected in enumerate(rc.b, start=1):
            cell(f"b[{i},{j}]", expected, got[j - 1], rc.b_tol)

    for u, psi, a1, a2 in fx.table:
        if psi is not None:
            cell(f"psi({u})", psi, evaluate(sol, u), fx.table_tol)
        if a1 is not None:
            cell(f"approx1({u})", a1, approx1(sol, u), fx.table_tol)
        if a2 is not None:
            cell(f"approx2({u})", a2, approx2(sol.initial, u), fx.table_tol)
    return report


def run_all(
    fixtures: Sequence[Fixture] = FIXTURES, cfg: Optional[RootConfig] = None
) -> list[Report]:
    return [check(fx, cfg) for fx in fixtures]


def plot_rows(fx: Fixture, cfg: Optional[RootConfig] = None):
    """``(u, psi, approx1, approx2)`` for ``u = 0..plot_u_max``; approximations are ``None`` at 0."""
    sol = solve(fx.build(), cfg)
    rows = [(0, evaluate(sol, 0), None, None)]
    for u in range(1, fx.plot_u_max + 1):
        rows.append((u, evaluate(sol, u), approx1(sol, u), approx2(sol.initial, u)))
    return rows
