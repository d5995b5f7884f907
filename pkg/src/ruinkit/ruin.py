"""Ultimate ruin probabilities: exact solution, approximations, closed forms."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .distribution import ClaimsDistribution
from .errors import (
    DegenerateRatio,
    DistributionError,
    ImaginaryResidue,
    InvalidAb0,
    NetProfitViolated,
    StructureViolation,
)
from .recurrence import (
    CharPoly,
    InitialValues,
    alphas,
    char_poly,
    closed_initial,
    initial_values,
    psi1_psi2_closed,
)
from .roots import RootClassification, RootConfig, RootSet, classify, find_roots
from .solver import CoeffSet, ZMatrix, build_z, conjugate_gap, solve_coeffs

IMAG_TOL = 1e-8
UNDERFLOW = 1e-300


@dataclass(frozen=True)
class RuinSolution:
    """Everything needed to evaluate ``psi(u)`` for any ``u``.

    Root indices in ``coeffs`` refer to ``z_matrix.roots``, which lists the
    unit root first followed by the entries of ``roots``.
    """

    distribution: ClaimsDistribution
    polynomial: CharPoly
    roots: RootSet
    classification: RootClassification
    initial: InitialValues
    z_matrix: ZMatrix
    coeffs: CoeffSet
    warnings: tuple[str, ...] = field(default=())

    @property
    def m(self) -> int:
        return self.distribution.m

    @property
    def z2(self) -> float:
        return self.classification.z2

    @property
    def z2_index(self) -> int:
        # +1 for the unit root in front
        return self.classification.z2_index + 1

    @property
    def b2(self) -> float:
        return self.coeffs.for_root(self.z2_index)[0].real

    @property
    def all_roots(self):
        return self.z_matrix.roots

    @property
    def simple_roots_only(self) -> bool:
        return all(n == 1 for _, n in self.z_matrix.roots)

    def __call__(self, u: int) -> float:
        return evaluate(self, u)


def solve(d: ClaimsDistribution, cfg: Optional[RootConfig] = None) -> RuinSolution:
    """Run the full pipeline for a claims distribution.

    coefficients -> characteristic polynomial -> roots of the deflated
    polynomial -> initial values -> ``Z`` -> ``b``.

    Raises
    ------
    NoConvergence, IllConditioned, StructureViolation
    """
    cfg = cfg or RootConfig()
    poly = char_poly(alphas(d))
    rs = find_roots(poly.reduced, cfg)
    info = classify(rs, cfg)
    init = initial_values(d)
    Z = build_z(rs.with_unit_root(), d.m)
    coeffs = solve_coeffs(Z, init)

    gap = conjugate_gap(Z, coeffs)
    if gap > IMAG_TOL:
        raise StructureViolation("conjugate coefficients", f"mismatch {gap:.3e}")
    b2 = coeffs.for_root(info.z2_index + 1)[0]
    if abs(b2.imag) > IMAG_TOL:
        raise StructureViolation("dominant coefficient", f"b2 = {b2} is not real")
    notes = []
    if b2.real <= 0:
        notes.append(f"dominant coefficient b2 = {b2.real:.6g} is not positive")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    return RuinSolution(d, poly, rs, info, init, Z, coeffs, tuple(notes))


def _ipow(z: complex, n: int) -> complex:
    """``z**n`` by binary powering, for a fixed multiplication order."""
    result = 1.0 + 0j
    base = z
    while n:
        if n & 1:
            result *= base
        n >>= 1
        if n:
            base *= base
    return result


def _psi_complex(sol: RuinSolution, u: int) -> complex:
    roots = sol.z_matrix.roots
    if sol.simple_roots_only:
        total = 0j
        for k, _, b in sol.coeffs.b:
            if b:
                total += b * _ipow(roots[k].value, u)
        return total
    total = 0j
    cache: dict[int, complex] = {}
    for k, j, b in sol.coeffs.b:
        if not b:
            continue
        if k not in cache:
            cache[k] = _ipow(roots[k].value, u)
        total += b * float(u) ** (j - 1) * cache[k]
    return total


def evaluate(sol: RuinSolution, u: int) -> float:
    """``psi(u)``: the mean claim at ``u = 0``, the fitted solution for ``u >= 1``.

    Raises
    ------
    ImaginaryResidue
        If the sum keeps an imaginary part above ``1e-8``, which means the
        roots or coefficients upstream lost their conjugate symmetry.
    """
    u = int(u)
    if u < 0:
        raise ValueError("u must be >= 0")
    if u == 0:
        return sol.distribution.mean
    if sol.b2 > 0 and sol.b2 * sol.z2**u < UNDERFLOW:
        return 0.0
    value = _psi_complex(sol, u)
    if abs(value.imag) > IMAG_TOL:
        raise ImaginaryResidue(f"psi({u}) has imaginary part {value.imag:.3e}")
    return value.real


def evaluate_many(sol: RuinSolution, us: Iterable[int]) -> np.ndarray:
    return np.array([evaluate(sol, u) for u in us])


def approx1(sol: RuinSolution, u: int) -> float:
    """One-term approximation ``b2 * z2**u`` from the dominant root."""
    if u < 1:
        raise ValueError("u must be >= 1")
    return sol.b2 * sol.z2**u


Source = Union[ClaimsDistribution, InitialValues, "tuple[float, float, float]"]


def _first_two(source) -> tuple[float, float]:
    if isinstance(source, ClaimsDistribution):
        return closed_initial(source)
    if isinstance(source, InitialValues):
        return source[1], source[2]
    f0, f1, mu = source
    return psi1_psi2_closed(f0, f1, mu)


def approx2(source: Source, u: int) -> float:
    """Two-point geometric extrapolation ``psi(1) * (psi(2)/psi(1))**(u-1)``.

    ``source`` is a distribution, a ``(f0, f1, mean)`` triple, or already
    computed initial values. Exact at ``u = 1, 2``.
    """
    if u < 1:
        raise ValueError("u must be >= 1")
    psi1, psi2 = _first_two(source)
    if psi1 == 0:
        raise DegenerateRatio("psi(1) = 0; ratio undefined")
    if u == 1:
        return psi1
    return psi1 * (psi2 / psi1) ** (u - 1)


def _check_p(p: float) -> None:
    if not p < 1:
        raise DistributionError(f"p = {p!r} must be < 1")
    if not p > 0.5:
        raise NetProfitViolated(f"p = {p!r} must exceed 1/2")


def geometric_exact(p: float, u: int) -> float:
    """Ruin probability ``((1-p)/p)**(u+1)`` for geometric claims ``p (1-p)^y``."""
    _check_p(p)
    if u < 0:
        raise ValueError("u must be >= 0")
    return ((1.0 - p) / p) ** (u + 1)


def gambler_exact(p: float, u: int) -> float:
    """Gambler's ruin ``(q/p)**u`` for claims 0 w.p. p and 2 w.p. ``q = 1-p``."""
    _check_p(p)
    if u < 1:
        raise ValueError("u must be >= 1")
    return ((1.0 - p) / p) ** u


@dataclass(frozen=True)
class Ab0Params:
    """Parameters of an (a, b, 0) claims law, ``f(y) = (a + b/y) f(y-1)``.

    ``a = 0`` is taken as the Poisson(b) limit.
    """

    a: float
    b: float

    def __post_init__(self):
        a, b = self.a, self.b
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidAb0("a and b must be finite")
        if a >= 1:
            raise InvalidAb0(f"a = {a!r} must be < 1")
        if a + b <= 0:
            raise InvalidAb0("a + b must be > 0 (otherwise claims are a.s. zero)")
        if not self.mean < 1:
            raise InvalidAb0(f"net profit condition fails: E(Y) = {self.mean!r}")

    @property
    def mean(self) -> float:
        return (self.a + self.b) / (1.0 - self.a)

    @property
    def f0(self) -> float:
        a, b = self.a, self.b
        if a == 0:
            return math.exp(-b)
        return math.exp((a + b) / a * math.log1p(-a))

    @property
    def f1(self) -> float:
        return (self.a + self.b) * self.f0


def ab0_approx(params: Ab0Params, u: int) -> float:
    """Two-point approximation for an (a, b, 0) law from ``f(0)``, ``f(1)``, ``E(Y)``."""
    return approx2((params.f0, params.f1, params.mean), u)
