"""Fit the coefficients of the general solution to the initial values.

The general solution is ``psi(u) = sum_k sum_j b[k, j] u^(j-1) z_k^u``.
Matching ``u = 1..m`` gives a square confluent-Vandermonde system ``Z b = psi``
whose column for ``(k, j)`` holds ``u^(j-1) z_k^u``. Columns are laid out
root by root, powers ascending within a root.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, IllConditioned, SingularSystem, StructureViolation
from .recurrence import InitialValues
from .roots import Root

PIVOT_FLOOR = 1e-300
RESIDUAL_TOL = 1e-8
UNIT_COEFF_TOL = 1e-8


@dataclass(frozen=True)
class ZMatrix:
    entries: np.ndarray
    column_map: tuple[tuple[int, int], ...]
    roots: tuple[Root, ...]

    @property
    def m(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class CoeffSet:
    """Fitted ``b[k, j]`` as ``(root index, power j >= 1, value)`` triples.

    ``unit_coefficient`` keeps the solved coefficient of the root ``z = 1``
    before it was zeroed.
    """

    b: tuple[tuple[int, int, complex], ...]
    residual_norm: float
    unit_coefficient: complex = 0j

    def for_root(self, k: int) -> list[complex]:
        return [v for kk, _, v in self.b if kk == k]

    def as_array(self) -> np.ndarray:
        return np.array([v for _, _, v in self.b], dtype=complex)


def build_z(roots: Sequence[Root] | Iterable[tuple[complex, int]], m: int) -> ZMatrix:
    """Assemble ``Z`` for the given roots (unit root included) and order ``m``.

    Raises
    ------
    DimensionMismatch
        If the multiplicities do not add up to ``m``.
    """
    roots = tuple(Root(complex(z), int(n)) for z, n in roots)
    total = sum(n for _, n in roots)
    if total != m:
        raise DimensionMismatch(f"multiplicities sum to {total}, system order is {m}")
    u = np.arange(1, m + 1, dtype=float)
    cols = []
    colmap = []
    for k, (z, n) in enumerate(roots):
        powers = np.empty(m, dtype=complex)
        acc = 1.0 + 0j
        for i in range(m):
            acc = acc * z
            powers[i] = acc
        for j in range(1, n + 1):
            cols.append(u ** (j - 1) * powers)
            colmap.append((k, j))
    entries = np.column_stack(cols)
    entries.setflags(write=False)
    return ZMatrix(entries, tuple(colmap), roots)


def solve_coeffs(
    Z: ZMatrix, psi_init: InitialValues | Sequence[float], *, strict: bool = True
) -> CoeffSet:
    """Solve ``Z b = psi(1..m)`` by LU with partial pivoting.

    The coefficient of the unit root must vanish (a nonzero constant term
    would keep ``psi`` away from 0). It is checked against ``1e-8`` and then
    set to exactly zero.

    Raises
    ------
    SingularSystem
        A pivot fell below ``1e-300``.
    IllConditioned
        ``||Z b - psi||_inf > 1e-8 ||psi||_inf``. With ``strict=False`` this
        is issued as a warning instead.
    StructureViolation
        The unit-root coefficient is not numerically zero.
    """
    psi = np.asarray(psi_init.psi if isinstance(psi_init, InitialValues) else psi_init, float)
    A = Z.entries
    if A.shape != (len(psi), len(psi)):
        raise DimensionMismatch(f"Z is {A.shape}, right-hand side has length {len(psi)}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_FLOOR:
        raise SingularSystem(f"pivot {pivots.min():.3e} below {PIVOT_FLOOR:g}")
    b = scipy.linalg.lu_solve((lu, piv), psi.astype(complex))
    residual = float(np.max(np.abs(A @ b - psi)))
    limit = RESIDUAL_TOL * float(np.max(np.abs(psi)))
    if residual > limit:
        msg = f"residual {residual:.3e} exceeds {limit:.3e}"
        if strict:
            raise IllConditioned(msg, residual)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)

    unit = 0j
    triples = []
    for (k, j), value in zip(Z.column_map, b):
        if Z.roots[k].value == 1:
            unit = complex(value)
            value = 0j
        triples.append((k, j, complex(value)))
    if abs(unit) > UNIT_COEFF_TOL:
        raise StructureViolation(
            "unit-root coefficient", f"|b_1| = {abs(unit):.3e} exceeds {UNIT_COEFF_TOL:g}"
        )
    return CoeffSet(tuple(triples), residual, unit)


def conjugate_gap(Z: ZMatrix, coeffs: CoeffSet) -> float:
    """Largest ``|b[k, j] - conj(b[k', j])|`` over conjugate root pairs."""
    values = [r.value for r in Z.roots]
    by_key = {(k, j): v for k, j, v in coeffs.b}
    gap = 0.0
    for k, z in enumerate(values):
        if z.imag <= 0:
            continue
        mate = next((i for i, w in enumerate(values) if w == z.conjugate()), None)
        if mate is None:
            continue
        for j in range(1, Z.roots[k].multiplicity + 1):
            gap = max(gap, abs(by_key[(k, j)] - by_key[(mate, j)].conjugate()))
    return gap
