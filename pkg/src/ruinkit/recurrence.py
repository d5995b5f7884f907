"""Order-m recurrence for the ruin probabilities.

For ``u >= m`` the ruin probabilities obey

    psi(u + 1) = sum_{k=0}^{m-1} alpha_k psi(u - k),

with ``alpha_0 = (1 - f(1)) / f(0)`` and ``alpha_k = -f(k + 1) / f(0)``.
This module builds the coefficients, the characteristic polynomial ``p`` and
its deflation ``q = p / (y - 1)``, and the starting values ``psi(1..m)``.

Polynomial coefficient vectors are stored highest power first (numpy
``polyval`` order).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distribution import ClaimsDistribution
from .errors import DeflationResidual

DEFLATION_TOL = 1e-9


@dataclass(frozen=True)
class AlphaCoeffs:
    alpha: np.ndarray
    distribution: Optional[ClaimsDistribution] = None

    @property
    def m(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class CharPoly:
    """Characteristic polynomial ``p`` (degree m) and its deflation ``q``."""

    coeffs: np.ndarray
    reduced: np.ndarray
    deflation_remainder: float = 0.0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y):
        return np.polyval(self.coeffs, y)


@dataclass(frozen=True)
class InitialValues:
    psi: np.ndarray
    psi0: float

    @property
    def m(self) -> int:
        return len(self.psi)

    def __getitem__(self, u: int) -> float:
        """``psi(u)`` for ``0 <= u <= m``."""
        if u == 0:
            return self.psi0
        if not 1 <= u <= len(self.psi):
            raise IndexError(u)
        return float(self.psi[u - 1])


def alphas(d: ClaimsDistribution) -> AlphaCoeffs:
    f = d.pmf
    a = np.empty(d.m)
    a[0] = (1.0 - f[1]) / f[0]
    a[1:] = -f[2:] / f[0]
    a.setflags(write=False)
    return AlphaCoeffs(a, d)


def reduced_coefficients(d: ClaimsDistribution) -> np.ndarray:
    """Coefficients of ``q`` straight from the tails: ``1, -Fbar(k)/f(0)``."""
    return np.concatenate(([1.0], -d.tails[1:] / d.f0))


def char_poly(a: AlphaCoeffs) -> CharPoly:
    """Build ``p(y) = y^m - sum alpha_k y^(m-1-k)`` and deflate the unit root.

    ``q`` is obtained by synthetic division of ``p`` by ``(y - 1)``. When the
    coefficients carry their source distribution, the quotient is checked
    against the tail-form coefficients and those (more accurate) values are
    kept.

    Raises
    ------
    DeflationResidual
        If the division leaves a remainder above ``1e-9`` or the two
        constructions of ``q`` disagree by more than that.
    """
    p = np.concatenate(([1.0], -np.asarray(a.alpha, dtype=float)))
    q = np.empty(len(p) - 1)
    acc = 0.0
    for i in range(len(q)):
        acc = acc + p[i]
        q[i] = acc
    remainder = acc + p[-1]
    if abs(remainder) > DEFLATION_TOL:
        raise DeflationResidual(f"p(1) = {remainder:.3e}; coefficients do not sum to one")
    if a.distribution is not None:
        direct = reduced_coefficients(a.distribution)
        gap = float(np.max(np.abs(direct - q)))
        if gap > DEFLATION_TOL:
            raise DeflationResidual(f"synthetic division and tail form of q differ by {gap:.3e}")
        q = direct
    p.setflags(write=False)
    q.setflags(write=False)
    return CharPoly(p, q, float(remainder))


def initial_values(d: ClaimsDistribution) -> InitialValues:
    """Solve the lower-triangular system for ``psi(1..m)`` by forward substitution.

    Row ``i`` reads ``sum_j L[i, j] psi(j + 1) = r_i`` with
    ``L[i, j] = f(i - j) - [i - j == 1]`` and right-hand side
    ``r_0 = psi(0) - Fbar(0)``, ``r_i = -Fbar(i)``. The diagonal is ``f(0)``
    throughout, so the determinant is ``f(0)^m > 0``.
    """
    m = d.m
    f = d.pmf
    # psi(0) - Fbar(0) = f(0) - (1 - mu), formed from the exactly rounded margin
    rhs = np.concatenate(([f[0] - d.margin], -d.tails[1:]))
    band = f.copy()
    band[1] -= 1.0
    psi = np.empty(m)
    for i in range(m):
        s = rhs[i]
        for j in range(i):
            s -= band[i - j] * psi[j]
        psi[i] = s / band[0]
    psi.setflags(write=False)
    return InitialValues(psi, d.mean)


def psi1_psi2_closed(
    f0: float, f1: float, mu: float, *, margin: float | None = None
) -> tuple[float, float]:
    """Closed forms ``psi(1) = 1 - (1-mu)/f0`` and ``psi(2) = 1 - (1-mu)/f0 * (1-f1)/f0``.

    ``margin`` may carry an accurately rounded ``1 - mu`` to use instead of
    forming the difference in floating point.
    """
    if margin is None:
        margin = 1.0 - mu
    ratio = margin / f0
    return 1.0 - ratio, 1.0 - ratio * ((1.0 - f1) / f0)


def closed_initial(d: ClaimsDistribution) -> tuple[float, float]:
    """``psi(1), psi(2)`` for a distribution via the closed forms."""
    return psi1_psi2_closed(d.f0, d.f1, d.mean, margin=d.margin)
