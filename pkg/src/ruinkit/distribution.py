"""Claims distributions on {0, ..., m}.

A :class:`ClaimsDistribution` is built once from a probability vector and is
immutable afterwards. Entries are parsed exactly (``"145/2744"`` stays a
rational, a float is taken at its exact binary value), normalised and checked
in rational arithmetic, and only then rounded to binary64. Derived quantities
(mean, tails, ``1 - mean``) are rounded from their exact values, so no
cancellation error leaks into the downstream recurrence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from os import PathLike
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DistributionError,
    NegativeProbability,
    NetProfitViolated,
    SumNotOne,
    SupportTooSmall,
)

SUM_TOLERANCE = 1e-9


def parse_probability(value) -> Fraction:
    """Convert a number or a ``"p/q"`` / decimal string to an exact Fraction."""
    if isinstance(value, bool):
        raise DistributionError(f"not a probability: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DistributionError(f"cannot parse probability {value!r}") from exc
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, Real):
        x = float(value)
        if not math.isfinite(x):
            raise DistributionError(f"non-finite probability {value!r}")
        return Fraction(x)
    raise DistributionError(f"not a probability: {value!r}")


@dataclass(frozen=True, eq=False)
class ClaimsDistribution:
    """Validated claims pmf ``f(0..m)``.

    Construct through :func:`new_distribution` (or :meth:`from_pmf`), which
    trims trailing zeros and renormalises; the constructor itself only accepts
    an exact probability vector that already satisfies every invariant.
    """

    exact: tuple[Fraction, ...]
    pmf: np.ndarray = field(init=False, repr=False)
    tails: np.ndarray = field(init=False, repr=False)
    mean: float = field(init=False)
    margin: float = field(init=False, repr=False)

    def __post_init__(self):
        f = tuple(self.exact)
        if len(f) < 3:
            raise SupportTooSmall(f"support bound m={len(f) - 1} < 2")
        if any(p < 0 for p in f):
            raise NegativeProbability("probabilities must be >= 0")
        if f[-1] == 0:
            raise SupportTooSmall("f(m) must be strictly positive")
        if sum(f) != 1:
            raise SumNotOne(f"exact pmf sums to {float(sum(f))!r}")
        mu = sum(k * p for k, p in enumerate(f))
        if mu >= 1:
            raise NetProfitViolated(f"mean claim {float(mu):.10g} >= 1")
        # f(0) >= 1 - mu > 0 follows from mu < 1; kept as an explicit guard
        if not f[0] >= 1 - mu > 0:
            raise NetProfitViolated("f(0) >= 1 - mean > 0 fails")

        m = len(f) - 1
        exact_tails = [Fraction(0)] * m
        acc = Fraction(0)
        for k in range(m, 0, -1):
            acc += f[k]
            exact_tails[k - 1] = acc
        pmf = np.array([float(p) for p in f])
        tails = np.array([float(t) for t in exact_tails])
        pmf.setflags(write=False)
        tails.setflags(write=False)
        object.__setattr__(self, "exact", f)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "tails", tails)
        object.__setattr__(self, "mean", float(mu))
        object.__setattr__(self, "margin", float(1 - mu))

    @classmethod
    def from_pmf(cls, pmf: Iterable) -> "ClaimsDistribution":
        return new_distribution(pmf)

    @property
    def m(self) -> int:
        return len(self.exact) - 1

    @property
    def f0(self) -> float:
        return float(self.pmf[0])

    @property
    def f1(self) -> float:
        return float(self.pmf[1])

    def tail(self, k: int) -> float:
        """Survival function ``P(Y > k)``; exactly 0 for ``k >= m``."""
        if k < 0:
            raise ValueError("tail index must be >= 0")
        if k >= self.m:
            return 0.0
        return float(self.tails[k])

    def __repr__(self) -> str:
        return f"ClaimsDistribution(m={self.m}, mean={self.mean:.10g}, pmf={self.pmf.tolist()})"


def new_distribution(pmf: Iterable) -> ClaimsDistribution:
    """Validate a probability vector and return a :class:`ClaimsDistribution`.

    Entries may be ints, floats, Fractions or strings such as ``"1/8"``.
    Trailing zeros are dropped so that ``f(m) > 0``. A total within
    ``SUM_TOLERANCE`` of one is renormalised exactly; anything further off
    raises :class:`SumNotOne`.

    Raises
    ------
    NegativeProbability, SupportTooSmall, SumNotOne, NetProfitViolated
    """
    f = [parse_probability(p) for p in pmf]
    if len(f) < 3:
        raise SupportTooSmall(f"need at least 3 entries (m >= 2), got {len(f)}")
    bad = [k for k, p in enumerate(f) if p < 0]
    if bad:
        raise NegativeProbability(f"negative probability at k={bad[0]}: {float(f[bad[0]])!r}")
    while f and f[-1] == 0:
        f.pop()
    if len(f) < 3:
        raise SupportTooSmall(f"support bound m={len(f) - 1} < 2 after trimming zeros")
    total = sum(f)
    if abs(total - 1) > SUM_TOLERANCE:
        raise SumNotOne(f"probabilities sum to {float(total)!r}")
    if total != 1:
        f = [p / total for p in f]
    return ClaimsDistribution(tuple(f))


def mean(d: ClaimsDistribution) -> float:
    return d.mean


def tail(d: ClaimsDistribution, k: int) -> float:
    return d.tail(k)


def binomial(n: int, p) -> ClaimsDistribution:
    """Binomial(n, p) claims, built in exact arithmetic when ``p`` is rational."""
    p = parse_probability(p)
    q = 1 - p
    return new_distribution([math.comb(n, k) * p**k * q ** (n - k) for k in range(n + 1)])


# -- file formats -----------------------------------------------------------


def parse_text(text: str) -> list[Fraction]:
    """Parse ``k value`` lines; absent indices are zero, ``#`` starts a comment."""
    entries: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise DistributionError(f"line {lineno}: expected 'k value', got {raw!r}")
        try:
            k = int(parts[0])
        except ValueError as exc:
            raise DistributionError(f"line {lineno}: bad index {parts[0]!r}") from exc
        if k < 0:
            raise DistributionError(f"line {lineno}: negative index {k}")
        if k in entries:
            raise DistributionError(f"line {lineno}: duplicate index {k}")
        entries[k] = parse_probability(parts[1])
    if not entries:
        raise DistributionError("no probabilities found")
    out = [Fraction(0)] * (max(entries) + 1)
    for k, p in entries.items():
        out[k] = p
    return out


def parse_json(text: str) -> list:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DistributionError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("pmf"), list):
        raise DistributionError('JSON input must be an object with a "pmf" list')
    return data["pmf"]


def load_distribution(path: str | PathLike) -> ClaimsDistribution:
    """Read a distribution file (JSON ``{"pmf": [...]}`` or ``k value`` text)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return new_distribution(parse_json(text))
    return new_distribution(parse_text(text))


def dump_json(d: ClaimsDistribution, exact: bool = True) -> str:
    pmf: Sequence = [str(p) for p in d.exact] if exact else d.pmf.tolist()
    return json.dumps({"pmf": list(pmf)})
