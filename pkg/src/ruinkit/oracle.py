"""Independent checks on the exact solution.

``recursion_oracle`` evaluates ``psi`` directly from the tail-form first-step
equation, with no root finding. ``simulate_ruin`` estimates it by simulating
the surplus process ``U(t) = u + t - (Y_1 + ... + Y_t)``.

Simulation details
------------------
Random numbers come from a counter-based generator: the uniform used by path
``i`` for the move starting at time ``t`` is the SplitMix64 output for
``(seed, i, t)``. A path's trajectory therefore depends only on the seed and
its own index, never on chunking or thread count.

While the surplus is high enough that no run of ``B`` claims can ruin the
path (``U > B (m - 1)``), ``B`` steps are taken at once by sampling the
``B``-fold convolution of the claims law. Block sizes are powers of two and
only start at multiples of themselves, so the schedule is independent of the
horizon; the estimate is then nondecreasing in the horizon for a fixed seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from .distribution import ClaimsDistribution

# -- recursion oracle -------------------------------------------------------


def recursion_oracle(d: ClaimsDistribution, u_max: int) -> np.ndarray:
    """``psi(0..u_max)`` from the tail-form first-step equation.

    Isolating the ``k = 0`` term gives, for ``u >= 1``,

        f(0) psi(u) = sum_{k=1}^{min(u-1, m-1)} Fbar(k) psi(u-k)
                      + sum_{k=u}^{m-1} Fbar(k),

    with ``psi(0)`` equal to the mean claim. Cost is ``O(u_max * m)``.
    """
    if u_max < 0:
        raise ValueError("u_max must be >= 0")
    m = d.m
    fbar = np.asarray(d.tails, dtype=float)
    # suffix[u] = sum_{k=u}^{m-1} Fbar(k)
    suffix = np.concatenate((np.cumsum(fbar[::-1])[::-1], [0.0]))
    f0 = d.f0
    psi = np.empty(u_max + 1)
    psi[0] = d.mean
    for u in range(1, u_max + 1):
        top = min(u - 1, m - 1)
        s = 0.0
        for k in range(1, top + 1):
            s += fbar[k] * psi[u - k]
        if u < m:
            s += suffix[u]
        psi[u] = s / f0
    return psi


# -- counter-based random numbers -------------------------------------------

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def path_keys(seed: int, paths: np.ndarray) -> np.ndarray:
    base = _mix(np.array([seed % 2**64], dtype=np.uint64))
    return _mix(base + (paths.astype(np.uint64) + np.uint64(1)) * _GAMMA)


def uniforms(keys: np.ndarray, t: np.ndarray) -> np.ndarray:
    """One uniform in [0, 1) per (path key, time) pair."""
    z = _mix(keys + (t.astype(np.uint64) + np.uint64(1)) * _GAMMA)
    return (z >> _S11).astype(np.float64) * 2.0**-53


# -- block sampler ----------------------------------------------------------

MAX_LEVEL = 16


class _BlockSums:
    """CDFs of sums of ``2**L`` claims, built on demand by squaring."""

    def __init__(self, pmf: np.ndarray):
        self._pmfs = [np.asarray(pmf, dtype=float)]
        self._cdfs = [self._to_cdf(self._pmfs[0])]

    @staticmethod
    def _to_cdf(pmf: np.ndarray) -> np.ndarray:
        cdf = np.cumsum(np.clip(pmf, 0.0, None))
        cdf /= cdf[-1]
        cdf[-1] = 1.0
        return cdf

    def cdf(self, level: int) -> np.ndarray:
        while len(self._cdfs) <= level:
            prev = self._pmfs[-1]
            if len(prev) < 256:
                nxt = np.convolve(prev, prev)
            else:
                nxt = fftconvolve(prev, prev)
            nxt = np.clip(nxt, 0.0, None)
            nxt /= nxt.sum()
            self._pmfs.append(nxt)
            self._cdfs.append(self._to_cdf(nxt))
        return self._cdfs[level]

    def sample(self, level: int, r: np.ndarray) -> np.ndarray:
        cdf = self.cdf(level)
        k = np.searchsorted(cdf, r, side="right")
        return np.minimum(k, len(cdf) - 1)


def _floor_log2(x: np.ndarray) -> np.ndarray:
    """``floor(log2(x))`` for positive integers, exactly."""
    _, e = np.frexp(x.astype(np.float64))
    return e.astype(np.int64) - 1


# -- simulation -------------------------------------------------------------


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 100_000
    horizon: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    """Ruined fraction with a normal-approximation 95% half-width.

    ``alive_fraction`` is the share of paths not ruined by the horizon;
    the finite horizon can only bias the estimate downward.
    """

    estimate: float
    half_width_95: float
    ruined_count: int
    n_paths: int
    alive_fraction: float


CHUNK = 1 << 17


def _ruin_times(
    sums: _BlockSums, m: int, u: int, horizon: int, keys: np.ndarray
) -> np.ndarray:
    """Ruin time of each path, or -1 if it survives past ``horizon``."""
    n = len(keys)
    surplus = np.full(n, u, dtype=np.int64)
    t = np.zeros(n, dtype=np.int64)
    tau = np.full(n, -1, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        s, ta = surplus[active], t[active]
        # largest block B = 2**L with s > B (m - 1); L = 0 means a checked single step
        room = (s - 1) // (m - 1)
        level = np.where(room >= 1, _floor_log2(np.maximum(room, 1)), 0)
        low_bit = ta & -ta
        aligned = np.where(ta == 0, MAX_LEVEL, _floor_log2(np.maximum(low_bit, 1)))
        level = np.minimum(np.minimum(level, aligned), MAX_LEVEL)

        r = uniforms(keys[active], ta)
        claims = np.empty(active.size, dtype=np.int64)
        for lev in np.unique(level):
            sel = level == lev
            claims[sel] = sums.sample(int(lev), r[sel])
        steps = np.left_shift(1, level)
        s = s + steps - claims
        ta = ta + steps
        surplus[active] = s
        t[active] = ta

        ruined = s <= 0
        tau[active[ruined]] = ta[ruined]
        active = active[~ruined & (ta < horizon)]
    return tau


def simulate_ruin(
    d: ClaimsDistribution,
    u: int,
    cfg: Optional[McConfig] = None,
    *,
    workers: int = 1,
) -> McEstimate:
    """Estimate the probability that ``U(t) <= 0`` for some ``1 <= t <= horizon``.

    The result is identical for any ``workers`` value.
    """
    cfg = cfg or McConfig()
    if u < 0:
        raise ValueError("u must be >= 0")
    sums = _BlockSums(d.pmf)
    sums.cdf(MAX_LEVEL if u > 1 else 0)  # build tables before threads share them
    starts = range(0, cfg.n_paths, CHUNK)

    def run(start: int) -> int:
        idx = np.arange(start, min(start + CHUNK, cfg.n_paths))
        tau = _ruin_times(sums, d.m, u, cfg.horizon, path_keys(cfg.seed, idx))
        return int(np.count_nonzero((tau > 0) & (tau <= cfg.horizon)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, starts))
    else:
        counts = [run(s) for s in starts]
    ruined = sum(counts)
    p = ruined / cfg.n_paths
    half = 1.96 * math.sqrt(p * (1.0 - p) / cfg.n_paths)
    return McEstimate(p, half, ruined, cfg.n_paths, 1.0 - p)
