"""Roots of the deflated characteristic polynomial, with multiplicities.

Roots are found simultaneously by Aberth-Ehrlich iteration; if that stalls,
the eigenvalues of the companion matrix are used instead. Raw approximations
are then grouped into numerically multiple roots, symmetrised across the real
axis and polished with Newton steps.

Grouping uses two rules. Approximations closer than ``cluster_tol`` (relative
to ``max(1, |z|)``) are always merged. Farther groups are merged when the
polynomial is numerically flat to the right order at the merged mean: a
k-fold root ``c`` of ``q`` makes the first k Taylor coefficients of ``q`` at
``c`` vanish, and we accept a merge when each of them is below
``multiplicity_tol`` times its own evaluation scale. The second rule is what
recovers roots like a 5-fold zero whose binary64 images are spread over
~1e-4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .errors import NoConvergence, StructureViolation

EPS = np.finfo(float).eps
IMAG_FLUSH = 1e-10


@dataclass(frozen=True)
class RootConfig:
    max_iterations: int = 200
    convergence_tol: float = 1e-13
    cluster_tol: float = 1e-6
    polish_steps: int = 3
    multiplicity_tol: float = 1e-8
    fallback: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.polish_steps < 0:
            raise ValueError("polish_steps must be >= 0")
        for name in ("convergence_tol", "cluster_tol", "multiplicity_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


class Root(NamedTuple):
    value: complex
    multiplicity: int


@dataclass(frozen=True)
class RootSet:
    """Distinct roots with multiplicities; ``sum(n) == degree``.

    ``residuals[k]`` is ``|q(z_k)|`` and ``flatness[k]`` the modulus of the
    ``(n_k - 1)``-th Taylor coefficient of ``q`` at ``z_k`` (equal to the
    residual for simple roots).
    """

    entries: tuple[Root, ...]
    degree: int
    residuals: tuple[float, ...] = ()
    flatness: tuple[float, ...] = ()
    method: str = "aberth"
    iterations: int = 0

    def __post_init__(self):
        total = sum(r.multiplicity for r in self.entries)
        if total != self.degree:
            raise ValueError(f"multiplicities sum to {total}, expected {self.degree}")

    def __iter__(self) -> Iterator[Root]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.entries], dtype=complex)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(r.multiplicity for r in self.entries)

    def expanded(self) -> np.ndarray:
        """Every root repeated according to its multiplicity."""
        return np.repeat(self.values, self.multiplicities)

    def with_unit_root(self) -> list[Root]:
        """Roots of ``p = (y - 1) q``: the unit root first, then these."""
        return [Root(1.0 + 0j, 1), *self.entries]


# -- polynomial helpers -----------------------------------------------------


def taylor_coefficients(coeffs: Sequence, c: complex, count: int) -> np.ndarray:
    """First ``count`` Taylor coefficients of the polynomial at ``c``.

    Returns ``t_0..t_{count-1}`` with ``q(c + h) = sum t_j h^j``; computed by
    repeated synthetic division, so ``t_j = q^(j)(c) / j!`` without factorials.
    """
    work = list(coeffs)
    out = []
    for _ in range(count):
        acc = 0
        quotient = []
        for a in work:
            acc = acc * c + a
            quotient.append(acc)
        out.append(quotient.pop())
        work = quotient
        if not work:
            break
    out += [0] * (count - len(out))
    return np.array(out)


def _flatness(coeffs: np.ndarray, c: complex, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Taylor coefficients ``|t_j(c)|`` and their evaluation scales, ``j < k``."""
    t = np.abs(taylor_coefficients(coeffs, complex(c), k))
    scale = np.abs(taylor_coefficients(np.abs(coeffs), abs(c), k)).astype(float)
    return t, scale


def _eval_bound(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner rounding-error bound for evaluating the polynomial at ``z``."""
    n = len(coeffs) - 1
    return 4.0 * n * EPS * np.polyval(np.abs(coeffs), np.abs(z))


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    lead = abs(coeffs[0])
    if coeffs[-1] != 0:
        radius = (abs(coeffs[-1]) / lead) ** (1.0 / n)
    else:
        radius = 1.0
    # fixed, non-symmetric offset so iterates do not stall on the real axis
    angles = 2.0 * np.pi * np.arange(n) / n + 0.7
    return radius * np.exp(1j * angles)


def aberth(
    coeffs: np.ndarray, max_iterations: int = 200, tol: float = 1e-13
) -> tuple[np.ndarray, int, bool]:
    """Simultaneous Aberth-Ehrlich iteration.

    Each root is frozen once its correction drops below ``tol * max(1, |z|)``
    or its residual is inside the Horner rounding bound. Returns
    ``(roots, iterations, converged)``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs) - 1
    dcoeffs = np.polyder(coeffs)
    z = _initial_guesses(coeffs)
    active = np.ones(n, dtype=bool)
    it = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for it in range(1, max_iterations + 1):
            idx = np.flatnonzero(active)
            zi = z[idx]
            pz = np.polyval(coeffs, zi)
            small = np.abs(pz) <= _eval_bound(coeffs, zi)
            dpz = np.polyval(dcoeffs, zi)
            ratio = pz / dpz
            diff = zi[:, None] - z[None, :]
            diff[np.arange(len(idx)), idx] = np.inf
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
            bad = ~np.isfinite(w)
            if bad.any():
                # derivative vanished or update blew up: nudge instead
                w[bad] = 1e-3 * (1.0 + np.abs(zi[bad])) * np.exp(1j * (0.3 + it))
            w[small] = 0.0
            z[idx] = zi - w
            done = small | (np.abs(w) <= tol * np.maximum(1.0, np.abs(zi)))
            active[idx[done]] = False
            if not active.any():
                return z, it, True
    return z, it, False


def companion_roots(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    n = len(coeffs) - 1
    c = np.zeros((n, n))
    c[0, :] = -coeffs[1:] / coeffs[0]
    c[np.arange(1, n), np.arange(n - 1)] = 1.0
    return np.linalg.eigvals(c).astype(complex)


# -- clustering -------------------------------------------------------------


def _is_multiple(coeffs: np.ndarray, members: np.ndarray, tol: float) -> bool:
    """Whether ``members`` are images of one root of multiplicity ``len(members)``.

    The centre is refined by Newton on ``q^(k-1)`` first; the mean of a cloud
    of approximations is only as good as the cloud is tight.
    """
    k = len(members)
    c0 = complex(members.mean())
    radius = float(np.max(np.abs(members - c0)))
    c = _newton_polish(coeffs, c0, k, 8, keep_real=False)
    if abs(c - c0) > radius + 1e-12 * max(1.0, abs(c0)):
        c = c0
    t, scale = _flatness(coeffs, c, k)
    return bool(np.all(t <= tol * scale))


def _cluster(raw: np.ndarray, coeffs: np.ndarray, cfg: RootConfig) -> list[list[int]]:
    n = len(raw)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(raw[i]), abs(raw[j]))
            if abs(raw[i] - raw[j]) <= cfg.cluster_tol * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = sorted(groups.values())

    while len(clusters) > 1:
        means = [raw[g].mean() for g in clusters]
        pairs = sorted(
            (abs(means[a] - means[b]), a, b)
            for a in range(len(clusters))
            for b in range(a + 1, len(clusters))
        )
        for _, a, b in pairs:
            merged = clusters[a] + clusters[b]
            if _is_multiple(coeffs, raw[merged], cfg.multiplicity_tol):
                clusters = [g for i, g in enumerate(clusters) if i not in (a, b)]
                clusters.append(sorted(merged))
                break
        else:
            break
    return clusters


def _flush(z: complex) -> complex:
    if abs(z.imag) <= IMAG_FLUSH * (1.0 + abs(z.real)):
        return complex(z.real, 0.0)
    return z


def _symmetrize(values: list[complex], mults: list[int]) -> tuple[list[complex], dict[int, int]]:
    """Pair each upper-half-plane root with its nearest lower-half partner.

    Returns the symmetrised values and a map from upper to lower index.
    """
    out = list(values)
    pairs: dict[int, int] = {}
    upper = [i for i, z in enumerate(out) if z.imag > 0]
    upper.sort(key=lambda i: (-abs(out[i]), out[i].real))
    for i in upper:
        candidates = [
            j
            for j, z in enumerate(out)
            if z.imag < 0 and mults[j] == mults[i] and j not in pairs.values()
        ]
        if not candidates:
            continue
        j = min(candidates, key=lambda j: abs(out[j] - out[i].conjugate()))
        z = 0.5 * (out[i] + out[j].conjugate())
        out[i], out[j] = z, z.conjugate()
        pairs[i] = j
    return out, pairs


def _newton_polish(
    coeffs: np.ndarray, z: complex, n: int, steps: int, keep_real: bool = True
) -> complex:
    """Newton on ``q^(n-1)``, which has a simple zero at an n-fold root of ``q``."""
    g = np.asarray(coeffs)
    for _ in range(n - 1):
        g = np.polyder(g)
    dg = np.polyder(g) if len(g) > 1 else np.zeros(1)
    real = keep_real and z.imag == 0
    gz = np.polyval(g, z)
    for _ in range(steps):
        d = np.polyval(dg, z)
        if d == 0 or gz == 0:
            break
        z_new = z - gz / d
        if real:
            z_new = complex(z_new.real, 0.0)
        g_new = np.polyval(g, z_new)
        if not abs(g_new) < abs(gz):
            break
        z, gz = z_new, g_new
    return complex(z)


def _sort_key(root: Root):
    z = root.value
    if z.imag == 0:
        return (0, -z.real, 0.0)
    return (1, -abs(z), -z.real, -z.imag)


def find_roots(q: Sequence[float], cfg: Optional[RootConfig] = None) -> RootSet:
    """All roots of the monic polynomial ``q`` with multiplicities.

    Parameters
    ----------
    q : sequence of float
        Coefficients, highest power first, ``q[0] == 1``.
    cfg : RootConfig, optional

    Raises
    ------
    NoConvergence
        The iteration cap was reached and (if enabled) the companion-matrix
        fallback did not produce roots with acceptable residuals either.
    """
    cfg = cfg or RootConfig()
    coeffs = np.asarray(q, dtype=float)
    if coeffs.ndim != 1 or len(coeffs) < 2:
        raise ValueError("polynomial must have degree >= 1")
    if coeffs[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    coeffs = coeffs / coeffs[0]
    degree = len(coeffs) - 1

    if degree == 1:
        raw = np.array([-coeffs[1] + 0j])
        method, iterations = "direct", 0
    else:
        raw, iterations, ok = aberth(coeffs, cfg.max_iterations, cfg.convergence_tol)
        method = "aberth"
        if not ok:
            if not cfg.fallback:
                raise NoConvergence(
                    f"Aberth iteration hit the cap of {cfg.max_iterations} iterations"
                )
            raw = companion_roots(coeffs)
            method = "companion"
            res = np.abs(np.polyval(coeffs, raw))
            if np.any(res > 1e3 * _eval_bound(coeffs, raw) + 1e-12):
                raise NoConvergence(
                    "Aberth iteration failed and companion eigenvalues have "
                    f"residual up to {res.max():.3e}"
                )

    clusters = _cluster(raw, coeffs, cfg)
    values = [_flush(complex(raw[g].mean())) for g in clusters]
    mults = [len(g) for g in clusters]
    values, pairs = _symmetrize(values, mults)

    polished = list(values)
    lower = set(pairs.values())
    for i, (z, n) in enumerate(zip(values, mults)):
        if i not in lower:
            polished[i] = _flush(_newton_polish(coeffs, z, n, cfg.polish_steps))
    for i, j in pairs.items():
        polished[j] = polished[i].conjugate()

    entries = sorted((Root(z, n) for z, n in zip(polished, mults)), key=_sort_key)
    residuals = tuple(float(abs(np.polyval(coeffs, r.value))) for r in entries)
    flatness = tuple(
        float(abs(taylor_coefficients(coeffs, r.value, r.multiplicity)[-1])) for r in entries
    )
    return RootSet(tuple(entries), degree, residuals, flatness, method, iterations)


# -- structure checks -------------------------------------------------------


@dataclass(frozen=True)
class RootClassification:
    """Where the dominant root sits and how far the others trail it."""

    z2: float
    z2_index: int
    max_subdominant: float
    dominance_gap: float
    negative_real: tuple[float, ...] = field(default=())
    complex_pairs: int = 0


def classify(rs: RootSet, cfg: Optional[RootConfig] = None) -> RootClassification:
    """Check the root structure of ``q`` and locate the dominant root ``z2``.

    The roots of ``q`` for an admissible claims distribution have exactly one
    positive real root ``z2`` in (0, 1), it is simple, every other root has
    modulus at most ``z2``, non-real roots come in conjugate pairs of equal
    multiplicity, and an even-degree ``q`` (odd m) has a negative real root.

    Raises
    ------
    StructureViolation
        Naming the first property that fails.
    """
    cfg = cfg or RootConfig()
    total = sum(r.multiplicity for r in rs)
    if total != rs.degree:
        raise StructureViolation("multiplicity count", f"sum n_k = {total} != {rs.degree}")

    positive = [i for i, r in enumerate(rs) if r.value.imag == 0 and r.value.real > 0]
    count = sum(rs.entries[i].multiplicity for i in positive)
    if count != 1:
        raise StructureViolation(
            "positive roots", f"expected exactly one simple positive root of q, found {count}"
        )
    i2 = positive[0]
    z2 = rs.entries[i2].value.real
    if not 0 < z2 < 1:
        raise StructureViolation("dominant root range", f"z2 = {z2!r} outside (0, 1)")

    others = [abs(r.value) for i, r in enumerate(rs) if i != i2]
    max_sub = max(others, default=0.0)
    if max_sub > z2 + cfg.cluster_tol * max(1.0, z2):
        raise StructureViolation(
            "root bound", f"|z| = {max_sub!r} exceeds z2 = {z2!r}"
        )

    pairs = 0
    for r in rs:
        if r.value.imag > 0:
            mate = [s for s in rs if s.value == r.value.conjugate()]
            if not mate:
                raise StructureViolation("conjugate pairing", f"no conjugate for {r.value}")
            if mate[0].multiplicity != r.multiplicity:
                raise StructureViolation(
                    "conjugate pairing", f"multiplicities differ at {r.value}"
                )
            pairs += 1
        elif r.value.imag < 0 and not any(s.value == r.value.conjugate() for s in rs):
            raise StructureViolation("conjugate pairing", f"no conjugate for {r.value}")

    negatives = tuple(r.value.real for r in rs if r.value.imag == 0 and r.value.real < 0)
    m = rs.degree + 1
    if m % 2 == 1 and not negatives:
        raise StructureViolation("negative root", f"m = {m} is odd but no negative real root")

    return RootClassification(z2, i2, max_sub, z2 - max_sub, negatives, pairs)


def reconstruct(rs: RootSet) -> np.ndarray:
    """Monic coefficients of ``prod (y - z_k)^{n_k}``; real when pairs are exact."""
    c = np.poly(rs.expanded())
    if np.all(np.abs(c.imag) <= 1e-12 * np.maximum(1.0, np.abs(c.real))):
        return c.real
    return c

