import numpy as np
import pytest
from hypothesis import given, settings

from ruinkit import NoConvergence, Root, RootConfig, RootSet, StructureViolation, alphas, char_poly, classify, find_roots
from ruinkit.roots import aberth, companion_roots, reconstruct, taylor_coefficients

from conftest import distributions


def q_of(d):
    return char_poly(alphas(d)).reduced


def as_dict(rs, digits=9):
    return {complex(round(z.real, digits), round(z.imag, digits)): n for z, n in rs}


def test_linear_q(examples):
    rs = find_roots(q_of(examples[1]))
    assert list(rs) == [Root(0.5 + 0j, 1)]


def test_fivefold_root(examples):
    rs = find_roots(q_of(examples[4]))
    assert rs.multiplicities == (1, 5)
    assert rs.values[0] == pytest.approx(0.5, abs=1e-12)
    assert rs.values[1] == pytest.approx(-1 / 14, abs=1e-10)


@pytest.mark.parametrize("key", [5, "5c"])
def test_double_roots(examples, key):
    rs = find_roots(q_of(examples[key]))
    got = as_dict(rs, 6)
    assert got == {
        0.5: 1,
        complex(round(-1 / 7, 6), 0): 2,
        complex(round(1 / 28, 6), 0.125): 2,
        complex(round(1 / 28, 6), -0.125): 2,
    }


def test_corrected_double_roots_are_tight(examples):
    rs = find_roots(q_of(examples["5c"]))
    targets = [0.5, -1 / 7, complex(1 / 28, 1 / 8), complex(1 / 28, -1 / 8)]
    for (z, _), t in zip(sorted(rs, key=lambda r: (r.value.real, r.value.imag)), sorted(targets, key=lambda c: (complex(c).real, complex(c).imag))):
        assert abs(z - t) < 1e-9


def test_classify_binomial(examples):
    info = classify(find_roots(q_of(examples[2])))
    assert info.z2 == pytest.approx(0.975, abs=5e-4)
    assert info.max_subdominant < 0.12
    assert info.complex_pairs == 1 and len(info.negative_real) == 1


def test_classify_sparse(examples):
    info = classify(find_roots(q_of(examples[3])))
    assert info.z2 == pytest.approx(0.9577, abs=5e-5)
    assert info.max_subdominant == pytest.approx(0.7142, abs=1e-4)
    assert info.complex_pairs == 2


def test_classify_single_root(examples):
    info = classify(find_roots(q_of(examples[1])))
    assert info.z2 == 0.5 and info.max_subdominant == 0.0


@pytest.mark.parametrize(
    "entries, item",
    [
        ([Root(0.5, 1), Root(0.2, 1)], "positive roots"),
        ([Root(0.5, 2)], "positive roots"),
        ([Root(1.2, 1), Root(-0.1, 1)], "dominant root range"),
        ([Root(0.5, 1), Root(-0.8, 1)], "root bound"),
        ([Root(0.5, 1), Root(0.1 + 0.2j, 1), Root(-0.1, 1)], "conjugate pairing"),
        ([Root(0.5, 1), Root(0.1 + 0.2j, 2), Root(0.1 - 0.2j, 1)], "conjugate pairing"),
    ],
)
def test_structure_violations(entries, item):
    rs = RootSet(tuple(entries), sum(r.multiplicity for r in entries))
    with pytest.raises(StructureViolation) as exc:
        classify(rs)
    assert exc.value.item == item


def test_rootset_degree_checked():
    with pytest.raises(ValueError):
        RootSet((Root(0.5, 1),), 2)


@pytest.mark.parametrize("kw", [{"max_iterations": 0}, {"cluster_tol": 0}, {"convergence_tol": -1}, {"polish_steps": -1}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        RootConfig(**kw)


def test_no_convergence_without_fallback(examples):
    q = q_of(examples[3])
    with pytest.raises(NoConvergence):
        find_roots(q, RootConfig(max_iterations=1, fallback=False))
    rs = find_roots(q, RootConfig(max_iterations=1))
    assert rs.method == "companion"
    assert classify(rs).z2 == pytest.approx(0.95766, abs=1e-5)


def test_aberth_matches_companion(examples):
    q = np.asarray(q_of(examples[3]))
    z, _, ok = aberth(q, 200, 1e-13)
    assert ok
    c = companion_roots(q)
    for w in c:
        assert np.min(np.abs(z - w)) < 1e-10


def test_taylor_coefficients():
    # (y - 2)^2 = y^2 - 4y + 4 around c = 2: coefficients 0, 0, 1
    t = taylor_coefficients([1, -4, 4], 2.0, 3)
    assert np.allclose(t, [0, 0, 1])


def test_deterministic(examples):
    q = q_of(examples[5])
    assert find_roots(q) == find_roots(q)


@settings(max_examples=300, deadline=None)
@given(distributions(max_m=12))
def test_random_roots(d):
    q = np.asarray(q_of(d))
    rs = find_roots(q)
    deg = len(q) - 1
    assert sum(rs.multiplicities) == deg
    rec = reconstruct(rs)
    assert np.all(np.abs(rec - q) <= 1e-6 * np.maximum(1.0, np.abs(q)))
    for (z, n), res, flat in zip(rs, rs.residuals, rs.flatness):
        bound = 1e-8 * (1 + abs(z)) ** deg
        assert (res if n == 1 else flat) <= bound
    info = classify(rs)
    assert 0 < info.z2 < 1
