import numpy as np
import pytest

from ruinkit import McConfig, McEstimate, evaluate, new_distribution, recursion_oracle, simulate_ruin, solve
from ruinkit.oracle import _BlockSums, _ruin_times, path_keys, uniforms


def test_recursion_halving(examples):
    assert recursion_oracle(examples[1], 3).tolist() == [0.75, 0.5, 0.25, 0.125]


def test_recursion_gambler():
    got = recursion_oracle(new_distribution(["3/5", 0, "2/5"]), 2)
    assert got == pytest.approx([0.8, 2 / 3, 4 / 9], rel=1e-14)


def test_recursion_zero_and_errors(examples):
    assert recursion_oracle(examples[3], 0).tolist() == [0.875]
    with pytest.raises(ValueError):
        recursion_oracle(examples[3], -1)


@pytest.mark.parametrize("key", [1, 2, 3, 4, 5, "5c"])
def test_recursion_matches_roots(examples, key):
    sol = solve(examples[key])
    ref = recursion_oracle(examples[key], 200)
    assert max(abs(evaluate(sol, u) - ref[u]) for u in range(201)) <= 1e-8


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(n_paths=0)
    with pytest.raises(ValueError):
        McConfig(horizon=0)


def test_uniforms_range_and_spread():
    keys = path_keys(7, np.arange(50_000))
    r = uniforms(keys, np.zeros(50_000, dtype=np.int64))
    assert r.min() >= 0 and r.max() < 1
    assert abs(r.mean() - 0.5) < 0.01
    # different time index gives a different stream
    r2 = uniforms(keys, np.ones(50_000, dtype=np.int64))
    assert abs(np.corrcoef(r, r2)[0, 1]) < 0.02


def test_block_sums_match_direct_convolution(examples):
    pmf = examples[2].pmf
    sums = _BlockSums(pmf)
    direct = np.array([1.0])
    for _ in range(8):
        direct = np.convolve(direct, pmf)
    assert np.allclose(sums.cdf(3), np.cumsum(direct), atol=1e-14)


def test_estimate_fields(examples):
    est = simulate_ruin(examples[1], 1, McConfig(n_paths=5000, horizon=500, seed=3))
    assert isinstance(est, McEstimate)
    assert est.estimate == est.ruined_count / est.n_paths
    assert est.half_width_95 >= 0
    assert est.alive_fraction == pytest.approx(1 - est.estimate)
    with pytest.raises(ValueError):
        simulate_ruin(examples[1], -1)


def test_zero_capital_hits_mean(examples):
    est = simulate_ruin(examples[1], 0, McConfig(n_paths=100_000, horizon=10_000, seed=0))
    assert abs(est.estimate - 0.75) <= 3 * est.half_width_95


def test_short_horizon_lower_bound():
    d = new_distribution([0.9, 0, 0.1])
    est = simulate_ruin(d, 10, McConfig(n_paths=10_000, horizon=1, seed=1))
    assert est.estimate <= recursion_oracle(d, 10)[10]
    assert est.estimate == 0.0


def test_deterministic_and_parallel_invariant(examples):
    cfg = McConfig(n_paths=3000, horizon=2000, seed=11)
    a = simulate_ruin(examples[2], 3, cfg)
    assert a == simulate_ruin(examples[2], 3, cfg)
    assert a == simulate_ruin(examples[2], 3, cfg, workers=3)
    other = simulate_ruin(examples[2], 3, McConfig(n_paths=3000, horizon=2000, seed=12))
    assert other.ruined_count != a.ruined_count


def test_path_streams_do_not_depend_on_batching(examples):
    d = examples[3]
    sums = _BlockSums(d.pmf)
    keys = path_keys(5, np.arange(400))
    whole = _ruin_times(sums, d.m, 4, 5000, keys)
    parts = np.concatenate([_ruin_times(sums, d.m, 4, 5000, keys[i : i + 37]) for i in range(0, 400, 37)])
    assert np.array_equal(whole, parts)


def test_monotone_in_horizon(examples):
    counts = [
        simulate_ruin(examples[3], 5, McConfig(n_paths=4000, horizon=h, seed=2)).ruined_count
        for h in (1, 2, 5, 10, 30, 100, 1000, 10_000)
    ]
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_ruin_times_are_horizon_free(examples):
    d = examples[2]
    sums = _BlockSums(d.pmf)
    keys = path_keys(9, np.arange(2000))
    long = _ruin_times(sums, d.m, 3, 20_000, keys)
    short = _ruin_times(sums, d.m, 3, 300, keys)
    early = (long > 0) & (long <= 300)
    assert np.array_equal(short[early], long[early])
    assert np.all(short[~early] == -1)


@pytest.mark.slow
def test_sparse_example_target(examples):
    cfg = McConfig(n_paths=200_000, horizon=100_000, seed=0)
    est = simulate_ruin(examples[3], 12, cfg)
    assert abs(est.estimate - 0.5535) <= 4 * est.half_width_95


def test_large_capital_is_zero(examples):
    est = simulate_ruin(examples[1], 500, McConfig(n_paths=100_000, horizon=100_000, seed=42))
    assert est.estimate == 0.0 and est.half_width_95 == 0.0
