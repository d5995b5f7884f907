import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from ruinkit import (
    NegativeProbability,
    NetProfitViolated,
    SumNotOne,
    SupportTooSmall,
    binomial,
    load_distribution,
    mean,
    new_distribution,
    tail,
)
from ruinkit.distribution import dump_json, parse_probability, parse_text

from conftest import distributions

SEVEN = ["7/8", 0, 0, 0, 0, 0, 0, "1/8"]


def test_basic_three_point():
    d = new_distribution(["1/2", "1/4", "1/4"])
    assert d.m == 2
    assert mean(d) == 0.75


def test_sparse_seven_point():
    d = new_distribution(SEVEN)
    assert d.m == 7
    assert mean(d) == 0.875
    assert tail(d, 3) == 0.125


def test_mean_small():
    assert mean(new_distribution([0.99, 0, 0.01])) == pytest.approx(0.02, abs=1e-15)


def test_tail_values():
    d = new_distribution(["1/2", "1/4", "1/4"])
    assert tail(d, 0) == 0.5
    assert tail(d, 1) == 0.25
    assert tail(d, 2) == 0.0
    assert tail(d, 50) == 0.0


@pytest.mark.parametrize(
    "pmf, err",
    [
        (["1/4", "1/4", "1/2"], NetProfitViolated),
        ([0.5, 0.2, 0.2], SumNotOne),
        ([0.5, 0.5], SupportTooSmall),
        ([0.5, 0.5, 0, 0], SupportTooSmall),
        ([0.6, -0.1, 0.5], NegativeProbability),
        ([0.0, 1.0, 0.0, 0.0], SupportTooSmall),
    ],
)
def test_rejections(pmf, err):
    with pytest.raises(err):
        new_distribution(pmf)


def test_trailing_zeros_trimmed():
    d = new_distribution(["1/2", "1/4", "1/4", 0, 0])
    assert d.m == 2 and d.pmf[-1] > 0


def test_renormalizes_within_tolerance():
    d = new_distribution([0.5 + 4e-10, 0.25, 0.25])
    assert sum(d.exact) == 1
    with pytest.raises(SumNotOne):
        new_distribution([0.5 + 2e-9, 0.25, 0.25])


def test_mean_exactly_one_rejected():
    with pytest.raises(NetProfitViolated):
        new_distribution([0.5, 0, 0.5])


def test_fraction_parsing_is_exact():
    assert parse_probability("145/2744") == Fraction(145, 2744)
    assert parse_probability(0.1) == Fraction(0.1)
    with pytest.raises(ValueError):
        parse_probability("abc")


def test_binomial():
    d = binomial(5, "99/500")
    assert d.m == 5
    assert mean(d) == pytest.approx(0.99, abs=1e-15)
    assert float(d.exact[0]) == pytest.approx((401 / 500) ** 5, rel=1e-15)


def test_immutable():
    d = new_distribution(SEVEN)
    with pytest.raises(ValueError):
        d.pmf[0] = 0.1


def test_text_and_json_files(tmp_path):
    txt = tmp_path / "d.txt"
    txt.write_text("# claims\n0 7/8\n7 1/8\n")
    d1 = load_distribution(txt)
    assert d1.m == 7 and d1.pmf[3] == 0

    js = tmp_path / "d.json"
    js.write_text(json.dumps({"pmf": ["7/8", 0, 0, 0, 0, 0, 0, "1/8"]}))
    d2 = load_distribution(js)
    assert d1.exact == d2.exact

    back = tmp_path / "back.json"
    back.write_text(dump_json(d2))
    assert load_distribution(back).exact == d2.exact


def test_text_rejects_duplicates():
    with pytest.raises(ValueError):
        parse_text("0 0.5\n0 0.5\n")


@settings(max_examples=200, deadline=None)
@given(distributions(max_m=12))
def test_tail_identities(d):
    assert tail(d, d.m) == 0.0
    assert sum(d.exact[1:]) == 1 - d.exact[0]
    assert abs(tail(d, 0) - (1.0 - d.f0)) <= np.spacing(1.0)
    assert abs(mean(d) - sum(tail(d, k) for k in range(d.m))) <= 1e-12
    assert d.f0 >= 1.0 - mean(d) > 0
    assert np.all(d.pmf >= 0) and d.pmf[-1] > 0
