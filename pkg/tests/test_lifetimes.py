import itertools
import math

import numpy as np
import pytest

from jointsig import (
    EmpiricalCdf,
    Exponential,
    Weibull,
    count_kernel_single,
    count_kernel_three,
    count_kernel_two,
    count_kernel_two_multitype,
    errors,
)
from jointsig.lifetimes import cdf, chain_probability, from_dict, to_dict
from jointsig.model import GroupCounts

EXP = Exponential(1.0)


def test_exponential_cdf():
    assert cdf(EXP, math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert cdf(EXP, 0.0) == 0.0
    assert Exponential(2.0).cdf(1.0) == pytest.approx(1 - math.exp(-2))


def test_weibull_cdf_and_ppf():
    w = Weibull(2.0, 3.0)
    assert w.cdf(3.0) == pytest.approx(1 - math.exp(-1))
    u = np.linspace(0.01, 0.99, 7)
    assert np.allclose(w.cdf(w.ppf(u)), u)
    assert np.allclose(EXP.cdf(EXP.ppf(u)), u)


def test_invalid_distributions():
    with pytest.raises(errors.InvalidDistribution):
        Exponential(0)
    with pytest.raises(errors.InvalidDistribution):
        Weibull(1, -1)
    with pytest.raises(errors.InvalidDistribution):
        EmpiricalCdf(((1, 0.5), (0.5, 0.7)))
    with pytest.raises(errors.InvalidDistribution):
        EmpiricalCdf(((1, 0.5), (2, 0.4)))
    with pytest.raises(errors.InvalidDistribution):
        from_dict({"kind": "gamma"})


def test_negative_time():
    with pytest.raises(errors.NegativeTime):
        EXP.cdf(-1.0)


def test_empirical_step():
    e = EmpiricalCdf(((1.0, 0.25), (2.0, 1.0)))
    assert e.cdf([0.5, 1.0, 1.5, 2.0, 9.0]).tolist() == [0, 0.25, 0.25, 1.0, 1.0]
    assert e.ppf([0.1, 0.25, 0.5]).tolist() == [1.0, 1.0, 2.0]


def test_empirical_interpolated():
    e = EmpiricalCdf(((1.0, 0.5), (3.0, 0.9)), interpolate=True)
    assert e.cdf(0.5) == pytest.approx(0.25)
    assert e.cdf(2.0) == pytest.approx(0.7)
    assert e.cdf(10.0) == pytest.approx(0.9)
    assert e.ppf(0.7) == pytest.approx(2.0)
    assert np.isinf(e.ppf(0.95))


def test_dict_round_trip():
    for d in (EXP, Weibull(1.5, 2.0), EmpiricalCdf(((0.0, 0.1), (1.0, 1.0)), True)):
        assert from_dict(to_dict(d)) == d


def test_single_kernel_is_binomial():
    F = cdf(EXP, 0.7)
    for lv in range(5):
        expected = math.comb(4, lv) * (1 - F) ** lv * F ** (4 - lv)
        assert count_kernel_single(EXP, [4], [lv], 0.7) == pytest.approx(expected, rel=1e-13)


def test_single_kernel_limits():
    assert count_kernel_single(EXP, [3], [3], 0.0) == 1.0
    assert count_kernel_single(EXP, [3], [0], 1e9) == pytest.approx(1.0)


def test_two_kernel_closed_form():
    # one shared component alive at t1 and dead by t2
    t1, t2 = 0.3, 1.1
    F1, F2 = cdf(EXP, t1), cdf(EXP, t2)
    got = count_kernel_two(EXP, (0, 0, 1), (0, 0, 1, 0), t1, t2)
    assert got == pytest.approx(F2 - F1, rel=1e-13)
    assert count_kernel_two(EXP, (0, 0, 1), (0, 0, 0, 1), t2, t1) == pytest.approx(F2 - F1, rel=1e-13)


def test_two_kernel_ln2():
    # at t = ln 2 every component is alive with probability 1/2
    t = math.log(2)
    got = count_kernel_two(EXP, (1, 1, 2), (1, 0, 1, 1), t, t)
    assert got == pytest.approx(0.5 * 0.5 * 2 * 0.25, abs=1e-15)


def test_kernel_errors():
    with pytest.raises(errors.LevelOutOfRange):
        count_kernel_two(EXP, (1, 1, 2), (2, 0, 1, 1), 1, 2)
    with pytest.raises(errors.InfeasibleLevels):
        count_kernel_two(EXP, (1, 1, 2), (1, 0, 1, 2), 1, 2)
    with pytest.raises(errors.InfeasibleLevels):
        count_kernel_two(EXP, (1, 1, 2), (1, 0, 1, 2), 1, 1)
    with pytest.raises(errors.NegativeTime):
        count_kernel_two(EXP, (1, 1, 2), (1, 0, 1, 1), -1, 1)


def _feasible_two(counts, t1, t2):
    n1, n2, n12 = counts
    for lv in itertools.product(range(n1 + 1), range(n2 + 1), range(n12 + 1), range(n12 + 1)):
        a, b = lv[2], lv[3]
        if (t1 < t2 and a < b) or (t1 > t2 and a > b) or (t1 == t2 and a != b):
            continue
        yield lv


@pytest.mark.parametrize("times", [(0.2, 0.9), (0.9, 0.2), (0.5, 0.5)])
def test_two_kernel_normalised(times):
    counts = (2, 1, 3)
    total = sum(count_kernel_two(EXP, counts, lv, *times) for lv in _feasible_two(counts, *times))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_multitype_kernel_is_product():
    gc = GroupCounts(2, (("X", (("1", 1), ("2", 0), ("12", 2))), ("Y", (("1", 0), ("2", 1), ("12", 1)))))
    dists = {"X": EXP, "Y": Weibull(2.0, 1.0)}
    lv = (1, 0, 2, 1, 0, 1, 1, 1)
    got = count_kernel_two_multitype(dists, gc, lv, 0.4, 0.8)
    expected = count_kernel_two(EXP, (1, 0, 2), lv[:4], 0.4, 0.8) * count_kernel_two(dists["Y"], (0, 1, 1), lv[4:], 0.4, 0.8)
    assert got == pytest.approx(expected, rel=1e-14)


def test_three_kernel_chain():
    # the shared-by-all component: alive at t1, dead at t2 (so also at t3 > t2)
    t = (0.2, 0.5, 0.9)
    lv = [0] * 12
    lv[9] = 1
    got = count_kernel_three(EXP, (0, 0, 0, 0, 0, 0, 1), lv, *t)
    assert got == pytest.approx(cdf(EXP, 0.5) - cdf(EXP, 0.2), rel=1e-13)


def test_chain_probability_vectorised_rejects_infeasible():
    p = chain_probability(2, [[2, 1], [1, 2]], [0.1, 0.4], EXP)
    assert p[0] > 0 and p[1] == 0
