from fractions import Fraction

import numpy as np
import pytest

from modelgen import random_model

from jointsig import (
    Event,
    Exponential,
    Order,
    build_model,
    errors,
    exhaustive_signature,
    joint_signature,
    simulate_failure_times,
)
from jointsig.oracle import estimate_joint_survival, summary
from jointsig.reliability import event_probability
from jointsig.structure import Atom, Or, series

EXP = {"T": Exponential(1.0)}


def test_same_seed_same_samples(ex2):
    a = simulate_failure_times(ex2.model(), EXP, 42, 70_000)
    b = simulate_failure_times(ex2.model(), EXP, 42, 70_000)
    assert np.array_equal(a.times, b.times)
    c = simulate_failure_times(ex2.model(), EXP, 43, 70_000)
    assert not np.array_equal(a.times, c.times)


def test_prefix_stable_across_chunks(ex2):
    short = simulate_failure_times(ex2.model(), EXP, 1, 1000)
    long = simulate_failure_times(ex2.model(), EXP, 1, 100_000)
    assert np.array_equal(short.times, long.times[:1000])


def test_series_is_min_and_parallel_is_max():
    m = build_model([("S", series("A", "B")), ("P", Or([Atom("A"), Atom("B")]))], {"A": "T", "B": "T"})
    run = simulate_failure_times(m, EXP, 0, 2000)
    # with a single shared pair, series fails at the first and parallel at the last failure
    assert (run.times[:, 0] <= run.times[:, 1]).all()
    s, p = run.times.T
    # min and max of two iid Exp(1) have means 1/2 and 3/2
    assert abs(s.mean() - 0.5) < 0.05 and abs(p.mean() - 1.5) < 0.1


def test_estimate_and_summary(ex2):
    run = simulate_failure_times(ex2.model(), EXP, 9, 10_000)
    p, se = estimate_joint_survival(run, {"S1": 0.0, "S2": 0.0})
    assert p == 1.0 and se == 0.0
    doc = summary(run, [[0.5, 0.5]])
    assert doc["seed"] == 9 and doc["samples"] == 10_000
    assert doc["generator"].startswith("numpy.PCG64")


def test_bad_sample_arguments(ex2):
    with pytest.raises(ValueError):
        simulate_failure_times(ex2.model(), EXP, 0, 0)
    with pytest.raises(ValueError):
        simulate_failure_times(ex2.model(), EXP, -1, 10)


def test_exhaustive_example1(ex1):
    table = exhaustive_signature(ex1.model(), Order((0, 1)))
    assert table[(1, 1, 2, 1)] == Fraction(10, 24)
    assert table.counts((1, 1, 2, 1)) == (10, 24)


def test_exhaustive_size_limit():
    names = [f"X{i}" for i in range(13)]
    m = build_model([("S1", series(*names[:7])), ("S2", series(*names[6:]))], dict.fromkeys(names, "T"))
    with pytest.raises(errors.TooLarge):
        exhaustive_signature(m, Order((0, 0)), Event.BOTH_FUNCTION)


LN2 = float(np.log(2))


def test_example2_s2_at_ln2_million(ex2):
    run = simulate_failure_times(ex2.model(), EXP, 2, 1_000_000)
    p, se = estimate_joint_survival(run, {"S2": LN2})
    assert abs(p - 0.375) < 3 * se


def test_example4_at_ln2_million(ex4):
    run = simulate_failure_times(ex4.model(), EXP, 4, 1_000_000)
    p, se = estimate_joint_survival(run, [LN2] * 3)
    assert abs(p - 5 / 32) < 3 * se


def test_times_beyond_every_failure(ex2):
    run = simulate_failure_times(ex2.model(), EXP, 0, 1000)
    assert estimate_joint_survival(run, [1e6, 1e6]) == (0.0, 0.0)


def test_fixtures_agree_with_simulation(ex1, ex2, ex4):
    rng = np.random.default_rng(12)
    for k, mf in enumerate((ex1, ex2, ex4)):
        m = mf.model()
        run = simulate_failure_times(m, mf.distributions, 100 + k, 1_000_000)
        both = Event.BOTH_FUNCTION if m.n_systems == 2 else Event.ALL_THREE_FUNCTION
        for _ in range(5):
            ts = rng.uniform(0, 2, m.n_systems).tolist()
            p, se = estimate_joint_survival(run, ts)
            assert abs(event_probability(m, mf.distributions, ts, both) - p) <= 4 * se


def test_hundred_six_component_models():
    rng = np.random.default_rng(606)
    done = 0
    while done < 100:
        m = random_model(rng, 2, 6)
        if len(m.membership) != 6:
            continue
        for order in Order.all(2):
            assert joint_signature(m, order) == exhaustive_signature(m, order)
        done += 1
