import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from conftest import EX1_LISTING, EX2_ROWS
from modelgen import random_model

from jointsig import (
    EARLIER,
    LATER,
    SAME,
    Event,
    Order,
    build_model,
    errors,
    exhaustive_signature,
    joint_signature,
    joint_signature_three,
    joint_signature_two,
    joint_signature_two_multitype,
    signature_bounds,
    survival_signature_single,
    system_signature,
    variant_signature,
)
from jointsig.signature import chain_count
from jointsig.structure import And, Atom, Or, evaluate, series
from test_structure import BRIDGE


def test_order_parsing():
    assert Order.parse("earlier") == EARLIER
    assert Order.parse("1<2") == EARLIER
    assert Order.parse("2<1") == LATER
    assert Order.parse("1=2") == SAME
    assert Order.parse("2<1=3").ranks == (1, 0, 1)
    assert Order.from_times([0.5, 0.1, 0.5]).label == "2<1=3"
    assert EARLIER.name == "earlier"
    with pytest.raises(ValueError):
        Order.parse("1<1")
    with pytest.raises(errors.WrongArity):
        Order.parse("1<2", 3)


def test_weak_order_counts():
    assert len(Order.all(2)) == 3
    assert len(Order.all(3)) == 13


def test_example1_cell(ex1):
    table = joint_signature_two(ex1.model(), EARLIER)
    assert table[(1, 1, 2, 1)] == Fraction(10, 24)
    assert table.counts((1, 1, 2, 1)) == (10, 24)


def test_example1_listing_matches_structures(ex1):
    m = ex1.model()
    comps = [c for c, _ in m.components]
    rows = set()
    for flag, a, b, shared1, shared2 in EX1_LISTING:
        alive1 = {a, *shared1}
        alive2 = {b, *shared2}
        s1 = evaluate(m.structure(0), {c: c in alive1 for c in comps})
        s2 = evaluate(m.structure(1), {c: c in alive2 for c in comps})
        assert int(s1 and s2) == flag
        rows.add((a, b, shared1, shared2))
    assert len(rows) == 24


def test_example2_rows(ex2):
    m = ex2.model()
    tables = [joint_signature(m, o) for o in Order.all(2)]
    for cell, expected in EX2_ROWS.items():
        found = [t[cell] for t in tables if cell in t]
        assert found and all(v == expected for v in found), cell


def test_example2_trivial_cells_vanish(ex2):
    for order in Order.all(2):
        for cell, v in joint_signature(ex2.model(), order):
            if cell[2] == 0 or cell[3] == 0:
                assert v == 0


def test_feasibility_by_order(ex1):
    m = ex1.model()
    early = joint_signature(m, EARLIER).levels
    assert (early[:, 2] >= early[:, 3]).all()
    late = joint_signature(m, LATER).levels
    assert (late[:, 2] <= late[:, 3]).all()
    same = joint_signature(m, SAME).levels
    assert (same[:, 2] == same[:, 3]).all()
    assert len(early) == 3 * 3 * 10 and len(same) == 3 * 3 * 4


def test_denominators_are_chain_counts(ex1):
    table = joint_signature(ex1.model(), EARLIER)
    for (l1, l2, a, b), tot in zip(table.levels.tolist(), table.total):
        assert tot == math.comb(2, l1) * math.comb(2, l2) * chain_count(3, [a, b])
    assert chain_count(3, [2, 1]) == 6


def test_three_system_denominators(ex4):
    table = joint_signature_three(ex4.model(), "1<2<3")
    assert all(t == 1 for t in table.total)


def test_bridge_signature():
    table = survival_signature_single(BRIDGE)
    assert [table[(l,)] for l in range(6)] == [0, 0, Fraction(1, 5), Fraction(4, 5), 1, 1]


def test_single_signature_by_type():
    s = series("A", "B")
    table = survival_signature_single(s, {"A": "X", "B": "Y"})
    assert table.names == ("l[X]", "l[Y]")
    assert table[(1, 1)] == 1 and table[(1, 0)] == 0


def test_system_signature_grouped(ex2):
    m = ex2.model()
    grouped = system_signature(m, "S1")
    assert grouped.names == ("l1", "l12")
    assert grouped[(0, 1)] == Fraction(1, 2)
    assert grouped[(1, 1)] == 1
    flat = system_signature(m, "S1", grouped=False)
    assert flat[(1,)] == Fraction(1, 3)
    assert flat[(2,)] == 1


def test_event_decomposition(ex1):
    m = ex1.model()
    for order in Order.all(2):
        parts = [joint_signature(m, order, e) for e in
                 (Event.BOTH_FUNCTION, Event.S1_FUNCTIONS_S2_FAILS, Event.S2_FUNCTIONS_S1_FAILS, Event.NEITHER)]
        for i in range(len(parts[0])):
            assert sum(p.favourable[i] for p in parts) == parts[0].total[i]
        s1 = joint_signature(m, order, Event.S1_ONLY)
        assert all(a + b == c for a, b, c in zip(parts[0].favourable, parts[1].favourable, s1.favourable))


def test_marginal_reduction(ex1):
    # with system 2 unconstrained the table is the grouped single signature of system 1
    m = ex1.model()
    single = system_signature(m, 0)
    for order in Order.all(2):
        for (l1, l2, a, b), v in joint_signature(m, order, Event.S1_ONLY):
            assert v == single[(l1, a)]


def test_independent_product():
    m = build_model([("S1", Or([Atom("A"), Atom("B")])), ("S2", series("C", "D"))], dict.fromkeys("ABCD", "T"))
    table = joint_signature(m, EARLIER)
    s1 = survival_signature_single(m.structure(0))
    s2 = survival_signature_single(m.structure(1))
    for (l1, l2, _, _), v in table:
        assert v == s1[(l1,)] * s2[(l2,)]


def test_monotone_in_every_level(ex1, ex4):
    for model in (ex1.model(), ex4.model()):
        for order in Order.all(model.n_systems):
            table = joint_signature(model, order)
            vals = table.as_dict()
            for cell, v in vals.items():
                for j in range(len(cell)):
                    up = cell[:j] + (cell[j] + 1,) + cell[j + 1:]
                    if up in vals:
                        assert vals[up] >= v


def test_variant_is_s1_not_s2(ex2):
    m = ex2.model()
    t = variant_signature(m, SAME, Event.S1_FUNCTIONS_S2_FAILS)
    # C alive, D failed, one of A and B alive: S1 works and S2 fails either way
    assert t[(1, 0, 1, 1)] == 1
    # C and D failed: S1 needs B, and then S2 lacks both A and D
    assert t[(0, 0, 1, 1)] == Fraction(1, 2)


def test_multitype_matches_oracle():
    s1 = Or([And([Atom("A"), Atom("B")]), Atom("C")])
    s2 = And([Atom("B"), Or([Atom("C"), Atom("D")])])
    m = build_model([("S1", s1), ("S2", s2)], {"A": "X", "B": "Y", "C": "X", "D": "Y"})
    for order in Order.all(2):
        assert joint_signature_two_multitype(m, order) == exhaustive_signature(m, order)
    with pytest.raises(errors.ModelError):
        joint_signature_two(m, EARLIER)


@pytest.mark.parametrize("seed", range(8))
def test_random_models_match_oracle(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 2
    m = random_model(rng, n, 7)
    for order in Order.all(n):
        for event in (Event.BOTH_FUNCTION, Event.S1_FUNCTIONS_S2_FAILS, Event.NEITHER):
            assert joint_signature(m, order, event) == exhaustive_signature(m, order, event)


def test_budget():
    with pytest.raises(errors.TooLarge):
        joint_signature(build_model(
            [("S1", series("A", "B")), ("S2", series("B", "C"))], dict.fromkeys("ABC", "T")
        ), SAME, Event.BOTH_FUNCTION, 3)


def test_wrong_arity(ex4):
    with pytest.raises(errors.WrongArity):
        joint_signature_two(ex4.model(), EARLIER)
    with pytest.raises(errors.WrongArity):
        joint_signature(ex4.model(), EARLIER)


def test_infeasible_lookup(ex2):
    table = joint_signature(ex2.model(), EARLIER)
    with pytest.raises(errors.InfeasibleQuery):
        table[(0, 0, 1, 2)]


def test_bounds(ex1):
    table = joint_signature(ex1.model(), EARLIER)
    cells = table.levels.tolist()
    keep = np.array([i % 3 == 0 for i in range(len(cells))])
    partial = table.subset(keep)
    for cell in itertools.compress(cells, ~keep):
        lo, hi = signature_bounds(partial, cell)
        assert lo <= table[cell] <= hi
    with pytest.raises(errors.InfeasibleQuery):
        signature_bounds(partial, (0, 0, 1, 2))
    with pytest.raises(ValueError):
        signature_bounds(joint_signature(ex1.model(), EARLIER, Event.NEITHER), (0, 0, 1, 1))


def test_bounds_without_evidence(ex2):
    empty = joint_signature(ex2.model(), SAME).subset(np.zeros(12, bool))
    assert signature_bounds(empty, (1, 1, 1, 1)) == (0, 1)
