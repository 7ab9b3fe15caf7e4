import pytest

from jointsig import build_model, errors, group_counts
from jointsig.model import level_name
from jointsig.structure import And, Atom, Or, series

S1 = Or([Atom("B"), And([Atom("A"), Atom("C")])])
S2 = And([Atom("B"), Or([Atom("A"), Atom("D")])])


def typing(names, t="T"):
    return {c: t for c in names}


def test_two_system_counts():
    m = build_model([("S1", S1), ("S2", S2)], typing("ABCD"))
    assert group_counts(m).of("T") == {"1": 1, "2": 1, "12": 2}
    assert m.layout.names == ("l1", "l2", "l[1]2", "l1[2]")
    assert m.layout.maxima == (1, 1, 2, 2)
    assert not m.independent


def test_three_system_counts(ex4):
    gc = group_counts(ex4.model())
    assert gc.vector("T") == (0, 0, 1, 1, 1, 1, 1)
    assert gc.system_size("T", 2) == 4


def test_example1_counts(ex1):
    m = ex1.model()
    assert group_counts(m).vector("T") == (2, 2, 3)
    assert group_counts(m).system_size("T", 0) == 5


def test_level_names():
    assert level_name((0, 1, 2), 1) == "l1[2]3"
    assert level_name((2,), 2) == "l3"


def test_multitype_layout():
    m = build_model([("S1", S1), ("S2", S2)], {"A": "X", "B": "Y", "C": "X", "D": "Y"}, ["X", "Y"])
    assert m.layout.names[:4] == ("X:l1", "X:l2", "X:l[1]2", "X:l1[2]")
    assert group_counts(m).as_dict() == {"X": {"1": 1, "2": 0, "12": 1}, "Y": {"1": 0, "2": 1, "12": 1}}


def test_unused_components_are_kept_aside():
    m = build_model([("S1", S1), ("S2", S2)], typing("ABCDZ"))
    assert m.unused == ("Z",)
    assert "Z" not in m.membership
    assert sum(g.size for g in m.groups) == 4


def test_independent_systems():
    m = build_model([("S1", series("A", "B")), ("S2", Atom("C"))], typing("ABC"))
    assert m.independent


@pytest.mark.parametrize(
    "systems, types, exc",
    [
        ([("S1", S1), ("S2", S2)], typing("ABC"), errors.UnknownComponent),
        ([("S1", S1), ("S1", S2)], typing("ABCD"), errors.DuplicateSystemName),
        ([("S1", S1)], typing("ABCD"), errors.WrongArity),
        ([("S1", S1)] * 4, typing("ABCD"), errors.WrongArity),
    ],
)
def test_invalid_models(systems, types, exc):
    with pytest.raises(exc):
        build_model(systems, types)


def test_undeclared_type():
    with pytest.raises(errors.UnknownType):
        build_model([("S1", S1), ("S2", S2)], typing("ABCD"), ["U"])


def test_system_lookup():
    m = build_model([("S1", S1), ("S2", S2)], typing("ABCD"))
    assert m.system_index("S2") == 1
    assert m.structure(0) == S1
    with pytest.raises(errors.UnknownSystem):
        m.system_index("S9")
    with pytest.raises(errors.UnknownSystem):
        m.system_index(5)


def test_restrict(ex4):
    m = ex4.model().restrict(["S3", "S1"])
    assert m.names == ("S3", "S1")
    assert group_counts(m).vector("T") == (2, 1, 2)
