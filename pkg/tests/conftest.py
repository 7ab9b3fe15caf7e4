import sys
from fractions import Fraction
from pathlib import Path

import pytest

from jointsig import io

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))

# (l1, l2, l[1]2, l1[2]) -> value, the nontrivial cells of the second example
EX2_ROWS = {
    (0, 1, 1, 1): Fraction(1, 2),
    (1, 0, 1, 1): Fraction(0),
    (1, 1, 1, 1): Fraction(1, 2),
    (0, 0, 1, 1): Fraction(0),
    (0, 0, 2, 1): Fraction(0),
    (0, 1, 2, 1): Fraction(1, 2),
    (1, 0, 2, 1): Fraction(0),
    (1, 1, 2, 1): Fraction(1, 2),
    (0, 0, 1, 2): Fraction(1, 2),
    (0, 1, 1, 2): Fraction(1, 2),
    (1, 0, 1, 2): Fraction(1),
    (1, 1, 1, 2): Fraction(1),
    (1, 1, 2, 2): Fraction(1),
}

# functioning flag, own S1, own S2, alive shared at t1, alive shared at t2
EX1_LISTING = [
    (0, "D", "F", "AB", "A"), (0, "D", "F", "AB", "B"), (0, "D", "G", "AB", "A"), (0, "D", "G", "AB", "B"),
    (0, "D", "F", "AC", "A"), (1, "D", "F", "AC", "C"), (1, "D", "G", "AC", "A"), (0, "D", "G", "AC", "C"),
    (1, "D", "F", "BC", "B"), (1, "D", "F", "BC", "C"), (0, "D", "G", "BC", "B"), (0, "D", "G", "BC", "C"),
    (0, "E", "F", "AB", "A"), (1, "E", "F", "AB", "B"), (1, "E", "G", "AB", "A"), (0, "E", "G", "AB", "B"),
    (0, "E", "F", "AC", "A"), (1, "E", "F", "AC", "C"), (1, "E", "G", "AC", "A"), (0, "E", "G", "AC", "C"),
    (1, "E", "F", "BC", "B"), (1, "E", "F", "BC", "C"), (0, "E", "G", "BC", "B"), (0, "E", "G", "BC", "C"),
]


def load(name):
    return io.load_model(DATA / f"{name}.json")


@pytest.fixture(scope="session")
def ex1():
    return load("example1")


@pytest.fixture(scope="session")
def ex2():
    return load("example2")


@pytest.fixture(scope="session")
def ex4():
    return load("example4")
