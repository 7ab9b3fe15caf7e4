"""Monotone structure functions over named components.

Structures are immutable expression trees built from :class:`Atom`,
:class:`And`, :class:`Or` and :class:`KofN`.  The grammar has no negation and
no constants, so every tree is monotone by construction.  An explicit
:class:`TruthTable` is also accepted, but must pass :func:`verify_coherent`
before it is used anywhere.

Bit conventions: wherever a state is packed into an integer mask, bit ``i``
is the state of ``components[i]`` for the component order in use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    BoundaryViolation,
    ModelError,
    NonMonotone,
    TooLarge,
    UnassignedComponent,
)

#: Hard limit on the number of components for exhaustive truth-table work.
MAX_TABLE_COMPONENTS = 20

_TOKEN = re.compile(r"^[A-Za-z0-9_]+$")


def _check_name(name):
    if not isinstance(name, str) or not _TOKEN.match(name):
        raise ModelError(f"invalid component name {name!r}")


class _Node:
    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))


@dataclass(frozen=True)
class Atom(_Node):
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True)
class And(_Node):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ModelError("And needs at least two children")


@dataclass(frozen=True)
class Or(_Node):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ModelError("Or needs at least two children")


@dataclass(frozen=True)
class KofN(_Node):
    k: int
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not isinstance(self.k, int) or self.k < 1:
            raise ModelError(f"k must be a positive integer, got {self.k!r}")
        if len(self.children) < self.k:
            raise ModelError(f"{self.k}-of-n node has only {len(self.children)} children")


@dataclass(frozen=True)
class TruthTable:
    """Explicit structure function; ``outputs[mask]`` is phi of that state."""

    components: tuple
    outputs: bytes

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        for c in comps:
            _check_name(c)
        if len(set(comps)) != len(comps):
            raise ModelError("duplicate component in truth table")
        if len(comps) > MAX_TABLE_COMPONENTS:
            raise TooLarge(f"truth tables are limited to {MAX_TABLE_COMPONENTS} components")
        out = bytes(1 if v else 0 for v in self.outputs)
        if len(out) != 1 << len(comps):
            raise ModelError(
                f"truth table on {len(comps)} components needs {1 << len(comps)} outputs, got {len(out)}"
            )
        object.__setattr__(self, "outputs", out)

    @classmethod
    def from_function(cls, components, func):
        comps = tuple(components)
        outs = bytes(
            1 if func({c: bool(m >> i & 1) for i, c in enumerate(comps)}) else 0
            for m in range(1 << len(comps))
        )
        return cls(comps, outs)


Structure = Union[Atom, And, Or, KofN, TruthTable]


def components(structure: Structure) -> tuple[str, ...]:
    """Component names in order of first appearance."""
    seen: dict[str, None] = {}

    def walk(node):
        if isinstance(node, Atom):
            seen.setdefault(node.name)
        elif isinstance(node, TruthTable):
            for c in node.components:
                seen.setdefault(c)
        else:
            for ch in node.children:
                walk(ch)

    walk(structure)
    return tuple(seen)


def evaluate(structure: Structure, state: Mapping[str, bool]) -> bool:
    """Return phi(state).  Components absent from the structure are ignored."""
    if isinstance(structure, Atom):
        try:
            return bool(state[structure.name])
        except KeyError:
            raise UnassignedComponent(structure.name) from None
    if isinstance(structure, And):
        return all([evaluate(c, state) for c in structure.children])
    if isinstance(structure, Or):
        return any([evaluate(c, state) for c in structure.children])
    if isinstance(structure, KofN):
        return sum(evaluate(c, state) for c in structure.children) >= structure.k
    if isinstance(structure, TruthTable):
        mask = 0
        for i, c in enumerate(structure.components):
            try:
                if state[c]:
                    mask |= 1 << i
            except KeyError:
                raise UnassignedComponent(c) from None
        return bool(structure.outputs[mask])
    raise TypeError(f"not a structure: {structure!r}")


def truth_table(structure: Structure, order: Sequence[str] | None = None) -> np.ndarray:
    """Vectorised phi over all ``2**n`` states of ``order`` (uint8 array).

    ``order`` defaults to :func:`components`; it may contain extra
    (irrelevant) components but must cover every atom.
    """
    order = tuple(components(structure) if order is None else order)
    n = len(order)
    if n > MAX_TABLE_COMPONENTS:
        raise TooLarge(f"{n} components exceed the truth-table limit of {MAX_TABLE_COMPONENTS}")
    pos = {c: i for i, c in enumerate(order)}
    states = np.arange(1 << n, dtype=np.int64)

    def bit(name):
        try:
            return (states >> pos[name]) & 1
        except KeyError:
            raise UnassignedComponent(name) from None

    def walk(node):
        if isinstance(node, Atom):
            return bit(node.name).astype(np.int16)
        if isinstance(node, TruthTable):
            idx = np.zeros_like(states)
            for i, c in enumerate(node.components):
                idx |= bit(c) << i
            return np.frombuffer(node.outputs, dtype=np.uint8)[idx].astype(np.int16)
        vals = [walk(c) for c in node.children]
        if isinstance(node, And):
            return np.minimum.reduce(vals)
        if isinstance(node, Or):
            return np.maximum.reduce(vals)
        return (np.add.reduce(vals) >= node.k).astype(np.int16)

    return walk(structure).astype(np.uint8)


@dataclass(frozen=True)
class CoherenceReport:
    n_components: int
    monotone: bool
    fails_when_all_fail: bool
    functions_when_all_function: bool

    @property
    def passed(self):
        return self.monotone and self.fails_when_all_fail and self.functions_when_all_function


def verify_coherent(structure: Structure) -> CoherenceReport:
    """Check monotonicity and the boundary values phi(0)=0, phi(1)=1.

    Raises :class:`NonMonotone` with a witness pair, or
    :class:`BoundaryViolation`.
    """
    comps = components(structure)
    if isinstance(structure, TruthTable):
        tt = np.frombuffer(structure.outputs, dtype=np.uint8)
        masks = np.arange(tt.size, dtype=np.int64)
        for i in range(len(comps)):
            lo = masks[(masks >> i & 1) == 0]
            bad = lo[tt[lo] > tt[lo | (1 << i)]]
            if bad.size:
                m = int(bad[0])
                lower = [c for j, c in enumerate(comps) if m >> j & 1]
                raise NonMonotone(lower, lower + [comps[i]])
    if evaluate(structure, dict.fromkeys(comps, False)):
        raise BoundaryViolation("system functions with every component failed")
    if not evaluate(structure, dict.fromkeys(comps, True)):
        raise BoundaryViolation("system fails with every component functioning")
    return CoherenceReport(len(comps), True, True, True)


def minimal_path_sets(structure: Structure) -> set[frozenset[str]]:
    comps = components(structure)
    tt = truth_table(structure, comps)
    masks = np.arange(tt.size, dtype=np.int64)
    minimal = tt.astype(bool)
    # for a monotone phi, a path set is minimal iff no single removal keeps it a path set
    for i in range(len(comps)):
        has = (masks >> i & 1) == 1
        minimal &= ~(has & (tt[masks & ~(1 << i)] == 1))
    return {
        frozenset(c for j, c in enumerate(comps) if m >> j & 1)
        for m in masks[minimal].tolist()
    }


def series(*names: str) -> Structure:
    atoms = [Atom(n) for n in names]
    return atoms[0] if len(atoms) == 1 else And(atoms)


def parallel(*names: str) -> Structure:
    atoms = [Atom(n) for n in names]
    return atoms[0] if len(atoms) == 1 else Or(atoms)


def from_dict(obj) -> Structure:
    """Parse the nested-object serialisation used in model files."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ModelError(f"structure node must be an object with exactly one key, got {obj!r}")
    (key, val), = obj.items()
    if key == "atom":
        return Atom(val)
    if key in ("and", "or"):
        if not isinstance(val, list):
            raise ModelError(f"{key!r} expects a list of nodes")
        kids = [from_dict(v) for v in val]
        return And(kids) if key == "and" else Or(kids)
    if key == "k_of_n":
        if not isinstance(val, dict) or set(val) != {"k", "of"}:
            raise ModelError("'k_of_n' expects an object with keys 'k' and 'of'")
        return KofN(val["k"], [from_dict(v) for v in val["of"]])
    if key == "truth_table":
        if not isinstance(val, dict) or set(val) != {"components", "outputs"}:
            raise ModelError("'truth_table' expects an object with keys 'components' and 'outputs'")
        outs = val["outputs"]
        if isinstance(outs, str):
            outs = [ch == "1" for ch in outs]
        return TruthTable(val["components"], bytes(bool(o) for o in outs))
    raise ModelError(f"unknown structure node {key!r}")


def to_dict(structure: Structure) -> dict:
    if isinstance(structure, Atom):
        return {"atom": structure.name}
    if isinstance(structure, And):
        return {"and": [to_dict(c) for c in structure.children]}
    if isinstance(structure, Or):
        return {"or": [to_dict(c) for c in structure.children]}
    if isinstance(structure, KofN):
        return {"k_of_n": {"k": structure.k, "of": [to_dict(c) for c in structure.children]}}
    return {
        "truth_table": {
            "components": list(structure.components),
            "outputs": "".join(str(b) for b in structure.outputs),
        }
    }


def to_text(structure: Structure) -> str:
    if isinstance(structure, Atom):
        return structure.name
    if isinstance(structure, TruthTable):
        return f"table({','.join(structure.components)})"
    inner = [to_text(c) for c in structure.children]
    if isinstance(structure, KofN):
        return f"{structure.k}of({', '.join(inner)})"
    sep = " & " if isinstance(structure, And) else " | "
    return "(" + sep.join(inner) + ")"


def iter_states(names: Iterable[str]):
    names = tuple(names)
    for m in range(1 << len(names)):
        yield {c: bool(m >> i & 1) for i, c in enumerate(names)}
