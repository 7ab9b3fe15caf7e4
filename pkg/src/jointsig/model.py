"""Shared-component models of two or three systems.

A component belongs to the sharing group of exactly those systems whose
structures reference it.  Groups are kept per component type, in a fixed
canonical order, and every group is present even when empty so that level
vectors have a fixed length:

* two systems, per type: ``1, 2, 12``  -> levels ``(l1, l2, l[1]2, l1[2])``
* three systems, per type: ``1, 2, 3, 12, 13, 23, 123`` -> twelve levels

Levels of a shared group are listed per member system in system order.  For
several types the per-type blocks are concatenated in type order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .errors import (
    DuplicateSystemName,
    UnknownComponent,
    UnknownSystem,
    UnknownType,
    WrongArity,
)
from .structure import Structure, components, verify_coherent

GROUPS = {
    1: ((0,),),
    2: ((0,), (1,), (0, 1)),
    3: ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)),
}


def group_label(members: Sequence[int]) -> str:
    return "".join(str(m + 1) for m in members)


def level_name(members: Sequence[int], system: int) -> str:
    """Level coordinate name, e.g. ``l1``, ``l[1]2``, ``l1[2]3``."""
    if len(members) == 1:
        return f"l{members[0] + 1}"
    return "l" + "".join(f"[{m + 1}]" if m == system else str(m + 1) for m in members)


@dataclass(frozen=True)
class Group:
    type: str
    members: tuple[int, ...]
    components: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def label(self) -> str:
        return group_label(self.members)


@dataclass(frozen=True)
class Layout:
    """Coordinate map of a level vector.

    ``coords[j] = (g, s)``: coordinate ``j`` counts the functioning members
    of ``groups[g]`` at the time system ``s`` is considered.
    """

    n_systems: int
    types: tuple[str, ...]
    groups: tuple[Group, ...]
    coords: tuple[tuple[int, int], ...]

    @property
    def names(self) -> tuple[str, ...]:
        multi = len(self.types) > 1
        out = []
        for g, s in self.coords:
            grp = self.groups[g]
            name = level_name(grp.members, s)
            out.append(f"{grp.type}:{name}" if multi else name)
        return tuple(out)

    @property
    def maxima(self) -> tuple[int, ...]:
        return tuple(self.groups[g].size for g, _ in self.coords)

    def coords_of_group(self, g: int) -> list[int]:
        return [j for j, (gg, _) in enumerate(self.coords) if gg == g]


@dataclass(frozen=True)
class GroupCounts:
    """Per-type sizes of the sharing groups, keyed by labels like ``"12"``."""

    n_systems: int
    counts: tuple[tuple[str, tuple[tuple[str, int], ...]], ...]

    def of(self, type_name: str) -> dict[str, int]:
        for t, c in self.counts:
            if t == type_name:
                return dict(c)
        raise UnknownType(type_name)

    def as_dict(self) -> dict[str, dict[str, int]]:
        return {t: dict(c) for t, c in self.counts}

    def vector(self, type_name: str) -> tuple[int, ...]:
        d = self.of(type_name)
        return tuple(d[group_label(m)] for m in GROUPS[self.n_systems])

    def system_size(self, type_name: str, system: int) -> int:
        """Number of type components used by ``system`` (n*_i)."""
        d = self.of(type_name)
        return sum(d[group_label(m)] for m in GROUPS[self.n_systems] if system in m)


@dataclass(frozen=True)
class SharedModel:
    systems: tuple[tuple[str, Structure], ...]
    components: tuple[tuple[str, str], ...]
    types: tuple[str, ...]
    unused: tuple[str, ...] = field(default=())

    @property
    def n_systems(self) -> int:
        return len(self.systems)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.systems)

    @cached_property
    def type_of(self) -> dict[str, str]:
        return dict(self.components)

    def system_index(self, system) -> int:
        if isinstance(system, int):
            if 0 <= system < self.n_systems:
                return system
            raise UnknownSystem(f"no system with index {system}")
        try:
            return self.names.index(system)
        except ValueError:
            raise UnknownSystem(f"unknown system {system!r}") from None

    def structure(self, system) -> Structure:
        return self.systems[self.system_index(system)][1]

    def system_components(self, system) -> tuple[str, ...]:
        return components(self.structure(system))

    @cached_property
    def membership(self) -> dict[str, tuple[int, ...]]:
        used = [set(components(s)) for _, s in self.systems]
        out = {}
        for c, _ in self.components:
            members = tuple(i for i, u in enumerate(used) if c in u)
            if members:
                out[c] = members
        return out

    @cached_property
    def layout(self) -> Layout:
        groups = []
        coords = []
        for t in self.types:
            for members in GROUPS[self.n_systems]:
                comps = tuple(
                    c for c, ty in self.components
                    if ty == t and self.membership.get(c) == members
                )
                g = len(groups)
                groups.append(Group(t, members, comps))
                coords.extend((g, s) for s in members)
        return Layout(self.n_systems, self.types, tuple(groups), tuple(coords))

    @property
    def groups(self) -> tuple[Group, ...]:
        return self.layout.groups

    @property
    def independent(self) -> bool:
        return all(g.size == 0 for g in self.groups if len(g.members) > 1)

    def restrict(self, systems: Sequence) -> SharedModel:
        """Sub-model on a subset of the systems (in the given order)."""
        idx = [self.system_index(s) for s in systems]
        return build_model(
            [self.systems[i] for i in idx], self.type_of, self.types
        )


def build_model(
    systems: Sequence[tuple[str, Structure]],
    typing: Mapping[str, str],
    types: Sequence[str] | None = None,
) -> SharedModel:
    """Validate 2 or 3 systems and their component typing.

    ``typing`` maps every component id to its type name.  Declared
    components that no structure references are kept in ``unused`` and take
    no part in any group.
    """
    systems = tuple((str(n), s) for n, s in systems)
    if len(systems) not in (2, 3):
        raise WrongArity(f"a shared model needs 2 or 3 systems, got {len(systems)}")
    names = [n for n, _ in systems]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise DuplicateSystemName(f"duplicate system name(s): {', '.join(sorted(dup))}")
    if types is None:
        types = tuple(dict.fromkeys(typing.values()))
    types = tuple(types)
    for c, t in typing.items():
        if t not in types:
            raise UnknownType(f"component {c!r} has undeclared type {t!r}")
    used: dict[str, None] = {}
    for name, s in systems:
        verify_coherent(s)
        for c in components(s):
            if c not in typing:
                raise UnknownComponent(f"system {name!r} references undeclared component {c!r}")
            used.setdefault(c)
    comps = tuple((c, typing[c]) for c in typing)
    unused = tuple(c for c in typing if c not in used)
    model = SharedModel(systems, comps, types, unused)
    _check_counts(model)
    return model


def group_counts(model: SharedModel) -> GroupCounts:
    per_type = []
    for t in model.types:
        per_type.append(
            (t, tuple((g.label, g.size) for g in model.groups if g.type == t))
        )
    return GroupCounts(model.n_systems, tuple(per_type))


def _check_counts(model: SharedModel) -> None:
    gc = group_counts(model)
    for t in model.types:
        total = sum(1 for c, ty in model.components if ty == t and c in model.membership)
        assert sum(gc.of(t).values()) == total
        for s in range(model.n_systems):
            used = sum(
                1 for c in model.system_components(s) if model.type_of[c] == t
            )
            assert gc.system_size(t, s) == used
