"""Exact survival signatures of single and jointly considered systems.

A joint table cell fixes, for every sharing group, how many of its
components function at the time each member system is considered.  Within a
group the functioning sets form a chain that shrinks with time, so a cell is
*feasible* only if the levels are nonincreasing along the time order of the
member systems (and equal for tied times).  Every labelled configuration
consistent with a feasible cell is equally likely; the cell value is the
fraction of those configurations in which the requested event holds.

Computation factorises over systems.  For each system we tabulate, from its
own truth table, how many subsets of its exclusive components satisfy the
event requirement given the states of its shared components.  The shared
components are then enumerated once (each one picks the interval in which
it fails) and the per-system counts are multiplied into the matching cell.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import InfeasibleQuery, ModelError, TooLarge, WrongArity
from .model import Layout, SharedModel, group_label
from .structure import MAX_TABLE_COMPONENTS, Structure, components, truth_table

#: Default limit on indicator evaluations per table.
DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Order:
    """Weak ordering of the times at which the systems are considered.

    ``ranks[i]`` is the dense rank of system ``i``'s time; equal ranks mean
    equal times.
    """

    ranks: tuple[int, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        dense = {r: i for i, r in enumerate(sorted(set(ranks)))}
        object.__setattr__(self, "ranks", tuple(dense[r] for r in ranks))

    @property
    def n_systems(self) -> int:
        return len(self.ranks)

    @property
    def label(self) -> str:
        parts = []
        for r in sorted(set(self.ranks)):
            parts.append("=".join(str(i + 1) for i, rr in enumerate(self.ranks) if rr == r))
        return "<".join(parts)

    @property
    def name(self) -> str:
        return _TWO_NAMES.get(self.ranks, self.label)

    def __str__(self):
        return self.label

    @classmethod
    def from_times(cls, times: Sequence[float]) -> Order:
        distinct = sorted(set(times))
        return cls(tuple(distinct.index(t) for t in times))

    @classmethod
    def parse(cls, text: str | Order, n_systems: int | None = None) -> Order:
        if isinstance(text, Order):
            order = text
        else:
            key = text.strip().lower()
            if key in _TWO_ALIASES:
                order = _TWO_ALIASES[key]
            else:
                order = cls._parse_chain(text)
        if n_systems is not None and order.n_systems != n_systems:
            raise WrongArity(f"order {order.label!r} is for {order.n_systems} systems, not {n_systems}")
        return order

    @classmethod
    def _parse_chain(cls, text: str) -> Order:
        ranks: dict[int, int] = {}
        for r, block in enumerate(text.replace(" ", "").split("<")):
            for tok in block.split("="):
                if not tok.isdigit() or int(tok) < 1 or int(tok) in ranks:
                    raise ValueError(f"cannot parse time order {text!r}")
                ranks[int(tok)] = r
        n = len(ranks)
        if sorted(ranks) != list(range(1, n + 1)) or n not in (2, 3):
            raise ValueError(f"time order {text!r} must mention systems 1..n once (n = 2 or 3)")
        return cls(tuple(ranks[i] for i in range(1, n + 1)))

    @classmethod
    def all(cls, n_systems: int) -> list[Order]:
        """Every weak ordering of ``n_systems`` times (3 or 13)."""
        seen = {cls(r) for r in itertools.product(range(n_systems), repeat=n_systems)}
        return sorted(seen, key=lambda o: (len(set(o.ranks)), o.ranks))


EARLIER = Order((0, 1))
SAME = Order((0, 0))
LATER = Order((1, 0))
_TWO_NAMES = {EARLIER.ranks: "earlier", SAME.ranks: "same", LATER.ranks: "later"}
_TWO_ALIASES = {"earlier": EARLIER, "same": SAME, "later": LATER}


class Event(Enum):
    """Which joint system event a table measures.

    Requirements per system: 1 = functions, 0 = fails, None = unconstrained.
    Systems beyond those named are unconstrained.
    """

    BOTH_FUNCTION = "both"
    S1_FUNCTIONS_S2_FAILS = "s1not2"
    S2_FUNCTIONS_S1_FAILS = "s2not1"
    S1_ONLY = "s1only"
    S2_ONLY = "s2only"
    NEITHER = "neither"
    ALL_THREE_FUNCTION = "all"
    SINGLE_SYSTEM = "single"

    def requirements(self, n_systems: int) -> tuple:
        base = _REQUIREMENTS[self]
        if self is Event.ALL_THREE_FUNCTION and n_systems != 3:
            raise WrongArity("ALL_THREE_FUNCTION needs three systems")
        return base + (None,) * (n_systems - len(base))

    @property
    def monotone(self) -> bool:
        """Nondecreasing in every level (event only asks systems to function)."""
        return 0 not in _REQUIREMENTS[self]


_REQUIREMENTS = {
    Event.BOTH_FUNCTION: (1, 1),
    Event.S1_FUNCTIONS_S2_FAILS: (1, 0),
    Event.S2_FUNCTIONS_S1_FAILS: (0, 1),
    Event.S1_ONLY: (1, None),
    Event.S2_ONLY: (None, 1),
    Event.NEITHER: (0, 0),
    Event.ALL_THREE_FUNCTION: (1, 1, 1),
    Event.SINGLE_SYSTEM: (1,),
}


def feasible_mask(layout: Layout, order: Order, levels: np.ndarray) -> np.ndarray:
    """Row mask of level vectors consistent with the time order."""
    levels = np.atleast_2d(np.asarray(levels, dtype=np.int64))
    ok = np.ones(levels.shape[0], bool)
    for g, grp in enumerate(layout.groups):
        cols = layout.coords_of_group(g)
        for j in cols:
            ok &= (levels[:, j] >= 0) & (levels[:, j] <= grp.size)
        by_time = sorted(cols, key=lambda j: order.ranks[layout.coords[j][1]])
        for a, b in zip(by_time, by_time[1:]):
            ra = order.ranks[layout.coords[a][1]]
            rb = order.ranks[layout.coords[b][1]]
            if ra == rb:
                ok &= levels[:, a] == levels[:, b]
            else:
                ok &= levels[:, a] >= levels[:, b]
    return ok


def chain_count(n: int, levels_by_time: Sequence[int]) -> int:
    """Number of nested subset chains of the given sizes within ``n`` items."""
    out = 1
    prev = n
    for lv in levels_by_time:
        out *= math.comb(prev, lv)
        prev = lv
    return out


class SignatureTable:
    """Exact signature values on the feasible cells of a level lattice.

    Rows are stored in mixed-radix (lexicographic) order of the level vector.
    Each value is ``favourable / total`` with both counts exact integers.
    """

    def __init__(self, event, order, names, levels, favourable, total, layout=None, maxima=None):
        self.event = event
        self.order = order
        self.names = tuple(names)
        self.levels = np.asarray(levels, dtype=np.int64).reshape(-1, len(self.names))
        self.favourable = tuple(int(f) for f in favourable)
        self.total = tuple(int(t) for t in total)
        self.layout = layout
        if maxima is None:
            maxima = layout.maxima if layout is not None else self.levels.max(axis=0, initial=0)
        self.maxima = tuple(int(m) for m in maxima)
        self._index = {tuple(r): i for i, r in enumerate(self.levels.tolist())}
        if len(self._index) != len(self.favourable) or len(self.total) != len(self.favourable):
            raise ValueError("inconsistent table rows")

    def __len__(self):
        return len(self.favourable)

    def __iter__(self):
        for i, row in enumerate(self.levels.tolist()):
            yield tuple(row), Fraction(self.favourable[i], self.total[i])

    def __contains__(self, levels):
        return tuple(levels) in self._index

    def __getitem__(self, levels) -> Fraction:
        return self.value(levels)

    def value(self, levels) -> Fraction:
        try:
            i = self._index[tuple(int(v) for v in levels)]
        except KeyError:
            raise InfeasibleQuery(f"cell {tuple(levels)} is not in the table") from None
        return Fraction(self.favourable[i], self.total[i])

    def counts(self, levels) -> tuple[int, int]:
        i = self._index[tuple(int(v) for v in levels)]
        return self.favourable[i], self.total[i]

    @property
    def values(self) -> np.ndarray:
        return np.array([f / t for f, t in zip(self.favourable, self.total)], dtype=float)

    def as_dict(self) -> dict[tuple[int, ...], Fraction]:
        return dict(iter(self))

    def is_feasible(self, levels) -> bool:
        levels = tuple(int(v) for v in levels)
        if len(levels) != len(self.names):
            return False
        if self.layout is None or self.order is None:
            return all(0 <= v <= m for v, m in zip(levels, self.maxima))
        return bool(feasible_mask(self.layout, self.order, np.array([levels]))[0])

    def subset(self, mask) -> SignatureTable:
        mask = np.asarray(mask, bool)
        rows = np.flatnonzero(mask)
        return SignatureTable(
            self.event,
            self.order,
            self.names,
            self.levels[rows],
            [self.favourable[i] for i in rows],
            [self.total[i] for i in rows],
            self.layout,
            self.maxima,
        )

    def __eq__(self, other):
        if not isinstance(other, SignatureTable):
            return NotImplemented
        return (
            self.event == other.event
            and self.order == other.order
            and self.names == other.names
            and np.array_equal(self.levels, other.levels)
            and self.favourable == other.favourable
            and self.total == other.total
        )

    def __repr__(self):
        tag = f", order={self.order.label}" if self.order is not None else ""
        return f"<SignatureTable {self.event.name}{tag}, {len(self)} cells>"


def _validate_order(model: SharedModel, order) -> Order:
    return Order.parse(order, model.n_systems)


def _system_counts(structure, own, shared, requirement):
    """Own-subset counts given the shared-component mask.

    Returns ``g`` with ``g[own_index, shared_mask]`` = number of subsets of
    the exclusive components, with the per-group sizes encoded by
    ``own_index`` (mixed radix, first group most significant), for which the
    requirement holds.
    """
    own_comps = [c for grp in own for c in grp.components]
    local = own_comps + list(shared)
    n = len(local)
    if n > MAX_TABLE_COMPONENTS:
        raise TooLarge(f"a system with {n} components exceeds the limit of {MAX_TABLE_COMPONENTS}")
    states = np.arange(1 << n, dtype=np.int64)
    if requirement is None:
        w = np.ones(states.size)
    else:
        tt = truth_table(structure, local)
        w = (tt if requirement == 1 else 1 - tt).astype(float)
    own_idx = np.zeros(states.size, np.int64)
    off = 0
    for grp in own:
        cnt = np.zeros(states.size, np.int64)
        for i in range(off, off + grp.size):
            cnt += (states >> i) & 1
        own_idx = own_idx * (grp.size + 1) + cnt
        off += grp.size
    dims = int(np.prod([grp.size + 1 for grp in own], dtype=np.int64))
    h = len(shared)
    key = own_idx * (1 << h) + (states >> len(own_comps))
    g = np.bincount(key, weights=w, minlength=dims << h)
    g = np.rint(g).astype(np.int64).reshape(dims, 1 << h)
    return g, 1 << n


@lru_cache(maxsize=256)
def joint_signature(
    model: SharedModel, order, event: Event = Event.BOTH_FUNCTION, budget: int = DEFAULT_BUDGET
) -> SignatureTable:
    """General joint signature for 2 or 3 systems, any number of types."""
    order = _validate_order(model, order)
    if event is Event.SINGLE_SYSTEM:
        raise ValueError("use survival_signature_single for single-system tables")
    reqs = event.requirements(model.n_systems)
    layout = model.layout
    S = model.n_systems
    groups = layout.groups
    own = [[grp for grp in groups if grp.members == (s,)] for s in range(S)]
    shared_ids = [g for g, grp in enumerate(groups) if len(grp.members) > 1]
    shared_comps = [(c, g) for g in shared_ids for c in groups[g].components]

    work = 0
    gs, nzs, bitpos = [], [], []
    for s in range(S):
        sh = [c for c, g in shared_comps if s in groups[g].members]
        bitpos.append({c: j for j, c in enumerate(sh)})
        g, cost = _system_counts(model.systems[s][1], own[s], sh, reqs[s])
        gs.append(g)
        nzs.append(g.any(axis=0))
        work += cost
    while len(gs) < 3:
        gs.append(np.ones((1, 1), np.int64))
        nzs.append(np.ones(1, bool))
        bitpos.append({})

    shared_coords = [j for j, (g, _) in enumerate(layout.coords) if g in shared_ids]
    shared_dims = [groups[layout.coords[j][0]].size + 1 for j in shared_coords]
    strides = {}
    acc = 1
    for j, d in reversed(list(zip(shared_coords, shared_dims))):
        strides[layout.coords[j]] = acc
        acc *= d
    n_idx = acc

    nc = len(shared_comps)
    radix = np.ones(nc, np.int64)
    delta_idx = np.zeros((nc, 4), np.int64)
    delta_mask = np.zeros((nc, 4, 3), np.int64)
    for ci, (c, g) in enumerate(shared_comps):
        members = groups[g].members
        times = sorted({order.ranks[s] for s in members})
        radix[ci] = len(times) + 1
        for a in range(len(times) + 1):
            for s in members:
                if times.index(order.ranks[s]) < a:
                    delta_idx[ci, a] += strides[(g, s)]
                    delta_mask[ci, a, s] = 1 << bitpos[s][c]
    n_configs = int(np.prod(radix, dtype=np.float64))
    work += n_configs
    if work > budget:
        raise TooLarge(f"table needs about {work} evaluations, budget is {budget}")

    fav = _kernels.accumulate(*gs, *nzs, radix, delta_idx, delta_mask, n_idx)

    # axes: shared coords, then own groups of system 0, 1, 2
    own_axes = [grp for s in range(S) for grp in own[s]]
    shape = shared_dims + [grp.size + 1 for grp in own_axes]
    dense = fav.reshape(shape)
    axis_of = {}
    for a, j in enumerate(shared_coords):
        axis_of[j] = a
    for a, grp in enumerate(own_axes):
        g = groups.index(grp)
        axis_of[layout.coords_of_group(g)[0]] = len(shared_coords) + a
    dense = dense.transpose([axis_of[j] for j in range(len(layout.coords))])

    lattice = np.indices(dense.shape).reshape(len(layout.coords), -1).T
    ok = feasible_mask(layout, order, lattice)
    levels = lattice[ok]
    favourable = dense.reshape(-1)[ok]
    chains = _chain_columns(layout, order)
    total = [
        math.prod(chain_count(n, [row[j] for j in cols]) for n, cols in chains)
        for row in levels.tolist()
    ]
    table = SignatureTable(event, order, layout.names, levels, favourable.tolist(), total, layout)
    assert all(f <= t for f, t in zip(table.favourable, table.total))
    return table


def _chain_columns(layout: Layout, order: Order) -> list[tuple[int, list[int]]]:
    """Per group: size and the level columns of its distinct chain positions."""
    out = []
    for g, grp in enumerate(layout.groups):
        by_time = sorted(layout.coords_of_group(g), key=lambda j: order.ranks[layout.coords[j][1]])
        cols, last = [], None
        for j in by_time:
            r = order.ranks[layout.coords[j][1]]
            if r != last:
                cols.append(j)
                last = r
        out.append((grp.size, cols))
    return out


def joint_signature_two(model: SharedModel, order, *, budget: int = DEFAULT_BUDGET) -> SignatureTable:
    """Both-function signature of two systems with one component type."""
    if model.n_systems != 2:
        raise WrongArity(f"expected 2 systems, got {model.n_systems}")
    if len(model.types) != 1:
        raise ModelError("model has several component types; use joint_signature_two_multitype")
    return joint_signature(model, _validate_order(model, order), Event.BOTH_FUNCTION, budget)


def joint_signature_two_multitype(model: SharedModel, order, *, budget: int = DEFAULT_BUDGET) -> SignatureTable:
    if model.n_systems != 2:
        raise WrongArity(f"expected 2 systems, got {model.n_systems}")
    return joint_signature(model, _validate_order(model, order), Event.BOTH_FUNCTION, budget)


def joint_signature_three(
    model: SharedModel, order, event: Event = Event.ALL_THREE_FUNCTION, *, budget: int = DEFAULT_BUDGET
) -> SignatureTable:
    if model.n_systems != 3:
        raise WrongArity(f"expected 3 systems, got {model.n_systems}")
    return joint_signature(model, _validate_order(model, order), event, budget)


def variant_signature(model: SharedModel, order, event: Event, *, budget: int = DEFAULT_BUDGET) -> SignatureTable:
    if model.n_systems != 2:
        raise WrongArity(f"expected 2 systems, got {model.n_systems}")
    return joint_signature(model, _validate_order(model, order), Event(event), budget)


def survival_signature_single(
    structure: Structure,
    typing: Mapping[str, str] | None = None,
    groups: Mapping[str, str] | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> SignatureTable:
    """Survival signature of one system.

    Levels are per component type, or per (type, group) cell when ``groups``
    assigns a group label to every component.  Cell order: types in order of
    first appearance, then groups sorted by label.
    """
    comps = components(structure)
    typing = dict(typing) if typing is not None else dict.fromkeys(comps, "T")
    types = list(dict.fromkeys(typing[c] for c in comps))
    cells = []
    for t in types:
        of_type = [c for c in comps if typing[c] == t]
        if groups is None:
            cells.append((t, tuple(of_type)))
        else:
            for lab in sorted({groups[c] for c in of_type}, key=lambda x: (len(x), x)):
                cells.append((f"{t}:{lab}", tuple(c for c in of_type if groups[c] == lab)))
    if len(cells) == 1:
        names = ["l"]
    else:
        names = [f"l[{name}]" for name, _ in cells]
    return _single_table(structure, cells, names, budget)


def system_signature(model: SharedModel, system, *, grouped: bool = True, budget: int = DEFAULT_BUDGET) -> SignatureTable:
    """Single-system signature of one member of a model.

    With ``grouped`` the levels split by sharing group, in the model's
    canonical group order for that system.
    """
    s = model.system_index(system)
    mine = [grp for grp in model.layout.groups if s in grp.members]
    if grouped:
        multi = len(model.types) > 1
        names = [(f"{grp.type}:" if multi else "") + f"l{grp.label}" for grp in mine]
        cells = [(grp.label, grp.components) for grp in mine]
    else:
        cells = [
            (t, tuple(c for grp in mine if grp.type == t for c in grp.components))
            for t in model.types
        ]
        names = [f"l[{t}]" for t in model.types] if len(model.types) > 1 else ["l"]
    return _single_table(model.systems[s][1], cells, names, budget)


def _single_table(structure, cells, names, budget) -> SignatureTable:
    local = [c for _, comps in cells for c in comps]
    n = len(local)
    if n > MAX_TABLE_COMPONENTS or (1 << n) > budget:
        raise TooLarge(f"single-system table on {n} components exceeds limits")
    tt = truth_table(structure, local)
    states = np.arange(1 << n, dtype=np.int64)
    idx = np.zeros(states.size, np.int64)
    dims = []
    off = 0
    for _, comps in cells:
        cnt = np.zeros(states.size, np.int64)
        for i in range(off, off + len(comps)):
            cnt += (states >> i) & 1
        idx = idx * (len(comps) + 1) + cnt
        dims.append(len(comps) + 1)
        off += len(comps)
    size = int(np.prod(dims, dtype=np.int64))
    fav = np.rint(np.bincount(idx, weights=tt.astype(float), minlength=size)).astype(np.int64)
    levels = np.indices(dims).reshape(len(dims), -1).T
    total = [
        math.prod(math.comb(len(comps), lv) for (_, comps), lv in zip(cells, row))
        for row in levels.tolist()
    ]
    return SignatureTable(
        Event.SINGLE_SYSTEM, None, names, levels, fav.tolist(), total,
        maxima=[len(c) for _, c in cells],
    )


def signature_bounds(partial: SignatureTable, query) -> tuple[Fraction, Fraction]:
    """Monotonicity bounds on an unevaluated cell from evaluated ones.

    Lower: the largest value among evaluated cells dominated by ``query``
    (else 0).  Upper: the smallest value among evaluated cells dominating
    it (else 1).
    """
    if not partial.event.monotone:
        raise ValueError(f"bounds need a monotone event, not {partial.event.name}")
    q = np.asarray(tuple(query), dtype=np.int64)
    if not partial.is_feasible(q):
        raise InfeasibleQuery(f"cell {tuple(q.tolist())} is infeasible for this table")
    lower, upper = Fraction(0), Fraction(1)
    if len(partial):
        below = np.flatnonzero((partial.levels <= q).all(axis=1))
        above = np.flatnonzero((partial.levels >= q).all(axis=1))
        for i in below:
            lower = max(lower, Fraction(partial.favourable[i], partial.total[i]))
        for i in above:
            upper = min(upper, Fraction(partial.favourable[i], partial.total[i]))
    assert lower <= upper, "evaluated cells violate monotonicity"
    return lower, upper


def group_labels(model: SharedModel) -> dict[str, str]:
    """Component -> sharing-group label (``"1"``, ``"12"``, ...)."""
    return {c: group_label(m) for c, m in model.membership.items()}
