"""Independent checks: seeded Monte Carlo and brute-force enumeration.

Nothing here reuses the factorised signature engine.  The enumeration
oracle walks every labelled configuration of every cell with
:func:`itertools.combinations` and looks each one up in a table filled by
:func:`jointsig.structure.evaluate`; the simulator samples component lifetimes and scans them in time
order.

Random numbers come from numpy's PCG64 bit generator.  Samples are drawn in
chunks of :data:`CHUNK` rows; chunk ``j`` uses
``np.random.SeedSequence(seed, spawn_key=(j,))``, which is what
``SeedSequence(seed).spawn`` hands out.  Results therefore depend only on
``(seed, model, distributions, N)``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import TooLarge
from .model import SharedModel
from .signature import Event, Order, SignatureTable
from .structure import evaluate, truth_table

GENERATOR_ID = "numpy.PCG64/SeedSequence-spawn"
CHUNK = 1 << 16
MAX_ORACLE_COMPONENTS = 12


@dataclass(frozen=True)
class SimulationRun:
    seed: int
    n_samples: int
    systems: tuple[str, ...]
    times: np.ndarray  # (n_samples, n_systems) system failure times
    generator: str = GENERATOR_ID


def simulate_failure_times(model: SharedModel, dists: Mapping, seed: int, n_samples: int) -> SimulationRun:
    if n_samples < 1:
        raise ValueError("need at least one sample")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    comps = [c for c, _ in model.components if c in model.membership]
    ppfs = [dists[model.type_of[c]].ppf for c in comps]
    S = model.n_systems
    comp_bits = np.zeros((len(comps), S), np.int64)
    tables, offsets, init = [], [], []
    off = 0
    for s in range(S):
        local = model.system_components(s)
        pos = {c: i for i, c in enumerate(local)}
        for ci, c in enumerate(comps):
            if c in pos:
                comp_bits[ci, s] = 1 << pos[c]
        tt = truth_table(model.structure(s), local)
        tables.append(tt)
        offsets.append(off)
        off += tt.size
        init.append((1 << len(local)) - 1)
    tables = np.concatenate(tables)
    offsets = np.array(offsets, np.int64)
    init = np.array(init, np.int64)

    out = np.empty((n_samples, S))
    for j, start in enumerate(range(0, n_samples, CHUNK)):
        stop = min(n_samples, start + CHUNK)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(j,))))
        u = rng.random((stop - start, len(comps)))
        life = np.empty_like(u)
        for ci, ppf in enumerate(ppfs):
            life[:, ci] = ppf(u[:, ci])
        out[start:stop] = _kernels.failure_times(life, comp_bits, init, tables, offsets)
    return SimulationRun(seed, n_samples, model.names, out)


def _items(run: SimulationRun, times) -> list[tuple[int, float]]:
    """``times`` as ``(system index, time)`` pairs.

    Accepts a mapping name -> time or a sequence aligned with the run's
    systems in which ``None`` leaves a system unqueried.
    """
    if isinstance(times, Mapping):
        return [(run.systems.index(k), float(v)) for k, v in times.items()]
    return [(i, float(v)) for i, v in enumerate(times) if v is not None]


def _alive(run: SimulationRun, times, failed: bool = False) -> np.ndarray:
    ok = np.ones(run.n_samples, bool)
    for i, t in _items(run, times):
        ok &= (run.times[:, i] <= t) if failed else (run.times[:, i] > t)
    return ok


def estimate_joint_survival(run: SimulationRun, times) -> tuple[float, float]:
    """Fraction of samples with every queried system alive, and its standard error."""
    p = float(_alive(run, times).mean())
    return p, math.sqrt(p * (1.0 - p) / run.n_samples)


def estimate_conditional(run: SimulationRun, times, given, given_failed: bool = False) -> tuple[float, float]:
    """Survival frequency among samples where every system in ``given``
    survives past (or, with ``given_failed``, has failed by) its time."""
    cond = _alive(run, given, failed=given_failed)
    m = int(cond.sum())
    if m == 0:
        raise ZeroDivisionError("no sample satisfies the condition")
    p = float(_alive(run, times)[cond].mean())
    return p, math.sqrt(p * (1.0 - p) / m)


def summary(run: SimulationRun, queries: Sequence) -> dict:
    rows = []
    for times in queries:
        p, se = estimate_joint_survival(run, times)
        rows.append({"times": list(times), "estimate": p, "stderr": se})
    return {
        "seed": run.seed,
        "samples": run.n_samples,
        "generator": run.generator,
        "systems": list(run.systems),
        "estimates": rows,
    }


@lru_cache(maxsize=256)
def _phi_table(st, comps: tuple) -> np.ndarray:
    """phi at every local state; bit i of the index is ``comps[i]``."""
    out = np.zeros(1 << len(comps), bool)
    for mask in range(out.size):
        out[mask] = evaluate(st, {c: bool(mask >> i & 1) for i, c in enumerate(comps)})
    return out


def exhaustive_signature(model: SharedModel, order, event: Event = Event.BOTH_FUNCTION) -> SignatureTable:
    """Signature table by direct enumeration of labelled configurations.

    For every group and every tuple of member levels, the nested functioning
    sets are enumerated member by member in time order; tuples admitting no
    configuration are left out.  Each surviving level vector then counts the
    labelled configurations (products of per-group choices) on which the
    event holds.
    """
    order = Order.parse(order, model.n_systems)
    n_used = len(model.membership)
    if n_used > MAX_ORACLE_COMPONENTS:
        raise TooLarge(f"oracle limited to {MAX_ORACLE_COMPONENTS} components, model has {n_used}")
    reqs = event.requirements(model.n_systems)
    layout = model.layout
    S = model.n_systems
    local = [model.system_components(s) for s in range(S)]
    bit = [{c: 1 << i for i, c in enumerate(local[s])} for s in range(S)]
    phis = [_phi_table(model.structure(s), tuple(local[s])) for s in range(S)]
    cols = [layout.coords_of_group(g) for g in range(len(layout.groups))]

    @lru_cache(maxsize=None)
    def chains(g, lv):
        # every nested choice of alive sets, as an (n_chains, S) array of local masks
        grp = layout.groups[g]
        members = sorted(zip((layout.coords[j][1] for j in cols[g]), lv), key=lambda x: order.ranks[x[0]])
        out = []

        def rec(k, alive, prev_rank, acc):
            if k == len(members):
                out.append(list(acc))
                return
            s, n = members[k]
            r = order.ranks[s]
            if r == prev_rank:
                if n == len(alive):
                    acc[s] = sum(bit[s][c] for c in alive)
                    rec(k + 1, alive, r, acc)
                return
            for sub in itertools.combinations(alive, n):
                acc[s] = sum(bit[s][c] for c in sub)
                rec(k + 1, sub, r, acc)

        rec(0, tuple(grp.components), None, [0] * S)
        return np.array(out, dtype=np.int64).reshape(-1, S)

    # per group, every member-level tuple together with its chains; tuples
    # whose enumeration comes back empty cannot occur and drop out here
    options = []
    for g, grp in enumerate(layout.groups):
        tuples = itertools.product(range(grp.size + 1), repeat=len(cols[g]))
        options.append([(lv, part) for lv in tuples if (part := chains(g, lv)).shape[0]])
    found = []
    for combo in itertools.product(*options):
        alive = np.zeros((1, S), np.int64)
        levels = [0] * len(layout.coords)
        for g, (lv, part) in enumerate(combo):
            for j, v in zip(cols[g], lv):
                levels[j] = v
            alive = (alive[:, None, :] | part[None, :, :]).reshape(-1, S)
        ok = np.ones(alive.shape[0], bool)
        for s in range(S):
            if reqs[s] is not None:
                ok &= phis[s][alive[:, s]] == bool(reqs[s])
        found.append((tuple(levels), int(ok.sum()), int(alive.shape[0])))
    found.sort()
    rows = [r for r, _, _ in found]
    favs = [f for _, f, _ in found]
    tots = [t for _, _, t in found]
    return SignatureTable(event, order, layout.names, np.array(rows, dtype=np.int64), favs, tots, layout)
