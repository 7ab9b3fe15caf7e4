"""Component lifetime distributions and count kernels.

A count kernel is the probability that exactly the given numbers of
components function at the query times.  Components of one type are iid,
types are independent.  For one sharing group the survivors at the member
times form a shrinking chain, so with distinct times ``tau_1 < ... < tau_m``
and levels ``L_1 >= ... >= L_m`` the group contributes the multinomial

    n! / ((n - L_1)! (L_1 - L_2)! ... L_m!)
      * F(tau_1)^(n - L_1) * prod_j (F(tau_{j+1}) - F(tau_j))^(L_j - L_{j+1})
      * (1 - F(tau_m))^L_m

Tied times collapse into one chain position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InfeasibleLevels, InvalidDistribution, LevelOutOfRange, NegativeTime
from .model import GROUPS, GroupCounts, Layout, group_label


def _check_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise NegativeTime(f"times must be nonnegative, got {t}")
    return t


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidDistribution(f"exponential rate must be positive, got {self.rate}")

    def cdf(self, t):
        t = _check_times(t)
        return -np.expm1(-self.rate * t)

    def ppf(self, u):
        return -np.log1p(-np.asarray(u, dtype=float)) / self.rate


@dataclass(frozen=True)
class Weibull:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise InvalidDistribution("Weibull shape and scale must be positive")

    def cdf(self, t):
        t = _check_times(t)
        return -np.expm1(-((t / self.scale) ** self.shape))

    def ppf(self, u):
        return self.scale * (-np.log1p(-np.asarray(u, dtype=float))) ** (1.0 / self.shape)


@dataclass(frozen=True)
class EmpiricalCdf:
    """CDF given by breakpoints ``(t_j, F_j)``.

    Step mode (default) is right-continuous: ``F(t) = F_j`` for
    ``t_j <= t < t_{j+1}``.  With ``interpolate`` the CDF is linear between
    breakpoints and rises linearly from ``(0, 0)`` to the first point when
    that point has ``t > 0``.  Before the first point the step CDF is 0;
    after the last it stays at the last value.
    """

    points: tuple[tuple[float, float], ...]
    interpolate: bool = False

    def __post_init__(self):
        pts = tuple((float(t), float(f)) for t, f in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise InvalidDistribution("empirical CDF needs at least one point")
        ts = np.array([p[0] for p in pts])
        fs = np.array([p[1] for p in pts])
        if np.any(ts < 0) or np.any(np.diff(ts) <= 0):
            raise InvalidDistribution("breakpoint times must be nonnegative and strictly increasing")
        if np.any(fs < 0) or np.any(fs > 1) or np.any(np.diff(fs) < 0):
            raise InvalidDistribution("CDF values must be nondecreasing within [0, 1]")

    def _arrays(self):
        ts = np.array([p[0] for p in self.points])
        fs = np.array([p[1] for p in self.points])
        if self.interpolate and ts[0] > 0:
            ts = np.concatenate(([0.0], ts))
            fs = np.concatenate(([0.0], fs))
        return ts, fs

    def cdf(self, t):
        t = _check_times(t)
        ts, fs = self._arrays()
        if self.interpolate:
            return np.interp(t, ts, fs)
        i = np.searchsorted(ts, t, side="right") - 1
        return np.where(i >= 0, fs[np.maximum(i, 0)], 0.0)

    def ppf(self, u):
        """Generalised inverse ``inf{t : F(t) >= u}``; ``inf`` beyond the last value."""
        u = np.asarray(u, dtype=float)
        ts, fs = self._arrays()
        j = np.searchsorted(fs, u, side="left")
        out = np.full(u.shape, np.inf)
        inside = j < fs.size
        if not self.interpolate:
            out[inside] = ts[j[inside]]
            return out
        jj = j[inside]
        uu = u[inside]
        lo = np.maximum(jj - 1, 0)
        f0, f1 = fs[lo], fs[jj]
        t0, t1 = ts[lo], ts[jj]
        span = f1 - f0
        frac = np.divide(uu - f0, span, out=np.ones_like(uu), where=span > 0)
        out[inside] = np.where(jj == 0, ts[0], t0 + frac * (t1 - t0))
        return out


Distribution = Exponential | Weibull | EmpiricalCdf


def cdf(dist: Distribution, t: float) -> float:
    """Scalar CDF; plain ``math`` for the parametric families."""
    t = float(t)
    if not t >= 0:
        raise NegativeTime(f"times must be nonnegative, got {t}")
    if isinstance(dist, Exponential):
        return -math.expm1(-dist.rate * t)
    if isinstance(dist, Weibull):
        return -math.expm1(-((t / dist.scale) ** dist.shape))
    return float(dist.cdf(t))


def from_dict(obj) -> Distribution:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidDistribution(f"distribution must be an object with a 'kind', got {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "exponential":
            return Exponential(float(obj["rate"]))
        if kind == "weibull":
            return Weibull(float(obj["shape"]), float(obj["scale"]))
        if kind == "empirical":
            return EmpiricalCdf(tuple(tuple(p) for p in obj["points"]), bool(obj.get("interpolate", False)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidDistribution):
            raise
        raise InvalidDistribution(f"bad {kind} distribution: {exc}") from None
    raise InvalidDistribution(f"unknown distribution kind {kind!r}")


def to_dict(dist: Distribution) -> dict:
    if isinstance(dist, Exponential):
        return {"kind": "exponential", "rate": dist.rate}
    if isinstance(dist, Weibull):
        return {"kind": "weibull", "shape": dist.shape, "scale": dist.scale}
    return {"kind": "empirical", "points": [list(p) for p in dist.points], "interpolate": dist.interpolate}


def chain_probability(n: int, levels: Sequence, times: Sequence, dist: Distribution):
    """Kernel factor of one group (vectorised over rows of ``levels``).

    ``levels[..., i]`` is the number functioning at ``times[i]``.  Rows that
    violate the time order get probability 0 here; the scalar kernels raise
    instead.
    """
    levels = np.atleast_2d(np.asarray(levels, dtype=np.int64))
    times = [float(t) for t in times]
    _check_times(times)
    distinct = sorted(set(times))
    pos = [distinct.index(t) for t in times]
    # collapse tied members; they must agree
    ok = np.ones(levels.shape[0], bool)
    chain = []
    for p in range(len(distinct)):
        cols = [i for i, q in enumerate(pos) if q == p]
        for c in cols[1:]:
            ok &= levels[:, c] == levels[:, cols[0]]
        chain.append(levels[:, cols[0]])
    chain = np.stack(chain, axis=1) if chain else np.zeros((levels.shape[0], 0), np.int64)
    ok &= (chain >= 0).all(axis=1) & (chain <= n).all(axis=1)
    if chain.shape[1] > 1:
        ok &= (np.diff(chain, axis=1) <= 0).all(axis=1)
    F = np.array([float(dist.cdf(t)) for t in distinct])
    mass = np.diff(np.concatenate(([0.0], F, [1.0])))
    mass = np.clip(mass, 0.0, 1.0)
    bounds = np.concatenate((np.full((levels.shape[0], 1), n), chain, np.zeros((levels.shape[0], 1), np.int64)), axis=1)
    counts = -np.diff(bounds, axis=1)  # dead by tau_1, died in each interval, alive at the end
    counts = np.where(ok[:, None], counts, 0)
    coef = np.array([_multinomial(n, row) if good else 0 for row, good in zip(counts.tolist(), ok)], dtype=float)
    prob = coef * np.prod(np.power(mass[None, :], counts), axis=1)
    return np.where(ok, prob, 0.0)


def _multinomial(n, parts):
    out = 1
    rest = n
    for k in parts:
        out *= math.comb(rest, k)
        rest -= k
    return out


def _scalar(n, levels, times, dist, what):
    levels = [int(v) for v in levels]
    if any(v < 0 or v > n for v in levels):
        raise LevelOutOfRange(f"{what}: level outside 0..{n}: {levels}")
    order = sorted(range(len(times)), key=lambda i: times[i])
    for a, b in zip(order, order[1:]):
        if times[a] == times[b] and levels[a] != levels[b]:
            raise InfeasibleLevels(f"{what}: equal times need equal levels, got {levels}")
        if levels[b] > levels[a]:
            raise InfeasibleLevels(f"{what}: more survivors at a later time, got {levels}")
    # scalar form of chain_probability: collapse ties, then one multinomial term
    chain, F = [], []
    for i in order:
        if not F or times[i] != F[-1][0]:
            chain.append(levels[i])
            F.append((times[i], cdf(dist, times[i])))
    bounds = [n] + chain + [0]
    counts = [a - b for a, b in zip(bounds, bounds[1:])]
    cuts = [0.0] + [f for _, f in F] + [1.0]
    out = float(_multinomial(n, counts))
    for lo, hi, k in zip(cuts, cuts[1:], counts):
        out *= max(hi - lo, 0.0) ** k
    return out


def count_kernel_single(dists, counts, levels, t) -> float:
    """Per-type binomial kernel of a single system at time ``t``.

    ``dists``, ``counts`` and ``levels`` are parallel sequences over types
    (a single distribution is accepted for one type).
    """
    if not isinstance(dists, (list, tuple)):
        dists = [dists] * len(counts)
    out = 1.0
    for d, n, lv in zip(dists, counts, levels):
        if not 0 <= lv <= n:
            raise LevelOutOfRange(f"level {lv} outside 0..{n}")
        out *= _scalar(n, [lv], [t], d, "single")
    return out


def count_kernel_two(dist, counts, levels, t1, t2) -> float:
    """Kernel for ``counts = (n1, n2, n12)`` and ``levels = (l1, l2, l[1]2, l1[2])``."""
    n1, n2, n12 = counts
    l1, l2, a, b = levels
    return (
        _scalar(n1, [l1], [t1], dist, "own 1")
        * _scalar(n2, [l2], [t2], dist, "own 2")
        * _scalar(n12, [a, b], [t1, t2], dist, "shared 12")
    )


def count_kernel_two_multitype(dists: Mapping, group_counts: GroupCounts, levels, t1, t2) -> float:
    """Product over types of :func:`count_kernel_two`; levels are type-major."""
    types = [t for t, _ in group_counts.counts]
    levels = list(levels)
    if len(levels) != 4 * len(types):
        raise LevelOutOfRange(f"expected {4 * len(types)} levels, got {len(levels)}")
    out = 1.0
    for k, t in enumerate(types):
        out *= count_kernel_two(dists[t], group_counts.vector(t), levels[4 * k: 4 * k + 4], t1, t2)
    return out


def count_kernel_three(dist, counts, levels, t1, t2, t3) -> float:
    """Three-system kernel.

    ``counts = (n1, n2, n3, n12, n13, n23, n123)``; ``levels`` is the
    twelve-vector ``(l1, l2, l3, l[1]2, l1[2], l[1]3, l1[3], l[2]3, l2[3],
    l[1]23, l1[2]3, l12[3])``.
    """
    times = (t1, t2, t3)
    levels = list(levels)
    if len(counts) != 7 or len(levels) != 12:
        raise LevelOutOfRange("three-system kernel needs 7 counts and 12 levels")
    out = 1.0
    j = 0
    for n, members in zip(counts, GROUPS[3]):
        lv = levels[j: j + len(members)]
        j += len(members)
        out *= _scalar(n, lv, [times[s] for s in members], dist, f"group {group_label(members)}")
    return out


def layout_kernel(layout: Layout, dists: Mapping, levels, times) -> np.ndarray:
    """Kernel for every row of a level matrix laid out per ``layout``."""
    levels = np.atleast_2d(np.asarray(levels, dtype=np.int64))
    times = [float(t) for t in times]
    if len(times) != layout.n_systems:
        raise ValueError(f"expected {layout.n_systems} times, got {len(times)}")
    out = np.ones(levels.shape[0])
    for g, grp in enumerate(layout.groups):
        if grp.size == 0:
            continue
        cols = layout.coords_of_group(g)
        member_times = [times[layout.coords[j][1]] for j in cols]
        out *= chain_probability(grp.size, levels[:, cols], member_times, dists[grp.type])
    return out
