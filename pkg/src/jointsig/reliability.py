"""Joint, marginal and conditional survival probabilities.

Every probability is a sum over the cells of a cached signature table of
``value(cell) * kernel(cell)``, with the table chosen by the weak order of
the query times.  Signature values are exact; the kernels are floats.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .errors import ConditioningOnNullEvent, InvalidTimeOrder, WrongArity
from .lifetimes import _check_times, chain_probability, layout_kernel
from .model import SharedModel
from .signature import (
    DEFAULT_BUDGET,
    Event,
    Order,
    joint_signature,
    system_signature,
)


def event_probability(
    model: SharedModel,
    dists: Mapping,
    times: Sequence[float],
    event: Event = Event.BOTH_FUNCTION,
    *,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """P(event) with system ``i`` considered at ``times[i]``."""
    times = [float(t) for t in _check_times(list(times))]
    if len(times) != model.n_systems:
        raise WrongArity(f"expected {model.n_systems} times, got {len(times)}")
    table = joint_signature(model, Order.from_times(times), event, budget)
    kern = layout_kernel(model.layout, dists, table.levels, times)
    p = float(np.dot(table.values, kern))
    return min(max(p, 0.0), 1.0)


def joint_survival_two(model: SharedModel, dists: Mapping, t1: float, t2: float, **kw) -> float:
    """P(T1 > t1, T2 > t2)."""
    if model.n_systems != 2:
        raise WrongArity(f"expected 2 systems, got {model.n_systems}")
    return event_probability(model, dists, (t1, t2), Event.BOTH_FUNCTION, **kw)


def joint_survival_three(model: SharedModel, dists: Mapping, t1: float, t2: float, t3: float, **kw) -> float:
    if model.n_systems != 3:
        raise WrongArity(f"expected 3 systems, got {model.n_systems}")
    return event_probability(model, dists, (t1, t2, t3), Event.ALL_THREE_FUNCTION, **kw)


def marginal_survival(model: SharedModel, dists: Mapping, system, t: float, *, budget: int = DEFAULT_BUDGET) -> float:
    """P(T_i > t) from the joint signature.

    The other systems are considered at time 0, when every component
    functions: only cells where their levels are maximal contribute, and the
    kernel reduces to the target's own and shared groups at ``t``.
    """
    s = model.system_index(system)
    (t,) = _check_times([float(t)])
    t = float(t)
    times = [0.0] * model.n_systems
    times[s] = t
    order = Order.from_times(times)
    # every system functions at full strength, so "all function" reduces to the target
    event = Event.BOTH_FUNCTION if model.n_systems == 2 else Event.ALL_THREE_FUNCTION
    table = joint_signature(model, order, event, budget)
    layout = model.layout
    keep = np.ones(len(table), bool)
    for j, (g, owner) in enumerate(layout.coords):
        if owner != s:
            keep &= table.levels[:, j] == layout.groups[g].size
    sub = table.subset(keep)
    # the other systems' coordinates are pinned at their maxima, time 0 keeps
    # them there with certainty, so only the target's time matters
    kern = np.ones(len(sub))
    for g, grp in enumerate(layout.groups):
        if s not in grp.members or grp.size == 0:
            continue
        j = [jj for jj in layout.coords_of_group(g) if layout.coords[jj][1] == s][0]
        kern *= _binomial_kernel(grp.size, sub.levels[:, j], t, dists[grp.type])
    p = float(np.dot(sub.values, kern))
    return min(max(p, 0.0), 1.0)


def _binomial_kernel(n, levels, t, dist):
    return chain_probability(n, np.asarray(levels)[:, None], [t], dist)


def marginal_survival_via_single(model: SharedModel, dists: Mapping, system, t: float) -> float:
    """P(T_i > t) from the target's own per-type survival signature."""
    table = system_signature(model, system, grouped=False)
    (t,) = _check_times([float(t)])
    kern = np.ones(len(table))
    for j, tname in enumerate(model.types):
        kern *= _binomial_kernel(table.maxima[j], table.levels[:, j], float(t), dists[tname])
    p = float(np.dot(table.values, kern))
    return min(max(p, 0.0), 1.0)


def failure_probability_pair(model: SharedModel, dists: Mapping, t1: float, t2: float) -> float:
    """P(T1 > t1, T2 <= t2)."""
    return event_probability(model, dists, (t1, t2), Event.S1_FUNCTIONS_S2_FAILS)


def conditional_survival_given_functioning(model: SharedModel, dists: Mapping, t1: float, t2: float) -> float:
    """P(T1 > t1 | T2 > t2)."""
    den = marginal_survival(model, dists, 1, t2)
    if den <= 0.0:
        raise ConditioningOnNullEvent(f"P(T2 > {t2}) is zero")
    return min(joint_survival_two(model, dists, t1, t2) / den, 1.0)


def conditional_survival_given_failed(model: SharedModel, dists: Mapping, t1: float, t2: float) -> float:
    """P(T1 > t1 | T2 <= t2)."""
    den = 1.0 - marginal_survival(model, dists, 1, t2)
    if den <= 0.0:
        raise ConditioningOnNullEvent(f"P(T2 <= {t2}) is zero")
    return min(failure_probability_pair(model, dists, t1, t2) / den, 1.0)


def conditional_joint_survival(model: SharedModel, dists: Mapping, t: float, t2: float) -> float:
    """P(T1 > t, T2 > t | T2 > t2) for ``t > t2``."""
    if not t > t2:
        raise InvalidTimeOrder(f"need t > t2, got t={t}, t2={t2}")
    den = marginal_survival(model, dists, 1, t2)
    if den <= 0.0:
        raise ConditioningOnNullEvent(f"P(T2 > {t2}) is zero")
    return min(joint_survival_two(model, dists, t, t) / den, 1.0)


def survival_grid(model: SharedModel, dists: Mapping, axes: Sequence[Sequence[float]], event=Event.BOTH_FUNCTION):
    """Evaluate :func:`event_probability` on the product grid of ``axes``.

    Returns an array of shape ``tuple(len(a) for a in axes)``.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    out = np.empty(tuple(a.size for a in axes))
    for idx in np.ndindex(out.shape):
        times = [axes[k][i] for k, i in enumerate(idx)]
        out[idx] = event_probability(model, dists, times, event)
    return out
