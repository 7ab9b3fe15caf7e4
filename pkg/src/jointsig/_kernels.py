"""Hot loops: shared-configuration accumulation and failure-time scanning.

Each kernel has a numba implementation (``*_nb``) and a numpy one
(``*_np``); the public names dispatch on :data:`jointsig._accel.USE_NUMBA`.
Both produce identical integers / floats.
"""

import numpy as np

from . import _accel
from ._accel import njit

_NP_CHUNK = 1 << 15


@njit
def accumulate_nb(g0, g1, g2, nz0, nz1, nz2, radix, delta_idx, delta_mask, n_idx):
    d0, d1, d2 = g0.shape[0], g1.shape[0], g2.shape[0]
    fav = np.zeros((n_idx, d0 * d1 * d2), np.int64)
    nc = radix.shape[0]
    digits = np.zeros(nc, np.int64)
    idx = 0
    m0 = 0
    m1 = 0
    m2 = 0
    for c in range(nc):
        idx += delta_idx[c, 0]
        m0 += delta_mask[c, 0, 0]
        m1 += delta_mask[c, 0, 1]
        m2 += delta_mask[c, 0, 2]
    while True:
        if nz0[m0] and nz1[m1] and nz2[m2]:
            for a in range(d0):
                x = g0[a, m0]
                if x == 0:
                    continue
                for b in range(d1):
                    y = x * g1[b, m1]
                    if y == 0:
                        continue
                    base = (a * d1 + b) * d2
                    for e in range(d2):
                        fav[idx, base + e] += y * g2[e, m2]
        c = 0
        while c < nc:
            d = digits[c]
            idx -= delta_idx[c, d]
            m0 -= delta_mask[c, d, 0]
            m1 -= delta_mask[c, d, 1]
            m2 -= delta_mask[c, d, 2]
            d += 1
            if d == radix[c]:
                d = 0
            digits[c] = d
            idx += delta_idx[c, d]
            m0 += delta_mask[c, d, 0]
            m1 += delta_mask[c, d, 1]
            m2 += delta_mask[c, d, 2]
            if d != 0:
                break
            c += 1
        if c == nc:
            break
    return fav


def accumulate_np(g0, g1, g2, nz0, nz1, nz2, radix, delta_idx, delta_mask, n_idx):
    d0, d1, d2 = g0.shape[0], g1.shape[0], g2.shape[0]
    fav = np.zeros((n_idx, d0 * d1 * d2), np.int64)
    total = int(np.prod(radix, dtype=np.int64)) if radix.size else 1
    for start in range(0, total, _NP_CHUNK):
        rem = np.arange(start, min(total, start + _NP_CHUNK), dtype=np.int64)
        idx = np.zeros(rem.size, np.int64)
        masks = np.zeros((3, rem.size), np.int64)
        for c in range(radix.size):
            d = rem % radix[c]
            rem = rem // radix[c]
            idx += delta_idx[c, d]
            masks += delta_mask[c, d].T
        m0, m1, m2 = masks
        keep = nz0[m0] & nz1[m1] & nz2[m2]
        if not keep.any():
            continue
        idx, m0, m1, m2 = idx[keep], m0[keep], m1[keep], m2[keep]
        contrib = (
            g0[:, m0].T[:, :, None, None]
            * g1[:, m1].T[:, None, :, None]
            * g2[:, m2].T[:, None, None, :]
        ).reshape(idx.size, d0 * d1 * d2)
        np.add.at(fav, idx, contrib)
    return fav


@njit
def failure_times_nb(life, comp_bits, init_masks, tables, offsets):
    n_samples, n_comp = life.shape
    n_sys = init_masks.shape[0]
    out = np.full((n_samples, n_sys), np.inf)
    masks = np.empty(n_sys, np.int64)
    for i in range(n_samples):
        order = np.argsort(life[i], kind="mergesort")
        for s in range(n_sys):
            masks[s] = init_masks[s]
        left = n_sys
        for j in range(n_comp):
            c = order[j]
            t = life[i, c]
            if t == np.inf:
                break
            for s in range(n_sys):
                bit = comp_bits[c, s]
                if bit == 0 or out[i, s] != np.inf:
                    continue
                masks[s] -= bit
                if tables[offsets[s] + masks[s]] == 0:
                    out[i, s] = t
                    left -= 1
            if left == 0:
                break
    return out


def failure_times_np(life, comp_bits, init_masks, tables, offsets):
    n_samples, n_comp = life.shape
    n_sys = init_masks.shape[0]
    order = np.argsort(life, axis=1, kind="stable")
    srt = np.take_along_axis(life, order, axis=1)
    out = np.full((n_samples, n_sys), np.inf)
    for s in range(n_sys):
        mask = np.full(n_samples, init_masks[s], np.int64)
        up = np.ones(n_samples, bool)
        for j in range(n_comp):
            t = srt[:, j]
            live = up & np.isfinite(t)
            mask = mask - np.where(live, comp_bits[order[:, j], s], 0)
            dead = live & (tables[offsets[s] + mask] == 0)
            out[dead, s] = t[dead]
            up &= ~dead
    return out


def accumulate(*args):
    if _accel.USE_NUMBA:
        return accumulate_nb(*args)
    return accumulate_np(*args)


def failure_times(*args):
    if _accel.USE_NUMBA:
        return failure_times_nb(*args)
    return failure_times_np(*args)
