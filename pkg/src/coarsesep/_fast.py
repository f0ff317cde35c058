"""Compiled kernels for bulk normal-form arithmetic.

Words are packed into int64: the syllable count in the top 6 bits of the
low-63-bit payload layout used by GraphProduct.pack, one fixed-width field
per syllable.  Packing with the length in the most significant position
makes packed values sort by length first, so concatenated BFS levels form
a globally sorted array and membership is a binary search.

This module is an accelerator only; the pure-Python engine in cayley.py
computes the same objects and the test suite checks they agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


PAYLOAD_BITS = 58
MAX_PACK_SYLLABLES = 31  # keeps (m << 58) inside signed int64


@dataclass
class FastContext:
    """Flattened group/graph data consumed by the kernels."""

    bits: int
    max_len: int
    n_codes: int
    adj_mask: np.ndarray  # int64[V], bit v of adj_mask[u] iff u ~ v
    code_vert: np.ndarray  # int64[n_codes]
    code_elem: np.ndarray  # int64[n_codes]
    code_base: np.ndarray  # int64[V]
    orders: np.ndarray  # int64[V]
    mul_flat: np.ndarray  # int64[sum k_v^2]
    mul_off: np.ndarray  # int64[V]


def build_context(gp) -> FastContext:
    """Extract kernel arrays from a words.GraphProduct."""
    nv = gp.n_vertices
    adj_mask = np.zeros(nv, dtype=np.int64)
    for u in range(nv):
        for v in gp.graph.adj[u]:
            adj_mask[u] |= 1 << v
    n_codes = gp.n_generators
    code_vert = np.empty(n_codes, dtype=np.int64)
    code_elem = np.empty(n_codes, dtype=np.int64)
    for c, (v, e) in enumerate(gp.generators()):
        code_vert[c] = v
        code_elem[c] = e
    orders = np.array(gp.orders, dtype=np.int64)
    mul_off = np.zeros(nv, dtype=np.int64)
    acc = 0
    for v in range(nv):
        mul_off[v] = acc
        acc += gp.orders[v] ** 2
    mul_flat = np.empty(acc, dtype=np.int64)
    for v in range(nv):
        k = gp.orders[v]
        for a in range(k):
            for b in range(k):
                mul_flat[mul_off[v] + a * k + b] = gp.mul_at(v, a, b)
    max_len = min(PAYLOAD_BITS // gp.pack_bits, MAX_PACK_SYLLABLES)
    return FastContext(
        bits=gp.pack_bits,
        max_len=max_len,
        n_codes=n_codes,
        adj_mask=adj_mask,
        code_vert=code_vert,
        code_elem=code_elem,
        code_base=np.array(gp._code_base, dtype=np.int64),
        orders=orders,
        mul_flat=mul_flat,
        mul_off=mul_off,
    )


@njit(cache=True)
def _reduce_step(
    verts, elems, m, v, e, adj_mask, orders, mul_flat, mul_off
):  # pragma: no cover - compiled
    """Push syllable (v, e) onto a reduced buffer; returns new length."""
    i = m - 1
    while i >= 0:
        u = verts[i]
        if u == v:
            k = orders[v]
            prod = mul_flat[mul_off[v] + elems[i] * k + e]
            if prod == 0:
                for j in range(i, m - 1):
                    verts[j] = verts[j + 1]
                    elems[j] = elems[j + 1]
                return m - 1
            elems[i] = prod
            return m
        if (adj_mask[u] >> v) & 1:
            i -= 1
        else:
            break
    verts[m] = v
    elems[m] = e
    return m + 1


@njit(cache=True)
def _canonical_encode(
    verts, elems, m, bits, max_len, adj_mask, code_base
):  # pragma: no cover - compiled
    """Canonical block order (commuting prefix blocks sorted by vertex),
    then pack into int64.  Returns -1 if the word does not fit."""
    if m > max_len:
        return np.int64(-1)
    out_v = np.empty(m, np.int64)
    out_e = np.empty(m, np.int64)
    used = np.zeros(m, np.uint8)
    pos = 0
    while pos < m:
        prior = np.int64(0)
        bstart = pos
        for j in range(m):
            if used[j]:
                continue
            vj = verts[j]
            if (prior & ~adj_mask[vj]) == 0:
                out_v[pos] = vj
                out_e[pos] = elems[j]
                used[j] = 1
                pos += 1
            prior |= np.int64(1) << vj
        # insertion sort the block by vertex id
        for a in range(bstart + 1, pos):
            bv = out_v[a]
            be = out_e[a]
            b = a - 1
            while b >= bstart and out_v[b] > bv:
                out_v[b + 1] = out_v[b]
                out_e[b + 1] = out_e[b]
                b -= 1
            out_v[b + 1] = bv
            out_e[b + 1] = be
    val = np.int64(m) << PAYLOAD_BITS
    for i in range(m):
        code = code_base[out_v[i]] + out_e[i] - 1
        val |= (code + np.int64(1)) << (i * bits)
    return val


@njit(cache=True)
def _append_codes_kernel(
    vals,
    out,
    code,
    bits,
    max_len,
    adj_mask,
    code_vert,
    code_elem,
    code_base,
    orders,
    mul_flat,
    mul_off,
):  # pragma: no cover - compiled
    mask = (np.int64(1) << bits) - 1
    v = code_vert[code]
    e = code_elem[code]
    verts = np.empty(max_len + 1, np.int64)
    elems = np.empty(max_len + 1, np.int64)
    for idx in range(vals.shape[0]):
        val = vals[idx]
        m = val >> PAYLOAD_BITS
        for i in range(m):
            c = ((val >> (i * bits)) & mask) - 1
            verts[i] = code_vert[c]
            elems[i] = code_elem[c]
        m2 = _reduce_step(verts, elems, m, v, e, adj_mask, orders, mul_flat, mul_off)
        out[idx] = _canonical_encode(verts, elems, m2, bits, max_len, adj_mask, code_base)


@njit(cache=True)
def _prefix_mul_kernel(
    prefix_val,
    vals,
    out,
    bits,
    max_len,
    adj_mask,
    code_vert,
    code_elem,
    code_base,
    orders,
    mul_flat,
    mul_off,
):  # pragma: no cover - compiled
    """out[i] = canonical form of prefix * vals[i]."""
    mask = (np.int64(1) << bits) - 1
    pm = prefix_val >> PAYLOAD_BITS
    pv = np.empty(pm, np.int64)
    pe = np.empty(pm, np.int64)
    for i in range(pm):
        c = ((prefix_val >> (i * bits)) & mask) - 1
        pv[i] = code_vert[c]
        pe[i] = code_elem[c]
    cap = 2 * max_len + 2
    verts = np.empty(cap, np.int64)
    elems = np.empty(cap, np.int64)
    for idx in range(vals.shape[0]):
        val = vals[idx]
        m = pm
        for i in range(pm):
            verts[i] = pv[i]
            elems[i] = pe[i]
        wm = val >> PAYLOAD_BITS
        for i in range(wm):
            c = ((val >> (i * bits)) & mask) - 1
            m = _reduce_step(
                verts, elems, m, code_vert[c], code_elem[c], adj_mask, orders, mul_flat, mul_off
            )
        out[idx] = _canonical_encode(verts, elems, m, bits, max_len, adj_mask, code_base)


def append_code_batch(ctx: FastContext, vals: np.ndarray, code: int) -> np.ndarray:
    out = np.empty_like(vals)
    _append_codes_kernel(
        vals,
        out,
        np.int64(code),
        np.int64(ctx.bits),
        np.int64(ctx.max_len),
        ctx.adj_mask,
        ctx.code_vert,
        ctx.code_elem,
        ctx.code_base,
        ctx.orders,
        ctx.mul_flat,
        ctx.mul_off,
    )
    return out


def prefix_mul_batch(ctx: FastContext, prefix_val: int, vals: np.ndarray) -> np.ndarray:
    out = np.empty_like(vals)
    _prefix_mul_kernel(
        np.int64(prefix_val),
        vals,
        out,
        np.int64(ctx.bits),
        np.int64(ctx.max_len),
        ctx.adj_mask,
        ctx.code_vert,
        ctx.code_elem,
        ctx.code_base,
        ctx.orders,
        ctx.mul_flat,
        ctx.mul_off,
    )
    if np.any(out == -1):
        raise OverflowError("product does not fit in the packed word size")
    return out
