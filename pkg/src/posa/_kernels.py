"""Compiled inner loop for the rejection pairing sampler."""
from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True)
def pair_until_simple(owner, cell_start, deg, gen, tries, edges_out):
    """Draw up to ``tries`` uniform pairings of the points; stop at the first simple one.

    ``owner[p]`` is the vertex owning point ``p``; the points of vertex ``v``
    are ``cell_start[v] ... cell_start[v] + deg[v] - 1``, and the same
    offsets index its slots in the scratch neighbour table.

    Each step takes a free point and pairs it with a uniform free point.
    Any rule for choosing the first point that depends only on the history
    gives a uniform perfect matching, so points are taken vertex by vertex
    in decreasing degree: high degrees carry most of the loop and
    double-edge risk, and an attempt is abandoned at its first defect.

    Returns the number of attempts used, negated if none succeeded.  On
    success ``edges_out`` holds the ``m`` edges (unsorted).
    """
    npts = owner.shape[0]
    n = deg.shape[0]
    m = npts // 2
    order = np.argsort(-deg, kind="mergesort")
    pool = np.arange(npts)
    where = np.arange(npts)
    nbr = np.empty(npts, dtype=np.int64)
    fill = np.zeros(n, dtype=np.int64)
    for attempt in range(1, tries + 1):
        r = npts
        k = 0
        ok = True
        for oi in range(n):
            u = order[oi]
            su = cell_start[u]
            for a in range(su, su + deg[u]):
                if where[a] >= r:
                    continue
                # take a out of the free prefix
                ia = where[a]
                last = pool[r - 1]
                pool[ia] = last
                where[last] = ia
                pool[r - 1] = a
                where[a] = r - 1
                r -= 1
                j = int(gen.random() * r)
                if j >= r:
                    j = r - 1
                b = pool[j]
                last = pool[r - 1]
                pool[j] = last
                where[last] = j
                pool[r - 1] = b
                where[b] = r - 1
                r -= 1
                v = owner[b]
                if u == v:
                    ok = False
                    break
                dup = False
                for q in range(fill[u]):
                    if nbr[su + q] == v:
                        dup = True
                        break
                if dup:
                    ok = False
                    break
                nbr[su + fill[u]] = v
                fill[u] += 1
                sv = cell_start[v]
                nbr[sv + fill[v]] = u
                fill[v] += 1
                edges_out[k, 0] = u
                edges_out[k, 1] = v
                k += 1
            if not ok:
                break
        if ok:
            return attempt
        # only the vertices touched by this attempt need their counters reset
        for q in range(k):
            fill[edges_out[q, 0]] = 0
            fill[edges_out[q, 1]] = 0
    return -tries


# -- implicit treap over the path ----------------------------------------------
#
# The path x_0 ... x_h is the in-order sequence of a treap keyed by position.
# A rotation reverses the suffix after the pivot, which is a split, a lazy
# flip and a merge: O(log n) instead of O(h).  Node ids are vertex ids; the
# rows of ``tr`` are left child, right child, parent, subtree size and the
# pending-flip flag.  Priorities are fixed per vertex, so the tree shape
# never affects results.

L, R, P, SZ, FL = 0, 1, 2, 3, 4


@nb.njit(cache=True)
def _push(tr, x):
    if tr[FL, x]:
        a = tr[L, x]
        b = tr[R, x]
        tr[L, x] = b
        tr[R, x] = a
        if a >= 0:
            tr[FL, a] ^= 1
        if b >= 0:
            tr[FL, b] ^= 1
        tr[FL, x] = 0


@nb.njit(cache=True)
def _pull(tr, x):
    a = tr[L, x]
    b = tr[R, x]
    s = 1
    if a >= 0:
        s += tr[SZ, a]
        tr[P, a] = x
    if b >= 0:
        s += tr[SZ, b]
        tr[P, b] = x
    tr[SZ, x] = s


@nb.njit(cache=True)
def _merge(tr, prio, a, b):
    if a < 0:
        return b
    if b < 0:
        return a
    if prio[a] > prio[b]:
        _push(tr, a)
        tr[R, a] = _merge(tr, prio, tr[R, a], b)
        _pull(tr, a)
        return a
    _push(tr, b)
    tr[L, b] = _merge(tr, prio, a, tr[L, b])
    _pull(tr, b)
    return b


@nb.njit(cache=True)
def _split(tr, t, k):
    # first k nodes go left
    if t < 0:
        return -1, -1
    _push(tr, t)
    left = tr[L, t]
    ls = tr[SZ, left] if left >= 0 else 0
    if ls >= k:
        a, b = _split(tr, left, k)
        tr[L, t] = b
        _pull(tr, t)
        if a >= 0:
            tr[P, a] = -1
        return a, t
    a, b = _split(tr, tr[R, t], k - ls - 1)
    tr[R, t] = a
    _pull(tr, t)
    if b >= 0:
        tr[P, b] = -1
    return t, b


@nb.njit(cache=True)
def _rank(tr, x, anc):
    # position of x: push pending flips from the root down, then climb
    d = 0
    y = x
    while y >= 0:
        anc[d] = y
        d += 1
        y = tr[P, y]
    for j in range(d - 1, -1, -1):
        _push(tr, anc[j])
    left = tr[L, x]
    r = tr[SZ, left] if left >= 0 else 0
    y = x
    p = tr[P, y]
    while p >= 0:
        if tr[R, p] == y:
            pl = tr[L, p]
            r += 1 + (tr[SZ, pl] if pl >= 0 else 0)
        y = p
        p = tr[P, y]
    return r


@nb.njit(cache=True)
def _kth(tr, t, k):
    while True:
        _push(tr, t)
        left = tr[L, t]
        ls = tr[SZ, left] if left >= 0 else 0
        if k < ls:
            t = left
        elif k == ls:
            return t
        else:
            k -= ls + 1
            t = tr[R, t]


@nb.njit(cache=True)
def _flip_after(tr, prio, root, i):
    a, b = _split(tr, root, i + 1)
    if b >= 0:
        tr[FL, b] ^= 1
    root = _merge(tr, prio, a, b)
    tr[P, root] = -1
    return root


@nb.njit(cache=True)
def treap_append(tr, prio, root, v):
    tr[L, v] = -1
    tr[R, v] = -1
    tr[P, v] = -1
    tr[SZ, v] = 1
    tr[FL, v] = 0
    root = _merge(tr, prio, root, v)
    tr[P, root] = -1
    return root


@nb.njit(cache=True)
def treap_inorder(tr, root, out):
    # iterative in-order walk; returns the number of nodes written
    stack = np.empty(out.shape[0] + 1, dtype=np.int64)
    top = 0
    k = 0
    x = root
    while x >= 0 or top > 0:
        while x >= 0:
            _push(tr, x)
            stack[top] = x
            top += 1
            x = tr[L, x]
        top -= 1
        x = stack[top]
        out[k] = x
        k += 1
        x = tr[R, x]
    return k


@nb.njit(cache=True)
def treap_last(tr, root):
    return _kth(tr, root, tr[SZ, root] - 1)


@nb.njit(cache=True)
def closure_dfs(indptr, indices, onpath, tr, prio, root, seen, stamp, budget):
    """Depth-first endpoint closure with deduplication on the treap path.

    An endpoint is in the closure when ``seen[v] == stamp``.  Neighbour
    order and skip rules are those of the pure Python closure, so both visit
    the same states in the same order.

    Returns ``(status, rotations, w, root)``.  Status 0: closed.  Status 1:
    the current endpoint has the off-path neighbour ``w`` and the path is
    left in that rotated state.  Status 2: the budget ran out.  For 0 and 2
    the path is back in its initial order.
    """
    h = tr[SZ, root] - 1
    anc = np.empty(h + 2, dtype=np.int64)
    y = _kth(tr, root, h)
    for q in range(indptr[y], indptr[y + 1]):
        if not onpath[indices[q]]:
            return 1, 0, indices[q], root
    seen[y] = stamp
    # explicit stack of (endpoint, next neighbour slot, pivot that led here)
    st_y = np.empty(h + 2, dtype=np.int64)
    st_k = np.empty(h + 2, dtype=np.int64)
    st_u = np.empty(h + 2, dtype=np.int64)
    top = 0
    st_y[0] = y
    st_k[0] = indptr[y]
    st_u[0] = -1
    rotations = 0
    while top >= 0:
        y = st_y[top]
        k = st_k[top]
        if k == indptr[y + 1]:
            if st_u[top] >= 0:
                root = _flip_after(tr, prio, root, st_u[top])
            top -= 1
            continue
        st_k[top] = k + 1
        i = _rank(tr, indices[k], anc)
        if i >= h - 1:
            continue
        z = _kth(tr, root, i + 1)
        if seen[z] == stamp:
            continue
        if rotations >= budget:
            while top >= 0:
                if st_u[top] >= 0:
                    root = _flip_after(tr, prio, root, st_u[top])
                top -= 1
            return 2, rotations, -1, root
        root = _flip_after(tr, prio, root, i)
        rotations += 1
        seen[z] = stamp
        for q in range(indptr[z], indptr[z + 1]):
            if not onpath[indices[q]]:
                return 1, rotations, indices[q], root
        top += 1
        st_y[top] = z
        st_k[top] = indptr[z]
        st_u[top] = i
    return 0, rotations, -1, root
