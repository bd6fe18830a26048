"""Numba kernels for the batched signature learner and subset coloring."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def color_subsets(member, indptr, indices):
    """Greedy-color every row's subset of a sorted vertex list.

    ``member[i, v]`` says whether local vertex ``v`` is in subset ``i``; the
    CSR arrays hold the known edges between local vertices.  Vertices are
    visited in ascending local index and take the smallest color unused by an
    already colored neighbor.  Returns ``(colors, class_counts)`` with ``-1``
    for absent vertices.
    """
    rows, nv = member.shape
    colors = np.full((rows, nv), -1, np.int64)
    counts = np.zeros(rows, np.int64)
    maxdeg = 0
    for v in range(nv):
        deg = indptr[v + 1] - indptr[v]
        if deg > maxdeg:
            maxdeg = deg
    used = np.zeros(maxdeg + 2, np.bool_)
    for i in range(rows):
        top = 0
        for v in range(nv):
            if not member[i, v]:
                continue
            for t in range(indptr[v], indptr[v + 1]):
                w = indices[t]
                if w < v and colors[i, w] >= 0:
                    used[colors[i, w]] = True
            c = 0
            while used[c]:
                c += 1
            colors[i, v] = c
            if c + 1 > top:
                top = c + 1
            for t in range(indptr[v], indptr[v + 1]):
                w = indices[t]
                if w < v and colors[i, w] >= 0:
                    used[colors[i, w]] = False
        counts[i] = top
    return colors, counts


@njit(cache=True)
def enumerate_class_pairs(mem_a, col_a, nc_a, mem_b, col_b, nc_b, ea, eb, cap):
    """List the class pairs that contain at least one crossing edge.

    Class pairs come out in lexicographic ``(i, k, j, l)`` order: subset ``i``
    of A, class ``k`` of it, subset ``j`` of B, class ``l`` of it.  ``ea``/``eb``
    hold the crossing edges as local indices, sorted by ``(a, b)``.  For class
    pair ``c`` the A side is ``a_ent[a_ptr[c]:a_ptr[c+1]]`` (ascending local
    indices), likewise for B, and its edges ``e_ptr[c]:e_ptr[c+1]`` point into
    those entry arrays.  ``cap`` must bound the number of (edge, i, j)
    incidences.
    """
    m = ea.shape[0]
    n_b_local = mem_b.shape[1]
    a_ptr = np.zeros(cap + 1, np.int64)
    b_ptr = np.zeros(cap + 1, np.int64)
    e_ptr = np.zeros(cap + 1, np.int64)
    a_ent = np.empty(cap, np.int64)
    b_ent = np.empty(cap, np.int64)
    e_a = np.empty(cap, np.int64)
    e_b = np.empty(cap, np.int64)
    e_ik = np.empty(m, np.int64)
    e_j = np.empty(m, np.int64)
    e_l = np.empty(m, np.int64)
    b_pos = np.full(n_b_local, -1, np.int64)
    stamp = np.full(n_b_local, -1, np.int64)
    ncp = 0
    na = 0
    nb = 0
    ne = 0
    for i in range(mem_a.shape[0]):
        for k in range(nc_a[i]):
            n_ik = 0
            for e in range(m):
                if mem_a[i, ea[e]] and col_a[i, ea[e]] == k:
                    e_ik[n_ik] = e
                    n_ik += 1
            if n_ik == 0:
                continue
            for j in range(mem_b.shape[0]):
                n_j = 0
                for x in range(n_ik):
                    e = e_ik[x]
                    if mem_b[j, eb[e]]:
                        e_j[n_j] = e
                        n_j += 1
                if n_j == 0:
                    continue
                for l in range(nc_b[j]):
                    n_l = 0
                    for x in range(n_j):
                        e = e_j[x]
                        if col_b[j, eb[e]] == l:
                            e_l[n_l] = e
                            n_l += 1
                    if n_l == 0:
                        continue
                    # A side: edges are sorted by a, so distinct a's are runs
                    last = -1
                    for x in range(n_l):
                        a = ea[e_l[x]]
                        if a != last:
                            a_ent[na] = a
                            na += 1
                            last = a
                        e_a[ne + x] = na - 1
                    # B side: distinct b's, insertion sorted (the lists are tiny)
                    n_bs = 0
                    for x in range(n_l):
                        b = eb[e_l[x]]
                        if stamp[b] == ncp:
                            continue
                        stamp[b] = ncp
                        y = nb + n_bs
                        while y > nb and b_ent[y - 1] > b:
                            b_ent[y] = b_ent[y - 1]
                            y -= 1
                        b_ent[y] = b
                        n_bs += 1
                    for y in range(nb, nb + n_bs):
                        b_pos[b_ent[y]] = y
                    for x in range(n_l):
                        e_b[ne + x] = b_pos[eb[e_l[x]]]
                    nb += n_bs
                    ne += n_l
                    ncp += 1
                    a_ptr[ncp] = na
                    b_ptr[ncp] = nb
                    e_ptr[ncp] = ne
    return (a_ptr[: ncp + 1], a_ent[:na], b_ptr[: ncp + 1], b_ent[:nb],
            e_ptr[: ncp + 1], e_a[:ne], e_b[:ne])


@njit(cache=True)
def signature_batch(
    raw, thr, n_tests,
    a_ptr, a_ent, b_ptr, b_ent,
    e_ptr, e_a, e_b,
    cost_table,
    inferred,
):
    """Run the signature test on a run of consecutive class pairs.

    For class pair ``c`` the B side entries are ``b_ptr[c]:b_ptr[c+1]`` and
    its random 16-bit lanes are consumed b-major: ``n_tests`` per B vertex,
    in ascending vertex order, and each class pair starts on a word boundary.
    Bit ``t`` of ``chi(b)`` is set when the value is below ``thr``.  Edges
    ``e_ptr[c]:e_ptr[c+1]`` give the true adjacency as entry indices; they only simulate what the idealized group test returns
    for each test set (``chi(a)`` is the OR over neighbors).

    Sets ``inferred[a, b]`` (local indices) for every pair whose B signature
    is contained in the A signature and returns the per class pair charges.
    """
    n_cp = a_ptr.shape[0] - 1
    words = (n_tests + 63) // 64
    charges = np.zeros(n_cp, np.int64)
    off = 0
    max_b = 0
    max_a = 0
    for c in range(n_cp):
        max_b = max(max_b, b_ptr[c + 1] - b_ptr[c])
        max_a = max(max_a, a_ptr[c + 1] - a_ptr[c])
    chib = np.zeros((max_b, words), np.uint64)
    chia = np.zeros((max_a, words), np.uint64)
    cnt = np.zeros(words * 64, np.int64)
    for c in range(n_cp):
        a0 = a_ptr[c]
        na = a_ptr[c + 1] - a0
        b0 = b_ptr[c]
        nb = b_ptr[c + 1] - b0
        for bb in range(nb):
            base = off + bb * n_tests
            for w in range(words):
                acc = np.uint64(0)
                top = min(64, n_tests - w * 64)
                for t in range(top):
                    acc |= np.uint64(raw[base + w * 64 + t] < thr) << np.uint64(t)
                chib[bb, w] = acc
        off += (nb * n_tests + 3) // 4 * 4
        chia[:na, :] = 0
        for e in range(e_ptr[c], e_ptr[c + 1]):
            aa = e_a[e] - a0
            bb = e_b[e] - b0
            for w in range(words):
                chia[aa, w] |= chib[bb, w]
        cnt[:] = 0
        for aa in range(na):
            for w in range(words):
                x = chia[aa, w]
                for t in range(min(64, n_tests - w * 64)):
                    cnt[w * 64 + t] += np.int64((x >> np.uint64(t)) & np.uint64(1))
        q = cost_table[na] + cost_table[nb]
        for t in range(n_tests):
            q += cost_table[cnt[t]]
        charges[c] = q
        for aa in range(na):
            for bb in range(nb):
                inside = True
                for w in range(words):
                    if chib[bb, w] & ~chia[aa, w]:
                        inside = False
                        break
                if inside:
                    inferred[a_ent[a0 + aa], b_ent[b0 + bb]] = True
    return charges
