"""Compiled inner loops for walking trees of self-avoiding walks.

All arithmetic is done on uint64 residues: ``modulus == 0`` means plain
wrap-around (i.e. modulo 2**64), otherwise values are reduced modulo a prime
below 2**32 so that products never overflow. Callers recombine residues with
the Chinese remainder theorem.
"""

import numpy as np

from ._accel import njit, prange


@njit(cache=True)
def _addmod(a, b, modulus):
    s = a + b
    if modulus != 0:
        s %= modulus
    return s


@njit(cache=True)
def _mulmod(a, b, modulus):
    p = a * b
    if modulus != 0:
        p %= modulus
    return p


@njit(cache=True)
def subtree_series(nbr, path, H, modulus, budget):
    """Returning-walk series of the walk tree at the endpoint of ``path``.

    ``nbr`` is the neighbor table (-1 for missing entries), ``path`` the
    sites of a self-avoiding walk starting at the root, so its endpoint sits
    at depth ``d0 = len(path) - 1``. The result ``w`` holds coefficients of
    y = x**2 for degrees ``0..H-d0`` (the rest of the buffer is zero): ``w[j]``
    counts closed walks of length 2j from the endpoint that stay inside its
    subtree. Nodes at depth ``H`` are never entered, only counted.

    ``out[H + 1]`` receives the number of tree nodes entered; the walk stops
    early (with a meaningless series) once it exceeds ``budget``.
    """
    nsites = nbr.shape[0]
    D = nbr.shape[1]
    d0 = path.shape[0] - 1
    out = np.zeros(H + 2, dtype=np.uint64)
    if d0 >= H:
        out[0] = 1
        return out
    occupied = np.zeros(nsites, dtype=np.bool_)
    for i in range(path.shape[0]):
        occupied[path[i]] = True
    site = np.zeros(H + 1, dtype=np.int64)
    nxt = np.zeros(H + 1, dtype=np.int64)
    acc = np.zeros((H + 1, H + 1), dtype=np.uint64)
    w = np.zeros(H + 1, dtype=np.uint64)
    one = np.uint64(1)
    nodes = 1
    depth = d0
    site[d0] = path[d0]
    while True:
        k = nxt[depth]
        if k < D:
            nxt[depth] = k + 1
            nb = nbr[site[depth], k]
            if nb < 0 or occupied[nb]:
                continue
            if depth + 1 == H:
                acc[depth, 0] = _addmod(acc[depth, 0], one, modulus)
            else:
                nodes += 1
                if nodes > budget:
                    out[H + 1] = nodes
                    return out
                depth += 1
                site[depth] = nb
                nxt[depth] = 0
                occupied[nb] = True
                for j in range(H - depth):
                    acc[depth, j] = 0
            continue
        # all children done: W = 1 / (1 - y S), truncated at y^(H - depth)
        L = H - depth
        w[0] = one
        for j in range(1, L + 1):
            s = np.uint64(0)
            for i in range(1, j + 1):
                s = _addmod(s, _mulmod(acc[depth, i - 1], w[j - i], modulus), modulus)
            w[j] = s
        if depth == d0:
            for j in range(L + 1):
                out[j] = w[j]
            out[H + 1] = nodes
            return out
        occupied[site[depth]] = False
        depth -= 1
        for j in range(L + 1):
            acc[depth, j] = _addmod(acc[depth, j], w[j], modulus)


@njit(cache=True, parallel=True)
def batch_subtree_series(nbr, paths, H, modulus, budget):
    """``subtree_series`` for every row of ``paths`` (equal-length prefixes)."""
    ntasks = paths.shape[0]
    out = np.zeros((ntasks, H + 2), dtype=np.uint64)
    for t in prange(ntasks):
        out[t, :] = subtree_series(nbr, paths[t], H, modulus, budget)
    return out


@njit(cache=True)
def count_walks(nbr, root, depth):
    """Number of self-avoiding walks of each length ``0..depth`` from ``root``."""
    nsites = nbr.shape[0]
    D = nbr.shape[1]
    counts = np.zeros(depth + 1, dtype=np.int64)
    counts[0] = 1
    if depth == 0:
        return counts
    occupied = np.zeros(nsites, dtype=np.bool_)
    site = np.zeros(depth + 1, dtype=np.int64)
    nxt = np.zeros(depth + 1, dtype=np.int64)
    d = 0
    site[0] = root
    occupied[root] = True
    while d >= 0:
        k = nxt[d]
        if k < D and d < depth:
            nxt[d] = k + 1
            nb = nbr[site[d], k]
            if nb < 0 or occupied[nb]:
                continue
            d += 1
            counts[d] += 1
            site[d] = nb
            nxt[d] = 0
            occupied[nb] = True
        else:
            occupied[site[d]] = False
            d -= 1
    return counts
