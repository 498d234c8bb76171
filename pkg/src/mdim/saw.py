"""Trees of self-avoiding walks and the moments of matching measures.

The matching measure of a vertex-transitive lattice is the spectral measure
of its walk tree at the root, so its k-th moment is the number of closed
walks of length k at the root of that tree. Those counts are obtained without
building the tree: a depth-first search over self-avoiding walks carries the
occupied sites, and every node combines its children through

    W(y) = 1 / (1 - y * sum(W_child(y))),     y = x**2,

truncated so that a node at depth d keeps degrees up to H - d, where
H = K // 2 is the deepest level a closed walk of length K can reach.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from ._accel import quiet_overflow, set_threads
from .errors import InputError, ResourceLimitError
from .graph import Graph, LatticeSpec, graph_neighbor_table, neighbor_table

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**9

# residue channels: 0 stands for 2**64 (native wrap-around), then primes < 2**32
_PRIMES = (4294967291, 4294967279, 4294967231, 4294967197, 4294967189, 4294967161, 4294967143, 4294967111)


@dataclass(frozen=True)
class WalkCountTable:
    """Closed-walk counts ``a[0..K]`` at the root of a walk tree."""

    a: tuple[int, ...]
    root: str
    K: int


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``mu[0..K]`` of a symmetric measure with degree bound ``D``."""

    mu: tuple
    D: int
    source: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def K(self) -> int:
        return len(self.mu) - 1

    @property
    def support_radius(self) -> float:
        return 2.0 * math.sqrt(self.D - 1) if self.D >= 2 else 1.0

    def even(self) -> list:
        """Even moments ``mu_0, mu_2, ...``: the moments of z**2."""
        return list(self.mu[0::2])

    def truncate(self, K: int) -> "MomentSequence":
        if K > self.K:
            raise InputError(f"only {self.K} moments available, asked for {K}")
        return MomentSequence(self.mu[: K + 1], self.D, self.source, dict(self.meta))

    def to_json_obj(self) -> dict:
        return {
            "lattice": self.meta.get("lattice", self.source),
            "D": self.D,
            "source": self.source,
            "moments": [str(m) for m in self.mu],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "MomentSequence":
        try:
            mu = tuple(_parse_number(x) for x in obj["moments"])
            D = int(obj["D"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed moment JSON: {exc}") from exc
        meta = {"lattice": obj.get("lattice")} if obj.get("lattice") else {}
        return cls(mu, D, obj.get("source", "ingested"), meta)


def _parse_number(x):
    if isinstance(x, int):
        return x
    s = str(x).strip()
    if "/" in s:
        f = Fraction(s)
        return f.numerator if f.denominator == 1 else f
    return int(s)


# ------------------------------------------------------------------ helpers


def walk_bound(D: int, H: int) -> int:
    """Upper bound on closed walks of length 2H in any tree of max degree D."""
    if D <= 1:
        return 1
    return (4 * (D - 1)) ** H


def _moduli_for(bound: int) -> list[int]:
    mods = [0]
    prod = 1 << 64
    for p in _PRIMES:
        if prod > bound:
            break
        mods.append(p)
        prod *= p
    if prod <= bound:
        raise ResourceLimitError("walk counts exceed the available residue channels")
    return mods


def _crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        q = (1 << 64) if q == 0 else q
        r %= q
        # solve x + m*k == r (mod q)
        k = ((r - x) * pow(m, -1, q)) % q
        x += m * k
        m *= q
    return x


def _series_inverse_step(S: Sequence[int], L: int) -> list[int]:
    """W = 1 / (1 - y S) truncated at degree L (exact integers)."""
    W = [1] + [0] * L
    for j in range(1, L + 1):
        W[j] = sum(S[i - 1] * W[j - i] for i in range(1, j + 1) if i - 1 < len(S))
    return W


def _enumerate_prefixes(nbr: np.ndarray, root: int, depth: int, first: int | None) -> list[list[int]]:
    """All self-avoiding walks of exactly ``depth`` steps (or dead ends)."""
    out = []

    def rec(path):
        if len(path) - 1 == depth:
            out.append(list(path))
            return
        ks = range(nbr.shape[1]) if (len(path) > 1 or first is None) else [first]
        for k in ks:
            nb = int(nbr[path[-1], k])
            if nb >= 0 and nb not in path:
                path.append(nb)
                rec(path)
                path.pop()

    rec([root])
    return out


def _tree_series(
    nbr: np.ndarray,
    root: int,
    H: int,
    *,
    D: int,
    node_budget: int,
    split_depth: int | None,
    first: int | None = None,
) -> tuple[list[int], int]:
    """Exact series W_root[0..H]; optionally only the subtree through child ``first``.

    When ``first`` is given the returned series is the sum over that single
    root child (``S`` rather than ``W``), used for symmetric roots.
    """
    if H == 0:
        return ([1] if first is None else [0]), 0
    if split_depth is None:
        split_depth = min(H, 4 if D > 2 else 8)
    split_depth = max(1, min(split_depth, H))
    prefixes = _enumerate_prefixes(nbr, root, split_depth, first)
    full = [p for p in prefixes if len(p) == split_depth + 1]
    moduli = _moduli_for(walk_bound(D, H))
    series: dict[tuple, list[int]] = {}
    nodes = 0
    if full:
        paths = np.asarray(full, dtype=np.int64)
        chunks = np.array_split(np.arange(len(full)), max(1, min(64, len(full) // 16 or 1)))
        residues = np.zeros((len(moduli), len(full), H + 2), dtype=np.uint64)
        for ci, idx in enumerate(chunks):
            for mi, mod in enumerate(moduli):
                with quiet_overflow():
                    res = _kernels.batch_subtree_series(nbr, paths[idx], H, np.uint64(mod), node_budget)
                residues[mi, idx] = res
            nodes += int(residues[0, idx, H + 1].sum())
            if nodes > node_budget:
                raise ResourceLimitError(f"node budget {node_budget} exceeded")
            if len(chunks) > 1:
                log.debug("walk tree chunk %d/%d, %d nodes so far", ci + 1, len(chunks), nodes)
        for t, p in enumerate(full):
            coeffs = [_crt([int(residues[mi, t, j]) for mi in range(len(moduli))], moduli) for j in range(H - split_depth + 1)]
            series[tuple(p)] = coeffs

    def combine(path: list[int]) -> list[int]:
        d = len(path) - 1
        key = tuple(path)
        if key in series:
            return series[key]
        L = H - d
        S = [0] * L
        ks = range(nbr.shape[1]) if (d > 0 or first is None) else [first]
        for k in ks:
            nb = int(nbr[path[-1], k])
            if nb < 0 or nb in path:
                continue
            if d + 1 >= H:
                S[0] += 1
                continue
            child = combine(path + [nb])
            for j in range(L):
                S[j] += child[j]
        if d == 0 and first is not None:
            return S
        return _series_inverse_step(S, L)

    return combine([root]), nodes + len(prefixes)


# --------------------------------------------------------------- operations


def _root_symmetric(lattice: LatticeSpec) -> bool:
    # every lattice kind here has an automorphism group that fixes the origin
    # and acts transitively on its neighbors
    return lattice.kind in ("hypercubic", "honeycomb", "bethe")


def _bethe_series(d: int, H: int) -> list[int]:
    """Closed-walk series at the root of the d-regular tree, truncated at y^H."""
    # B: a non-root vertex with d-1 children, all isomorphic to itself
    B = [1] + [0] * H
    for _ in range(H + 1):
        B = _series_inverse_step([(d - 1) * b for b in B[:H]], H)
    return _series_inverse_step([d * b for b in B[:H]], H)


def closed_walk_counts(
    source: Graph | LatticeSpec,
    K: int,
    vertex: int = 0,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    split_depth: int | None = None,
    use_symmetry: bool = True,
    threads: int | None = None,
) -> WalkCountTable:
    """Closed-walk counts ``a_0..a_K`` at the root of the walk tree.

    For a finite ``Graph`` the tree is rooted at ``vertex``; for a lattice at
    its origin (any site, by transitivity).
    """
    if K < 0:
        raise InputError("K must be >= 0")
    H = K // 2
    set_threads(threads)
    if isinstance(source, LatticeSpec):
        D = source.coordination
        if source.kind == "bethe":
            W = _bethe_series(D, H)
        else:
            nbr, _ = neighbor_table(source, H)
            if use_symmetry and _root_symmetric(source) and H > 0:
                S, _ = _tree_series(nbr, 0, H, D=D, node_budget=node_budget, split_depth=split_depth, first=0)
                W = _series_inverse_step([D * s for s in S], H)
            else:
                W, _ = _tree_series(nbr, 0, H, D=D, node_budget=node_budget, split_depth=split_depth)
        root = f"{source.name}:origin"
    else:
        if not 0 <= vertex < source.n:
            raise InputError(f"vertex {vertex} not in graph")
        nbr = graph_neighbor_table(source)
        W, _ = _tree_series(
            nbr, vertex, H, D=source.max_degree, node_budget=node_budget, split_depth=split_depth
        )
        root = f"graph:{vertex}"
    a = [0] * (K + 1)
    for j in range(H + 1):
        a[2 * j] = W[j]
    return WalkCountTable(tuple(a), root, K)


def lattice_moments(lattice: LatticeSpec, K: int, **kwargs) -> MomentSequence:
    """Moments of the matching measure of a vertex-transitive lattice."""
    table = closed_walk_counts(lattice, K, **kwargs)
    return MomentSequence(table.a, lattice.coordination, f"lattice:{lattice.name}", {"lattice": lattice.name})


def average_finite_moments(g: Graph, K: int, **kwargs) -> MomentSequence:
    """Average over roots of the walk-tree moments; equals the matching measure's moments."""
    if g.n == 0:
        raise InputError("empty graph has no matching measure")
    total = [0] * (K + 1)
    for v in range(g.n):
        a = closed_walk_counts(g, K, v, **kwargs).a
        for k in range(K + 1):
            total[k] += a[k]
    mu = tuple(Fraction(x, g.n) for x in total)
    mu = tuple(m.numerator if m.denominator == 1 else m for m in mu)
    return MomentSequence(mu, max(g.max_degree, 1), "finite:saw-average")


def build_saw_tree(g: Graph, v: int, depth: int | None = None, *, node_budget: int = 10**6) -> Graph:
    """Explicit tree of self-avoiding walks from ``v`` of length <= ``depth``.

    Vertex 0 is the root; ``labels`` holds the walks as vertex tuples. Meant
    as an oracle for small graphs.
    """
    depth = g.n if depth is None else depth
    labels: list[tuple[int, ...]] = [(v,)]
    edges: list[tuple[int, int]] = []
    stack = [0]
    while stack:
        i = stack.pop()
        walk = labels[i]
        if len(walk) - 1 >= depth:
            continue
        for w in g.adjacency[walk[-1]]:
            if w in walk:
                continue
            labels.append(walk + (w,))
            if len(labels) > node_budget:
                raise ResourceLimitError(f"walk tree exceeds {node_budget} nodes")
            j = len(labels) - 1
            edges.append((i, j))
            stack.append(j)
    return Graph.from_edges(len(labels), edges, labels)


def adjacency_power_counts(g: Graph, root: int, K: int) -> list[int]:
    """Closed walks of length 0..K at ``root`` via repeated adjacency products."""
    vec = [0] * g.n
    vec[root] = 1
    out = [1]
    for _ in range(K):
        vec = [sum(vec[w] for w in g.adjacency[u]) for u in range(g.n)]
        out.append(vec[root])
    return out


def count_self_avoiding_walks(lattice: LatticeSpec, n: int) -> list[int]:
    """Self-avoiding walk counts c_0..c_n from the origin (sanity data)."""
    nbr, _ = neighbor_table(lattice, n)
    return [int(c) for c in _kernels.count_walks(nbr, 0, n)]
