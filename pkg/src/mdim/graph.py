"""Finite graphs, lattice patches and neighbor rules for infinite lattices.

Graphs are immutable: every structural operation returns a new ``Graph``.
Lattice sites are small integer tuples:

* hypercubic(d): a d-tuple of integers,
* honeycomb: ``(x, y)`` in the brick-wall embedding; the parity bit is
  ``(x + y) % 2`` and decides whether the vertical bond points up or down,
* bethe(d): a reduced word over ``range(d)`` (no letter repeated twice in a row).
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from .errors import InputError


@dataclass(frozen=True)
class Graph:
    """Finite simple undirected graph on vertices ``0..n-1``.

    ``labels`` optionally names each vertex (e.g. lattice sites); it does not
    take part in equality.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[Hashable, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge {(u, v)} out of range for n={self.n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if u > v:
                raise InputError(f"edge {(u, v)} is not normalised (u < v)")
            if (u, v) in seen:
                raise InputError(f"parallel edge {(u, v)}")
            seen.add((u, v))
        if list(self.edges) != sorted(self.edges):
            raise InputError("edge list must be sorted")
        if self.labels is not None and len(self.labels) != self.n:
            raise InputError("labels must have one entry per vertex")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence[int]],
        labels: Sequence[Hashable] | None = None,
        *,
        allow_duplicates: bool = False,
    ) -> "Graph":
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            norm.append((u, v) if u < v else (v, u))
        if allow_duplicates:
            norm = set(norm)
        return cls(n, tuple(sorted(norm)), None if labels is None else tuple(labels))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def delete_vertices(self, vs: Iterable[int]) -> "Graph":
        drop = set(vs)
        keep = [v for v in range(self.n) if v not in drop]
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        labels = None if self.labels is None else [self.labels[v] for v in keep]
        return Graph.from_edges(len(keep), edges, labels)

    def delete_vertex(self, v: int) -> "Graph":
        return self.delete_vertices([v])

    def delete_edge(self, u: int, v: int) -> "Graph":
        e = (min(u, v), max(u, v))
        if e not in set(self.edges):
            raise InputError(f"no edge {e}")
        return Graph(self.n, tuple(x for x in self.edges if x != e), self.labels)

    def disjoint_union(self, other: "Graph") -> "Graph":
        shifted = [(u + self.n, v + self.n) for u, v in other.edges]
        return Graph.from_edges(self.n + other.n, list(self.edges) + shifted)

    def copies(self, k: int) -> "Graph":
        g = Graph(0, ())
        for _ in range(k):
            g = g.disjoint_union(self)
        return g

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [], [s]
            while queue:
                u = queue.pop()
                comp.append(u)
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]})

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        try:
            obj = json.loads(text)
            n = int(obj["n"])
            edges = obj["edges"]
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"malformed graph JSON: {exc}") from exc
        return cls.from_edges(n, edges)


# ---------------------------------------------------------------- builders


def build_box(d: int, sides: Sequence[int], periodic: bool = False) -> Graph:
    """Box (or torus when ``periodic``) in Z^d with the given side lengths."""
    if d < 1 or len(sides) != d:
        raise InputError("need d >= 1 and exactly d side lengths")
    if any(s < 1 for s in sides):
        raise InputError("side lengths must be >= 1")
    if periodic and any(s < 3 for s in sides):
        raise InputError("periodic boxes need every side >= 3 (otherwise parallel edges arise)")
    coords = list(itertools.product(*(range(s) for s in sides)))
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for c in coords:
        for axis in range(d):
            nxt = list(c)
            nxt[axis] += 1
            if nxt[axis] == sides[axis]:
                if not periodic:
                    continue
                nxt[axis] = 0
            edges.append((index[c], index[tuple(nxt)]))
    return Graph.from_edges(len(coords), edges, coords)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError("cycles need n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def circulant_graph(n: int, jumps: Iterable[int]) -> Graph:
    edges = set()
    for j in jumps:
        j %= n
        if j == 0:
            raise InputError("jump 0 would create loops")
        for i in range(n):
            u, v = i, (i + j) % n
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def cylinder_graph(m: int, n: int) -> Graph:
    """C_m x P_n: ``n`` layers, each a cycle of length ``m``; vertex ``j*m + i``."""
    if m < 3 or n < 1:
        raise InputError("cylinder needs m >= 3, n >= 1")
    edges = []
    for j in range(n):
        for i in range(m):
            v = j * m + i
            edges.append((v, j * m + (i + 1) % m))
            if j + 1 < n:
                edges.append((v, v + m))
    return Graph.from_edges(m * n, edges)


def torus_graph(m: int, n: int) -> Graph:
    """C_m x C_n with the same vertex numbering as :func:`cylinder_graph`."""
    if m < 3 or n < 3:
        raise InputError("torus needs both sides >= 3")
    edges = []
    for j in range(n):
        for i in range(m):
            v = j * m + i
            edges.append((v, j * m + (i + 1) % m))
            edges.append((v, ((j + 1) % n) * m + i))
    return Graph.from_edges(m * n, edges)


def _brickwall_neighbors(x: int, y: int) -> list[tuple[int, int]]:
    vertical = (x, y + 1) if (x + y) % 2 == 0 else (x, y - 1)
    return [(x - 1, y), (x + 1, y), vertical]


def _hexagon_sites(i: int, j: int) -> list[tuple[int, int]]:
    # cell (i, j): sites x0..x0+2 on rows j and j+1, with x0 + j even
    x0 = 2 * i + (j % 2)
    return [(x0 + dx, j + dy) for dy in (0, 1) for dx in range(3)]


def _hexagon_edges(i: int, j: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    x0 = 2 * i + (j % 2)
    lo = [(x0 + dx, j) for dx in range(3)]
    hi = [(x0 + dx, j + 1) for dx in range(3)]
    return [
        (lo[0], lo[1]), (lo[1], lo[2]),
        (hi[0], hi[1]), (hi[1], hi[2]),
        (lo[0], hi[0]), (lo[2], hi[2]),
    ]


def build_honeycomb_patch(rows: int, cols: int, periodic: bool = False) -> Graph:
    """Honeycomb patch of ``rows x cols`` hexagons in the brick-wall embedding.

    The open patch is the union of the hexagonal cells. The periodic version
    is the brick-wall torus on ``2*cols`` by ``rows`` sites; it needs an even
    number of rows (so the up/down bond pattern wraps consistently) and at
    least two columns of cells.
    """
    if rows < 1 or cols < 1:
        raise InputError("rows and cols must be >= 1")
    if periodic:
        if rows % 2 or cols < 2:
            raise InputError("periodic honeycomb needs an even number of rows and cols >= 2")
        W, H = 2 * cols, rows
        sites = [(x, y) for y in range(H) for x in range(W)]
        index = {s: k for k, s in enumerate(sites)}
        edges = set()
        for x, y in sites:
            for nx_, ny_ in _brickwall_neighbors(x, y):
                u, v = index[(x, y)], index[(nx_ % W, ny_ % H)]
                edges.add((min(u, v), max(u, v)))
        return Graph.from_edges(len(sites), edges, sites)
    edge_set = set()
    for j in range(rows):
        for i in range(cols):
            for a, b in _hexagon_edges(i, j):
                edge_set.add((min(a, b), max(a, b)))
    sites = sorted({s for e in edge_set for s in e}, key=lambda s: (s[1], s[0]))
    index = {s: k for k, s in enumerate(sites)}
    return Graph.from_edges(len(sites), [(index[a], index[b]) for a, b in edge_set], sites)


# ---------------------------------------------------------------- lattices


@dataclass(frozen=True)
class LatticeSpec:
    """Infinite vertex-transitive lattice given by a local neighbor rule."""

    kind: str  # "hypercubic" | "honeycomb" | "bethe"
    dim: int = 0

    def __post_init__(self) -> None:
        if self.kind == "hypercubic" and self.dim < 1:
            raise InputError("hypercubic lattice needs dim >= 1")
        if self.kind == "bethe" and self.dim < 2:
            raise InputError("bethe lattice needs degree >= 2")
        if self.kind not in ("hypercubic", "honeycomb", "bethe"):
            raise InputError(f"unknown lattice kind {self.kind!r}")

    @classmethod
    def parse(cls, name: str) -> "LatticeSpec":
        """Parse ``z2`` .. ``z7``, ``hex`` or ``bethe:d``."""
        s = name.strip().lower()
        if s in ("hex", "honeycomb"):
            return cls("honeycomb")
        if s.startswith("bethe:"):
            return cls("bethe", int(s.split(":", 1)[1]))
        if s.startswith("z") and s[1:].isdigit():
            return cls("hypercubic", int(s[1:]))
        if s.endswith("d") and s[:-1].isdigit():
            return cls("hypercubic", int(s[:-1]))
        raise InputError(f"unknown lattice {name!r}")

    @property
    def name(self) -> str:
        if self.kind == "hypercubic":
            return f"z{self.dim}"
        if self.kind == "honeycomb":
            return "hex"
        return f"bethe:{self.dim}"

    @property
    def coordination(self) -> int:
        if self.kind == "hypercubic":
            return 2 * self.dim
        if self.kind == "honeycomb":
            return 3
        return self.dim

    D = coordination

    @property
    def support_radius(self) -> float:
        return 2.0 * math.sqrt(self.coordination - 1)

    def origin(self) -> tuple:
        if self.kind == "hypercubic":
            return (0,) * self.dim
        if self.kind == "honeycomb":
            return (0, 0)
        return ()


def site_parity(site: tuple[int, int]) -> int:
    """Bipartition class of a honeycomb site."""
    return (site[0] + site[1]) % 2


def neighbors(lattice: LatticeSpec, site: tuple) -> list[tuple]:
    if lattice.kind == "hypercubic":
        out = []
        for axis in range(lattice.dim):
            for step in (1, -1):
                nxt = list(site)
                nxt[axis] += step
                out.append(tuple(nxt))
        return out
    if lattice.kind == "honeycomb":
        return _brickwall_neighbors(*site)
    out = []
    for a in range(lattice.dim):
        if site and site[-1] == a:
            out.append(site[:-1])
        else:
            out.append(site + (a,))
    return out


def ball_sites(lattice: LatticeSpec, r: int) -> list[tuple]:
    """Sites within graph distance ``r`` of the origin, in BFS order."""
    if r < 0:
        raise InputError("radius must be >= 0")
    root = lattice.origin()
    dist = {root: 0}
    order = [root]
    queue = deque([root])
    while queue:
        s = queue.popleft()
        if dist[s] == r:
            continue
        for t in neighbors(lattice, s):
            if t not in dist:
                dist[t] = dist[s] + 1
                order.append(t)
                queue.append(t)
    return order


def ball(lattice: LatticeSpec, r: int) -> Graph:
    """Induced subgraph on the ``r``-ball around the origin; vertex 0 is the root."""
    sites = ball_sites(lattice, r)
    index = {s: i for i, s in enumerate(sites)}
    edges = set()
    for s in sites:
        for t in neighbors(lattice, s):
            if t in index:
                u, v = index[s], index[t]
                edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(len(sites), edges, sites)


def neighbor_table(lattice: LatticeSpec, r: int):
    """Array form of the ``r``-ball for the compiled kernels.

    Returns ``(table, sites)`` where ``table[i, k]`` is the index of the
    k-th neighbor of site ``i`` or -1 when it lies outside the ball.
    """
    import numpy as np

    sites = ball_sites(lattice, r)
    index = {s: i for i, s in enumerate(sites)}
    D = lattice.coordination
    table = np.full((len(sites), D), -1, dtype=np.int64)
    for i, s in enumerate(sites):
        for k, t in enumerate(neighbors(lattice, s)):
            table[i, k] = index.get(t, -1)
    return table, sites


def graph_neighbor_table(g: Graph):
    import numpy as np

    D = max(g.max_degree, 1)
    table = np.full((g.n, D), -1, dtype=np.int64)
    for v, adj in enumerate(g.adjacency):
        table[v, : len(adj)] = adj
    return table


def wl_hash(g: Graph, rounds: int | None = None) -> str:
    """Colour-refinement hash; equal for isomorphic graphs."""
    import hashlib

    colors = [str(len(a)) for a in g.adjacency]
    rounds = g.n if rounds is None else rounds
    for _ in range(rounds):
        new = [
            hashlib.blake2b(
                (colors[v] + "|" + ",".join(sorted(colors[w] for w in g.adjacency[v]))).encode(),
                digest_size=8,
            ).hexdigest()
            for v in range(g.n)
        ]
        if len(set(new)) == len(set(colors)):
            colors = new
            break
        colors = new
    summary = f"{g.n}:{g.num_edges}:" + ",".join(sorted(colors))
    return hashlib.blake2b(summary.encode(), digest_size=16).hexdigest()


def is_isomorphic(g: Graph, h: Graph) -> bool:
    import networkx as nx

    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    a, b = nx.Graph(), nx.Graph()
    a.add_nodes_from(range(g.n))
    a.add_edges_from(g.edges)
    b.add_nodes_from(range(h.n))
    b.add_edges_from(h.edges)
    return nx.vf2pp_is_isomorphic(a, b)
