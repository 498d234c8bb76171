"""The built-in test corpus: small named graphs, seeded random graphs, circulants."""

from __future__ import annotations

import itertools

import numpy as np

from .graph import (
    Graph,
    build_box,
    build_honeycomb_patch,
    circulant_graph,
    complete_graph,
    cycle_graph,
    path_graph,
)

CORPUS_SIZE = 50
CORPUS_SEED = 20240601

# vertex 0 is the apex (degree 4), 1..4 the rim
PYRAMID_EDGES = ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 3), (3, 4))


def pyramid() -> Graph:
    """Square pyramid: apex 0 joined to the 4-cycle 1-2-3-4."""
    return Graph.from_edges(5, PYRAMID_EDGES)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def star(k: int) -> Graph:
    return complete_bipartite(1, k)


def wheel(k: int) -> Graph:
    """Hub 0 joined to the cycle 1..k."""
    rim = [(1 + i, 1 + (i + 1) % k) for i in range(k)]
    return Graph.from_edges(k + 1, rim + [(0, 1 + i) for i in range(k)])


def hypercube(d: int) -> Graph:
    n = 1 << d
    return Graph.from_edges(n, [(v, v | 1 << b) for v in range(n) for b in range(d) if not v >> b & 1])


def prism(k: int) -> Graph:
    ring = [(i, (i + 1) % k) for i in range(k)]
    return Graph.from_edges(2 * k, ring + [(k + a, k + b) for a, b in ring] + [(i, k + i) for i in range(k)])


def named_graphs() -> dict[str, Graph]:
    return {
        "K2": complete_graph(2),
        "P3": path_graph(3),
        "P4": path_graph(4),
        "P5": path_graph(5),
        "P8": path_graph(8),
        "C3": cycle_graph(3),
        "C4": cycle_graph(4),
        "C5": cycle_graph(5),
        "C6": cycle_graph(6),
        "C7": cycle_graph(7),
        "C9": cycle_graph(9),
        "K4": complete_graph(4),
        "K5": complete_graph(5),
        "K6": complete_graph(6),
        "star4": star(4),
        "K2,3": complete_bipartite(2, 3),
        "K3,3": complete_bipartite(3, 3),
        "K4,4": complete_bipartite(4, 4),
        "pyramid": pyramid(),
        "petersen": petersen(),
        "cube": hypercube(3),
        "prism3": prism(3),
        "prism5": prism(5),
        "wheel5": wheel(5),
        "grid2x3": build_box(2, [2, 3]),
        "grid3x3": build_box(2, [3, 3]),
        "hexagon": build_honeycomb_patch(1, 1),
        "hex1x2": build_honeycomb_patch(1, 2),
        "empty3": Graph.from_edges(3, []),
        "K2+P3": complete_graph(2).disjoint_union(path_graph(3)),
    }


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_graphs(count: int, seed: int = CORPUS_SEED, n_range=(4, 10)) -> dict[str, Graph]:
    rng = np.random.default_rng(seed)
    out = {}
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        p = float(rng.uniform(0.25, 0.75))
        out[f"random{i:02d}_n{n}"] = random_graph(n, p, rng)
    return out


def corpus() -> dict[str, Graph]:
    """Fifty graphs on at most 10 vertices: the named ones plus seeded random graphs."""
    named = named_graphs()
    out = dict(named)
    out.update(random_graphs(CORPUS_SIZE - len(named)))
    return out


def circulant_corpus(max_n: int = 12) -> dict[str, Graph]:
    """Every connected circulant graph on 3..max_n vertices, one per jump set."""
    out = {}
    for n in range(3, max_n + 1):
        half = n // 2
        for r in range(1, half + 1):
            for jumps in itertools.combinations(range(1, half + 1), r):
                g = circulant_graph(n, jumps)
                if g.is_connected():
                    out[f"C{n}{list(jumps)}"] = g
    return out
