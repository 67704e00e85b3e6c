"""Undirected simple graphs and the road-network construction.

Vertices are dense integers ``0..n-1``. Edges are stored once, as a sorted
``(m, 2)`` array with ``i < j`` in every row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InputError


def _canonical_edges(n: int, pairs: np.ndarray, dedupe: bool) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if pairs.min() < 0 or pairs.max() >= n:
        bad = pairs[(pairs < 0).any(axis=1) | (pairs >= n).any(axis=1)][0]
        raise InputError(f"edge ({bad[0]}, {bad[1]}) has an endpoint outside 0..{n - 1}")
    loops = pairs[:, 0] == pairs[:, 1]
    if loops.any():
        v = pairs[loops][0, 0]
        raise InputError(f"self-loop at vertex {v}")
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    order = np.lexsort((hi, lo))
    edges = np.column_stack((lo[order], hi[order]))
    dup = np.zeros(len(edges), dtype=bool)
    dup[1:] = (edges[1:] == edges[:-1]).all(axis=1)
    if dup.any():
        if not dedupe:
            i, j = edges[dup][0]
            raise InputError(f"duplicate edge ({i}, {j})")
        edges = edges[~dup]
    return edges


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``."""

    n: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise InputError("vertex count must be nonnegative")
        edges = _canonical_edges(self.n, self.edges, dedupe=False)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Sequence[int]], dedupe: bool = False) -> "Graph":
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        return cls(n, _canonical_edges(n, arr, dedupe=dedupe))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix in CSR form, zero diagonal."""
        m = len(self.edges)
        rows = np.concatenate((self.edges[:, 0], self.edges[:, 1]))
        cols = np.concatenate((self.edges[:, 1], self.edges[:, 0]))
        a = sp.csr_matrix((np.ones(2 * m), (rows, cols)), shape=(self.n, self.n))
        a.sort_indices()
        return a

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        deg.setflags(write=False)
        return deg

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def laplacian(self) -> sp.csr_matrix:
        return (sp.diags(self.degree.astype(float)) - self.adjacency).tocsr()

    def incidence(self) -> sp.csr_matrix:
        """Signed edge-vertex incidence ``B`` with ``B.T @ B`` equal to the Laplacian."""
        m = len(self.edges)
        rows = np.repeat(np.arange(m), 2)
        cols = self.edges.ravel()
        vals = np.tile([1.0, -1.0], m)
        return sp.csr_matrix((vals, (rows, cols)), shape=(m, self.n))

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edges}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass(frozen=True)
class RoadNetworkDescription:
    """Roads plus the groups of roads meeting at each intersection."""

    roads: tuple[str, ...]
    intersections: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        roads = tuple(str(r) for r in self.roads)
        if len(set(roads)) != len(roads):
            seen = set()
            for r in roads:
                if r in seen:
                    raise InputError(f"road {r!r} listed twice")
                seen.add(r)
        known = set(roads)
        inters = []
        for k, group in enumerate(self.intersections):
            group = tuple(str(r) for r in group)
            for r in group:
                if r not in known:
                    raise InputError(f"intersection {k} references unknown road {r!r}")
            if len(set(group)) < 2:
                raise InputError(f"intersection {k} joins fewer than two distinct roads")
            inters.append(group)
        object.__setattr__(self, "roads", roads)
        object.__setattr__(self, "intersections", tuple(inters))

    def index(self) -> dict[str, int]:
        return {r: i for i, r in enumerate(self.roads)}


def build_road_graph(desc: RoadNetworkDescription) -> Graph:
    """One vertex per road; an edge joins every pair of roads sharing an intersection.

    Roads that meet at several intersections still get a single edge.
    """
    idx = desc.index()
    pairs = []
    for group in desc.intersections:
        members = sorted({idx[r] for r in group})
        pairs.extend(combinations(members, 2))
    return Graph.from_edges(len(desc.roads), pairs, dedupe=True)


def make_lattice(w: int, h: int) -> Graph:
    """4-neighbour ``w`` x ``h`` grid; vertex ``(x, y)`` has index ``y * w + x``."""
    if w < 1 or h < 1:
        raise InputError("lattice dimensions must be >= 1")
    ids = np.arange(w * h).reshape(h, w)
    horiz = np.column_stack((ids[:, :-1].ravel(), ids[:, 1:].ravel()))
    vert = np.column_stack((ids[:-1, :].ravel(), ids[1:, :].ravel()))
    return Graph(w * h, np.concatenate((horiz, vert)))


def make_complete(n: int) -> Graph:
    if n < 1:
        raise InputError("complete graph needs n >= 1")
    i, j = np.triu_indices(n, k=1)
    return Graph(n, np.column_stack((i, j)))


def make_random(n: int, edge_prob: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi graph, used for randomized tests and scripts."""
    i, j = np.triu_indices(n, k=1)
    keep = rng.random(len(i)) < edge_prob
    return Graph(n, np.column_stack((i[keep], j[keep])))
