"""Social graphs: construction, validation and the edge-list text format.

Vertices are labelled ``0..n-1``. A :class:`Graph` is immutable and always
simple, undirected and connected; anything else is rejected at construction.

Edge-list format::

    n m
    u v      (m lines, 0 <= u < v < n)
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import ConnectivityError, EdgeListFormatError, InvalidSizeError

FAMILIES = ("complete", "cycle", "path", "star", "random")


@dataclass(frozen=True)
class Graph:
    """Undirected simple connected graph stored as sorted adjacency tuples."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int = field(compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSizeError(f"graph needs at least one vertex, got n={self.n}")
        if len(self.adjacency) != self.n:
            raise EdgeListFormatError("adjacency length does not match n")
        for i, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise EdgeListFormatError(f"neighbours of {i} not sorted and unique")
            for j in nbrs:
                if j == i:
                    raise EdgeListFormatError(f"self-loop at vertex {i}")
                if not 0 <= j < self.n:
                    raise EdgeListFormatError(f"vertex {j} out of range")
                if i not in self.adjacency[j]:
                    raise EdgeListFormatError(f"edge ({i},{j}) is not symmetric")
        if sum(len(a) for a in self.adjacency) != 2 * self.edge_count:
            raise EdgeListFormatError("degree sum differs from twice the edge count")
        if not _connected(self.adjacency):
            raise ConnectivityError("graph is not connected")

    @classmethod
    def from_edges(cls, n, edges):
        """Build from an iterable of vertex pairs; rejects loops and duplicates."""
        nbrs = [set() for _ in range(n)]
        count = 0
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise EdgeListFormatError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise EdgeListFormatError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise EdgeListFormatError(f"duplicate edge ({min(u, v)},{max(u, v)})")
            nbrs[u].add(v)
            nbrs[v].add(u)
            count += 1
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs), count)

    def neighbors(self, i):
        return self.adjacency[i]

    def degree(self, i):
        return len(self.adjacency[i])

    @cached_property
    def degrees(self):
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def has_edge(self, i, j):
        return j in self.adjacency[i]

    def edges(self):
        """Edges as ``(u, v)`` with ``u < v``, sorted lexicographically."""
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    def is_tree(self):
        return self.edge_count == self.n - 1

    def is_complete(self):
        return self.edge_count == self.n * (self.n - 1) // 2

    @cached_property
    def csr(self):
        """``(indptr, indices)`` int64 arrays for the kernels."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.degrees)
        indices = np.fromiter(
            (j for nbrs in self.adjacency for j in nbrs), dtype=np.int64,
            count=int(indptr[-1]),
        )
        return indptr, indices

    @cached_property
    def matrix(self):
        """Dense boolean adjacency matrix."""
        a = np.zeros((self.n, self.n), dtype=bool)
        for i, nbrs in enumerate(self.adjacency):
            a[i, list(nbrs)] = True
        return a

    def __repr__(self):
        return f"Graph(n={self.n}, edge_count={self.edge_count})"


def _connected(adjacency):
    seen = {0}
    queue = deque([0])
    while queue:
        for j in adjacency[queue.popleft()]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == len(adjacency)


def _need(n, least, family):
    if int(n) != n or n < least:
        raise InvalidSizeError(f"{family} graph needs n >= {least}, got {n}")


def make_complete(n):
    _need(n, 2, "complete")
    return Graph.from_edges(n, combinations(range(n), 2))


def make_cycle(n):
    _need(n, 3, "cycle")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def make_path(n):
    _need(n, 2, "path")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def make_star(n):
    """Vertex 0 joined to every other vertex."""
    _need(n, 2, "star")
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def make_random_connected(n, extra_edges=0, seed=0):
    """Random spanning tree plus ``extra_edges`` uniformly chosen non-edges.

    The tree attaches the vertices of a random permutation one at a time to a
    uniformly chosen earlier vertex. Deterministic for a fixed ``seed``.
    """
    _need(n, 2, "random")
    room = n * (n - 1) // 2 - (n - 1)
    if extra_edges < 0 or extra_edges > room:
        raise InvalidSizeError(
            f"extra_edges must lie in [0, {room}] for n={n}, got {extra_edges}"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = set()
    for k in range(1, n):
        u, v = int(order[k]), int(order[rng.integers(k)])
        edges.add((min(u, v), max(u, v)))
    if extra_edges:
        absent = [e for e in combinations(range(n), 2) if e not in edges]
        picks = rng.choice(len(absent), size=extra_edges, replace=False)
        edges.update(absent[int(k)] for k in picks)
    return Graph.from_edges(n, sorted(edges))


def make_graph(family, n, extra_edges=0, seed=0):
    """Dispatch on a family name from :data:`FAMILIES`."""
    if family == "complete":
        return make_complete(n)
    if family == "cycle":
        return make_cycle(n)
    if family == "path":
        return make_path(n)
    if family == "star":
        return make_star(n)
    if family == "random":
        return make_random_connected(n, extra_edges, seed)
    raise ValueError(f"unknown graph family {family!r}; expected one of {FAMILIES}")


def from_edge_list(text):
    """Parse the edge-list format. Endpoint order within a line is not enforced."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise EdgeListFormatError("empty edge list")
    try:
        header = [int(t) for t in lines[0]]
        body = [tuple(int(t) for t in ln) for ln in lines[1:]]
    except ValueError as exc:
        raise EdgeListFormatError(f"non-integer token: {exc}") from None
    if len(header) != 2:
        raise EdgeListFormatError("header must be 'n m'")
    n, m = header
    if n < 1:
        raise EdgeListFormatError(f"vertex count must be positive, got {n}")
    if len(body) != m:
        raise EdgeListFormatError(f"header announces {m} edges, found {len(body)}")
    if any(len(e) != 2 for e in body):
        raise EdgeListFormatError("every edge line must hold exactly two vertices")
    return Graph.from_edges(n, body)


def to_edge_list(graph):
    edges = graph.edges()
    lines = [f"{graph.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def read_edge_list(path):
    return from_edge_list(Path(path).read_text())


def write_edge_list(graph, path):
    Path(path).write_text(to_edge_list(graph))


@dataclass(frozen=True)
class GraphSpec:
    """Recipe for a graph: a generator family or an edge-list file."""

    family: str | None = None
    n: int | None = None
    extra_edges: int = 0
    seed: int = 0
    path: str | None = None

    def build(self):
        if self.path is not None:
            return read_edge_list(self.path)
        if self.family is None or self.n is None:
            raise ValueError("GraphSpec needs either a path or a family and n")
        return make_graph(self.family, self.n, self.extra_edges, self.seed)

    @property
    def label(self):
        if self.path is not None:
            return Path(self.path).stem
        if self.family == "random":
            return f"random_n{self.n}_e{self.extra_edges}_s{self.seed}"
        return f"{self.family}{self.n}"
