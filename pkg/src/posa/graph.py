"""Immutable simple graphs in compressed adjacency form, plus edge-list IO."""
from __future__ import annotations

import io
import os
from pathlib import Path
from typing import Iterable

import numpy as np

__all__ = ["Graph", "write_edgelist", "read_edgelist", "edgelist_text", "atomic_write_text"]


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Neighbours of ``v`` are ``indices[indptr[v]:indptr[v+1]]``, sorted
    ascending.  ``edges`` holds each edge once as ``(u, v)`` with ``u < v`` in
    lexicographic order.  Instances are never mutated after construction;
    the arrays are flagged read-only.

    Loops and repeated edges are rejected.  The minimum degree is not
    enforced here (the census works on arbitrary simple graphs); the
    sampler guarantees it for its own output.
    """

    __slots__ = ("n", "m", "indptr", "indices", "edges", "_adj", "_edge_set", "_deg")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] | np.ndarray):
        n = int(n)
        if n < 0:
            raise ValueError("n must be nonnegative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError("edges must be pairs")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("loops are not allowed")
        e = np.sort(e, axis=1)
        order = np.lexsort((e[:, 1], e[:, 0]))
        e = e[order]
        if len(e) > 1 and np.any(np.all(e[1:] == e[:-1], axis=1)):
            raise ValueError("repeated edges are not allowed")
        both = np.concatenate([e, e[:, ::-1]])
        both = both[np.lexsort((both[:, 1], both[:, 0]))]
        deg = np.bincount(both[:, 0], minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = both[:, 1].copy()
        for arr in (e, indptr, indices, deg):
            arr.setflags(write=False)
        self.n = n
        self.m = len(e)
        self.edges = e
        self.indptr = indptr
        self.indices = indices
        self._deg = deg
        self._adj = None
        self._edge_set = None

    # -- queries ---------------------------------------------------------

    @property
    def degrees(self) -> np.ndarray:
        return self._deg

    @property
    def min_degree(self) -> int:
        return int(self._deg.min()) if self.n else 0

    def degree(self, v: int) -> int:
        return int(self._deg[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        """Neighbour tuples of Python ints, for tight pure-Python loops."""
        if self._adj is None:
            ip, ix = self.indptr.tolist(), self.indices.tolist()
            self._adj = tuple(tuple(ix[ip[v]:ip[v + 1]]) for v in range(self.n))
        return self._adj

    def has_edge(self, u: int, v: int) -> bool:
        if self._edge_set is None:
            self._edge_set = frozenset(map(tuple, self.edges.tolist()))
        if u > v:
            u, v = v, u
        return (u, v) in self._edge_set

    def edges_within(self, vertices: Iterable[int]) -> int:
        """Number of edges of the induced subgraph on ``vertices``."""
        mask = np.zeros(self.n, dtype=bool)
        mask[np.fromiter(vertices, dtype=np.int64)] = True
        return int(np.count_nonzero(mask[self.edges[:, 0]] & mask[self.edges[:, 1]]))

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(p) for p in self.edges.tolist()]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.edges, other.edges))

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # -- small constructors used in tests and demos ------------------------

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, [(u, v) for u in range(n) for v in range(u + 1, n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        return cls(a + b, [(u, a + v) for u in range(a) for v in range(b)])

    @classmethod
    def prism(cls) -> "Graph":
        return cls(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


def edgelist_text(g: Graph, seed: int | None = None) -> str:
    """Header ``"n m seed"`` then one ``"u v"`` line per edge, ``u < v``, sorted."""
    buf = io.StringIO()
    buf.write(f"{g.n} {g.m} {'-' if seed is None else int(seed)}\n")
    for u, v in g.edges.tolist():
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def atomic_write_text(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def write_edgelist(g: Graph, path: str | os.PathLike, seed: int | None = None) -> Path:
    return atomic_write_text(path, edgelist_text(g, seed))


def read_edgelist(path: str | os.PathLike) -> tuple[Graph, int | None]:
    with open(path, encoding="utf-8") as fh:
        head = fh.readline().split()
        if len(head) != 3:
            raise ValueError(f"{path}: header must be 'n m seed'")
        n, m = int(head[0]), int(head[1])
        seed = None if head[2] == "-" else int(head[2])
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.empty((0, 2), np.int64)
    g = Graph(n, data)
    if g.m != m:
        raise ValueError(f"{path}: header says m={m} but {g.m} edges were read")
    return g, seed
