"""Plain vertex graphs in CSR form: the common substrate for Cayley
subgraphs and for the cut solvers.  Vertices are 0..n-1; adjacency is
symmetric and loop-free."""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra


class StaticGraph:
    """Immutable undirected graph over indices 0..n-1."""

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, tag: str = ""):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int32)
        self.tag = tag
        self._csr: Optional[csr_matrix] = None

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.neighbors(i)

    def to_csr(self) -> csr_matrix:
        if self._csr is None:
            data = np.ones(len(self.indices), dtype=np.int8)
            self._csr = csr_matrix(
                (data, self.indices, self.indptr), shape=(self.n, self.n)
            )
        return self._csr

    # -- construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], tag: str = "") -> "StaticGraph":
        rows = []
        cols = []
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            rows += [u, v]
            cols += [v, u]
        if rows:
            order = np.lexsort((cols, rows))
            r = np.asarray(rows, dtype=np.int64)[order]
            c = np.asarray(cols, dtype=np.int32)[order]
        else:
            r = np.zeros(0, dtype=np.int64)
            c = np.zeros(0, dtype=np.int32)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, r + 1, 1)
        return cls(np.cumsum(indptr), c, tag)

    @classmethod
    def path(cls, n: int) -> "StaticGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"path{n}")

    @classmethod
    def cycle(cls, n: int) -> "StaticGraph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"cycle{n}")

    @classmethod
    def complete(cls, n: int) -> "StaticGraph":
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        return cls.from_edges(n, edges, f"K{n}")

    # -- algorithms -----------------------------------------------------------

    def component_labels(self, removed: Optional[np.ndarray] = None) -> tuple[int, np.ndarray]:
        """Connected components, optionally after deleting a vertex mask.

        Returns (count, labels); removed vertices get label -1.
        """
        if removed is None or not removed.any():
            return connected_components(self.to_csr(), directed=False)
        keep = ~removed
        idx = np.flatnonzero(keep)
        sub = self.to_csr()[idx][:, idx]
        cnt, lab = connected_components(sub, directed=False)
        labels = np.full(self.n, -1, dtype=np.int64)
        labels[idx] = lab
        return cnt, labels

    def component_sizes(self, removed: Optional[np.ndarray] = None) -> np.ndarray:
        """Sizes of components after deleting a vertex mask, descending."""
        cnt, labels = self.component_labels(removed)
        if cnt == 0:
            return np.zeros(0, dtype=np.int64)
        sizes = np.bincount(labels[labels >= 0], minlength=cnt)
        return np.sort(sizes)[::-1]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        cnt, _ = self.component_labels()
        return cnt == 1

    def bfs_distances(self, sources: Iterable[int], limit: Optional[float] = None) -> np.ndarray:
        """Hop distances from the nearest source; inf where unreachable."""
        src = np.atleast_1d(np.asarray(list(sources), dtype=np.int64))
        kw = {} if limit is None else {"limit": float(limit)}
        dist = dijkstra(
            self.to_csr(), directed=False, unweighted=True, indices=src, min_only=len(src) > 1, **kw
        )
        if dist.ndim == 2:
            dist = dist[0]
        return dist

    def induced(self, vertices: np.ndarray) -> "StaticGraph":
        """Induced subgraph on a sorted index array (vertices renumbered)."""
        idx = np.asarray(vertices, dtype=np.int64)
        sub = self.to_csr()[idx][:, idx]
        sub.sort_indices()
        return StaticGraph(sub.indptr.astype(np.int64), sub.indices.astype(np.int32), self.tag)

    def eccentricity_estimate(self, start: int = 0) -> tuple[int, int, int]:
        """Double-sweep diameter lower bound: returns (u, v, dist(u, v))."""
        d0 = self.bfs_distances([start])
        u = int(np.argmax(np.where(np.isinf(d0), -1, d0)))
        d1 = self.bfs_distances([u])
        v = int(np.argmax(np.where(np.isinf(d1), -1, d1)))
        return u, v, int(d1[v])
