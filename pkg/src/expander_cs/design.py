"""Renormalized adjacency matrix of a left-regular bipartite graph.

Column i of the n x p matrix holds 1/d at the rows listed by left vertex
i's neighbors and 0 elsewhere, so every column has l1 norm exactly 1 and
l2 norm 1/sqrt(d). The value 1/d is never stored; products accumulate the
stored index structure in ascending-index order and divide by d once,
which keeps results independent of thread count and of how the matrix was
built.
"""

from __future__ import annotations

import numpy as np

from .graphs import BipartiteGraph


class DesignMatrix:
    """Sparse column-structured design with implicit entry value 1/d."""

    def __init__(self, p: int, n: int, d: int, columns: tuple[tuple[int, ...], ...]):
        self.p = p
        self.n = n
        self.d = d
        self.columns = columns
        # flat gather/scatter layout: column-major, rows ascending per column
        self._flat = np.fromiter((j for col in columns for j in col),
                                 dtype=np.int64, count=p * d)
        self._starts = np.arange(0, p * d, d, dtype=np.int64)
        self.column_rows = tuple(np.asarray(col, dtype=np.int64) for col in columns)

    @classmethod
    def from_graph(cls, g: BipartiteGraph) -> "DesignMatrix":
        return cls(g.p, g.n, g.d, g.neighbors)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n, self.p

    def matvec(self, gamma) -> np.ndarray:
        """X gamma: for each output row, the sum of gamma over incident
        columns (ascending column order), divided by d."""
        gamma = np.asarray(gamma, dtype=np.float64)
        if gamma.shape != (self.p,):
            raise ValueError(f"expected vector of length {self.p}, got {gamma.shape}")
        acc = np.bincount(self._flat, weights=np.repeat(gamma, self.d), minlength=self.n)
        return acc / self.d

    def transpose_matvec(self, z) -> np.ndarray:
        """X^T z: per column, the sum of z over its rows (ascending),
        divided by d. Never amplifies the sup norm."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got {z.shape}")
        acc = np.add.reduceat(z[self._flat], self._starts)
        return acc / self.d

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.p))
        v = 1.0 / self.d
        for i, col in enumerate(self.columns):
            for j in col:
                out[j, i] = v
        return out

    def write_dense_csv(self, path) -> None:
        """Dense export: n rows, p comma-separated columns, 17 significant digits."""
        dense = self.to_dense()
        with open(path, "w", encoding="utf-8") as fh:
            for row in dense:
                fh.write(",".join(f"{v:.17g}" for v in row))
                fh.write("\n")


def from_graph(g: BipartiteGraph) -> DesignMatrix:
    return DesignMatrix.from_graph(g)
