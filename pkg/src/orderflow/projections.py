"""Linear projection from arc space onto pair space, and its adjoint.

Row ``(i, j)`` collects the arcs along which ``j`` enters ``X`` while ``i``
already sits in the arc's base set (``X`` of the tail for linear and weak
networks, ``Y`` of the tail for interval and semiorder networks).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError
from .networks import Network
from .relations import pair_list


@dataclass(frozen=True, eq=False)
class ProjectionMap:
    """Sparse 0/1 map; ``matrix`` has one row per ordered pair and one column per arc."""

    network: Network = field(repr=False)
    matrix: sp.csr_matrix = field(repr=False)

    @property
    def n(self):
        return self.network.n

    @property
    def pairs(self):
        return pair_list(self.network.n)

    def row(self, k) -> np.ndarray:
        """Arc indices of row ``k``."""
        lo, hi = self.matrix.indptr[k], self.matrix.indptr[k + 1]
        return self.matrix.indices[lo:hi]

    def rows(self) -> list:
        return [self.row(k) for k in range(self.matrix.shape[0])]

    @property
    def _nnz_rows(self):
        rows = self.__dict__.get("_rows_cache")
        if rows is None:
            rows = np.repeat(np.arange(self.matrix.shape[0]), np.diff(self.matrix.indptr))
            object.__setattr__(self, "_rows_cache", rows)
        return rows

    @property
    def _arc_rows(self):
        """Pair rows touched by each arc (column view of the same sparse structure)."""
        cols = self.__dict__.get("_arc_rows_cache")
        if cols is None:
            order = np.argsort(self.matrix.indices, kind="stable")
            ptr = np.searchsorted(self.matrix.indices[order], np.arange(self.network.num_arcs + 1))
            rows = self._nnz_rows[order]
            cols = [rows[ptr[a]:ptr[a + 1]] for a in range(self.network.num_arcs)]
            object.__setattr__(self, "_arc_rows_cache", cols)
        return cols

    def apply(self, flow) -> np.ndarray:
        flow = np.asarray(flow, dtype=float)
        if flow.shape != (self.network.num_arcs,):
            raise DimensionMismatchError(
                f"flow has shape {flow.shape}, expected ({self.network.num_arcs},)")
        return np.bincount(self._nnz_rows, weights=flow[self.matrix.indices],
                           minlength=self.matrix.shape[0])

    def apply_adjoint(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        if g.shape != (self.matrix.shape[0],):
            raise DimensionMismatchError(
                f"pair vector has shape {g.shape}, expected ({self.matrix.shape[0]},)")
        return np.bincount(self.matrix.indices, weights=g[self._nnz_rows],
                           minlength=self.network.num_arcs)

    def path_image(self, path) -> np.ndarray:
        """Image of a path's indicator vector."""
        cols = self._arc_rows
        return np.bincount(np.concatenate([cols[a] for a in path]),
                           minlength=self.matrix.shape[0]).astype(float)

    def to_json(self):
        return {
            "pairs": [list(p) for p in self.pairs],
            "rows": [self.row(k).tolist() for k in range(self.matrix.shape[0])],
        }


def build_projection(net: Network) -> ProjectionMap:
    n = net.n
    base, new = net.arc_base, net.arc_new
    rows, cols = [], []
    for k, (i, j) in enumerate(pair_list(n)):
        arcs = np.flatnonzero(((base >> i) & 1).astype(bool) & ((new >> j) & 1).astype(bool))
        rows.append(np.full(len(arcs), k, dtype=np.int64))
        cols.append(arcs)
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    mat = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n * (n - 1), net.num_arcs))
    mat.sort_indices()
    return ProjectionMap(net, mat)
