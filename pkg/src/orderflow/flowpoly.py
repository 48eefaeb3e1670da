"""Flow-polytope machinery over an order network.

A flow is a float array indexed by arcs.  A path is a tuple of arc indices
running from the source to the sink.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import CapExceededError, DimensionMismatchError, InvalidPathError
from .networks import Network
from .relations import OrderKind, Relation

CONSERVATION_TOL = 1e-9
PATH_CAP = 10 ** 6


def node_balance(net: Network, flow) -> np.ndarray:
    """Out-flow minus in-flow at every node."""
    flow = np.asarray(flow, dtype=float)
    out = np.bincount(net.tails, weights=flow, minlength=net.num_nodes)
    inn = np.bincount(net.heads, weights=flow, minlength=net.num_nodes)
    return out - inn


def is_flow(net: Network, flow, value: float, tol: float = CONSERVATION_TOL) -> bool:
    """Nonnegative, conserved at inner nodes, with net source out-flow ``value``."""
    flow = np.asarray(flow, dtype=float)
    if flow.shape != (net.num_arcs,) or not np.all(np.isfinite(flow)):
        return False
    if np.any(flow < -tol):
        return False
    bal = node_balance(net, flow)
    inner = np.ones(net.num_nodes, dtype=bool)
    inner[[net.source, net.sink]] = False
    return bool(np.all(np.abs(bal[inner]) <= tol) and abs(bal[net.source] - value) <= tol)


@dataclass(frozen=True)
class CanonicalDescription:
    """Node-balance equalities plus arc nonnegativity describing the flow polytope.

    ``equalities`` has one row per node except the sink; the row of the
    source has right-hand side 1, every other row 0.
    """

    equalities: sp.csr_matrix
    rhs: np.ndarray
    row_nodes: np.ndarray
    source_row: int
    nonnegativity: int

    def size(self) -> int:
        """Number of inequalities, i.e. one per arc."""
        return self.nonnegativity

    def satisfied_by(self, flow, tol=CONSERVATION_TOL) -> bool:
        flow = np.asarray(flow, dtype=float)
        return bool(np.all(flow >= -tol) and np.all(np.abs(self.equalities @ flow - self.rhs) <= tol))

    def to_lp(self) -> str:
        """CPLEX LP text with variables ``f_0 .. f_{m-1}``."""
        m = self.nonnegativity
        out = ["\\ canonical description of a network flow polytope",
               "Minimize", " obj: 0 f_0" if m else " obj:", "Subject To"]
        a = self.equalities.tocsr()
        for r in range(a.shape[0]):
            lo, hi = a.indptr[r], a.indptr[r + 1]
            terms = []
            for col, coef in zip(a.indices[lo:hi], a.data[lo:hi]):
                sign = "+" if coef > 0 else "-"
                terms.append(f"{sign} f_{col}")
            if not terms:
                continue
            name = "source_value" if r == self.source_row else f"balance_{self.row_nodes[r]}"
            body = " ".join(terms)
            if body.startswith("+ "):
                body = body[2:]
            out.append(f" {name}: {body} = {self.rhs[r]:g}")
        out.append("Bounds")
        out.extend(f" f_{a_} >= 0" for a_ in range(m))
        out.append("End")
        return "\n".join(out) + "\n"


def canonical_description(net: Network) -> CanonicalDescription:
    m = net.num_arcs
    rows_nodes = np.array([v for v in range(net.num_nodes) if v != net.sink], dtype=np.int64)
    row_of = np.full(net.num_nodes, -1, dtype=np.int64)
    row_of[rows_nodes] = np.arange(len(rows_nodes))
    arcs = np.arange(m)
    r_out = row_of[net.tails]
    r_in = row_of[net.heads]
    keep_in = r_in >= 0
    rows = np.concatenate([r_out, r_in[keep_in]])
    cols = np.concatenate([arcs, arcs[keep_in]])
    vals = np.concatenate([np.ones(m), -np.ones(int(keep_in.sum()))])
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(len(rows_nodes), m))
    rhs = np.zeros(len(rows_nodes))
    src_row = int(row_of[net.source])
    rhs[src_row] = 1.0
    return CanonicalDescription(mat, rhs, rows_nodes, src_row, m)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------

def check_path(net: Network, path) -> tuple:
    """Validate and return ``path`` as a tuple of ints."""
    path = tuple(int(a) for a in path)
    if not path:
        raise InvalidPathError("empty path")
    if any(a < 0 or a >= net.num_arcs for a in path):
        raise InvalidPathError(f"arc index out of range in {path}")
    if net.tails[path[0]] != net.source or net.heads[path[-1]] != net.sink:
        raise InvalidPathError(f"{path} does not run from source to sink")
    for a, b in zip(path, path[1:]):
        if net.heads[a] != net.tails[b]:
            raise InvalidPathError(f"arcs {a} and {b} are not consecutive")
    return path


def path_to_flow(net: Network, path) -> np.ndarray:
    path = check_path(net, path)
    flow = np.zeros(net.num_arcs)
    flow[list(path)] = 1.0
    return flow


def path_nodes(net: Network, path) -> list:
    path = check_path(net, path)
    return [int(net.tails[path[0]])] + [int(net.heads[a]) for a in path]


def _relation_from_arcs(net, arcs):
    n = net.n
    pred = [0] * n
    for a in arcs:
        base, new = int(net.arc_base[a]), int(net.arc_new[a])
        for j in range(n):
            if new >> j & 1:
                pred[j] |= base
    return _relation_from_pred(pred)


def _relation_from_pred(pred):
    bits = np.arange(len(pred))
    cols = np.array([(max(p, 0) >> bits) & 1 for p in pred], dtype=bool)
    return Relation(cols.T.reshape(len(pred), len(pred)))


def decode_path(net: Network, path) -> Relation:
    """Relation encoded by a path.

    ``i R j`` iff ``j`` enters ``X`` along an arc whose tail already holds
    ``i`` in its base set (``X`` for linear/weak networks, ``Y`` otherwise).
    """
    return _relation_from_arcs(net, check_path(net, path))


def path_count(net: Network) -> int:
    """Number of source-sink paths (exact integer)."""
    counts = [0] * net.num_nodes
    counts[net.sink] = 1
    heads = net.heads.tolist()
    ptr = net.out_ptr.tolist()
    for v in range(net.num_nodes - 1, -1, -1):
        if v == net.sink:
            continue
        counts[v] = sum(counts[heads[a]] for a in range(ptr[v], ptr[v + 1]))
    return counts[net.source]


def enumerate_paths(net: Network, cap: int = PATH_CAP):
    """Every source-sink path once, in lexicographic order of arc indices."""
    total = path_count(net)
    if total > cap:
        raise CapExceededError("enumerate_paths: path count", total, cap)
    ptr = net.out_ptr.tolist()
    heads = net.heads.tolist()
    sink = net.sink
    paths = []
    stack = [(net.source, ())]
    while stack:
        v, prefix = stack.pop()
        if v == sink:
            paths.append(prefix)
            continue
        for a in range(ptr[v + 1] - 1, ptr[v] - 1, -1):
            stack.append((heads[a], prefix + (a,)))
    return paths


def decoded_orders(net: Network) -> list:
    """Distinct relations decoded from all source-sink paths.

    Walks the network while tracking each entered alternative's predecessor
    set; prefixes reaching the same node with the same partial relation are
    merged, so the work is bounded by distinct states rather than paths.
    """
    n = net.n
    ptr = net.out_ptr.tolist()
    heads = net.heads.tolist()
    base = net.arc_base.tolist()
    new = net.arc_new.tolist()
    sink = net.sink
    start = (net.source, (-1,) * n)
    seen = {start}
    stack = [start]
    found = []
    while stack:
        v, pred = stack.pop()
        if v == sink:
            found.append(pred)
            continue
        for a in range(ptr[v], ptr[v + 1]):
            entering = new[a]
            nxt = list(pred)
            for j in range(n):
                if entering >> j & 1:
                    nxt[j] = base[a]
            state = (heads[a], tuple(nxt))
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return [_relation_from_pred(pred) for pred in found]


# ---------------------------------------------------------------------------
# Linear minimization oracle
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _rank_blocks(net: Network):
    """Arc blocks grouped by tail rank, highest rank first, for the backward sweep."""
    tail_rank = net.rank[net.tails]
    blocks = []
    for r in sorted(set(tail_rank.tolist()), reverse=True):
        arcs = np.flatnonzero(tail_rank == r)  # sorted, so tails are contiguous
        tails = net.tails[arcs]
        starts = np.flatnonzero(np.r_[True, tails[1:] != tails[:-1]])
        segment = np.cumsum(np.r_[0, (tails[1:] != tails[:-1]).astype(np.int64)])
        blocks.append((arcs, net.heads[arcs], tails[starts], starts, segment,
                       np.arange(len(arcs)), len(arcs)))
    return tuple(blocks)


def shortest_path_lmo(net: Network, cost) -> tuple:
    """Minimum-cost source-sink path for arc costs ``cost``.

    One backward dynamic-programming sweep over node ranks; among equal-cost
    continuations the lowest arc index wins, so with zero costs the result is
    the lexicographically first path.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.shape != (net.num_arcs,):
        raise DimensionMismatchError(f"cost must have length {net.num_arcs}")
    dist = np.full(net.num_nodes, np.inf)
    dist[net.sink] = 0.0
    choice = np.full(net.num_nodes, -1, dtype=np.int64)
    for arcs, heads, tails, starts, segment, positions, size in _rank_blocks(net):
        vals = cost[arcs] + dist[heads]
        best = np.minimum.reduceat(vals, starts)
        pos = np.where(vals <= best[segment], positions, size)
        dist[tails] = best
        choice[tails] = arcs[np.minimum.reduceat(pos, starts)]
    heads = net.heads
    path = []
    v = net.source
    sink = net.sink
    while v != sink:
        a = int(choice[v])
        path.append(a)
        v = int(heads[a])
    return tuple(path)


def path_cost(cost, path) -> float:
    return float(np.asarray(cost)[list(path)].sum())


def first_path(net: Network) -> tuple:
    """Lexicographically first source-sink path."""
    return shortest_path_lmo(net, np.zeros(net.num_arcs))


def kind_is_bijective(kind) -> bool:
    """Whether paths correspond one-to-one with orders of this kind."""
    return OrderKind.parse(kind) in (OrderKind.LINEAR, OrderKind.WEAK)
