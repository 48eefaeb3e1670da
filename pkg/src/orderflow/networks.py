"""The four acyclic order networks and their closed-form sizes.

Node payloads are bitmasks over alternatives (bit ``k`` set means alternative
``k`` is in the set):

* linear / weak orders: a subset ``X``;
* interval orders: a pair ``(X, Y)`` with ``Y`` a subset of ``X``;
* semiorders: a triple ``(X, Y, L)`` with ``L`` a sequence listing ``X - Y``.

Nodes are indexed by ``(|X|, |Y|, X, Y, L)``, which is also a topological
order.  Arcs are indexed by ``(tail, head)`` so the arcs leaving a node are
contiguous.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ArcNotInNetworkError, CapExceededError
from .relations import OrderKind

#: Default largest ``n`` accepted by :func:`build_network`.
NETWORK_CAPS = {
    OrderKind.LINEAR: 20,
    OrderKind.WEAK: 14,
    OrderKind.INTERVAL: 13,
    OrderKind.SEMI: 7,
}


class NodeKey(NamedTuple):
    """Node payload; ``y`` is None for linear/weak networks, ``order`` only set for semiorders."""

    x: int
    y: int | None = None
    order: tuple | None = None

    def label(self) -> str:
        def fmt(mask):
            return "{" + ",".join(str(k) for k in _members(mask)) + "}"

        if self.y is None:
            return fmt(self.x)
        if self.order is None:
            return f"({fmt(self.x)},{fmt(self.y)})"
        return f"({fmt(self.x)},{fmt(self.y)},[{','.join(map(str, self.order))}])"

    def to_json(self):
        obj = {"x": _members(self.x)}
        if self.y is not None:
            obj["y"] = _members(self.y)
        if self.order is not None:
            obj["order"] = list(self.order)
        return obj


def _members(mask):
    return [k for k in range(mask.bit_length()) if mask >> k & 1]


@dataclass(frozen=True, eq=False)
class Network:
    """Fully materialized acyclic network with designated source and sink.

    ``tails``/``heads`` hold node indices per arc.  ``arc_base`` is the set
    whose members are compared against newcomers on that arc (``X`` of the
    tail for linear/weak networks, ``Y`` of the tail otherwise) and
    ``arc_new`` the set of alternatives entering ``X`` along the arc.
    """

    n: int
    kind: OrderKind
    keys: list = field(repr=False)
    tails: np.ndarray = field(repr=False)
    heads: np.ndarray = field(repr=False)
    x_masks: np.ndarray = field(repr=False)
    y_masks: np.ndarray = field(repr=False)
    source: int = 0
    sink: int = 0

    @property
    def num_nodes(self) -> int:
        return len(self.keys)

    @property
    def num_arcs(self) -> int:
        return len(self.tails)

    def __repr__(self):
        return (f"Network(n={self.n}, kind={self.kind.name}, "
                f"nodes={self.num_nodes}, arcs={self.num_arcs})")

    @cached_property
    def out_ptr(self) -> np.ndarray:
        """Arcs leaving node ``v`` are ``range(out_ptr[v], out_ptr[v+1])``."""
        return np.searchsorted(self.tails, np.arange(self.num_nodes + 1))

    @cached_property
    def in_arcs(self) -> tuple:
        """``(ptr, order)``: arcs entering ``v`` are ``order[ptr[v]:ptr[v+1]]``."""
        order = np.argsort(self.heads, kind="stable")
        ptr = np.searchsorted(self.heads[order], np.arange(self.num_nodes + 1))
        return ptr, order

    def out_arcs(self, v):
        return range(self.out_ptr[v], self.out_ptr[v + 1])

    @cached_property
    def arc_base(self) -> np.ndarray:
        base = self.x_masks if self.kind in (OrderKind.LINEAR, OrderKind.WEAK) else self.y_masks
        return base[self.tails]

    @cached_property
    def arc_new(self) -> np.ndarray:
        return self.x_masks[self.heads] & ~self.x_masks[self.tails]

    @cached_property
    def rank(self) -> np.ndarray:
        """``|X| + |Y|`` per node; strictly increases along every arc."""
        return (np.bitwise_count(self.x_masks) + np.bitwise_count(self.y_masks)).astype(np.int64)

    def arc(self, a) -> tuple:
        return self.keys[self.tails[a]], self.keys[self.heads[a]]

    @cached_property
    def _arc_lookup(self):
        return {(int(t), int(h)): a for a, (t, h) in enumerate(zip(self.tails, self.heads))}

    @cached_property
    def _node_lookup(self):
        return {key: v for v, key in enumerate(self.keys)}

    def node_index(self, key) -> int:
        try:
            return self._node_lookup[NodeKey(*key)]
        except KeyError:
            raise KeyError(f"{key!r} is not a node of {self!r}") from None

    def arc_index(self, tail_key, head_key) -> int:
        try:
            t, h = self.node_index(tail_key), self.node_index(head_key)
            return self._arc_lookup[(t, h)]
        except KeyError:
            raise ArcNotInNetworkError(f"({tail_key!r}, {head_key!r}) is not an arc of {self!r}") from None

    def is_topologically_indexed(self) -> bool:
        return bool(np.all(self.tails < self.heads))

    # -- exports ----------------------------------------------------------

    def to_json(self):
        return {
            "n": self.n,
            "kind": self.kind.value,
            "nodes": [k.to_json() for k in self.keys],
            "arcs": [[int(t), int(h)] for t, h in zip(self.tails, self.heads)],
            "source": int(self.source),
            "sink": int(self.sink),
        }

    def to_dot(self) -> str:
        lines = [f'digraph "{self.kind.value}_{self.n}" {{', "  rankdir=LR;"]
        for v, key in enumerate(self.keys):
            shape = "doublecircle" if v in (self.source, self.sink) else "ellipse"
            lines.append(f'  {v} [label="{key.label()}", shape={shape}];')
        for t, h in zip(self.tails, self.heads):
            lines.append(f"  {t} -> {h};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def build_network(n: int, kind, cap: int | None = None) -> Network:
    """Build the order network of the given kind on ``n`` alternatives."""
    kind = OrderKind.parse(kind)
    if n < 1:
        raise ValueError("networks need n >= 1")
    cap = NETWORK_CAPS[kind] if cap is None else cap
    if n > cap:
        raise CapExceededError(f"build_network(n, {kind.name})", n, cap)
    builder = {
        OrderKind.LINEAR: _build_boolean,
        OrderKind.WEAK: _build_boolean,
        OrderKind.INTERVAL: _build_interval,
        OrderKind.SEMI: _build_semiorder,
    }[kind]
    return builder(n, kind)


def _sorted_arcs(tails, heads):
    order = np.lexsort((heads, tails))
    return tails[order], heads[order]


def _build_boolean(n, kind):
    masks = np.arange(1 << n, dtype=np.int64)
    nodes = masks[np.lexsort((masks, np.bitwise_count(masks)))]
    index = np.empty(1 << n, dtype=np.int64)
    index[nodes] = np.arange(1 << n)

    if kind is OrderKind.LINEAR:
        x = np.repeat(masks, n)
        bit = np.tile(np.int64(1) << np.arange(n, dtype=np.int64), 1 << n)
        keep = (x & bit) == 0
        x, z = x[keep], x[keep] | bit[keep]
    else:
        # Ternary words: digit 0 -> in X, 1 -> in Z - X, 2 -> outside Z.
        codes = np.arange(3 ** n, dtype=np.int64)
        x = np.zeros_like(codes)
        new = np.zeros_like(codes)
        for k in range(n):
            digit = codes % 3
            codes //= 3
            x |= (digit == 0).astype(np.int64) << k
            new |= (digit == 1).astype(np.int64) << k
        keep = new != 0
        x, z = x[keep], x[keep] | new[keep]
    tails, heads = _sorted_arcs(index[x], index[z])
    keys = [NodeKey(int(m)) for m in nodes]
    return Network(n, kind, keys, tails, heads, nodes, nodes.copy(),
                   source=0, sink=len(keys) - 1)


def _build_interval(n, kind):
    # Ternary node code: digit 0 -> outside X, 1 -> in X - Y, 2 -> in Y.
    # An arc raises exactly one digit by one.
    size = 3 ** n
    codes = np.arange(size, dtype=np.int64)
    rest = codes.copy()
    x = np.zeros_like(codes)
    y = np.zeros_like(codes)
    digits = np.empty((n, size), dtype=np.int8)
    for k in range(n):
        d = rest % 3
        rest //= 3
        digits[k] = d
        x |= (d >= 1).astype(np.int64) << k
        y |= (d == 2).astype(np.int64) << k
    order = np.lexsort((y, x, np.bitwise_count(y), np.bitwise_count(x)))
    index = np.empty(size, dtype=np.int64)
    index[order] = np.arange(size)

    tails, heads = [], []
    for k in range(n):
        grow = np.flatnonzero(digits[k] < 2)
        tails.append(index[grow])
        heads.append(index[grow + 3 ** k])
    tails, heads = _sorted_arcs(np.concatenate(tails), np.concatenate(heads))
    x_nodes, y_nodes = x[order], y[order]
    keys = [NodeKey(int(a), int(b)) for a, b in zip(x_nodes, y_nodes)]
    return Network(n, kind, keys, tails, heads, x_nodes, y_nodes,
                   source=0, sink=size - 1)


def _build_semiorder(n, kind):
    keys = []
    for t in range(n + 1):
        for seq in itertools.permutations(range(n), t):
            used = sum(1 << k for k in seq)
            free = [k for k in range(n) if not used >> k & 1]
            for r in range(len(free) + 1):
                for ys in itertools.combinations(free, r):
                    y = sum(1 << k for k in ys)
                    keys.append(NodeKey(used | y, y, tuple(seq)))
    keys.sort(key=lambda k: (k.x.bit_count(), k.y.bit_count(), k.x, k.y, k.order))
    index = {k: v for v, k in enumerate(keys)}

    tails, heads = [], []
    full = (1 << n) - 1
    for v, (x, y, seq) in enumerate(keys):
        # alpha: a new alternative opens and joins the end of the sequence
        for i in range(n):
            if not x >> i & 1:
                tails.append(v)
                heads.append(index[NodeKey(x | 1 << i, y, seq + (i,))])
        # beta: the earliest opened alternative closes
        if seq:
            tails.append(v)
            heads.append(index[NodeKey(x, y | 1 << seq[0], seq[1:])])
    tails, heads = _sorted_arcs(np.array(tails, dtype=np.int64), np.array(heads, dtype=np.int64))
    x_nodes = np.array([k.x for k in keys], dtype=np.int64)
    y_nodes = np.array([k.y for k in keys], dtype=np.int64)
    sink = index[NodeKey(full, full, ())]
    return Network(n, kind, keys, tails, heads, x_nodes, y_nodes, source=0, sink=sink)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _falling(n, t):
    return math.perm(n, t)


def count_nodes_formula(n: int, kind) -> int:
    kind = OrderKind.parse(kind)
    if kind in (OrderKind.LINEAR, OrderKind.WEAK):
        return 2 ** n
    if kind is OrderKind.INTERVAL:
        return 3 ** n
    return sum(_falling(n, t) * 2 ** (n - t) for t in range(n + 1))


def count_arcs_formula(n: int, kind) -> int:
    """Published closed-form arc counts.

    For semiorders this is ``sum_t n!/(n-t)! * 2**(n-t-1) * (n+t)``, which
    assumes ``n - |Y|`` arcs leave every node.  The network built here lets
    only the first alternative of ``L`` close, so its true arc count is
    :func:`semiorder_arc_count`.
    """
    kind = OrderKind.parse(kind)
    if n < 1:
        raise ValueError("arc counts need n >= 1")
    if kind is OrderKind.LINEAR:
        return n * 2 ** (n - 1)
    if kind is OrderKind.WEAK:
        return 3 ** n - 2 ** n
    if kind is OrderKind.INTERVAL:
        return 2 * n * 3 ** (n - 1)
    # 2**(n-t-1) * (n+t) is a half-integer only at t = n, where it equals n.
    return sum(_falling(n, t) * (2 ** (n - t) * (n + t)) // 2 for t in range(n + 1))


def semiorder_arc_count(n: int) -> int:
    """Exact arc count of the semiorder network as built.

    A node with ``|X - Y| = t`` and ``|Y| = y`` has ``n - t - y`` opening
    arcs plus one closing arc when ``t > 0``.
    """
    total = 0
    for t in range(n + 1):
        opening = (n - t) * 2 ** (n - t - 1) if t < n else 0
        closing = 2 ** (n - t) if t > 0 else 0
        total += _falling(n, t) * (opening + closing)
    return total


def expected_arc_count(n: int, kind) -> int:
    """Closed form matching the network produced by :func:`build_network`."""
    kind = OrderKind.parse(kind)
    if kind is OrderKind.SEMI:
        return semiorder_arc_count(n)
    return count_arcs_formula(n, kind)


# ---------------------------------------------------------------------------
# Word encodings of arcs
# ---------------------------------------------------------------------------

def word_encode_arc(n: int, kind, arc) -> str:
    """Encode an arc ``(tail_key, head_key)`` as a word of length ``n``.

    Weak orders use letters ``a`` (in X), ``b`` (in Z - X), ``c`` (outside
    Z).  Interval orders use ``a`` (in Y), ``b`` (in X - Y, stays open),
    ``c`` (outside Z), ``d`` (enters X), ``e`` (enters Y).
    """
    kind = OrderKind.parse(kind)
    tail, head = (NodeKey(*k) if not isinstance(k, int) else NodeKey(k) for k in arc)
    if kind is OrderKind.WEAK:
        x, z = tail.x, head.x
        if x & ~z or x == z or z >> n:
            raise ArcNotInNetworkError(f"{arc!r} is not an arc of the weak order network")
        return "".join("a" if x >> k & 1 else "b" if z >> k & 1 else "c" for k in range(n))
    if kind is OrderKind.INTERVAL:
        (x, y), (z, t) = (tail.x, tail.y), (head.x, head.y)
        valid = (
            y is not None and t is not None
            and not (y & ~x) and not (t & ~z) and not (z >> n)
            and not (x & ~z) and not (y & ~t)
            and ((z & ~x).bit_count(), (t & ~y).bit_count()) in ((1, 0), (0, 1))
        )
        if not valid:
            raise ArcNotInNetworkError(f"{arc!r} is not an arc of the interval order network")
        letters = []
        for k in range(n):
            if y >> k & 1:
                letters.append("a")
            elif (t & ~y) >> k & 1:
                letters.append("e")
            elif (z & ~x) >> k & 1:
                letters.append("d")
            elif x >> k & 1:
                letters.append("b")
            else:
                letters.append("c")
        return "".join(letters)
    raise ValueError("word encodings exist for kinds wo and io only")


def word_decode_arc(n: int, kind, word: str) -> tuple:
    """Inverse of :func:`word_encode_arc`."""
    kind = OrderKind.parse(kind)
    if len(word) != n:
        raise ValueError(f"word must have length {n}")

    def mask(letters):
        return sum(1 << k for k, ch in enumerate(word) if ch in letters)

    if kind is OrderKind.WEAK:
        if set(word) - set("abc") or "b" not in word:
            raise ValueError(f"{word!r} is not a weak order arc word")
        return NodeKey(mask("a")), NodeKey(mask("ab"))
    if kind is OrderKind.INTERVAL:
        if set(word) - set("abcde") or sorted((word.count("d"), word.count("e"))) != [0, 1]:
            raise ValueError(f"{word!r} is not an interval order arc word")
        return NodeKey(mask("abe"), mask("a")), NodeKey(mask("abde"), mask("ae"))
    raise ValueError("word encodings exist for kinds wo and io only")
