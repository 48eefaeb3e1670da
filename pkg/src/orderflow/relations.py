"""Binary preference relations and the four order kinds.

Alternatives are the integers ``0..n-1``.  ``i R j`` means that ``i`` is
strictly less preferred than ``j``.  Vectors over ordered pairs of distinct
alternatives ("pair vectors") are plain 1-D numpy arrays of length
``n*(n-1)``, indexed row-major with the diagonal skipped; see
:func:`pair_list` and :func:`pair_index`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapExceededError, InternalVerificationError, NotAnOrderError


class OrderKind(enum.Enum):
    LINEAR = "lo"
    WEAK = "wo"
    INTERVAL = "io"
    SEMI = "so"

    @classmethod
    def parse(cls, value):
        """Accept an ``OrderKind``, a short code (``lo``) or a long name."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "lo": cls.LINEAR, "linear": cls.LINEAR, "linearorder": cls.LINEAR,
            "wo": cls.WEAK, "weak": cls.WEAK, "weakorder": cls.WEAK,
            "io": cls.INTERVAL, "interval": cls.INTERVAL, "intervalorder": cls.INTERVAL,
            "so": cls.SEMI, "semi": cls.SEMI, "semiorder": cls.SEMI,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown order kind {value!r}; use lo, wo, io or so") from None

    def __str__(self):
        return self.value


#: Default enumeration caps (largest n accepted by :func:`enumerate_orders`).
ENUMERATION_CAPS = {
    OrderKind.LINEAR: 8,
    OrderKind.WEAK: 6,
    OrderKind.INTERVAL: 6,
    OrderKind.SEMI: 6,
}

# Largest n for which enumeration filters all 2**(n*(n-1)) relations.
_FILTER_LIMIT = 4


# ---------------------------------------------------------------------------
# Pair space
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple:
    """Ordered pairs ``(i, j)``, ``i != j``, in pair-vector order."""
    return tuple((i, j) for i in range(n) for j in range(n) if i != j)


@lru_cache(maxsize=None)
def _pair_index(n):
    idx = np.full((n, n), -1, dtype=np.int64)
    for k, (i, j) in enumerate(pair_list(n)):
        idx[i, j] = k
    idx.setflags(write=False)
    return idx


def pair_index(n: int) -> np.ndarray:
    """Read-only ``n x n`` array giving the pair-vector position of ``(i, j)``.

    Diagonal entries are ``-1``.
    """
    return _pair_index(n)


def pair_dimension(n: int) -> int:
    return n * (n - 1)


def pairs_to_matrix(n: int, x) -> np.ndarray:
    """Scatter a pair vector into an ``n x n`` matrix with zero diagonal."""
    x = np.asarray(x, dtype=float)
    if x.shape != (pair_dimension(n),):
        raise ValueError(f"pair vector for n={n} must have length {pair_dimension(n)}")
    m = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    m[off] = x
    return m


def matrix_to_pairs(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    return m[~np.eye(n, dtype=bool)]


def infer_n(dimension: int) -> int:
    """Recover ``n`` from a pair-vector length ``n*(n-1)``."""
    n = int(round((1 + (1 + 4 * dimension) ** 0.5) / 2))
    if n * (n - 1) != dimension:
        raise ValueError(f"{dimension} is not of the form n*(n-1)")
    return n


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------

class Relation:
    """Irreflexive binary relation on ``range(n)``, immutable and hashable."""

    __slots__ = ("_m", "_key")

    def __init__(self, matrix):
        m = np.array(matrix, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("relation matrix must be square")
        if m.diagonal().any():
            raise ValueError("relation must be irreflexive (empty diagonal)")
        m.setflags(write=False)
        self._m = m
        self._key = (m.shape[0], np.packbits(m, axis=None).tobytes())

    @classmethod
    def from_pairs(cls, n, pairs):
        m = np.zeros((n, n), dtype=bool)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"pair {(i, j)} out of range for n={n}")
            m[i, j] = True
        return cls(m)

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def from_ranking(cls, ranking):
        """Linear order in which ``ranking`` lists alternatives from least to most preferred."""
        n = len(ranking)
        pos = np.empty(n, dtype=int)
        pos[list(ranking)] = np.arange(n)
        return cls(pos[:, None] < pos[None, :])

    @classmethod
    def from_utility(cls, u):
        """Weak order ``i R j`` iff ``u[i] < u[j]``."""
        u = np.asarray(u)
        return cls(u[:, None] < u[None, :])

    @property
    def n(self) -> int:
        return self._m.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    def __contains__(self, pair):
        i, j = pair
        return bool(self._m[i, j])

    def pairs(self):
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self._m))]

    def __len__(self):
        return int(self._m.sum())

    def __eq__(self, other):
        return isinstance(other, Relation) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Relation(n={self.n}, pairs={self.pairs()})"

    def to_json(self):
        return {"n": self.n, "pairs": [list(p) for p in self.pairs()]}

    @classmethod
    def from_json(cls, obj):
        return cls.from_pairs(int(obj["n"]), [tuple(p) for p in obj["pairs"]])


def _compose(a, b):
    """Boolean matrix product."""
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def _is_asymmetric(m):
    return not (m & m.T).any()


def _is_transitive(m):
    return not (_compose(m, m) & ~m).any()


def _is_negatively_transitive(m):
    # not iRj and not jRk  =>  not iRk
    c = ~m
    return not (_compose(c, c) & m).any()


def _is_complete(m):
    n = m.shape[0]
    return bool((m | m.T | np.eye(n, dtype=bool)).all())


def _satisfies_two_plus_two(m):
    # Holds iff the predecessor sets {i : i R j} form a chain under inclusion.
    sub = (m.T.astype(np.int64) @ (~m).astype(np.int64)) == 0
    return bool((sub | sub.T).all())


def _satisfies_three_plus_one(m):
    # (i R k and k R l)  =>  (i R j or j R l) for every j
    c = (~m).astype(np.int64)
    return not (_compose(m, m) & ((c @ c) > 0)).any()


def is_order(r: Relation, kind) -> bool:
    """Test the combinatorial axioms of the given order kind."""
    kind = OrderKind.parse(kind)
    m = r.matrix
    if kind is OrderKind.LINEAR:
        return _is_transitive(m) and _is_complete(m)
    if kind is OrderKind.WEAK:
        return _is_asymmetric(m) and _is_negatively_transitive(m)
    if kind is OrderKind.INTERVAL:
        return _satisfies_two_plus_two(m)
    return _satisfies_two_plus_two(m) and _satisfies_three_plus_one(m)


def characteristic_vector(r: Relation) -> np.ndarray:
    """0/1 pair vector with a one exactly at the pairs of ``r``."""
    return matrix_to_pairs(r.matrix)


def all_relations(n: int):
    """Every irreflexive relation on ``range(n)`` (``2**(n*(n-1))`` of them)."""
    pairs = pair_list(n)
    off = ~np.eye(n, dtype=bool)
    for bits in itertools.product((False, True), repeat=len(pairs)):
        m = np.zeros((n, n), dtype=bool)
        m[off] = bits
        yield Relation(m)


def enumerate_orders(n: int, kind, cap: int | None = None) -> list:
    """All orders of ``kind`` on ``range(n)``, each exactly once.

    Small ``n`` filters every irreflexive relation; larger ``n`` decodes the
    source-sink paths of the kind's network, merging paths that decode to
    the same relation.  The result is sorted by pair-vector lexicographic
    order so both routes return identical lists.
    """
    kind = OrderKind.parse(kind)
    cap = ENUMERATION_CAPS[kind] if cap is None else cap
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise CapExceededError(f"enumerate_orders(n, {kind.name})", n, cap)
    if n <= _FILTER_LIMIT:
        found = [r for r in all_relations(n) if is_order(r, kind)]
    else:
        found = _enumerate_from_network(n, kind)
    return sorted(found, key=_sort_key)


def _sort_key(r):
    return tuple(characteristic_vector(r).astype(int))


def _enumerate_from_network(n, kind):
    from .flowpoly import decoded_orders
    from .networks import build_network

    return decoded_orders(build_network(n, kind))


# ---------------------------------------------------------------------------
# Numeric representations
# ---------------------------------------------------------------------------

def _predecessor_masks(m):
    n = m.shape[0]
    weights = 1 << np.arange(n, dtype=np.int64)
    return [int(weights[m[:, j]].sum()) for j in range(n)]


def weak_order_utility(r: Relation) -> np.ndarray:
    """Layer index of each alternative: ``i R j`` iff ``u[i] < u[j]``.

    Layers are numbered ``0..m-1`` from least to most preferred.
    """
    if not is_order(r, OrderKind.WEAK):
        raise NotAnOrderError(f"{r!r} is not a weak order")
    pred = _predecessor_masks(r.matrix)
    layers = sorted(set(pred), key=lambda mask: bin(mask).count("1"))
    rank = {mask: k for k, mask in enumerate(layers)}
    return np.array([rank[p] for p in pred], dtype=np.int64)


@dataclass(frozen=True)
class IntervalRepresentation:
    """Integer endpoints ``lo[i] <= hi[i]``; ``i R j`` iff ``hi[i] < lo[j]``."""

    lo: np.ndarray
    hi: np.ndarray

    def relation(self) -> Relation:
        return Relation(self.hi[:, None] < self.lo[None, :])

    def nests_strictly(self) -> bool:
        """True if some interval strictly contains another one."""
        lo, hi = self.lo, self.hi
        inside = (lo[:, None] < lo[None, :]) & (hi[None, :] < hi[:, None])
        return bool(inside.any())


def interval_representation(r: Relation, kind=OrderKind.INTERVAL) -> IntervalRepresentation:
    """Injective integer interval representation with endpoints in ``0..2n-1``.

    For semiorders the endpoints are also ordered alike: ``lo[i] < lo[j]``
    implies ``hi[i] < hi[j]``, so no interval contains another.
    """
    kind = OrderKind.parse(kind)
    if kind not in (OrderKind.INTERVAL, OrderKind.SEMI):
        raise ValueError("interval representations exist for kinds io and so only")
    if not is_order(r, kind):
        raise NotAnOrderError(f"{r!r} is not an order of kind {kind.name}")
    m = r.matrix
    n = r.n
    pred = _predecessor_masks(m)
    chain = sorted(set(pred), key=lambda mask: bin(mask).count("1"))
    rank = {mask: k for k, mask in enumerate(chain)}
    # Provisional endpoints: lo on even integers, hi on odd ones, so the two
    # families never tie.  first[i] is the rank of the smallest predecessor
    # set containing i (len(chain) when i precedes nothing).
    lo_rank = [rank[p] for p in pred]
    first = [
        next((k for k, mask in enumerate(chain) if mask >> i & 1), len(chain))
        for i in range(n)
    ]
    prov = [(2 * lo_rank[i], first[i], i, "lo") for i in range(n)]
    prov += [(2 * first[i] - 1, lo_rank[i], i, "hi") for i in range(n)]
    # Equal provisional values are broken by the other endpoint's rank, then
    # by index; the shared tie-break keeps lo and hi sorted alike.
    lo = np.empty(n, dtype=np.int64)
    hi = np.empty(n, dtype=np.int64)
    for slot, (_, _, i, which) in enumerate(sorted(prov)):
        (lo if which == "lo" else hi)[i] = slot
    rep = IntervalRepresentation(lo, hi)
    _verify_representation(r, rep, kind)
    return rep


def _verify_representation(r, rep, kind):
    lo, hi = rep.lo, rep.hi
    n = r.n
    problems = []
    if np.any(lo > hi):
        problems.append("lo > hi")
    if len(set(lo.tolist())) != n or len(set(hi.tolist())) != n:
        problems.append("endpoints not injective")
    if set(lo.tolist()) & set(hi.tolist()):
        problems.append("lo and hi images intersect")
    if rep.relation() != r:
        problems.append("representation does not reproduce the relation")
    if kind is OrderKind.SEMI:
        order_lo = lo[:, None] < lo[None, :]
        order_hi = hi[:, None] < hi[None, :]
        if (order_lo & ~order_hi).any():
            problems.append("nested intervals in a semiorder representation")
    if problems:
        raise InternalVerificationError(f"{r!r}: " + "; ".join(problems))
