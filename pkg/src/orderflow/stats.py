"""Paired-comparison choice data, trinomial likelihood and encompassing Bayes factors.

For an unordered pair ``i < j`` a respondent either picks ``j`` (probability
``p[(i, j)]``), picks ``i`` (``p[(j, i)]``) or declares indifference
(``1 - p[(i, j)] - p[(j, i)]``).  Two-alternative forced choice is the case
without indifference counts.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePriorError, DimensionMismatchError, IncompatibleDataError
from .relations import OrderKind, infer_n, pair_dimension, pair_index


def unordered_pairs(n):
    return list(itertools.combinations(range(n), 2))


def _pair_positions(n):
    """Pair-vector positions of ``(i, j)`` and ``(j, i)`` for every ``i < j``."""
    idx = pair_index(n)
    up = unordered_pairs(n)
    fwd = np.array([idx[i, j] for i, j in up], dtype=np.int64)
    bwd = np.array([idx[j, i] for i, j in up], dtype=np.int64)
    return fwd, bwd


@dataclass(frozen=True)
class ChoiceData:
    """Counts per unordered pair ``i < j`` (lexicographic order).

    ``chose_j``: times ``j`` was chosen over ``i``; ``chose_i``: times ``i``
    was chosen over ``j``; ``indifferent``: indifference responses.
    """

    n: int
    chose_j: np.ndarray
    chose_i: np.ndarray
    indifferent: np.ndarray

    def __post_init__(self):
        size = self.n * (self.n - 1) // 2
        for name in ("chose_j", "chose_i", "indifferent"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.shape != (size,):
                raise DimensionMismatchError(f"{name} must have length {size} for n={self.n}")
            if np.any(arr < 0):
                raise ValueError(f"{name} must be nonnegative")
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, n):
        z = np.zeros(n * (n - 1) // 2, dtype=np.int64)
        return cls(n, z, z.copy(), z.copy())

    @classmethod
    def from_counts(cls, n, counts):
        """Build from ``{(i, j): (chose_j, chose_i, indifferent)}`` with ``i < j``."""
        up = unordered_pairs(n)
        pos = {p: k for k, p in enumerate(up)}
        cj, ci, t = (np.zeros(len(up), dtype=np.int64) for _ in range(3))
        for (i, j), (a, b, c) in counts.items():
            if i > j:
                i, j, a, b = j, i, b, a
            k = pos[(i, j)]
            cj[k], ci[k], t[k] = a, b, c
        return cls(n, cj, ci, t)

    @property
    def totals(self) -> np.ndarray:
        return self.chose_j + self.chose_i + self.indifferent

    @property
    def has_indifference(self) -> bool:
        return bool(self.indifferent.any())

    def choice_counts(self) -> np.ndarray:
        """Pair vector ``C`` with ``C[(i, j)]`` = times ``j`` was chosen over ``i``."""
        fwd, bwd = _pair_positions(self.n)
        c = np.zeros(pair_dimension(self.n))
        c[fwd] = self.chose_j
        c[bwd] = self.chose_i
        return c

    def to_json(self):
        return {
            "n": self.n,
            "pairs": [
                {"i": i, "j": j, "chose_j": int(a), "chose_i": int(b), "indifferent": int(c)}
                for (i, j), a, b, c in zip(unordered_pairs(self.n), self.chose_j,
                                           self.chose_i, self.indifferent)
            ],
        }

    @classmethod
    def from_json(cls, obj):
        n = int(obj["n"])
        counts = {}
        for rec in obj.get("pairs", []):
            i, j = int(rec["i"]), int(rec["j"])
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"invalid pair ({i}, {j}) for n={n}")
            counts[(i, j)] = (int(rec.get("chose_j", 0)), int(rec.get("chose_i", 0)),
                              int(rec.get("indifferent", 0)))
        return cls.from_counts(n, counts)

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)


def check_compatible(data: ChoiceData, kind):
    if OrderKind.parse(kind) is OrderKind.LINEAR and data.has_indifference:
        raise IncompatibleDataError("linear orders leave no room for indifference responses")


def simulate_choices(p, trials, rng, forced_choice=False) -> ChoiceData:
    """Draw ``trials`` responses per unordered pair from choice probabilities ``p``."""
    p = np.asarray(p, dtype=float)
    n = infer_n(len(p))
    fwd, bwd = _pair_positions(n)
    cj, ci, t = [], [], []
    for a, b in zip(p[fwd], p[bwd]):
        if forced_choice:
            x = rng.binomial(trials, a / (a + b))
            cj.append(x)
            ci.append(trials - x)
            t.append(0)
        else:
            probs = np.clip([a, b, 1.0 - a - b], 0.0, None)
            draw = rng.multinomial(trials, probs / probs.sum())
            cj.append(draw[0])
            ci.append(draw[1])
            t.append(draw[2])
    return ChoiceData(n, np.array(cj), np.array(ci), np.array(t))


def _check_dim(data, p):
    p = np.asarray(p, dtype=float)
    if p.shape != (pair_dimension(data.n),):
        raise DimensionMismatchError(
            f"pair vector has shape {p.shape}, expected ({pair_dimension(data.n)},)")
    return p


def _xlogy(c, x):
    # 0 * log 0 = 0; c > 0 with x = 0 gives -inf
    with np.errstate(divide="ignore"):
        return np.where(c > 0, c * np.log(np.where(c > 0, x, 1.0)), 0.0)


def log_likelihood(data: ChoiceData, p) -> float:
    """Trinomial log-likelihood of ``data`` at pair probabilities ``p``."""
    p = _check_dim(data, p)
    fwd, bwd = _pair_positions(data.n)
    rest = np.maximum(1.0 - p[fwd] - p[bwd], 0.0)
    total = (_xlogy(data.chose_j, p[fwd]).sum() + _xlogy(data.chose_i, p[bwd]).sum()
             + _xlogy(data.indifferent, rest).sum())
    return float(total)


def log_likelihood_gradient(data: ChoiceData, p) -> np.ndarray:
    """Gradient of :func:`log_likelihood`; ``p`` must be strictly inside the domain."""
    p = _check_dim(data, p)
    fwd, bwd = _pair_positions(data.n)
    c = data.choice_counts()
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(c > 0, c / p, 0.0)
        rest = 1.0 - p[fwd] - p[bwd]
        tie = np.where(data.indifferent > 0, data.indifferent / rest, 0.0)
    g[fwd] -= tie
    g[bwd] -= tie
    return g


# ---------------------------------------------------------------------------
# Encompassing prior / posterior sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BayesConfig:
    """Monte-Carlo settings.

    ``prior`` is the per-pair Dirichlet concentration over (choose j,
    choose i, indifferent); only its first two entries are used under forced
    choice.  ``membership_tolerance`` is the distance below which a sample
    counts as inside the model.
    """

    sample_count: int = 100_000
    seed: int = 0
    prior: tuple = (1.0, 1.0, 1.0)
    membership_tolerance: float = 1e-6

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if len(self.prior) != 3 or min(self.prior) <= 0:
            raise ValueError("prior must be three positive concentrations")
        if self.membership_tolerance <= 0:
            raise ValueError("membership_tolerance must be positive")


PRIOR_STREAM = 0
POSTERIOR_STREAM = 1


def dirichlet_parameters(n, data, cfg, forced_choice=False) -> np.ndarray:
    """Per-pair concentration array, shape ``(n*(n-1)/2, cells)``."""
    size = n * (n - 1) // 2
    cells = 2 if forced_choice else 3
    alpha = np.tile(np.asarray(cfg.prior[:cells], dtype=float), (size, 1))
    if data is not None:
        if data.n != n:
            raise DimensionMismatchError(f"data has n={data.n}, expected {n}")
        if forced_choice and data.has_indifference:
            raise IncompatibleDataError("forced-choice sampling cannot use indifference counts")
        alpha[:, 0] += data.chose_j
        alpha[:, 1] += data.chose_i
        if not forced_choice:
            alpha[:, 2] += data.indifferent
    return alpha


def sample_rng(seed, stream, index):
    """Generator for one sample; depends only on ``(seed, stream, index)``."""
    return np.random.default_rng([int(seed), int(stream), int(index)])


def sample_encompassing(n, data, cfg: BayesConfig, *, forced_choice=False,
                        stream=PRIOR_STREAM, start=0, stop=None):
    """Yield pair vectors drawn per pair from a Dirichlet prior or posterior.

    Sample ``k`` uses its own generator seeded by ``(cfg.seed, stream, k)``,
    so any slice of the stream can be produced independently.
    """
    alpha = dirichlet_parameters(n, data, cfg, forced_choice)
    fwd, bwd = _pair_positions(n)
    stop = cfg.sample_count if stop is None else stop
    dim = pair_dimension(n)
    for k in range(start, stop):
        g = sample_rng(cfg.seed, stream, k).standard_gamma(alpha)
        w = g / g.sum(axis=1, keepdims=True)
        p = np.empty(dim)
        p[fwd] = w[:, 0]
        p[bwd] = w[:, 1] if not forced_choice else 1.0 - w[:, 0]
        yield p


@dataclass(frozen=True)
class BayesFactorResult:
    bf: float
    prior_hits: int
    posterior_hits: int
    sample_count: int
    mc_stderr: float
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def prior_proportion(self):
        return self.prior_hits / self.sample_count

    @property
    def posterior_proportion(self):
        return self.posterior_hits / self.sample_count

    def to_json(self):
        return {
            "bf": self.bf,
            "prior_hits": self.prior_hits,
            "posterior_hits": self.posterior_hits,
            "sample_count": self.sample_count,
            "prior_proportion": self.prior_proportion,
            "posterior_proportion": self.posterior_proportion,
            "mc_stderr": self.mc_stderr,
        }


def ratio_stderr(prior_hits, posterior_hits, sample_count) -> float:
    """Delta-method standard error of ``(posterior/N) / (prior/N)``."""
    q0 = prior_hits / sample_count
    q1 = posterior_hits / sample_count
    var0 = q0 * (1 - q0) / sample_count
    var1 = q1 * (1 - q1) / sample_count
    return math.sqrt(var1 / q0 ** 2 + q1 ** 2 * var0 / q0 ** 4)


def count_hits(net, projection, samples, solver_cfg=None, tolerance=1e-6) -> int:
    from .optim import SolverConfig, membership_distance

    cfg = solver_cfg or SolverConfig(membership_tolerance=tolerance)
    return sum(
        membership_distance(net, projection, p, cfg, classify_only=True).inside
        for p in samples
    )


def bayes_factor(net, projection, data, cfg: BayesConfig = BayesConfig(), solver_cfg=None,
                 prior_hits=None):
    """Encompassing-prior Bayes factor of the network's order model.

    The prior proportion uses stream 0 of the prior, the posterior proportion
    stream 1 of the posterior given ``data`` (of the prior again when
    ``data`` is None).  Linear orders are compared under forced choice.

    ``prior_hits`` may carry a count from an earlier call with the same
    network and ``cfg``; the prior stream does not depend on the data.
    """
    from .optim import SolverConfig

    forced = net.kind is OrderKind.LINEAR
    if data is not None:
        check_compatible(data, net.kind)
    solver_cfg = solver_cfg or SolverConfig(membership_tolerance=cfg.membership_tolerance)
    n = net.n
    if prior_hits is None:
        prior = sample_encompassing(n, None, cfg, forced_choice=forced, stream=PRIOR_STREAM)
        prior_hits = count_hits(net, projection, prior, solver_cfg)
    post = sample_encompassing(n, data, cfg, forced_choice=forced, stream=POSTERIOR_STREAM)
    posterior_hits = count_hits(net, projection, post, solver_cfg)
    if prior_hits == 0:
        raise DegeneratePriorError(prior_hits, posterior_hits, cfg.sample_count)
    bf = posterior_hits / prior_hits
    return BayesFactorResult(bf, prior_hits, posterior_hits, cfg.sample_count,
                             ratio_stderr(prior_hits, posterior_hits, cfg.sample_count))
