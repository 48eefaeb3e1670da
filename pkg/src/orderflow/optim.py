"""Convex minimization over a network flow polytope, seen through its projection.

The solver is away-step Frank-Wolfe.  Each linear subproblem is a shortest
path on the network with arc costs equal to the pulled-back gradient, so no
external LP or QP solver is involved.  Iterates are kept as explicit convex
combinations of source-sink paths.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, nnls

from . import stats
from .errors import DimensionMismatchError, NonFiniteObjectiveError
from .flowpoly import first_path, shortest_path_lmo
from .relations import pair_dimension, pair_list

LINE_SEARCHES = ("exact", "backtracking")


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``line_search="exact"`` uses the closed form for quadratic and linear
    objectives and a 1-D root search on the directional derivative
    otherwise; ``"backtracking"`` is Armijo with ``armijo_shrink`` and
    ``armijo_slope``.  ``corrective`` re-optimizes the weights over the
    active paths after every step for squared-distance objectives; ``None``
    lets :func:`membership_distance` switch it on.
    """

    max_iterations: int = 50_000
    duality_gap_tolerance: float = 1e-8
    membership_tolerance: float = 1e-6
    line_search: str = "exact"
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    domain_guard: float = 1e-12
    corrective: bool | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("duality_gap_tolerance", "membership_tolerance", "domain_guard"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.line_search not in LINE_SEARCHES:
            raise ValueError(f"line_search must be one of {LINE_SEARCHES}")
        if not (0 < self.armijo_shrink < 1 and 0 < self.armijo_slope < 1):
            raise ValueError("Armijo constants must lie in (0, 1)")


# ---------------------------------------------------------------------------
# Objectives (functions of the pair vector p)
# ---------------------------------------------------------------------------

class SquaredDistance:
    """``scale * ||p - target||**2``."""

    def __init__(self, target, scale=1.0):
        self.target = np.asarray(target, dtype=float)
        self.scale = float(scale)

    def value(self, p):
        r = p - self.target
        return self.scale * float(r @ r)

    def gradient(self, p):
        return 2.0 * self.scale * (p - self.target)

    def exact_step(self, p, d, g, gamma_max):
        dd = float(d @ d)
        if dd == 0.0:
            return 0.0
        return min(max(-float(g @ d) / (2.0 * self.scale * dd), 0.0), gamma_max)

    def simplex_minimizer(self, images):
        """Weights on the rows of ``images`` minimizing the distance to ``target``."""
        k = images.shape[0]
        big = 1e3 * max(1.0, float(np.abs(images).max()), float(np.abs(self.target).max()))
        a = np.vstack([images.T, np.full((1, k), big)])
        b = np.concatenate([self.target, [big]])
        w, _ = nnls(a, b, maxiter=50 * k + 100)
        total = w.sum()
        if total <= 0:
            return None
        w = w / total
        # the penalty row only approximates sum(w) = 1; re-solve exactly on the support
        support = np.flatnonzero(w > 0)
        v = images[support]
        m = len(support)
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = v @ v.T
        kkt[:m, m] = kkt[m, :m] = 1.0
        rhs = np.concatenate([v @ self.target, [1.0]])
        exact = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:m]
        if np.all(exact >= 0) and abs(exact.sum() - 1.0) <= 1e-12:
            w = np.zeros(k)
            w[support] = exact
        return w


class LinearObjective:
    """``<c, p>``."""

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)

    def value(self, p):
        return float(self.c @ p)

    def gradient(self, p):
        return self.c

    def exact_step(self, p, d, g, gamma_max):
        return gamma_max if float(self.c @ d) < 0 else 0.0


class NegativeLogLikelihood:
    """``-log L(p | data)`` with probabilities clamped to ``[guard, 1]``.

    The clamp keeps value and gradient finite on the boundary of the order
    polytope, where vertices live; it does not move the optimum as long as
    the maximizer has every positive-count probability above ``guard``.
    """

    def __init__(self, data, guard=1e-12):
        self.data = data
        self.guard = float(guard)
        self._fwd, self._bwd = stats._pair_positions(data.n)
        self._c = data.choice_counts()
        self._t = data.indifferent.astype(float)

    def _guarded(self, p):
        q = np.clip(p, self.guard, 1.0)
        rest = np.maximum(1.0 - p[self._fwd] - p[self._bwd], self.guard)
        return q, rest

    def value(self, p):
        q, rest = self._guarded(p)
        return -float(self._c @ np.log(q) + self._t @ np.log(rest))

    def gradient(self, p):
        q, rest = self._guarded(p)
        g = -self._c / q
        tie = self._t / rest
        g[self._fwd] += tie
        g[self._bwd] += tie
        return g


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass
class SolveResult:
    """Outcome of :func:`minimize_over_flow_polytope`.

    ``paths``/``weights`` form the maintained convex decomposition of
    ``flow``; ``p`` is the projection of ``flow``.
    """

    flow: np.ndarray
    p: np.ndarray
    objective: float
    gap: float
    best_gap: float
    iterations: int
    status: str
    paths: list
    weights: np.ndarray
    gap_history: list = field(default_factory=list, repr=False)
    log_likelihood: float | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_json(self):
        n = int(round((1 + math.sqrt(1 + 4 * len(self.p))) / 2))
        obj = {
            "objective": self.objective,
            "gap": self.gap,
            "best_gap": self.best_gap,
            "iterations": self.iterations,
            "status": self.status,
            "p": {f"{i},{j}": float(v) for (i, j), v in zip(pair_list(n), self.p)},
            "active_paths": [
                {"arcs": [int(a) for a in path], "weight": float(w)}
                for path, w in zip(self.paths, self.weights)
            ],
        }
        if self.log_likelihood is not None:
            obj["log_likelihood"] = self.log_likelihood
        return obj

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _check_finite(value, grad):
    if not math.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NonFiniteObjectiveError("objective value or gradient is not finite at a guarded point")


def _line_search(objective, p, d, g, gamma_max, cfg):
    slope = float(g @ d)
    if slope >= 0.0 or gamma_max <= 0.0:
        return 0.0
    if cfg.line_search == "exact":
        step = getattr(objective, "exact_step", None)
        if step is not None:
            return step(p, d, g, gamma_max)

        def dphi(t):
            return float(objective.gradient(p + t * d) @ d)

        if dphi(gamma_max) <= 0.0:
            return gamma_max
        return brentq(dphi, 0.0, gamma_max, xtol=1e-15 * max(gamma_max, 1e-300), rtol=1e-15)
    f0 = objective.value(p)
    t = gamma_max
    while t > 1e-20:
        if objective.value(p + t * d) <= f0 + cfg.armijo_slope * t * slope:
            return t
        t *= cfg.armijo_shrink
    return 0.0


def minimize_over_flow_polytope(net, projection, objective, cfg: SolverConfig = SolverConfig(),
                                *, stop=None, corrective=None) -> SolveResult:
    """Away-step Frank-Wolfe for ``min objective(pi(flow))`` over the flow polytope.

    ``objective`` needs ``value(p)`` and ``gradient(p)``; an
    ``exact_step(p, d, g, gamma_max)`` method is used when present.
    ``stop(value, gap)`` may return a status string to end early.
    """
    corrective = cfg.corrective if corrective is None else corrective
    corrective = bool(corrective) and hasattr(objective, "simplex_minimizer")
    tol = cfg.duality_gap_tolerance
    image_cache = {}

    def image(path):
        img = image_cache.get(path)
        if img is None:
            img = image_cache[path] = projection.path_image(path)
        return img

    start = first_path(net)
    paths = [start]
    images = image(start)[None, :]
    weights = np.array([1.0])
    p = images[0].copy()
    gap = best_gap = math.inf
    status = "max_iterations"
    history = []
    value = objective.value(p)
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        g = objective.gradient(p)
        _check_finite(value, g)
        s_path = shortest_path_lmo(net, projection.apply_adjoint(g))
        s = image(s_path)
        g_p = float(g @ p)
        g_s = float(g @ s)
        gap = g_p - g_s
        best_gap = min(best_gap, gap)
        history.append(gap)
        if gap <= tol:
            status = "converged"
            break
        if stop is not None:
            reason = stop(value, gap)
            if reason:
                status = reason
                break

        scores = images @ g
        a = int(np.argmax(scores))
        away_slope = g_p - float(scores[a])  # <g, p - v_away>, <= 0
        if len(paths) == 1 or g_s - g_p <= away_slope:
            d = s - p
            gamma = _line_search(objective, p, d, g, 1.0, cfg)
            if gamma >= 1.0:
                paths, images, weights = [s_path], s[None, :], np.array([1.0])
            elif gamma > 0.0:
                weights = weights * (1.0 - gamma)
                try:
                    k = paths.index(s_path)
                    weights[k] += gamma
                except ValueError:
                    paths.append(s_path)
                    images = np.vstack([images, s])
                    weights = np.append(weights, gamma)
        else:
            w_a = weights[a]
            gamma_max = w_a / (1.0 - w_a)
            d = p - images[a]
            gamma = _line_search(objective, p, d, g, gamma_max, cfg)
            weights = weights * (1.0 + gamma)
            weights[a] -= gamma
            if gamma >= gamma_max:
                weights[a] = 0.0

        if corrective and len(paths) > 1:
            w_new = objective.simplex_minimizer(images)
            if w_new is not None and objective.value(w_new @ images) <= objective.value(weights @ images):
                weights = w_new

        keep = weights > 0.0
        if not keep.all():
            paths = [q for q, k in zip(paths, keep) if k]
            images = images[keep]
            weights = weights[keep]
        weights = weights / weights.sum()
        p = weights @ images
        value = objective.value(p)

    flow = np.zeros(net.num_arcs)
    for path, w in zip(paths, weights):
        flow[list(path)] += w
    return SolveResult(flow, projection.apply(flow), value, gap, best_gap, it, status,
                       paths, weights, history)


# ---------------------------------------------------------------------------
# The two model programs
# ---------------------------------------------------------------------------

@dataclass
class Membership:
    """Nearest point of the model to a target; unpacks as ``(distance, nearest, inside)``."""

    distance: float
    nearest: np.ndarray
    inside: bool
    distance_lower_bound: float
    result: SolveResult

    def __iter__(self):
        return iter((self.distance, self.nearest, self.inside))

    def to_json(self):
        n = int(round((1 + math.sqrt(1 + 4 * len(self.nearest))) / 2))
        return {
            "distance": self.distance,
            "distance_lower_bound": self.distance_lower_bound,
            "inside": self.inside,
            "nearest": {f"{i},{j}": float(v) for (i, j), v in zip(pair_list(n), self.nearest)},
            "gap": self.result.gap,
            "iterations": self.result.iterations,
            "status": self.result.status,
        }


def membership_distance(net, projection, target, cfg: SolverConfig = SolverConfig(),
                        *, classify_only=False) -> Membership:
    """Euclidean distance from ``target`` to the projected flow polytope.

    ``inside`` means distance at most ``cfg.membership_tolerance``.  With
    ``classify_only`` the solve stops as soon as the side is certain: the
    current squared distance is within tolerance, or its Frank-Wolfe lower
    bound already exceeds it.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (pair_dimension(net.n),):
        raise DimensionMismatchError(
            f"target has shape {target.shape}, expected ({pair_dimension(net.n)},)")
    if not np.all(np.isfinite(target)):
        raise ValueError("target must be finite")
    eps2 = cfg.membership_tolerance ** 2
    corrective = True if cfg.corrective is None else cfg.corrective

    def stop(value, gap):
        if value <= eps2:
            return "inside"
        if value - gap > eps2:
            return "outside"
        return None

    res = minimize_over_flow_polytope(net, projection, SquaredDistance(target), cfg,
                                      stop=stop if classify_only else None,
                                      corrective=corrective)
    sq = max(res.objective, 0.0)
    lower = math.sqrt(max(sq - max(res.gap, 0.0), 0.0))
    dist = math.sqrt(sq)
    return Membership(dist, res.p, dist <= cfg.membership_tolerance, lower, res)


def fit_mle(net, projection, data, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Maximum-likelihood choice probabilities within the network's order model."""
    if data.n != net.n:
        raise DimensionMismatchError(f"data has n={data.n}, network has n={net.n}")
    stats.check_compatible(data, net.kind)
    objective = NegativeLogLikelihood(data, cfg.domain_guard)
    res = minimize_over_flow_polytope(net, projection, objective, cfg)
    res.log_likelihood = stats.log_likelihood(data, res.p)
    res.objective = -res.log_likelihood
    return res

