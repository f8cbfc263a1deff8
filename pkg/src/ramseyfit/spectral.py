"""Spectral and exact bounds on set-pair discrepancy.

For a graph on ``N`` vertices let ``M = A - (J - I)/2``.  Since
``e(S,T) - |S||T|/2 = 1_S' M 1_T - |S ∩ T|/2`` we get, for all S, T,

    |e(S,T) - |S||T|/2| <= ||M|| * N + N/2.

``spectral_discrepancy_bound`` estimates ``||M||`` by power iteration on
``M^2``; ``max_discrepancy`` computes the exact worst deviation by looping
over S only, because for a fixed S the worst T is read off the per-vertex
counts ``|N(t) ∩ S| - |S|/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import Graph

__all__ = [
    "SpectralReport",
    "spectral_discrepancy_bound",
    "discrepancy_from_norm",
    "max_discrepancy",
    "worst_partner",
    "sampled_max_discrepancy",
    "EXACT_DISCREPANCY_LIMIT",
]

EXACT_DISCREPANCY_LIMIT = 20
MAX_ITERATIONS = 10_000
REL_TOL = 1e-9
PERTURB_SEED = 0x5EED


@dataclass(frozen=True)
class SpectralReport:
    spectral_norm_estimate: float
    iterations: int
    residual: float
    certified_bound: float
    converged: bool
    second_estimate: float  # next singular value after deflating the top one

    def discrepancy_bound(self, vertex_count: int) -> float:
        return discrepancy_from_norm(self.certified_bound, vertex_count)


def discrepancy_from_norm(norm: float, vertex_count: int) -> float:
    return norm * vertex_count + vertex_count / 2


def _centered(g: Graph) -> np.ndarray:
    a = g.adjacency_matrix(np.float64)
    m = a - 0.5
    np.fill_diagonal(m, 0.0)
    return m


def _power(square: np.ndarray, x: np.ndarray, deflate: np.ndarray | None,
           max_iter: int) -> tuple[float, np.ndarray, int, float, bool]:
    x = x / np.linalg.norm(x)
    theta, resid = 0.0, math.inf
    for it in range(1, max_iter + 1):
        if deflate is not None:
            x = x - deflate * (deflate @ x)
            x /= np.linalg.norm(x)
        y = square @ x
        if deflate is not None:
            y = y - deflate * (deflate @ y)
        theta = float(x @ y)
        resid = float(np.linalg.norm(y - theta * x))
        if resid < REL_TOL * max(theta, 1e-300):
            return theta, x, it, resid, True
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0, x, it, 0.0, True
        x = y / norm
    return theta, x, max_iter, resid, False


def spectral_discrepancy_bound(g: Graph, max_iter: int = MAX_ITERATIONS) -> SpectralReport:
    """Estimate ``||A - (J-I)/2||`` and report a bound covering the residual.

    Power iteration runs on ``P = M^2`` (the top eigenvalue of ``M`` may be
    negative).  With Rayleigh quotient ``theta`` and residual
    ``r = ||P x - theta x||`` some eigenvalue of ``P`` lies within ``r`` of
    ``theta``; ``certified_bound = sqrt(theta + r)``.  A non-converged run is
    reported with its (large) residual rather than hidden.
    """
    n = g.n
    if n < 2:
        raise InputError("spectral bound needs at least 2 vertices")
    m = _centered(g)
    square = m @ m
    rng = np.random.Generator(np.random.PCG64(PERTURB_SEED))
    x0 = np.ones(n) + 1e-3 * rng.standard_normal(n)
    theta, vec, iters, resid, ok = _power(square, x0, None, max_iter)
    theta = max(theta, 0.0)
    second = 0.0
    if n > 2:
        theta2, _, _, _, _ = _power(square, rng.standard_normal(n), vec, min(max_iter, 2000))
        second = math.sqrt(max(theta2, 0.0))
    return SpectralReport(
        spectral_norm_estimate=math.sqrt(theta),
        iterations=iters,
        residual=resid,
        certified_bound=math.sqrt(theta + resid),
        converged=ok,
        second_estimate=second,
    )


def _row_masks(g: Graph) -> np.ndarray:
    return g.adjacency_matrix(np.int64)


def worst_partner(adj: np.ndarray, s_indicator: np.ndarray) -> tuple[float, np.ndarray]:
    """For one S, the exact max over T of |e(S,T) - |S||T|/2| and an optimal T."""
    s = s_indicator.sum()
    excess = adj @ s_indicator - s / 2.0
    pos = excess[excess > 0].sum()
    neg = -excess[excess < 0].sum()
    if pos >= neg:
        return float(pos), excess > 0
    return float(neg), excess < 0


def _batch_worst(adj: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # S: (batch, n) 0/1 matrix; returns per-row max deviation and whether the
    # positive side attains it.
    sizes = S.sum(axis=1, keepdims=True)
    excess = S @ adj - sizes / 2.0
    pos = np.where(excess > 0, excess, 0.0).sum(axis=1)
    neg = np.where(excess < 0, -excess, 0.0).sum(axis=1)
    return np.maximum(pos, neg), pos >= neg


def _partner_set(adj, s_row) -> frozenset[int]:
    _, t = worst_partner(adj, s_row)
    return frozenset(int(i) for i in np.flatnonzero(t))


def max_discrepancy(g: Graph) -> tuple[float, frozenset[int], frozenset[int]]:
    """Exact ``max_{S,T} |e(S,T) - |S||T|/2|`` with a witness pair.

    Enumerates all ``2^N`` sets S (so ``N <= EXACT_DISCREPANCY_LIMIT``); ties
    go to the numerically largest S mask, which makes S = V win when it is
    optimal.
    """
    n = g.n
    if n > EXACT_DISCREPANCY_LIMIT:
        raise InputError(f"exact discrepancy limited to {EXACT_DISCREPANCY_LIMIT} vertices")
    if n == 0:
        return 0.0, frozenset(), frozenset()
    adj = _row_masks(g).astype(np.float64)
    best_val, best_mask = -1.0, 0
    chunk = 1 << min(n, 14)
    weights = 1 << np.arange(n, dtype=np.int64)
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        S = ((masks[:, None] & weights[None, :]) != 0).astype(np.float64)
        vals, _ = _batch_worst(adj, S)
        top = vals.max()
        idx = int(np.flatnonzero(vals == top)[-1])
        if top > best_val or (top == best_val and masks[idx] > best_mask):
            best_val, best_mask = float(top), int(masks[idx])
    s_row = np.array([(best_mask >> i) & 1 for i in range(n)], dtype=np.float64)
    S = frozenset(i for i in range(n) if (best_mask >> i) & 1)
    return best_val, S, _partner_set(adj, s_row)


def sampled_max_discrepancy(g: Graph, samples: int, seed: int,
                            batch: int = 512) -> tuple[float, frozenset[int], frozenset[int]]:
    """Worst deviation over ``samples`` random S (each paired with its worst T).

    S = V is always included.  Random S first draw a uniform size then a
    uniform subset of that size, so small and large sets are both covered.
    """
    n = g.n
    adj = _row_masks(g).astype(np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))
    full = np.ones((1, n))
    best_val, _ = _batch_worst(adj, full)
    best_val, best_row = float(best_val[0]), full[0]
    remaining = max(samples - 1, 0)
    while remaining > 0:
        b = min(batch, remaining)
        remaining -= b
        sizes = rng.integers(0, n + 1, size=b)
        keys = rng.random((b, n))
        ranks = keys.argsort(axis=1).argsort(axis=1)
        S = (ranks < sizes[:, None]).astype(np.float64)
        vals, _ = _batch_worst(adj, S)
        i = int(vals.argmax())
        if vals[i] > best_val:
            best_val, best_row = float(vals[i]), S[i]
    S = frozenset(int(i) for i in np.flatnonzero(best_row))
    return best_val, S, _partner_set(adj, best_row)
