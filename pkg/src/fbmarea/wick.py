"""Gaussian moments by pairing enumeration, and the bounds built on them."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_WICK_INDICES = 12


def pairings(indices: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    """All perfect matchings of a list of positions (pairs of positions)."""
    items = list(indices)
    if len(items) % 2:
        return
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for tail in pairings(remaining):
            yield [(first, other)] + tail


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


@dataclass
class PairingSet:
    size: int
    matchings: list[list[tuple[int, int]]]

    @classmethod
    def of(cls, size: int) -> "PairingSet":
        if size % 2 or size > MAX_WICK_INDICES:
            raise ValueError(f"need an even size <= {MAX_WICK_INDICES}")
        return cls(size, list(pairings(range(size))))

    def __len__(self):
        return len(self.matchings)


def _check_cov(cov) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be square")
    if not np.allclose(cov, cov.T, atol=1e-12):
        raise ValueError("covariance must be symmetric")
    return cov


def wick_moment(cov, indices: Sequence[int]) -> float:
    """E[X_{i1} ... X_{i2N}] for a centred Gaussian vector with covariance ``cov``."""
    cov = _check_cov(cov)
    idx = list(indices)
    if len(idx) % 2:
        warnings.warn("odd number of factors: centred Gaussian moment is 0", stacklevel=2)
        return 0.0
    if len(idx) > MAX_WICK_INDICES:
        raise ValueError(f"at most {MAX_WICK_INDICES} factors")
    total = 0.0
    for m in pairings(range(len(idx))):
        total += math.prod(cov[idx[a], idx[b]] for a, b in m)
    return total


def moment_covariance(cov, indices: Sequence[int]) -> np.ndarray:
    """Covariance matrix of the vector (X_{i1}, ..., X_{i2N}) with repeats."""
    cov = _check_cov(cov)
    idx = np.asarray(indices, dtype=int)
    return cov[np.ix_(idx, idx)]


def mc_moment(cov, indices: Sequence[int], n_samples: int, seed: int, batch: int = 200_000):
    """Monte Carlo estimate and standard error of the same moment."""
    cov = _check_cov(cov)
    rng = np.random.default_rng(seed)
    L = np.linalg.cholesky(cov + 1e-14 * np.eye(len(cov)))
    s = s2 = 0.0
    done = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        X = rng.standard_normal((b, len(cov))) @ L.T
        prod = np.prod(X[:, list(indices)], axis=1)
        s += prod.sum()
        s2 += (prod ** 2).sum()
        done += b
    mean = s / n_samples
    var = s2 / n_samples - mean ** 2
    return mean, math.sqrt(max(var, 0.0) / n_samples)


@dataclass
class BoundCheck:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-300


def wick_bound_check(cov, K: float, order: Sequence[int] | None = None) -> BoundCheck:
    """|<X_1...X_2N>| against K^-N prod_{i<2N} [1 + K sum_{j>i} |C_ij|].

    ``cov`` is the covariance of the 2N factors themselves (repeated variables
    appear as repeated rows); ``order`` permutes them first, since the
    right-hand side depends on the ordering.
    """
    if K <= 0:
        raise ValueError("K must be positive")
    C = _check_cov(cov)
    if order is not None:
        C = C[np.ix_(order, order)]
    n2 = C.shape[0]
    lhs = abs(wick_moment(C, range(n2))) if n2 % 2 == 0 else 0.0
    A = np.abs(C)
    rhs = K ** (-n2 / 2)
    for i in range(n2 - 1):
        rhs *= 1.0 + K * A[i, i + 1:].sum()
    return BoundCheck(lhs, rhs)


def wick_symmetric_bound_check(cov) -> BoundCheck:
    """|<X_1...X_2N>| against prod_i [1 + sum_{j != i} |C_ij|]."""
    C = _check_cov(cov)
    n2 = C.shape[0]
    lhs = abs(wick_moment(C, range(n2))) if n2 % 2 == 0 else 0.0
    A = np.abs(C)
    rhs = float(np.prod(1.0 + A.sum(axis=1) - np.diag(A)))
    return BoundCheck(lhs, rhs)


# ------------------------------------------------------- spatial structure


@dataclass
class ConnectedPairingCheck:
    n_pairs: int
    lhs: float
    rhs: float
    count: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-12)


MAX_SPATIAL_INTERVALS = 6
MAX_FIELDS_PER_INTERVAL = 2


def connected_pairing_check(cov, owner: Sequence[int], n_pairs: int, anchor: int = 0) -> ConnectedPairingCheck:
    """Sum over partial pairings of 2N indices whose interval projection is
    connected and touches ``anchor``, against (1 + sup row sum)^(3N).

    ``owner[p]`` is the interval of index p.  Row sums group the indices of
    one interval together, as in the single-scale spatial bound.
    """
    C = np.abs(_check_cov(cov))
    owner = list(owner)
    intervals = sorted(set(owner))
    if len(intervals) > MAX_SPATIAL_INTERVALS:
        raise ValueError(f"at most {MAX_SPATIAL_INTERVALS} intervals")
    if max(owner.count(d) for d in intervals) > MAX_FIELDS_PER_INTERVAL:
        raise ValueError(f"at most {MAX_FIELDS_PER_INTERVAL} fields per interval")
    n = len(owner)
    lhs, count = 0.0, 0
    for subset in itertools.combinations(range(n), 2 * n_pairs):
        if anchor not in {owner[p] for p in subset}:
            continue
        for m in pairings(subset):
            verts = {owner[p] for p in subset}
            adj = {d: set() for d in verts}
            for a, b in m:
                adj[owner[a]].add(owner[b])
                adj[owner[b]].add(owner[a])
            start = next(iter(verts))
            seen, stack = {start}, [start]
            while stack:
                for u in adj[stack.pop()] - seen:
                    seen.add(u)
                    stack.append(u)
            if seen != verts:
                continue
            lhs += math.prod(C[a, b] for a, b in m)
            count += 1
    off = C - np.diag(np.diag(C))
    row = off.sum(axis=1)
    sup = max(sum(row[p] for p in range(n) if owner[p] == d) for d in intervals)
    return ConnectedPairingCheck(n_pairs, lhs, (1.0 + sup) ** (3 * n_pairs), count)


# -------------------------------------------------------------- domination


def domination_constant(m: int) -> float:
    """sup_{y >= 0} y^(1/m) e^(-y) = (1/(m e))^(1/m)."""
    return (1.0 / (m * math.e)) ** (1.0 / m)


@dataclass
class DominationCheck:
    lhs: float
    rhs: float
    K_needed: float
    K: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-12)


def domination_check(u: float, v: float, n: int, m: int, lam: float, kappa: float, beta: float,
                     k: int, M: float = 2.0, holder_tol: float = 1e-12) -> DominationCheck:
    """|u|^n exp(-lam^kappa M^(m beta k) v) against K^n n^(n/m) lam^(-kappa n/m) M^(-n beta k).

    Requires |u| <= v^(1/m), which holds when u is an interval average and v
    the average of the m-th power of the same (even m) field.
    """
    if v < 0 or abs(u) > v ** (1.0 / m) * (1.0 + holder_tol) + holder_tol:
        raise ValueError("Hoelder precondition |u| <= v^(1/m) violated")
    K = domination_constant(m)
    a = lam ** kappa * float(M) ** (m * beta * k)
    log_lhs = -math.inf if u == 0 else n * math.log(abs(u)) - a * v
    scale = n ** (n / m) * lam ** (-kappa * n / m) * float(M) ** (-n * beta * k)
    lhs = math.exp(log_lhs) if log_lhs > -math.inf else 0.0
    rhs = K ** n * scale
    K_needed = (lhs / scale) ** (1.0 / n) if lhs > 0 else 0.0
    return DominationCheck(lhs, rhs, K_needed, K)


def holder_pair(values: np.ndarray, weights: np.ndarray, m: int) -> tuple[float, float]:
    """(average, average of m-th power) of sampled field values with a positive rule."""
    if m % 2:
        raise ValueError("m must be even")
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    return float(np.dot(w, values)), float(np.dot(w, np.asarray(values) ** m))
