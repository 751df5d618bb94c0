"""Smooth partition of unity in frequency and M-adic intervals in time.

The cutoff profile ``chi0`` is C-infinity, equal to 1 on [0, 1] and 0
beyond M.  Scale multipliers ``chi(j)`` are telescoping differences of its
dilates, so that ``sum_{j<=J} chi(j) = chi0(M^-J .)`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import gauss_legendre


def _bump(u):
    out = np.zeros_like(u, dtype=float)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def chi0(xi, M: float = 2.0):
    """Cutoff profile: 1 for |xi| <= 1, 0 for |xi| >= M, smooth in between."""
    a = np.abs(np.asarray(xi, dtype=float))
    u = (a - 1.0) / (M - 1.0)
    u = np.clip(u, 0.0, 1.0)
    f_u = _bump(u)
    f_v = _bump(1.0 - u)
    out = f_v / (f_u + f_v)
    out = np.where(a <= 1.0, 1.0, out)
    out = np.where(a >= M, 0.0, out)
    return out if out.ndim else float(out)


def chi(j: int, xi, M: float = 2.0):
    """Scale-j multiplier; supported in [M^(j-1), M^(j+1)] for j >= 1."""
    if j < 0:
        raise ValueError("scale index must be non-negative")
    xi = np.asarray(xi, dtype=float)
    if j == 0:
        return chi0(xi, M)
    return chi0(xi * float(M) ** (-j), M) - chi0(xi * float(M) ** (1 - j), M)


def chi_low(k: int, xi, M: float = 2.0):
    """Low-momentum multiplier sum_{j<=k} chi(j), evaluated as chi0(M^-k xi)."""
    return chi0(np.asarray(xi, dtype=float) * float(M) ** (-k), M)


def chi_range(j_lo: int, j_hi: int, xi, M: float = 2.0):
    """sum_{j_lo <= j <= j_hi} chi(j) as a telescoped difference."""
    xi = np.asarray(xi, dtype=float)
    if j_hi < j_lo:
        return np.zeros_like(xi)
    out = chi_low(j_hi, xi, M)
    if j_lo > 0:
        out = out - chi_low(j_lo - 1, xi, M)
    return out


def partition_sum(xi, J: int, M: float = 2.0):
    """Explicit sum of the scale multipliers 0..J (no telescoping shortcut)."""
    if J < 0:
        raise ValueError("J must be non-negative")
    xi = np.asarray(xi, dtype=float)
    total = np.zeros_like(xi)
    for j in range(J + 1):
        total = total + chi(j, xi, M)
    return total


def band_support(j: int, M: float = 2.0) -> tuple[float, float]:
    if j == 0:
        return 0.0, float(M)
    return float(M) ** (j - 1), float(M) ** (j + 1)


# ---------------------------------------------------------------- intervals


@dataclass(frozen=True)
class MadicInterval:
    """Closed interval [k M^-j, (k+1) M^-j] at scale j."""

    j: int
    k: int
    M: int = 2

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("scale must be non-negative")
        if int(self.M) != self.M or self.M < 2:
            raise ValueError("M-adic nesting needs an integer M >= 2")

    @property
    def length(self) -> float:
        return float(self.M) ** (-self.j)

    @property
    def lo(self) -> float:
        return self.k * self.length

    @property
    def hi(self) -> float:
        return (self.k + 1) * self.length

    @property
    def center(self) -> float:
        return (self.k + 0.5) * self.length

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def parent(self) -> "MadicInterval":
        if self.j == 0:
            raise ValueError("scale-0 interval has no parent")
        return MadicInterval(self.j - 1, self.k // self.M, self.M)

    def children(self) -> list["MadicInterval"]:
        return [MadicInterval(self.j + 1, self.k * self.M + r, self.M) for r in range(self.M)]

    def descendants(self, h: int) -> list["MadicInterval"]:
        """Intervals at scale h >= j contained in this one."""
        if h < self.j:
            raise ValueError("descendant scale must not be coarser")
        n = self.M ** (h - self.j)
        return [MadicInterval(h, self.k * n + r, self.M) for r in range(n)]

    def is_inside(self, other: "MadicInterval") -> bool:
        if other.j > self.j:
            return False
        return self.k // self.M ** (self.j - other.j) == other.k


def interval_of(x: float, j: int, M: int = 2) -> MadicInterval:
    """Scale-j interval containing x, using the half-open convention [lo, hi)."""
    return MadicInterval(j, int(np.floor(x * float(M) ** j)), M)


def dj_distance(a: MadicInterval, b: MadicInterval, j: int) -> float:
    """Scaled distance M^(j - j') |k' - k| between two intervals of the same scale j' >= j."""
    if a.M != b.M:
        raise ValueError("intervals built on different M")
    if a.j < j or b.j < j:
        raise ValueError("interval scale below the reference scale")
    if a.j != b.j:
        raise ValueError("distance defined for intervals of equal scale")
    return float(a.M) ** (j - a.j) * abs(b.k - a.k)


def dj_points(x: float, y: float, j: int, M: float = 2.0) -> float:
    return float(M) ** j * abs(x - y)


# ---------------------------------------------------------- field transforms

AVG_NODES = 32


def average_field(f: Callable, interval: MadicInterval, nodes: int = AVG_NODES) -> float:
    """Mean of f over an interval with a fixed Gauss-Legendre rule."""
    x, w = gauss_legendre(nodes, interval.lo, interval.hi)
    return float(np.dot(w, f(x)) / interval.length)


def secondary_field(f: Callable, x: float, k: int, M: int = 2, nodes: int = AVG_NODES) -> float:
    """f(x) minus its average over the scale-k interval containing x."""
    box = interval_of(x, k, M)
    return float(f(np.array([x]))[0]) - average_field(f, box, nodes)


def secondary_kernel(x: float, v, box: MadicInterval):
    """Kernel K(x; v) with f(x) - <f>_box = int_box f'(v) K(x; v) dv; values in [-1, 1]."""
    v = np.asarray(v, dtype=float)
    return np.where(v < x, v - box.lo, v - box.hi) / box.length


def secondary_field_kernel(fprime: Callable, x: float, k: int, M: int = 2, nodes: int = AVG_NODES) -> float:
    """Same quantity as ``secondary_field`` computed from the derivative."""
    box = interval_of(x, k, M)
    total = 0.0
    for lo, hi in ((box.lo, x), (x, box.hi)):
        if hi > lo:
            v, w = gauss_legendre(nodes, lo, hi)
            total += float(np.dot(w, fprime(v) * secondary_kernel(x, v, box)))
    return total


def restrict_high_momentum(component: Callable, h: int, box: MadicInterval, x: float, j: int):
    """Split a scale-j component on a scale-h box into its scale-j pieces.

    Returns a list of (child interval, value of 1_{x in child} * component(x)).
    """
    if j < h:
        raise ValueError("restriction needs j >= h")
    if box.j != h:
        raise ValueError("box must be at scale h")
    val = float(component(np.array([x]))[0])
    out = []
    for child in box.descendants(j):
        inside = child.lo <= x < child.hi
        out.append((child, val if inside else 0.0))
    return out
