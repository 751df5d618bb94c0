"""Levy area of two independent fractional Brownian motions.

With phi_1, phi_2 the stationary fields of two independent copies,

    2 pi c_alpha A(s, t) = int_s^t dphi_1(u) (phi_2(u) - phi_2(s)).

Every product of frequency pairs is split by a weight w(xi_1, xi_2) into a
"+" part (phi_2 at the higher frequency) and a "-" part, the tie getting 1/2.
The "+" part is kept as a skeleton integral of d phi_1 phi_2, the "-" part is
integrated by parts into a skeleton integral of d phi_2 phi_1; the two leave
the boundary products

    bnd_plus  = -[(phi_1(t) - phi_1(s)) phi_2(s)]_+
    bnd_minus = -[phi_1(t) (phi_2(t) - phi_2(s))]_-

and 2 pi c_alpha A = dA_plus - dA_minus + bnd_plus - bnd_minus holds exactly.

Two weights are available: ``"sector"`` compares |xi_1| and |xi_2| directly,
``"projection"`` compares the band (scale) labels of the independent band
components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import SpectralGrid, band_amplitude, c_alpha, white_noise
from .quadrature import adaptive_simpson, quad


def _bilinear(x, K, y):
    """Row-wise x_r^T K y_r."""
    return np.sum((x @ K) * y, axis=1)


def sum_kernel(xi, s: float, t: float):
    """int_s^t exp(i xi u) du, stable at xi = 0."""
    h = t - s
    return np.exp(0.5j * xi * (s + t)) * h * np.sinc(xi * h / (2.0 * math.pi))


@dataclass
class SignedSpectrum:
    """All bands of a grid flattened onto signed frequencies +xi, -xi."""

    xi: np.ndarray
    band: np.ndarray
    amp: np.ndarray
    w: np.ndarray

    @classmethod
    def from_grid(cls, grid: SpectralGrid, alpha: float) -> "SignedSpectrum":
        xs, bs, amps, ws = [], [], [], []
        for b in grid.bands:
            a = band_amplitude(b, alpha)
            xs += [b.xi, -b.xi]
            bs += [np.full(b.size, b.j), np.full(b.size, b.j)]
            amps += [a, np.conj(a)]
            ws += [b.w, b.w]
        return cls(np.concatenate(xs), np.concatenate(bs), np.concatenate(amps), np.concatenate(ws))

    @property
    def size(self) -> int:
        return self.xi.size


def split_weights(spec: SignedSpectrum, form: str):
    """Weight matrices (plus, minus) indexed by (node of phi_1, node of phi_2)."""
    if form == "projection":
        k1, k2 = spec.band[:, None], spec.band[None, :]
    elif form == "sector":
        k1, k2 = np.abs(spec.xi)[:, None], np.abs(spec.xi)[None, :]
    else:
        raise ValueError("form must be 'projection' or 'sector'")
    plus = np.where(k1 < k2, 1.0, 0.0) + np.where(k1 == k2, 0.5, 0.0)
    return plus, 1.0 - plus


def signed_noise(grid: SpectralGrid, seed: int, field_index: int, replicas) -> np.ndarray:
    rows = []
    for b in grid.bands:
        W = white_noise(grid, seed, field_index, b.j, replicas)
        rows.append((W, np.conj(W)))
    return np.concatenate([x for pair in rows for x in pair], axis=1)


class AreaSampler:
    """Pathwise Levy-area pieces for replicas of (phi_1, phi_2) on one grid."""

    def __init__(self, grid: SpectralGrid, alpha: float, form: str = "projection"):
        if not 0.0 < alpha < 0.5:
            raise ValueError("alpha must lie in (0, 1/2)")
        self.grid = grid
        self.alpha = alpha
        self.form = form
        self.spec = SignedSpectrum.from_grid(grid, alpha)
        self.plus, self.minus = split_weights(self.spec, form)
        self.norm = 2.0 * math.pi * c_alpha(alpha)

    def coefficients(self, seed: int, replicas=(0,)):
        c1 = signed_noise(self.grid, seed, 0, replicas) * self.spec.amp
        c2 = signed_noise(self.grid, seed, 1, replicas) * self.spec.amp
        return c1, c2

    # path values ------------------------------------------------------
    def phi(self, c, t):
        return np.real(c @ np.exp(1j * np.outer(self.spec.xi, np.atleast_1d(t))))

    def dphi(self, c, t):
        return np.real((c * 1j * self.spec.xi) @ np.exp(1j * np.outer(self.spec.xi, np.atleast_1d(t))))

    def fbm_increment(self, c, s, t):
        return (self.phi(c, t) - self.phi(c, s))[:, 0] / math.sqrt(self.norm)

    # area pieces ------------------------------------------------------
    def pieces(self, c1, c2, s: float, t: float) -> dict:
        """All terms of the decomposition, in the 2 pi c_alpha normalisation."""
        if not s < t:
            raise ValueError("need s < t")
        xi = self.spec.xi
        E = sum_kernel(xi[:, None] + xi[None, :], s, t)
        u1 = c1 * 1j * xi
        u2 = c2 * 1j * xi
        dA_plus = _bilinear(u1, self.plus * E, c2)
        dA_minus = _bilinear(c1, self.minus * E, u2)
        es, et = np.exp(1j * xi * s), np.exp(1j * xi * t)
        d1 = c1 * (et - es)
        d2 = c2 * (et - es)
        bnd_plus = -_bilinear(d1, self.plus, c2 * es)
        bnd_minus = -_bilinear(c1 * et, self.minus, d2)
        out = dict(dA_plus=dA_plus, dA_minus=dA_minus, bnd_plus=bnd_plus, bnd_minus=bnd_minus)
        out = {k: np.real(v) for k, v in out.items()}
        out["boundary"] = out["bnd_plus"] - out["bnd_minus"]
        out["area"] = out["dA_plus"] - out["dA_minus"] + out["boundary"]
        return out

    def area(self, c1, c2, s: float, t: float):
        """A(s, t) in the fBm normalisation."""
        return self.pieces(c1, c2, s, t)["area"] / self.norm

    def direct_area(self, c1, c2, s: float, t: float):
        """A(s, t) from the double spectral sum without any splitting."""
        xi = self.spec.xi
        E = sum_kernel(xi[:, None] + xi[None, :], s, t)
        Es = np.exp(1j * xi * s)[None, :] * sum_kernel(xi, s, t)[:, None]
        u1 = c1 * 1j * xi
        return np.real(_bilinear(u1, E - Es, c2)) / self.norm

    def quadrature_area(self, c1, c2, s: float, t: float, tol: float = 1e-9) -> float:
        """Oracle: adaptive Simpson on the smooth path, single replica."""
        a, b = c1[0], c2[0]
        xi = self.spec.xi
        p2s = float(np.real(b @ np.exp(1j * xi * s)))

        def f(u):
            ph = np.exp(1j * np.outer(xi, u))
            return np.real((a * 1j * xi) @ ph) * (np.real(b @ ph) - p2s)

        return adaptive_simpson(f, s, t, tol) / self.norm


def chen_residual(sampler: AreaSampler, c1, c2, s: float, u: float, t: float):
    """A(s,t) - A(s,u) - A(u,t) - (B2(u)-B2(s))(B1(t)-B1(u)), and a magnitude scale."""
    ast = sampler.area(c1, c2, s, t)
    asu = sampler.area(c1, c2, s, u)
    aut = sampler.area(c1, c2, u, t)
    cross = sampler.fbm_increment(c2, s, u) * sampler.fbm_increment(c1, u, t)
    res = ast - asu - aut - cross
    scale = np.abs(ast) + np.abs(asu) + np.abs(aut) + np.abs(cross)
    return res, scale


def grid_second_moment(sampler: AreaSampler, K: np.ndarray, L: np.ndarray | None = None) -> float:
    """E[X Y] for X = sum K_ab W1_a W2_b, Y likewise with L (exact on the grid)."""
    L = K if L is None else L
    ww = sampler.spec.w[:, None] * sampler.spec.w[None, :]
    return float(np.real(np.sum(K * np.conj(L) * ww)))


def piece_kernels(sampler: AreaSampler, s: float, t: float) -> dict:
    """Coefficient matrices of each piece as a bilinear form in (W1, W2)."""
    xi, amp = sampler.spec.xi, sampler.spec.amp
    E = sum_kernel(xi[:, None] + xi[None, :], s, t)
    A = amp[:, None] * amp[None, :]
    es, et = np.exp(1j * xi * s), np.exp(1j * xi * t)
    return dict(
        dA_plus=sampler.plus * E * A * (1j * xi)[:, None],
        dA_minus=sampler.minus * E * A * (1j * xi)[None, :],
        bnd_plus=-sampler.plus * A * (et - es)[:, None] * es[None, :],
        bnd_minus=-sampler.minus * A * et[:, None] * (et - es)[None, :],
    )


# -------------------------------------------------------- cutoff sweeps


def sector_inner(X: float, alpha: float) -> float:
    """G(X) = int_{1/2}^{X} |u - 1|^(1-2alpha) u^(-1-2alpha) du (zero for X <= 1/2).

    The sector integral behind both the area variance and the bubble:
    int_{|xi - eta| < |eta| <= L} |xi - eta|^(1-2a) |eta|^(-1-2a) d eta = |xi|^(1-4a) G(L/|xi|).
    """
    if X <= 0.5:
        return 0.0
    f = lambda u: abs(u - 1.0) ** (1.0 - 2.0 * alpha) * u ** (-1.0 - 2.0 * alpha)
    if X <= 1.0:
        return quad(f, 0.5, X, epsrel=1e-11)
    tail = 0.0
    edges = [1.0] + [e for e in (2.0, 16.0, 256.0, 65536.0) if e < X] + [X]
    for lo, hi in zip(edges[:-1], edges[1:]):
        tail += quad(f, lo, hi, epsrel=1e-11)
    return quad(f, 0.5, 1.0, epsrel=1e-11) + tail


def plus_increment_variance(cutoff: float, alpha: float, lag: float = 1.0) -> float:
    """Var of the "+" skeleton increment, sharp sector cutoff |xi_2| <= cutoff.

    2 int_0^{2L} 2(1 - cos(lag xi)) xi^(-1-4alpha) G(L / xi) d xi
    """
    L = cutoff
    f = lambda x: 4.0 * math.sin(0.5 * lag * x) ** 2 * x ** (-1.0 - 4.0 * alpha) * sector_inner(L / x, alpha)
    pts = np.concatenate([[0.0], np.geomspace(1e-6 / lag, 2.0 * L, 60)])
    pts = pts[pts <= 2.0 * L]
    return 2.0 * sum(quad(f, a, b, epsrel=1e-9) for a, b in zip(pts[:-1], pts[1:]))


def boundary_variance(cutoff: float, alpha: float, lag: float = 1.0) -> float:
    """Var(bnd_plus - bnd_minus) for the sector split with sharp cutoff."""
    L, p = cutoff, 2.0 * alpha
    f = lambda x: 4.0 * math.sin(0.5 * lag * x) ** 2 * x ** (-1.0 - p) * (x ** (-p) - L ** (-p))
    pts = np.concatenate([[0.0], np.linspace(0.0, L, 2 + int(L * lag / 50.0))[1:]])
    pts = np.unique(pts)
    return (4.0 / alpha) * sum(quad(f, a, b, epsrel=1e-10) for a, b in zip(pts[:-1], pts[1:]))


def boundary_variance_limit(alpha: float, lag: float = 1.0) -> float:
    """Cutoff-free limit (4/alpha) int_0^inf 2(1 - cos(lag xi)) xi^(-1-4alpha) d xi."""
    q = 4.0 * alpha
    head = quad(lambda x: 4.0 * math.sin(0.5 * x) ** 2 * x ** (-1.0 - q), 0.0, 1.0)
    tail = 2.0 / q - 2.0 * quad(lambda x: x ** (-1.0 - q), 1.0, np.inf, weight="cos", wvar=1.0)
    return (4.0 / alpha) * (head + tail) * lag ** q


@dataclass
class SweepResult:
    cutoffs: np.ndarray
    variances: np.ndarray
    slope: float
    difference_slope: float
    log_growth: bool


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def variance_vs_cutoff(alpha: float, cutoffs, lag: float = 1.0, piece: str = "plus") -> SweepResult:
    """Deterministic variance per cutoff and its least-squares log-log slope.

    ``difference_slope`` fits the successive differences instead, which
    removes the cutoff-independent part of the variance.
    """
    cutoffs = np.asarray(cutoffs, dtype=float)
    fn = plus_increment_variance if piece == "plus" else boundary_variance
    v = np.array([fn(L, alpha, lag) for L in cutoffs])
    slope = loglog_slope(cutoffs, v)
    d = np.diff(v)
    dslope = loglog_slope(cutoffs[1:], np.abs(d)) if np.all(d != 0) else float("nan")
    flat = abs(1.0 - 4.0 * alpha) < 1e-12 and piece == "plus"
    log_growth = bool(flat and np.ptp(d) < 0.2 * np.mean(np.abs(d)))
    return SweepResult(cutoffs, v, slope, dslope, log_growth)


def aitken_limit(values) -> float:
    """Richardson-type extrapolation from the last three terms of a sequence."""
    a, b, c = values[-3:]
    den = (c - b) - (b - a)
    if den == 0:
        return float(c)
    return float(c - (c - b) ** 2 / den)


def _graded(a: float, b: float, n_panels: int = 24, order: int = 24):
    """Gauss-Legendre nodes on [a, b], geometrically graded towards a."""
    from .quadrature import composite_gauss_legendre

    edges = a + (b - a) * np.concatenate([[0.0], np.geomspace(1e-9, 1.0, n_panels)])
    return composite_gauss_legendre(edges, order)


def sector_smooth_variance(alpha: float, rho: int, M: int = 2, lag: float = 1.0, piece: str = "plus") -> float:
    """Continuum variance of a sector-split piece under the smooth chi cutoff of a grid.

    Tensor Gauss-Legendre on graded panels; used as an independent check of
    Monte Carlo on the grid.
    """
    from .partition import chi_low

    top = float(M) ** (rho + 1)
    p = 2.0 * alpha
    x, wx = _graded(0.0, 2.0 * top, 40, 24)
    cx = chi_low(rho, x, M)
    osc = 4.0 * np.sin(0.5 * lag * x) ** 2
    s, ws = _graded(0.0, 1.0, 30, 24)
    if piece == "boundary":
        # 2 int_{x < |e|} |e|^(-1-2a) chi(e) de, mapped onto [x, top]
        lo = x[:, None]
        length = np.maximum(top - lo, 0.0)
        ee = lo + length * s[None, :]
        inner = 2.0 * np.sum(ws[None, :] * length * ee ** (-1.0 - p) * chi_low(rho, ee, M), axis=1)
        return 4.0 * float(np.dot(wx, osc * x ** (-1.0 - p) * cx * inner))
    # eta in [x/2, x] and [x, x + top], graded towards the kink at eta = x
    total = np.zeros_like(x)
    for sign in (-1.0, 1.0):
        length = 0.5 * x[:, None] if sign < 0 else np.full((x.size, 1), top)
        d = length * s[None, :]
        eta = x[:, None] + sign * d
        g = d ** (1.0 - p) * eta ** (-1.0 - p) * chi_low(rho, d, M) * chi_low(rho, eta, M)
        total += np.sum(ws[None, :] * length * g, axis=1)
    return 2.0 * float(np.dot(wx, osc / x ** 2 * total))
