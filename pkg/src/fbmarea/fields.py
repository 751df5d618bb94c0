"""Gaussian fields with spectral density |xi|^(-1-2 alpha) and their scale pieces.

The field ``phi`` is a real stationary process whose increments are those of a
fractional Brownian motion up to the factor (2 pi c_alpha)^(1/2).  Samples
are finite sums of sinusoids over positive Gauss-Legendre frequency nodes;
the negative half of the spectrum is implied by Hermitian symmetry.  Each
scale band j carries independent white noise weighted by chi(j), so that
the band covariances add up to the cutoff covariance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import rng
from .partition import chi, chi_low, band_support
from .quadrature import composite_gauss_legendre, quad

def _one_minus_cos(x):
    return 2.0 * np.sin(0.5 * np.asarray(x)) ** 2


@lru_cache(maxsize=None)
def c_alpha(alpha: float) -> float:
    """Normalisation making E(B_t - B_s)^2 = |t - s|^(2 alpha).

    c_alpha = (1/2pi) int_R 2(1 - cos u)|u|^(-1-2alpha) du, split as a
    smooth part on [0, 1], an exact power tail and a Fourier tail on [1, inf).
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    p = 2.0 * alpha
    head = quad(lambda u: _one_minus_cos(u) * u ** (-1.0 - p), 0.0, 1.0)
    cos_tail = quad(lambda u: u ** (-1.0 - p), 1.0, np.inf, weight="cos", wvar=1.0)
    half_line = head + 1.0 / p - cos_tail
    return 4.0 * half_line / (2.0 * math.pi)


def spectral_density(xi, alpha: float):
    return np.abs(np.asarray(xi, dtype=float)) ** (-1.0 - 2.0 * alpha)


# --------------------------------------------------------------------- grid


@dataclass
class Band:
    j: int
    xi: np.ndarray
    w: np.ndarray
    chi: np.ndarray

    @property
    def size(self) -> int:
        return self.xi.size


@dataclass
class SpectralGrid:
    """Positive frequency nodes, band by band, for scales 0..rho.

    ``window`` is the longest time lag the grid must resolve; when given, the
    panels are narrowed so that every panel spans at most 1.5 periods of
    exp(i xi window).
    """

    M: int = 2
    rho: int = 12
    nodes_per_band: int = 256
    xi_min: float = 1e-4
    window: float | None = None
    panel_order: int = 16
    bands: list[Band] = field(init=False, repr=False)

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        if not 0 < self.xi_min < 1:
            raise ValueError("xi_min must lie in (0, 1)")
        self.bands = [self._band(j) for j in range(self.rho + 1)]

    def _edges(self, a: float, b: float, min_nodes: int) -> tuple[np.ndarray, int]:
        n_panels = 1
        if self.window:
            n_panels = max(1, math.ceil((b - a) * self.window / (3.0 * math.pi)))
        order = max(self.panel_order, math.ceil(min_nodes / n_panels))
        if not self.window:
            order = min_nodes
        return np.linspace(a, b, n_panels + 1), order

    def _band(self, j: int) -> Band:
        M = self.M
        if j == 0:
            n_ir = max(1, math.ceil(math.log(1.0 / self.xi_min, M)))
            geo = np.geomspace(self.xi_min, 1.0, n_ir + 1)
            per = max(8, math.ceil(self.nodes_per_band / (n_ir + 1)))
            xs, ws = composite_gauss_legendre(geo, per)
            edges, order = self._edges(1.0, float(M), per)
            x2, w2 = composite_gauss_legendre(edges, order)
            xi = np.concatenate([xs, x2])
            w = np.concatenate([ws, w2])
        else:
            a, b = band_support(j, M)
            edges, order = self._edges(a, b, self.nodes_per_band)
            xi, w = composite_gauss_legendre(edges, order)
        c = chi(j, xi, M)
        keep = c > 0
        return Band(j, xi[keep], w[keep], c[keep])

    @property
    def size(self) -> int:
        return sum(b.size for b in self.bands)

    def cutoff(self) -> float:
        return float(self.M) ** self.rho


def grid_increment_variance(grid: SpectralGrid, alpha: float, lag, bands=None):
    """Exact variance of B_t - B_s of the sampled (discretised) field."""
    lag = np.atleast_1d(np.asarray(lag, dtype=float))
    total = np.zeros_like(lag)
    for b in grid.bands:
        if bands is not None and b.j not in bands:
            continue
        dens = b.w * b.chi * spectral_density(b.xi, alpha)
        total += 2.0 * (_one_minus_cos(np.outer(lag, b.xi)) * 2.0) @ dens
    return total / (2.0 * math.pi * c_alpha(alpha))


def cutoff_increment_variance(lag: float, alpha: float, rho: int, M: int = 2, xi_min: float = 0.0) -> float:
    """Var(B_t - B_s) of the cutoff field by adaptive quadrature, for |t - s| = lag."""
    top = float(M) ** (rho + 1)
    f = lambda x: 2.0 * _one_minus_cos(lag * x) * chi_low(rho, x, M) * x ** (-1.0 - 2.0 * alpha)
    pts = _panel_points(xi_min, top, lag)
    val = sum(quad(f, lo, hi) for lo, hi in zip(pts[:-1], pts[1:]))
    return 2.0 * val / (2.0 * math.pi * c_alpha(alpha))


def cutoff_loss_fraction(lag: float, alpha: float, rho: int, M: int = 2, xi_min: float = 0.0) -> float:
    """Fraction of |lag|^(2 alpha) carried by frequencies removed by the cutoff.

    Computed from the removed spectrum only (ultraviolet tail beyond M^rho and
    the infrared piece below xi_min), independently of the retained part.
    """
    p = 2.0 * alpha
    lo, top = float(M) ** rho, float(M) ** (rho + 1)
    g = lambda x: 2.0 * _one_minus_cos(lag * x) * (1.0 - chi_low(rho, x, M)) * x ** (-1.0 - p)
    pts = _panel_points(lo, top, lag)
    uv = sum(quad(g, a, b) for a, b in zip(pts[:-1], pts[1:]))
    # beyond the transition band the factor is exactly 1
    uv += 2.0 * top ** (-p) / p
    uv -= 2.0 * quad(lambda x: x ** (-1.0 - p), top, np.inf, weight="cos", wvar=lag)
    ir = 0.0
    if xi_min > 0:
        h = lambda x: 2.0 * _one_minus_cos(lag * x) * x ** (-1.0 - p)
        ir = quad(h, 0.0, xi_min)
    removed = 2.0 * (uv + ir) / (2.0 * math.pi * c_alpha(alpha))
    return removed / abs(lag) ** p


def _panel_points(a: float, b: float, lag: float) -> np.ndarray:
    n = 1 + int(min(4000, (b - a) * abs(lag) / (4 * math.pi)))
    if a <= 0:
        # geometric refinement towards the origin
        head = np.geomspace(1e-12, min(1.0, b), 24)
        rest = np.linspace(min(1.0, b), b, n + 1)[1:]
        return np.concatenate([[0.0], head, rest])
    return np.linspace(a, b, n + 1)


# ------------------------------------------------------------------- samples


@dataclass
class FieldSample:
    """A batch of replicas of one field, stored as per-band complex amplitudes.

    The scale-j component is 2 Re sum_n coef[j][r, n] exp(i xi_n t).
    """

    grid: SpectralGrid
    alpha: float
    coef: list[np.ndarray]

    @property
    def replicas(self) -> int:
        return self.coef[0].shape[0]

    def _eval(self, js, t, deriv: int = 0):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((self.replicas, t.size))
        for j in js:
            b = self.grid.bands[j]
            c = self.coef[j]
            if deriv:
                c = c * (1j * b.xi) ** deriv
            out += 2.0 * np.real(c @ np.exp(1j * np.outer(b.xi, t)))
        return out

    def component(self, j: int, t, deriv: int = 0):
        return self._eval([j], t, deriv)

    def low(self, k: int, t, deriv: int = 0):
        return self._eval(range(0, k + 1), t, deriv)

    def high(self, k: int, t, deriv: int = 0):
        return self._eval(range(k, self.grid.rho + 1), t, deriv)

    def value(self, t, deriv: int = 0):
        return self._eval(range(self.grid.rho + 1), t, deriv)

    def fbm(self, t, origin: float = 0.0):
        """B_t - B_origin for every replica."""
        norm = math.sqrt(2.0 * math.pi * c_alpha(self.alpha))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return (self.value(t) - self.value([origin])) / norm

    def select(self, js) -> "FieldSample":
        js = set(js)
        coef = [c if j in js else np.zeros_like(c) for j, c in enumerate(self.coef)]
        return FieldSample(self.grid, self.alpha, coef)


@dataclass(frozen=True)
class ScaleComponent:
    """A field restricted to a set of scale bands, evaluable on time grids."""

    sample: FieldSample
    scales: tuple

    def __call__(self, t, deriv: int = 0):
        return self.sample._eval(self.scales, t, deriv)

    def spectral_nodes(self) -> np.ndarray:
        """Positive frequencies carrying nonzero weight."""
        xs = [self.sample.grid.bands[j].xi[self.sample.grid.bands[j].chi > 0] for j in self.scales]
        return np.concatenate(xs) if xs else np.zeros(0)


def project_scale(sample: FieldSample, kind: str, k: int) -> ScaleComponent:
    """Scale projection: kind "single" keeps band k, "low" bands 0..k, "high" bands k..rho."""
    rho = sample.grid.rho
    if not 0 <= k <= rho:
        raise ValueError(f"scale {k} outside 0..{rho}")
    if kind == "single":
        js = (k,)
    elif kind == "low":
        js = tuple(range(0, k + 1))
    elif kind == "high":
        js = tuple(range(k, rho + 1))
    else:
        raise ValueError(f"unknown selector {kind!r}")
    return ScaleComponent(sample, js)


def band_amplitude(band: Band, alpha: float) -> np.ndarray:
    """Deterministic factor sqrt(chi) |xi|^(1/2 - alpha) / (i xi) per node."""
    return np.sqrt(band.chi) * band.xi ** (0.5 - alpha) / (1j * band.xi)


def white_noise(grid: SpectralGrid, seed: int, field_index: int, j: int, replicas) -> np.ndarray:
    """Complex noise W with E|W|^2 = weight, one row per replica.

    Node n of replica r sits at positions 2(r N + n), 2(r N + n) + 1 of the
    (seed, field, band) stream, so any coefficient is reproducible alone.
    """
    band = grid.bands[j]
    N = band.size
    replicas = np.asarray(list(replicas), dtype=np.int64)
    stream = rng.stream_id(field_index, j)
    # consecutive replicas come from one contiguous block
    r0 = int(replicas[0])
    if np.all(np.diff(replicas) == 1):
        z = rng.normals(seed, stream, 2 * r0 * N, 2 * N * replicas.size).reshape(replicas.size, N, 2)
    else:
        z = np.stack([rng.normals(seed, stream, 2 * int(r) * N, 2 * N).reshape(N, 2) for r in replicas])
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(band.w / 2.0)


def sample_field(grid: SpectralGrid, alpha: float, seed: int, field_index: int = 0, replicas=(0,)) -> FieldSample:
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    coef = []
    for b in grid.bands:
        W = white_noise(grid, seed, field_index, b.j, replicas)
        coef.append(W * band_amplitude(b, alpha))
    return FieldSample(grid, alpha, coef)


# ---------------------------------------------------------------- covariances


def _oscillatory(f, a: float, b: float, r: float, kind: str) -> float:
    if r == 0.0:
        if kind == "sin":
            return 0.0
        return quad(f, a, b)
    n = 1 + int(min(2000, (b - a) * abs(r) / (20 * math.pi)))
    edges = np.linspace(a, b, n + 1)
    return sum(quad(f, lo, hi, weight=kind, wvar=r, epsabs=0.0, epsrel=1e-12, limit=400)
               for lo, hi in zip(edges[:-1], edges[1:]))


def _derivative_phase(tau: int, tau2: int) -> tuple[float, str]:
    n = tau + tau2
    ph = (1j) ** tau * (-1j) ** tau2 * (1j if n % 2 else 1.0)
    return float(np.real(ph)), ("sin" if n % 2 else "cos")


def scale_covariance(density, j: int, r: float, M: int = 2, tau: int = 0, tau2: int = 0,
                     xi_min: float = 1e-4) -> float:
    """<d^tau psi^j(x) d^tau2 psi^j(y)> at r = x - y for an even spectral density."""
    phase, kind = _derivative_phase(tau, tau2)
    a, b = band_support(j, M)
    if j == 0:
        a = xi_min
    n = tau + tau2
    f = lambda x: x ** n * chi(j, x, M) * density(x)
    return phase * 2.0 * _oscillatory(f, a, b, r, kind)


def cov_phi_scale(j: int, r: float, alpha: float, M: int = 2, tau: int = 0, tau2: int = 0,
                  xi_min: float = 1e-4) -> float:
    """Scale-j covariance of phi; the j = 0 band is cut at xi_min in the infrared."""
    return scale_covariance(lambda x: x ** (-1.0 - 2.0 * alpha), j, r, M, tau, tau2, xi_min)


def cov_sigma_scale(j: int, r: float, alpha: float, M: int = 2, b=0.0, tau: int = 0, tau2: int = 0,
                    xi_min: float = 1e-4):
    """Scale-j covariance of sigma with propagator 1/(|xi|^(1-4alpha) Id + b).

    ``b`` may be a non-negative scalar or a symmetric PSD matrix; in the
    matrix case the result is a matrix of the same shape.
    """
    e = 1.0 - 4.0 * alpha

    def scalar(mu):
        if mu < 0:
            raise ValueError("mass term must be non-negative")
        return scale_covariance(lambda x: 1.0 / (x ** e + mu), j, r, M, tau, tau2, xi_min)

    b = np.asarray(b, dtype=float)
    if b.ndim == 0:
        return scalar(float(b))
    if b.shape[0] != b.shape[1] or not np.allclose(b, b.T):
        raise ValueError("mass matrix must be symmetric")
    mu, U = np.linalg.eigh(b)
    if mu.min() < -1e-12:
        raise ValueError("mass matrix must be positive semi-definite")
    vals = np.array([scalar(max(m, 0.0)) for m in mu])
    return (U * vals) @ U.T


def multiscale_bound_constants(kind: str, alpha: float, js, M: int = 2, tau: int = 0, tau2: int = 0,
                               r_exp: float = 2.0, lags=None, b=0.0) -> np.ndarray:
    """Smallest K per scale with |<d^tau psi^j d^tau2 psi^j>| <= K M^((tau+tau2-2beta)j)/(1+M^j|r|)^r_exp.

    Lags are taken on a grid fixed in units of M^-j.
    """
    if lags is None:
        lags = np.concatenate([[0.0], np.geomspace(1e-2, 30.0, 40)])
    beta = alpha if kind == "phi" else -2.0 * alpha
    out = []
    for j in js:
        best = 0.0
        for u in lags:
            r = u * float(M) ** (-j)
            if kind == "phi":
                c = cov_phi_scale(j, r, alpha, M, tau, tau2)
            else:
                c = cov_sigma_scale(j, r, alpha, M, b, tau, tau2)
            best = max(best, abs(c) * (1.0 + u) ** r_exp / float(M) ** ((tau + tau2 - 2.0 * beta) * j))
        out.append(best)
    return np.array(out)


def secondary_covariance(j: int, k: int, k2: int, x: float, y: float, alpha: float, M: int = 2) -> float:
    """<delta^k phi^j(x) delta^k2 phi^j(y)> where delta^k f = f - (average over the scale-k box)."""
    from .partition import interval_of

    bx, by = interval_of(x, k, M), interval_of(y, k2, M)

    def hat(xi, p, box):
        h = box.length
        return np.exp(1j * xi * p) - np.exp(1j * xi * box.center) * np.sinc(xi * h / (2 * math.pi))

    a, b = band_support(j, M)
    f = lambda xi: np.real(hat(xi, x, bx) * np.conj(hat(xi, y, by))) * chi(j, xi, M) * xi ** (-1.0 - 2.0 * alpha)
    n = 1 + int(min(400, (b - a) * (1 + abs(x - y)) / 10.0))
    edges = np.linspace(a, b, n + 1)
    return 2.0 * sum(quad(f, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))
