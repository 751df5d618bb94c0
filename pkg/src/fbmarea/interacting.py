"""Bubble, resummation, mass counterterm and a reweighted Monte Carlo.

The interaction couples the "+"/"-" skeleton densities dA+/dA- through the
kernel c'_alpha |t1 - t2|^(-4 alpha), whose Fourier transform is
|xi|^(4 alpha - 1).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fields import SpectralGrid, c_alpha, grid_increment_variance, sample_field
from .levy_area import AreaSampler, aitken_limit, boundary_variance, piece_kernels, grid_second_moment
from .partition import chi, chi_range
from .quadrature import quad

MODEL_RANGE = (0.125, 0.25)


def check_model_alpha(alpha: float) -> None:
    lo, hi = MODEL_RANGE
    if not lo < alpha < hi:
        raise ValueError(f"alpha must lie in ({lo}, {hi})")


@dataclass(frozen=True)
class InteractionParams:
    lam: float
    alpha: float
    rho: int
    M: int = 2

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("coupling must be non-negative")
        check_model_alpha(self.alpha)

    @property
    def c_prime(self) -> float:
        return c_prime_alpha(self.alpha)


# ------------------------------------------------------------ kernel constant


def kernel_fourier(xi: float, alpha: float) -> float:
    """int e^{-i xi t} |t|^(-4 alpha) dt by quadrature (singular head + Fourier tail)."""
    q = 4.0 * alpha
    xi = abs(xi)
    head = quad(lambda t: math.cos(xi * t) * t ** (-q), 0.0, 1.0)
    tail = quad(lambda t: t ** (-q), 1.0, np.inf, weight="cos", wvar=xi)
    return 2.0 * (head + tail)


def c_prime_alpha(alpha: float) -> float:
    """Normalisation with c' int e^{-i xi t}|t|^(-4a) dt = |xi|^(4a - 1)."""
    check_model_alpha(alpha)
    return 1.0 / kernel_fourier(1.0, alpha)


# -------------------------------------------------------------------- bubble


def bubble(xi: float, cutoff: float, lam: float, alpha: float) -> float:
    """lam^2 |xi|^(4a-1) int_{|x1| < |xi - x1|, |xi - x1| <= cutoff} |x1|^(1-2a)|xi - x1|^(-1-2a) dx1."""
    xi = abs(xi)
    if not 0 < xi < cutoff:
        raise ValueError("need 0 < |xi| < cutoff")
    p = 2.0 * alpha
    # eta = xi - x1 runs over (xi/2, cutoff]; kink at eta = xi
    f = lambda e: abs(xi - e) ** (1.0 - p) * e ** (-1.0 - p)
    edges = [0.5 * xi, xi]
    e = xi
    while e * 16.0 < cutoff:
        e *= 16.0
        edges.append(e)
    edges.append(cutoff)
    val = sum(quad(f, a, b, epsrel=1e-11) for a, b in zip(edges[:-1], edges[1:]))
    return lam ** 2 * xi ** (4.0 * alpha - 1.0) * val


@dataclass
class CollapseResult:
    ratios: np.ndarray
    K: float
    spread: float


def bubble_collapse(alpha: float, pairs, lam: float = 1.0) -> CollapseResult:
    """bubble / (lam^2 (cutoff/|xi|)^(1-4a)) over (xi, cutoff) pairs."""
    e = 1.0 - 4.0 * alpha
    r = np.array([bubble(x, L, lam, alpha) / (lam ** 2 * (L / x) ** e) for x, L in pairs])
    return CollapseResult(r, float(np.mean(r)), float(np.ptp(r) / np.mean(r)))


def bubble_fit_constant(alpha: float, ratio: float = 2.0 ** 20) -> float:
    """K' as the normalised bubble at a large cutoff ratio."""
    return bubble(1.0, ratio, 1.0, alpha) / ratio ** (1.0 - 4.0 * alpha)


def resummed_propagator(xi: float, cutoff: float, lam: float, alpha: float, K_prime: float) -> float:
    if K_prime <= 0:
        raise ValueError("K' must be positive")
    e = 1.0 - 4.0 * alpha
    x = abs(xi)
    g = K_prime * lam ** 2 * (cutoff / x) ** e
    return x ** e / lam ** 2 * (1.0 - 1.0 / (1.0 + g))


def renormalized_sigma_propagator(xi: float, cutoff: float, lam: float, alpha: float, K_prime: float) -> float:
    e = 1.0 - 4.0 * alpha
    return 1.0 / (abs(xi) ** e + K_prime * lam ** 2 * cutoff ** e)


# ------------------------------------------------------------ mass counterterm


def mass_constant_K(alpha: float, M: int = 2) -> float:
    """int |xi|^(-4a) chi1(xi) (chi1 + chi2)(xi) d xi over the real line."""
    check_model_alpha(alpha)
    f = lambda x: x ** (-4.0 * alpha) * chi(1, x, M) * (chi(1, x, M) + chi(2, x, M))
    edges = np.linspace(1.0, float(M) ** 2, 9)
    return 2.0 * sum(quad(f, a, b, epsrel=1e-13) for a, b in zip(edges[:-1], edges[1:]))


def mass_constant_K_scale(j: int, alpha: float, M: int = 2, rho: int | None = None) -> float:
    """The same constant the long way: M^(-(j-1)(1-4a)) int |xi|^(-4a) chi_j chi_{j..rho} d xi.

    chi_j is supported on M^(j-1) <= |xi| <= M^(j+1), so rescaling by M^(j-1)
    maps it onto chi_1 and the prefactor undoes the Jacobian and the power.
    """
    check_model_alpha(alpha)
    rho = j + 4 if rho is None else rho
    f = lambda x: x ** (-4.0 * alpha) * chi(j, x, M) * chi_range(j, rho, x, M)
    edges = np.linspace(float(M) ** (j - 1), float(M) ** (j + 1), 17)
    val = 2.0 * sum(quad(f, a, b, epsrel=1e-13) for a, b in zip(edges[:-1], edges[1:]))
    return float(M) ** (-(j - 1) * (1.0 - 4.0 * alpha)) * val


@dataclass
class MassCounterterm:
    b: np.ndarray
    j: int
    K: float
    lam: float
    formula: str = "K lam^2 M^(j(1-4alpha)) on the diagonal"
    relative_uncertainty: float = field(default=0.0)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.b)


def b_leading(lam: float, j: int, alpha: float, M: int = 2, K: float | None = None) -> MassCounterterm:
    """Leading-order counterterm; the O(lam) correction is kept only as an uncertainty band."""
    K = mass_constant_K(alpha, M) if K is None else K
    val = K * lam ** 2 * float(M) ** (j * (1.0 - 4.0 * alpha))
    return MassCounterterm(np.diag([val, val]), j, K, lam, relative_uncertainty=lam)


# ------------------------------------------------------- interacting variance


def K1_constant(alpha: float) -> float:
    """int_R (1 - cos u)|u|^(-1-4a) du."""
    q = 4.0 * alpha
    head = quad(lambda u: 2.0 * math.sin(0.5 * u) ** 2 * u ** (-1.0 - q), 0.0, 1.0)
    tail = 1.0 / q - quad(lambda u: u ** (-1.0 - q), 1.0, np.inf, weight="cos", wvar=1.0)
    return 2.0 * (head + tail)


def first_chaos_variance(lag: float, lam: float, alpha: float) -> float:
    """(4/lam^2) int (1 - cos(lag xi))|xi|^(-1-4a) d xi, by quadrature at this lag."""
    q = 4.0 * alpha
    head = quad(lambda x: 2.0 * math.sin(0.5 * lag * x) ** 2 * x ** (-1.0 - q), 0.0, 1.0 / lag)
    tail = lag ** q / q - quad(lambda x: x ** (-1.0 - q), 1.0 / lag, np.inf, weight="cos", wvar=lag)
    return 4.0 / lam ** 2 * 2.0 * (head + tail)


def extrapolated_boundary_variance(lag: float, alpha: float, M: int = 2, exponents=(12, 14, 16)) -> float:
    """Cutoff-free boundary variance from the last three cutoffs M^k / lag."""
    vals = [boundary_variance(float(M) ** k / lag, alpha, lag) for k in exponents]
    return aitken_limit(vals)


@dataclass
class AreaVariance:
    value: float
    K1: float
    K2: float


def interacting_area_variance(s: float, t: float, lam: float, alpha: float, M: int = 2) -> AreaVariance:
    """(2 pi c_alpha)^2 <A(s,t)^2> = (4 K1 / lam^2 + K2)|t - s|^(4 alpha).

    Both terms are computed at the actual lag, so the |t - s|^(4a) shape is
    a numerical outcome rather than an input.
    """
    if not s < t:
        raise ValueError("need s < t")
    if lam <= 0:
        raise ValueError("coupling must be positive")
    check_model_alpha(alpha)
    h = t - s
    first = first_chaos_variance(h, lam, alpha)
    bnd = extrapolated_boundary_variance(h, alpha, M)
    scale = h ** (4.0 * alpha)
    return AreaVariance(first + bnd, first * lam ** 2 / (4.0 * scale), bnd / scale)


# ------------------------------------------------------------- Monte Carlo


def cell_kernel_matrix(n: int, width: float, alpha: float) -> np.ndarray:
    """Exact integrals of |t1 - t2|^(-4a) over pairs of grid cells (PSD Gram matrix)."""
    q = 4.0 * alpha
    g = lambda u: np.abs(u) ** (2.0 - q) / ((1.0 - q) * (2.0 - q))
    d = np.arange(n, dtype=float)
    kappa = g(d + 1.0) - 2.0 * g(d) + g(d - 1.0)
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return width ** (2.0 - q) * kappa[idx]


def skeleton_densities(f1, f2, t, first_band: int = 1):
    """dA+/dA- densities on times t, summed over bands >= first_band.

    dA+ = sum_{j<k} d phi1^j phi2^k + 1/2 sum_j d phi1^j phi2^j, and dA- with
    the roles of the two fields exchanged.
    """
    js = range(first_band, f1.grid.rho + 1)
    d1 = np.stack([f1.component(j, t, 1) for j in js], axis=1)
    d2 = np.stack([f2.component(j, t, 1) for j in js], axis=1)
    p1 = np.stack([f1.component(j, t) for j in js], axis=1)
    p2 = np.stack([f2.component(j, t) for j in js], axis=1)

    def above(p):
        # sum over k > j plus half of k = j
        tail = np.cumsum(p[:, ::-1], axis=1)[:, ::-1]
        return tail - 0.5 * p

    return np.sum(d1 * above(p2), axis=1), np.sum(d2 * above(p1), axis=1)


@dataclass
class MCResult:
    estimate: float
    stderr: float
    ess: float
    n: int
    reliable: bool
    free_estimate: float
    free_stderr: float
    exact_free: float
    weight_min: float
    weight_max: float
    quad_form_min: float


OBSERVABLES = ("area2", "increment2", "increment4")


def mc_interacting_moment(rho_small: int, lam: float, alpha: float, observable: str, n_replicas: int,
                          seed: int, window: float = 1.0, s: float = 0.25, t: float = 0.75,
                          nodes_per_band: int = 96, batch: int = 200, ess_threshold: float = 50.0,
                          threads: int = 1, M: int = 2) -> MCResult:
    """Self-normalised importance sampling of the interacting measure at a coarse cutoff."""
    if rho_small > 6:
        raise ValueError("rho_small is capped at 6")
    if observable not in OBSERVABLES:
        raise ValueError(f"observable must be one of {OBSERVABLES}")
    if lam < 0:
        raise ValueError("coupling must be non-negative")
    check_model_alpha(alpha)
    grid = SpectralGrid(M=M, rho=rho_small, nodes_per_band=nodes_per_band, window=window)
    n_cells = 2 ** (rho_small + 4)
    width = window / n_cells
    tgrid = (np.arange(n_cells) + 0.5) * width
    Kmat = cell_kernel_matrix(n_cells, width, alpha)
    cp = c_prime_alpha(alpha)
    sampler = AreaSampler(grid, alpha) if observable == "area2" else None
    norm = math.sqrt(2.0 * math.pi * c_alpha(alpha))

    def run(start):
        reps = range(start, min(start + batch, n_replicas))
        f1 = sample_field(grid, alpha, seed, 0, reps)
        f2 = sample_field(grid, alpha, seed, 1, reps)
        ap, am = skeleton_densities(f1, f2, tgrid)
        qp = np.sum((ap @ Kmat) * ap, axis=1)
        qm = np.sum((am @ Kmat) * am, axis=1)
        logw = -0.5 * cp * lam ** 2 * (qp + qm)
        if observable == "area2":
            c1 = _signed(f1)
            c2 = _signed(f2)
            obs = sampler.area(c1, c2, s, t) ** 2
        else:
            inc = (f1.value([t]) - f1.value([s]))[:, 0] / norm
            obs = inc ** 2 if observable == "increment2" else inc ** 4
        return logw, obs, np.minimum(qp, qm)

    starts = list(range(0, n_replicas, batch))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(run, starts))
    else:
        parts = [run(st) for st in starts]
    logw = np.concatenate([p[0] for p in parts])
    obs = np.concatenate([p[1] for p in parts])
    qmin = float(np.min(np.concatenate([p[2] for p in parts])))
    w = np.exp(logw)
    sw = w.sum()
    est = float(np.dot(w, obs) / sw)
    stderr = float(math.sqrt(np.sum(w ** 2 * (obs - est) ** 2)) / sw)
    ess = float(sw ** 2 / np.sum(w ** 2))

    if observable == "area2":
        K = piece_kernels(sampler, s, t)
        tot = K["dA_plus"] - K["dA_minus"] + K["bnd_plus"] - K["bnd_minus"]
        exact = grid_second_moment(sampler, tot) / sampler.norm ** 2
    else:
        v = float(grid_increment_variance(grid, alpha, t - s)[0])
        exact = v if observable == "increment2" else 3.0 * v ** 2
    return MCResult(est, stderr, ess, obs.size, ess >= ess_threshold, float(obs.mean()),
                    float(obs.std(ddof=1) / math.sqrt(obs.size)), exact,
                    float(w.min()), float(w.max()), qmin)


def _signed(f) -> np.ndarray:
    """Signed-frequency coefficients (AreaSampler layout) of a FieldSample."""
    parts = []
    for c in f.coef:
        parts += [c, np.conj(c)]
    return np.concatenate(parts, axis=1)
