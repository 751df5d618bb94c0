"""Quadrature helpers shared by the spectral and time-domain code."""
from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate


@lru_cache(maxsize=64)
def _gl_ref(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float):
    """n-point Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _gl_ref(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss_legendre(edges, n: int):
    """Concatenate n-point rules over consecutive panels given by ``edges``."""
    edges = np.asarray(edges, dtype=float)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(n, a, b)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-9, max_level: int = 40):
    """Vectorised adaptive Simpson rule.

    ``f`` takes an array of abscissae.  Panels are bisected breadth-first until
    the Richardson estimate on each is below its share of ``tol``.
    """
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    fl = f(lo)
    fh = f(hi)
    fm = f(0.5 * (lo + hi))
    whole = (hi - lo) / 6.0 * (fl + 4 * fm + fh)
    total = 0.0
    width = b - a
    for _ in range(max_level):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        f_lm = f(lm)
        f_rm = f(rm)
        left = (mid - lo) / 6.0 * (fl + 4 * f_lm + fm)
        right = (hi - mid) / 6.0 * (fm + 4 * f_rm + fh)
        err = np.abs(left + right - whole) / 15.0
        ok = err <= tol * (hi - lo) / width
        total += np.sum((left + right + (left + right - whole) / 15.0)[ok])
        keep = ~ok
        if not keep.any():
            return total
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        fl, fm, fh = fl[keep], fm[keep], fh[keep]
        f_lm, f_rm = f_lm[keep], f_rm[keep]
        left, right = left[keep], right[keep]
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        fl, fh, fm = np.concatenate([fl, fm]), np.concatenate([fm, fh]), np.concatenate([f_lm, f_rm])
        whole = np.concatenate([left, right])
    raise RuntimeError("adaptive Simpson did not reach the requested tolerance")


def quad(f, a: float, b: float, **kw) -> float:
    """scipy quad with tight defaults; QUADPACK roundoff notices are silenced.

    Those notices fire on the flat ends of the smooth cutoff, where the
    integrand is below double precision anyway.
    """
    opts = dict(epsabs=0.0, epsrel=1e-12, limit=400)
    if np.isinf(b) and kw.get("weight") in ("cos", "sin"):
        opts = dict(epsabs=1e-14, limlst=200)
    opts.update(kw)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, **opts)[0]
