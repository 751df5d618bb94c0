"""Feynman diagrams, degrees of divergence and the renormalized bubble.

Scaling dimensions are sympy expressions in the Hurst index, so thresholds
such as alpha > 1/8 come out exactly.  The numeric part is restricted to the
two-point bubble of the (phi, dphi, sigma) model.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .partition import band_support, chi
from .quadrature import composite_gauss_legendre

ALPHA = sp.Symbol("alpha", positive=True)


# ------------------------------------------------------------------ models


@dataclass
class ModelSpec:
    """Fields with scaling dimensions and just-renormalizable interaction terms.

    ``excluded_external`` lists fields that never appear on external legs and
    ``vanishing`` is a predicate on external signatures whose local part is
    zero by symmetry.  Both are model data, not general rules.
    """

    D: int
    beta: dict[str, sp.Expr]
    interactions: list[tuple[tuple[str, ...], int]]
    alpha_range: tuple[sp.Rational, sp.Rational] | None = None
    excluded_external: tuple[str, ...] = ()
    vanishing: Callable[[Counter], bool] | None = None
    name: str = "model"

    def __post_init__(self):
        for fields, _ in self.interactions:
            for f in fields:
                if f not in self.beta:
                    raise ValueError(f"unknown field {f!r}")
            total = sp.simplify(sum(self.beta[f] for f in fields) + self.D)
            if total != 0:
                raise ValueError(f"interaction {fields} is not just renormalizable: sum beta + D = {total}")

    def beta_at(self, name: str, alpha=None):
        b = self.beta[name]
        return b if alpha is None else b.subs(ALPHA, sp.nsimplify(alpha))


def phi_dphi_sigma_model() -> ModelSpec:
    def odd_legs(sig: Counter) -> bool:
        return sig.get("dphi", 0) % 2 == 1 or sig.get("sigma", 0) % 2 == 1

    return ModelSpec(
        D=1,
        beta={"phi": ALPHA, "dphi": ALPHA - 1, "sigma": -2 * ALPHA},
        interactions=[(("phi", "dphi", "sigma"), 1)],
        alpha_range=(sp.Rational(1, 8), sp.Rational(1, 4)),
        excluded_external=("phi",),
        vanishing=odd_legs,
        name="phi-dphi-sigma",
    )


MODELS = {"phi-dphi-sigma": phi_dphi_sigma_model}


# ---------------------------------------------------------------- diagrams


@dataclass
class Line:
    a: int
    ia: str
    b: int
    ib: str
    scale: int | None = None


@dataclass
class ExternalLine:
    vertex: int
    i: str
    scale: int | None = None


@dataclass
class FeynmanDiagram:
    vertex_types: list[int]
    lines: list[Line]
    external: list[ExternalLine]
    vertex_scales: list[int] | None = None

    @classmethod
    def from_json(cls, data: dict) -> "FeynmanDiagram":
        vt = [int(v["type"]) for v in data["vertices"]]
        vs = [v.get("scale") for v in data["vertices"]]
        lines = [Line(int(l["a"]), str(l["ia"]), int(l["b"]), str(l["ib"]), l.get("scale")) for l in data["lines"]]
        ext = [ExternalLine(int(e["vertex"]), str(e["i"]), e.get("scale")) for e in data.get("external", [])]
        return cls(vt, lines, ext, None if all(s is None for s in vs) else vs)

    def n_ext(self) -> int:
        return len(self.external)

    def validate(self, model: ModelSpec) -> None:
        n = len(self.vertex_types)
        legs: list[Counter] = [Counter() for _ in range(n)]
        for l in self.lines:
            for v, f in ((l.a, l.ia), (l.b, l.ib)):
                if not 0 <= v < n:
                    raise ValueError(f"line references missing vertex {v}")
                legs[v][f] += 1
        for e in self.external:
            if not 0 <= e.vertex < n:
                raise ValueError(f"external line references missing vertex {e.vertex}")
            legs[e.vertex][e.i] += 1
        for v, q in enumerate(self.vertex_types):
            if not 0 <= q < len(model.interactions):
                raise ValueError(f"vertex {v} has unknown type {q}")
            want = Counter(model.interactions[q][0])
            if legs[v] != want:
                raise ValueError(f"vertex {v}: legs {dict(legs[v])} do not match interaction {dict(want)}")
        adj = {v: set() for v in range(n)}
        for l in self.lines:
            adj[l.a].add(l.b)
            adj[l.b].add(l.a)
        seen, stack = {0}, [0]
        while stack:
            for u in adj[stack.pop()] - seen:
                seen.add(u)
                stack.append(u)
        if len(seen) != n:
            raise ValueError("diagram is not connected")

    def has_scales(self) -> bool:
        return all(l.scale is not None for l in self.lines) and all(e.scale is not None for e in self.external)

    def height(self) -> int:
        internal = min(l.scale for l in self.lines) if self.lines else 0
        external = max(e.scale for e in self.external) if self.external else 0
        return internal - external

    def vertex_scale(self, v: int) -> int:
        """Production scale of a vertex: given explicitly, else its highest line scale."""
        if self.vertex_scales is not None and self.vertex_scales[v] is not None:
            return int(self.vertex_scales[v])
        js = [l.scale for l in self.lines if v in (l.a, l.b)] + [e.scale for e in self.external if e.vertex == v]
        return max(js)


def omega(diagram: FeynmanDiagram, model: ModelSpec, alpha=None):
    """Superficial degree: D plus the scaling dimensions of the external legs."""
    diagram.validate(model)
    return sp.simplify(model.D + sum(model.beta_at(e.i, alpha) for e in diagram.external))


def omega_from_internal(diagram: FeynmanDiagram, model: ModelSpec, alpha=None):
    """Same degree from the vertex/line count: D - D #vertices - sum over internal lines."""
    diagram.validate(model)
    val = model.D - model.D * len(diagram.vertex_types)
    val -= sum(model.beta_at(l.ia, alpha) + model.beta_at(l.ib, alpha) for l in diagram.lines)
    return sp.simplify(val)


def _check_scales(diagram: FeynmanDiagram) -> None:
    if not diagram.has_scales():
        raise ValueError("every line needs a scale")
    if diagram.height() < 0:
        raise ValueError(f"height {diagram.height()} < 0")


def omega_ms(diagram: FeynmanDiagram, model: ModelSpec, alpha=None):
    """Multi-scale degree: D height + sum_z sum_{lines at z} beta (j(z) - j(line))."""
    diagram.validate(model)
    _check_scales(diagram)
    val = model.D * diagram.height()
    for l in diagram.lines:
        for v, f in ((l.a, l.ia), (l.b, l.ib)):
            val += model.beta_at(f, alpha) * (diagram.vertex_scale(v) - l.scale)
    for e in diagram.external:
        val += model.beta_at(e.i, alpha) * (diagram.vertex_scale(e.vertex) - e.scale)
    return sp.simplify(val)


def omega_ms_rescaled(diagram: FeynmanDiagram, model: ModelSpec, alpha=None):
    """Rescaled multi-scale degree: only external legs contribute besides the height."""
    diagram.validate(model)
    _check_scales(diagram)
    val = model.D * diagram.height()
    for e in diagram.external:
        val += model.beta_at(e.i, alpha) * (diagram.vertex_scale(e.vertex) - e.scale)
    return sp.simplify(val)


def internal_rescale_sum(diagram: FeynmanDiagram, model: ModelSpec, alpha=None):
    val = 0
    for l in diagram.lines:
        for v, f in ((l.a, l.ia), (l.b, l.ib)):
            val += model.beta_at(f, alpha) * (diagram.vertex_scale(v) - l.scale)
    return sp.simplify(val)


def sigma_bubble(k: int | None = None, j: int | None = None) -> FeynmanDiagram:
    """Two phi-dphi-sigma vertices joined by a phi line and a dphi line."""
    return FeynmanDiagram(
        [0, 0],
        [Line(0, "phi", 1, "phi", k), Line(0, "dphi", 1, "dphi", k)],
        [ExternalLine(0, "sigma", j), ExternalLine(1, "sigma", j)],
    )


# ----------------------------------------------------------- classification


def signature_omega(model: ModelSpec, signature: Counter, alpha=None):
    return sp.simplify(model.D + sum(n * model.beta_at(f, alpha) for f, n in signature.items()))


def _divergent_somewhere(expr, lo, hi) -> bool:
    """Is a linear-in-alpha degree >= 0 somewhere in the open interval (lo, hi)?"""
    a, b = expr.subs(ALPHA, lo), expr.subs(ALPHA, hi)
    if a == b:
        return bool(a >= 0)
    return bool(max(a, b) > 0)


@dataclass
class Classification:
    alpha: sp.Expr | None
    signatures: list[tuple[tuple[str, ...], sp.Expr]]
    divergent: list[tuple[str, ...]]
    divergent_unfiltered: list[tuple[str, ...]]
    n_ext_max: int
    n_ext_max_pointwise: int | None
    omega_star_max: sp.Expr | None = None
    notes: list[str] = field(default_factory=list)


def _n_ext_max(groups: dict[int, list], is_div, max_legs: int) -> int:
    """Smallest N such that no signature with >= N legs (up to the bound) diverges."""
    last = 0
    for n in range(1, max_legs + 1):
        if any(is_div(sig) for sig in groups.get(n, [])):
            last = n
    return last + 1


def classify(model: ModelSpec, alpha=None, max_legs: int = 8) -> Classification:
    """Enumerate external-leg signatures, their degrees, and the divergent ones.

    ``n_ext_max`` uses the whole admissible range of alpha when the model has
    one (a diagram counts as divergent if it diverges anywhere in the range);
    ``n_ext_max_pointwise`` uses the given alpha only.
    """
    fields = [f for f in model.beta if f not in model.excluded_external]
    a = None if alpha is None else sp.nsimplify(alpha)
    if a is not None and model.alpha_range is not None:
        lo, hi = model.alpha_range
        if not lo < a < hi:
            raise ValueError(f"alpha={alpha} outside the model range ({lo}, {hi})")
    sigs, groups = [], {}
    for n in range(1, max_legs + 1):
        for combo in itertools.combinations_with_replacement(fields, n):
            c = Counter(combo)
            w = signature_omega(model, c)
            sigs.append((combo, w))
            groups.setdefault(n, []).append((combo, w))

    def div_at(w):
        return bool(w.subs(ALPHA, a) >= 0)

    def div_range(w):
        lo, hi = model.alpha_range
        return _divergent_somewhere(w, lo, hi)

    if model.alpha_range is not None:
        n_max = _n_ext_max(groups, lambda s: div_range(s[1]), max_legs)
    else:
        if a is None:
            raise ValueError("alpha required for a model without an admissible range")
        n_max = _n_ext_max(groups, lambda s: div_at(s[1]), max_legs)
    pointwise = None if a is None else _n_ext_max(groups, lambda s: div_at(s[1]), max_legs)

    test = div_at if a is not None else div_range
    unfiltered = [combo for combo, w in sigs if test(w)]
    divergent = [c for c in unfiltered if not (model.vanishing and model.vanishing(Counter(c)))]
    star = None
    if a is not None:
        vals = [(w - 1 if combo in divergent else w).subs(ALPHA, a) for combo, w in sigs
                if not (model.vanishing and model.vanishing(Counter(combo)))]
        star = max(vals) if vals else None
    notes = []
    if pointwise is not None and pointwise != n_max:
        notes.append(f"N_ext_max is {n_max} over the admissible range but {pointwise} at alpha={a}")
    return Classification(a, [(c, w if a is None else w.subs(ALPHA, a)) for c, w in sigs],
                          divergent, unfiltered, n_max, pointwise, star, notes)


def sigma_leg_omega(n_pairs: int, alpha):
    """Degree of a diagram with 2n external sigma legs."""
    model = phi_dphi_sigma_model()
    return signature_omega(model, Counter({"sigma": 2 * n_pairs}), alpha)


# ---------------------------------------------------- renormalized bubble


def _band_rule(j: int, M: int, panels: int = 24, order: int = 24):
    lo, hi = band_support(j, M)
    if j == 0:
        lo = 0.0
    return composite_gauss_legendre(np.linspace(lo, hi, panels + 1), order)


def _covariance_hat(kind: str, j: int, xi, alpha: float, M: int):
    """Even spectral weight of the scale-j covariance for phi, dphi or sigma."""
    a = np.abs(np.asarray(xi, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "phi":
            p = a ** (-1.0 - 2.0 * alpha)
        elif kind == "dphi":
            p = a ** (1.0 - 2.0 * alpha)
        elif kind == "sigma":
            p = a ** (4.0 * alpha - 1.0)
        else:
            raise ValueError(kind)
    return np.where(a > 0, chi(j, a, M) * p, 0.0)


def covariance_position(kind: str, j: int, r, alpha: float, M: int = 2, deriv: int = 0):
    """C(r) = int_R C_hat(xi) e^{i xi r} d xi (and its r-derivatives)."""
    x, w = _band_rule(j, M)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    c = _covariance_hat(kind, j, x, alpha, M) * w
    arg = np.outer(r, x)
    if deriv == 0:
        return 2.0 * np.cos(arg) @ c
    if deriv == 1:
        return -2.0 * (np.sin(arg) * x) @ c
    raise ValueError("deriv must be 0 or 1")


@dataclass
class BubbleRenormalization:
    j: int
    k: int
    full: float
    local: float
    renormalized: float
    ratio: float
    taylor_bound_ratio: float


def _amputated_hat(xi, k, alpha, M):
    """Fourier weight of A(r) = C_phi^k(r) C_dphi^k(r): a convolution of the two."""
    x, w = _band_rule(k, M)
    eta = np.concatenate([x, -x])
    weta = np.concatenate([w, w])
    cphi = _covariance_hat("phi", k, eta, alpha, M) * weta
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    return _covariance_hat("dphi", k, xi[:, None] - eta[None, :], alpha, M) @ cphi


def bubble_renormalization(j: int, k: int, alpha: float, M: int = 2, lag: float = 0.0,
                           r_periods: float = 60.0, r_nodes: int = 6000) -> BubbleRenormalization:
    """Full, local and renormalized sigma-sigma bubble with scale-k internal lines.

    External sigma propagators are at scale j < k.  Everything is evaluated
    in Fourier space at external separation ``lag``:
      full  = int Cs(xi)^2 A_hat(xi) cos(xi lag),
      local = A_hat(0) int Cs(xi)^2 cos(xi lag),
    with A_hat the transform of the amputated bubble.  ``taylor_bound_ratio``
    is the first-order remainder bound
      sup|Cs'| * int|Cs| * int |r||A(r)| dr / |full|
    (up to the common 2 pi factors), the quantity that carries the spring
    factor M^-(k - j).
    """
    if not 0 <= j < k:
        raise ValueError("need 0 <= j < k")
    x, w = _band_rule(j, M)
    cs2 = _covariance_hat("sigma", j, x, alpha, M) ** 2 * w
    ah = _amputated_hat(x, k, alpha, M)
    a0 = float(_amputated_hat([0.0], k, alpha, M)[0])
    c = np.cos(x * lag)
    full = 2.0 * float(np.sum(cs2 * ah * c))
    local = 2.0 * a0 * float(np.sum(cs2 * c))
    diff = 2.0 * float(np.sum(cs2 * (_amputated_hat(x, k, alpha, M) - a0) * c))

    # position-space pieces for the Taylor bound
    R = r_periods * float(M) ** (-(k - 1))
    r, wr = composite_gauss_legendre(np.linspace(-R, R, r_nodes // 20 + 1), 20)
    A = covariance_position("phi", k, r, alpha, M) * covariance_position("dphi", k, r, alpha, M)
    first_moment = float(np.sum(wr * np.abs(r) * np.abs(A)))
    Rj = r_periods * float(M) ** (-max(j - 1, 0))
    rj, wj = composite_gauss_legendre(np.linspace(-Rj, Rj, r_nodes // 20 + 1), 20)
    cs_l1 = float(np.sum(wj * np.abs(covariance_position("sigma", j, rj, alpha, M))))
    dcs_sup = float(np.max(np.abs(covariance_position("sigma", j, rj, alpha, M, deriv=1))))
    # full (position form) = 2 pi * 2 pi * (Fourier form); the bound is in position form
    bound = dcs_sup * cs_l1 * first_moment / ((2.0 * math.pi) ** 2 * abs(full))
    return BubbleRenormalization(j, k, full, local, diff, abs(diff) / abs(full), bound)


def local_part_position(k: int, anchor: float, alpha: float, M: int = 2, r_periods: float = 60.0,
                        r_nodes: int = 6000) -> float:
    """int A(y2 - y1) dy2 with y1 = anchor, by position-space quadrature."""
    R = r_periods * float(M) ** (-(k - 1))
    y2, w = composite_gauss_legendre(np.linspace(anchor - R, anchor + R, r_nodes // 20 + 1), 20)
    r = y2 - anchor
    A = covariance_position("phi", k, r, alpha, M) * covariance_position("dphi", k, r, alpha, M)
    return float(np.sum(w * A))


def amputated_local_fourier(k: int, alpha: float, M: int = 2) -> float:
    """Same local part from the Fourier side: 2 pi A_hat(0)."""
    return 2.0 * math.pi * float(_amputated_hat([0.0], k, alpha, M)[0])


def renormalized_integrand(y1: float, y2: float, yp1: float, yp2: float, j: int, k: int,
                           alpha: float, M: int = 2) -> float:
    """C_s(y1 - y1') [C_s(y2 - y2') - C_s(y1 - y2')] A(y2 - y1); zero when y2 = y1."""
    cs = lambda r: float(covariance_position("sigma", j, [r], alpha, M)[0])
    A = float(covariance_position("phi", k, [y2 - y1], alpha, M)[0]
              * covariance_position("dphi", k, [y2 - y1], alpha, M)[0])
    return cs(y1 - yp1) * (cs(y2 - yp2) - cs(y1 - yp2)) * A


def spring_factors(j: int, heights: Sequence[int], alpha: float, M: int = 2) -> list[BubbleRenormalization]:
    return [bubble_renormalization(j, j + h, alpha, M) for h in heights]
