"""Exact forest expansions, interpolated covariances, polymers and tree counts.

Everything here is combinatorial and small: forests are enumerated by brute
force over edge subsets, and the forest integrals are done exactly by
splitting the weakening cube into ordering simplices.  Polynomials are kept
as dicts from exponent tuples to Fractions.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

MAX_FOREST_OBJECTS = 6
MAX_BK_OBJECTS = 5
MAX_TREE_VERTICES = 7
MAX_DRESSED_RHO = 3


# ------------------------------------------------------------------ graphs


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def all_links(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def is_acyclic(n: int, links) -> bool:
    uf = _UnionFind(n)
    return all(uf.union(a, b) for a, b in links)


@dataclass(frozen=True)
class Forest:
    n: int
    links: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for a, b in self.links:
            if not (0 <= a < self.n and 0 <= b < self.n) or a == b:
                raise ValueError(f"bad link {(a, b)}")
        if not is_acyclic(self.n, self.links):
            raise ValueError("links contain a cycle")

    def components(self) -> list[list[int]]:
        uf = _UnionFind(self.n)
        for a, b in self.links:
            uf.union(a, b)
        comps: dict[int, list[int]] = {}
        for v in range(self.n):
            comps.setdefault(uf.find(v), []).append(v)
        return list(comps.values())

    def is_spanning_tree(self) -> bool:
        return len(self.links) == self.n - 1

    def path(self, a: int, b: int) -> list[tuple[int, int]] | None:
        """Links on the unique path from a to b, or None if disconnected."""
        return _tree_path(self.n, self.links, a, b)


def _tree_path(n, links, a, b):
    if a == b:
        return []
    adj = {v: [] for v in range(n)}
    for ln in links:
        adj[ln[0]].append((ln[1], ln))
        adj[ln[1]].append((ln[0], ln))
    prev = {a: None}
    stack = [a]
    while stack:
        v = stack.pop()
        for u, ln in adj[v]:
            if u not in prev:
                prev[u] = (v, ln)
                stack.append(u)
    if b not in prev:
        return None
    out = []
    v = b
    while prev[v] is not None:
        v, ln = prev[v]
        out.append(ln)
    return out[::-1]


def enumerate_forests(n: int) -> list[Forest]:
    """All forests on n labelled vertices, by filtering edge subsets for cycles."""
    if n < 1 or n > MAX_FOREST_OBJECTS:
        raise ValueError(f"forest enumeration supports 1 <= n <= {MAX_FOREST_OBJECTS}")
    links = all_links(n)
    out = []
    for m in range(n):
        for sub in itertools.combinations(links, m):
            if is_acyclic(n, sub):
                out.append(Forest(n, sub))
    return out


# ------------------------------------------------------------- polynomials


@dataclass
class WeakenedFunctional:
    """Polynomial in the link variables z_l with rational coefficients."""

    n: int
    terms: dict[tuple[int, ...], Fraction] = field(default_factory=dict)

    @property
    def links(self) -> list[tuple[int, int]]:
        return all_links(self.n)

    def __call__(self, z: Sequence) -> Fraction:
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = Fraction(c)
            for zi, e in zip(z, exps):
                if e:
                    term *= Fraction(zi) ** e
            total += term
        return total

    def at_ones(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def derivative(self, idx: int, order: int = 1) -> "WeakenedFunctional":
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms.items():
            e = exps[idx]
            if e < order:
                continue
            new = list(exps)
            new[idx] = e - order
            out[tuple(new)] = out.get(tuple(new), Fraction(0)) + c * math.perm(e, order)
        return WeakenedFunctional(self.n, {k: v for k, v in out.items() if v != 0})

    @classmethod
    def product_of_linear(cls, n: int, coeffs) -> "WeakenedFunctional":
        """prod_l (1 + a_l z_l)."""
        m = n * (n - 1) // 2
        terms = {tuple([0] * m): Fraction(1)}
        for i, a in enumerate(coeffs):
            new: dict = {}
            for exps, c in terms.items():
                new[exps] = new.get(exps, 0) + c
                e = list(exps)
                e[i] += 1
                new[tuple(e)] = new.get(tuple(e), 0) + c * Fraction(a)
            terms = new
        return cls(n, terms)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, n_terms: int = 6, max_degree: int = 2,
               coef_range: int = 5) -> "WeakenedFunctional":
        m = n * (n - 1) // 2
        terms: dict = {}
        for _ in range(n_terms):
            exps = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=m))
            c = Fraction(int(rng.integers(-coef_range, coef_range + 1)), int(rng.integers(1, 4)))
            terms[exps] = terms.get(exps, 0) + c
        return cls(n, {k: v for k, v in terms.items() if v != 0})


def _simplex_integral(exps: Sequence[int], order: Sequence[int]) -> Fraction:
    """int over {w_order[0] < ... < w_order[-1]} in [0,1]^m of prod w^exps."""
    val = Fraction(1)
    acc = 0
    for k, i in enumerate(order, start=1):
        acc += exps[i]
        val /= acc + k
    return val


def _integrate_substituted(Z: WeakenedFunctional, link_index, forest_links, rule) -> Fraction:
    """Sum over orderings of the forest weights of the exact simplex integrals.

    ``rule(rank)`` maps a rank table (link -> position in the ordering) to a
    list giving, for every z-variable, either a forest-link position, "one" or
    "zero".
    """
    m = len(forest_links)
    if m == 0:
        z = rule(None)
        return Z([1 if s == "one" else 0 for s in z])
    total = Fraction(0)
    for order in itertools.permutations(range(m)):
        # order[0] holds the smallest w
        rank = {forest_links[i]: pos for pos, i in enumerate(order)}
        assign = rule(rank)
        for exps, c in Z.terms.items():
            wexp = [0] * m
            dead = False
            for var, e in enumerate(exps):
                if not e:
                    continue
                a = assign[var]
                if a == "zero":
                    dead = True
                    break
                if a != "one":
                    wexp[a] += e
            if not dead:
                total += c * _simplex_integral(wexp, order)
    return total


def _forest_rule(n, forest_links, links, merged=None, fixed_one=()):
    """Substitution rule z_l -> path minimum (or 0 when disconnected)."""
    paths = []
    for ln in links:
        if ln in fixed_one:
            paths.append("one")
            continue
        a, b = ln
        if merged is not None:
            a, b = merged(a), merged(b)
            p = _tree_path(n, [(merged(x), merged(y)) for x, y in forest_links], a, b)
            if p is not None:
                canon = {(merged(x), merged(y)): (x, y) for x, y in forest_links}
                p = [canon[q] for q in p]
        else:
            p = _tree_path(n, forest_links, a, b)
        paths.append(p)
    idx = {ln: i for i, ln in enumerate(forest_links)}

    def rule(rank):
        out = []
        for p in paths:
            if p == "one":
                out.append("one")
            elif p is None:
                out.append("zero")
            elif len(p) == 0:
                out.append("one")
            else:
                out.append(idx[min(p, key=lambda q: rank[q])])
        return out

    return rule


def bk_forest_sum(Z: WeakenedFunctional) -> Fraction:
    """Right-hand side of the Brydges-Kennedy forest formula, exactly."""
    n = Z.n
    if n > MAX_BK_OBJECTS:
        raise ValueError(f"exact forest sum supports n <= {MAX_BK_OBJECTS}")
    links = Z.links
    pos = {ln: i for i, ln in enumerate(links)}
    total = Fraction(0)
    for F in enumerate_forests(n):
        dZ = Z
        for ln in F.links:
            dZ = dZ.derivative(pos[ln])
        if not dZ.terms:
            continue
        rule = _forest_rule(n, list(F.links), links)
        total += _integrate_substituted(dZ, pos, list(F.links), rule)
    return total


def restricted_forests(types: Sequence[int]) -> list[Forest]:
    """Forests whose components contain at most one type-2 object."""
    n = len(types)
    out = []
    for F in enumerate_forests(n):
        if all(sum(types[v] == 2 for v in comp) <= 1 for comp in F.components()):
            out.append(F)
    return out


def bk2_restricted_sum(Z: WeakenedFunctional, types: Sequence[int]) -> Fraction:
    """Restricted two-type forest formula; links between type-2 objects stay at 1.

    Weakening factors are path minima in the forest where all type-2 roots
    are merged into one vertex.
    """
    n = Z.n
    if len(types) != n or any(t not in (1, 2) for t in types):
        raise ValueError("types must list 1 or 2 for every object")
    if n > MAX_BK_OBJECTS:
        raise ValueError(f"exact forest sum supports n <= {MAX_BK_OBJECTS}")
    links = Z.links
    pos = {ln: i for i, ln in enumerate(links)}
    type2 = [v for v in range(n) if types[v] == 2]
    root = type2[0] if type2 else None
    merged = (lambda v: root if types[v] == 2 else v) if type2 else None
    fixed = {ln for ln in links if types[ln[0]] == 2 and types[ln[1]] == 2}
    total = Fraction(0)
    for F in restricted_forests(types):
        dZ = Z
        for ln in F.links:
            dZ = dZ.derivative(pos[ln])
        if not dZ.terms:
            continue
        rule = _forest_rule(n, list(F.links), links, merged=merged, fixed_one=fixed)
        total += _integrate_substituted(dZ, pos, list(F.links), rule)
    return total


# -------------------------------------------------- interpolated covariance


def s_from_forest(n: int, links, w) -> np.ndarray:
    """Weakening matrix: path minimum of w over the forest, 0 across components."""
    w = dict(zip(links, w))
    s = np.eye(n)
    for a, b in itertools.combinations(range(n), 2):
        p = _tree_path(n, list(links), a, b)
        if p is not None:
            s[a, b] = s[b, a] = min(w[q] for q in p) if p else 1.0
    return s


def is_ultrametric_similarity(s: np.ndarray, tol: float = 1e-12) -> bool:
    """s_ac >= min(s_ab, s_bc) for all triples and unit diagonal."""
    n = s.shape[0]
    if not np.allclose(np.diag(s), 1.0) or not np.allclose(s, s.T):
        return False
    for a, b, c in itertools.permutations(range(n), 3):
        if s[a, c] < min(s[a, b], s[b, c]) - tol:
            return False
    return True


@dataclass
class InterpolatedCovariance:
    matrix: np.ndarray
    min_eigenvalue: float
    psd: bool
    tree_structured: bool


def interpolated_covariance(C: np.ndarray, owner: Sequence[int], s: np.ndarray,
                            tol: float = 1e-10) -> InterpolatedCovariance:
    """Entrywise product C(x, x') s[owner(x), owner(x')] on a finite point set.

    ``owner[p]`` is the interval carrying point p.  The result is flagged when
    s does not have the path-minimum structure, since positivity then is not
    guaranteed.
    """
    owner = np.asarray(owner)
    Cs = C * s[np.ix_(owner, owner)]
    Cs = 0.5 * (Cs + Cs.T)
    lam_min = float(np.linalg.eigvalsh(Cs)[0])
    return InterpolatedCovariance(Cs, lam_min, lam_min >= -tol, is_ultrametric_similarity(s))


def random_forest(n: int, rng: np.random.Generator, p_link: float = 0.7):
    """Random forest by keeping random links of a random spanning tree."""
    perm = rng.permutation(n)
    links = []
    for i in range(1, n):
        if rng.random() < p_link:
            a, b = int(perm[i]), int(perm[rng.integers(0, i)])
            links.append((min(a, b), max(a, b)))
    return links


# ------------------------------------------------------- dressed interaction


def dressed_field(components: Sequence, t: Sequence, k: int):
    """Low-momentum field at reference scale k with each scale-j piece weakened
    by t[j+1] ... t[k]; k = -1 gives zero."""
    total = 0
    for j in range(k + 1):
        weight = 1
        for kk in range(j + 1, k + 1):
            weight = weight * t[kk]
        total = total + weight * components[j]
    return total


def dressed_interaction(fields: Sequence[Sequence], t: Sequence, lam=1, kappa: int = 1):
    """Momentum-decoupled version of lam^kappa prod_i psi_i at one point.

    ``fields[i][j]`` is the scale-j component of field i, ``t[j]`` the
    decoupling parameter of the scale-j interval containing the point.  Works
    on floats and on sympy symbols alike.
    """
    rho = len(t) - 1
    if rho > MAX_DRESSED_RHO:
        raise ValueError(f"dressed interaction limited to rho <= {MAX_DRESSED_RHO}")
    for f in fields:
        if len(f) != rho + 1:
            raise ValueError("each field needs one component per scale")
    for tj in t:
        if isinstance(tj, (int, float, Fraction)) and not 0 <= tj <= 1:
            raise ValueError("t values must lie in [0, 1]")
    n = len(fields)
    main = 1
    for f in fields:
        main = main * dressed_field(f, t, rho)
    extra = 0
    for r in range(rho + 1):
        prod = 1
        for f in fields:
            prod = prod * dressed_field(f, t, r - 1)
        extra = extra + (1 - t[r] ** n) * prod
    return lam ** kappa * (main + extra)


def undressed_interaction(fields: Sequence[Sequence], lam=1, kappa: int = 1):
    prod = 1
    for f in fields:
        prod = prod * sum(f)
    return lam ** kappa * prod


# ----------------------------------------------------------------- vertical


def vert_order(n_ext_max: int, n_delta: int) -> int:
    """Taylor order used for the decoupling parameter of one interval."""
    return n_ext_max + n_delta


def vert_expand(f, t, order: int):
    """Taylor expansion at t=0 with integral remainder, as a sympy expression.

    Returns (sum_{tau<order} f^(tau)(0)/tau!, remainder integral); the two add
    up to f(1).
    """
    import sympy as sp

    head = sum(sp.diff(f, t, tau).subs(t, 0) / sp.factorial(tau) for tau in range(order))
    rem = sp.integrate((1 - t) ** (order - 1) / sp.factorial(order - 1) * sp.diff(f, t, order), (t, 0, 1))
    return sp.simplify(head), sp.simplify(rem)


# ----------------------------------------------------------------- polymers


@dataclass(frozen=True)
class PolyInterval:
    j: int
    k: int
    color: int = 0


@dataclass
class Polymer:
    intervals: list[PolyInterval]
    hlinks: list[tuple[int, int]]
    vlinks: list[tuple[int, int, int]]  # child, parent, tau
    ext: list[tuple[int, int]]  # index, tau
    M: int = 2

    @classmethod
    def from_json(cls, data: dict, M: int = 2) -> "Polymer":
        ivs = [PolyInterval(int(d["j"]), int(d["k"]), int(d.get("color", 0))) for d in data["intervals"]]
        hl = [tuple(int(x) for x in ln) for ln in data.get("hlinks", [])]
        vl = [(int(v["child"]), int(v["parent"]), int(v.get("tau", 1))) for v in data.get("vlinks", [])]
        ext = []
        for e in data.get("ext", []):
            if isinstance(e, dict):
                ext.append((int(e["index"]), int(e.get("tau", 1))))
            else:
                ext.append((int(e), 1))
        return cls(ivs, hl, vl, ext, M)

    @property
    def lowest_scale(self) -> int:
        return min(iv.j for iv in self.intervals)


@dataclass
class PolymerReport:
    valid: bool
    errors: list[str]
    n_delta: list[int]
    component_size: list[int]
    n_ext: int
    vacuum: bool


def validate_polymer(p: Polymer) -> PolymerReport:
    errors = []
    N = len(p.intervals)
    if N == 0:
        return PolymerReport(False, ["empty polymer"], [], [], 0, True)
    keys = [(iv.j, iv.k, iv.color) for iv in p.intervals]
    if len(set(keys)) != N:
        errors.append("duplicate interval")
    for iv in p.intervals:
        if iv.j < 0:
            errors.append(f"negative scale {iv.j}")

    def ok_index(i):
        return 0 <= i < N

    deg = [0] * N
    per_scale: dict[int, list[tuple[int, int]]] = {}
    for a, b in p.hlinks:
        if not (ok_index(a) and ok_index(b)) or a == b:
            errors.append(f"horizontal link {(a, b)} references a missing interval")
            continue
        if p.intervals[a].j != p.intervals[b].j:
            errors.append(f"horizontal link {(a, b)} joins different scales")
            continue
        per_scale.setdefault(p.intervals[a].j, []).append((a, b))
        deg[a] += 1
        deg[b] += 1
    for j, links in per_scale.items():
        if not is_acyclic(N, links):
            errors.append(f"horizontal links at scale {j} contain a cycle")
    if len(set(map(frozenset, p.hlinks))) != len(p.hlinks):
        errors.append("repeated horizontal link")

    children_seen = Counter()
    for c, par, tau in p.vlinks:
        if not (ok_index(c) and ok_index(par)):
            errors.append(f"vertical link {(c, par)} references a missing interval")
            continue
        if tau < 0:
            errors.append(f"negative multiplicity on vertical link {(c, par)}")
        ci, pi = p.intervals[c], p.intervals[par]
        if ci.j != pi.j + 1 or ci.k // p.M != pi.k:
            errors.append(f"vertical link {(c, par)} does not point to the parent interval")
        children_seen[c] += 1
    for c, cnt in children_seen.items():
        if cnt > 1:
            errors.append(f"interval {c} has {cnt} vertical links")

    j0 = p.lowest_scale
    n_ext = 0
    for i, tau in p.ext:
        if not ok_index(i):
            errors.append(f"external index {i} missing")
            continue
        if p.intervals[i].j != j0:
            errors.append(f"external interval {i} is not at the lowest scale")
        n_ext += tau

    # connectivity via horizontal links and inclusion links of nonzero multiplicity
    uf = _UnionFind(N)
    for a, b in p.hlinks:
        if ok_index(a) and ok_index(b):
            uf.union(a, b)
    for c, par, tau in p.vlinks:
        if tau != 0 and ok_index(c) and ok_index(par):
            uf.union(c, par)
    if len({uf.find(i) for i in range(N)}) > 1:
        errors.append("polymer is not connected")

    comp_size = []
    for i in range(N):
        j = p.intervals[i].j
        links = per_scale.get(j, [])
        uf_j = _UnionFind(N)
        for a, b in links:
            uf_j.union(a, b)
        comp_size.append(sum(1 for v in range(N) if v != i and uf_j.find(v) == uf_j.find(i)))
    return PolymerReport(not errors, errors, deg, comp_size, n_ext, n_ext == 0)


def full_inclusion_polymer(forests: dict[int, list[tuple[int, int]]], k_of: dict[int, list[int]], M: int = 2,
                           ext=()) -> Polymer:
    """Polymer from per-scale horizontal forests with every inclusion link present.

    ``k_of[j]`` lists the translation indices of the scale-j intervals and
    ``forests[j]`` their links (local indices).  Parents missing from the
    next scale down are not linked.
    """
    ivs, offset = [], {}
    for j in sorted(k_of):
        offset[j] = len(ivs)
        ivs.extend(PolyInterval(j, k) for k in k_of[j])
    hl = [(offset[j] + a, offset[j] + b) for j, links in forests.items() for a, b in links]
    lookup = {(iv.j, iv.k): i for i, iv in enumerate(ivs)}
    vl = []
    for i, iv in enumerate(ivs):
        par = lookup.get((iv.j - 1, iv.k // M))
        if par is not None:
            vl.append((i, par, 1))
    return Polymer(ivs, hl, vl, [(e, 1) for e in ext], M)


def mayer_weakened_overlap(p1: Polymer, p2: Polymer, S: float) -> float:
    """Weakened non-overlap factor between two polymers with the same lowest scale.

    External intervals never overlap (that factor is not weakened); any other
    coincidence at the lowest scale costs a factor (1 - S).
    """
    if not 0.0 <= S <= 1.0:
        raise ValueError("S must lie in [0, 1]")
    j = p1.lowest_scale
    if p2.lowest_scale != j:
        raise ValueError("polymers must share their lowest scale")
    ext1 = {(p1.intervals[i].j, p1.intervals[i].k) for i, _ in p1.ext}
    ext2 = {(p2.intervals[i].j, p2.intervals[i].k) for i, _ in p2.ext}
    if ext1 & ext2:
        return 0.0
    low1 = {(iv.j, iv.k) for iv in p1.intervals if iv.j == j}
    low2 = {(iv.j, iv.k) for iv in p2.intervals if iv.j == j}
    clash = any(a == b and not (a in ext1 and b in ext2) for a in low1 for b in low2)
    return 1.0 + S * ((0.0 if clash else 1.0) - 1.0)


# --------------------------------------------------------------- tree counts


@dataclass
class TreeCount:
    degrees: tuple[int, ...]
    brute_force: int
    standard: int
    stated: int

    @property
    def standard_matches(self) -> bool:
        return self.brute_force == self.standard

    @property
    def stated_matches(self) -> bool:
        return self.brute_force == self.stated


def _labelled_trees(n: int):
    links = all_links(n)
    for sub in itertools.combinations(links, n - 1):
        if is_acyclic(n, sub):
            yield sub


def tree_degree_histogram(n: int) -> Counter:
    """Number of labelled trees on n vertices for each degree sequence."""
    if n < 2 or n > MAX_TREE_VERTICES:
        raise ValueError(f"tree enumeration supports 2 <= n <= {MAX_TREE_VERTICES}")
    hist: Counter = Counter()
    for tree in _labelled_trees(n):
        d = [0] * n
        for a, b in tree:
            d[a] += 1
            d[b] += 1
        hist[tuple(d)] += 1
    return hist


def cayley_counts(n: int, degrees: Sequence[int], histogram: Counter | None = None) -> TreeCount:
    """Labelled trees with a prescribed degree sequence, three ways.

    ``standard`` is (n-2)!/prod (d_i-1)!, ``stated`` is n!/prod (d_i-1)!, the
    alternative expression that is compared but not trusted.
    """
    degrees = tuple(int(d) for d in degrees)
    if len(degrees) != n:
        raise ValueError("need one degree per vertex")
    if n < 2 or any(d < 1 for d in degrees) or sum(d - 1 for d in degrees) != n - 2:
        raise ValueError(f"infeasible degree sequence {degrees}")
    hist = tree_degree_histogram(n) if histogram is None else histogram
    denom = math.prod(math.factorial(d - 1) for d in degrees)
    return TreeCount(degrees, hist.get(degrees, 0), math.factorial(n - 2) // denom,
                     math.factorial(n) // denom)


def degree_sequences(n: int):
    """All feasible labelled degree sequences for trees on n vertices."""
    for d in itertools.product(range(1, n), repeat=n):
        if sum(x - 1 for x in d) == n - 2:
            yield d
