"""Command line entry point: ``fbmarea <group> <command> [flags]``.

Every command writes CSV (to ``--out`` or stdout) preceded by ``#`` lines
carrying the resolved config, its hash, the oracles behind the numbers and
one timestamp line.  Apart from that timestamp the output is deterministic.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, resolve

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_VALIDATION = 2
EXIT_UNRELIABLE = 3


class Table:
    def __init__(self, columns, provenance: dict | None = None):
        self.columns = list(columns)
        self.rows: list[list] = []
        self.provenance = provenance or {}
        self.notes: list[str] = []

    def add(self, *row):
        self.rows.append(list(row))


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def emit(table: Table, cfg: RunConfig, command: str, stream=None) -> str:
    buf = io.StringIO()
    buf.write(f"# fbmarea {__version__} {command}\n")
    resolved = {k: v for k, v in cfg.to_dict().items() if k != "out"}
    buf.write(f"# config: {json.dumps(resolved, sort_keys=True, default=str)}\n")
    buf.write(f"# config_hash: {cfg.digest()}\n")
    buf.write(f"# provenance: {json.dumps(table.provenance, sort_keys=True)}\n")
    for note in table.notes:
        buf.write(f"# note: {note}\n")
    buf.write(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        (stream or sys.stdout).write(text)
    return text


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


# ------------------------------------------------------------------ fields


def cmd_fields_variance(cfg: RunConfig, a) -> tuple[Table, int]:
    from .fields import SpectralGrid, cutoff_increment_variance, cutoff_loss_fraction, grid_increment_variance

    cfg.validate()
    grid = SpectralGrid(M=cfg.M, rho=cfg.rho, nodes_per_band=cfg.nodes_per_band)
    lags = float(cfg.M) ** -np.arange(a.lag_exp, -1, -1)
    t = Table(["lag", "grid_variance", "cutoff_variance", "normalized_ratio"],
              {"cutoff_variance": "adaptive quadrature (QUADPACK)", "grid_variance": "Gauss-Legendre band rule",
               "normalized_ratio": "cutoff variance / lag^(2 alpha) plus lost high-frequency fraction"})
    for h in lags:
        cv = cutoff_increment_variance(h, cfg.alpha, cfg.rho, cfg.M)
        ratio = cv / h ** (2 * cfg.alpha) + cutoff_loss_fraction(h, cfg.alpha, cfg.rho, cfg.M)
        t.add(h, float(grid_increment_variance(grid, cfg.alpha, h)[0]), cv, ratio)
    return t, EXIT_OK


def cmd_fields_mc(cfg: RunConfig, a) -> tuple[Table, int]:
    from .fields import SpectralGrid, grid_increment_variance, sample_field

    cfg.validate(stochastic=True)
    grid = SpectralGrid(M=cfg.M, rho=cfg.rho, nodes_per_band=cfg.nodes_per_band)
    lags = float(cfg.M) ** -np.arange(a.lag_exp, -1, -1)
    incs = []
    for start in range(0, a.replicas, 1000):
        f = sample_field(grid, cfg.alpha, cfg.seed, 0, range(start, min(start + 1000, a.replicas)))
        incs.append(f.fbm(lags))
    incs = np.concatenate(incs)
    t = Table(["lag", "mc_variance", "stderr", "exact_grid_variance", "z"],
              {"exact_grid_variance": "closed sum over grid nodes", "rng": "Philox counter streams"})
    for i, h in enumerate(lags):
        sq = incs[:, i] ** 2
        m, se = float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(sq.size))
        ex = float(grid_increment_variance(grid, cfg.alpha, h)[0])
        t.add(h, m, se, ex, (m - ex) / se)
    return t, EXIT_OK


# -------------------------------------------------------------------- area


def cmd_area_sweep(cfg: RunConfig, a) -> tuple[Table, int]:
    from .levy_area import variance_vs_cutoff

    cfg.validate()
    if a.k_min >= a.k_max:
        raise ConfigError("need k_min < k_max")
    cutoffs = float(cfg.M) ** np.arange(a.k_min, a.k_max + 1)
    res = variance_vs_cutoff(cfg.alpha, cutoffs, a.lag, a.piece)
    t = Table(["lambda_cutoff", "variance", "fitted_slope"],
              {"variance": "sector integral, adaptive quadrature", "fitted_slope": "least squares in log-log"})
    for L, v in zip(res.cutoffs, res.variances):
        t.add(L, v, res.slope)
    t.notes.append(f"target slope {1 - 4 * cfg.alpha if a.piece == 'plus' else 0.0}; "
                   f"difference slope {res.difference_slope:.6f}")
    return t, EXIT_OK


def cmd_area_chen(cfg: RunConfig, a) -> tuple[Table, int]:
    from .fields import SpectralGrid
    from .levy_area import AreaSampler, chen_residual

    cfg.validate(stochastic=True)
    sampler = AreaSampler(SpectralGrid(M=cfg.M, rho=cfg.rho, nodes_per_band=cfg.nodes_per_band), cfg.alpha)
    c1, c2 = sampler.coefficients(cfg.seed, range(a.replicas))
    rng = np.random.default_rng(cfg.seed)
    t = Table(["s", "u", "t", "max_abs_residual", "max_rel_residual"], {"area": "closed-form spectral bilinear"})
    for _ in range(a.triples):
        s, u, tt = np.sort(rng.uniform(0.0, 1.0, 3))
        res, scale = chen_residual(sampler, c1, c2, s, u, tt)
        t.add(s, u, tt, float(np.max(np.abs(res))), float(np.max(np.abs(res) / scale)))
    return t, EXIT_OK


def cmd_area_sample(cfg: RunConfig, a) -> tuple[Table, int]:
    from .fields import SpectralGrid
    from .levy_area import AreaSampler

    cfg.validate(stochastic=True)
    if not a.s < a.t:
        raise ConfigError("need s < t")
    sampler = AreaSampler(SpectralGrid(M=cfg.M, rho=cfg.rho, nodes_per_band=cfg.nodes_per_band), cfg.alpha)
    c1, c2 = sampler.coefficients(cfg.seed, range(a.replicas))
    b1 = sampler.fbm_increment(c1, a.s, a.t)
    b2 = sampler.fbm_increment(c2, a.s, a.t)
    area = sampler.area(c1, c2, a.s, a.t)
    t = Table(["replica", "increment_1", "increment_2", "area"], {"rng": "Philox counter streams"})
    for r in range(a.replicas):
        t.add(r, float(b1[r]), float(b2[r]), float(area[r]))
    return t, EXIT_OK


# --------------------------------------------------------------- interact


def cmd_interact_bubble(cfg: RunConfig, a) -> tuple[Table, int]:
    from .interacting import bubble, check_model_alpha

    cfg.validate(model=True)
    check_model_alpha(cfg.alpha)
    e = 1.0 - 4.0 * cfg.alpha
    t = Table(["xi", "cutoff", "bubble", "collapse_ratio"],
              {"bubble": "adaptive quadrature (QUADPACK)", "collapse_ratio": "bubble / (lam^2 (cutoff/xi)^(1-4 alpha))"})
    for x in _floats(a.xi):
        for k in range(a.k_min, a.k_max + 1):
            L = x * float(cfg.M) ** k
            b = bubble(x, L, cfg.lam, cfg.alpha)
            t.add(x, L, b, b / (cfg.lam ** 2 * (L / x) ** e))
    return t, EXIT_OK


def cmd_interact_resum(cfg: RunConfig, a) -> tuple[Table, int]:
    from .interacting import bubble_fit_constant, resummed_propagator

    cfg.validate(model=True)
    Kp = bubble_fit_constant(cfg.alpha)
    e = 1.0 - 4.0 * cfg.alpha
    t = Table(["xi", "cutoff", "resummed", "limit", "relative_deviation"],
              {"K_prime": "normalised bubble at cutoff ratio 2^20"})
    for x in _floats(a.xi):
        for k in range(a.k_min, a.k_max + 1):
            L = x * float(cfg.M) ** k
            r = resummed_propagator(x, L, cfg.lam, cfg.alpha, Kp)
            lim = abs(x) ** e / cfg.lam ** 2
            t.add(x, L, r, lim, abs(r - lim) / lim)
    t.notes.append(f"K_prime {Kp!r}")
    return t, EXIT_OK


def cmd_interact_constants(cfg: RunConfig, a) -> tuple[Table, int]:
    from .fields import c_alpha
    from .interacting import (K1_constant, bubble_fit_constant, c_prime_alpha, extrapolated_boundary_variance,
                              mass_constant_K, mass_constant_K_scale)

    cfg.validate(model=True)
    t = Table(["name", "value", "method"])
    t.add("c_alpha", c_alpha(cfg.alpha), "closed form")
    t.add("c_prime_alpha", c_prime_alpha(cfg.alpha), "inverse Fourier quadrature of |t|^(-4 alpha)")
    t.add("K_mass", mass_constant_K(cfg.alpha, cfg.M), "quadrature over bands 1 and 2")
    for j in (5, 9):
        t.add(f"K_mass_scale_{j}", mass_constant_K_scale(j, cfg.alpha, cfg.M), "rescaled scale-j integral")
    t.add("K1", K1_constant(cfg.alpha), "QUADPACK with cosine weight")
    t.add("K2", extrapolated_boundary_variance(1.0, cfg.alpha, cfg.M), "Aitken limit over cutoffs M^12, M^14, M^16")
    t.add("K_prime", bubble_fit_constant(cfg.alpha), "normalised bubble at cutoff ratio 2^20")
    return t, EXIT_OK


def cmd_interact_variance(cfg: RunConfig, a) -> tuple[Table, int]:
    from .interacting import interacting_area_variance

    cfg.validate(model=True)
    if cfg.lam <= 0:
        raise ConfigError("lambda must be positive here")
    t = Table(["s", "t", "variance", "shape_constant"],
              {"variance": "(4 K1/lam^2 + K2) |t-s|^(4 alpha), both terms by quadrature at the actual lag"})
    vals = _floats(a.times)
    if len(vals) % 2:
        raise ConfigError("--times takes s,t pairs")
    for s, tt in zip(vals[::2], vals[1::2]):
        r = interacting_area_variance(s, tt, cfg.lam, cfg.alpha, cfg.M)
        t.add(s, tt, r.value, r.value / (tt - s) ** (4 * cfg.alpha))
    return t, EXIT_OK


def cmd_interact_mc(cfg: RunConfig, a) -> tuple[Table, int]:
    from .interacting import mc_interacting_moment

    cfg.validate(model=True, stochastic=True)
    if cfg.rho > 6:
        raise ConfigError("interacting MC supports rho <= 6")
    r = mc_interacting_moment(cfg.rho, cfg.lam, cfg.alpha, a.observable, a.replicas, cfg.seed,
                              nodes_per_band=cfg.nodes_per_band, threads=cfg.threads, M=cfg.M)
    t = Table(["observable", "estimate", "stderr", "ess", "n", "free_estimate", "free_stderr", "exact_free",
               "weight_min", "weight_max", "reliable"],
              {"weights": "exp(-c' lam^2 / 2 (Q+ + Q-)) with exact cell Gram matrix",
               "exact_free": "closed sum over grid nodes"})
    t.add(a.observable, r.estimate, r.stderr, r.ess, r.n, r.free_estimate, r.free_stderr, r.exact_free,
          r.weight_min, r.weight_max, r.reliable)
    return t, EXIT_OK if r.reliable else EXIT_UNRELIABLE


# ---------------------------------------------------------------- cluster


def cmd_cluster_bk(cfg: RunConfig, a) -> tuple[Table, int]:
    from .cluster import MAX_BK_OBJECTS, WeakenedFunctional, bk_forest_sum

    cfg.validate(stochastic=True)
    if not 1 <= a.n <= MAX_BK_OBJECTS:
        raise ConfigError(f"n must lie in 1..{MAX_BK_OBJECTS}")
    rng = np.random.default_rng(cfg.seed)
    t = Table(["trial", "n", "Z_at_ones", "forest_sum", "equal"], {"forest_sum": "exact rational arithmetic"})
    bad = 0
    for k in range(a.trials):
        Z = WeakenedFunctional.random(a.n, rng)
        lhs, rhs = Z.at_ones(), bk_forest_sum(Z)
        bad += lhs != rhs
        t.add(k, a.n, lhs, rhs, lhs == rhs)
    return t, EXIT_OK if bad == 0 else EXIT_FAIL


def cmd_cluster_cayley(cfg: RunConfig, a) -> tuple[Table, int]:
    from .cluster import MAX_TREE_VERTICES, cayley_counts, degree_sequences, tree_degree_histogram

    if not 2 <= a.n <= MAX_TREE_VERTICES:
        raise ConfigError(f"n must lie in 2..{MAX_TREE_VERTICES}")
    hist = tree_degree_histogram(a.n)
    t = Table(["degrees", "brute_force", "standard", "alternative", "standard_matches", "alternative_matches"],
              {"standard": "(n-2)!/prod(d_i-1)!", "alternative": "n!/prod(d_i-1)!, reported only"})
    for d in degree_sequences(a.n):
        c = cayley_counts(a.n, d, hist)
        t.add(" ".join(map(str, d)), c.brute_force, c.standard, c.stated, c.standard_matches, c.stated_matches)
    return t, EXIT_OK


def cmd_cluster_lint(cfg: RunConfig, a) -> tuple[Table, int]:
    from .cluster import Polymer, validate_polymer

    try:
        p = Polymer.from_json(json.loads(Path(a.file).read_text()), M=cfg.M)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed polymer file: {exc}") from exc
    rep = validate_polymer(p)
    t = Table(["field", "value"])
    t.add("valid", rep.valid)
    t.add("n_ext", rep.n_ext)
    t.add("vacuum", rep.vacuum)
    t.add("n_delta", " ".join(map(str, rep.n_delta)))
    t.add("component_size", " ".join(map(str, rep.component_size)))
    for e in rep.errors:
        t.add("error", e)
    return t, EXIT_OK if rep.valid else EXIT_VALIDATION


# ---------------------------------------------------------- power counting


def cmd_pc_classify(cfg: RunConfig, a) -> tuple[Table, int]:
    from .power_counting import MODELS, classify

    if a.model not in MODELS:
        raise ConfigError(f"unknown model {a.model!r}")
    cfg.validate(model=True)
    c = classify(MODELS[a.model](), cfg.alpha, a.max_legs)
    t = Table(["signature", "omega", "divergent", "divergent_unfiltered"], {"omega": "sympy exact"})
    for sig, w in c.signatures:
        t.add(" ".join(sig), w, sig in c.divergent, sig in c.divergent_unfiltered)
    t.notes.append(f"N_ext_max {c.n_ext_max} (range), {c.n_ext_max_pointwise} (pointwise)")
    t.notes += c.notes
    return t, EXIT_OK


def cmd_pc_diagram(cfg: RunConfig, a) -> tuple[Table, int]:
    from .power_counting import (MODELS, FeynmanDiagram, internal_rescale_sum, omega, omega_from_internal,
                                 omega_ms, omega_ms_rescaled)

    cfg.validate(model=True)
    model = MODELS[a.model]()
    try:
        d = FeynmanDiagram.from_json(json.loads(Path(a.file).read_text()))
        d.validate(model)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid diagram: {exc}") from exc
    t = Table(["quantity", "value"], {"all": "sympy exact"})
    t.add("n_ext", d.n_ext())
    t.add("omega", omega(d, model, cfg.alpha))
    t.add("omega_from_internal", omega_from_internal(d, model, cfg.alpha))
    if d.has_scales():
        t.add("height", d.height())
        t.add("omega_ms", omega_ms(d, model, cfg.alpha))
        t.add("omega_ms_rescaled", omega_ms_rescaled(d, model, cfg.alpha))
        t.add("internal_rescale_sum", internal_rescale_sum(d, model, cfg.alpha))
    return t, EXIT_OK


def cmd_pc_spring(cfg: RunConfig, a) -> tuple[Table, int]:
    from .power_counting import spring_factors

    cfg.validate(model=True)
    t = Table(["j", "k", "height", "full", "local", "renormalized", "ratio", "taylor_bound_ratio", "M_power"],
              {"full": "Gauss-Legendre in Fourier space", "taylor_bound_ratio": "first-order remainder bound"})
    for r in spring_factors(a.j, _ints(a.heights), cfg.alpha, cfg.M):
        h = r.k - r.j
        t.add(r.j, r.k, h, r.full, r.local, r.renormalized, r.ratio, r.taylor_bound_ratio, float(cfg.M) ** -h)
    return t, EXIT_OK


# ------------------------------------------------------------------- wick


def cmd_wick_moment(cfg: RunConfig, a) -> tuple[Table, int]:
    from .wick import double_factorial, mc_moment, wick_moment

    try:
        cov = np.loadtxt(a.cov, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read covariance: {exc}") from exc
    idx = [i - 1 for i in _ints(a.indices)]
    if any(i < 0 or i >= len(cov) for i in idx):
        raise ConfigError("indices are 1-based and must address the covariance")
    try:
        val = wick_moment(cov, idx)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cols = ["indices", "moment", "pairings"]
    row = [" ".join(str(i + 1) for i in idx), val, double_factorial(len(idx) - 1) if len(idx) % 2 == 0 else 0]
    if a.mc_samples:
        cfg.validate(stochastic=True)
        m, se = mc_moment(cov, idx, a.mc_samples, cfg.seed)
        cols += ["mc_estimate", "mc_stderr"]
        row += [m, se]
    t = Table(cols, {"moment": "sum over perfect matchings"})
    t.add(*row)
    return t, EXIT_OK


# ----------------------------------------------------------------- report


def cmd_report_acceptance(cfg: RunConfig, a) -> tuple[Table, int]:
    from .acceptance import CRITERIA, run

    nums = _ints(a.only) if a.only else None
    if nums and any(n not in CRITERIA for n in nums):
        raise ConfigError(f"criteria are numbered 1..{len(CRITERIA)}")
    t = Table(["criterion", "name", "status", "seconds", "summary"])
    results = run(nums, threads=cfg.threads)
    for r in results:
        print(r.line(), file=sys.stderr)
        t.add(r.number, r.name, "PASS" if r.passed else "FAIL", round(r.seconds, 1), r.summary)
    return t, EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ----------------------------------------------------------------- parser


COMMANDS = {
    ("fields", "variance"): (cmd_fields_variance, "columns: lag, grid_variance, cutoff_variance, normalized_ratio"),
    ("fields", "mc"): (cmd_fields_mc, "columns: lag, mc_variance, stderr, exact_grid_variance, z"),
    ("area", "sweep"): (cmd_area_sweep, "columns: lambda_cutoff, variance, fitted_slope"),
    ("area", "chen"): (cmd_area_chen, "columns: s, u, t, max_abs_residual, max_rel_residual"),
    ("area", "sample"): (cmd_area_sample, "columns: replica, increment_1, increment_2, area"),
    ("interact", "bubble"): (cmd_interact_bubble, "columns: xi, cutoff, bubble, collapse_ratio"),
    ("interact", "resum"): (cmd_interact_resum, "columns: xi, cutoff, resummed, limit, relative_deviation"),
    ("interact", "constants"): (cmd_interact_constants, "columns: name, value, method"),
    ("interact", "variance"): (cmd_interact_variance, "columns: s, t, variance, shape_constant"),
    ("interact", "mc"): (cmd_interact_mc, "columns: observable, estimate, stderr, ess, n, free_estimate, "
                                          "free_stderr, exact_free, weight_min, weight_max, reliable; exit 3 "
                                          "when the effective sample size is too small"),
    ("cluster", "bk-verify"): (cmd_cluster_bk, "columns: trial, n, Z_at_ones, forest_sum, equal"),
    ("cluster", "cayley"): (cmd_cluster_cayley, "columns: degrees, brute_force, standard, alternative, "
                                                "standard_matches, alternative_matches"),
    ("cluster", "polymer-lint"): (cmd_cluster_lint, "columns: field, value; exit 2 for an invalid polymer"),
    ("pc", "classify"): (cmd_pc_classify, "columns: signature, omega, divergent, divergent_unfiltered"),
    ("pc", "diagram"): (cmd_pc_diagram, "columns: quantity, value"),
    ("pc", "spring"): (cmd_pc_spring, "columns: j, k, height, full, local, renormalized, ratio, "
                                      "taylor_bound_ratio, M_power"),
    ("wick", "moment"): (cmd_wick_moment, "columns: indices, moment, pairings [, mc_estimate, mc_stderr]"),
    ("report", "acceptance"): (cmd_report_acceptance, "columns: criterion, name, status, seconds, summary; "
                                                      "exit 1 when any criterion fails"),
}

# fields resolved through RunConfig; None defaults let the config file fill in
COMMON = ("alpha", "lam", "M", "rho", "seed", "nodes_per_band", "threads", "out")


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", help="JSON config with \"schema\": 1")
    g.add_argument("--alpha", type=float)
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--M", type=int)
    g.add_argument("--rho", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--nodes-per-band", dest="nodes_per_band", type=int)
    g.add_argument("--threads", type=int)
    g.add_argument("--out", help="output CSV path (default stdout)")


def _extras(group: str, name: str, p: argparse.ArgumentParser) -> None:
    if group == "fields":
        p.add_argument("--lag-exp", type=int, default=8, help="lags M^-lag_exp .. 1")
        if name == "mc":
            p.add_argument("--replicas", type=int, default=10_000)
    elif (group, name) == ("area", "sweep"):
        p.add_argument("--k-min", type=int, default=4)
        p.add_argument("--k-max", type=int, default=12)
        p.add_argument("--lag", type=float, default=1.0)
        p.add_argument("--piece", choices=("plus", "boundary"), default="plus")
    elif (group, name) == ("area", "chen"):
        p.add_argument("--triples", type=int, default=50)
        p.add_argument("--replicas", type=int, default=4)
    elif (group, name) == ("area", "sample"):
        p.add_argument("--replicas", type=int, default=10)
        p.add_argument("--s", type=float, default=0.0)
        p.add_argument("--t", type=float, default=1.0)
    elif (group, name) in (("interact", "bubble"), ("interact", "resum")):
        p.add_argument("--xi", default="1.0", help="comma-separated |xi| values")
        p.add_argument("--k-min", type=int, default=4, help="cutoff = |xi| M^k")
        p.add_argument("--k-max", type=int, default=20)
    elif (group, name) == ("interact", "variance"):
        p.add_argument("--times", default="0,1,0.25,0.5,0.1,0.9", help="comma-separated s,t pairs")
    elif (group, name) == ("interact", "mc"):
        p.add_argument("--observable", choices=("area2", "increment2", "increment4"), default="increment2")
        p.add_argument("--replicas", type=int, default=10_000)
    elif (group, name) == ("cluster", "bk-verify"):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--trials", type=int, default=20)
    elif (group, name) == ("cluster", "cayley"):
        p.add_argument("--n", type=int, required=True)
    elif (group, name) == ("cluster", "polymer-lint"):
        p.add_argument("file")
    elif group == "pc":
        p.add_argument("--model", default="phi-dphi-sigma")
        if name == "classify":
            p.add_argument("--max-legs", type=int, default=8)
        elif name == "diagram":
            p.add_argument("file")
        else:
            p.add_argument("--j", type=int, default=1)
            p.add_argument("--heights", default="1,2,3,4,5,6")
    elif group == "wick":
        p.add_argument("--cov", required=True, help="CSV covariance matrix")
        p.add_argument("--indices", required=True, help="1-based, comma-separated")
        p.add_argument("--mc-samples", type=int, default=0)
    elif group == "report":
        p.add_argument("--only", help="comma-separated criterion numbers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbmarea", description="Multiscale fBm Levy-area toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True)
    subs: dict[str, argparse._SubParsersAction] = {}
    for (group, name), (fn, doc) in COMMANDS.items():
        if group not in subs:
            subs[group] = groups.add_parser(group).add_subparsers(dest="command", required=True)
        p = subs[group].add_parser(name, help=doc, description=doc)
        _common(p)
        _extras(group, name, p)
        p.set_defaults(func=fn, label=f"{group} {name}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    try:
        file_values = load_config(args.config) if args.config else None
        flags = {k: getattr(args, k) for k in COMMON}
        extra = {k: v for k, v in vars(args).items()
                 if k not in COMMON + ("config", "func", "label", "group", "command")}
        cfg = resolve(file_values, {**flags, "params": extra})
        cfg.validate()
        table, code = args.func(cfg, args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"fbmarea: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    emit(table, cfg, args.label)
    return code


if __name__ == "__main__":
    sys.exit(main())
