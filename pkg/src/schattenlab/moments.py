"""Moment ratios M_p(F)/M_p(1) of the gas densities: Monte Carlo estimators,
a deterministic quadrature oracle for n <= 3, homogeneous closed forms, and
the thin-shell statistic pipelines.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import density
from .ensembles import ensemble_of
from .gammafn import log_gamma
from .util import batch_means, batch_means_cov

__all__ = [
    "Functional",
    "MomentEstimate",
    "SigmaEstimate",
    "VarMpEstimate",
    "OracleFailure",
    "one",
    "coord_pow",
    "pair_sq",
    "norm_sq",
    "norm_sq_sq",
    "abs_pow_sum",
    "norm_sq_times_abs_pow",
    "pair_ratio",
    "p_norm_power_times",
    "product_of",
    "resolve_functional",
    "estimate_moment",
    "quadrature_moment",
    "quadrature_moments",
    "closed_form_moment",
    "sigma_pipeline",
    "var_mp_pipeline",
]


class OracleFailure(RuntimeError):
    """The quadrature oracle could not certify the requested tolerance."""


@dataclass(frozen=True)
class Functional:
    """A symmetric functional of the gas point, with its homogeneity degree."""

    name: str
    degree: float
    fn: object

    def __call__(self, pts):
        return self.fn(np.asarray(pts, dtype=float))


def one():
    return Functional("one", 0.0, lambda x: np.ones(x.shape[0]))


def coord_pow(k):
    """Symmetrized coordinate power (1/n) sum_i x_i^k (k even)."""
    return Functional(f"x1_pow{k}", float(k), lambda x: np.mean(x**k, axis=1))


def pair_sq():
    """Symmetrized pair moment sum_{i != j} x_i^2 x_j^2 / (n(n-1))."""

    def fn(x):
        n = x.shape[1]
        s2 = np.sum(x**2, axis=1)
        s4 = np.sum(x**4, axis=1)
        return (s2**2 - s4) / (n * (n - 1))

    return Functional("x1sq_x2sq", 4.0, fn)


def norm_sq():
    return Functional("norm2_sq", 2.0, lambda x: np.sum(x**2, axis=1))


def norm_sq_sq():
    return Functional("norm2_4", 4.0, lambda x: np.sum(x**2, axis=1) ** 2)


def abs_pow_sum(xi):
    """sum_i |x_i|^xi, i.e. the xi-th power of the l_xi norm."""
    xi = float(xi)
    return Functional(f"normpow{xi:g}", xi, lambda x: np.sum(np.abs(x) ** xi, axis=1))


def norm_sq_times_abs_pow(xi):
    xi = float(xi)

    def fn(x):
        return np.sum(x**2, axis=1) * np.sum(np.abs(x) ** xi, axis=1)

    return Functional(f"norm2_sq*normpow{xi:g}", 2.0 + xi, fn)


def pair_ratio(a, xi):
    """The pair sum sum_{i<j} (|x_i|^xi x_i^a - |x_j|^xi x_j^a)/(x_i^a - x_j^a).

    Evaluated through its polynomial form (xi must be a nonnegative even
    integer), so coincidence points need no special handling.
    """
    xi = int(xi)
    if xi < 0 or xi % 2:
        raise ValueError("pair_ratio needs even xi >= 0")

    def fn(x):
        n = x.shape[1]
        iu, ju = np.triu_indices(n, k=1)
        if a == 1:
            u, v = x[:, iu], x[:, ju]
            total = np.zeros(x.shape[0])
            for m in range(xi + 1):
                total += np.sum(u**m * v ** (xi - m), axis=1)
            return total
        if a == 2:
            u, v = x[:, iu] ** 2, x[:, ju] ** 2
            mm = xi // 2 + 1
            total = np.zeros(x.shape[0])
            for m in range(mm):
                total += np.sum(u**m * v ** (mm - 1 - m), axis=1)
            return total
        raise ValueError("pair_ratio supports a in {1, 2}")

    return Functional(f"pair_ratio_a{a}_xi{xi}", float(xi), fn)


def p_norm_power_times(p, l, base):
    """||x||_p^l * base(x), used for the homogeneous-moment closed-form checks."""

    def fn(x):
        return np.sum(np.abs(x) ** p, axis=1) ** (l / p) * base.fn(x)

    return Functional(f"pnorm{p:g}^{l:g}*{base.name}", l + base.degree, fn)


def product_of(f1, f2):
    """Pointwise product of two functionals."""
    return Functional(f"{f1.name}*{f2.name}", f1.degree + f2.degree,
                      lambda x: f1.fn(x) * f2.fn(x))


_SIMPLE = {
    "one": one,
    "x1_sq": lambda: coord_pow(2),
    "x1_pow4": lambda: coord_pow(4),
    "x1_pow6": lambda: coord_pow(6),
    "x1_pow8": lambda: coord_pow(8),
    "x1sq_x2sq": pair_sq,
    "norm2_sq": norm_sq,
    "norm2_4": norm_sq_sq,
    "norm4_4": lambda: abs_pow_sum(4),
}


def resolve_functional(fid, p=None):
    """Resolve a registered functional id; ':'-parameterized ids carry arguments.

    Examples: "one", "x1_sq", "x1sq_x2sq", "normpow:4", "norm2_sq*normpow:6",
    "pair_ratio:2:2".
    """
    if isinstance(fid, Functional):
        return fid
    if fid in _SIMPLE:
        return _SIMPLE[fid]()
    parts = fid.split(":")
    if parts[0] == "normpow":
        return abs_pow_sum(float(parts[1]))
    if parts[0] == "norm2_sq*normpow":
        return norm_sq_times_abs_pow(float(parts[1]))
    if parts[0] == "pair_ratio":
        return pair_ratio(int(parts[1]), int(parts[2]))
    raise ValueError(f"unknown functional id {fid!r}")


# ---------------------------------------------------------------------------
# estimates

@dataclass(frozen=True)
class MomentEstimate:
    """A moment ratio M_p(F)/M_p(1) with its error bar.

    For quadrature and closed-form methods std_err is the certified absolute
    error bound, not a statistical error.
    """

    value: float
    std_err: float
    n_samples: int
    ess: float
    method: str
    low_confidence: bool = False


def estimate_moment(batch, functional, p=None):
    """Batch-means Monte Carlo estimate of a functional over a SampleBatch."""
    func = resolve_functional(functional, p)
    values = func(batch.points)
    mean, se, eff = batch_means(values)
    return MomentEstimate(
        value=mean,
        std_err=se,
        n_samples=len(values),
        ess=eff,
        method="mc",
        low_confidence=eff < 100,
    )


def closed_form_moment(d, s, l, p):
    """Gamma((d+l+s)/p) / Gamma((d+s)/p), the homogeneous moment transfer factor."""
    if math.isinf(p):
        raise ValueError("closed_form_moment needs finite p")
    if not (s > -d and l + s > -d):
        raise ValueError("closed_form_moment needs s > -d and l + s > -d")
    return math.exp(log_gamma((d + l + s) / p) - log_gamma((d + s) / p))


# ---------------------------------------------------------------------------
# deterministic quadrature oracle (n <= 3)

_LEVELS = ((2, 6), (3, 10), (4, 14), (5, 18), (6, 24), (7, 30))
_MAX_NODES_PER_CHUNK = 2_000_000


def _panel_nodes(level, order):
    """Gauss-Legendre nodes/weights on [0,1] over dyadic panels packed toward
    both endpoints."""
    breaks = [0.0] + [2.0**-k for k in range(level, 0, -1)]
    breaks += [1.0 - 2.0**-k for k in range(level - 1, 0, -1)] + [1.0]
    breaks = np.array(sorted(set(breaks)))
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (base_x + 1.0))
        weights.append(half * base_w)
    return np.concatenate(nodes), np.concatenate(weights)


def _truncation_radius(params, p, max_degree):
    """Solve R^p = q log R + 40 for the tail cutoff, enlarged until the
    incomplete-gamma tail bound is valid."""
    q = params.d + max_degree
    r = 2.0
    for _ in range(200):
        r_new = (q * math.log(max(r, 1.5)) + 40.0) ** (1.0 / p)
        if abs(r_new - r) < 1e-12 * r:
            break
        r = r_new
    alpha_max = (params.d + max_degree) / p
    r = max(r, (2.0 * alpha_max + 10.0) ** (1.0 / p))
    return r


def _tail_bound_rel(params, p, deg, r):
    """Relative tail mass of a degree-deg moment beyond ||x||_p > r:
    Q((d+deg)/p, r^p) bounded by the standard incomplete-gamma inequality."""
    alpha = (params.d + deg) / p
    z = r**p
    log_q = (alpha - 1.0) * math.log(z) - z + math.log(2.0) - log_gamma(alpha)
    return math.exp(min(log_q, 0.0))


def _sector_sums(params, p, funcs, level, order, shift, radius, signed):
    """Accumulate integral sums of [1, funcs...] over the ordered sector."""
    n = params.n
    nodes, weights = _panel_nodes(level, order)
    m = nodes.size
    totals = np.zeros(len(funcs) + 1)
    max_log = -np.inf
    block = max(1, _MAX_NODES_PER_CHUNK // max(1, m ** (n - 1)))
    for start in range(0, m, block):
        sl = slice(start, min(start + block, m))
        axes_nodes = [nodes] * (n - 1) + [nodes[sl]]
        axes_w = [weights] * (n - 1) + [weights[sl]]
        grids = np.meshgrid(*axes_nodes, indexing="ij")
        u = np.stack([g.reshape(-1) for g in grids], axis=-1)
        wgrids = np.meshgrid(*axes_w, indexing="ij")
        w = np.ones(u.shape[0])
        for g in wgrids:
            w = w * g.reshape(-1)
        # x_i = scale * prod_{k >= i} u_k keeps the coordinates ordered.
        cp = np.cumprod(u[:, ::-1], axis=1)[:, ::-1]
        if signed:
            x = 2.0 * radius * cp - radius
            jac = (2.0 * radius) ** n
        else:
            x = radius * cp
            jac = radius**n
        for k in range(1, n):
            w = w * u[:, k] ** k
        logf = density.log_f_p(params, p, x)
        if np.ndim(logf) == 0:
            logf = np.array([logf])
        max_log = max(max_log, float(np.max(logf)))
        # the cap only matters in the shift pre-pass; real passes assert the
        # peak stays far below it
        vals = w * jac * np.exp(np.minimum(logf - shift, 700.0))
        totals[0] += vals.sum()
        for i, f in enumerate(funcs):
            totals[i + 1] += float(np.dot(vals, f.fn(x)))
    return totals, max_log


def quadrature_moments(params, p, functionals, abs_tol=1e-8, rel_tol=1e-10, max_levels=None):
    """Deterministic moment ratios M_p(F)/M_p(1) for several functionals at once.

    Integrates the ordered sector (positive for even a, signed for odd a) with
    panel-refined Gauss-Legendre rules, escalating refinement until successive
    levels agree within tolerance; raises OracleFailure otherwise.
    """
    n = params.n
    if n > 3:
        raise ValueError("quadrature oracle is limited to n <= 3")
    funcs = [resolve_functional(f, p) for f in functionals]
    signed = params.a % 2 == 1
    if signed and params.c % 2 == 1:
        raise OracleFailure("odd-a ensembles need even c for smooth quadrature")
    if signed and not math.isinf(p) and p % 2 != 0:
        raise OracleFailure("odd-a ensembles need even (or infinite) p")
    max_degree = max([f.degree for f in funcs], default=0.0)
    if math.isinf(p):
        radius = 1.0
        tail = {f.name: 0.0 for f in funcs}
    else:
        radius = _truncation_radius(params, p, max_degree)
        tail = {f.name: _tail_bound_rel(params, p, f.degree, radius)
                + _tail_bound_rel(params, p, 0.0, radius) for f in funcs}

    # cheap pre-pass fixes the log-domain shift
    _, shift = _sector_sums(params, p, [], 1, 4, 0.0, radius, signed)
    shift += 2.0

    levels = _LEVELS if max_levels is None else _LEVELS[:max_levels]
    prev = None
    last_err = None
    nodes_used = 0
    for level, order in levels:
        totals, max_log = _sector_sums(params, p, funcs, level, order, shift, radius, signed)
        if max_log - shift > 600.0:
            raise OracleFailure("log-domain shift underestimated the integrand peak")
        if totals[0] <= 0.0:
            raise OracleFailure("vanishing normalization integral")
        ratios = totals[1:] / totals[0]
        nodes_used = ((2 * level * order)) ** n
        if prev is not None:
            deltas = np.abs(ratios - prev)
            ok = all(
                dlt <= 0.5 * max(abs_tol, rel_tol * abs(r))
                for dlt, r in zip(deltas, ratios)
            )
            last_err = deltas
            if ok:
                out = {}
                for f, r, dlt in zip(funcs, ratios, deltas):
                    bound = float(dlt) + tail.get(f.name, 0.0) * (1.0 + abs(r))
                    out[f.name] = MomentEstimate(
                        value=float(r),
                        std_err=bound,
                        n_samples=nodes_used,
                        ess=float(nodes_used),
                        method="quadrature",
                    )
                return out
        prev = ratios
    raise OracleFailure(
        f"quadrature did not reach tol={abs_tol:g} at max refinement (last delta {last_err})"
    )


def quadrature_moment(params, p, functional, abs_tol=1e-8, rel_tol=1e-10):
    """Single-functional wrapper around quadrature_moments."""
    func = resolve_functional(functional, p)
    return quadrature_moments(params, p, [func], abs_tol=abs_tol, rel_tol=rel_tol)[func.name]


# ---------------------------------------------------------------------------
# thin-shell pipelines

@dataclass(frozen=True)
class SigmaEstimate:
    """Thin-shell statistic of a Schatten ball: sigma^2 = d Var(v)/E(v)^2 for
    v = ||T||_2^2 under the uniform measure."""

    sigma_sq: float
    var_norm_sq: float
    mean_norm_sq: float
    d: int
    std_err: float
    mean_over_dim: float
    ess: float
    method: str


def _sigma_from_values(v, d, method):
    joint = np.stack([v, v**2], axis=1)
    means, cov, eff = batch_means_cov(joint)
    m, m2 = means
    var = m2 - m * m
    sigma_sq = d * var / m**2
    # delta method on (m, m2) -> d*(m2/m^2 - 1)
    grad = np.array([-2.0 * d * m2 / m**3, d / m**2])
    se = float(np.sqrt(max(0.0, grad @ cov @ grad)))
    return SigmaEstimate(
        sigma_sq=float(sigma_sq),
        var_norm_sq=float(var),
        mean_norm_sq=float(m),
        d=int(d),
        std_err=se,
        mean_over_dim=float(m / d),
        ess=eff,
        method=method,
    )


def sigma_pipeline(spec, sampler="auto", budget=100_000, seed=0, mcmc_kwargs=None):
    """Estimate the thin-shell statistic of K_{p,E} from the singular-value law.

    sampler: "auto" (exact at p=2, MCMC otherwise, then the radial pushforward)
    or "hit_and_run" for the direct matrix walk.
    """
    from . import samplers  # local import avoids a module cycle

    if sampler == "hit_and_run":
        mats = samplers.matrix_hit_and_run(spec, n_samples=budget, seed=seed)
        v = samplers.frobenius_sq_batch(spec, mats.points)
        return _sigma_from_values(v, spec.dim, "hit_and_run")

    mapping = ensemble_of(spec)
    params = mapping.params
    gas = samplers.gas_sample(params, spec.p, budget, seed, mcmc_kwargs=mcmc_kwargs)
    scale = 1.0 if math.isinf(spec.p) else 2.0 ** (-1.0 / spec.p)
    if mapping.multiplicity == 1:
        scale = 1.0
    ball = samplers.ball_pushforward(gas, params, spec.p, seed=seed + 1, norm_scale=scale)
    v = mapping.multiplicity * np.sum(ball.points**2, axis=1)
    return _sigma_from_values(v, spec.dim, gas.diagnostics.get("method", "mc"))


@dataclass(frozen=True)
class VarMpEstimate:
    """Var_{M_p}(||x||_2^2) split into its symmetrized moment terms.

    combination = term_quartic + term_cross - term_square, estimated jointly
    on shared draws with a covariance-aware standard error.
    """

    term_quartic: float
    term_cross: float
    term_square: float
    combination: float
    std_err: float
    cross_gap: float
    cross_gap_se: float
    coord_sq_mean: float
    coord_sq_se: float
    quart_ratio: float
    quart_ratio_se: float
    ess: float
    n: int

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def var_mp_pipeline(params, p, budget=100_000, seed=0, mcmc_kwargs=None, gas=None):
    """Estimate Var_{M_p}(||x||_2^2) and its decomposition from gas draws."""
    from . import samplers

    if gas is None:
        gas = samplers.gas_sample(params, p, budget, seed, mcmc_kwargs=mcmc_kwargs)
    x = gas.points
    n = params.n
    t4 = np.mean(x**4, axis=1)
    m2 = np.mean(x**2, axis=1)
    if n > 1:
        s2 = np.sum(x**2, axis=1)
        cross = (s2**2 - np.sum(x**4, axis=1)) / (n * (n - 1))
    else:
        cross = np.zeros(len(x))
    joint = np.stack([t4, cross, m2], axis=1)
    means, cov, eff = batch_means_cov(joint)
    e4, ec, e2 = means

    term_quartic = n * e4
    term_cross = n * (n - 1) * ec
    term_square = n**2 * e2**2
    combination = term_quartic + term_cross - term_square
    grad = np.array([n, n * (n - 1), -2.0 * n**2 * e2])
    se = float(np.sqrt(max(0.0, grad @ cov @ grad)))

    gap_grad = np.array([0.0, 1.0, -2.0 * e2])
    gap_se = float(np.sqrt(max(0.0, gap_grad @ cov @ gap_grad)))

    r_grad = np.array([1.0 / e2**2, 0.0, -2.0 * e4 / e2**3])
    r_se = float(np.sqrt(max(0.0, r_grad @ cov @ r_grad)))

    return VarMpEstimate(
        term_quartic=float(term_quartic),
        term_cross=float(term_cross),
        term_square=float(term_square),
        combination=float(combination),
        std_err=se,
        cross_gap=float(ec - e2**2),
        cross_gap_se=gap_se,
        coord_sq_mean=float(e2),
        coord_sq_se=float(np.sqrt(max(0.0, cov[2, 2]))),
        quart_ratio=float(e4 / e2**2),
        quart_ratio_se=r_se,
        ess=eff,
        n=n,
    )
