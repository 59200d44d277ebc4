"""Random generation targeting the gas densities and the Schatten balls.

Three routes: adaptive random-walk Metropolis for arbitrary parameters, exact
tridiagonal ensemble samplers for the Gaussian (p=2) weight, and a radial
pushforward converting weighted gas draws into the singular-value law of a
uniform ball sample.  A hit-and-run walk on the matrix subspace itself gives
an independent route to the same uniform measure.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .density import log_f_p
from .util import batch_means

__all__ = [
    "SampleBatch",
    "ChainState",
    "SamplerUnavailable",
    "mcmc_sample",
    "exact_p2_sample",
    "gas_sample",
    "ball_pushforward",
    "matrix_hit_and_run",
    "exact_p2_matrix_sample",
    "coords_to_entries",
    "entries_abs_sq",
    "frobenius_sq_batch",
    "batch_singular_values",
    "matrices",
]


class SamplerUnavailable(RuntimeError):
    """No exact sampler exists for the requested parameters."""


@dataclass
class SampleBatch:
    """Unweighted draws (one row per point) plus sampler diagnostics."""

    points: np.ndarray
    weight_tag: str = "ones"
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return self.points.shape[0]


@dataclass
class ChainState:
    """Final state of one Metropolis chain."""

    position: np.ndarray
    log_density: float
    step_sizes: np.ndarray
    accepted: np.ndarray
    proposed: np.ndarray
    rng_stream: int


# ---------------------------------------------------------------------------
# random-walk Metropolis for the gas densities

_ADAPT_WINDOW = 50
_TARGET_ACCEPT = 0.44


def _init_point(params, p, rng):
    n = params.n
    if math.isinf(p):
        return rng.uniform(-0.95, 0.95, n)
    scale = (params.d / (n * p)) ** (1.0 / p)
    return rng.standard_normal(n) * scale


def _run_chain(params, p, keep, burn_in, thinning, seed_seq, stream_id, validate):
    rng = np.random.default_rng(seed_seq)
    n = params.n
    a, b, c = params.a, params.b, params.c
    inf_p = math.isinf(p)
    x = _init_point(params, p, rng)
    logf = float(log_f_p(params, p, x))
    while not np.isfinite(logf):
        x = _init_point(params, p, rng)
        logf = float(log_f_p(params, p, x))
    xa = x.copy() if a == 1 else x**a
    if inf_p:
        steps = np.full(n, 0.25)
    else:
        steps = np.full(n, 0.5 * (params.d / (n * p)) ** (1.0 / p))
    acc_window = np.zeros(n)
    prop_window = np.zeros(n)
    accepted = np.zeros(n)
    proposed = np.zeros(n)
    out = np.empty((keep, n))
    kept = 0
    total_sweeps = burn_in + keep * thinning
    with np.errstate(divide="ignore", invalid="ignore"):
        for sweep in range(total_sweeps):
            adapting = sweep < burn_in
            zs = rng.standard_normal(n)
            us = rng.random(n)
            for i in range(n):
                prop = x[i] + steps[i] * zs[i]
                if adapting:
                    prop_window[i] += 1
                else:
                    proposed[i] += 1
                if inf_p and abs(prop) > 1.0:
                    continue
                prop_a = prop if a == 1 else prop**a
                ratio = (prop_a - xa) / (xa[i] - xa)
                ratio[i] = 1.0
                delta = b * float(np.sum(np.log(np.abs(ratio))))
                if c:
                    delta += c * (math.log(abs(prop / x[i])) if prop != 0.0 else -math.inf)
                if not inf_p:
                    delta -= abs(prop) ** p - abs(x[i]) ** p
                if delta >= 0.0 or us[i] < math.exp(delta):
                    x[i] = prop
                    xa[i] = prop_a
                    logf += delta
                    if adapting:
                        acc_window[i] += 1
                    else:
                        accepted[i] += 1
            if adapting and (sweep + 1) % _ADAPT_WINDOW == 0:
                rates = acc_window / np.maximum(prop_window, 1.0)
                steps *= np.exp(0.6 * (rates - _TARGET_ACCEPT))
                acc_window[:] = 0.0
                prop_window[:] = 0.0
            if not adapting and (sweep - burn_in) % thinning == 0 and kept < keep:
                out[kept] = x
                kept += 1
    if validate:
        fresh = float(log_f_p(params, p, x))
        if not math.isclose(fresh, logf, rel_tol=1e-8, abs_tol=1e-8):
            raise AssertionError(f"cached log density drifted: {logf} vs {fresh}")
    state = ChainState(
        position=x.copy(),
        log_density=float(log_f_p(params, p, x)),
        step_sizes=steps,
        accepted=accepted,
        proposed=proposed,
        rng_stream=stream_id,
    )
    return out, state


def mcmc_sample(params, p, n_chains=4, n_samples=20_000, seed=0, burn_in=None,
                thinning=1, n_workers=1, validate=False):
    """Per-coordinate random-walk Metropolis draws from the weighted gas density.

    Step sizes adapt toward 0.44 acceptance during burn-in only and freeze
    afterwards, so the retained path is a fixed-kernel Markov chain.  Chains
    get independent spawned seed streams and merge in chain order, making the
    result a pure function of (inputs, seed).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if burn_in is None:
        burn_in = 1000 + 60 * params.n
    seqs = np.random.SeedSequence(seed).spawn(n_chains)
    base = n_samples // n_chains
    rem = n_samples % n_chains
    keeps = [base + (1 if c < rem else 0) for c in range(n_chains)]
    jobs = [
        (params, p, keeps[c], burn_in, thinning, seqs[c], c, validate)
        for c in range(n_chains)
        if keeps[c] > 0
    ]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_chain_job, jobs))
    else:
        results = [_chain_job(j) for j in jobs]
    points = np.concatenate([r[0] for r in results], axis=0)
    states = [r[1] for r in results]
    acc = np.mean(
        [s.accepted / np.maximum(s.proposed, 1.0) for s in states], axis=0
    )
    ess_total = 0.0
    for r in results:
        v = np.sum(r[0] ** 2, axis=1)
        ess_total += batch_means(v)[2]
    return SampleBatch(
        points=points,
        diagnostics={
            "method": "mcmc",
            "acceptance": acc,
            "chains": len(jobs),
            "burn_in": burn_in,
            "thinning": thinning,
            "ess_norm2sq": ess_total,
            "final_states": states,
        },
    )


def _chain_job(args):
    return _run_chain(*args)


# ---------------------------------------------------------------------------
# exact samplers at the Gaussian weight

_EIG_CHUNK = 4096


def exact_p2_sample(params, n_samples, seed=0):
    """Independent draws from the p=2 gas via tridiagonal ensemble models.

    a=1 (c=0): rescaled eigenvalues of the tridiagonal Gaussian beta model.
    a=2 (any c): signed square roots of rescaled tridiagonal Laguerre
    eigenvalues; the Laguerre shape is chosen so the substitution y = x^2
    reproduces the gas exactly.  Anything else raises SamplerUnavailable.
    """
    n, a, b, c = params.n, params.a, params.b, params.c
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if a == 1 and c == 0:
        sampler = _hermite_chunk
    elif a == 2:
        sampler = _laguerre_chunk
    else:
        raise SamplerUnavailable(f"no exact p=2 sampler for (a,b,c)=({a},{b},{c})")
    chunks = []
    remaining = n_samples
    while remaining > 0:
        m = min(_EIG_CHUNK, remaining)
        chunks.append(sampler(params, m, rng))
        remaining -= m
    points = np.concatenate(chunks, axis=0)
    v = np.sum(points**2, axis=1)
    return SampleBatch(
        points=points,
        diagnostics={
            "method": "exact-p2",
            "chains": 1,
            "ess_norm2sq": batch_means(v)[2],
        },
    )


def _hermite_chunk(params, m, rng):
    n, b = params.n, params.b
    mats = np.zeros((m, n, n))
    idx = np.arange(n)
    mats[:, idx, idx] = rng.standard_normal((m, n))
    if n > 1:
        df = b * (n - np.arange(1, n))
        off = np.sqrt(rng.chisquare(df, size=(m, n - 1))) / math.sqrt(2.0)
        j = np.arange(n - 1)
        mats[:, j, j + 1] = off
        mats[:, j + 1, j] = off
    lam = np.linalg.eigvalsh(mats)
    return lam / math.sqrt(2.0)


def _laguerre_chunk(params, m, rng):
    n, b, c = params.n, params.b, params.c
    two_shape = b * (n - 1) + c + 1  # = 2 * Laguerre shape parameter
    bid = np.zeros((m, n, n))
    idx = np.arange(n)
    diag_df = two_shape - b * idx
    bid[:, idx, idx] = np.sqrt(rng.chisquare(diag_df, size=(m, n)))
    if n > 1:
        j = np.arange(n - 1)
        sub_df = b * (n - 1 - j)
        bid[:, j + 1, j] = np.sqrt(rng.chisquare(sub_df, size=(m, n - 1)))
    lag = bid @ bid.transpose(0, 2, 1)
    y = np.linalg.eigvalsh(lag) / 2.0
    signs = rng.integers(0, 2, size=y.shape) * 2.0 - 1.0
    return signs * np.sqrt(np.maximum(y, 0.0))


def gas_sample(params, p, budget, seed, mcmc_kwargs=None):
    """Route to the exact sampler at p=2 when available, else to Metropolis."""
    if p == 2:
        try:
            return exact_p2_sample(params, budget, seed)
        except SamplerUnavailable:
            pass
    kw = dict(mcmc_kwargs or {})
    return mcmc_sample(params, p, n_samples=budget, seed=seed, **kw)


# ---------------------------------------------------------------------------
# radial pushforward onto the ball

def ball_pushforward(gas, params, p, seed=0, norm_scale=1.0):
    """Map weighted gas draws onto the unnormalized-density law on the p-ball.

    Each x goes to norm_scale * u^(1/d) * x / ||x||_p with u uniform, which
    replaces the gas radial law by the ball one while keeping the angular
    (and sign) structure.  At p = inf the gas is already ball-restricted and
    the map is the identity.
    """
    if math.isinf(p):
        if np.max(np.abs(gas.points)) > 1.0 + 1e-12:
            raise ValueError("p=inf gas contains points outside the unit cube")
        diag = dict(gas.diagnostics)
        diag["pushforward"] = "identity (p=inf)"
        return SampleBatch(points=gas.points, diagnostics=diag)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    x = gas.points
    norms = np.sum(np.abs(x) ** p, axis=1) ** (1.0 / p)
    u = rng.random(len(x))
    ok = norms > 0.0
    radius = u[ok] ** (1.0 / params.d)
    pts = norm_scale * x[ok] * (radius / norms[ok])[:, None]
    diag = dict(gas.diagnostics)
    diag["pushforward"] = "radial"
    diag["skipped_zero_points"] = int(np.sum(~ok))
    return SampleBatch(points=pts, diagnostics=diag)


# ---------------------------------------------------------------------------
# matrix subspace coordinates and batched spectra

def coords_to_entries(spec, coords):
    """Expand real coordinate rows (B, dim) into matrix entries.

    Full H returns an (B, n, n, 4) component array, everything else a real or
    complex (B, n, n) array.
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    bsz = coords.shape[0]
    n = spec.n
    if coords.shape[1] != spec.dim:
        raise ValueError(f"expected {spec.dim} coordinates, got {coords.shape[1]}")
    iu, ju = np.triu_indices(n, k=1)
    if spec.subspace == "Full":
        if spec.field == "R":
            return coords.reshape(bsz, n, n)
        if spec.field == "C":
            half = n * n
            return (coords[:, :half] + 1j * coords[:, half:]).reshape(bsz, n, n)
        return coords.reshape(bsz, n, n, 4)
    if spec.subspace == "SelfAdjoint":
        if spec.field == "R":
            out = np.zeros((bsz, n, n))
            out[:, np.arange(n), np.arange(n)] = coords[:, :n]
            out[:, iu, ju] = coords[:, n:]
            out[:, ju, iu] = coords[:, n:]
            return out
        if spec.field == "C":
            out = np.zeros((bsz, n, n), dtype=complex)
            out[:, np.arange(n), np.arange(n)] = coords[:, :n]
            k = n * (n - 1) // 2
            z = coords[:, n : n + k] + 1j * coords[:, n + k :]
            out[:, iu, ju] = z
            out[:, ju, iu] = z.conj()
            return out
        out = np.zeros((bsz, n, n, 4))
        out[:, np.arange(n), np.arange(n), 0] = coords[:, :n]
        k = n * (n - 1) // 2
        quat = coords[:, n:].reshape(bsz, k, 4)
        out[:, iu, ju, :] = quat
        conj = quat.copy()
        conj[..., 1:] *= -1.0
        out[:, ju, iu, :] = conj
        return out
    if spec.subspace == "AntiSymHermitian":
        out = np.zeros((bsz, n, n))
        out[:, iu, ju] = coords
        out[:, ju, iu] = -coords
        return 1j * out
    # ComplexSymmetric
    out = np.zeros((bsz, n, n), dtype=complex)
    diag = coords[:, :n] + 1j * coords[:, n : 2 * n]
    out[:, np.arange(n), np.arange(n)] = diag
    k = n * (n - 1) // 2
    z = coords[:, 2 * n : 2 * n + k] + 1j * coords[:, 2 * n + k :]
    out[:, iu, ju] = z
    out[:, ju, iu] = z
    return out


def entries_abs_sq(spec, entries):
    """Entrywise |a_ij|^2 for a batched entries array."""
    if spec.field == "H" and entries.ndim == 4:
        return np.sum(entries**2, axis=-1)
    if np.iscomplexobj(entries):
        return np.abs(entries) ** 2
    return entries**2


def frobenius_sq_batch(spec, coords):
    """||T||_2^2 per coordinate row."""
    entries = coords_to_entries(spec, coords)
    return entries_abs_sq(spec, entries).sum(axis=(1, 2))


def _embed_batch(entries4):
    a = entries4[..., 0] + 1j * entries4[..., 1]
    b = entries4[..., 2] + 1j * entries4[..., 3]
    top = np.concatenate([a, b], axis=2)
    bot = np.concatenate([-b.conj(), a.conj()], axis=2)
    return np.concatenate([top, bot], axis=1)


def batch_singular_values(spec, coords):
    """Singular values (non-increasing) for each coordinate row.

    Uses the library linear-algebra backend; the in-package Jacobi SVD is the
    reference implementation and the two are cross-checked in the test suite.
    """
    entries = coords_to_entries(spec, coords)
    if spec.field == "H":
        sv = np.linalg.svd(_embed_batch(entries), compute_uv=False)
        return sv[:, 0::2]
    return np.linalg.svd(entries, compute_uv=False)


def _schatten_norms(spec, coords):
    sv = batch_singular_values(spec, coords)
    if math.isinf(spec.p):
        return sv[:, 0]
    return np.sum(sv**spec.p, axis=1) ** (1.0 / spec.p)


# ---------------------------------------------------------------------------
# hit-and-run on the Schatten ball

_BISECT_STEPS = 60


def matrix_hit_and_run(spec, n_samples, seed=0, burn_in=300, n_chains=32, thinning=1):
    """Hit-and-run walk over the uniform measure on K_{p,E}.

    Chains start at the origin and move along uniform chord points; chord
    endpoints come from 60 bisection steps on the Schatten norm along the
    direction.  Chains carry independent seed streams and are merged in chain
    order; the returned points are coordinate rows (see coords_to_entries).
    """
    if spec.n > 12:
        raise ValueError("hit-and-run is limited to n <= 12")
    dim = spec.dim
    n_chains = min(n_chains, n_samples)
    seqs = np.random.SeedSequence(seed).spawn(n_chains)
    rngs = [np.random.default_rng(s) for s in seqs]
    x = np.zeros((n_chains, dim))
    keep_each = -(-n_samples // n_chains)
    out = np.empty((n_chains, keep_each, dim))
    kept = 0
    accepted_steps = 0
    for sweep in range(burn_in + keep_each * thinning):
        dirs = np.stack([r.standard_normal(dim) for r in rngs])
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        nrm_dir = _schatten_norms(spec, dirs)
        # ||x + t v|| >= |t| ||v|| - 1, so the chord lies within |t| <= 2/||v||
        t_hi = 2.0 / nrm_dir + 1e-9
        lo_plus = _bisect_boundary(spec, x, dirs, t_hi)
        lo_minus = _bisect_boundary(spec, x, -dirs, t_hi)
        u = np.array([r.random() for r in rngs])
        t = -lo_minus + u * (lo_minus + lo_plus)
        x = x + t[:, None] * dirs
        accepted_steps += 1
        if sweep >= burn_in and (sweep - burn_in) % thinning == 0 and kept < keep_each:
            out[:, kept] = x
            kept += 1
    points = out.reshape(n_chains * keep_each, dim)[:n_samples]
    v = frobenius_sq_batch(spec, points)
    return SampleBatch(
        points=points,
        diagnostics={
            "method": "hit_and_run",
            "chains": n_chains,
            "burn_in": burn_in,
            "thinning": thinning,
            "ess_norm2sq": batch_means(v)[2],
        },
    )


def _bisect_boundary(spec, x, dirs, t_hi):
    """Inner bound on the boundary crossing along +dirs from inside points."""
    lo = np.zeros(x.shape[0])
    hi = t_hi.copy()
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        inside = _schatten_norms(spec, x + mid[:, None] * dirs) <= 1.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return lo


def exact_p2_matrix_sample(spec, n_samples, seed=0):
    """Uniform draws from the Frobenius-norm ball (p=2, Full subspaces only).

    The flat coordinates are a Euclidean isometry there, so scaled Gaussian
    directions with a beta-law radius sample the ball exactly.
    """
    if spec.subspace != "Full" or spec.p != 2:
        raise SamplerUnavailable("exact ball sampling needs p=2 on a Full subspace")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    dim = spec.dim
    g = rng.standard_normal((n_samples, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(n_samples) ** (1.0 / dim)
    pts = g * r[:, None]
    v = frobenius_sq_batch(spec, pts)
    return SampleBatch(
        points=pts,
        diagnostics={"method": "exact-ball", "chains": 1, "ess_norm2sq": batch_means(v)[2]},
    )


def matrices(spec, batch, limit=None):
    """Materialize MatrixSample objects from a coordinate batch."""
    from .matrixlab import MatrixSample

    entries = coords_to_entries(spec, batch.points if isinstance(batch, SampleBatch) else batch)
    if limit is not None:
        entries = entries[:limit]
    field = spec.field if spec.subspace != "AntiSymHermitian" else "C"
    return [MatrixSample(field, e) for e in entries]
