"""Matrices over R, C and H: small-scale SVD, Schatten norms and the exact
fourth-moment identities between entries and singular values.

Quaternion matrices are stored as (n, n, 4) component arrays and reduced to a
2n x 2n complex matrix for spectral work; the embedded singular values come in
equal pairs and are returned once each.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import Quaternion

__all__ = [
    "MatrixSample",
    "SvdResult",
    "EntryIdentityTerms",
    "JacobiConvergenceError",
    "svd",
    "schatten_norm",
    "entry_identity_terms",
    "symmetry_transform",
    "random_matrix",
    "random_antisym_hermitian",
]


class JacobiConvergenceError(RuntimeError):
    """Raised when the one-sided Jacobi iteration hits its sweep cap."""


@dataclass(frozen=True)
class MatrixSample:
    """An n x n matrix over R, C or H (H as an (n, n, 4) component array)."""

    field: str
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries)
        if self.field == "H":
            if e.ndim != 3 or e.shape[0] != e.shape[1] or e.shape[2] != 4:
                raise ValueError("quaternion matrix needs shape (n, n, 4)")
        elif e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(e)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "entries", e)

    @property
    def n(self):
        return self.entries.shape[0]

    def entry(self, i, j):
        """Entry (i, j) as a float, complex, or Quaternion."""
        if self.field == "H":
            return Quaternion(*self.entries[i, j])
        return self.entries[i, j]

    def frobenius_sq(self):
        return float(np.sum(_abs_sq(self)))


@dataclass(frozen=True)
class SvdResult:
    """Non-increasing singular values of a MatrixSample."""

    singular_values: np.ndarray


# ---------------------------------------------------------------------------
# quaternion component helpers

def _qmul(p, q):
    """Hamilton product of component arrays (..., 4), broadcasting."""
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def _qconj(p):
    out = p.copy()
    out[..., 1:] *= -1.0
    return out


def _qmatmul(p, q):
    """Quaternion matrix product of (n, n, 4) arrays in the given order."""
    terms = _qmul(p[:, :, None, :], q[None, :, :, :])
    return terms.sum(axis=1)


def _embed(entries):
    """Complex adjoint embedding of a quaternion matrix: T = A + B j maps to
    [[A, B], [-conj(B), conj(A)]]."""
    a = entries[..., 0] + 1j * entries[..., 1]
    b = entries[..., 2] + 1j * entries[..., 3]
    return np.block([[a, b], [-b.conj(), a.conj()]])


def _abs_sq(sample):
    if sample.field == "H":
        return np.sum(sample.entries**2, axis=-1)
    if sample.field == "C":
        return np.abs(sample.entries) ** 2
    return sample.entries**2


# ---------------------------------------------------------------------------
# one-sided Jacobi SVD

def _jacobi_singular_values(mat, tol=1e-13, max_sweeps=64):
    """Singular values via one-sided Jacobi column orthogonalization."""
    a = np.array(mat, dtype=complex if np.iscomplexobj(mat) else float)
    n = a.shape[1]
    for _ in range(max_sweeps):
        converged = True
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci = a[:, i]
                cj = a[:, j]
                alpha = float(np.real(np.vdot(ci, ci)))
                beta = float(np.real(np.vdot(cj, cj)))
                gamma = np.vdot(ci, cj)
                if abs(gamma) ** 2 <= tol * tol * alpha * beta:
                    continue
                converged = False
                g = abs(gamma)
                cj = cj * (np.conjugate(gamma) / g)  # make the pair inner product real positive
                tau = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                new_i = c * ci - s * cj
                new_j = s * ci + c * cj
                a[:, i] = new_i
                a[:, j] = new_j
        if converged:
            break
    else:
        raise JacobiConvergenceError(f"no convergence in {max_sweeps} sweeps")
    sv = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    sv.sort()
    return sv[::-1]


def svd(sample):
    """Singular values of a MatrixSample, non-increasing.

    Quaternion matrices go through the complex adjoint embedding; the doubled
    spectrum is de-duplicated by averaging adjacent pairs.
    """
    if sample.field == "H":
        sv = _jacobi_singular_values(_embed(sample.entries))
        sv = 0.5 * (sv[0::2] + sv[1::2])
    else:
        sv = _jacobi_singular_values(sample.entries)
    return SvdResult(singular_values=sv)


def schatten_norm(sample, p):
    """Schatten p-norm: lp norm of the singular values; p = inf is the largest one."""
    sv = svd(sample).singular_values
    if math.isinf(p):
        return float(sv[0]) if sv.size else 0.0
    return float(np.sum(sv**p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# entry / singular-value identities

@dataclass(frozen=True)
class EntryIdentityTerms:
    """Both sides of the quartic entry identities.

    lhs4 = sum s_i^4 and lhs22 = sum_{i != j} s_i^2 s_j^2 come from the SVD;
    the remaining fields are entry sums.  The quartic cross sum is evaluated
    in the matrix algebra with its factors in fixed order and then projected
    onto the scalar part; quartic_cross_vector records the magnitude of the
    discarded (provably vanishing) non-scalar part.
    """

    lhs4: float
    sum_abs4: float
    row_col_cross: float
    quartic_cross: float
    quartic_cross_vector: float
    lhs22: float
    pair_cross: float
    det_cross: float | None

    def rhs4(self):
        return self.sum_abs4 + self.row_col_cross + self.quartic_cross

    def rhs22(self):
        return self.pair_cross - self.quartic_cross


def entry_identity_terms(sample):
    """Evaluate the fourth-moment identities linking entries and singular values."""
    n = sample.n
    q = _abs_sq(sample)
    total = q.sum()
    row = q.sum(axis=1)
    col = q.sum(axis=0)
    abs4 = float(np.sum(q**2))
    row_col_cross = float(np.sum(row**2 - np.sum(q**2, axis=1)) + np.sum(col**2 - np.sum(q**2, axis=0)))
    pair_cross = float(total**2 - np.sum(row**2) - np.sum(col**2) + abs4)

    # gram = T T^*; the double sum over j, k of a_ij conj(a_lj) a_lk conj(a_ik)
    # factorizes as gram[i, l] * gram[l, i] with the original factor order.
    if sample.field == "H":
        e = sample.entries
        gram = _qmatmul(e, _qconj(e).transpose(1, 0, 2))
        prod = _qmul(gram, gram.transpose(1, 0, 2))
        scal = prod[..., 0]
        vec = np.linalg.norm(prod[..., 1:], axis=-1)
    elif sample.field == "C":
        gram = sample.entries @ sample.entries.conj().T
        prod = gram * gram.T
        scal = prod.real
        vec = np.abs(prod.imag)
    else:
        gram = sample.entries @ sample.entries.T
        scal = gram * gram.T
        vec = np.zeros_like(scal)
    off = ~np.eye(n, dtype=bool)
    qqt = q @ q.T
    quartic = float(scal[off].sum() - qqt[off].sum())
    quartic_vec = float(vec[off].sum())

    sv = svd(sample).singular_values
    s2 = sv**2
    lhs4 = float(np.sum(s2**2))
    lhs22 = float(np.sum(s2) ** 2 - lhs4)

    det_cross = None
    if sample.field in ("R", "C"):
        a = sample.entries
        outer = np.einsum("ij,lk->iljk", a, a)
        minors = outer - outer.transpose(0, 1, 3, 2)
        iu, lu = np.triu_indices(n, k=1)
        sub = minors[iu, lu][:, iu, lu]
        det_cross = float(2.0 * np.sum(np.abs(sub) ** 2))

    return EntryIdentityTerms(
        lhs4=lhs4,
        sum_abs4=abs4,
        row_col_cross=row_col_cross,
        quartic_cross=quartic,
        quartic_cross_vector=quartic_vec,
        lhs22=lhs22,
        pair_cross=pair_cross,
        det_cross=det_cross,
    )


# ---------------------------------------------------------------------------
# norm-preserving transforms

def _rotation_matrix(n, i, j, theta):
    u = np.eye(n)
    c, s = math.cos(theta), math.sin(theta)
    u[i, i] = c
    u[i, j] = s
    u[j, i] = -s
    u[j, j] = c
    return u


def _left_real(sample, u):
    if sample.field == "H":
        return MatrixSample("H", np.einsum("ik,kjc->ijc", u, sample.entries))
    return MatrixSample(sample.field, u @ sample.entries)


def _right_real(sample, u):
    if sample.field == "H":
        return MatrixSample("H", np.einsum("ikc,kj->ijc", sample.entries, u))
    return MatrixSample(sample.field, sample.entries @ u)


def _unit_scalar_array(sample, unit):
    if sample.field == "H":
        if isinstance(unit, Quaternion):
            arr = np.array([unit.w, unit.x, unit.y, unit.z])
        else:
            arr = np.array([float(unit), 0.0, 0.0, 0.0])
        if abs(np.sum(arr**2) - 1.0) > 1e-12:
            raise ValueError("scaling needs a unit scalar")
        return arr
    u = complex(unit) if sample.field == "C" else float(unit)
    if abs(abs(u) - 1.0) > 1e-12:
        raise ValueError("scaling needs a unit scalar")
    return u


def symmetry_transform(sample, kind, **kw):
    """Apply a Schatten-norm-preserving transform.

    kinds: permute_rows/permute_cols (perm), rotate_left/rotate_right
    (i, j, theta), conj_transpose, transpose (R and C only), scale_row/
    scale_col (index, unit scalar; rows scale from the left, columns from
    the right).
    """
    n = sample.n
    if kind == "permute_rows":
        return MatrixSample(sample.field, sample.entries[np.asarray(kw["perm"])])
    if kind == "permute_cols":
        return MatrixSample(sample.field, sample.entries[:, np.asarray(kw["perm"])])
    if kind == "rotate_left":
        return _left_real(sample, _rotation_matrix(n, kw["i"], kw["j"], kw["theta"]))
    if kind == "rotate_right":
        return _right_real(sample, _rotation_matrix(n, kw["i"], kw["j"], kw["theta"]))
    if kind == "conj_transpose":
        if sample.field == "H":
            return MatrixSample("H", _qconj(sample.entries).transpose(1, 0, 2))
        return MatrixSample(sample.field, sample.entries.conj().T)
    if kind == "transpose":
        if sample.field == "H":
            # The plain transpose changes singular values over the quaternions
            # (unlike over R and C), so it is not admitted here.
            raise ValueError("transpose is not norm-preserving over H")
        return MatrixSample(sample.field, sample.entries.T)
    if kind in ("scale_row", "scale_col"):
        unit = _unit_scalar_array(sample, kw["unit"])
        out = sample.entries.copy()
        idx = kw["index"]
        if sample.field == "H":
            if kind == "scale_row":
                out[idx] = _qmul(np.broadcast_to(unit, out[idx].shape), out[idx])
            else:
                out[:, idx] = _qmul(out[:, idx], np.broadcast_to(unit, out[:, idx].shape))
        else:
            if kind == "scale_row":
                out[idx] *= unit
            else:
                out[:, idx] *= unit
        return MatrixSample(sample.field, out)
    raise ValueError(f"unknown transform {kind!r}")


# ---------------------------------------------------------------------------
# random matrices for tests and checks

def random_matrix(field, n, rng):
    """Matrix with independent standard normal real components per entry."""
    if field == "R":
        return MatrixSample("R", rng.standard_normal((n, n)))
    if field == "C":
        return MatrixSample("C", rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    if field == "H":
        return MatrixSample("H", rng.standard_normal((n, n, 4)))
    raise ValueError(f"unknown field {field!r}")


def random_antisym_hermitian(n, rng):
    """Random i * (real antisymmetric) matrix with Gaussian entries."""
    a = rng.standard_normal((n, n))
    a = a - a.T
    return MatrixSample("C", 1j * a)
