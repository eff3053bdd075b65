"""Dense complex matrix kernels and the non-Hermitian eigensolver wrapper.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The heavy
lifting (Hessenberg/QR eigen-decomposition, inversion, SVD) is delegated to
LAPACK through numpy; this module adds the contracts the rest of the package
relies on: validation, canonical eigenvalue ordering, residual certificates
and degeneracy guards.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    DegenerateSpectrum,
    InvalidMatrix,
    NoConvergence,
    NotPositiveDefinite,
    Singular,
)
from .tolerances import DEFAULT

MAX_DIM = 1024

__all__ = [
    "Eigensystem",
    "as_matrix",
    "canonical_order",
    "cond_estimate",
    "dagger",
    "eig",
    "eigvals",
    "fnorm",
    "frob_dist",
    "identity",
    "inverse",
    "is_hermitian",
    "load_matrix",
    "matmul",
    "matpow",
    "matrix_from_dict",
    "matrix_to_dict",
    "positive_sqrt",
    "save_matrix",
    "spectral_distance",
]


def as_matrix(A):
    """Validate ``A`` and return it as a fresh ``complex128`` square array."""
    try:
        M = np.array(A, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f"cannot convert to a complex matrix: {exc}") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] < 1:
        raise InvalidMatrix("matrix dimension must be at least 1")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix("matrix has non-finite entries")
    return M


def identity(n):
    return np.eye(n, dtype=np.complex128)


def dagger(A):
    """Conjugate transpose."""
    return np.conj(np.asarray(A)).T.copy()


def matmul(*mats):
    """Left-to-right product of two or more matrices."""
    if len(mats) < 2:
        raise TypeError("matmul needs at least two operands")
    out = np.asarray(mats[0], dtype=np.complex128)
    for M in mats[1:]:
        out = out @ np.asarray(M, dtype=np.complex128)
    return out


def fnorm(A):
    return float(np.linalg.norm(A))


def frob_dist(A, B):
    return float(np.linalg.norm(np.asarray(A) - np.asarray(B)))


def cond_estimate(A):
    """2-norm condition number; ``inf`` for numerically singular input."""
    s = np.linalg.svd(np.asarray(A, dtype=np.complex128), compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def is_hermitian(A, tol=DEFAULT.herm):
    """True when ``||A - A^+||_F <= tol * max(1, ||A||_F)``."""
    A = np.asarray(A)
    return frob_dist(A, dagger(A)) <= tol * max(1.0, fnorm(A))


def inverse(A, tol=DEFAULT):
    A = as_matrix(A)
    c = cond_estimate(A)
    if not c <= tol.cond_max:
        raise Singular(f"condition estimate {c:.3g} exceeds {tol.cond_max:.3g}")
    return np.linalg.inv(A)


def matpow(A, k):
    """``A**k`` by repeated multiplication; ``matpow(A, 0)`` is the identity."""
    k = int(k)
    if k < 0:
        raise ValueError("matpow needs a nonnegative exponent")
    A = np.asarray(A, dtype=np.complex128)
    out = identity(A.shape[0])
    for _ in range(k):
        out = out @ A
    return out


def positive_sqrt(A, tol=DEFAULT):
    """Unique Hermitian positive-definite square root of a PD matrix.

    Computed from the spectral decomposition ``A = U diag(w) U^+`` as
    ``U diag(sqrt(w)) U^+``.
    """
    A = as_matrix(A)
    if not is_hermitian(A, tol.herm):
        raise NotPositiveDefinite("matrix is not Hermitian")
    Ah = 0.5 * (A + dagger(A))
    w, U = np.linalg.eigh(Ah)
    if w[0] <= tol.pd:
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3g} <= {tol.pd:.3g}")
    B = (U * np.sqrt(w)) @ dagger(U)
    B = 0.5 * (B + dagger(B))
    if frob_dist(B @ B, A) > tol.sqrt * fnorm(A):
        raise NotPositiveDefinite("square root failed its residual check")
    return B


# -- eigen-decomposition ---------------------------------------------------


@dataclass(frozen=True)
class Eigensystem:
    """Eigenvalues with unit-norm right eigenvectors (columns)."""

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    residuals: np.ndarray
    min_gap: float

    @property
    def dim(self):
        return len(self.eigenvalues)


def canonical_order(values, tie_tol=0.0):
    """Indices sorting ``values`` by real part, then imaginary part.

    Real parts closer than ``tie_tol`` (chained) count as equal, so that
    rounding noise cannot flip the order inside a complex-conjugate pair.
    Remaining ties keep the original index order.
    """
    values = np.asarray(values, dtype=np.complex128)
    by_re = sorted(range(len(values)), key=lambda i: (values[i].real, i))
    order, cluster = [], []
    for i in by_re:
        if cluster and values[i].real - values[cluster[-1]].real > tie_tol:
            order.extend(sorted(cluster, key=lambda j: (values[j].imag, j)))
            cluster = []
        cluster.append(i)
    order.extend(sorted(cluster, key=lambda j: (values[j].imag, j)))
    return np.array(order, dtype=int)


def _min_gap(w):
    if len(w) < 2:
        return float("inf")
    d = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _residuals(H, w, V):
    return np.linalg.norm(H @ V - V * w, axis=0)


def _refine(H, w, V, steps=2):
    # inverse iteration with a tiny shift off the computed eigenvalue
    n = H.shape[0]
    shift = max(fnorm(H), 1.0) * 1e-14
    V = V.copy()
    for j in range(n):
        for _ in range(steps):
            try:
                x = np.linalg.solve(H - (w[j] + shift) * np.eye(n), V[:, j])
            except np.linalg.LinAlgError:
                break
            V[:, j] = x / np.linalg.norm(x)
    return V


def eig(H, tol=DEFAULT, require_simple=True):
    """Full eigen-decomposition of a general complex matrix.

    Parameters
    ----------
    H : array_like, shape (N, N)
    tol : Tolerances
    require_simple : bool
        Raise :class:`DegenerateSpectrum` when two eigenvalues are closer than
        ``tol.gap * max(1, spectral radius)``.

    Returns
    -------
    Eigensystem
        Eigenvalues in canonical order with unit-norm right eigenvectors whose
        residuals ``||H v - lambda v||`` are all below ``tol.eig * ||H||_F``.
    """
    H = as_matrix(H)
    n = H.shape[0]
    if n > MAX_DIM:
        raise InvalidMatrix(f"dimension {n} exceeds {MAX_DIM}")
    try:
        w, V = np.linalg.eig(H)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from None
    rho = float(np.max(np.abs(w)))
    order = canonical_order(w, tol.gap * max(1.0, rho))
    w, V = w[order], V[:, order]
    V = V / np.linalg.norm(V, axis=0)
    gap = _min_gap(w)
    if require_simple and gap < tol.gap * max(1.0, rho):
        raise DegenerateSpectrum(
            f"minimum eigenvalue gap {gap:.3g} below {tol.gap:.1g}*max(1, {rho:.3g})"
        )
    bound = tol.eig * fnorm(H)
    res = _residuals(H, w, V)
    if np.any(res > bound):
        V = _refine(H, w, V)
        res = _residuals(H, w, V)
        if np.any(res > bound):
            raise NoConvergence(f"eigen-residual {res.max():.3g} exceeds {bound:.3g}")
    return Eigensystem(eigenvalues=w, right_vectors=V, residuals=res, min_gap=gap)


def eigvals(H, tol=DEFAULT):
    """Eigenvalues in canonical order, no degeneracy guard."""
    H = as_matrix(H)
    w = np.linalg.eigvals(H)
    rho = float(np.max(np.abs(w)))
    return w[canonical_order(w, tol.gap * max(1.0, rho))]


def spectral_distance(a, b):
    """Largest pairwise distance under the optimal one-to-one matching."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError("spectra have different sizes")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# -- matrix file format ----------------------------------------------------


def matrix_to_dict(A):
    """``{"dim": N, "entries": [[re, im], ...]}`` in row-major order."""
    A = np.asarray(A, dtype=np.complex128)
    return {
        "dim": int(A.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_dict(d):
    try:
        n = int(d["dim"])
        entries = np.asarray(d["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"malformed matrix record: {exc}") from None
    if n < 1 or entries.shape != (n * n, 2):
        raise InvalidMatrix(f"expected {n * n} [re, im] pairs for dim {n}")
    return as_matrix((entries[:, 0] + 1j * entries[:, 1]).reshape(n, n))


def save_matrix(path, A):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_dict(A), fh)


def load_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return matrix_from_dict(json.load(fh))
