"""Biorthogonal eigenbases of a non-Hermitian matrix and its adjoint."""

from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedBasis, PairingAmbiguous
from .linalg import as_matrix, dagger, eig, fnorm
from .tolerances import DEFAULT

__all__ = [
    "BiorthogonalSystem",
    "build_biorthogonal",
    "dual_basis",
    "fix_phase",
    "from_vectors",
    "gram_matrix",
    "rephase",
    "rescale",
    "resolution_residual",
]


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Matched families ``phi`` (columns, eigenvectors of H) and ``psi``
    (columns, eigenvectors of H^+) with ``<phi_n, psi_m> = delta_nm``.

    ``eigenvalues`` are those of H; ``psi[:, n]`` belongs to ``conj(E_n)``.
    """

    eigenvalues: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    gram_residual: float

    @property
    def dim(self):
        return len(self.eigenvalues)


def gram_matrix(phi, psi):
    """``G[n, m] = <phi_n, psi_m>`` with the product antilinear in the first slot."""
    return dagger(phi) @ psi


def from_vectors(eigenvalues, phi, psi):
    phi = np.asarray(phi, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    G = gram_matrix(phi, psi)
    res = float(np.linalg.norm(G - np.eye(len(G))))
    return BiorthogonalSystem(
        eigenvalues=np.asarray(eigenvalues, dtype=np.complex128),
        phi=phi,
        psi=psi,
        gram_residual=res,
    )


def fix_phase(v, rel=1e-8):
    """Rotate ``v`` so that its first component of (near-)largest modulus is
    real and positive.  ``rel`` absorbs rounding noise among equal moduli."""
    a = np.abs(v)
    k = int(np.argmax(a >= (1.0 - rel) * a.max()))
    return v * (np.conj(v[k]) / a[k])


def _pair(E, mu, tol):
    """For each E_n pick the eigenvalue of H^+ closest to conj(E_n)."""
    scale = max(1.0, float(np.max(np.abs(E))))
    free = list(range(len(mu)))
    match = []
    for n, e in enumerate(E):
        target = np.conj(e)
        d = np.abs(mu[free] - target)
        order = np.argsort(d, kind="stable")
        best = free[order[0]]
        if len(free) > 1 and d[order[1]] - d[order[0]] <= tol.gap * scale:
            raise PairingAmbiguous(
                f"eigenvalue {n}: two candidates at distance {d[order[0]]:.3g}, {d[order[1]]:.3g}"
            )
        match.append(best)
        free.remove(best)
    return match


def build_biorthogonal(H, tol=DEFAULT):
    """Biorthogonal system from independent eigen-decompositions of H and H^+.

    ``phi_n`` is unit-norm with its phase fixed by :func:`fix_phase`; ``psi_n``
    absorbs the scale so that ``<phi_n, psi_n> = 1``.
    """
    H = as_matrix(H)
    right = eig(H, tol)
    left = eig(dagger(H), tol)
    match = _pair(right.eigenvalues, left.eigenvalues, tol)
    n = H.shape[0]
    phi = np.empty((n, n), dtype=np.complex128)
    psi = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        phi[:, j] = fix_phase(right.right_vectors[:, j])
        raw = left.right_vectors[:, match[j]]
        c = np.vdot(phi[:, j], raw)
        if abs(c) < np.finfo(float).eps * 16:
            raise IllConditionedBasis(f"left/right overlap vanishes for eigenvalue {j}")
        psi[:, j] = raw / c
    B = from_vectors(right.eigenvalues, phi, psi)
    if not B.gram_residual <= tol.bio:
        raise IllConditionedBasis(f"Gram residual {B.gram_residual:.3g} exceeds {tol.bio:.3g}")
    return B


def resolution_residual(B, order="phi_psi"):
    """``||sum_n |phi_n><psi_n| - 1||_F`` (or the ``"psi_phi"`` variant)."""
    if order == "phi_psi":
        R = B.phi @ dagger(B.psi)
    elif order == "psi_phi":
        R = B.psi @ dagger(B.phi)
    else:
        raise ValueError(f"unknown order {order!r}")
    return fnorm(R - np.eye(B.dim))


def dual_basis(phi):
    """Columns ``psi`` with ``<phi_n, psi_m> = delta_nm``, via matrix inversion.

    Independent of the eigen-decomposition of H^+, so it cross-checks the
    primary construction.
    """
    return dagger(np.linalg.inv(np.asarray(phi, dtype=np.complex128)))


def rephase(B, phases):
    """Multiply ``phi_n`` and ``psi_n`` by the same unit phase.

    Biorthogonality is unchanged, and so must be every metric built from B.
    """
    p = np.asarray(phases, dtype=np.complex128)
    return from_vectors(B.eigenvalues, B.phi * p, B.psi * p)


def rescale(B, factors):
    """``phi_n -> c_n phi_n``, ``psi_n -> psi_n / conj(c_n)``.

    Keeps the Gram matrix but changes the metrics unless every ``|c_n| = 1``:
    the norm split between ``phi_n`` and ``psi_n`` is a genuine choice.
    """
    c = np.asarray(factors, dtype=np.complex128)
    if np.any(c == 0):
        raise ValueError("rescale factors must be nonzero")
    return from_vectors(B.eigenvalues, B.phi * c, B.psi / np.conj(c))
