"""Metric operators, the sharp/flat adjoints and the tree of isospectral
Hamiltonians grown from a single seed.

Node labels
-----------
For every metric pair ``M`` with level ``m`` (``0``, ``1``, ``2a``, ``2b``)
four Hamiltonians are generated::

    label            matrix                       eigenvectors     spectrum
    sharp{m}         S_phi H^+ S_psi              S_phi psi_n      conj(E_n)
    flat{m}          S_psi H^+ S_phi              S_psi psi_n      conj(E_n)
    Hdag_sharp{m}    S_phi H S_psi = (flat)^+     S_phi phi_n      E_n
    Hdag_flat{m}     S_psi H S_phi = (sharp)^+    S_psi phi_n      E_n

where ``phi_n``/``psi_n`` are the seed eigenvectors of H and H^+.  In the
usual notation ``sharp1`` is H^{#_1}, ``Hdag_flat2a`` is (H^+)^{b_{2,alpha}},
and so on.  The metric levels come from the bases

    level 0   (phi, psi)                       the seed
    level 1   (S0_phi phi, S0_psi psi)         promoted by level 0 ("flat")
    level 2a  (S1_psi phi, S1_phi psi)         promoted by level 1 ("sharp")
    level 2b  (S1_phi phi, S1_psi psi)         promoted by level 1 ("flat")

The basis (S0_psi phi, S0_phi psi) equals the seed with the two families
swapped, so it is recorded as an alias and yields no new metric.
"""

from dataclasses import dataclass, field

import numpy as np

from .biortho import BiorthogonalSystem, build_biorthogonal, from_vectors
from .errors import (
    ChainError,
    DepthTooShallow,
    IllConditionedBasis,
    InconsistentEquivalence,
    MetricChainError,
    MetricIllConditioned,
)
from .linalg import (
    as_matrix,
    cond_estimate,
    dagger,
    eigvals,
    fnorm,
    matpow,
    matrix_from_dict,
    matrix_to_dict,
    spectral_distance,
)
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "MAX_DEPTH",
    "SPECTRUM_H",
    "SPECTRUM_HDAG",
    "ChainNode",
    "ChainTree",
    "Lemma1Report",
    "MetricPair",
    "build_metrics",
    "expected_node_count",
    "flat",
    "grow_chain",
    "identity_metric",
    "intertwine_residual",
    "lemma1_check",
    "power_identity_residuals",
    "promote_vectors",
    "sharp",
    "spectral_tolerance",
    "tree_from_dict",
    "tree_to_dict",
    "weighted_inner",
]

MAX_DEPTH = 3
SPECTRUM_H = "spectrum-of-H"
SPECTRUM_HDAG = "spectrum-of-Hdag"

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MetricPair:
    S_phi: np.ndarray
    S_psi: np.ndarray
    inv_residual: float
    level_label: str = "0"


def _hermitize(S):
    return 0.5 * (S + dagger(S))


def _rounding_bound(base, n, *scales):
    # rounding-level allowance for products of ill-conditioned factors
    return max(base, 16 * _EPS * n * float(np.prod(scales)))


def build_metrics(B, tol=DEFAULT, label="0"):
    """Metric pair ``S_phi = sum |phi_n><phi_n|``, ``S_psi = sum |psi_n><psi_n|``."""
    S_phi = _hermitize(B.phi @ dagger(B.phi))
    S_psi = _hermitize(B.psi @ dagger(B.psi))
    n = B.dim
    c = cond_estimate(S_phi)
    if not c <= tol.cond_max:
        raise MetricIllConditioned(f"level {label}: cond(S_phi) = {c:.3g} exceeds {tol.cond_max:.3g}")
    if np.linalg.eigvalsh(S_phi)[0] <= 0.0 or np.linalg.eigvalsh(S_psi)[0] <= 0.0:
        raise MetricIllConditioned(f"level {label}: metric is not positive definite")
    inv_res = fnorm(S_phi @ S_psi - np.eye(n))
    if not inv_res <= _rounding_bound(tol.metric, n, c):
        raise MetricIllConditioned(f"level {label}: ||S_phi S_psi - 1|| = {inv_res:.3g}")
    return MetricPair(S_phi=S_phi, S_psi=S_psi, inv_residual=inv_res, level_label=label)


def identity_metric(n, label="0"):
    eye = np.eye(n, dtype=np.complex128)
    return MetricPair(S_phi=eye, S_psi=eye.copy(), inv_residual=0.0, level_label=label)


def sharp(X, M):
    """``X^# = S_phi X^+ S_psi``: adjoint for the product ``<S_psi f, g>``."""
    return M.S_phi @ dagger(X) @ M.S_psi


def flat(X, M):
    """``X^b = S_psi X^+ S_phi``: adjoint for the product ``<S_phi f, g>``."""
    return M.S_psi @ dagger(X) @ M.S_phi


def weighted_inner(f, g, S):
    """``<S f, g>``, antilinear in ``f``."""
    return complex(np.vdot(np.asarray(S) @ np.asarray(f), np.asarray(g)))


def promote_vectors(B, M, kind="flat", tol=DEFAULT):
    """Map a biorthogonal system through a metric pair.

    ``kind="flat"`` gives ``(S_phi phi, S_psi psi)``, the construction that
    seeds the next metric level; ``kind="sharp"`` gives
    ``(S_psi phi, S_phi psi)``.  Eigenvalues are carried over unchanged.
    """
    if kind == "flat":
        phi, psi = M.S_phi @ B.phi, M.S_psi @ B.psi
    elif kind == "sharp":
        phi, psi = M.S_psi @ B.phi, M.S_phi @ B.psi
    else:
        raise ValueError(f"unknown promotion kind {kind!r}")
    out = from_vectors(B.eigenvalues, phi, psi)
    scale = max(np.linalg.norm(phi[:, j]) * np.linalg.norm(psi[:, j]) for j in range(B.dim))
    if not out.gram_residual <= _rounding_bound(tol.bio, B.dim, scale):
        raise IllConditionedBasis(f"promoted Gram residual {out.gram_residual:.3g}")
    return out


# -- the tree ---------------------------------------------------------------


@dataclass
class ChainNode:
    label: str
    hamiltonian: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    metric_used: str
    parent: str
    conj_class: str
    generation: int
    eigvec_residual: float = 0.0
    spectral_residual: float = 0.0


@dataclass
class ChainTree:
    hamiltonian: np.ndarray
    seed: BiorthogonalSystem
    depth: int = 0
    nodes: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    bases: dict = field(default_factory=dict)
    aliases: dict = field(default_factory=dict)
    model: object = None
    tol: Tolerances = DEFAULT

    def __getitem__(self, label):
        return self.nodes[label]

    @property
    def labels(self):
        return list(self.nodes)


def expected_node_count(depth):
    return {0: 2, 1: 6, 2: 10, 3: 18}[depth]


def spectral_tolerance(A, V, tol=DEFAULT):
    """Admissible eigenvalue error for a node with eigenvector columns ``V``.

    ``10 tol.eig ||A||_F``, widened to the Bauer-Fike rounding bound
    ``16 eps n cond(V) ||A||_F`` when the eigenvectors are ill-conditioned.
    """
    scale = max(1.0, fnorm(A))
    V = V / np.linalg.norm(V, axis=0)
    return _rounding_bound(10 * tol.eig * scale, len(A), cond_estimate(V), scale)


def _certify(node, tol):
    A = node.hamiltonian
    V = node.eigenvectors / np.linalg.norm(node.eigenvectors, axis=0)
    node.eigvec_residual = float(np.max(np.linalg.norm(A @ V - V * node.eigenvalues, axis=0)))
    node.spectral_residual = spectral_distance(eigvals(A, tol), node.eigenvalues)
    if not node.eigvec_residual <= tol.chain * max(1.0, fnorm(A)):
        raise MetricChainError(f"eigenvector residual {node.eigvec_residual:.3g}")
    bound = spectral_tolerance(A, V, tol)
    if not node.spectral_residual <= bound:
        raise MetricChainError(f"spectrum off by {node.spectral_residual:.3g} (bound {bound:.3g})")


def _metric_nodes(H, B, M):
    m = M.level_label
    E = B.eigenvalues
    Hd = dagger(H)
    return [
        (f"sharp{m}", sharp(H, M), M.S_phi @ B.psi, np.conj(E), "H", SPECTRUM_HDAG),
        (f"flat{m}", flat(H, M), M.S_psi @ B.psi, np.conj(E), "H", SPECTRUM_HDAG),
        (f"Hdag_sharp{m}", sharp(Hd, M), M.S_phi @ B.phi, E, "Hdag", SPECTRUM_H),
        (f"Hdag_flat{m}", flat(Hd, M), M.S_psi @ B.phi, E, "Hdag", SPECTRUM_H),
    ]


def _insert(tree, label, A, vecs, evals, parent, cls, metric, generation):
    node = ChainNode(
        label=label,
        hamiltonian=A,
        eigenvalues=np.asarray(evals, dtype=np.complex128),
        eigenvectors=vecs,
        metric_used=metric,
        parent=parent,
        conj_class=cls,
        generation=generation,
    )
    try:
        _certify(node, tree.tol)
    except MetricChainError as exc:
        raise ChainError(str(exc), label, tree) from exc
    tree.nodes[label] = node


def _check_basis(H, B, tol):
    if B.phi.shape != H.shape or B.psi.shape != H.shape:
        raise IllConditionedBasis("seed basis does not match the Hamiltonian's dimension")
    if not B.gram_residual <= tol.bio:
        raise IllConditionedBasis(f"seed Gram residual {B.gram_residual:.3g} exceeds {tol.bio:.3g}")


def grow_chain(H, depth=MAX_DEPTH, tol=DEFAULT, model=None, basis=None):
    """Grow the tree of isospectral Hamiltonians down to ``depth`` (0..3).

    ``basis`` overrides the seed biorthogonal system (default:
    :func:`build_biorthogonal`); its normalisation fixes every metric.
    Every node is certified (eigenvector residuals and spectrum) before it is
    inserted; the first failure raises :class:`ChainError` carrying the
    partial tree.
    """
    depth = int(depth)
    if not 0 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be in 0..{MAX_DEPTH}, got {depth}")
    H = as_matrix(H)
    if basis is None:
        B = build_biorthogonal(H, tol)
    else:
        B = basis
        _check_basis(H, B, tol)
    tree = ChainTree(hamiltonian=H, seed=B, depth=0, model=model, tol=tol)
    tree.bases["E"] = B
    _insert(tree, "H", H, B.phi, B.eigenvalues, "", SPECTRUM_H, "", 0)
    _insert(tree, "Hdag", dagger(H), B.psi, np.conj(B.eigenvalues), "", SPECTRUM_HDAG, "", 0)
    if depth == 0:
        return tree

    def add_level(basis_label, level, generation):
        try:
            M = build_metrics(tree.bases[basis_label], tol, level)
        except MetricChainError as exc:
            raise ChainError(str(exc), f"metric {level}", tree) from exc
        tree.metrics[level] = M
        for label, A, vecs, evals, parent, cls in _metric_nodes(H, B, M):
            _insert(tree, label, A, vecs, evals, parent, cls, level, generation)
        return M

    def promote(src, M, kind, label):
        try:
            tree.bases[label] = promote_vectors(src, M, kind, tol)
        except MetricChainError as exc:
            raise ChainError(str(exc), f"basis {label}", tree) from exc

    M0 = add_level("E", "0", 1)
    tree.aliases["E_sharp0"] = "E"
    tree.depth = 1
    if depth == 1:
        return tree

    promote(B, M0, "flat", "E_flat0")
    M1 = add_level("E_flat0", "1", 2)
    tree.depth = 2
    if depth == 2:
        return tree

    promote(B, M1, "sharp", "E_sharp1")
    promote(B, M1, "flat", "E_flat1")
    add_level("E_sharp1", "2a", 3)
    add_level("E_flat1", "2b", 3)
    tree.depth = 3
    return tree


# -- identities -------------------------------------------------------------


def _rel(A, B):
    return fnorm(A - B) / max(fnorm(B), np.finfo(float).tiny)


def power_identity_residuals(tree):
    """Relative Frobenius residuals of the metric power identities.

    ``S1 = S0^3`` needs depth >= 2; the fifth and seventh powers of levels
    2a and 2b are included at depth 3.
    """
    if tree.depth < 2:
        raise DepthTooShallow(f"power identities need depth >= 2, tree has {tree.depth}")
    M0, M1 = tree.metrics["0"], tree.metrics["1"]
    out = {
        "S1_phi=S0_phi^3": _rel(M1.S_phi, matpow(M0.S_phi, 3)),
        "S1_psi=S0_psi^3": _rel(M1.S_psi, matpow(M0.S_psi, 3)),
    }
    if tree.depth >= 3:
        Ma, Mb = tree.metrics["2a"], tree.metrics["2b"]
        out["S2a_phi=S0_psi^5"] = _rel(Ma.S_phi, matpow(M0.S_psi, 5))
        out["S2a_psi=S0_phi^5"] = _rel(Ma.S_psi, matpow(M0.S_phi, 5))
        out["S2b_phi=S0_phi^7"] = _rel(Mb.S_phi, matpow(M0.S_phi, 7))
        out["S2b_psi=S0_psi^7"] = _rel(Mb.S_psi, matpow(M0.S_psi, 7))
    return out


def intertwine_residual(S, A, B):
    """``||S A - B S||_F / max(1, ||A||_F)``; zero when S intertwines A into B."""
    S, A, B = (np.asarray(x) for x in (S, A, B))
    return fnorm(S @ A - B @ S) / max(1.0, fnorm(A))


@dataclass(frozen=True)
class Lemma1Report:
    residuals: dict
    holds: dict

    @property
    def all_true(self):
        return all(self.holds.values())

    @property
    def all_false(self):
        return not any(self.holds.values())


def lemma1_check(X, M, rtol=1e-10):
    """Evaluate the four equivalent commutation statements for ``X``.

    (i) ``(X^b)^+ = (X^+)^b``  (ii) ``[X, S_phi^2] = 0``
    (iii) ``[X, S_psi^2] = 0``  (iv) ``(X^#)^+ = (X^+)^#``

    Residuals are normalised by the size of the terms involved.  Raises
    :class:`InconsistentEquivalence` if the statements disagree at ``rtol``.
    """
    X = np.asarray(X, dtype=np.complex128)
    tiny = np.finfo(float).tiny
    nx = fnorm(X)
    P2, Q2 = M.S_phi @ M.S_phi, M.S_psi @ M.S_psi
    triple = max(fnorm(M.S_phi) * nx * fnorm(M.S_psi), tiny)
    res = {
        "i": fnorm(dagger(flat(X, M)) - flat(dagger(X), M)) / triple,
        "ii": fnorm(X @ P2 - P2 @ X) / max(2 * nx * fnorm(P2), tiny),
        "iii": fnorm(X @ Q2 - Q2 @ X) / max(2 * nx * fnorm(Q2), tiny),
        "iv": fnorm(dagger(sharp(X, M)) - sharp(dagger(X), M)) / triple,
    }
    holds = {k: v <= rtol for k, v in res.items()}
    if len(set(holds.values())) > 1:
        raise InconsistentEquivalence(f"lemma statements disagree: {res}")
    return Lemma1Report(residuals=res, holds=holds)


# -- serialisation ----------------------------------------------------------


def _cvec(z):
    return [[float(v.real), float(v.imag)] for v in np.asarray(z, dtype=np.complex128)]


def _from_cvec(pairs):
    a = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return a[:, 0] + 1j * a[:, 1]


def tree_to_dict(tree):
    """JSON-ready record of a tree; floats survive a round trip exactly."""
    return {
        "format": "metricchain.tree/1",
        "depth": tree.depth,
        "model": None if tree.model is None else tree.model.to_dict(),
        "tolerances": tree.tol.as_dict(),
        "hamiltonian": matrix_to_dict(tree.hamiltonian),
        "bases": {
            k: {
                "eigenvalues": _cvec(b.eigenvalues),
                "phi": matrix_to_dict(b.phi),
                "psi": matrix_to_dict(b.psi),
            }
            for k, b in tree.bases.items()
        },
        "aliases": dict(tree.aliases),
        "metrics": {
            k: {"S_phi": matrix_to_dict(m.S_phi), "S_psi": matrix_to_dict(m.S_psi)}
            for k, m in tree.metrics.items()
        },
        "nodes": {
            k: {
                "matrix": matrix_to_dict(n.hamiltonian),
                "eigenvalues": _cvec(n.eigenvalues),
                "eigenvectors": matrix_to_dict(n.eigenvectors),
                "parent": n.parent,
                "metric": n.metric_used,
                "conj_class": n.conj_class,
                "generation": n.generation,
                "residuals": {
                    "eigenvector": n.eigvec_residual,
                    "spectrum": n.spectral_residual,
                },
            }
            for k, n in tree.nodes.items()
        },
    }


def tree_from_dict(d):
    from .models import ModelSpec

    tol = DEFAULT.updated(**d.get("tolerances", {}))
    bases = {
        k: from_vectors(
            _from_cvec(b["eigenvalues"]), matrix_from_dict(b["phi"]), matrix_from_dict(b["psi"])
        )
        for k, b in d["bases"].items()
    }
    metrics = {}
    for k, m in d["metrics"].items():
        S_phi, S_psi = matrix_from_dict(m["S_phi"]), matrix_from_dict(m["S_psi"])
        inv_res = fnorm(S_phi @ S_psi - np.eye(len(S_phi)))
        metrics[k] = MetricPair(S_phi, S_psi, inv_res, k)
    nodes = {}
    for k, n in d["nodes"].items():
        nodes[k] = ChainNode(
            label=k,
            hamiltonian=matrix_from_dict(n["matrix"]),
            eigenvalues=_from_cvec(n["eigenvalues"]),
            eigenvectors=matrix_from_dict(n["eigenvectors"]),
            metric_used=n["metric"],
            parent=n["parent"],
            conj_class=n["conj_class"],
            generation=int(n["generation"]),
            eigvec_residual=float(n["residuals"]["eigenvector"]),
            spectral_residual=float(n["residuals"]["spectrum"]),
        )
    model = d.get("model")
    return ChainTree(
        hamiltonian=matrix_from_dict(d["hamiltonian"]),
        seed=bases["E"],
        depth=int(d["depth"]),
        nodes=nodes,
        metrics=metrics,
        bases=bases,
        aliases=dict(d.get("aliases", {})),
        model=None if model is None else ModelSpec.from_dict(model),
        tol=tol,
    )
