"""Invariant suite over a chain tree and the reality / pseudo-Hermiticity
classification.

A spectrum is all-real exactly when ``H`` is self-adjoint for the level-0
sharp product (``S_psi H = H^+ S_psi``); it is all-imaginary exactly when
``H`` is anti-self-adjoint for it.  :func:`theorem1_suite` and
:func:`remark1_suite` test the two statements, :func:`full_suite` runs
everything that can be checked on a tree and never aborts.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .biortho import from_vectors, rephase, resolution_residual
from .chain import (
    build_metrics,
    flat,
    power_identity_residuals,
    promote_vectors,
    sharp,
    spectral_tolerance,
)
from .errors import InconsistentEquivalence, MetricChainError, WrongSpectrumClass
from .linalg import cond_estimate, dagger, eigvals, fnorm, spectral_distance
from .tolerances import DEFAULT

__all__ = [
    "ALL_IMAGINARY",
    "ALL_REAL",
    "MIXED",
    "Check",
    "VerificationReport",
    "classify_spectrum",
    "full_suite",
    "real_cutoff",
    "remark1_suite",
    "theorem1_suite",
]

ALL_REAL = "all-real"
ALL_IMAGINARY = "all-imaginary"
MIXED = "mixed"

_EPS = np.finfo(float).eps
_BASIS_OF_LEVEL = {"0": "E", "1": "E_flat0", "2a": "E_sharp1", "2b": "E_flat1"}
_N_RANDOM = 20


@dataclass(frozen=True)
class Check:
    """One numerical check.

    ``bound="max"`` passes when ``residual <= tolerance``; ``bound="min"``
    (nonexistence checks) passes when ``residual > tolerance``.  Checks with
    ``asserted=False`` are reported but do not affect :attr:`VerificationReport.ok`.
    """

    name: str
    residual: float
    tolerance: float
    passed: bool
    asserted: bool = True
    bound: str = "max"

    @classmethod
    def make(cls, name, residual, tolerance, asserted=True, bound="max"):
        residual, tolerance = float(residual), float(tolerance)
        if bound == "max":
            passed = residual <= tolerance
        elif bound == "min":
            passed = residual > tolerance
        else:
            raise ValueError(f"unknown bound {bound!r}")
        return cls(name, residual, tolerance, bool(passed), bool(asserted), bound)


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    spectrum_class: str = MIXED
    pseudo_hermitian: bool = False
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        """True when every asserted check passed."""
        return all(c.passed for c in self.checks if c.asserted)

    def failures(self):
        return [c for c in self.checks if c.asserted and not c.passed]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self):
        return [c.name for c in self.checks]

    def add(self, *args, **kwargs):
        self.checks.append(Check.make(*args, **kwargs))

    def extend(self, other):
        self.checks.extend(other.checks)
        self.notes.extend(n for n in other.notes if n not in self.notes)

    def to_dict(self):
        return {
            "ok": self.ok,
            "spectrum_class": self.spectrum_class,
            "pseudo_hermitian": self.pseudo_hermitian,
            "checks": [asdict(c) for c in self.checks],
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        return cls(
            checks=[Check(**c) for c in d["checks"]],
            spectrum_class=d["spectrum_class"],
            pseudo_hermitian=bool(d["pseudo_hermitian"]),
            notes=list(d["notes"]),
        )


def real_cutoff(E, tol=DEFAULT):
    """Im/Re cutoff ``tol.real * (1 + spectral radius)``."""
    E = np.asarray(E, dtype=np.complex128)
    rho = float(np.max(np.abs(E))) if E.size else 0.0
    return tol.real * (1.0 + rho)


def classify_spectrum(E, tol_real=None, tol=DEFAULT):
    """``"all-real"``, ``"all-imaginary"`` or ``"mixed"``.

    The cutoff defaults to ``tol.real * (1 + spectral radius)``.  An all-zero
    spectrum counts as all-real.
    """
    E = np.asarray(E, dtype=np.complex128)
    cut = real_cutoff(E, tol) if tol_real is None else float(tol_real)
    if np.all(np.abs(E.imag) <= cut):
        return ALL_REAL
    if np.all(np.abs(E.real) <= cut):
        return ALL_IMAGINARY
    return MIXED


def _item_tolerance(H, M, tol):
    # rounding in S_phi H^+ S_psi grows with the metric norms
    n = len(H)
    scale = max(1.0, fnorm(H)) * max(1.0, fnorm(M.S_phi) * fnorm(M.S_psi) / n)
    return tol.chain * scale


def _theorem_items(H, M, sign):
    Hd = dagger(H)
    return {
        "ii": fnorm(M.S_psi @ H - sign * Hd @ M.S_psi),
        "iii": fnorm(M.S_phi @ Hd - sign * H @ M.S_phi),
        "iv": fnorm(H - sign * sharp(H, M)),
        "v": fnorm(Hd - sign * flat(Hd, M)),
    }


def theorem1_suite(H, B, M, tol=DEFAULT, prefix="theorem1"):
    """Reality of the spectrum versus pseudo-Hermiticity under ``M``.

    Items (ii)-(v) are ``S_psi H = H^+ S_psi``, ``S_phi H^+ = H S_phi``,
    ``H = H^#`` and ``H^+ = (H^+)^b``.  Their residuals are recorded without
    assertion; the asserted check is that they hold exactly when the
    spectrum is real.  Raises :class:`InconsistentEquivalence` otherwise.
    """
    H = np.asarray(H, dtype=np.complex128)
    E = B.eigenvalues
    cls = classify_spectrum(E, tol=tol)
    report = VerificationReport(spectrum_class=cls)
    report.add(f"{prefix}.i.real", float(np.max(np.abs(E.imag))), real_cutoff(E, tol), asserted=False)
    t = _item_tolerance(H, M, tol)
    items = _theorem_items(H, M, +1)
    for k, r in items.items():
        report.add(f"{prefix}.{k}", r, t, asserted=False)
    holds = {k: r <= t for k, r in items.items()}
    real = cls == ALL_REAL
    if len(set(holds.values())) > 1 or holds["iv"] != real:
        raise InconsistentEquivalence(
            f"spectrum {cls} but items hold={holds} (residuals {items}, tolerance {t:.3g})"
        )
    report.pseudo_hermitian = holds["iv"]
    report.add(f"{prefix}.equivalence", 0.0, t)
    return report


def remark1_suite(h, B, M, tol=DEFAULT, prefix="remark1"):
    """Purely imaginary spectrum versus anti-pseudo-Hermiticity.

    Checks ``S_psi h = -h^+ S_psi``, ``S_phi h^+ = -h S_phi``, ``h = -h^#``,
    ``h^+ = -(h^+)^b`` and that ``-i h`` passes :func:`theorem1_suite` with the
    same eigenvectors and metrics.
    """
    h = np.asarray(h, dtype=np.complex128)
    cls = classify_spectrum(B.eigenvalues, tol=tol)
    if cls != ALL_IMAGINARY:
        raise WrongSpectrumClass(f"remark1_suite needs an all-imaginary spectrum, got {cls}")
    report = VerificationReport(spectrum_class=cls)
    t = _item_tolerance(h, M, tol)
    for k, r in _theorem_items(h, M, -1).items():
        report.add(f"{prefix}.{k}", r, t)
    rotated = from_vectors(-1j * B.eigenvalues, B.phi, B.psi)
    sub = theorem1_suite(-1j * h, rotated, M, tol, prefix=f"{prefix}.rotated")
    report.extend(sub)
    report.add(f"{prefix}.rotated.pseudo_hermitian", 0.0 if sub.pseudo_hermitian else 1.0, 0.5)
    return report


# -- full suite -------------------------------------------------------------


def _bound(base, n, scale):
    return max(base, 16 * _EPS * n * scale)


def _vector_scale(B):
    return float(np.max(np.linalg.norm(B.phi, axis=0) * np.linalg.norm(B.psi, axis=0)))


def _basis_checks(rep, label, B, tol):
    n = B.dim
    t = _bound(tol.bio, n, _vector_scale(B))
    G = dagger(B.phi) @ B.psi
    rep.add(f"basis.{label}.gram", float(np.max(np.abs(G - np.eye(n)))), t)
    rep.add(f"basis.{label}.resolution", resolution_residual(B, "phi_psi"), t)
    rep.add(f"basis.{label}.resolution_dual", resolution_residual(B, "psi_phi"), t)


def _seed_checks(rep, H, B, tol):
    scale = max(1.0, fnorm(H))
    nphi = np.linalg.norm(B.phi, axis=0)
    npsi = np.linalg.norm(B.psi, axis=0)
    r = np.linalg.norm(H @ B.phi - B.phi * B.eigenvalues, axis=0) / nphi
    rd = np.linalg.norm(dagger(H) @ B.psi - B.psi * np.conj(B.eigenvalues), axis=0) / npsi
    rep.add("basis.E.eigen_right", float(r.max()), 10 * tol.eig * scale)
    rep.add("basis.E.eigen_left", float(rd.max()), 10 * tol.eig * scale)


def _metric_checks(rep, tree, m, M, tol):
    n = len(M.S_phi)
    c = cond_estimate(M.S_phi)
    herm = max(
        fnorm(M.S_phi - dagger(M.S_phi)) / fnorm(M.S_phi),
        fnorm(M.S_psi - dagger(M.S_psi)) / fnorm(M.S_psi),
    )
    rep.add(f"metric.{m}.hermitian", herm, tol.herm)
    lam = min(np.linalg.eigvalsh(M.S_phi)[0], np.linalg.eigvalsh(M.S_psi)[0])
    rep.add(f"metric.{m}.positive", lam, 0.0, bound="min")
    rep.add(f"metric.{m}.inverse", fnorm(M.S_phi @ M.S_psi - np.eye(n)), _bound(tol.metric, n, c))
    B = tree.bases.get(_BASIS_OF_LEVEL.get(m, ""))
    if B is not None:
        r = max(
            fnorm(M.S_phi @ B.psi - B.phi) / fnorm(B.phi),
            fnorm(M.S_psi @ B.phi - B.psi) / fnorm(B.psi),
        )
        rep.add(f"metric.{m}.maps_basis", r, _bound(tol.metric, n, c))


def _node_checks(rep, tree, tol):
    for label in sorted(tree.nodes):
        node = tree.nodes[label]
        A = node.hamiltonian
        scale = max(1.0, fnorm(A))
        V = node.eigenvectors / np.linalg.norm(node.eigenvectors, axis=0)
        r = float(np.max(np.linalg.norm(A @ V - V * node.eigenvalues, axis=0)))
        rep.add(f"node.{label}.eigenvectors", r, tol.chain * scale)
        target = tree.seed.eigenvalues
        if node.conj_class == "spectrum-of-Hdag":
            target = np.conj(target)
        d = spectral_distance(eigvals(A, tol), target)
        rep.add(f"node.{label}.spectrum", d, spectral_tolerance(A, node.eigenvectors, tol))


def _intertwining_checks(rep, tree, tol):
    H = tree.hamiltonian
    Hd = dagger(H)
    for m, M in sorted(tree.metrics.items()):
        pairs = {
            f"sharp{m}": (M.S_psi, Hd),
            f"flat{m}": (M.S_phi, Hd),
            f"Hdag_sharp{m}": (M.S_psi, H),
            f"Hdag_flat{m}": (M.S_phi, H),
        }
        n = len(H)
        spread = fnorm(M.S_phi) * fnorm(M.S_psi)
        for label, (S, target) in pairs.items():
            if label not in tree.nodes:
                continue
            A = tree.nodes[label].hamiltonian
            r = fnorm(S @ A - target @ S) / max(1.0, fnorm(A))
            t = _bound(tol.chain, n, spread * fnorm(S) * max(1.0, fnorm(H)) / max(1.0, fnorm(A)))
            rep.add(f"intertwine.{label}", r, t)


def _random_matrices(n, count, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    return [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(count)]


def _pairing_checks(rep, tree, tol):
    n = len(tree.hamiltonian)
    Xs = _random_matrices(n, _N_RANDOM, 0)
    for m, M in sorted(tree.metrics.items()):
        worst = 0.0
        for X in Xs:
            denom = fnorm(M.S_phi) * fnorm(X) * fnorm(M.S_psi)
            a = fnorm(dagger(flat(X, M)) - sharp(dagger(X), M)) / denom
            b = fnorm(dagger(sharp(X, M)) - flat(dagger(X), M)) / denom
            worst = max(worst, a, b)
        rep.add(f"adjoint_pairing.{m}", worst, tol.chain)


def _rebuild_metrics(seed, depth, tol):
    out = {"0": build_metrics(seed, tol, "0")}
    if depth >= 2:
        out["1"] = build_metrics(promote_vectors(seed, out["0"], "flat", tol), tol, "1")
    if depth >= 3:
        out["2a"] = build_metrics(promote_vectors(seed, out["1"], "sharp", tol), tol, "2a")
        out["2b"] = build_metrics(promote_vectors(seed, out["1"], "flat", tol), tol, "2b")
    return out


def _convention_checks(rep, tree, tol):
    if not tree.metrics:
        return
    n = tree.seed.dim
    rng = np.random.Generator(np.random.Philox(1))
    phases = np.exp(2j * np.pi * rng.random(n))
    try:
        other = _rebuild_metrics(rephase(tree.seed, phases), tree.depth, tol)
    except MetricChainError as exc:
        rep.add("convention.rebuild", 1.0, 0.0)
        rep.notes.append(f"convention check could not rebuild the metrics: {exc}")
        return
    for m, M in sorted(tree.metrics.items()):
        Mo = other[m]
        r = max(
            fnorm(M.S_phi - Mo.S_phi) / fnorm(M.S_phi),
            fnorm(M.S_psi - Mo.S_psi) / fnorm(M.S_psi),
        )
        rep.add(f"convention.{m}", r, tol.metric)


def _nonexistence_checks(rep, tree, tol):
    # a complex eigenvalue rules out self-adjointness under any positive metric
    H = tree.hamiltonian
    nh = max(1.0, fnorm(H))
    for m, M in sorted(tree.metrics.items()):
        rep.add(f"nonexistence.{m}.sharp", fnorm(H - sharp(H, M)) / nh, tol.chain, bound="min")
        rep.add(f"nonexistence.{m}.flat", fnorm(H - flat(H, M)) / nh, tol.chain, bound="min")


def _family(tree):
    return getattr(tree.model, "family", None)


def _model_notes(rep, tree, tol):
    fam = _family(tree)
    if fam in ("hn_impurity", "hn_random") and "1" in tree.metrics:
        H = tree.hamiltonian
        M1 = tree.metrics["1"]
        r = fnorm(H - sharp(H, M1)) / max(1.0, fnorm(H))
        rep.add("sharp1.self_adjoint", r, tol.chain, asserted=False)
        rep.notes.append(
            "level-1 sharp self-adjointness ||H - H^#1|| is reported, not asserted: "
            "reality of the spectrum is equivalent to the level-0 statement H = H^#0"
        )
    if fam == "triangular2x2" and "0" in tree.metrics:
        p = tree.model.resolved()
        a, E1, E2 = p["alpha"], p["E1"], p["E2"]
        exact = tree.nodes["flat0"].hamiltonian[0, 0]
        single = (1 + a * a) * np.conj(E1) - a * a * (2 + a * a) * np.conj(E2)
        rep.notes.append(
            "triangular2x2: flat0[1,1] from the triple product S_psi H^+ S_phi is "
            f"{exact.real:.17g}{exact.imag:+.17g}j; the closed form with a single factor "
            f"(1+alpha^2) on conj(E1) gives {single.real:.17g}{single.imag:+.17g}j "
            f"(difference {abs(exact - single):.3g}); the triple product is authoritative and "
            "the factor must be squared, (1+alpha^2)^2"
        )


def full_suite(tree, tol=None):
    """Run every invariant check on a tree.  Never raises on a failed check;
    failures become report entries.  Checks are sorted by name."""
    tol = tree.tol if tol is None else tol
    H = tree.hamiltonian
    B = tree.seed
    rep = VerificationReport(spectrum_class=classify_spectrum(B.eigenvalues, tol=tol))
    for label in sorted(tree.bases):
        _basis_checks(rep, label, tree.bases[label], tol)
    _seed_checks(rep, H, B, tol)
    for m, M in sorted(tree.metrics.items()):
        _metric_checks(rep, tree, m, M, tol)
    _node_checks(rep, tree, tol)
    _intertwining_checks(rep, tree, tol)
    _pairing_checks(rep, tree, tol)
    _convention_checks(rep, tree, tol)
    if tree.depth >= 2:
        for k, r in power_identity_residuals(tree).items():
            rep.add(f"power.{k}", r, tol.metric)
    if "0" in tree.metrics:
        M0 = tree.metrics["0"]
        try:
            if rep.spectrum_class == ALL_IMAGINARY:
                sub = remark1_suite(H, B, M0, tol)
                rep.pseudo_hermitian = False
            else:
                sub = theorem1_suite(H, B, M0, tol)
                rep.pseudo_hermitian = sub.pseudo_hermitian
            rep.extend(sub)
        except InconsistentEquivalence as exc:
            rep.add("theorem1.equivalence", 1.0, 0.0)
            rep.notes.append(f"equivalence failed at tolerance: {exc}")
        if rep.spectrum_class == MIXED:
            _nonexistence_checks(rep, tree, tol)
    _model_notes(rep, tree, tol)
    rep.checks.sort(key=lambda c: c.name)
    return rep
