"""Model Hamiltonians: triangular 2x2, asymmetric-hopping (HN) chains, PT dimer and
the PT-symmetric dimerised (Rudner-Levitov) ring.

Conventions: sites are numbered ``x = 1..L`` in formulas and stored at
array index ``x - 1``.  Hopping to the right (``|x+1><x|``) carries
``e^{+g}``, i.e. sits on the sub-diagonal.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .biortho import build_biorthogonal, rescale
from .errors import InvalidSpec, NoClosedForm, UnsupportedSymmetry
from .linalg import canonical_order, fnorm
from .tolerances import DEFAULT

__all__ = [
    "FAMILIES",
    "AnalyticEigensystem",
    "ModelSpec",
    "analytic_reference",
    "build",
    "exchange_matrix",
    "fourier_matrix",
    "gauge_symmetrize",
    "model_chain",
    "natural_basis",
    "pt_check",
    "pt_dimer_closed_forms",
    "random_potential",
    "rl_blocks",
    "rl_threshold_class",
    "santos_matrix",
    "santos_params",
    "shift_matrix",
    "symmetry_ops",
    "triangular_closed_forms",
]

FAMILIES = (
    "triangular2x2",
    "hn_open",
    "hn_periodic",
    "hn_impurity",
    "hn_random",
    "pt_dimer",
    "rl_chain",
)

_DEFAULTS = {
    "triangular2x2": {"alpha": 1.0, "E1": 1.0, "E2": 2.0},
    "hn_open": {"L": None, "t_h": 1.0, "g": 0.0},
    "hn_periodic": {"L": None, "t_h": 1.0, "g": 0.0},
    "hn_impurity": {"L": None, "t_h": 1.0, "g": 0.0, "x0": None, "v": 1.0},
    "hn_random": {"L": None, "t_h": 1.0, "g": 0.0, "V": 0.0, "seed": 0},
    "pt_dimer": {"t_h": 1.0, "gamma": 0.0},
    "rl_chain": {"L": None, "t_h": 1.0, "delta": 0.0, "gamma": 0.0},
}


def _complex(value, name):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidSpec(f"{name}: complex numbers are [re, im] pairs")
        value = complex(float(value[0]), float(value[1]))
    try:
        z = complex(value)
    except (TypeError, ValueError):
        raise InvalidSpec(f"{name}: not a number: {value!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidSpec(f"{name}: not finite")
    return z


def _real(value, name):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise InvalidSpec(f"{name}: not a real number: {value!r}") from None
    if not math.isfinite(x):
        raise InvalidSpec(f"{name}: not finite")
    return x


def _int(value, name):
    if isinstance(value, bool):
        raise InvalidSpec(f"{name}: expected an integer")
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if not isinstance(value, (int, np.integer)):
        raise InvalidSpec(f"{name}: expected an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ModelSpec:
    """Model family tag plus its parameter record.

    Missing parameters take the family defaults (``t_h = 1``; impurity site
    at the middle of the chain).  JSON form: ``{"family": ..., "params": {...}}``.
    """

    family: str
    params: dict = field(default_factory=dict)

    def resolved(self):
        """Validated parameter dict with defaults filled in."""
        if self.family not in _DEFAULTS:
            raise InvalidSpec(f"unknown family {self.family!r}; choose from {FAMILIES}")
        unknown = set(self.params) - set(_DEFAULTS[self.family])
        if unknown:
            raise InvalidSpec(f"{self.family}: unknown parameter(s) {sorted(unknown)}")
        p = dict(_DEFAULTS[self.family])
        p.update(self.params)
        out = {}
        for key, value in p.items():
            if key in ("E1", "E2"):
                out[key] = _complex(value, key)
            elif key in ("L", "seed", "x0"):
                if value is None and key == "x0":
                    continue
                if value is None:
                    raise InvalidSpec(f"{self.family}: parameter {key!r} is required")
                out[key] = _int(value, key)
            else:
                out[key] = _real(value, key)
        if "L" in out and out["L"] < 2:
            raise InvalidSpec("L must be at least 2")
        if self.family == "hn_impurity":
            out.setdefault("x0", math.ceil(out["L"] / 2))
            if not 1 <= out["x0"] <= out["L"]:
                raise InvalidSpec(f"impurity site x0={out['x0']} outside 1..{out['L']}")
        if self.family == "hn_random":
            if out["V"] < 0:
                raise InvalidSpec("disorder amplitude V must be nonnegative")
            if not 0 <= out["seed"] < 2**64:
                raise InvalidSpec("seed must fit in an unsigned 64-bit integer")
        return out

    def to_dict(self):
        params = {}
        for k, v in self.params.items():
            if isinstance(v, complex):
                v = [v.real, v.imag]
            elif isinstance(v, np.generic):
                v = v.item()
            params[k] = v
        return {"family": self.family, "params": params}

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "family" not in d:
            raise InvalidSpec("model spec needs a 'family' key")
        params = d.get("params", {})
        if not isinstance(params, dict):
            raise InvalidSpec("'params' must be an object")
        return cls(family=str(d["family"]), params=dict(params))


def _spec(spec_or_family, **params):
    if isinstance(spec_or_family, ModelSpec):
        if params:
            raise TypeError("pass either a ModelSpec or a family name with parameters")
        return spec_or_family
    return ModelSpec(spec_or_family, params)


# -- builders ---------------------------------------------------------------


def _hn_chain(L, t_h, g, periodic):
    H = np.zeros((L, L), dtype=np.complex128)
    right, left = -t_h * math.exp(g), -t_h * math.exp(-g)
    for x in range(L - 1):
        H[x + 1, x] = right
        H[x, x + 1] = left
    if periodic:
        H[0, L - 1] = right
        H[L - 1, 0] = left
    return H


def random_potential(L, V, seed):
    """On-site energies uniform on ``[-V, V]``.

    Draws come from the Philox-4x64 counter-based generator keyed by
    ``seed``; each uniform uses 53 random mantissa bits, so a given seed
    reproduces bit-identical values on every platform.
    """
    rng = np.random.Generator(np.random.Philox(int(seed)))
    return rng.uniform(-V, V, int(L))


def _rl_chain(L, t_h, delta, gamma):
    n = 2 * L
    u, w = t_h * (1 + delta), t_h * (1 - delta)
    H = np.zeros((n, n), dtype=np.complex128)
    for x in range(1, n + 1):
        hop = -t_h * (1 - delta * (-1) ** x)  # x odd: -u (intra-cell), even: -w
        a, b = x - 1, x % n
        H[a, b] = H[b, a] = hop
        H[a, a] = -1j * gamma * (-1) ** x
    assert abs(H[0, 1] + u) < 1e-300 + 1e-15 * abs(u) and abs(H[1, 2] + w) <= 1e-15 * abs(w)
    return H


def build(spec, **params):
    """Matrix of a model, from a :class:`ModelSpec` or ``family, **params``."""
    spec = _spec(spec, **params)
    p = spec.resolved()
    fam = spec.family
    if fam == "triangular2x2":
        a, E1, E2 = p["alpha"], p["E1"], p["E2"]
        return np.array([[E1, a * (E2 - E1)], [0.0, E2]], dtype=np.complex128)
    if fam == "hn_open":
        return _hn_chain(p["L"], p["t_h"], p["g"], periodic=False)
    if fam == "hn_periodic":
        return _hn_chain(p["L"], p["t_h"], p["g"], periodic=True)
    if fam == "hn_impurity":
        H = _hn_chain(p["L"], p["t_h"], p["g"], periodic=True)
        H[p["x0"] - 1, p["x0"] - 1] += p["v"]
        return H
    if fam == "hn_random":
        H = _hn_chain(p["L"], p["t_h"], p["g"], periodic=True)
        H[np.diag_indices(p["L"])] += random_potential(p["L"], p["V"], p["seed"])
        return H
    if fam == "pt_dimer":
        t, gm = p["t_h"], p["gamma"]
        return np.array([[1j * gm, -t], [-t, -1j * gm]], dtype=np.complex128)
    if fam == "rl_chain":
        return _rl_chain(p["L"], p["t_h"], p["delta"], p["gamma"])
    raise InvalidSpec(f"unknown family {fam!r}")  # pragma: no cover


# -- analytic eigensystems --------------------------------------------------


@dataclass(frozen=True)
class AnalyticEigensystem:
    """Closed-form eigenvalues with biorthonormal right/left eigenvectors."""

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    validity_note: str = ""


def _two_level_vector(block, E):
    # null vector of block - E from whichever row is better conditioned
    (a, b), (c, d) = block
    v1 = np.array([b, E - a])
    v2 = np.array([E - d, c])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    return v / np.linalg.norm(v)


def _two_level(block):
    """Eigenvalues and biorthonormal vectors of a traceless 2x2 block.

    The norm is split evenly, ``||right|| = ||left||``, which is the
    normalisation behind the closed-form dimer metrics.
    """
    block = np.asarray(block, dtype=np.complex128)
    disc = np.sqrt(complex(block[0, 0] ** 2 + block[0, 1] * block[1, 0]))
    if abs(disc) < 1e-12 * max(1.0, fnorm(block)):
        raise NoClosedForm("exceptional point: the two eigenvalues coalesce")
    out = []
    for E in (-disc, disc):
        v = _two_level_vector(block, E)
        w = _two_level_vector(np.conj(block).T, np.conj(E))
        c = np.vdot(v, w)
        a = 1 / np.sqrt(abs(c))
        out.append((E, v * a, w * a * abs(c) / c))
    return out


def _sorted(E, R, Lv, note):
    E = np.asarray(E, dtype=np.complex128)
    o = canonical_order(E, 1e-9 * max(1.0, float(np.max(np.abs(E)))))
    return AnalyticEigensystem(E[o], np.asarray(R)[:, o], np.asarray(Lv)[:, o], note)


def analytic_reference(spec, **params):
    """Closed-form eigensystem of a clean model.

    Right vectors are eigenvectors of H, left vectors of H^+, normalised so
    that ``<right_n, left_m> = delta_nm``.
    """
    spec = _spec(spec, **params)
    p = spec.resolved()
    fam = spec.family
    if fam in ("hn_impurity", "hn_random"):
        raise NoClosedForm(f"{fam} has no closed-form spectrum")
    if fam == "triangular2x2":
        a, E1, E2 = p["alpha"], p["E1"], p["E2"]
        if E1 == E2:
            raise NoClosedForm("E1 == E2: the matrix is not diagonalisable with simple spectrum")
        R = np.array([[1, a], [0, 1]], dtype=np.complex128)
        Lv = np.array([[1, 0], [-a, 1]], dtype=np.complex128)
        return _sorted([E1, E2], R, Lv, "exact for E1 != E2")
    if p.get("t_h", 1.0) == 0.0:
        raise NoClosedForm("closed forms need t_h != 0")
    if fam == "hn_open":
        L, t, g = p["L"], p["t_h"], p["g"]
        x = np.arange(1, L + 1)
        n = np.arange(1, L + 1)
        k = n * np.pi / (L + 1)
        E = -2 * t * np.cos(k)
        base = math.sqrt(2 / (L + 1)) * np.sin(np.outer(x, k))
        R = base * np.exp(g * (x - 1))[:, None]
        Lv = base * np.exp(-g * (x - 1))[:, None]
        return _sorted(E, R, Lv, "exact; eigenvalues independent of g")
    if fam == "hn_periodic":
        L, t, g = p["L"], p["t_h"], p["g"]
        x = np.arange(1, L + 1)
        k = 2 * np.pi * np.arange(1, L + 1) / L
        E = -2 * t * np.cos(k + 1j * g)
        F = np.exp(1j * np.outer(x, k)) / math.sqrt(L)
        return _sorted(E, F, F.copy(), "exact; plane waves, right = left")
    if fam == "pt_dimer":
        pairs = _two_level(build(spec))
        E = [e for e, _, _ in pairs]
        R = np.column_stack([v for _, v, _ in pairs])
        Lv = np.column_stack([w for _, _, w in pairs])
        return _sorted(E, R, Lv, "exact away from the exceptional point |gamma| = |t_h|")
    if fam == "rl_chain":
        L = p["L"]
        Es, Rs, Ls = [], [], []
        for n, block in enumerate(rl_blocks(spec), start=1):
            k = 2 * np.pi * n / L
            wave = np.exp(1j * k * np.arange(1, L + 1)) / math.sqrt(L)
            for E, v, w in _two_level(block):
                Es.append(E)
                Rs.append(np.kron(wave, v))
                Ls.append(np.kron(wave, w))
        return _sorted(
            Es, np.column_stack(Rs), np.column_stack(Ls),
            "exact per Fourier block; blocks n and L-n share eigenvalues",
        )
    raise InvalidSpec(f"unknown family {fam!r}")  # pragma: no cover


def natural_basis(spec, tol=DEFAULT, **params):
    """Numerical biorthogonal basis rescaled to the closed-form normalisation.

    Metrics are sums of ``|phi_n><phi_n|`` and so depend on how the norm is
    split between ``phi_n`` and ``psi_n``.  The closed forms fix that split
    (e.g. ``S_phi = diag(e^{2g(x-1)})`` for the open chain); families without
    a closed form keep the unit-norm ``phi`` of :func:`build_biorthogonal`.
    """
    spec = _spec(spec, **params)
    B = build_biorthogonal(build(spec), tol)
    try:
        ref = analytic_reference(spec)
    except NoClosedForm:
        return B
    cost = np.abs(B.eigenvalues[:, None] - ref.eigenvalues[None, :])
    rows, cols = linear_sum_assignment(cost)
    scale = max(1.0, float(np.max(np.abs(ref.eigenvalues))))
    if cost[rows, cols].max() > 1e-8 * scale:
        raise NoClosedForm("numerical and closed-form spectra disagree")
    # phi_ref = c phi_num, read off with the numerical dual vector
    c = np.array([np.vdot(B.psi[:, r], ref.right_vectors[:, k]) for r, k in zip(rows, cols)])
    return rescale(B, c)


def model_chain(spec, depth=3, tol=DEFAULT, **params):
    """Grow the chain tree of a model from its :func:`natural_basis`."""
    from .chain import grow_chain

    spec = _spec(spec, **params)
    return grow_chain(build(spec), depth, tol, model=spec, basis=natural_basis(spec, tol))


# -- symmetries -------------------------------------------------------------


def exchange_matrix(n):
    """Site reversal ``x -> n + 1 - x``."""
    return np.fliplr(np.eye(n, dtype=np.complex128))


def shift_matrix(n, step=1):
    """Cyclic translation ``sum_x |x + step><x|``."""
    return np.roll(np.eye(n, dtype=np.complex128), step, axis=0)


def fourier_matrix(n):
    """Unitary DFT matrix ``F[x, y] = exp(2 pi i x y / n) / sqrt(n)`` (0-based)."""
    idx = np.arange(n)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n) / math.sqrt(n)


def symmetry_ops(spec, **params):
    """Symmetry operators carried by a model family.

    ``pt_dimer``: parity.  ``hn_periodic``: shift and Fourier.
    ``rl_chain``: parity (site reversal), two-site shift and the cell Fourier
    transform.  Other families raise :class:`UnsupportedSymmetry`.
    """
    spec = _spec(spec, **params)
    p = spec.resolved()
    fam = spec.family
    if fam == "pt_dimer":
        return {"parity": exchange_matrix(2)}
    if fam == "hn_periodic":
        L = p["L"]
        return {"shift": shift_matrix(L), "fourier": fourier_matrix(L)}
    if fam == "rl_chain":
        L = p["L"]
        return {
            "parity": exchange_matrix(2 * L),
            "shift": shift_matrix(2 * L, 2),
            "fourier": np.kron(fourier_matrix(L), np.eye(2)),
        }
    raise UnsupportedSymmetry(f"{fam} carries no parity, shift or Fourier symmetry")


def pt_check(H, parity):
    """``||P conj(H) - H P||_F``: zero iff H commutes with parity times
    complex conjugation."""
    H = np.asarray(H, dtype=np.complex128)
    P = np.asarray(parity, dtype=np.complex128)
    return fnorm(P @ np.conj(H) - H @ P)


# -- dimerised PT ring ------------------------------------------------------


def rl_blocks(spec, **params):
    """Fourier blocks ``[[i gamma, -mu + i nu], [-mu - i nu, -i gamma]]`` with
    ``mu = u + w cos k``, ``nu = w sin k``, ``k = 2 pi n / L`` for n = 1..L."""
    spec = _spec(spec, **params)
    if spec.family != "rl_chain":
        raise InvalidSpec("rl_blocks needs an rl_chain spec")
    p = spec.resolved()
    L, t, dl, gm = p["L"], p["t_h"], p["delta"], p["gamma"]
    u, w = t * (1 + dl), t * (1 - dl)
    blocks = []
    for n in range(1, L + 1):
        k = 2 * np.pi * n / L
        mu, nu = u + w * math.cos(k), w * math.sin(k)
        blocks.append(
            np.array([[1j * gm, -mu + 1j * nu], [-mu - 1j * nu, -1j * gm]], dtype=np.complex128)
        )
    return blocks


def rl_threshold_class(t_h, delta, gamma):
    """Sufficient conditions on the spectrum of the dimerised PT ring.

    ``"all-real"`` when ``|gamma| < 2 min(1, |delta|) |t_h|``,
    ``"all-imaginary"`` when ``|gamma| > 2 max(1, |delta|) |t_h|``, otherwise
    ``"mixed"``.  Both bounds are sharp when k = pi is on the momentum grid
    (even L).
    """
    lo = 2 * min(1.0, abs(delta)) * abs(t_h)
    hi = 2 * max(1.0, abs(delta)) * abs(t_h)
    if abs(gamma) < lo:
        return "all-real"
    if abs(gamma) > hi:
        return "all-imaginary"
    return "mixed"


# -- open chain gauge and the two-site parametrisation ----------------------


def gauge_symmetrize(spec, **params):
    """Imaginary gauge transformation of the open chain.

    Returns ``(S, S^-1 H S)`` with ``S = diag(e^{g (x - 1)})``; the second
    matrix is the Hermitian chain with all hoppings ``-t_h``.
    """
    spec = _spec(spec, **params)
    if spec.family != "hn_open":
        raise InvalidSpec("gauge symmetrisation applies to hn_open only")
    p = spec.resolved()
    d = np.exp(p["g"] * np.arange(p["L"]))
    S = np.diag(d).astype(np.complex128)
    H = build(spec)
    return S, (H / d[:, None]) * d[None, :]


def santos_params(g_prime, k):
    """``(t_h, g)`` making the L = 2 open chain equal ``-g' [[0, 1-k], [1+k, 0]]``.

    ``t_h^2 = g'^2 (1 - k^2)`` and ``e^{2g} = (1+k)/(1-k)``; ``t_h`` carries
    the sign of ``g'`` so the matrices agree entrywise.
    """
    g_prime, k = float(g_prime), float(k)
    if not abs(k) < 1:
        raise InvalidSpec("need |k| < 1")
    return g_prime * math.sqrt(1 - k * k), 0.5 * math.log((1 + k) / (1 - k))


def santos_matrix(g_prime, k):
    return -g_prime * np.array([[0, 1 - k], [1 + k, 0]], dtype=np.complex128)


# -- closed forms used as independent oracles -------------------------------


def triangular_closed_forms(alpha, E1, E2):
    """Hand-derived metrics and level-0 adjoints of the triangular 2x2 model."""
    a = float(alpha)
    c1, c2 = np.conj(E1), np.conj(E2)
    s = 1 + a * a
    return {
        "S_phi": np.array([[s, a], [a, 1]], dtype=np.complex128),
        "S_psi": np.array([[1, -a], [-a, s]], dtype=np.complex128),
        "sharp0": np.array([[c1, a * (c2 - c1)], [0, c2]], dtype=np.complex128),
        "flat0": np.array(
            [
                [s * s * c1 - a * a * (2 + a * a) * c2, a * s * (c1 - c2)],
                [-a * s * (2 + a * a) * (c1 - c2), -a * a * (2 + a * a) * c1 + s * s * c2],
            ],
            dtype=np.complex128,
        ),
        "S_phi1": np.array(
            [[a**6 + 5 * a**4 + 6 * a**2 + 1, a * (a**4 + 4 * a**2 + 3)],
             [a * (a**4 + 4 * a**2 + 3), a**4 + 3 * a**2 + 1]],
            dtype=np.complex128,
        ),
    }


def pt_dimer_closed_forms(gamma):
    """Closed forms for the unbroken PT dimer (t_h = 1, |gamma| < 1)."""
    g = float(gamma)
    if not abs(g) < 1:
        raise NoClosedForm("closed forms cover the unbroken phase |gamma| < 1")
    b = math.sqrt(1 - g * g)
    j = 1j
    p3, q3 = 1 + 3 * g**2, g * (3 + g**2)
    p7, q7 = 1 + 21 * g**2 + 35 * g**4 + 7 * g**6, g * (7 + 35 * g**2 + 21 * g**4 + g**6)
    p5, q5 = 1 + 10 * g**2 + 5 * g**4, g * (5 + 10 * g**2 + g**4)
    return {
        "eigenvalues": np.array([-b, b], dtype=np.complex128),
        "S_phi": np.array([[1, -j * g], [j * g, 1]]) / b,
        "S_psi": np.array([[1, j * g], [-j * g, 1]]) / b,
        "sharp0": np.array([[j * g, -1], [-1, -j * g]], dtype=np.complex128),
        "flat0": -np.array([[j * q3, p3], [p3, -j * q3]]) / b**2,
        "S_phi1": np.array([[p3, -j * q3], [j * q3, p3]]) / b**3,
        "S_psi1": np.array([[p3, j * q3], [-j * q3, p3]]) / b**3,
        "flat1": -np.array([[j * q7, p7], [p7, -j * q7]]) / b**6,
        "sharp1": -np.array([[-j * q5, p5], [p5, j * q5]]) / b**4,
    }
