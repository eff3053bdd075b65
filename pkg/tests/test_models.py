import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metricchain import models
from metricchain.errors import InvalidSpec, NoClosedForm, UnsupportedSymmetry
from metricchain.linalg import eigvals, spectral_distance
from metricchain.models import ModelSpec, build
from metricchain.verify import classify_spectrum, real_cutoff

CLOSED = [
    ModelSpec("triangular2x2", {"alpha": 0.7, "E1": [1, 0.5], "E2": -2}),
    ModelSpec("hn_open", {"L": 9, "g": 0.3, "t_h": 1.3}),
    ModelSpec("hn_periodic", {"L": 11, "g": 0.1}),
    ModelSpec("pt_dimer", {"gamma": 0.5}),
    ModelSpec("pt_dimer", {"gamma": 2.0, "t_h": 1.0}),
    ModelSpec("rl_chain", {"L": 5, "delta": 0.3, "gamma": 0.1}),
    ModelSpec("rl_chain", {"L": 4, "delta": -0.4, "gamma": 1.5}),
]


class TestModelSpec:
    def test_defaults(self):
        p = ModelSpec("hn_impurity", {"L": 11}).resolved()
        assert p == {"L": 11, "t_h": 1.0, "g": 0.0, "v": 1.0, "x0": 6}

    def test_json_round_trip(self):
        s = ModelSpec("triangular2x2", {"alpha": 1.0, "E1": complex(1, 2)})
        d = s.to_dict()
        assert d == {"family": "triangular2x2", "params": {"alpha": 1.0, "E1": [1.0, 2.0]}}
        assert np.array_equal(build(ModelSpec.from_dict(d)), build(s))

    @pytest.mark.parametrize("family,params", [
        ("nope", {}),
        ("hn_open", {}),
        ("hn_open", {"L": 1}),
        ("hn_open", {"L": 4, "colour": 1}),
        ("hn_open", {"L": 2.5}),
        ("hn_random", {"L": 4, "V": -1}),
        ("hn_random", {"L": 4, "seed": -1}),
        ("hn_impurity", {"L": 4, "x0": 5}),
        ("pt_dimer", {"gamma": "x"}),
        ("pt_dimer", {"gamma": float("inf")}),
    ])
    def test_invalid(self, family, params):
        with pytest.raises(InvalidSpec):
            build(family, **params)


class TestBuild:
    def test_open_chain_entries(self):
        H = build("hn_open", L=4, g=0.2, t_h=2.0)
        assert H[1, 0] == -2 * math.exp(0.2) and H[0, 1] == -2 * math.exp(-0.2)
        assert H[0, 3] == 0 and H[3, 0] == 0

    def test_periodic_corners(self):
        H = build("hn_periodic", L=4, g=0.2)
        assert H[0, 3] == -math.exp(0.2) and H[3, 0] == -math.exp(-0.2)

    def test_impurity_site(self):
        H = build("hn_impurity", L=11, g=0.1, v=1.0)
        d = np.diag(H)
        assert d[5] == 1 and np.count_nonzero(d) == 1

    def test_pt_dimer(self):
        assert np.array_equal(build("pt_dimer", gamma=0.5), [[0.5j, -1], [-1, -0.5j]])

    def test_rl_chain_pattern(self):
        H = build("rl_chain", L=3, t_h=1.0, delta=0.3, gamma=0.2)
        u, w = 1.3, 0.7
        assert np.allclose(np.diag(H), [0.2j, -0.2j] * 3)
        assert np.allclose(np.diag(H, 1), [-u, -w, -u, -w, -u])
        assert np.isclose(H[5, 0], -w) and np.isclose(H[0, 5], -w)
        assert np.allclose(H, H.T)

    def test_triangular(self):
        assert np.array_equal(build("triangular2x2", alpha=2, E1=1, E2=3), [[1, 4], [0, 3]])


class TestDisorder:
    def test_golden_values(self):
        # frozen output of the Philox-4x64 stream, guards cross-platform determinism
        assert models.random_potential(5, 1.0, 0).tolist() == [
            -0.9718659286687046, -0.48446550875076455, -0.05686923796942067,
            -0.8171606577852626, 0.9582690001308065,
        ]
        assert models.random_potential(3, 2.5, 7).tolist() == [
            -0.1559125652203357, -0.36927081880407675, -0.6850914958319958,
        ]

    @given(st.integers(0, 2**64 - 1))
    def test_zero_amplitude_is_clean(self, seed):
        a = build("hn_random", L=6, g=0.1, V=0.0, seed=seed)
        assert np.array_equal(a, build("hn_periodic", L=6, g=0.1))

    def test_same_seed_bit_identical(self):
        a = build("hn_random", L=11, g=0.1, V=2.5, seed=42)
        b = build("hn_random", L=11, g=0.1, V=2.5, seed=42)
        assert a.tobytes() == b.tobytes()

    def test_seeds_differ(self):
        assert not np.array_equal(build("hn_random", L=5, V=1.0, seed=1), build("hn_random", L=5, V=1.0, seed=2))

    def test_bounds(self):
        v = models.random_potential(1000, 2.5, 3)
        assert v.min() >= -2.5 and v.max() <= 2.5


class TestAnalytic:
    def test_open_chain_three_sites(self):
        for g in (0.0, 0.4):
            ref = models.analytic_reference("hn_open", L=3, g=g)
            assert np.allclose(ref.eigenvalues, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-15)

    def test_pt_dimer_values(self):
        ref = models.analytic_reference("pt_dimer", gamma=0.5)
        assert np.allclose(ref.eigenvalues, [-math.sqrt(0.75), math.sqrt(0.75)], atol=1e-15)

    def test_periodic_chain_ellipse_form(self):
        L, g = 11, 0.1
        k = 2 * np.pi * np.arange(1, L + 1) / L
        E = -2 * np.cos(k) * np.cosh(g) - 2j * np.sin(k) * np.sinh(g)
        assert spectral_distance(E, eigvals(build("hn_periodic", L=L, g=g))) <= 1e-12

    @pytest.mark.parametrize("spec", CLOSED, ids=lambda s: s.family)
    def test_matches_numerics(self, spec):
        ref = models.analytic_reference(spec)
        assert spectral_distance(ref.eigenvalues, eigvals(build(spec))) <= 1e-9

    @pytest.mark.parametrize("spec", CLOSED, ids=lambda s: s.family)
    def test_vectors_biorthonormal(self, spec):
        ref = models.analytic_reference(spec)
        H = build(spec)
        n = len(H)
        assert np.allclose(ref.right_vectors.conj().T @ ref.left_vectors, np.eye(n), atol=1e-12)
        assert np.allclose(H @ ref.right_vectors, ref.right_vectors * ref.eigenvalues, atol=1e-12)
        assert np.allclose(H.conj().T @ ref.left_vectors, ref.left_vectors * ref.eigenvalues.conj(), atol=1e-12)

    @pytest.mark.parametrize("family", ["hn_impurity", "hn_random"])
    def test_disorder_has_no_closed_form(self, family):
        with pytest.raises(NoClosedForm):
            models.analytic_reference(family, L=5)

    def test_exceptional_point(self):
        with pytest.raises(NoClosedForm):
            models.analytic_reference("pt_dimer", gamma=1.0)

    @given(st.integers(2, 16), st.floats(-1, 1))
    def test_open_chain_g_independent(self, L, g):
        assert spectral_distance(eigvals(build("hn_open", L=L, g=g)), eigvals(build("hn_open", L=L))) <= 1e-9

    @given(st.integers(3, 20), st.floats(0.01, 1.0))
    def test_ellipse(self, L, g):
        E = eigvals(build("hn_periodic", L=L, g=g))
        r = (E.real / math.cosh(g)) ** 2 + (E.imag / math.sinh(g)) ** 2
        assert np.allclose(r, 4, atol=1e-8)


class TestNaturalBasis:
    def test_open_chain_metric_is_diagonal(self):
        B = models.natural_basis("hn_open", L=6, g=0.2)
        S = B.phi @ B.phi.conj().T
        assert np.allclose(S, np.diag(np.exp(0.4 * np.arange(6))), atol=1e-12)

    def test_without_closed_form_falls_back(self):
        B = models.natural_basis("hn_impurity", L=6, g=0.2)
        assert np.allclose(np.linalg.norm(B.phi, axis=0), 1)


class TestSymmetry:
    def test_parity(self):
        P = models.symmetry_ops("pt_dimer", gamma=0.3)["parity"]
        assert np.array_equal(P, [[0, 1], [1, 0]])

    def test_shift_layout(self):
        S = models.symmetry_ops("hn_periodic", L=4)["shift"]
        expected = np.zeros((4, 4))
        expected[[1, 2, 3, 0], [0, 1, 2, 3]] = 1
        assert np.array_equal(S, expected)

    def test_periodic_chain_commutes(self):
        spec = ModelSpec("hn_periodic", {"L": 11, "g": 0.1})
        ops = models.symmetry_ops(spec)
        H = build(spec)
        assert np.linalg.norm(H @ ops["shift"] - ops["shift"] @ H) <= 1e-12
        for U in ops.values():
            assert np.allclose(U.conj().T @ U, np.eye(11), atol=1e-12)

    def test_rl_chain_ops(self):
        spec = ModelSpec("rl_chain", {"L": 4, "delta": 0.3, "gamma": 0.5})
        ops = models.symmetry_ops(spec)
        H = build(spec)
        assert np.allclose(ops["parity"] @ ops["parity"], np.eye(8))
        assert np.linalg.norm(H @ ops["shift"] - ops["shift"] @ H) <= 1e-12
        assert models.pt_check(H, ops["parity"]) <= 1e-12
        F = ops["fourier"]
        D = F.conj().T @ H @ F
        off = D - np.kron(np.eye(4), np.ones((2, 2))) * D
        assert np.linalg.norm(off) <= 1e-12

    def test_open_chain_unsupported(self):
        with pytest.raises(UnsupportedSymmetry):
            models.symmetry_ops("hn_open", L=4)

    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_pt_dimer_symmetric(self, t, g):
        H = build("pt_dimer", t_h=t, gamma=g)
        assert models.pt_check(H, models.exchange_matrix(2)) <= 1e-12

    def test_open_chain_not_pt_symmetric(self):
        H = build("hn_open", L=5, g=0.2)
        assert models.pt_check(H, models.exchange_matrix(5)) > 0.1

    def test_pt_symmetry_survives_the_chain(self):
        t = models.model_chain("pt_dimer", 2, gamma=0.5)
        P = models.exchange_matrix(2)
        for node in t.nodes.values():
            A = node.hamiltonian
            assert models.pt_check(A, P) <= 1e-8 * max(1, np.linalg.norm(A))


class TestRLBlocks:
    def test_hermitian_limit(self):
        L = 5
        for n, b in enumerate(models.rl_blocks("rl_chain", L=L, delta=0.0, gamma=0.0), 1):
            k = 2 * np.pi * n / L
            assert np.allclose(b, b.conj().T)
            m = abs(1 + np.exp(1j * k))
            assert np.allclose(np.sort(np.linalg.eigvalsh(b)), [-m, m], atol=1e-14)

    def test_block_union_is_spectrum(self):
        spec = ModelSpec("rl_chain", {"L": 6, "delta": 0.3, "gamma": 0.7})
        union = np.concatenate([np.linalg.eigvals(b) for b in models.rl_blocks(spec)])
        assert spectral_distance(union, eigvals(build(spec))) <= 1e-9

    def test_all_real_example(self):
        E = eigvals(build("rl_chain", L=4, t_h=1, delta=0.3, gamma=0.1))
        assert classify_spectrum(E) == "all-real"

    @pytest.mark.parametrize("delta,gamma,expected", [
        (0.3, 0.1, "all-real"), (0.3, 2.5, "all-imaginary"), (0.3, 1.0, "mixed"), (1.5, 1.5, "all-real"),
    ])
    def test_thresholds(self, delta, gamma, expected):
        assert models.rl_threshold_class(1.0, delta, gamma) == expected
        if expected != "mixed":
            E = eigvals(build("rl_chain", L=6, delta=delta, gamma=gamma))
            assert classify_spectrum(E) == expected

    def test_wrong_family(self):
        with pytest.raises(InvalidSpec):
            models.rl_blocks("hn_open", L=3)


class TestGauge:
    def test_zero_field(self):
        S, Hs = models.gauge_symmetrize("hn_open", L=5, g=0.0)
        assert np.array_equal(S, np.eye(5)) and np.array_equal(Hs, build("hn_open", L=5))

    def test_symmetric_hoppings(self):
        _, Hs = models.gauge_symmetrize("hn_open", L=11, g=0.1, t_h=1.0)
        assert np.linalg.norm(Hs - build("hn_open", L=11)) <= 1e-10
        assert np.allclose(np.diag(Hs, 1), -1, atol=1e-15)

    def test_square_is_metric(self):
        spec = ModelSpec("hn_open", {"L": 11, "g": 0.1})
        S, _ = models.gauge_symmetrize(spec)
        M = models.model_chain(spec, 1).metrics["0"]
        assert np.max(np.abs(S @ S - M.S_phi)) <= 1e-9
        Si = np.linalg.inv(S)
        assert np.max(np.abs(Si @ Si - M.S_psi)) <= 1e-9

    def test_wrong_family(self):
        with pytest.raises(InvalidSpec):
            models.gauge_symmetrize("hn_periodic", L=3)


class TestTwoSiteParams:
    def test_symmetric_case(self):
        assert models.santos_params(1.7, 0.0) == (1.7, 0.0)

    def test_example(self):
        t, g = models.santos_params(1.0, 0.6)
        assert math.isclose(t, 0.8) and math.isclose(g, 0.5 * math.log(4))

    @given(st.floats(-3, 3), st.floats(-0.99, 0.99))
    def test_round_trip(self, gp, k):
        t, g = models.santos_params(gp, k)
        H = build("hn_open", L=2, t_h=t, g=g)
        assert np.max(np.abs(H - models.santos_matrix(gp, k))) <= 1e-12 * max(1, abs(gp)) * 4

    @pytest.mark.parametrize("k", [1.0, -1.0, 2.0])
    def test_out_of_range(self, k):
        with pytest.raises(InvalidSpec):
            models.santos_params(1.0, k)


class TestImpurityCount:
    def test_two_more_real_eigenvalues(self):
        def n_real(E):
            return int(np.sum(np.abs(E.imag) <= real_cutoff(E)))

        clean = eigvals(build("hn_periodic", L=11, g=0.1))
        dirty = eigvals(build("hn_impurity", L=11, g=0.1, v=1.0))
        assert n_real(clean) == 1
        assert n_real(dirty) == n_real(clean) + 2
