import json

import numpy as np
import pytest
from conftest import random_complex
from hypothesis import given
from hypothesis import strategies as st

from metricchain import biortho, chain, models
from metricchain.chain import flat, sharp
from metricchain.errors import ChainError, DepthTooShallow, IllConditionedBasis
from metricchain.linalg import cond_estimate, dagger, eigvals, spectral_distance

G = 0.1
L = 11


def open_chain_tree(depth=3, L=L, g=G):
    return models.model_chain("hn_open", depth, L=L, g=g)


def hoppings(A):
    """(upper, lower) off-diagonals of a tridiagonal matrix, checked tridiagonal."""
    up, lo = np.diag(A, 1), np.diag(A, -1)
    rest = A - np.diag(up, 1) - np.diag(lo, -1) - np.diag(np.diag(A))
    assert np.max(np.abs(rest)) <= 1e-8 * np.max(np.abs(A))
    return up, lo


class TestMetrics:
    def test_hermitian_seed_gives_identity(self, rng):
        A = random_complex(rng, 4)
        B = biortho.build_biorthogonal(A + dagger(A))
        M = chain.build_metrics(B)
        assert np.allclose(M.S_phi, np.eye(4), atol=1e-12)
        assert np.allclose(M.S_psi, np.eye(4), atol=1e-12)

    def test_open_chain_diagonal(self):
        M = open_chain_tree(1).metrics["0"]
        x = np.arange(L)
        assert np.max(np.abs(M.S_phi - np.diag(np.exp(2 * G * x)))) <= 1e-9
        assert np.max(np.abs(M.S_psi - np.diag(np.exp(-2 * G * x)))) <= 1e-9

    def test_triangular_alpha_one(self):
        M = models.model_chain("triangular2x2", 1, alpha=1.0, E1=1, E2=2).metrics["0"]
        assert np.allclose(M.S_phi, [[2, 1], [1, 1]], atol=1e-14)
        assert np.allclose(M.S_psi, [[1, -1], [-1, 2]], atol=1e-14)

    def test_metrics_map_the_families(self, rng):
        B = biortho.build_biorthogonal(random_complex(rng, 5))
        M = chain.build_metrics(B)
        assert np.linalg.norm(M.S_phi @ B.psi - B.phi) <= 1e-8
        assert np.linalg.norm(M.S_psi @ B.phi - B.psi) <= 1e-8
        assert M.inv_residual <= 1e-8
        assert np.linalg.eigvalsh(M.S_phi)[0] > 0


class TestAdjoints:
    def test_identity_metric_gives_dagger(self, rng):
        X = random_complex(rng, 3)
        M = chain.identity_metric(3)
        assert np.array_equal(sharp(X, M), dagger(X))
        assert np.array_equal(flat(X, M), dagger(X))

    def test_open_chain_sharp_is_h(self):
        t = open_chain_tree(1)
        assert np.max(np.abs(t["sharp0"].hamiltonian - t.hamiltonian)) <= 1e-9

    def test_open_chain_flat_hoppings(self):
        up, lo = hoppings(open_chain_tree(1)["flat0"].hamiltonian)
        assert np.allclose(up, -np.exp(3 * G), atol=1e-12)
        assert np.allclose(lo, -np.exp(-3 * G), atol=1e-12)

    def test_triangular_flat_triple_product(self):
        # S_psi H^+ S_phi at alpha = 1, E = (1, 2), multiplied out by hand
        t = models.model_chain("triangular2x2", 1, alpha=1.0, E1=1, E2=2)
        assert np.allclose(t["flat0"].hamiltonian, [[-2, -2], [6, 5]], atol=1e-13)

    @given(st.integers(0, 2**32))
    def test_involution_pairing(self, seed):
        rng = np.random.Generator(np.random.Philox(seed))
        B = biortho.build_biorthogonal(random_complex(rng, 4))
        M = chain.build_metrics(B)
        for _ in range(20):
            X = random_complex(rng, 4)
            scale = np.linalg.norm(M.S_phi) * np.linalg.norm(X) * np.linalg.norm(M.S_psi)
            assert np.linalg.norm(dagger(flat(X, M)) - sharp(dagger(X), M)) <= 1e-12 * scale
            assert np.linalg.norm(dagger(sharp(X, M)) - flat(dagger(X), M)) <= 1e-12 * scale


class TestWeightedInner:
    def test_identity_is_ordinary_product(self, rng):
        f, g = rng.standard_normal(3) + 1j, rng.standard_normal(3) - 2j
        assert np.isclose(chain.weighted_inner(f, g, np.eye(3)), np.vdot(f, g))

    def test_psi_orthonormal_under_s_phi(self, rng):
        B = biortho.build_biorthogonal(random_complex(rng, 4))
        M = chain.build_metrics(B)
        G_ = np.array([[chain.weighted_inner(B.psi[:, n], B.psi[:, m], M.S_phi) for m in range(4)]
                       for n in range(4)])
        assert np.allclose(G_, np.eye(4), atol=1e-9)

    def test_positive_and_conjugate_symmetric(self, rng):
        B = biortho.build_biorthogonal(random_complex(rng, 4))
        S = chain.build_metrics(B).S_phi
        for _ in range(100):
            f = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            g = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            assert chain.weighted_inner(f, f, S).real > 0
            assert np.isclose(chain.weighted_inner(f, g, S), np.conj(chain.weighted_inner(g, f, S)))


class TestPromote:
    def test_identity_metric_keeps_system(self, rng):
        B = biortho.build_biorthogonal(random_complex(rng, 3))
        P = chain.promote_vectors(B, chain.identity_metric(3))
        assert np.array_equal(P.phi, B.phi) and np.array_equal(P.psi, B.psi)

    def test_open_chain_envelope(self):
        t = open_chain_tree(2)
        phi = t.bases["E_flat0"].phi
        x = np.arange(1, L + 1)
        for n in range(L):
            k = (n + 1) * np.pi / (L + 1)
            ref = np.exp(3 * G * (x - 1)) * np.sin(k * x)
            c = np.vdot(ref, phi[:, n]) / np.vdot(ref, ref)
            assert np.linalg.norm(phi[:, n] - c * ref) <= 1e-9 * np.linalg.norm(phi[:, n])

    def test_triangular_promoted_vectors(self):
        t = models.model_chain("triangular2x2", 2, alpha=1.0, E1=1, E2=2)
        P = t.bases["E_flat0"]
        assert np.allclose(P.phi[:, 0], [2, 1])
        assert np.allclose(P.psi[:, 0], [2, -3])
        assert P.gram_residual < 1e-12

    def test_unknown_kind(self, rng):
        B = biortho.build_biorthogonal(random_complex(rng, 2))
        with pytest.raises(ValueError):
            chain.promote_vectors(B, chain.identity_metric(2), "round")


class TestGrowChain:
    @pytest.mark.parametrize("depth,count", [(0, 2), (1, 6), (2, 10), (3, 18)])
    def test_node_counts(self, depth, count):
        t = open_chain_tree(depth, L=5)
        assert len(t.nodes) == count == chain.expected_node_count(depth)
        assert t.depth == depth

    def test_sharp_basis_is_an_alias(self):
        t = open_chain_tree(1, L=5)
        assert t.aliases == {"E_sharp0": "E"}
        assert "E_sharp0" not in t.bases

    def test_hermitian_seed(self, rng):
        A = random_complex(rng, 4)
        H = A + dagger(A)
        t = chain.grow_chain(H, 3)
        for node in t.nodes.values():
            assert np.allclose(node.hamiltonian, H, atol=1e-10)
        for M in t.metrics.values():
            assert np.allclose(M.S_phi, np.eye(4), atol=1e-10)

    def test_open_chain_second_iteration(self):
        t = open_chain_tree(2)
        up, lo = hoppings(t["flat1"].hamiltonian)
        assert np.allclose(up, -np.exp(7 * G), rtol=1e-9)
        assert np.allclose(lo, -np.exp(-7 * G), rtol=1e-9)
        up, lo = hoppings(t["sharp1"].hamiltonian)
        assert np.allclose(up, -np.exp(-5 * G), rtol=1e-9)
        assert np.allclose(lo, -np.exp(5 * G), rtol=1e-9)

    def test_open_chain_third_iteration_exponents(self):
        t = open_chain_tree(3)
        expected = {"sharp2a": 11, "flat2a": -9, "sharp2b": -13, "flat2b": 15}
        for label, e in expected.items():
            up, lo = hoppings(t[label].hamiltonian)
            assert np.allclose(up, -np.exp(e * G), rtol=1e-8)
            assert np.allclose(lo, -np.exp(-e * G), rtol=1e-8)

    def test_pt_dimer_closed_forms(self):
        t = models.model_chain("pt_dimer", 2, gamma=0.5)
        ref = models.pt_dimer_closed_forms(0.5)
        for label in ("sharp0", "flat0", "sharp1", "flat1"):
            assert np.allclose(t[label].hamiltonian, ref[label], atol=1e-12), label
        assert np.allclose(t.metrics["1"].S_phi, ref["S_phi1"], atol=1e-12)
        assert np.allclose(t.metrics["1"].S_psi, ref["S_psi1"], atol=1e-12)

    def test_isospectral_nodes(self):
        t = models.model_chain("hn_random", 3, L=8, g=0.2, V=1.0, seed=4)
        E = t.seed.eigenvalues
        for node in t.nodes.values():
            target = E if node.conj_class == chain.SPECTRUM_H else np.conj(E)
            bound = chain.spectral_tolerance(node.hamiltonian, node.eigenvectors)
            assert spectral_distance(eigvals(node.hamiltonian), target) <= bound

    def test_failure_carries_partial_tree(self):
        with pytest.raises(ChainError) as info:
            open_chain_tree(3, L=11, g=0.5)
        err = info.value
        assert err.node == "metric 1"
        assert err.partial_tree.depth == 1
        assert len(err.partial_tree.nodes) == 6

    def test_bad_depth(self):
        with pytest.raises(ValueError):
            chain.grow_chain(np.diag([1.0, 2.0]), 4)

    def test_foreign_basis_rejected(self, rng):
        B = biortho.build_biorthogonal(random_complex(rng, 3))
        with pytest.raises(IllConditionedBasis):
            chain.grow_chain(random_complex(rng, 4), 1, basis=B)


class TestPowerIdentities:
    def test_identity_metrics(self):
        t = chain.grow_chain(np.diag([1.0, 2.0, 3.0]), 3)
        assert all(r == 0 for r in chain.power_identity_residuals(t).values())

    def test_open_chain(self):
        r = chain.power_identity_residuals(open_chain_tree(3))
        assert len(r) == 6 and max(r.values()) <= 1e-9
        x = np.arange(L)
        S1 = open_chain_tree(2).metrics["1"].S_phi
        assert np.allclose(np.diag(S1), np.exp(6 * G * x), rtol=1e-12)

    def test_triangular_cube(self):
        t = models.model_chain("triangular2x2", 2, alpha=1.0, E1=1, E2=2)
        assert np.allclose(t.metrics["1"].S_phi, [[13, 8], [8, 5]], atol=1e-12)

    def test_too_shallow(self):
        with pytest.raises(DepthTooShallow):
            chain.power_identity_residuals(open_chain_tree(1, L=4))

    @given(st.integers(0, 2**32))
    def test_random_seeds(self, seed):
        rng = np.random.Generator(np.random.Philox(seed))
        H = np.eye(4) + 0.3 * random_complex(rng, 4)
        try:
            t = chain.grow_chain(H, 3)
        except ChainError as exc:
            # only the condition guard may stop the chain: cond(S2b) = cond(S0)^7
            S0 = chain.build_metrics(biortho.build_biorthogonal(H)).S_phi
            assert exc.node.startswith("metric") and cond_estimate(S0) ** 7 > 1e11
            return
        assert max(chain.power_identity_residuals(t).values()) <= 1e-8


class TestIntertwining:
    def test_trivial(self, rng):
        A = random_complex(rng, 3)
        assert chain.intertwine_residual(np.eye(3), A, A) == 0

    @pytest.mark.parametrize("family,params", [
        ("hn_open", {"L": 7, "g": 0.3}),
        ("pt_dimer", {"gamma": 0.4}),
        ("hn_impurity", {"L": 7, "g": 0.1}),
    ])
    def test_sharp_intertwines_with_dagger(self, family, params):
        t = models.model_chain(family, 1, **params)
        M = t.metrics["0"]
        r = chain.intertwine_residual(M.S_psi, t["sharp0"].hamiltonian, dagger(t.hamiltonian))
        assert r <= 1e-8

    def test_periodic_chain_identity_metric(self):
        t = models.model_chain("hn_periodic", 1, L=11, g=0.1)
        M = t.metrics["0"]
        assert chain.intertwine_residual(M.S_phi, dagger(t.hamiltonian), t.hamiltonian) > 0.1
        assert np.max(np.abs(M.S_phi - np.eye(11))) <= 1e-10


class TestAdjointInvolution:
    def test_commuting_x(self):
        M = open_chain_tree(1).metrics["0"]
        assert chain.lemma1_check(M.S_phi, M).all_true

    def test_open_chain_hamiltonian(self):
        t = open_chain_tree(1)
        assert chain.lemma1_check(t.hamiltonian, t.metrics["0"]).all_false

    def test_identity_metric(self, rng):
        assert chain.lemma1_check(random_complex(rng, 3), chain.identity_metric(3)).all_true


class TestSerialisation:
    def test_round_trip(self):
        t = models.model_chain("pt_dimer", 3, gamma=0.5)
        d = chain.tree_to_dict(t)
        back = chain.tree_from_dict(json.loads(json.dumps(d)))
        assert back.labels == t.labels
        assert back.model == t.model
        for k in t.nodes:
            assert np.array_equal(back[k].hamiltonian, t[k].hamiltonian)
        assert chain.tree_to_dict(back) == d
