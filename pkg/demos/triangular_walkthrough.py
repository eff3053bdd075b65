"""Smallest non-Hermitian example: an upper-triangular 2x2 matrix.

Prints the closed-form biorthogonal pair, the level-0 and level-1 metrics,
the first generated Hamiltonians, and their distance from hand-derived
matrices.

Run:  python3 demos/triangular_walkthrough.py [alpha]
"""

import sys

import numpy as np
from _common import compare, show

from metricchain import chain, models


def main(alpha=1.0):
    spec = models.ModelSpec("triangular2x2", {"alpha": alpha, "E1": 1.0, "E2": 2.0})
    tree = models.model_chain(spec, depth=2)
    show("H", tree.hamiltonian)
    show("phi (columns)", tree.seed.phi)
    show("psi (columns)", tree.seed.psi)

    M0 = tree.metrics["0"]
    show("S0_phi", M0.S_phi)
    show("S0_psi", M0.S_psi)
    print("S0_phi S0_psi = 1:", np.allclose(M0.S_phi @ M0.S_psi, np.eye(2)))

    for label in ("sharp0", "flat0", "sharp1", "flat1"):
        show(label, tree[label].hamiltonian)
        print("  eigenvalues:", np.round(np.sort_complex(tree[label].eigenvalues), 12))

    print()
    compare(tree, models.triangular_closed_forms(alpha, 1.0, 2.0))

    print("\nmetric powers:")
    for k, v in chain.power_identity_residuals(tree).items():
        print(f"  {k:18s} {v:.2e}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 1.0)
