"""Small helpers shared by the demo scripts."""

import numpy as np

_METRIC_KEYS = {
    "S_phi": ("0", "S_phi"),
    "S_psi": ("0", "S_psi"),
    "S_phi1": ("1", "S_phi"),
    "S_psi1": ("1", "S_psi"),
}


def show(name, X, precision=6):
    print(f"{name}:")
    print(np.array2string(np.real_if_close(X), precision=precision, suppress_small=True))


def lookup(tree, key):
    """Tree quantity named like the keys of the closed-form dictionaries."""
    if key in _METRIC_KEYS:
        level, side = _METRIC_KEYS[key]
        return getattr(tree.metrics[level], side)
    if key == "eigenvalues":
        return np.sort_complex(tree["H"].eigenvalues)
    return tree[key].hamiltonian


def compare(tree, reference):
    print("deviation from closed forms (max abs):")
    for key, X in reference.items():
        got = lookup(tree, key)
        X = np.sort_complex(X) if key == "eigenvalues" else X
        print(f"  {key:12s} {np.max(np.abs(got - X)):.2e}")
