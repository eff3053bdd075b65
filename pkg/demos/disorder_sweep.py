"""How often does a random potential make the asymmetric-hopping chain real?

Sweeps disorder seeds at several strengths V and reports the fraction of
realisations with an all-real spectrum, which is exactly when the chain is
pseudo-Hermitian with respect to its own metric.  Uses the same row function
as ``metricchain sweep``.

Run:  python3 demos/disorder_sweep.py [n_seeds]
"""

import sys

from metricchain import models
from metricchain.cli import sweep_row
from metricchain.tolerances import DEFAULT


def main(n_seeds=100):
    print(f"L = 11, g = 0.1, {n_seeds} seeds per strength")
    print("   V   all-real   mean real count   pseudo-Hermitian agrees")
    for V in (0.0, 0.5, 1.0, 2.5, 5.0):
        spec = models.ModelSpec("hn_random", {"L": 11, "g": 0.1, "V": V, "seed": 0})
        rows = [sweep_row(spec, s, DEFAULT) for s in range(n_seeds)]
        frac = sum(c == 0 for _, _, c, _ in rows) / n_seeds
        mean_real = sum(r for _, r, _, _ in rows) / n_seeds
        agrees = all(p == (c == 0) for _, _, c, p in rows)
        print(f" {V:4.1f}   {frac:8.2f}   {mean_real:15.2f}   {agrees}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 100)
