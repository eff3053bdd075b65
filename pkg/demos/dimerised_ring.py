"""Dimerised PT-symmetric ring: spectrum class against the gain/loss gamma.

The ring block-diagonalises into 2x2 Fourier blocks, so the class of the
full spectrum follows from closed-form block eigenvalues.  The scan compares
the numerically observed class with the sufficient thresholds
``2 min(1, |delta|) t_h`` and ``2 max(1, |delta|) t_h``.  On a threshold a
block is defective, so its eigenvalues are only good to about 1e-8.

Run:  python3 demos/dimerised_ring.py [delta]
"""

import sys

import numpy as np
from scipy.optimize import linear_sum_assignment

from metricchain import models, verify

L, T_H = 6, 1.0


def block_spectrum(delta, gamma):
    blocks = models.rl_blocks("rl_chain", L=L, t_h=T_H, delta=delta, gamma=gamma)
    return np.concatenate([np.linalg.eigvals(b) for b in blocks])


def main(delta=0.3):
    lo, hi = 2 * min(1, abs(delta)) * T_H, 2 * max(1, abs(delta)) * T_H
    print(f"L = {L}, delta = {delta}: all-real below {lo:.3g}, all-imaginary above {hi:.3g}")
    print(" gamma   observed         thresholds       full-vs-block")
    for gamma in np.round(np.linspace(0.0, 2.8, 15), 3):
        H = models.build("rl_chain", L=L, t_h=T_H, delta=delta, gamma=gamma)
        full = np.linalg.eigvals(H)
        blocks = block_spectrum(delta, gamma)
        seen = verify.classify_spectrum(full)
        pred = models.rl_threshold_class(T_H, delta, gamma)
        cost = np.abs(full[:, None] - blocks[None, :])
        rows, cols = linear_sum_assignment(cost)
        dev = cost[rows, cols].max()
        print(f" {gamma:5.2f}   {seen:15s}  {pred:15s}  {dev:.1e}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 0.3)
