"""Numerical tolerances shared by every module."""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle; all values are overridable.

    Relative tolerances are multiplied by a matrix norm at the point of use,
    see the individual checks.
    """

    eig: float = 1e-10        # eigen-residual, relative to ||H||_F
    gap: float = 1e-8         # minimum eigenvalue gap, relative to max(1, rho)
    inv: float = 1e-12        # ||A A^-1 - 1||_F, relative to cond(A)
    sqrt: float = 1e-10       # ||B^2 - A||_F, relative to ||A||_F
    herm: float = 1e-10       # Hermiticity, relative to ||A||_F
    pd: float = 1e-12         # smallest admissible eigenvalue of a PD matrix
    cond_max: float = 1e12
    bio: float = 1e-8         # Gram / resolution-of-identity residuals
    metric: float = 1e-8      # metric inversion and convention independence
    chain: float = 1e-8       # node certificates, relative to the node norm
    real: float = 1e-8        # Im/Re cutoff, relative to 1 + spectral radius

    def updated(self, **overrides):
        """Return a copy with some fields replaced; unknown names raise."""
        known = {f.name for f in fields(self)}
        bad = set(overrides) - known
        if bad:
            raise ValueError(f"unknown tolerance(s): {sorted(bad)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT = Tolerances()
