"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`MetricChainError`, so callers (and the command line front end) can
separate numerical failures from programming errors.
"""


class MetricChainError(Exception):
    """Base class for all package errors."""


class InvalidMatrix(MetricChainError, ValueError):
    """Input is not a finite square complex matrix."""


class NoConvergence(MetricChainError):
    """The eigensolver did not deliver eigenpairs within the residual contract."""


class DegenerateSpectrum(MetricChainError):
    """Two eigenvalues coincide within the gap tolerance."""


class Singular(MetricChainError):
    """Matrix condition estimate exceeds the configured bound."""


class NotPositiveDefinite(MetricChainError):
    """Matrix is not Hermitian positive definite."""


class PairingAmbiguous(MetricChainError):
    """Left/right eigenvectors cannot be matched unambiguously."""


class IllConditionedBasis(MetricChainError):
    """A biorthogonal pair fails its Gram identity after normalisation."""


class MetricIllConditioned(MetricChainError):
    """A metric operator is too badly conditioned to be trusted."""


class DepthTooShallow(MetricChainError):
    """The requested identity needs a deeper chain tree."""


class InconsistentEquivalence(MetricChainError):
    """Statements that are mathematically equivalent disagree numerically."""


class WrongSpectrumClass(MetricChainError):
    """The operation needs a spectrum of a different class."""


class InvalidSpec(MetricChainError, ValueError):
    """A model specification is malformed."""


class NoClosedForm(MetricChainError):
    """No analytic eigensystem exists for this model family."""


class UnsupportedSymmetry(MetricChainError):
    """The model family does not carry the requested symmetry operator."""


class UnknownNodeLabel(MetricChainError, KeyError):
    """A chain node label is not present in the tree."""


class ChainError(MetricChainError):
    """Growing a chain tree failed at a specific node.

    The partially grown tree is attached so callers can inspect what was
    built before the failure.
    """

    def __init__(self, message, node, partial_tree=None):
        super().__init__(f"{node}: {message}")
        self.node = node
        self.partial_tree = partial_tree
