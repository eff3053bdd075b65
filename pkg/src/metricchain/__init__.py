"""Metric operators and chains of isospectral Hamiltonians built from the
biorthogonal eigenbases of a non-Hermitian matrix."""

from .biortho import (
    BiorthogonalSystem,
    build_biorthogonal,
    dual_basis,
    gram_matrix,
    rephase,
    rescale,
    resolution_residual,
)
from .chain import (
    ChainNode,
    ChainTree,
    MetricPair,
    build_metrics,
    flat,
    grow_chain,
    intertwine_residual,
    lemma1_check,
    power_identity_residuals,
    promote_vectors,
    sharp,
    tree_from_dict,
    tree_to_dict,
    weighted_inner,
)
from .errors import *
from .linalg import (
    Eigensystem,
    cond_estimate,
    dagger,
    eig,
    eigvals,
    inverse,
    load_matrix,
    matmul,
    positive_sqrt,
    save_matrix,
)
from .models import (
    AnalyticEigensystem,
    ModelSpec,
    analytic_reference,
    build,
    gauge_symmetrize,
    model_chain,
    natural_basis,
    pt_check,
    rl_blocks,
    santos_params,
    symmetry_ops,
)
from .tolerances import DEFAULT, Tolerances
from .verify import (
    VerificationReport,
    classify_spectrum,
    full_suite,
    remark1_suite,
    theorem1_suite,
)

__version__ = "0.1.0"
