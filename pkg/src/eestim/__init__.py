"""Monte Carlo maximum-likelihood estimation for exponential-family models.

Sampling (single-site Metropolis-Hastings), estimation (equilibrium
expectation with contrastive-divergence initialization and a
persistent-chain baseline), convergence diagnostics, concrete model
builders, and an exact enumeration oracle for small systems.
"""

from .convergence import ConvergenceReport, diagnose_trace, sigma_condition, t_ratio_test
from .core import BinaryState, Encoding, ModelSpec, Proposal, apply_proposal
from .errors import (
    ConfigError,
    ConvergenceFailure,
    DivergenceError,
    EnumerationSizeError,
    EstimError,
    InvalidInputError,
    NonexistenceError,
    ParseError,
)
from .estimators import (
    EstimationTrace,
    EstimatorConfig,
    StepSizeKind,
    cd_estimate,
    cd_estimate_ensemble,
    ee_estimate,
    ee_estimate_ensemble,
    ee_soft_step,
    ee_step,
    pcd_estimate,
    pcd_step,
    step_size,
    tail_average,
)
from .exact import (
    EnumerationTable,
    exact_expectations,
    exact_mle,
    exact_sample,
    log_likelihood,
    partition_function,
    theorem1_residual,
    transition_matrix,
)
from .models import (
    CrfFeatures,
    arc_endpoints,
    arc_index,
    build_crf,
    build_ising1d_periodic,
    build_ising2d,
    build_mini_ergm,
    build_vbm,
    crf_features,
    vbm_pair_index,
)
from .sampler import (
    RngStream,
    SweepResult,
    acceptance_prob,
    ensemble_mean_stats,
    equilibrate,
    equilibrate_ensemble,
    mh_step,
    propose_uniform_flip,
    run_sweep,
    spawn_generators,
)

__version__ = "0.1.0"
