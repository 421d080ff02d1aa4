"""frfit: kernel and rational interpolation of frequency response functions."""

from .baselines import (
    AAAModel,
    ChebyshevModel,
    SeparateSEModel,
    aaa_eval,
    aaa_fit,
    chebyshev_fit,
    separate_se_fit,
)
from .bench import (
    CircuitSpec,
    Grid,
    circuit_admittance,
    circuit_partial_fractions,
    convergence_study,
    equidistant_samples,
    f_rat,
    f_rat_beta,
    rmse,
    sample_random_circuit,
)
from .hybrid import (
    HyperParams,
    SelectionReport,
    backward_eliminate,
    fit_hybrid,
    fit_kernel_model,
    init_poles,
    kmax_rule,
    lognormal_prior_logpdf,
    loo_criterion,
    optimize_hyperparams,
    penalized_loglik,
    rational_basis,
    stabilized_criterion,
)
from .interpolate import (
    ComplexSample,
    FittedModel,
    LinearMeanSpec,
    TrainingSet,
    assemble_system,
    fit,
    predict,
    predict_widely_linear,
    rkhs_norm,
    validate_training,
)
from .kernels import (
    IM,
    RE,
    AugmentedPoint,
    KernelPair,
    KernelParams,
    augmented_kernel,
    pseudo_from_symmetry,
    se_kernel,
    stable_spline_k,
    stable_spline_pair,
    szego_c,
    szego_k,
    szego_pair,
)

__version__ = "0.1.0"
