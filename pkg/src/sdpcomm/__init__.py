"""Community detection on graphs with node covariates.

The estimator solves the semidefinite relaxation

    maximize  <A + lambda_n K, X>
    over      X PSD, X >= 0, X 1 = 1, trace X = r

where A is the adjacency matrix, K a Gaussian kernel on node covariates and
lambda_n = lambda_0 / n the trade-off weight, then rounds the solution matrix
to labels by spectral clustering.  The package also evaluates the closed-form
error bounds of the underlying analysis and ships exact small-scale oracles
for checking them numerically.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateDataError,
    DimensionError,
    InvalidLabelsError,
    OutOfRegimeError,
    ParameterError,
    SdpCommError,
    SizeLimitError,
    TuningError,
)
from .generate import replicate_seeds, sample_mixture, sample_sbm
from .kernels import chi_square_quantile, gaussian_kernel, split_sample_pca, tune_bandwidth
from .model import (
    Labels,
    MixtureParams,
    SbmParams,
    average_edge_variance,
    classify_assortativity,
    expected_adjacency,
    ground_truth_matrix,
)
from .rounding import (
    RoundingConfig,
    accuracy,
    kmeans,
    misclassification_bound,
    misclassified,
    nmi,
    relative_frobenius_error,
    spectral_round,
)
from .solver import SdpSolution, SolverConfig, combine, project_affine, project_psd, solve_sdp
from .tuning import TuningGrid, default_lambda_grid, eigen_gap, select_lambda, select_lambda_and_r

__all__ = [
    "ConfigError",
    "DataFormatError",
    "DegenerateDataError",
    "DimensionError",
    "InvalidLabelsError",
    "Labels",
    "MixtureParams",
    "OutOfRegimeError",
    "ParameterError",
    "RoundingConfig",
    "SbmParams",
    "SdpCommError",
    "SdpSolution",
    "SizeLimitError",
    "SolverConfig",
    "TuningError",
    "TuningGrid",
    "accuracy",
    "average_edge_variance",
    "chi_square_quantile",
    "classify_assortativity",
    "combine",
    "default_lambda_grid",
    "eigen_gap",
    "expected_adjacency",
    "gaussian_kernel",
    "ground_truth_matrix",
    "kmeans",
    "misclassification_bound",
    "misclassified",
    "nmi",
    "project_affine",
    "project_psd",
    "relative_frobenius_error",
    "replicate_seeds",
    "sample_mixture",
    "sample_sbm",
    "select_lambda",
    "select_lambda_and_r",
    "solve_sdp",
    "spectral_round",
    "split_sample_pca",
    "tune_bandwidth",
]
