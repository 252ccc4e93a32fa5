"""Conditional generative moment-matching networks.

Kernel mean embeddings, MMD/CMMD estimators, a feedforward generator
trained by minibatch gradient descent on the conditional MMD objective,
and a Bayesian dark-knowledge distillation harness.
"""

from .conditional import (
    CmmdEstimate,
    ConditionalEmbedding,
    ConditioningMatrices,
    cmmd2,
    cmmd2_sample_gradient,
    conditioning_matrices,
)
from .datasets import (
    Domain,
    FileFormatError,
    PairedDataset,
    gen_conditional_gaussian,
    gen_cubic_toy,
    gen_label_conditional_mixture,
    load_csv,
    load_idx_subset,
)
from .distill import (
    BayesianPolynomialRegression,
    DistillationSet,
    distill,
    evaluate_rmse,
    predictive_table,
    sample_teacher,
)
from .embeddings import (
    MeanEmbedding,
    empirical_embedding,
    mmd2_biased,
    mmd2_as_trace,
    mmd_permutation_test,
)
from .estimator import CGMMN, TrainingDivergedError
from .kernels import DeltaKernel, LinearKernel, RBFKernel, kernel_from_name, median_bandwidth_sq
from .linalg import NotPositiveDefiniteError, RegularizedCholesky, default_reg_lambda, reg_cholesky
from .network import GeneratorNet, init_net, load_net, sample_hidden, save_net
from .optim import Adam

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "BayesianPolynomialRegression",
    "CGMMN",
    "CmmdEstimate",
    "ConditionalEmbedding",
    "ConditioningMatrices",
    "DeltaKernel",
    "DistillationSet",
    "Domain",
    "FileFormatError",
    "GeneratorNet",
    "LinearKernel",
    "MeanEmbedding",
    "NotPositiveDefiniteError",
    "PairedDataset",
    "RBFKernel",
    "RegularizedCholesky",
    "TrainingDivergedError",
    "cmmd2",
    "cmmd2_sample_gradient",
    "conditioning_matrices",
    "default_reg_lambda",
    "distill",
    "empirical_embedding",
    "evaluate_rmse",
    "gen_conditional_gaussian",
    "gen_cubic_toy",
    "gen_label_conditional_mixture",
    "init_net",
    "kernel_from_name",
    "load_csv",
    "load_idx_subset",
    "load_net",
    "median_bandwidth_sq",
    "mmd2_as_trace",
    "mmd2_biased",
    "mmd_permutation_test",
    "predictive_table",
    "reg_cholesky",
    "sample_hidden",
    "sample_teacher",
    "save_net",
]
