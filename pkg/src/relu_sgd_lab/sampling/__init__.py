"""Input distributions, batch sampling, and integration rules."""

from relu_sgd_lab.sampling.input_model import (
    DATA_CHANNEL,
    INIT_CHANNEL,
    VERIFY_CHANNEL,
    DiscreteFinite,
    EmpiricalBatch,
    InputDistribution,
    IntegrationRule,
    UniformBox,
    discrete_rule,
    expectation_1d_piecewise,
    gauss_legendre_rule,
    quadrature_grid,
    sample_batch,
    substream,
)

__all__ = [
    "DATA_CHANNEL",
    "INIT_CHANNEL",
    "VERIFY_CHANNEL",
    "DiscreteFinite",
    "EmpiricalBatch",
    "InputDistribution",
    "IntegrationRule",
    "UniformBox",
    "discrete_rule",
    "expectation_1d_piecewise",
    "gauss_legendre_rule",
    "quadrature_grid",
    "sample_batch",
    "substream",
]
