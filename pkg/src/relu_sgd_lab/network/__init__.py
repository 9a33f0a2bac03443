"""Network parameter layout, realizations, and smooth ReLU approximations."""

from relu_sgd_lab.network import smooth_relu
from relu_sgd_lab.network.net_core import (
    InputPoint,
    NetworkShape,
    ParamVector,
    StructuralError,
    active_indicator,
    active_mask,
    lipschitz_constant,
    pack,
    pre_activations,
    random_params,
    realize_exact,
    realize_smoothed,
    sup_gap,
    unpack,
)

__all__ = [
    "InputPoint",
    "NetworkShape",
    "ParamVector",
    "StructuralError",
    "active_indicator",
    "active_mask",
    "lipschitz_constant",
    "pack",
    "pre_activations",
    "random_params",
    "realize_exact",
    "realize_smoothed",
    "smooth_relu",
    "sup_gap",
    "unpack",
]
