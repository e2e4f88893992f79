"""Weighted preferential attachment for coauthorship networks.

Simulate the weight system, solve its limiting recursion (integer weights)
or integral equation (continuous weights), and compare the two.
"""
from .analysis import (
    aggregate_ensemble, doubling_ratio_exponent, hill_exponent, sup_distance,
)
from .engine import (
    SimState, empirical_tail_fraction, empirical_weight_counts, inclusion_probability,
    init_state, run, sample_group, step,
)
from .laws import Constant, DiscretePmf, Exponential, Gamma, Uniform
from .limit_continuous import (
    continuous_coefficients, eval_kernel_L, gamma_continuous, solve_G,
)
from .limit_discrete import (
    coefficient_decomposition, gamma_discrete, solve_recursion, tail_constant_estimate,
)
from .model import (
    AuthorCountLaw, EqualSplit, ExchangeableIid, FullBonus, Mode, ModelConfig, Truncation,
    ab_config, eval_F, eval_H, eval_H_atom, theoretical_moments, validate_config,
)
from .rng import Streams

__version__ = "0.1.0"
