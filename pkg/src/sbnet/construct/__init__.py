"""Explicit weights for shallow and deep universal approximators."""
from .arch import ArchPlan, RuleResult, ValidationReport, plan, validate_arch
from .deep import build_deep, overlaid_codes, prepare_target, second_layer_omegas
from .primitives import (
    SharingStep,
    alpha_for_eps,
    copy_layer,
    edge_hyperplane,
    error_bound,
    gamma_for_eps,
    gate_layer,
    invert_product_chain,
    invert_sharing_chain,
    largest_index_distribution,
    or_output_layer,
    orthant_map_weights,
    sharing_layer,
)
from .shallow import build_shallow_fixed, build_shallow_trainable, tune_mu

__all__ = [
    "ArchPlan",
    "RuleResult",
    "SharingStep",
    "ValidationReport",
    "alpha_for_eps",
    "build_deep",
    "build_shallow_fixed",
    "build_shallow_trainable",
    "copy_layer",
    "edge_hyperplane",
    "error_bound",
    "gamma_for_eps",
    "gate_layer",
    "invert_product_chain",
    "invert_sharing_chain",
    "largest_index_distribution",
    "or_output_layer",
    "orthant_map_weights",
    "overlaid_codes",
    "plan",
    "prepare_target",
    "second_layer_omegas",
    "sharing_layer",
    "tune_mu",
    "validate_arch",
]
