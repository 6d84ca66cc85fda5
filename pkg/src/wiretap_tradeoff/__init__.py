"""Secrecy-reliability tradeoff tools for discrete memoryless wiretap channels."""

from .measures import (
    AlphabetMismatch,
    Channel,
    Distribution,
    JointDistribution,
    bayes,
    cascade,
    compose,
    cond_entropy,
    cond_mutual_info,
    direct_product,
    divergence,
    entropy,
    joint,
    marginal,
    mutual_info,
    variation_distance,
)
from .exponents import AuxSpec, ExponentTriple, RateTuple, exponent_bound, exponent_triple
from .polytope import LinearSystem, Polytope, fm_eliminate, project, remove_redundant
from .region import MIQuantities, mi_quantities, rate_region, reduced_constraints

__version__ = "0.1.0"

__all__ = [
    "AlphabetMismatch", "Channel", "Distribution", "JointDistribution", "bayes", "cascade",
    "compose", "cond_entropy", "cond_mutual_info", "direct_product", "divergence", "entropy",
    "joint", "marginal", "mutual_info", "variation_distance", "AuxSpec", "ExponentTriple",
    "RateTuple", "exponent_bound", "exponent_triple", "LinearSystem", "Polytope",
    "fm_eliminate", "project", "remove_redundant", "MIQuantities", "mi_quantities",
    "rate_region", "reduced_constraints",
]
