"""Exact ultimate-ruin probabilities for the discrete-time risk process
``U(t) = u + t - (Y_1 + ... + Y_t)`` with claims on ``{0, ..., m}``."""

from .distribution import (
    ClaimsDistribution,
    binomial,
    load_distribution,
    mean,
    new_distribution,
    tail,
)
from .errors import (
    DegenerateRatio,
    DeflationResidual,
    DimensionMismatch,
    DistributionError,
    IllConditioned,
    ImaginaryResidue,
    InvalidAb0,
    NegativeProbability,
    NetProfitViolated,
    NoConvergence,
    NumericalError,
    RuinKitError,
    SingularSystem,
    StructureViolation,
    SumNotOne,
    SupportTooSmall,
)
from .oracle import McConfig, McEstimate, recursion_oracle, simulate_ruin
from .recurrence import alphas, char_poly, initial_values
from .roots import Root, RootConfig, RootSet, classify, find_roots
from .ruin import (
    Ab0Params,
    RuinSolution,
    ab0_approx,
    approx1,
    approx2,
    evaluate,
    evaluate_many,
    gambler_exact,
    geometric_exact,
    solve,
)
from .solver import build_z, solve_coeffs

__version__ = "0.1.0"

__all__ = [
    "ab0_approx",
    "Ab0Params",
    "alphas",
    "approx1",
    "approx2",
    "binomial",
    "build_z",
    "char_poly",
    "ClaimsDistribution",
    "classify",
    "DeflationResidual",
    "DegenerateRatio",
    "DimensionMismatch",
    "DistributionError",
    "evaluate",
    "evaluate_many",
    "find_roots",
    "gambler_exact",
    "geometric_exact",
    "IllConditioned",
    "ImaginaryResidue",
    "initial_values",
    "InvalidAb0",
    "load_distribution",
    "McConfig",
    "McEstimate",
    "mean",
    "NegativeProbability",
    "NetProfitViolated",
    "new_distribution",
    "NoConvergence",
    "NumericalError",
    "recursion_oracle",
    "Root",
    "RootConfig",
    "RootSet",
    "RuinKitError",
    "RuinSolution",
    "simulate_ruin",
    "SingularSystem",
    "solve",
    "solve_coeffs",
    "StructureViolation",
    "SumNotOne",
    "SupportTooSmall",
    "tail",
]
