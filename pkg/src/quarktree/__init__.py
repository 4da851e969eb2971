"""Near-best adaptive approximation with Haar quarklet trees."""
from .bench import ExperimentRecord, RateFit, TestFunction, fit_rate, run_experiment
from .haar import (
    GramianSystem,
    QuadratureError,
    WeightRule,
    assemble_gramian,
    assemble_rhs,
    inner_product,
    l2_error,
    quark_eval,
    quarklet_eval,
    synthesize,
    weight,
)
from .indices import (
    ROOT,
    IndexRangeError,
    QuarkletIndex,
    QuarkletTree,
    WaveletIndex,
    WaveletTree,
    children,
    derive_pmax,
    parent,
    quarklet_cardinality,
    refine_space,
    refinement_count,
    upsilon,
    validate_quarklet_tree,
)
from .local_errors import CoefficientErrors, CoefficientSequence, global_error, local_error
from .nearbest import brute_force_sigma, certify, nearbest_steps, nearbest_tree, trim
from .solver import SolverConfig, SolveReport, adaptive_coefficients, residual_norm, richardson

__version__ = "0.1.0"

__all__ = [
    "adaptive_coefficients",
    "assemble_gramian",
    "assemble_rhs",
    "brute_force_sigma",
    "certify",
    "children",
    "CoefficientErrors",
    "CoefficientSequence",
    "derive_pmax",
    "ExperimentRecord",
    "fit_rate",
    "global_error",
    "GramianSystem",
    "IndexRangeError",
    "inner_product",
    "l2_error",
    "local_error",
    "nearbest_steps",
    "nearbest_tree",
    "parent",
    "QuadratureError",
    "quark_eval",
    "quarklet_cardinality",
    "quarklet_eval",
    "QuarkletIndex",
    "QuarkletTree",
    "RateFit",
    "refine_space",
    "refinement_count",
    "residual_norm",
    "richardson",
    "ROOT",
    "run_experiment",
    "SolverConfig",
    "SolveReport",
    "synthesize",
    "TestFunction",
    "trim",
    "upsilon",
    "validate_quarklet_tree",
    "WaveletIndex",
    "WaveletTree",
    "weight",
    "WeightRule",
]
