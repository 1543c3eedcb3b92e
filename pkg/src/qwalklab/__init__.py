"""Numerical laboratory for quantum random walks on finite counital bialgebras.

Build a bialgebra from structure tensors or a finite group, form the
repeated-interaction walk for an implementing triple, and compare its
embedded matrix elements against the quantum stochastic cocycle limit.
"""

from .bialgebra import (
    AxiomViolation,
    BialgebraReport,
    CounitalBialgebra,
    build_function_algebra,
    build_group_algebra,
    load_bialgebra,
    save_bialgebra,
    verify_bialgebra,
)
from .cbnorm import amplified_norm, sampled_lower_bound
from .cocycle import (
    CocycleEvaluator,
    GeneratorMismatch,
    assoc_generator,
    cocycle_matrix_element,
    cross_validate_against_walk,
)
from .convolution import (
    ConvolutionSemigroup,
    DimensionCapExceeded,
    check_compatibility,
    composition_iterates,
    convolution_exponential,
    convolution_iterates,
    convolve,
    convolve_functionals,
    lift,
    mult_convolve,
)
from .experiment import ConfigError, ExperimentConfig, run_sweep, run_verify, write_demo
from .fock import (
    GridSpec,
    PartitionMismatch,
    StepFunction,
    embed_vector,
    step_function_from_payload,
    step_function_to_payload,
    step_hat_vectors,
    toy_matrix_element,
    walk_matrix_element,
)
from .groups import FiniteGroup, GroupTableError, cyclic_group, symmetric_group
from .serialize import FormatError
from .structure_maps import (
    HatSpace,
    ImplementingTriple,
    NotStructureMapError,
    OperatorMap,
    cp_generator_from_triple,
    extract_implementing_pair,
    generator_gap,
    structure_map_from_pair,
    verify_cp_decomposition,
    verify_structure_relation,
)
from .walk import (
    StepSizeError,
    WalkStep,
    build_unitary,
    build_walk,
    build_walk_cp,
    build_walk_rep,
    error_terms,
    verify_error_identity,
    vector_state_check,
)

__version__ = "0.1.0"

__all__ = [
    "AxiomViolation",
    "BialgebraReport",
    "CounitalBialgebra",
    "build_function_algebra",
    "build_group_algebra",
    "load_bialgebra",
    "save_bialgebra",
    "verify_bialgebra",
    "amplified_norm",
    "sampled_lower_bound",
    "CocycleEvaluator",
    "GeneratorMismatch",
    "assoc_generator",
    "cocycle_matrix_element",
    "cross_validate_against_walk",
    "ConvolutionSemigroup",
    "DimensionCapExceeded",
    "check_compatibility",
    "composition_iterates",
    "convolution_exponential",
    "convolution_iterates",
    "convolve",
    "convolve_functionals",
    "lift",
    "mult_convolve",
    "ConfigError",
    "ExperimentConfig",
    "run_sweep",
    "run_verify",
    "write_demo",
    "GridSpec",
    "PartitionMismatch",
    "StepFunction",
    "embed_vector",
    "step_function_from_payload",
    "step_function_to_payload",
    "step_hat_vectors",
    "toy_matrix_element",
    "walk_matrix_element",
    "FiniteGroup",
    "GroupTableError",
    "cyclic_group",
    "symmetric_group",
    "FormatError",
    "HatSpace",
    "ImplementingTriple",
    "NotStructureMapError",
    "OperatorMap",
    "cp_generator_from_triple",
    "extract_implementing_pair",
    "generator_gap",
    "structure_map_from_pair",
    "verify_cp_decomposition",
    "verify_structure_relation",
    "StepSizeError",
    "WalkStep",
    "build_unitary",
    "build_walk",
    "build_walk_cp",
    "build_walk_rep",
    "error_terms",
    "verify_error_identity",
    "vector_state_check",
    "__version__",
]
