"""Negativity, disentangling, and monogamy tools for multipartite pure states."""

__version__ = "0.1.0"

from .tensor import (
    DimensionError,
    eigh,
    kron,
    partial_trace,
    partial_transpose,
    svd,
    trace_norm,
)
from .states import (
    ChainProductFixture,
    DensityMatrix,
    EmbeddedProductFixture,
    PureState,
    SchmidtDecomposition,
    chain_product,
    embedded_product,
    haar_random_pure,
    load_state_file,
    named_state,
    permute_subsystems,
    save_state,
    schmidt,
    to_density,
)
from .negativity import (
    NegativityResult,
    OptimalDecomposition,
    PartitionError,
    negativity,
    optimal_decomposition,
    pure_negativity_from_schmidt,
)
from .disentangle import (
    ChainFactorization,
    Corollary4Result,
    DisentanglingVerdict,
    FactorizationResult,
    NotFactorizableError,
    TTensor,
    chain_factorize,
    check_condition,
    check_disentangling,
    corollary4_check,
    extract_t_tensor,
    factorize,
)
from .monogamy import (
    GeneralizedRecord,
    MonogamyRecord,
    SamplerConfig,
    SaturationSampler,
    generalized_check,
    haar_scan,
    monogamy_check,
    read_records_csv,
    regenerate_state,
    saturation_sample,
    summarize_records,
    violation_search_unsquared,
    write_records_csv,
)
from .report import render_scatter

__all__ = [
    "__version__",
    "DimensionError",
    "eigh",
    "kron",
    "partial_trace",
    "partial_transpose",
    "svd",
    "trace_norm",
    "ChainProductFixture",
    "DensityMatrix",
    "EmbeddedProductFixture",
    "PureState",
    "SchmidtDecomposition",
    "chain_product",
    "embedded_product",
    "haar_random_pure",
    "load_state_file",
    "named_state",
    "permute_subsystems",
    "save_state",
    "schmidt",
    "to_density",
    "NegativityResult",
    "OptimalDecomposition",
    "PartitionError",
    "negativity",
    "optimal_decomposition",
    "pure_negativity_from_schmidt",
    "ChainFactorization",
    "Corollary4Result",
    "DisentanglingVerdict",
    "FactorizationResult",
    "NotFactorizableError",
    "TTensor",
    "chain_factorize",
    "check_condition",
    "check_disentangling",
    "corollary4_check",
    "extract_t_tensor",
    "factorize",
    "GeneralizedRecord",
    "MonogamyRecord",
    "SamplerConfig",
    "SaturationSampler",
    "generalized_check",
    "haar_scan",
    "monogamy_check",
    "read_records_csv",
    "regenerate_state",
    "saturation_sample",
    "summarize_records",
    "violation_search_unsquared",
    "write_records_csv",
    "render_scatter",
]
