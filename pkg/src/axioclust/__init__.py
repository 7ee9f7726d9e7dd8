"""Separation axioms and a clustering-result taxonomy, with alternating
clustering algorithms, criteria and validity indices built on top."""

from .algorithms import (
    ALGORITHMS,
    AlgoConfig,
    c_means,
    cml_gaussian,
    fuzzy_c_means,
    run,
    sample_weighted_gaussian,
    sample_weighted_multinomial,
    single_linkage,
)
from .axiom_lab import search_counterexample, verify_thm4, verify_thm5
from .categorization import (
    ClusteringResult,
    Exemplar,
    GaussianModel,
    Multinomial,
    Prototype,
    axiom_report,
    classify_clustering_result,
)
from .data import DataSet, Partition, classify_partition, validate_partition
from .exceptions import (
    AxioclustError,
    ConfigurationError,
    DomainError,
    IngestError,
    IterationError,
    StructuralError,
)
from .validity import compute_index, extreme_value_audit, validity_report

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "AlgoConfig", "c_means", "cml_gaussian", "fuzzy_c_means", "run",
    "sample_weighted_gaussian", "sample_weighted_multinomial", "single_linkage",
    "search_counterexample", "verify_thm4", "verify_thm5",
    "ClusteringResult", "Exemplar", "GaussianModel", "Multinomial", "Prototype",
    "axiom_report", "classify_clustering_result",
    "DataSet", "Partition", "classify_partition", "validate_partition",
    "AxioclustError", "ConfigurationError", "DomainError", "IngestError",
    "IterationError", "StructuralError",
    "compute_index", "extreme_value_audit", "validity_report",
]
