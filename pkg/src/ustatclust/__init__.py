"""Significance clustering for high-dimension low-sample-size data.

Builds every statistic from a shared matrix of pairwise kernel values: the
between-group statistic Bn and its decomposition, permutation-based null
variances, multiplicity-corrected homogeneity tests (exact max distribution
or Gumbel approximation), the uclust split finder and the uhclust divisive
hierarchy with family-wise error control, plus a simulation harness.

Hot kernels run in a compiled extension when built; a pure NumPy backend is
selected automatically otherwise (see ``ustatclust.BACKEND_NAME``).
"""

from ._backend import BACKEND_NAME
from .cluster import SizeCandidate, UclustResult, uclust
from .config import Settings
from .hierarchy import ClusterLabeling, DendrogramNode, extract_clusters, uhclust
from .io import read_csv, read_dendrogram, write_dendrogram
from .kernels import (
    AVERAGED_ABSOLUTE,
    AVERAGED_SQUARED_EUCLIDEAN,
    DataMatrix,
    KernelMatrix,
    KernelSpec,
    build_kernel_matrix,
    evaluate_kernel,
    register_kernel,
)
from .optimize import (
    SearchConfig,
    SizeBestTable,
    exhaustive_best,
    optimize_bn_at_size,
    optimize_standardized,
)
from .significance import (
    GumbelParams,
    TestResult,
    gumbel_params,
    gumbel_pvalue,
    homogeneity_test,
    max_test_pvalue,
    n_star,
    u_test,
)
from .simulate import (
    SimReport,
    SimScenario,
    adjusted_rand_index,
    generate,
    run_hierarchy_study,
    run_homogeneity_study,
)
from .ustat import (
    BnResult,
    GroupSums,
    Partition,
    bn,
    bn_delta_move,
    group_sums,
    u_between,
    u_within,
    un_decomposition,
)
from .variance import (
    VarianceTable,
    build_variance_table,
    estimate_variance_mc,
    robust_scale,
    variance_coefficient,
)

__version__ = "0.1.0"

__all__ = [
    "AVERAGED_ABSOLUTE",
    "AVERAGED_SQUARED_EUCLIDEAN",
    "BACKEND_NAME",
    "BnResult",
    "ClusterLabeling",
    "DataMatrix",
    "DendrogramNode",
    "GroupSums",
    "GumbelParams",
    "KernelMatrix",
    "KernelSpec",
    "Partition",
    "SearchConfig",
    "Settings",
    "SimReport",
    "SimScenario",
    "SizeBestTable",
    "SizeCandidate",
    "TestResult",
    "UclustResult",
    "VarianceTable",
    "adjusted_rand_index",
    "bn",
    "bn_delta_move",
    "build_kernel_matrix",
    "build_variance_table",
    "estimate_variance_mc",
    "evaluate_kernel",
    "exhaustive_best",
    "extract_clusters",
    "generate",
    "group_sums",
    "gumbel_params",
    "gumbel_pvalue",
    "homogeneity_test",
    "max_test_pvalue",
    "n_star",
    "optimize_bn_at_size",
    "optimize_standardized",
    "read_csv",
    "read_dendrogram",
    "register_kernel",
    "robust_scale",
    "run_hierarchy_study",
    "run_homogeneity_study",
    "u_between",
    "u_test",
    "u_within",
    "uclust",
    "uhclust",
    "un_decomposition",
    "variance_coefficient",
    "write_dendrogram",
]
