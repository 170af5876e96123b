"""Coarse-grained position/momentum uncertainty toolkit."""

from .bounds import (
    BoundSet,
    FeasibilityRegion,
    binned_relation_reports,
    bound_B,
    bound_L,
    bound_R,
    check_coarse_relations,
    feasibility_region,
    func_F,
    func_K,
    func_M,
    func_M_inv,
    moment_relation_reports,
)
from .coarse import (
    EPS_TAIL,
    BinnedDistribution,
    GhfSpec,
    ReconstructedPdf,
    TailBudgetExceeded,
    WidthMismatch,
    bin_density,
    decompose_stats,
    discrete_renyi,
    discrete_variance,
    ghf_entropy,
    ghf_variance,
    reconstruct_pdf,
    rectangle,
    sample_counts,
    truncated_gaussian,
)
from .numerics import (
    DEFAULT_QUAD,
    DEFAULT_ROOT,
    Divergent,
    InvalidBracket,
    NonConvergence,
    QuadSpec,
    RootSpec,
    find_root_bracketed,
    integrate,
    integrate_halfline,
)
from .relations import DomainError, RelationReport, RELATION_IDS, VERDICT_TOL
from .specfun import ProlateResult, prolate_r00, sinc_eigen_oracle
from .states import (
    Density1D,
    Gaussian,
    HermiteGauss,
    Mixture,
    SquareWell,
    StateModel,
    catalog_states,
    check_continuous_relations,
    momentum_density,
    position_density,
    renyi_entropy_cont,
    variance,
)

__version__ = "0.1.0"
