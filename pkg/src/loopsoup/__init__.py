"""Random-walk loop-soup laboratory.

Sampling of lattice loop soups, loop clusters and their outer boundaries,
chord explorations, pinned clusters, and avoidance statistics for
excursion ensembles.
"""

from .clusters import (
    ClusterSet,
    CompleteCluster,
    boundary_touching_loops,
    build_clusters,
    complete_cluster,
    largest_cluster_fraction,
    outermost_clusters,
)
from .exploration import (
    ExplorationResult,
    NoSurroundingCluster,
    TriesExhausted,
    estimate_pinning_scaling,
    explore_chord,
    markov_consistency,
    sample_glued_near,
    sample_pinned_cluster,
)
from .lattice import InvalidSize, LatticeDomain, Site, SiteOutsideDomain, build_domain, half_disk_sites, neighbors
from .loops import (
    BudgetExceeded,
    InvalidConfig,
    LoopSoupSample,
    RwLoop,
    SoupConfig,
    return_probability,
    sample_bridge,
    sample_loop_soup,
    soup_distance,
)
from .phase import phase_scan
from .restriction import (
    ExponentTriple,
    HullMap,
    StripChart,
    alpha_of_kappa,
    c_of_kappa,
    cutpoint_contrast,
    hull_map,
    kappa_of_c,
    restriction_ratio_test,
    sample_excursions,
)
from .stats import EstimatorReport, wilson_interval
from .topology import SiteSet, articulation_sites, filling, outer_contour

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
