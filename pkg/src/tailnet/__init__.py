"""Heavy-tailed random-length sums and maxima, their tail and extremal
indices, and the root scores of community-structured random graphs."""

from .aggregation import AggregateSeries, predicted_theta, random_d_theta, row_aggregate, running_maxima
from .estimators import (
    EstimationError,
    EstimationReport,
    blocks_theta,
    definition1_theta,
    estimate_series,
    hill_estimate,
    intervals_theta,
    stationarity_diagnostic,
)
from .generators import (
    ColumnSpec,
    DependenceScenario,
    RowLengthLaw,
    SeriesMatrix,
    check_domination,
    gen_armax_column,
    gen_iid_column,
    gen_matrix,
    gen_row_lengths,
)
from .heavy_tail import (
    ParetoLaw,
    TailProfile,
    ThresholdSequence,
    chi_upper_bound,
    pareto_quantile,
    row_cap,
    row_caps,
    theoretical_exceedance,
    threshold_u,
)
from .network import (
    CommunityGraph,
    CommunitySpec,
    DiGraph,
    PageRankConfig,
    build_community_graph,
    full_solve_roots,
    maxlinear_solve,
    pagerank_solve,
    root_aggregate,
    root_score_series,
)

__version__ = "0.1.0"
