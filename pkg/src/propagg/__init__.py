"""propagg: proportional aggregation of linear scoring vectors.

Voters each score items by a linear functional represented as a unit vector;
this package aggregates those vectors into collective ranking rules
(arithmetic mean, angular mean, geometric median, and the per-batch Borda
and proportional-sequential rules), measures how proportionally each rule
treats every voter via seeded Monte Carlo, and ships an executable suite of
checks for the guarantees the rules are designed around.
"""

from ._version import __version__
from .core import (
    AntipodalPairError,
    DimensionMismatchError,
    Profile,
    Ranking,
    TieBreak,
    ZeroVectorError,
    angular_distance,
    exp_map,
    log_map,
    make_profile,
    order_to_positions,
    pair_count,
    rank_batch,
    score,
    unit_vector,
)
from .sampling import (
    Acg,
    IsotropicGaussian,
    ItemDistribution,
    SeedSpec,
    UniformSphere,
    distribution_label,
    generator_at,
    parse_distribution,
    sample_batch,
    sample_item,
)
from .rules import (
    RULE_NAMES,
    DegenerateMeanError,
    FixedVectorRule,
    OptimizerDiagnostics,
    OptimizerOptions,
    PerBatchRule,
    PsbState,
    Rule,
    angular_mean,
    angular_objective,
    arithmetic_mean,
    borda_ranking,
    geometric_median,
    make_rule,
    median_objective,
    psb_ranking,
    squared_kemeny_minimize_s1,
    squared_kemeny_objective,
)
from .metrics import (
    DegenerateBatchError,
    EvalReport,
    IpSample,
    NoContestedPairsError,
    batch_ip,
    effective_direction_s1,
    evaluate_rule,
    expected_agreement_spherical,
    ip_levels,
    ip_tilde,
    ip_tilde_estimates,
    kt_agreement_rankings,
    kt_agreement_vectors,
    kt_distance_rankings,
    long_ip,
)
from .data import (
    ComparisonRecord,
    DegenerateFitError,
    FilterExhaustedError,
    FitDiagnostics,
    HeterogeneityStats,
    NoValidPairError,
    ProfileParseError,
    antipodal_profile,
    fit_voter_logistic,
    fit_voter_logistic_with_diagnostics,
    heterogeneity_subsample,
    load_profile_csv,
    pairwise_angle_stats,
    save_profile_csv,
    select_2d_pair,
    two_voter_profile,
)
from .verify import (
    CHECK_NAMES,
    CheckReport,
    check_angular_bound,
    check_arith_closed_form,
    check_batch_le_long,
    check_coincidence_bound,
    check_concentration,
    check_expected_agreement,
    check_gap_shrinks,
    check_long_ip_angular,
    check_psb_floor,
    check_robustness,
    clustered_profile,
    coincidence_bound,
    grid_minimize_s1,
    hard_failures,
    minimize_mean_objective,
    run_checks,
    two_cluster_profile,
    write_junit_xml,
    write_reports_csv,
)

__all__ = [
    "__version__",
    # core
    "AntipodalPairError",
    "DimensionMismatchError",
    "Profile",
    "Ranking",
    "TieBreak",
    "ZeroVectorError",
    "angular_distance",
    "exp_map",
    "log_map",
    "make_profile",
    "order_to_positions",
    "pair_count",
    "rank_batch",
    "score",
    "unit_vector",
    # sampling
    "Acg",
    "IsotropicGaussian",
    "ItemDistribution",
    "SeedSpec",
    "UniformSphere",
    "distribution_label",
    "generator_at",
    "parse_distribution",
    "sample_batch",
    "sample_item",
    # rules
    "RULE_NAMES",
    "DegenerateMeanError",
    "FixedVectorRule",
    "OptimizerDiagnostics",
    "OptimizerOptions",
    "PerBatchRule",
    "PsbState",
    "Rule",
    "angular_mean",
    "angular_objective",
    "arithmetic_mean",
    "borda_ranking",
    "geometric_median",
    "make_rule",
    "median_objective",
    "psb_ranking",
    "squared_kemeny_minimize_s1",
    "squared_kemeny_objective",
    # metrics
    "DegenerateBatchError",
    "EvalReport",
    "IpSample",
    "NoContestedPairsError",
    "batch_ip",
    "effective_direction_s1",
    "evaluate_rule",
    "expected_agreement_spherical",
    "ip_levels",
    "ip_tilde",
    "ip_tilde_estimates",
    "kt_agreement_rankings",
    "kt_agreement_vectors",
    "kt_distance_rankings",
    "long_ip",
    # data
    "ComparisonRecord",
    "DegenerateFitError",
    "FilterExhaustedError",
    "FitDiagnostics",
    "HeterogeneityStats",
    "NoValidPairError",
    "ProfileParseError",
    "antipodal_profile",
    "fit_voter_logistic",
    "fit_voter_logistic_with_diagnostics",
    "heterogeneity_subsample",
    "load_profile_csv",
    "pairwise_angle_stats",
    "save_profile_csv",
    "select_2d_pair",
    "two_voter_profile",
    # verify
    "CHECK_NAMES",
    "CheckReport",
    "check_angular_bound",
    "check_arith_closed_form",
    "check_batch_le_long",
    "check_coincidence_bound",
    "check_concentration",
    "check_expected_agreement",
    "check_gap_shrinks",
    "check_long_ip_angular",
    "check_psb_floor",
    "check_robustness",
    "clustered_profile",
    "coincidence_bound",
    "grid_minimize_s1",
    "hard_failures",
    "minimize_mean_objective",
    "run_checks",
    "two_cluster_profile",
    "write_junit_xml",
    "write_reports_csv",
]
