#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlstplan/catalog/database.h"
#include "nlstplan/planner/plan.h"

namespace nlstplan::optimizer {

/// Indexed variants are enumerated only when the estimated retained fraction is at most this.
inline constexpr double kSelectivityThreshold = 0.2;
/// Sampled costs within this relative margin count as a tie, which the indexed plan wins.
inline constexpr double kTieMargin = 0.05;

struct CandidateSet {
    planner::PhysicalPlan baseline;
    std::vector<planner::PhysicalPlan> indexed;
};

struct CostEstimate {
    planner::PhysicalPlan plan;
    /// Median wall time of the sampled runs.
    double sampled_ms = 0;
    double sample_fraction = 1;
    /// sampled_ms / sample_fraction
    double predicted_ms = 0;
    bool chosen = false;
};

struct Choice {
    planner::PhysicalPlan plan;
    /// Baseline first, then the indexed candidates in enumeration order. Empty when there was
    /// nothing to choose between.
    std::vector<CostEstimate> estimates;
};

/// Fraction of tuples satisfying `pred`, evaluated on min(sample_size, N) tuples drawn uniformly
/// without replacement. Exact when N <= sample_size; 1.0 for an empty relation.
/// Throws InvalidArgument when sample_size is 0 and ExecError when `pred` does not bind.
double estimate_filter_rate(const planner::Expr& pred, const catalog::Relation& rel, std::size_t sample_size,
                            std::uint64_t seed);

/// Smallest filter rate over the plan's filter-over-feed sites; 1.0 when there is none.
double plan_selectivity(const planner::PhysicalPlan& p, const catalog::Database& db, std::size_t sample_size,
                        std::uint64_t seed);

/// One indexed variant per (filter site, indexed attribute) pair whose predicate restricts that
/// attribute to a literal geometry: the feed becomes a windowintersects over the geometry's
/// MBR (expanded by d for `distance(..) <= d`) and the whole predicate stays as a residual filter.
CandidateSet enumerate_candidates(const planner::PhysicalPlan& baseline, const catalog::Database& db,
                                  double selectivity, double threshold = kSelectivityThreshold);

/// Runs every candidate `runs` times on one seeded sample of the database and picks the lowest
/// predicted time. With no indexed candidates the baseline is returned without sampling.
Choice choose_plan(const CandidateSet& cands, const catalog::Database& db, double sample_fraction, std::uint64_t seed,
                   int runs = 5);

/// {"candidates": [{plan, sampled_ms, predicted_ms, sample_fraction, uses_index, chosen}], "chosen": text}
nlohmann::json report_json(const Choice& c);

}  // namespace nlstplan::optimizer
