#pragma once

#include <span>
#include <vector>

#include "muss/objective.hpp"
#include "muss/types.hpp"

namespace muss {

/// Per-step diagnostics of a greedy run.
struct GreedyTrace {
    std::vector<ItemId> picks;
    std::vector<double> gains;                    // criterion value of each pick
    std::vector<std::size_t> candidate_pool_sizes; // candidates scanned per step
};

struct GreedyOutput {
    SelectionResult result;
    GreedyTrace trace;
};

/// Greedy quality+diversity selection over `pool`.
///
/// The first pick is the highest-quality item (ties: smallest id). Each
/// following pick maximizes sigma*lambda*q(t) + (1-lambda)*G(t, S) where G
/// is the running distance sum (optionally normalized by |S|) or the
/// running distance minimum, per params.criterion. Gains are maintained
/// incrementally, so a full run costs O(k * |pool|) distance evaluations.
///
/// The pool is canonicalized to ascending id before selection; identical
/// inputs give identical pick order. Selects min(k, |pool|) items. The
/// reported F/Q/D always use sigma = 1 semantics at params.lambda.
GreedyOutput greedy_select(const Dataset& ds, std::span<const ItemId> pool,
                           const SelectionParams& params);

/// Runs greedy_select at sigma in {0, 0.5, 1}, evaluates each selection
/// under params.lambda, and returns the best by F (ties: smaller sigma).
SelectionResult greedy_select_sigma_sweep(const Dataset& ds, std::span<const ItemId> pool,
                                          const SelectionParams& params);

/// One excluded candidate's worth of selection-gap checking.
struct SelectionGapEntry {
    ItemId candidate = 0;
    double quality_gain = 0.0;   // q(t), the quality gain of adding t
    double quality_bound = 0.0;  // F(S) / (k * lambda)
    double min_distance = 0.0;   // min over z in S of d(t, z)
    double distance_bound = 0.0; // 2.5 F(S) / (k (k-1) (1 - lambda))
    bool pass = false;

    double quality_slack() const { return quality_bound - quality_gain; }
    double distance_slack() const { return distance_bound - min_distance; }
};

struct SelectionGapReport {
    std::vector<SelectionGapEntry> entries;
    std::size_t failures = 0;
    bool pass() const { return failures == 0; }
};

/// Verifies, for every candidate the greedy run left out, that its quality
/// gain and its minimum distance to the selection are bounded by the stated
/// fractions of F(S). Requires: `result` came from greedy_select with
/// sigma = 1 and the unnormalized sum-distance criterion, 0 < lambda < 1,
/// and |selected| > 1. Violated assumptions raise InvalidArgument naming
/// the assumption.
SelectionGapReport check_lemma1(const Dataset& ds, std::span<const ItemId> pool,
                                const SelectionResult& result, double lambda);

}  // namespace muss
