#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "muss/selectors.hpp"
#include "muss/types.hpp"

namespace muss {

struct BruteForceResult {
    std::vector<ItemId> best_set;  // ascending ids
    double f_opt = 0.0;
};

/// Exact maximizer of F over all k-subsets of `pool` (raw-sum convention).
/// Subsets are enumerated in lexicographic id order and ties keep the
/// first, i.e. lexicographically smallest, set. Refuses instances whose
/// subset count exceeds `subset_cap`.
BruteForceResult opt_brute_force(const Dataset& ds, std::span<const ItemId> pool,
                                 std::size_t k, double lambda,
                                 std::uint64_t subset_cap = 2'000'000);

/// One inequality evaluation: holds iff lhs <= rhs (+ float slack).
struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    double slack() const { return rhs - lhs; }
};

struct BoundTrial {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double f_opt = 0.0;  // at the caller's lambda

    // Partitioned baseline vs 1/16 of the optimum, at lambda = 0.5 and at
    // the caller's lambda (each against the optimum for that lambda).
    std::optional<BoundCheck> dgds_half;
    std::optional<BoundCheck> dgds_caller;

    // Clustered variant (sigma_final = 0.5) vs F_opt/alpha - r*beta/alpha.
    std::optional<BoundCheck> multilevel;
    double alpha = 0.0;
    double beta = 0.0;
    double radius = 0.0;

    // Union-level inequalities, checked when the union is enumerable.
    std::optional<BoundCheck> union_diversity;  // D(O) vs 6 * (Q+D)(opt over union)
    std::optional<BoundCheck> union_quality;    // Q(O) vs 2 * (Q+D)(opt over union)
};

/// Which approximation bounds a verify_bounds run exercises.
enum class BoundScope {
    Both,
    Dgds,        // only the 1/16 bound and the union-level inequalities
    Multilevel,  // only the clustered-variant bound
};

struct BoundSuiteParams {
    std::size_t n = 12;
    std::size_t k = 3;
    std::size_t m = 2;
    std::size_t l = 3;
    std::size_t k_within = 3;
    double lambda = 0.5;
    double lambda_c = 0.5;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t dim = 2;
    std::uint64_t subset_cap = 2'000'000;
    BoundScope scope = BoundScope::Both;

    void validate() const;
};

struct BoundReport {
    BoundSuiteParams params;
    std::vector<BoundTrial> trials;
    std::size_t violations = 0;
    std::vector<std::string> violation_details;  // full instances for reproduction
    std::size_t union_checks_skipped = 0;
    bool pass() const { return violations == 0; }
};

/// Runs `trials` seeded random instances; each computes the exhaustive
/// optimum, the partitioned baseline, and the clustered variant, and
/// evaluates the approximation bounds. Any violation is recorded with the
/// instance parameters needed to reproduce it.
BoundReport verify_bounds(const BoundSuiteParams& params);

struct Lemma1SuiteParams {
    std::size_t n = 20;
    std::size_t k = 4;
    double lambda = 0.5;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t dim = 2;

    void validate() const;
};

struct Lemma1SuiteReport {
    Lemma1SuiteParams params;
    std::size_t trials_run = 0;
    std::size_t candidates_checked = 0;
    std::size_t violations = 0;
    double min_quality_slack = 0.0;
    double min_distance_slack = 0.0;
    std::vector<std::string> violation_details;
    bool pass() const { return violations == 0; }
};

/// Greedy (sigma = 1, unnormalized sum-distance) on random instances,
/// then per-instance selection-gap checks aggregated over the suite.
Lemma1SuiteReport verify_lemma1_suite(const Lemma1SuiteParams& params);

struct SigmaSweepSuiteParams {
    std::size_t n = 12;
    std::size_t k = 3;
    double lambda = 0.5;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t dim = 2;
    std::uint64_t subset_cap = 2'000'000;

    void validate() const;
};

struct SigmaSweepTrial {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double f_opt = 0.0;
    double f_sigma_half = 0.0;  // greedy at sigma = 0.5
    double f_sweep_best = 0.0;  // best of sigma in {0, 0.5, 1}
    bool pass = false;          // both >= f_opt / 2
};

struct SigmaSweepReport {
    SigmaSweepSuiteParams params;
    std::vector<SigmaSweepTrial> trials;
    std::size_t violations = 0;
    std::vector<std::string> violation_details;
    bool pass() const { return violations == 0; }
};

/// Half-approximation suite: on enumerable instances, both the sigma = 0.5
/// greedy and the sigma sweep must reach at least half the optimum.
SigmaSweepReport verify_sigma_sweep_suite(const SigmaSweepSuiteParams& params);

}  // namespace muss
