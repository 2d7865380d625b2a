#include "doctest.h"

#include <algorithm>

#include "muss/error.hpp"
#include "muss/greedy.hpp"
#include "muss/oracle.hpp"
#include "muss/rng.hpp"
#include "test_helpers.hpp"

using namespace muss;
using test::make_dataset;

namespace {

Dataset random_dataset(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> embeddings(n * dim);
    std::vector<double> qualities(n);
    for (double& v : embeddings) v = rng.next_gaussian();
    for (double& q : qualities) q = rng.next_double();
    return Dataset(dim, std::move(embeddings), std::move(qualities));
}

// Naive per-step argmax without any gain caching; the reference the
// incremental implementation must match pick for pick.
std::vector<ItemId> naive_greedy(const Dataset& ds, std::vector<ItemId> pool,
                                 const SelectionParams& params) {
    std::sort(pool.begin(), pool.end());
    std::vector<ItemId> picks;
    ItemId first = pool.front();
    for (ItemId id : pool) {
        if (ds.quality(id) > ds.quality(first)) first = id;
    }
    picks.push_back(first);
    while (picks.size() < std::min(params.k, pool.size())) {
        ItemId best = 0;
        double best_gain = -1e300;
        for (ItemId t : pool) {
            if (std::find(picks.begin(), picks.end(), t) != picks.end()) continue;
            double g;
            if (params.criterion == Criterion::MinDistance) {
                g = 1e300;
                for (ItemId u : picks) g = std::min(g, distance(ds, t, u));
            } else {
                g = 0.0;
                for (ItemId u : picks) g += distance(ds, t, u);
                if (params.normalize_by_size) g /= static_cast<double>(picks.size());
            }
            const double gain = params.sigma * params.lambda * ds.quality(t) +
                                (1.0 - params.lambda) * g;
            if (gain > best_gain) {
                best_gain = gain;
                best = t;
            }
        }
        picks.push_back(best);
    }
    return picks;
}

}  // namespace

TEST_CASE("k = 1 picks the single highest-quality item") {
    auto ds = make_dataset(1, {{{0}, 0.3}, {{1}, 0.9}, {{2}, 0.5}});
    SelectionParams params;
    params.k = 1;
    params.lambda = 0.2;
    auto out = greedy_select(ds, ds.all_ids(), params);
    CHECK(out.result.selected == std::vector<ItemId>{1});
}

TEST_CASE("lambda = 1 reduces to top-k by quality with smallest-id ties") {
    auto ds = make_dataset(1, {{{0}, 0.5}, {{1}, 0.9}, {{2}, 0.5}, {{3}, 0.1}, {{4}, 0.7}});
    SelectionParams params;
    params.k = 3;
    params.lambda = 1.0;
    auto out = greedy_select(ds, ds.all_ids(), params);
    CHECK(out.result.selected == std::vector<ItemId>{1, 4, 0});
}

TEST_CASE("incremental gains match the naive rescan, both criteria") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto ds = random_dataset(40, 3, seed);
        for (Criterion criterion : {Criterion::SumDistance, Criterion::MinDistance}) {
            for (bool normalize : {false, true}) {
                SelectionParams params;
                params.k = 8;
                params.lambda = 0.4;
                params.criterion = criterion;
                params.normalize_by_size = normalize;
                auto fast = greedy_select(ds, ds.all_ids(), params);
                auto slow = naive_greedy(ds, ds.all_ids(), params);
                CHECK(fast.result.selected == slow);
            }
        }
    }
}

TEST_CASE("pool order does not matter") {
    auto ds = random_dataset(25, 2, 9);
    SelectionParams params;
    params.k = 6;
    params.lambda = 0.5;
    auto pool = ds.all_ids();
    auto a = greedy_select(ds, pool, params);
    std::reverse(pool.begin(), pool.end());
    auto b = greedy_select(ds, pool, params);
    CHECK(a.result.selected == b.result.selected);
}

TEST_CASE("trace bookkeeping") {
    auto ds = random_dataset(10, 2, 4);
    SelectionParams params;
    params.k = 4;
    params.lambda = 0.5;
    auto out = greedy_select(ds, ds.all_ids(), params);
    REQUIRE(out.trace.picks.size() == 4);
    CHECK(out.trace.gains.size() == 4);
    CHECK(out.trace.candidate_pool_sizes == std::vector<std::size_t>{10, 9, 8, 7});
    CHECK(out.trace.picks == out.result.selected);
}

TEST_CASE("k larger than the pool returns the whole pool") {
    auto ds = random_dataset(5, 2, 11);
    SelectionParams params;
    params.k = 50;
    params.lambda = 0.5;
    auto out = greedy_select(ds, ds.all_ids(), params);
    CHECK(out.result.selected.size() == 5);
}

TEST_CASE("bad inputs") {
    auto ds = random_dataset(5, 2, 12);
    SelectionParams params;
    params.k = 2;
    CHECK_THROWS_AS(greedy_select(ds, std::vector<ItemId>{}, params), InvalidArgument);
    params.k = 0;
    CHECK_THROWS_AS(greedy_select(ds, ds.all_ids(), params), InvalidArgument);
    params.k = 2;
    params.lambda = 1.5;
    CHECK_THROWS_AS(greedy_select(ds, ds.all_ids(), params), InvalidArgument);
}

TEST_CASE("sigma zero still opens with the best-quality item") {
    auto ds = make_dataset(1, {{{0}, 0.2}, {{5}, 0.9}, {{-5}, 0.4}});
    SelectionParams params;
    params.k = 2;
    params.lambda = 0.5;
    params.sigma = 0.0;
    auto out = greedy_select(ds, ds.all_ids(), params);
    CHECK(out.result.selected.front() == 1);
}

TEST_CASE("reported objective always uses sigma = 1 semantics") {
    auto ds = random_dataset(12, 2, 21);
    SelectionParams params;
    params.k = 4;
    params.lambda = 0.6;
    params.sigma = 0.5;
    params.normalize_by_size = false;
    auto out = greedy_select(ds, ds.all_ids(), params);
    auto recomputed = objective(ds, out.result.selected, params.lambda);
    CHECK(out.result.objective == doctest::Approx(recomputed.objective).epsilon(1e-12));
    CHECK(out.result.objective ==
          doctest::Approx(params.lambda * out.result.quality_term +
                          (1 - params.lambda) * out.result.diversity_term)
              .epsilon(1e-9));
}

TEST_CASE("sigma sweep") {
    SUBCASE("equal qualities make all three runs identical; ties pick sigma 0") {
        auto ds = make_dataset(1, {{{0}, 0.5}, {{2}, 0.5}, {{7}, 0.5}, {{3}, 0.5}});
        SelectionParams params;
        params.k = 2;
        params.lambda = 0.5;
        auto swept = greedy_select_sigma_sweep(ds, ds.all_ids(), params);
        auto single = greedy_select(ds, ds.all_ids(), params).result;
        CHECK(swept.selected == single.selected);
        CHECK(*swept.params_echo.find("sigma_selected") == "0");
    }
    SUBCASE("sweep returns at least the best individual run") {
        auto ds = random_dataset(12, 3, 33);
        SelectionParams params;
        params.k = 3;
        params.lambda = 0.5;
        params.normalize_by_size = false;
        auto swept = greedy_select_sigma_sweep(ds, ds.all_ids(), params);
        for (double sigma : {0.0, 0.5, 1.0}) {
            params.sigma = sigma;
            auto single = greedy_select(ds, ds.all_ids(), params).result;
            CHECK(swept.objective >= single.objective - 1e-12);
        }
    }
}

TEST_CASE("half-approximation on a small instance") {
    // Guaranteed for the sigma = 0.5, unnormalized sum criterion.
    auto ds = random_dataset(10, 2, 77);
    SelectionParams params;
    params.k = 3;
    params.lambda = 0.5;
    params.sigma = 0.5;
    params.normalize_by_size = false;
    auto out = greedy_select(ds, ds.all_ids(), params);
    auto opt = opt_brute_force(ds, ds.all_ids(), 3, 0.5);
    CHECK(out.result.objective >= 0.5 * opt.f_opt - 1e-12);
}

TEST_CASE("selection-gap checks") {
    SelectionParams params;
    params.k = 5;
    params.lambda = 0.5;
    params.normalize_by_size = false;

    SUBCASE("pool equal to the selection passes vacuously") {
        auto ds = random_dataset(5, 2, 51);
        auto out = greedy_select(ds, ds.all_ids(), params);
        auto report = check_lemma1(ds, out.result.selected, out.result, 0.5);
        CHECK(report.entries.empty());
        CHECK(report.pass());
    }

    SUBCASE("random instances all pass") {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            auto ds = random_dataset(30, 2, 1000 + seed);
            auto out = greedy_select(ds, ds.all_ids(), params);
            auto report = check_lemma1(ds, ds.all_ids(), out.result, 0.5);
            CHECK(report.entries.size() == 25);
            CHECK(report.pass());
        }
    }

    SUBCASE("a far excluded outlier still satisfies the distance bound") {
        // Points in a tight cloud plus one outlier with low quality: the
        // outlier stays unselected, and its min distance is bounded.
        std::vector<std::pair<std::vector<double>, double>> rows;
        Rng rng(8);
        for (int i = 0; i < 12; ++i) {
            rows.push_back({{rng.next_gaussian() * 0.1, rng.next_gaussian() * 0.1},
                            0.5 + 0.4 * rng.next_double()});
        }
        rows.push_back({{15.0, 15.0}, 1e-6});
        auto ds = make_dataset(2, rows);
        SelectionParams tight = params;
        tight.k = 3;
        tight.lambda = 0.995;  // quality-heavy so the outlier is excluded
        auto out = greedy_select(ds, ds.all_ids(), tight);
        REQUIRE(std::find(out.result.selected.begin(), out.result.selected.end(), ItemId{12}) ==
                out.result.selected.end());
        auto report = check_lemma1(ds, ds.all_ids(), out.result, tight.lambda);
        CHECK(report.pass());
    }

    SUBCASE("precondition violations name the assumption") {
        auto ds = random_dataset(8, 2, 3);
        auto out = greedy_select(ds, ds.all_ids(), params);
        CHECK_THROWS_AS(check_lemma1(ds, ds.all_ids(), out.result, 1.0), InvalidArgument);
        CHECK_THROWS_AS(check_lemma1(ds, ds.all_ids(), out.result, 0.0), InvalidArgument);

        SelectionParams normalized = params;
        normalized.normalize_by_size = true;
        auto bad = greedy_select(ds, ds.all_ids(), normalized);
        CHECK_THROWS_AS(check_lemma1(ds, ds.all_ids(), bad.result, 0.5), InvalidArgument);

        SelectionParams scaled = params;
        scaled.sigma = 0.5;
        auto bad_sigma = greedy_select(ds, ds.all_ids(), scaled);
        CHECK_THROWS_AS(check_lemma1(ds, ds.all_ids(), bad_sigma.result, 0.5), InvalidArgument);

        SelectionParams k1 = params;
        k1.k = 1;
        auto single = greedy_select(ds, ds.all_ids(), k1);
        CHECK_THROWS_AS(check_lemma1(ds, ds.all_ids(), single.result, 0.5), InvalidArgument);
    }
}
