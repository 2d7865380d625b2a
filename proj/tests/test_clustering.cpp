#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "muss/bench.hpp"
#include "muss/clustering.hpp"
#include "muss/error.hpp"
#include "muss/objective.hpp"
#include "muss/rng.hpp"
#include "test_helpers.hpp"

using namespace muss;
using test::make_dataset;

namespace {

// Two well-separated 2-D blobs with known memberships.
Dataset two_blob_dataset(std::size_t per_blob, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> embeddings;
    std::vector<double> qualities;
    const double centers[2][2] = {{-20.0, 0.0}, {20.0, 5.0}};
    for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t i = 0; i < per_blob; ++i) {
            embeddings.push_back(centers[b][0] + rng.next_gaussian());
            embeddings.push_back(centers[b][1] + rng.next_gaussian());
            qualities.push_back(0.5);
        }
    }
    return Dataset(2, std::move(embeddings), std::move(qualities));
}

}  // namespace

TEST_CASE("identical points converge immediately to zero wcss") {
    auto ds = make_dataset(2, {{{1, 1}, 0.5}, {{1, 1}, 0.5}, {{1, 1}, 0.5}});
    auto model = kmeans_fit(ds, 1, 0.0, 0);
    CHECK(model.wcss == 0.0);
    CHECK(model.iterations_run == 1);
}

TEST_CASE("two separated blobs are recovered with centroids at the blob means") {
    const std::size_t per_blob = 40;
    auto ds = two_blob_dataset(per_blob, 5);
    auto model = kmeans_fit(ds, 2, 0.0, 123);

    // every point of a blob shares one cluster
    for (std::size_t i = 1; i < per_blob; ++i) {
        CHECK(model.assignments[i] == model.assignments[0]);
        CHECK(model.assignments[per_blob + i] == model.assignments[per_blob]);
    }
    CHECK(model.assignments[0] != model.assignments[per_blob]);

    // centroids equal the blob means (closed form over the generated points)
    for (std::size_t b = 0; b < 2; ++b) {
        double mean[2] = {0.0, 0.0};
        for (std::size_t i = 0; i < per_blob; ++i) {
            auto e = ds.embedding(static_cast<ItemId>(b * per_blob + i));
            mean[0] += e[0];
            mean[1] += e[1];
        }
        mean[0] /= per_blob;
        mean[1] /= per_blob;
        const auto centroid = model.centroid(model.assignments[b * per_blob]);
        CHECK(centroid[0] == doctest::Approx(mean[0]).epsilon(1e-6));
        CHECK(centroid[1] == doctest::Approx(mean[1]).epsilon(1e-6));
    }
}

TEST_CASE("quality-augmented clustering can beat the feature-only assignment") {
    // Embeddings nearly indistinguishable; qualities split into two bands.
    Rng rng(7);
    std::vector<std::pair<std::vector<double>, double>> rows;
    for (int i = 0; i < 30; ++i) {
        rows.push_back({{0.01 * rng.next_gaussian()}, i % 2 == 0 ? 0.1 : 0.9});
    }
    auto ds = make_dataset(1, rows);

    const double weight = 50.0;
    auto plain = kmeans_fit(ds, 2, 0.0, 3);
    auto augmented = kmeans_fit(ds, 2, weight, 3);
    CHECK(plain.assignments != augmented.assignments);

    // Evaluate both assignment structures under the same combined objective.
    ClusterModel reweighted = plain;
    reweighted.quality_weight = weight;
    CHECK(compute_wcss(ds, augmented) < compute_wcss(ds, reweighted));
    CHECK(augmented.wcss == doctest::Approx(compute_wcss(ds, augmented)).epsilon(1e-6));
}

TEST_CASE("stored wcss matches the recomputed objective") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SyntheticSpec spec;
        spec.n = 120;
        spec.dim = 3;
        spec.blobs = 4;
        spec.seed = seed;
        auto ds = generate(spec);
        auto model = kmeans_fit(ds, 6, 0.25, seed);
        CHECK(model.wcss == doctest::Approx(compute_wcss(ds, model)).epsilon(1e-6));
    }
}

TEST_CASE("quality_weight = 0 ignores qualities entirely") {
    auto ds = two_blob_dataset(20, 9);
    auto model = kmeans_fit(ds, 3, 0.0, 42);

    // permute qualities; assignments and centroids stay bit-identical
    std::vector<double> permuted(ds.qualities().begin(), ds.qualities().end());
    std::rotate(permuted.begin(), permuted.begin() + 7, permuted.end());
    for (std::size_t i = 0; i < permuted.size(); ++i) permuted[i] += 0.1 * (i % 3);
    Dataset shuffled(ds.dim(),
                     std::vector<double>(ds.embeddings_flat().begin(), ds.embeddings_flat().end()),
                     std::move(permuted));
    auto model2 = kmeans_fit(shuffled, 3, 0.0, 42);
    CHECK(model.assignments == model2.assignments);
    CHECK(model.centroids == model2.centroids);
}

TEST_CASE("refit with the same seed is bit-identical") {
    auto ds = two_blob_dataset(25, 13);
    auto a = kmeans_fit(ds, 4, 0.5, 77);
    auto b = kmeans_fit(ds, 4, 0.5, 77);
    CHECK(a.centroids == b.centroids);
    CHECK(a.quality_centers == b.quality_centers);
    CHECK(a.assignments == b.assignments);
    CHECK(a.wcss == b.wcss);
    CHECK(a.iterations_run == b.iterations_run);
}

TEST_CASE("parallel assignment gives the same model") {
    auto ds = two_blob_dataset(50, 21);
    auto serial = kmeans_fit(ds, 5, 0.0, 9, {.workers = 1});
    auto parallel = kmeans_fit(ds, 5, 0.0, 9, {.workers = 4});
    CHECK(serial.assignments == parallel.assignments);
    CHECK(serial.centroids == parallel.centroids);
    CHECK(serial.wcss == parallel.wcss);
}

TEST_CASE("argument errors") {
    auto ds = two_blob_dataset(5, 2);
    CHECK_THROWS_AS(kmeans_fit(ds, 0, 0.0, 0), InvalidArgument);
    CHECK_THROWS_AS(kmeans_fit(ds, 11, 0.0, 0), InvalidArgument);
    CHECK_THROWS_AS(kmeans_fit(ds, 2, -1.0, 0), InvalidArgument);
}

TEST_CASE("cluster summaries") {
    SUBCASE("singleton radius and median") {
        auto ds = make_dataset(1, {{{5}, 0.7}});
        auto model = kmeans_fit(ds, 1, 0.0, 0);
        auto summaries = summarize_clusters(ds, model);
        REQUIRE(summaries.size() == 1);
        CHECK(summaries[0].radius == 0.0);
        CHECK(summaries[0].median_quality == 0.7);
        CHECK(summaries[0].size == 1);
    }
    SUBCASE("even-count median averages the middle pair") {
        auto ds = make_dataset(1, {{{0}, 1.0}, {{0}, 2.0}, {{0}, 3.0}, {{0}, 4.0}});
        auto model = kmeans_fit(ds, 1, 0.0, 0);
        auto summaries = summarize_clusters(ds, model);
        REQUIRE(summaries.size() == 1);
        CHECK(summaries[0].median_quality == doctest::Approx(2.5));
    }
    SUBCASE("radius equals the brute-force member scan") {
        auto ds = two_blob_dataset(30, 31);
        auto model = kmeans_fit(ds, 2, 0.0, 4);
        for (const auto& s : summarize_clusters(ds, model)) {
            double expected = 0.0;
            for (ItemId id : s.member_ids) {
                expected = std::max(expected, euclidean(ds.embedding(id), s.centroid));
            }
            CHECK(s.radius == doctest::Approx(expected));
        }
        CHECK(max_radius(summarize_clusters(ds, model)) > 0.0);
    }
}

TEST_CASE("centroid updates are stationary points of the objective") {
    auto ds = two_blob_dataset(30, 44);
    auto model = kmeans_fit(ds, 3, 0.8, 15);
    double worst = 0.0;
    for (std::size_t j = 0; j < model.l; ++j) {
        for (std::size_t c = 0; c < model.dim; ++c) {
            worst = std::max(worst, std::abs(test::fd_gradient_centroid(ds, model, j, c)));
        }
        worst = std::max(worst, std::abs(test::fd_gradient_quality_center(ds, model, j)));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("random_partition") {
    auto ds = two_blob_dataset(5, 3);  // n = 10

    SUBCASE("single part holds everything") {
        auto parts = random_partition(ds, 1, 0);
        REQUIRE(parts.size() == 1);
        CHECK(parts[0] == ds.all_ids());
    }
    SUBCASE("n parts are singletons") {
        auto parts = random_partition(ds, 10, 0);
        CHECK(parts.size() == 10);
        for (const auto& p : parts) CHECK(p.size() == 1);
    }
    SUBCASE("deterministic, disjoint, covering, balanced") {
        auto a = random_partition(ds, 3, 99);
        auto b = random_partition(ds, 3, 99);
        CHECK(a == b);

        std::vector<char> seen(10, 0);
        for (const auto& p : a) {
            CHECK(p.size() >= 3);
            CHECK(p.size() <= 4);
            for (ItemId id : p) {
                CHECK_FALSE(seen[id]);
                seen[id] = 1;
            }
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; }));
    }
    SUBCASE("l > n is an error") {
        CHECK_THROWS_AS(random_partition(ds, 11, 0), InvalidArgument);
    }
}
