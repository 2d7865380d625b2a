#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "muss/bench.hpp"
#include "muss/clustering.hpp"
#include "muss/error.hpp"
#include "muss/greedy.hpp"
#include "muss/io.hpp"
#include "muss/objective.hpp"
#include "muss/oracle.hpp"
#include "muss/selectors.hpp"

namespace py = pybind11;
using namespace muss;

namespace {

Dataset dataset_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> embeddings,
                            py::array_t<double, py::array::c_style | py::array::forcecast> qualities,
                            py::object labels) {
    if (embeddings.ndim() != 2) throw InvalidArgument("embeddings must be a 2-D array");
    if (qualities.ndim() != 1) throw InvalidArgument("qualities must be a 1-D array");
    const auto n = static_cast<std::size_t>(embeddings.shape(0));
    const auto dim = static_cast<std::size_t>(embeddings.shape(1));
    if (static_cast<std::size_t>(qualities.shape(0)) != n)
        throw InvalidArgument("qualities length must match the number of embedding rows");

    std::vector<double> emb(embeddings.data(), embeddings.data() + n * dim);
    std::vector<double> qual(qualities.data(), qualities.data() + n);
    std::vector<std::uint8_t> lab;
    if (!labels.is_none()) {
        auto arr = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>(labels);
        if (arr.ndim() != 1 || static_cast<std::size_t>(arr.shape(0)) != n)
            throw InvalidArgument("labels must be a 1-D array of length n");
        lab.assign(arr.data(), arr.data() + n);
    }
    return Dataset(dim, std::move(emb), std::move(qual), std::move(lab));
}

py::array_t<double> embeddings_array(const Dataset& ds) {
    py::array_t<double> out({ds.size(), ds.dim()});
    auto flat = ds.embeddings_flat();
    std::copy(flat.begin(), flat.end(), out.mutable_data());
    return out;
}

py::array_t<double> qualities_array(const Dataset& ds) {
    py::array_t<double> out(static_cast<py::ssize_t>(ds.size()));
    auto q = ds.qualities();
    std::copy(q.begin(), q.end(), out.mutable_data());
    return out;
}

py::object labels_array(const Dataset& ds) {
    if (!ds.has_labels()) return py::none();
    py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(ds.size()));
    auto labels = ds.labels();
    std::copy(labels.begin(), labels.end(), out.mutable_data());
    return out;
}

std::vector<ItemId> pool_or_all(const Dataset& ds, const py::object& pool) {
    if (pool.is_none()) return ds.all_ids();
    return pool.cast<std::vector<ItemId>>();
}

py::dict echo_dict(const ParamsEcho& echo) {
    py::dict d;
    for (const auto& [key, value] : echo.entries) d[py::str(key)] = value;
    return d;
}

py::dict stages_dict(const SelectionResult& r) {
    py::dict d;
    for (const auto& st : r.stage_times) d[py::str(st.name)] = st.ms;
    return d;
}

}  // namespace

PYBIND11_MODULE(_muss, m) {
    m.doc() = "Quality + diversity subset selection over embedding datasets";

    py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataFormatError", PyExc_IOError);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_arrays), py::arg("embeddings"), py::arg("qualities"),
             py::arg("labels") = py::none(),
             "Build a dataset from an (n, d) embedding array, n qualities, "
             "and optional 0/1 labels.")
        .def_property_readonly("n", &Dataset::size)
        .def_property_readonly("dim", &Dataset::dim)
        .def_property_readonly("has_labels", &Dataset::has_labels)
        .def("embeddings", &embeddings_array)
        .def("qualities", &qualities_array)
        .def("labels", &labels_array)
        .def("quality", [](const Dataset& ds, ItemId i) { return ds.quality(i); })
        .def("l2_normalized", &Dataset::l2_normalized,
             "Copy with embeddings scaled to unit norm (zero vectors kept).")
        .def("__len__", &Dataset::size)
        .def("__repr__", [](const Dataset& ds) {
            return "<muss.Dataset n=" + std::to_string(ds.size()) +
                   " dim=" + std::to_string(ds.dim()) + ">";
        });

    py::class_<SelectionResult>(m, "SelectionResult")
        .def_readonly("selected", &SelectionResult::selected)
        .def_readonly("objective", &SelectionResult::objective)
        .def_readonly("quality_term", &SelectionResult::quality_term)
        .def_readonly("diversity_term", &SelectionResult::diversity_term)
        .def_readonly("objective_mean_scaled", &SelectionResult::objective_mean_scaled)
        .def_readonly("wall_time_ms", &SelectionResult::wall_time_ms)
        .def_readonly("warnings", &SelectionResult::warnings)
        .def_property_readonly("params", &echo_dict)
        .def_property_readonly("stage_times_ms", &stages_dict)
        .def("__repr__", [](const SelectionResult& r) {
            return "<muss.SelectionResult k=" + std::to_string(r.selected.size()) +
                   " objective=" + std::to_string(r.objective) + ">";
        });

    py::class_<ClusterModel>(m, "ClusterModel")
        .def_readonly("l", &ClusterModel::l)
        .def_readonly("dim", &ClusterModel::dim)
        .def_readonly("wcss", &ClusterModel::wcss)
        .def_readonly("iterations_run", &ClusterModel::iterations_run)
        .def_readonly("quality_weight", &ClusterModel::quality_weight)
        .def_readonly("assignments", &ClusterModel::assignments)
        .def_readonly("quality_centers", &ClusterModel::quality_centers)
        .def_property_readonly("centroids", [](const ClusterModel& model) {
            py::array_t<double> out({model.l, model.dim});
            std::copy(model.centroids.begin(), model.centroids.end(), out.mutable_data());
            return out;
        });

    py::class_<ClusterSummary>(m, "ClusterSummary")
        .def_readonly("cluster_id", &ClusterSummary::cluster_id)
        .def_readonly("centroid", &ClusterSummary::centroid)
        .def_readonly("median_quality", &ClusterSummary::median_quality)
        .def_readonly("radius", &ClusterSummary::radius)
        .def_readonly("member_ids", &ClusterSummary::member_ids)
        .def_readonly("size", &ClusterSummary::size);

    py::class_<Theorem5Bound>(m, "BoundConstants")
        .def_readonly("alpha", &Theorem5Bound::alpha)
        .def_readonly("beta", &Theorem5Bound::beta)
        .def_readonly("r", &Theorem5Bound::r)
        .def("rhs", &Theorem5Bound::rhs, py::arg("f_opt"));

    m.def(
        "generate",
        [](std::size_t n, std::size_t dim, std::size_t blobs, double spread, double separation,
           const std::string& quality_model, double relevant_fraction, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.n = n;
            spec.dim = dim;
            spec.blobs = blobs;
            spec.blob_spread = spread;
            spec.blob_separation = separation;
            spec.quality_model = quality_model_from_string(quality_model);
            spec.relevant_fraction = relevant_fraction;
            spec.seed = seed;
            return generate(spec);
        },
        py::arg("n"), py::arg("dim") = 2, py::arg("blobs") = 1, py::arg("spread") = 1.0,
        py::arg("separation") = 10.0, py::arg("quality_model") = "uniform",
        py::arg("relevant_fraction") = 0.0, py::arg("seed") = 0,
        "Deterministic synthetic gaussian-mixture dataset.");

    m.def(
        "objective",
        [](const Dataset& ds, const std::vector<ItemId>& ids, double lam) {
            const auto b = objective(ds, ids, lam);
            return py::make_tuple(b.objective, b.quality, b.diversity);
        },
        py::arg("dataset"), py::arg("ids"), py::arg("lam"),
        "Returns (F, Q, D) with raw-sum terms; D counts ordered pairs.");

    m.def(
        "distance",
        [](const Dataset& ds, ItemId a, ItemId b) { return distance(ds, a, b); },
        py::arg("dataset"), py::arg("a"), py::arg("b"));

    m.def(
        "marginal_gain",
        [](const Dataset& ds, const std::vector<ItemId>& selection, ItemId t, double lam,
           bool normalize) { return marginal_gain(ds, selection, t, lam, normalize); },
        py::arg("dataset"), py::arg("selection"), py::arg("t"), py::arg("lam"),
        py::arg("normalize") = true);

    m.def(
        "mmr_select",
        [](const Dataset& ds, std::size_t k, double lam, const std::string& criterion,
           double sigma, bool normalize, py::object pool, bool sigma_sweep) {
            SelectionParams params;
            params.k = k;
            params.lambda = lam;
            params.criterion = criterion_from_string(criterion);
            params.sigma = sigma;
            params.normalize_by_size = normalize;
            const auto ids = pool_or_all(ds, pool);
            return sigma_sweep ? greedy_select_sigma_sweep(ds, ids, params)
                               : greedy_select(ds, ids, params).result;
        },
        py::arg("dataset"), py::arg("k"), py::arg("lam"), py::arg("criterion") = "sum",
        py::arg("sigma") = 1.0, py::arg("normalize") = true, py::arg("pool") = py::none(),
        py::arg("sigma_sweep") = false, "Monolithic greedy selection.");

    m.def(
        "kmeans_fit",
        [](const Dataset& ds, std::size_t l, double quality_weight, std::uint64_t seed,
           std::size_t max_iters, double tol, std::size_t workers) {
            KmeansOptions options;
            options.max_iters = max_iters;
            options.tol = tol;
            options.workers = workers;
            return kmeans_fit(ds, l, quality_weight, seed, options);
        },
        py::arg("dataset"), py::arg("l"), py::arg("quality_weight") = 0.0, py::arg("seed") = 0,
        py::arg("max_iters") = 100, py::arg("tol") = 1e-6, py::arg("workers") = 1);

    m.def("compute_wcss", &compute_wcss, py::arg("dataset"), py::arg("model"));
    m.def("summarize_clusters", &summarize_clusters, py::arg("dataset"), py::arg("model"));
    m.def("random_partition", &random_partition, py::arg("dataset"), py::arg("l"), py::arg("seed"));
    m.def("top_k_quality", &top_k_quality, py::arg("dataset"), py::arg("k"));

    m.def(
        "muss_select",
        [](const Dataset& ds, const ClusterModel& model, std::size_t k, std::size_t k_within,
           std::size_t m_clusters, double lam, double lambda_c, double sigma_final,
           std::size_t workers, std::uint64_t seed, const std::string& criterion,
           bool normalize) {
            MussParams params;
            params.k = k;
            params.k_within = k_within;
            params.l = model.l;
            params.m = m_clusters;
            params.lambda = lam;
            params.lambda_c = lambda_c;
            params.sigma_final = sigma_final;
            params.workers = workers;
            params.seed = seed;
            params.criterion = criterion_from_string(criterion);
            params.normalize_by_size = normalize;
            return muss_select(ds, model, params);
        },
        py::arg("dataset"), py::arg("model"), py::arg("k"), py::arg("k_within"), py::arg("m"),
        py::arg("lam"), py::arg("lambda_c") = 0.5, py::arg("sigma_final") = 1.0,
        py::arg("workers") = 1, py::arg("seed") = 0, py::arg("criterion") = "sum",
        py::arg("normalize") = true, "Multilevel selection over a fitted cluster model.");

    m.def(
        "dgds_select",
        [](const Dataset& ds, std::size_t k, std::size_t k_within, std::size_t l, double lam,
           std::size_t workers, std::uint64_t seed, const std::string& criterion, bool normalize) {
            DgdsParams params;
            params.k = k;
            params.k_within = k_within;
            params.l = l;
            params.lambda = lam;
            params.workers = workers;
            params.seed = seed;
            params.criterion = criterion_from_string(criterion);
            params.normalize_by_size = normalize;
            return dgds_select(ds, params);
        },
        py::arg("dataset"), py::arg("k"), py::arg("k_within"), py::arg("l"), py::arg("lam"),
        py::arg("workers") = 1, py::arg("seed") = 0, py::arg("criterion") = "sum",
        py::arg("normalize") = true, "Random-partition distributed greedy selection.");

    m.def(
        "baseline_select",
        [](const Dataset& ds, const std::string& kind, std::size_t k, std::uint64_t seed) {
            return baseline_select(ds, baseline_kind_from_string(kind), k, seed);
        },
        py::arg("dataset"), py::arg("kind"), py::arg("k"), py::arg("seed") = 0,
        "kind: random | topk | cluster-reps");

    m.def(
        "opt_brute_force",
        [](const Dataset& ds, std::size_t k, double lam, py::object pool, std::uint64_t cap) {
            const auto ids = pool_or_all(ds, pool);
            const auto result = opt_brute_force(ds, ids, k, lam, cap);
            return py::make_tuple(result.best_set, result.f_opt);
        },
        py::arg("dataset"), py::arg("k"), py::arg("lam"), py::arg("pool") = py::none(),
        py::arg("cap") = 2'000'000,
        "Exhaustive optimum on small instances; returns (ids, f_opt).");

    m.def(
        "theorem5_bound",
        [](std::size_t k, std::size_t m_clusters, double lam, double lambda_c, double r) {
            MussParams params;
            params.k = k;
            params.m = m_clusters;
            params.k_within = 1;
            params.lambda = lam;
            params.lambda_c = lambda_c;
            return compute_theorem5_bound(params, r);
        },
        py::arg("k"), py::arg("m"), py::arg("lam"), py::arg("lambda_c"), py::arg("r"));

    m.def(
        "precision_at_k",
        [](const Dataset& ds, const SelectionResult& result) { return precision_at_k(ds, result); },
        py::arg("dataset"), py::arg("result"));

    m.def("save_dataset_binary", &save_dataset_binary, py::arg("dataset"), py::arg("path"));
    m.def("load_dataset_binary", &load_dataset_binary, py::arg("path"));
    m.def("save_dataset_jsonl", &save_dataset_jsonl, py::arg("dataset"), py::arg("path"));
    m.def("load_dataset_jsonl", &load_dataset_jsonl, py::arg("path"));
    m.def("load_dataset", &load_dataset, py::arg("path"));
    m.def("save_model_json", &save_model_json, py::arg("dataset"), py::arg("model"),
          py::arg("path"));
    m.def("load_model_json", &load_model_json, py::arg("path"));

#ifdef MUSS_VERSION
    m.attr("__version__") = MUSS_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
