// Python bindings for the core operations: synthetic data, the clustering
// math, training, and the evaluation metrics.  Arrays cross the boundary by
// copy; everything here is a thin shim over the C++ library.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stdec/dataio.hpp"
#include "stdec/dec.hpp"
#include "stdec/kmeans.hpp"
#include "stdec/matrix.hpp"
#include "stdec/metrics.hpp"
#include "stdec/spatial.hpp"
#include "stdec/tsdist.hpp"

namespace py = pybind11;
using stdec::Matrix;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DArray& a) {
    const auto buf = a.request();
    if (buf.ndim != 2) throw std::invalid_argument("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(buf.shape[0]), static_cast<std::size_t>(buf.shape[1]));
    const double* src = static_cast<const double*>(buf.ptr);
    std::copy(src, src + m.size(), m.values().begin());
    return m;
}

py::array_t<double> to_array(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const DArray& a) {
    const auto buf = a.request();
    if (buf.ndim != 1) throw std::invalid_argument("expected a 1-d array");
    const double* src = static_cast<const double*>(buf.ptr);
    return std::vector<double>(src, src + buf.shape[0]);
}

stdec::tsdist::DtwConfig dtw_config(std::size_t band, const std::string& cost) {
    stdec::tsdist::DtwConfig cfg;
    cfg.band = band;
    if (cost == "squared_diff")
        cfg.point_cost = stdec::tsdist::PointCost::squared_diff;
    else if (cost == "abs_diff")
        cfg.point_cost = stdec::tsdist::PointCost::abs_diff;
    else
        throw std::invalid_argument("cost must be 'squared_diff' or 'abs_diff'");
    return cfg;
}

// values laid out (sensors, timestamps), one feature
stdec::data::RasterSeries raster_from(const DArray& values) {
    const auto buf = values.request();
    if (buf.ndim != 2) throw std::invalid_argument("values must be (sensors, timestamps)");
    stdec::data::RasterSeries r(static_cast<std::size_t>(buf.shape[0]),
                                static_cast<std::size_t>(buf.shape[1]), 1);
    const double* src = static_cast<const double*>(buf.ptr);
    std::copy(src, src + r.values.size(), r.values.begin());
    return r;
}

stdec::metrics::LabelGrid grid_from(const IArray& labels) {
    const auto buf = labels.request();
    if (buf.ndim != 2) throw std::invalid_argument("labels must be (timestamps, sensors)");
    stdec::metrics::LabelGrid g;
    g.timestamps = static_cast<std::size_t>(buf.shape[0]);
    g.sensors = static_cast<std::size_t>(buf.shape[1]);
    g.labels.resize(g.timestamps * g.sensors);
    const std::int64_t* src = static_cast<const std::int64_t*>(buf.ptr);
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
        if (src[i] < 0) throw std::invalid_argument("labels must be non-negative");
        g.labels[i] = static_cast<std::size_t>(src[i]);
    }
    return g;
}

template <typename T>
py::array_t<std::int64_t> index_array(const std::vector<T>& v) {
    py::array_t<std::int64_t> out(v.size());
    auto* dst = out.mutable_data();
    for (std::size_t i = 0; i < v.size(); ++i) dst[i] = static_cast<std::int64_t>(v[i]);
    return out;
}

py::dict generate_synthetic_py(std::size_t sensors, std::size_t days, std::size_t regions,
                               double noise, std::uint64_t seed,
                               std::optional<std::tuple<std::size_t, std::size_t, std::size_t,
                                                        double>> anomaly) {
    stdec::data::SyntheticSpec spec;
    spec.sensors = sensors;
    spec.days = days;
    spec.regions = stdec::data::even_regions(sensors, regions);
    spec.prototypes = stdec::data::default_prototypes(regions);
    spec.noise_std = noise;
    spec.seed = seed;
    if (anomaly) {
        stdec::data::Anomaly a;
        a.sensor = std::get<0>(*anomaly);
        a.start = std::get<1>(*anomaly);
        a.length = std::get<2>(*anomaly);
        a.scale = std::get<3>(*anomaly);
        spec.anomaly = a;
    }
    const auto res = stdec::data::generate_synthetic(spec);

    py::array_t<double> values({res.series.sensors, res.series.timestamps});
    std::copy(res.series.values.begin(), res.series.values.end(), values.mutable_data());
    py::dict out;
    out["values"] = values;
    out["region_of_sensor"] = index_array(res.region_of_sensor);
    return out;
}

py::dict train_py(const DArray& values, std::size_t w, std::size_t k, const std::string& variant,
                  double train_fraction, std::size_t epochs, std::size_t pretrain_epochs,
                  std::size_t batch, double dropout, double early_stop, std::uint64_t seed,
                  std::optional<double> alpha0, std::optional<double> alpha1,
                  std::optional<double> alpha2,
                  std::optional<std::vector<std::size_t>> hidden, std::size_t latent_pos,
                  std::size_t restarts) {
    namespace data = stdec::data;
    namespace dec = stdec::dec;

    const auto raster = raster_from(values);
    const auto parts = data::split(raster, train_fraction, w);
    const auto scaling = data::fit_scaling(parts.first);
    const auto ds = data::sliding_window(data::apply_scaling(parts.first, scaling), w);

    const auto var = dec::variant_from_name(variant);
    dec::LossWeights wts;
    switch (var) {  // same defaults the command line uses
        case dec::Variant::kmeans_ae: wts = {0.0, 0.0, 1.0}; break;
        case dec::Variant::dec: wts = {0.0, 0.2, 1.0}; break;
        case dec::Variant::sdec: wts = {0.1, 0.2, 1.0}; break;
    }
    if (alpha0) wts.alpha0 = *alpha0;
    if (alpha1) wts.alpha1 = *alpha1;
    if (alpha2) wts.alpha2 = *alpha2;

    dec::TrainConfig cfg;
    cfg.max_epochs = epochs;
    cfg.pretrain_epochs = pretrain_epochs;
    cfg.batch_size = batch;
    cfg.early_stop_assignment_change = early_stop;
    cfg.seed = seed;
    cfg.dropout = dropout;
    if (hidden) cfg.hidden = *hidden;
    cfg.latent_pos = latent_pos;
    cfg.k = k;
    cfg.kmeans_restarts = restarts;

    const auto lam = stdec::spatial::line_lambda(raster.sensors);
    const auto* lam_ptr = var == dec::Variant::sdec ? &lam : nullptr;
    const auto res = dec::train(ds, lam_ptr, cfg, wts, var);

    std::vector<std::size_t> locs, times;
    locs.reserve(res.assignments.point_index.size());
    times.reserve(res.assignments.point_index.size());
    for (const auto& p : res.assignments.point_index) {
        locs.push_back(p.location);
        times.push_back(p.time);
    }

    py::list log;
    for (const auto& e : res.log) {
        py::dict row;
        row["phase"] = e.phase;
        row["epoch"] = e.epoch;
        row["spatial"] = e.spatial;
        row["kl"] = e.kl;
        row["recon"] = e.recon;
        row["changed_fraction"] = e.changed_fraction;
        log.append(row);
    }

    py::dict out;
    out["hard"] = index_array(res.assignments.hard);
    out["q"] = to_array(res.assignments.q);
    out["location"] = index_array(locs);
    out["time"] = index_array(times);
    out["centroids"] = to_array(res.head.centroids);
    out["latents"] = to_array(dec::infer_dataset_latents(res.net, ds));
    out["log"] = log;
    out["joint_epochs_run"] = res.joint_epochs_run;
    out["early_stopped"] = res.early_stopped;
    out["degenerate_clusters"] = index_array(res.degenerate_clusters);
    return out;
}

}  // namespace

PYBIND11_MODULE(_stdec, m) {
    m.doc() = "Spatio-temporal deep embedded clustering of line-adjacent sensor series";

    m.def(
        "soft_assign",
        [](const DArray& z, const DArray& centroids) {
            stdec::dec::ClusterHead head;
            head.centroids = to_matrix(centroids);
            return to_array(stdec::dec::soft_assign(to_matrix(z), head));
        },
        py::arg("z"), py::arg("centroids"),
        "Student-t soft assignment of latent rows to centroids.");

    m.def(
        "target_distribution",
        [](const DArray& q) { return to_array(stdec::dec::target_distribution(to_matrix(q))); },
        py::arg("q"), "Sharpened, frequency-normalized target distribution.");

    m.def(
        "dtw",
        [](const DArray& a, const DArray& b, std::size_t band, const std::string& cost) {
            return stdec::tsdist::dtw(to_vector(a), to_vector(b), dtw_config(band, cost));
        },
        py::arg("a"), py::arg("b"), py::arg("band") = 6, py::arg("cost") = "squared_diff",
        "Banded dynamic time warping cost between equal-length series.");

    m.def(
        "line_lambda",
        [](std::size_t s) { return to_array(stdec::spatial::line_lambda(s).lambda); },
        py::arg("s"), "Signed line-adjacency closeness weights, s x s.");

    m.def(
        "connectivity",
        [](const IArray& labels) { return stdec::metrics::connectivity(grid_from(labels)); },
        py::arg("labels"), "Run-length connectivity score of a (timestamps, sensors) label grid.");

    m.def(
        "disconnectivity",
        [](const IArray& labels) { return stdec::metrics::disconnectivity(grid_from(labels)); },
        py::arg("labels"), "Split-cluster penalty of a (timestamps, sensors) label grid.");

    m.def(
        "spatial_metric",
        [](const IArray& labels) {
            const auto series = stdec::metrics::spatial_metric_series(grid_from(labels));
            py::dict out;
            out["per_timestamp"] = series.per_timestamp;
            out["aggregate"] = series.aggregate;
            return out;
        },
        py::arg("labels"), "Per-timestamp and aggregate (s_c - s_d) / s^2 series.");

    m.def(
        "welch_t_test",
        [](const DArray& a, const DArray& b) {
            const auto r = stdec::metrics::welch_t_test(to_vector(a), to_vector(b));
            py::dict out;
            out["t"] = r.t;
            out["df"] = r.df;
            out["p"] = r.p;
            return out;
        },
        py::arg("a"), py::arg("b"), "Welch unequal-variance t-test, two-sided p.");

    m.def(
        "kmeans",
        [](const DArray& points, std::size_t k, std::size_t restarts, std::uint64_t seed) {
            const auto r = stdec::cluster::kmeans(to_matrix(points), k, restarts, seed);
            py::dict out;
            out["centroids"] = to_array(r.centroids);
            out["assignments"] = index_array(r.assignments);
            out["inertia"] = r.inertia;
            out["iterations"] = r.iterations;
            return out;
        },
        py::arg("points"), py::arg("k"), py::arg("restarts") = 5, py::arg("seed") = 0,
        "Seeded k-means with restarts; returns centroids, assignments, inertia.");

    m.def("generate_synthetic", &generate_synthetic_py, py::arg("sensors"), py::arg("days") = 14,
          py::arg("regions") = 3, py::arg("noise") = 0.05, py::arg("seed") = 7,
          py::arg("anomaly") = py::none(),
          "Planted-region synthetic traffic raster; values are (sensors, timestamps).\n"
          "anomaly, when given, is (sensor, start, length, scale).");

    m.def("train", &train_py, py::arg("values"), py::arg("w") = 12, py::arg("k") = 4,
          py::arg("variant") = "sdec", py::arg("train_fraction") = 0.6, py::arg("epochs") = 100,
          py::arg("pretrain_epochs") = 30, py::arg("batch") = 288, py::arg("dropout") = 0.2,
          py::arg("early_stop") = 0.001, py::arg("seed") = 0, py::arg("alpha0") = py::none(),
          py::arg("alpha1") = py::none(), py::arg("alpha2") = py::none(),
          py::arg("hidden") = py::none(), py::arg("latent_pos") = 3, py::arg("restarts") = 5,
          "Full training pipeline on a (sensors, timestamps) raster: chronological split,\n"
          "min-max scaling fitted on the train part, end-labeled windows, then the chosen\n"
          "variant (kmeans | kmeans-dtw | dec | sdec).  Returns assignments, centroids,\n"
          "latents, and the per-epoch loss log for the train part.");
}
