#include "stdec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "stdec/checkpoint.hpp"
#include "stdec/csv.hpp"
#include "stdec/dataio.hpp"
#include "stdec/dec.hpp"
#include "stdec/kmeans.hpp"
#include "stdec/metrics.hpp"
#include "stdec/spatial.hpp"
#include "stdec/tsdist.hpp"

namespace stdec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void DataSource::validate() const {
    const bool has_csv = !csv_path.empty();
    const bool has_synth = synth_sensors > 0;
    if (has_csv == has_synth)
        throw std::invalid_argument("exactly one data source required: --data or --synth-sensors");
    if (csv_format != "wide" && csv_format != "long")
        throw std::invalid_argument("--format must be wide or long");
}

namespace {

void ensure_dir(const std::string& dir) {
    if (dir.empty()) throw std::invalid_argument("--out directory is required");
    fs::create_directories(dir);
}

data::SyntheticSpec spec_from_source(const DataSource& src) {
    data::SyntheticSpec spec;
    spec.sensors = src.synth_sensors;
    spec.days = src.synth_days;
    spec.regions = data::even_regions(src.synth_sensors, src.synth_regions);
    spec.prototypes = data::default_prototypes(src.synth_regions);
    spec.noise_std = src.synth_noise;
    spec.seed = src.synth_seed;
    if (src.anomaly_length > 0)
        spec.anomaly = data::Anomaly{src.anomaly_sensor, src.anomaly_start, src.anomaly_length,
                                     src.anomaly_scale};
    return spec;
}

data::RasterSeries load_source(const DataSource& src) {
    src.validate();
    if (!src.csv_path.empty()) {
        const auto schema = src.csv_format == "long" ? data::CsvSchema::long_format
                                                     : data::CsvSchema::wide;
        return data::ingest_csv(src.csv_path, schema).series;
    }
    return data::generate_synthetic(spec_from_source(src)).series;
}

tsdist::PointCost cost_from_name(const std::string& name) {
    if (name == "squared_diff") return tsdist::PointCost::squared_diff;
    if (name == "abs_diff") return tsdist::PointCost::abs_diff;
    throw std::invalid_argument("--point-cost must be squared_diff or abs_diff");
}

struct SplitWindows {
    data::WindowedDataset ds;
    data::ScalingRecord scaling;
};

// Training-side pipeline: time split, scaling fit on train, windows of train.
SplitWindows prepare_train_windows(const data::RasterSeries& raster, double train_fraction,
                                   std::size_t w) {
    auto [train, test] = data::split(raster, train_fraction, w);
    SplitWindows out;
    out.scaling = data::fit_scaling(train);
    out.ds = data::sliding_window(data::apply_scaling(train, out.scaling), w);
    return out;
}

// Evaluation-side pipeline: stored scaling, requested split.
data::WindowedDataset prepare_eval_windows(const data::RasterSeries& raster,
                                           const io::Checkpoint& cp, const std::string& which) {
    if (which == "all")
        return data::sliding_window(data::apply_scaling(raster, cp.scaling), cp.w);
    auto [train, test] = data::split(raster, cp.train_fraction, cp.w);
    const data::RasterSeries& part = which == "train" ? train : test;
    return data::sliding_window(data::apply_scaling(part, cp.scaling), cp.w);
}

void write_assignments_csv(const dec::Assignments& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,i,hard";
    for (std::size_t j = 0; j < a.q.cols(); ++j) out << ",q_" << j;
    out << '\n';
    for (std::size_t r = 0; r < a.q.rows(); ++r) {
        out << a.point_index[r].time << ',' << a.point_index[r].location << ',' << a.hard[r];
        for (std::size_t j = 0; j < a.q.cols(); ++j)
            out << ',' << csv::format_double(a.q(r, j));
        out << '\n';
    }
}

void write_losses_csv(const std::vector<dec::EpochLog>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "phase,epoch,spatial,kl,recon,changed_fraction\n";
    auto field = [](double v) { return std::isnan(v) ? std::string() : csv::format_double(v); };
    for (const auto& e : log)
        out << e.phase << ',' << e.epoch << ',' << field(e.spatial) << ',' << field(e.kl) << ','
            << field(e.recon) << ',' << field(e.changed_fraction) << '\n';
}

void write_grid_csv(const Matrix& grid, const std::vector<std::string>& sensor_ids,
                    std::size_t w, const std::string& path, bool integer_cells) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t";
    for (const auto& id : sensor_ids) out << ',' << id;
    out << '\n';
    for (std::size_t b = 0; b < grid.rows(); ++b) {
        out << (b + w - 1);
        for (std::size_t i = 0; i < grid.cols(); ++i) {
            if (integer_cells)
                out << ',' << static_cast<long long>(grid(b, i));
            else
                out << ',' << csv::format_double(grid(b, i));
        }
        out << '\n';
    }
}

json source_to_json(const DataSource& s) {
    return json{{"data", s.csv_path},
                {"format", s.csv_format},
                {"synth-sensors", s.synth_sensors},
                {"synth-days", s.synth_days},
                {"synth-regions", s.synth_regions},
                {"synth-noise", s.synth_noise},
                {"synth-seed", s.synth_seed},
                {"anomaly-sensor", s.anomaly_sensor},
                {"anomaly-start", s.anomaly_start},
                {"anomaly-length", s.anomaly_length},
                {"anomaly-scale", s.anomaly_scale}};
}

void source_from_json(DataSource& s, const json& j) {
    s.csv_path = j.value("data", s.csv_path);
    s.csv_format = j.value("format", s.csv_format);
    s.synth_sensors = j.value("synth-sensors", s.synth_sensors);
    s.synth_days = j.value("synth-days", s.synth_days);
    s.synth_regions = j.value("synth-regions", s.synth_regions);
    s.synth_noise = j.value("synth-noise", s.synth_noise);
    s.synth_seed = j.value("synth-seed", s.synth_seed);
    s.anomaly_sensor = j.value("anomaly-sensor", s.anomaly_sensor);
    s.anomaly_start = j.value("anomaly-start", s.anomaly_start);
    s.anomaly_length = j.value("anomaly-length", s.anomaly_length);
    s.anomaly_scale = j.value("anomaly-scale", s.anomaly_scale);
}

json train_args_to_json(const TrainArgs& a) {
    json j = source_to_json(a.source);
    j["variant"] = a.variant;
    j["w"] = a.w;
    j["band"] = a.band;
    j["point-cost"] = a.point_cost;
    j["k"] = a.k;
    j["elbow-min"] = a.elbow_min;
    j["elbow-max"] = a.elbow_max;
    j["alpha0"] = a.alpha0;
    j["alpha1"] = a.alpha1;
    j["alpha2"] = a.alpha2;
    j["batch"] = a.batch;
    j["epochs"] = a.epochs;
    j["pretrain-epochs"] = a.pretrain_epochs;
    j["dropout"] = a.dropout;
    j["lr"] = a.lr;
    j["restarts"] = a.restarts;
    j["early-stop"] = a.early_stop;
    j["train-fraction"] = a.train_fraction;
    j["seed"] = a.seed;
    j["lambda-csv"] = a.lambda_csv;
    j["hidden"] = a.hidden;
    j["latent-pos"] = a.latent_pos;
    j["out"] = a.out_dir;
    return j;
}

void train_args_from_json(TrainArgs& a, const json& j) {
    source_from_json(a.source, j);
    a.variant = j.value("variant", a.variant);
    a.w = j.value("w", a.w);
    a.band = j.value("band", a.band);
    a.point_cost = j.value("point-cost", a.point_cost);
    a.k = j.value("k", a.k);
    a.elbow_min = j.value("elbow-min", a.elbow_min);
    a.elbow_max = j.value("elbow-max", a.elbow_max);
    a.alpha0 = j.value("alpha0", a.alpha0);
    a.alpha1 = j.value("alpha1", a.alpha1);
    a.alpha2 = j.value("alpha2", a.alpha2);
    a.batch = j.value("batch", a.batch);
    a.epochs = j.value("epochs", a.epochs);
    a.pretrain_epochs = j.value("pretrain-epochs", a.pretrain_epochs);
    a.dropout = j.value("dropout", a.dropout);
    a.lr = j.value("lr", a.lr);
    a.restarts = j.value("restarts", a.restarts);
    a.early_stop = j.value("early-stop", a.early_stop);
    a.train_fraction = j.value("train-fraction", a.train_fraction);
    a.seed = j.value("seed", a.seed);
    a.lambda_csv = j.value("lambda-csv", a.lambda_csv);
    a.hidden = j.value("hidden", a.hidden);
    a.latent_pos = j.value("latent-pos", a.latent_pos);
    a.out_dir = j.value("out", a.out_dir);
}

dec::LossWeights resolve_weights(const TrainArgs& args) {
    dec::LossWeights w;
    if (args.variant == "kmeans" || args.variant == "kmeans-dtw") {
        w = {0.0, 0.0, 1.0};
    } else if (args.variant == "dec") {
        w = {0.0, 0.2, 1.0};
    } else if (args.variant == "sdec") {
        w = {0.1, 0.2, 1.0};
    } else {
        throw std::invalid_argument("--variant must be kmeans, kmeans-dtw, dec or sdec");
    }
    if (args.alpha0 >= 0.0) w.alpha0 = args.alpha0;
    if (args.alpha1 >= 0.0) w.alpha1 = args.alpha1;
    if (args.alpha2 >= 0.0) w.alpha2 = args.alpha2;
    if (args.variant == "dec" && w.alpha0 != 0.0)
        throw std::invalid_argument("variant dec requires alpha0 == 0 (use sdec for spatial loss)");
    if (args.variant == "kmeans" && (w.alpha0 != 0.0 || w.alpha1 != 0.0))
        throw std::invalid_argument("variant kmeans requires alpha0 == alpha1 == 0");
    w.validate();
    return w;
}

dec::TrainConfig build_train_config(const TrainArgs& args) {
    dec::TrainConfig tc;
    tc.max_epochs = args.epochs;
    tc.pretrain_epochs = args.pretrain_epochs;
    tc.batch_size = args.batch;
    tc.early_stop_assignment_change = args.early_stop;
    tc.seed = args.seed;
    tc.adam.learning_rate = args.lr;
    tc.dropout = args.dropout;
    tc.hidden = args.hidden;
    tc.latent_pos = args.latent_pos;
    tc.k = args.k;
    tc.kmeans_restarts = args.restarts;
    return tc;
}

std::vector<std::size_t> elbow_candidates(std::size_t k_min, std::size_t k_max,
                                          std::size_t step) {
    if (k_min < 1 || k_max <= k_min || step < 1)
        throw std::invalid_argument("elbow range must satisfy 1 <= k_min < k_max, step >= 1");
    std::vector<std::size_t> ks;
    for (std::size_t k = k_min; k <= k_max; k += step) ks.push_back(k);
    if (ks.size() < 3) throw std::invalid_argument("elbow range must contain at least 3 ks");
    return ks;
}

void write_elbow_outputs(const cluster::ElbowCurve& curve, const std::string& dir) {
    std::ofstream out(dir + "/elbow.csv");
    if (!out) throw std::runtime_error("cannot write " + dir + "/elbow.csv");
    out << "k,inertia,knee_flag\n";
    for (std::size_t i = 0; i < curve.ks.size(); ++i)
        out << curve.ks[i] << ',' << csv::format_double(curve.inertias[i]) << ','
            << (!curve.no_knee && curve.ks[i] == curve.knee ? 1 : 0) << '\n';
    json j{{"knee", curve.knee}, {"no_knee", curve.no_knee}};
    std::ofstream js(dir + "/elbow.json");
    js << j.dump(2) << '\n';
}

// kmeans-dtw assignments for a window set against stored medoid series.
dec::Assignments dtw_assignments(const data::WindowedDataset& ds, const Matrix& medoids,
                                 const tsdist::DtwConfig& cfg) {
    dec::Assignments a;
    const std::size_t n = ds.size(), k = medoids.rows();
    a.q = Matrix(n, k);
    a.hard.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t best = 0;
        double best_v = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            const double v = tsdist::dtw(ds.series.row(r), medoids.row(c), cfg);
            if (v < best_v) {
                best_v = v;
                best = c;
            }
        }
        a.hard[r] = best;
        a.q(r, best) = 1.0;
    }
    a.p = a.q;
    a.point_index = ds.index;
    return a;
}

Matrix dtw_anomaly_grid(const data::WindowedDataset& ds, const dec::Assignments& a,
                        const Matrix& medoids, const tsdist::DtwConfig& cfg) {
    Matrix grid(ds.blocks(), ds.sensors);
    for (std::size_t r = 0; r < ds.size(); ++r)
        grid(r / ds.sensors, r % ds.sensors) =
            tsdist::dtw(ds.series.row(r), medoids.row(a.hard[r]), cfg);
    return grid;
}

}  // namespace

int cmd_synth(const SynthArgs& args) {
    ensure_dir(args.out_dir);
    data::SyntheticSpec spec;
    spec.sensors = args.sensors;
    spec.days = args.days;
    spec.regions = data::even_regions(args.sensors, args.regions);
    spec.prototypes = data::default_prototypes(args.regions);
    spec.noise_std = args.noise;
    spec.seed = args.seed;
    if (args.anomaly_length > 0)
        spec.anomaly = data::Anomaly{args.anomaly_sensor, args.anomaly_start,
                                     args.anomaly_length, args.anomaly_scale};
    auto result = data::generate_synthetic(spec);
    data::write_raster_csv(result.series, args.out_dir + "/series.csv");
    data::write_labels_csv(result.region_of_sensor, result.series.sensor_ids,
                           args.out_dir + "/regions.csv");
    std::cout << "wrote " << args.out_dir << "/series.csv (" << result.series.sensors << " x "
              << result.series.timestamps << ") and regions.csv\n";
    return 0;
}

int cmd_ingest(const IngestArgs& args) {
    if (args.data.empty()) throw std::invalid_argument("--data is required");
    ensure_dir(args.out_dir);
    const auto schema =
        args.format == "long" ? data::CsvSchema::long_format : data::CsvSchema::wide;
    auto result = data::ingest_csv(args.data, schema);
    data::write_raster_csv(result.series, args.out_dir + "/clean.csv");
    json rep{{"sensors", result.series.sensors},
             {"timestamps", result.series.timestamps},
             {"interpolated_per_sensor", result.interpolated_per_sensor}};
    std::ofstream js(args.out_dir + "/ingest_report.json");
    js << rep.dump(2) << '\n';
    std::size_t total_interp = 0;
    for (auto c : result.interpolated_per_sensor) total_interp += c;
    std::cout << "ingested " << result.series.sensors << " sensors x "
              << result.series.timestamps << " timestamps, interpolated " << total_interp
              << " cells\n";
    return 0;
}

int cmd_train(const TrainArgs& args) {
    ensure_dir(args.out_dir);
    const auto weights = resolve_weights(args);
    auto raster = load_source(args.source);
    const std::uint64_t hash = io::hash_raster(raster);
    auto prepared = prepare_train_windows(raster, args.train_fraction, args.w);
    const auto& ds = prepared.ds;

    const tsdist::DtwConfig dtw_cfg{args.band, cost_from_name(args.point_cost)};
    if (args.band < 1 || args.band > args.w)
        throw std::invalid_argument("--band must lie in [1, w]");

    io::Checkpoint cp;
    cp.variant = args.variant;
    cp.w = args.w;
    cp.features = raster.features;
    cp.sensors = raster.sensors;
    cp.band = args.band;
    cp.point_cost = dtw_cfg.point_cost;
    cp.seed = args.seed;
    cp.weights = weights;
    cp.train_fraction = args.train_fraction;
    cp.data_hash = hash;
    cp.sensor_ids = raster.sensor_ids;
    cp.scaling = prepared.scaling;

    std::size_t k = args.k;
    if (k == 0) {
        auto ks = elbow_candidates(args.elbow_min, args.elbow_max, 1);
        cluster::ElbowCurve curve;
        if (args.variant == "kmeans-dtw") {
            curve = cluster::elbow(ds.series, ks, args.restarts, args.seed);
        } else {
            TrainArgs probe = args;
            probe.k = 2;
            auto pre = dec::train(ds, nullptr, build_train_config(probe),
                                  dec::LossWeights{0.0, 0.0, 1.0}, dec::Variant::kmeans_ae);
            Matrix latents = dec::infer_dataset_latents(pre.net, ds);
            curve = cluster::elbow(latents, ks, args.restarts, args.seed);
        }
        write_elbow_outputs(curve, args.out_dir);
        k = curve.knee;
        std::cout << "elbow selected k=" << k << (curve.no_knee ? " (no knee; smallest k)" : "")
                  << '\n';
    }
    cp.k = k;

    if (args.variant == "kmeans-dtw") {
        auto result = cluster::kmedoid_dtw(ds.series, k, dtw_cfg, args.restarts, args.seed);
        cp.centroids = result.centroids;
        cp.medoid_indices = result.medoid_indices;
        io::save_checkpoint(cp, args.out_dir + "/checkpoint.json");
        dec::Assignments a;
        a.q = Matrix(ds.size(), k);
        for (std::size_t r = 0; r < ds.size(); ++r) a.q(r, result.assignments[r]) = 1.0;
        a.p = a.q;
        a.hard = result.assignments;
        a.point_index = ds.index;
        write_assignments_csv(a, args.out_dir + "/assignments.csv");
        std::ofstream losses(args.out_dir + "/losses.csv");
        losses << "phase,epoch,spatial,kl,recon,changed_fraction\n";
        std::ofstream cfg_echo(args.out_dir + "/config.json");
        json echo = train_args_to_json(args);
        echo["k"] = k;
        cfg_echo << echo.dump(2) << '\n';
        std::cout << "kmeans-dtw inertia " << result.inertia << ", " << result.iterations
                  << " sweeps; artifacts in " << args.out_dir << '\n';
        return 0;
    }

    TrainArgs resolved = args;
    resolved.k = k;
    dec::TrainConfig tc = build_train_config(resolved);
    const auto variant = dec::variant_from_name(args.variant);

    spatial::SpatialWeights lambda;
    const spatial::SpatialWeights* lambda_ptr = nullptr;
    if (!args.lambda_csv.empty()) {
        lambda = spatial::load_lambda_csv(args.lambda_csv);
        lambda_ptr = &lambda;
    } else if (weights.alpha0 > 0.0) {
        lambda = spatial::line_lambda(ds.sensors);
        lambda_ptr = &lambda;
    }

    auto result = dec::train(ds, lambda_ptr, tc, weights, variant);

    cp.net = result.net;
    cp.centroids = result.head.centroids;
    io::save_checkpoint(cp, args.out_dir + "/checkpoint.json");
    write_assignments_csv(result.assignments, args.out_dir + "/assignments.csv");
    write_losses_csv(result.log, args.out_dir + "/losses.csv");
    std::ofstream cfg_echo(args.out_dir + "/config.json");
    json echo = train_args_to_json(args);
    echo["k"] = k;
    cfg_echo << echo.dump(2) << '\n';

    std::cout << args.variant << " trained: " << result.joint_epochs_run << " joint epochs"
              << (result.early_stopped ? " (early stop)" : "");
    if (!result.degenerate_clusters.empty())
        std::cout << "; " << result.degenerate_clusters.size() << " degenerate clusters";
    std::cout << "; artifacts in " << args.out_dir << '\n';
    return 0;
}

int cmd_evaluate(const EvalArgs& args) {
    if (args.checkpoints.empty()) throw std::invalid_argument("at least one --checkpoint required");
    if (args.split != "train" && args.split != "test" && args.split != "all")
        throw std::invalid_argument("--split must be train, test or all");
    ensure_dir(args.out_dir);
    auto raster = load_source(args.source);
    const std::uint64_t hash = io::hash_raster(raster);

    std::vector<metrics::ModelReport> reports;
    std::vector<std::string> names;
    for (const auto& path : args.checkpoints) {
        auto cp = io::load_checkpoint(path);
        if (cp.data_hash != hash)
            throw std::runtime_error("checkpoint " + path +
                                     " was trained on different data (hash mismatch)");
        if (cp.sensors != raster.sensors || cp.features != raster.features)
            throw std::runtime_error("checkpoint " + path + " shape does not match data");

        std::string name = fs::path(path).parent_path().filename().string();
        if (name.empty()) name = fs::path(path).stem().string();
        while (std::find(names.begin(), names.end(), name) != names.end()) name += "+";
        names.push_back(name);

        auto ds = prepare_eval_windows(raster, cp, args.split);
        const tsdist::DtwConfig dtw_cfg{cp.band, cp.point_cost};

        dec::Assignments a;
        Matrix latents;
        Matrix anomaly;
        if (cp.variant == "kmeans-dtw") {
            a = dtw_assignments(ds, cp.centroids, dtw_cfg);
            latents = ds.series;  // compactness medoids fall back to window space
            anomaly = dtw_anomaly_grid(ds, a, cp.centroids, dtw_cfg);
        } else {
            if (!cp.net) throw std::runtime_error("checkpoint " + path + " holds no network");
            dec::ClusterHead head{cp.centroids};
            latents = dec::infer_dataset_latents(*cp.net, ds);
            a = dec::compute_assignments(*cp.net, head, ds);
            anomaly = dec::anomaly_distance(a, latents, head, ds.sensors);
        }

        auto rep = metrics::evaluate_model(name, a, ds.series, latents, ds.sensors, cp.k, cp.w,
                                           dtw_cfg);
        reports.push_back(rep);

        metrics::LabelGrid grid = metrics::grid_from_assignments(a, ds.sensors);
        Matrix grid_m(grid.timestamps, grid.sensors);
        for (std::size_t t = 0; t < grid.timestamps; ++t)
            for (std::size_t i = 0; i < grid.sensors; ++i)
                grid_m(t, i) = static_cast<double>(grid.at(t, i));
        write_grid_csv(grid_m, raster.sensor_ids, cp.w, args.out_dir + "/grid_" + name + ".csv",
                       true);
        write_grid_csv(anomaly, raster.sensor_ids, cp.w,
                       args.out_dir + "/anomaly_" + name + ".csv", false);
        if (args.export_latent) {
            std::ofstream lat(args.out_dir + "/latent_" + name + ".csv");
            lat << "t,i";
            for (std::size_t c = 0; c < latents.cols(); ++c) lat << ",z" << c;
            lat << '\n';
            for (std::size_t r = 0; r < latents.rows(); ++r) {
                lat << a.point_index[r].time << ',' << a.point_index[r].location;
                for (std::size_t c = 0; c < latents.cols(); ++c)
                    lat << ',' << csv::format_double(latents(r, c));
                lat << '\n';
            }
        }
    }

    auto cmp = metrics::assemble_report(reports);

    std::ofstream table(args.out_dir + "/comparison.csv");
    table << "model,compactness,connectivity,disconnectivity\n";
    for (const auto& m : cmp.models)
        table << m.model << ',' << csv::format_double(m.compactness.normalized_total) << ','
              << csv::format_double(m.connectivity_norm) << ','
              << csv::format_double(m.disconnectivity_norm) << '\n';

    const bool same_len = std::all_of(cmp.models.begin(), cmp.models.end(), [&](const auto& m) {
        return m.sm_series.per_timestamp.size() ==
               cmp.models[0].sm_series.per_timestamp.size();
    });
    if (same_len) {
        std::ofstream sm(args.out_dir + "/sm_series.csv");
        sm << "t";
        for (const auto& m : cmp.models) sm << ',' << m.model;
        sm << '\n';
        for (std::size_t t = 0; t < cmp.models[0].sm_series.per_timestamp.size(); ++t) {
            sm << t;
            for (const auto& m : cmp.models)
                sm << ',' << csv::format_double(m.sm_series.per_timestamp[t]);
            sm << '\n';
        }
    }

    json j;
    j["split"] = args.split;
    j["data_hash"] = hash;
    j["models"] = json::array();
    for (const auto& m : cmp.models) {
        json mj;
        mj["model"] = m.model;
        mj["compactness"] = {{"per_cluster", m.compactness.per_cluster},
                             {"normalized_total", m.compactness.normalized_total},
                             {"medoid_rows", m.compactness.medoid_rows}};
        mj["connectivity"] = {{"raw", m.connectivity_raw}, {"normalized", m.connectivity_norm}};
        mj["disconnectivity"] = {{"raw", m.disconnectivity_raw},
                                 {"normalized", m.disconnectivity_norm}};
        mj["spatial_metric"] = m.spatial_metric;
        mj["degenerate_clusters"] = m.degenerate_clusters;
        j["models"].push_back(mj);
    }
    j["tests"] = json::array();
    for (const auto& t : cmp.tests)
        j["tests"].push_back(json{{"model_a", t.model_a},
                                  {"model_b", t.model_b},
                                  {"t", t.test.t},
                                  {"df", t.test.df},
                                  {"p", t.test.p}});
    std::ofstream rep(args.out_dir + "/report.json");
    rep << j.dump(2) << '\n';

    for (const auto& m : cmp.models)
        std::cout << m.model << ": compactness " << m.compactness.normalized_total
                  << ", connectivity " << m.connectivity_norm << ", disconnectivity "
                  << m.disconnectivity_norm << ", s_m " << m.spatial_metric << '\n';
    for (const auto& t : cmp.tests)
        std::cout << t.model_a << " vs " << t.model_b << ": t=" << t.test.t
                  << " df=" << t.test.df << " p=" << t.test.p << '\n';
    return 0;
}

int cmd_elbow(const ElbowArgs& args) {
    ensure_dir(args.out_dir);
    auto ks = elbow_candidates(args.k_min, args.k_max, args.k_step);
    auto raster = load_source(args.source);

    cluster::ElbowCurve curve;
    if (args.space == "window") {
        auto prepared = prepare_train_windows(raster, args.train_fraction, args.w);
        curve = cluster::elbow(prepared.ds.series, ks, args.restarts, args.seed);
    } else if (args.space == "latent") {
        if (args.checkpoint.empty())
            throw std::invalid_argument("--space latent requires --checkpoint");
        auto cp = io::load_checkpoint(args.checkpoint);
        if (!cp.net) throw std::runtime_error("checkpoint holds no network");
        if (cp.data_hash != io::hash_raster(raster))
            throw std::runtime_error("checkpoint was trained on different data (hash mismatch)");
        auto ds = prepare_eval_windows(raster, cp, "train");
        Matrix latents = dec::infer_dataset_latents(*cp.net, ds);
        curve = cluster::elbow(latents, ks, args.restarts, args.seed);
    } else {
        throw std::invalid_argument("--space must be window or latent");
    }
    write_elbow_outputs(curve, args.out_dir);
    std::cout << "knee at k=" << curve.knee << (curve.no_knee ? " (no knee)" : "") << '\n';
    return 0;
}

int cmd_export(const ExportArgs& args) {
    if (args.split != "train" && args.split != "test" && args.split != "all")
        throw std::invalid_argument("--split must be train, test or all");
    ensure_dir(args.out_dir);
    auto raster = load_source(args.source);
    auto [train, test] = data::split(raster, args.train_fraction, args.w);
    auto scaling = data::fit_scaling(train);
    const data::RasterSeries& part =
        args.split == "train" ? train : (args.split == "test" ? test : raster);
    auto ds = data::sliding_window(data::apply_scaling(part, scaling), args.w);
    data::write_windows_csv(ds, args.out_dir + "/windows.csv");
    spatial::write_lambda_csv(spatial::line_lambda(raster.sensors),
                              args.out_dir + "/lambda.csv");
    std::cout << "wrote " << ds.size() << " windows and the lambda matrix to " << args.out_dir
              << '\n';
    return 0;
}

namespace {

std::uint64_t env_seed_fallback() {
    const char* env = std::getenv("STDEC_SEED");
    if (env == nullptr) return 0;
    return std::strtoull(env, nullptr, 10);
}

void add_source_options(CLI::App* cmd, DataSource& src) {
    cmd->add_option("--data", src.csv_path, "input CSV path");
    cmd->add_option("--format", src.csv_format, "CSV layout: wide | long");
    cmd->add_option("--synth-sensors", src.synth_sensors, "generate synthetic data instead");
    cmd->add_option("--synth-days", src.synth_days, "synthetic days");
    cmd->add_option("--synth-regions", src.synth_regions, "synthetic region count");
    cmd->add_option("--synth-noise", src.synth_noise, "synthetic noise std");
    cmd->add_option("--synth-seed", src.synth_seed, "synthetic generator seed");
    cmd->add_option("--anomaly-sensor", src.anomaly_sensor, "synthetic anomaly sensor");
    cmd->add_option("--anomaly-start", src.anomaly_start, "synthetic anomaly start timestamp");
    cmd->add_option("--anomaly-length", src.anomaly_length,
                    "synthetic anomaly length (0 = none)");
    cmd->add_option("--anomaly-scale", src.anomaly_scale, "synthetic anomaly multiplier");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"spatio-temporal deep embedded clustering toolkit"};
    app.require_subcommand(1);

    // --config preload: JSON defaults that explicit flags override
    TrainArgs train_args;
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config") config_path = argv[i + 1];
    }
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("--config=", 0) == 0) config_path = a.substr(9);
    }
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config " << config_path << '\n';
            return 1;
        }
        json j;
        try {
            in >> j;
            train_args_from_json(train_args, j);
        } catch (const std::exception& e) {
            std::cerr << "bad config " << config_path << ": " << e.what() << '\n';
            return 1;
        }
    }

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a planted-cluster synthetic dataset");
    synth->add_option("--sensors", synth_args.sensors, "sensor count");
    synth->add_option("--days", synth_args.days, "number of days");
    synth->add_option("--regions", synth_args.regions, "contiguous region count");
    synth->add_option("--noise", synth_args.noise, "gaussian noise std");
    auto* synth_seed = synth->add_option("--seed", synth_args.seed, "generator seed");
    synth->add_option("--anomaly-sensor", synth_args.anomaly_sensor, "anomaly sensor index");
    synth->add_option("--anomaly-start", synth_args.anomaly_start, "anomaly start timestamp");
    synth->add_option("--anomaly-length", synth_args.anomaly_length, "anomaly length (0 = none)");
    synth->add_option("--anomaly-scale", synth_args.anomaly_scale, "anomaly multiplier");
    synth->add_option("--out", synth_args.out_dir, "output directory")->required();

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "validate and clean a sensor CSV");
    ingest->add_option("--data", ingest_args.data, "input CSV")->required();
    ingest->add_option("--format", ingest_args.format, "wide | long");
    ingest->add_option("--out", ingest_args.out_dir, "output directory")->required();

    auto* train = app.add_subcommand("train", "train a clustering model");
    add_source_options(train, train_args.source);
    train->add_option("--config", config_path, "JSON config file (flags override)");
    train->add_option("--variant", train_args.variant, "kmeans | kmeans-dtw | dec | sdec");
    train->add_option("--w", train_args.w, "window length");
    train->add_option("--band", train_args.band, "DTW band radius");
    train->add_option("--point-cost", train_args.point_cost, "squared_diff | abs_diff");
    train->add_option("--k", train_args.k, "cluster count (0 = select via elbow range)");
    train->add_option("--elbow-min", train_args.elbow_min, "elbow range lower k");
    train->add_option("--elbow-max", train_args.elbow_max, "elbow range upper k");
    train->add_option("--alpha0", train_args.alpha0, "spatial loss weight");
    train->add_option("--alpha1", train_args.alpha1, "clustering loss weight");
    train->add_option("--alpha2", train_args.alpha2, "reconstruction loss weight");
    train->add_option("--batch", train_args.batch, "mini-batch size in points");
    train->add_option("--epochs", train_args.epochs, "max joint epochs");
    train->add_option("--pretrain-epochs", train_args.pretrain_epochs, "autoencoder epochs");
    train->add_option("--dropout", train_args.dropout, "dropout rate");
    train->add_option("--lr", train_args.lr, "Adam learning rate");
    train->add_option("--restarts", train_args.restarts, "k-means restarts");
    train->add_option("--early-stop", train_args.early_stop,
                      "assignment-change stop threshold (<0 disables)");
    train->add_option("--train-fraction", train_args.train_fraction, "time-prefix split");
    auto* train_seed = train->add_option("--seed", train_args.seed, "training seed");
    train->add_option("--lambda-csv", train_args.lambda_csv, "custom spatial weight matrix");
    train->add_option("--hidden", train_args.hidden, "encoder/decoder stack")->delimiter(',');
    train->add_option("--latent-pos", train_args.latent_pos, "latent layer position");
    train->add_option("--out", train_args.out_dir, "output directory")->required();

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "evaluate checkpoints and compare models");
    eval->add_option("--checkpoint", eval_args.checkpoints, "checkpoint.json (repeatable)")
        ->required();
    add_source_options(eval, eval_args.source);
    eval->add_option("--split", eval_args.split, "train | test | all");
    eval->add_flag("--export-latent", eval_args.export_latent, "write latent CSVs");
    eval->add_option("--out", eval_args.out_dir, "output directory")->required();

    ElbowArgs elbow_args;
    auto* elb = app.add_subcommand("elbow", "inertia curve and knee selection");
    add_source_options(elb, elbow_args.source);
    elb->add_option("--w", elbow_args.w, "window length");
    elb->add_option("--k-min", elbow_args.k_min, "smallest k");
    elb->add_option("--k-max", elbow_args.k_max, "largest k");
    elb->add_option("--k-step", elbow_args.k_step, "k increment");
    elb->add_option("--space", elbow_args.space, "window | latent");
    elb->add_option("--checkpoint", elbow_args.checkpoint, "checkpoint for latent space");
    elb->add_option("--restarts", elbow_args.restarts, "k-means restarts");
    auto* elbow_seed = elb->add_option("--seed", elbow_args.seed, "k-means seed");
    elb->add_option("--train-fraction", elbow_args.train_fraction, "time-prefix split");
    elb->add_option("--out", elbow_args.out_dir, "output directory")->required();

    ExportArgs export_args;
    auto* exp = app.add_subcommand("export", "write windowed dataset and lambda matrix");
    add_source_options(exp, export_args.source);
    exp->add_option("--w", export_args.w, "window length");
    exp->add_option("--train-fraction", export_args.train_fraction, "time-prefix split");
    exp->add_option("--split", export_args.split, "train | test | all");
    exp->add_option("--out", export_args.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    // STDEC_SEED fallback when --seed was not given explicitly
    if (std::getenv("STDEC_SEED") != nullptr) {
        if (synth->parsed() && synth_seed->count() == 0) synth_args.seed = env_seed_fallback();
        if (train->parsed() && train_seed->count() == 0) train_args.seed = env_seed_fallback();
        if (elb->parsed() && elbow_seed->count() == 0) elbow_args.seed = env_seed_fallback();
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_args);
        if (ingest->parsed()) return cmd_ingest(ingest_args);
        if (train->parsed()) return cmd_train(train_args);
        if (eval->parsed()) return cmd_evaluate(eval_args);
        if (elb->parsed()) return cmd_elbow(elbow_args);
        if (exp->parsed()) return cmd_export(export_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace stdec::cli
