#include "stdec/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace stdec::io {

using nlohmann::json;

std::uint64_t fnv1a64(const unsigned char* bytes, std::size_t len) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_raster(const data::RasterSeries& series) {
    std::uint64_t h = fnv1a64(reinterpret_cast<const unsigned char*>(series.values.data()),
                              series.values.size() * sizeof(double));
    const std::uint64_t shape[3] = {series.sensors, series.timestamps, series.features};
    h ^= fnv1a64(reinterpret_cast<const unsigned char*>(shape), sizeof shape);
    return h;
}

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.size()) throw std::runtime_error("checkpoint matrix size mismatch");
    m.values() = data;
    return m;
}

json network_to_json(const nn::Network& net) {
    json layers = json::array();
    for (const auto& l : net.layers)
        layers.push_back(json{{"weights", matrix_to_json(l.weights)},
                              {"bias", l.bias},
                              {"activation", nn::activation_name(l.activation)},
                              {"dropout", l.dropout_rate}});
    return json{{"layers", layers},
                {"latent_index", net.latent_index},
                {"rng_seed", net.rng_seed}};
}

nn::Network network_from_json(const json& j) {
    nn::Network net;
    for (const auto& lj : j.at("layers")) {
        nn::DenseLayer layer;
        layer.weights = matrix_from_json(lj.at("weights"));
        layer.bias = lj.at("bias").get<std::vector<double>>();
        layer.activation = nn::activation_from_name(lj.at("activation").get<std::string>());
        layer.dropout_rate = lj.at("dropout").get<double>();
        net.layers.push_back(std::move(layer));
    }
    net.latent_index = j.at("latent_index").get<std::size_t>();
    net.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    net.validate();
    return net;
}

}  // namespace

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
    json j;
    j["format"] = "stdec-checkpoint";
    j["version"] = 1;
    j["variant"] = cp.variant;
    j["w"] = cp.w;
    j["features"] = cp.features;
    j["sensors"] = cp.sensors;
    j["k"] = cp.k;
    j["band"] = cp.band;
    j["point_cost"] = cp.point_cost == tsdist::PointCost::squared_diff ? "squared_diff"
                                                                       : "abs_diff";
    j["seed"] = cp.seed;
    j["alpha0"] = cp.weights.alpha0;
    j["alpha1"] = cp.weights.alpha1;
    j["alpha2"] = cp.weights.alpha2;
    j["train_fraction"] = cp.train_fraction;
    j["data_hash"] = cp.data_hash;
    j["sensor_ids"] = cp.sensor_ids;
    j["scaling_min"] = cp.scaling.min;
    j["scaling_max"] = cp.scaling.max;
    if (cp.net) j["network"] = network_to_json(*cp.net);
    j["centroids"] = matrix_to_json(cp.centroids);
    if (!cp.medoid_indices.empty()) j["medoid_indices"] = cp.medoid_indices;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    if (j.value("format", "") != "stdec-checkpoint")
        throw std::runtime_error(path + " is not a checkpoint file");

    Checkpoint cp;
    cp.variant = j.at("variant").get<std::string>();
    cp.w = j.at("w").get<std::size_t>();
    cp.features = j.at("features").get<std::size_t>();
    cp.sensors = j.at("sensors").get<std::size_t>();
    cp.k = j.at("k").get<std::size_t>();
    cp.band = j.at("band").get<std::size_t>();
    cp.point_cost = j.at("point_cost").get<std::string>() == "abs_diff"
                        ? tsdist::PointCost::abs_diff
                        : tsdist::PointCost::squared_diff;
    cp.seed = j.at("seed").get<std::uint64_t>();
    cp.weights.alpha0 = j.at("alpha0").get<double>();
    cp.weights.alpha1 = j.at("alpha1").get<double>();
    cp.weights.alpha2 = j.at("alpha2").get<double>();
    cp.train_fraction = j.at("train_fraction").get<double>();
    cp.data_hash = j.at("data_hash").get<std::uint64_t>();
    cp.sensor_ids = j.at("sensor_ids").get<std::vector<std::string>>();
    cp.scaling.min = j.at("scaling_min").get<std::vector<double>>();
    cp.scaling.max = j.at("scaling_max").get<std::vector<double>>();
    if (j.contains("network")) cp.net = network_from_json(j.at("network"));
    cp.centroids = matrix_from_json(j.at("centroids"));
    if (j.contains("medoid_indices"))
        cp.medoid_indices = j.at("medoid_indices").get<std::vector<std::size_t>>();
    return cp;
}

}  // namespace stdec::io
