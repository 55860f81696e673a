#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stdec/dataio.hpp"
#include "stdec/dec.hpp"
#include "stdec/network.hpp"
#include "stdec/tsdist.hpp"

namespace stdec::io {

// One JSON file holding the model, its centroids (latent centers, or medoid
// series for kmeans-dtw), and everything needed to rebuild the evaluation
// pipeline against matching data.
struct Checkpoint {
    std::string variant;  // kmeans | dec | sdec | kmeans-dtw
    std::size_t w = 12;
    std::size_t features = 1;
    std::size_t sensors = 0;
    std::size_t k = 0;
    std::size_t band = 6;
    tsdist::PointCost point_cost = tsdist::PointCost::squared_diff;
    std::uint64_t seed = 0;
    dec::LossWeights weights;
    double train_fraction = 0.6;
    std::uint64_t data_hash = 0;
    std::vector<std::string> sensor_ids;
    data::ScalingRecord scaling;
    std::optional<nn::Network> net;  // absent for kmeans-dtw
    Matrix centroids;
    std::vector<std::size_t> medoid_indices;  // kmeans-dtw only
};

std::uint64_t fnv1a64(const unsigned char* bytes, std::size_t len);
std::uint64_t hash_raster(const data::RasterSeries& series);

void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace stdec::io
