#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stdec/matrix.hpp"

namespace stdec::spatial {

// s x s geographic closeness weights in [-1, 1]: symmetric, zero diagonal,
// strictly decreasing in |i-k| along each row.
struct SpatialWeights {
    std::size_t s = 0;
    Matrix lambda;

    double at(std::size_t i, std::size_t k) const { return lambda(i, k); }
    void validate() const;
};

std::vector<double> one_hot(std::size_t i, std::size_t s);

// lambda_ik = 1 - 2|i-k|/(s+1) on 1-based labels, 0 on the diagonal.
SpatialWeights line_lambda(std::size_t s);

SpatialWeights load_lambda_csv(const std::string& path);
void write_lambda_csv(const SpatialWeights& w, const std::string& path);

// Pair-expanded training view of one timestamp block: row i*s + k carries
// input [x_i, g_i], target z_bar_k, weight lambda_ik.
struct PairBatch {
    std::size_t s = 0;
    std::size_t t = 0;  // timestamp label of the block
    Matrix inputs;      // s^2 x (dim + s)
    Matrix targets;     // s^2 x latent_dim
    std::vector<double> weights;

    std::size_t rows() const { return inputs.rows(); }
    std::pair<std::size_t, std::size_t> pair_of(std::size_t row) const {
        return {row / s, row % s};
    }
};

// points: s x dim block for one timestamp, location-ordered.
// snapshot: s x latent_dim detached latents for the same timestamp.
PairBatch expand_pairs(const Matrix& points, std::size_t t, const Matrix& snapshot,
                       const SpatialWeights& weights);

}  // namespace stdec::spatial
