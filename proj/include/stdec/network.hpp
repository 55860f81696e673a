#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stdec/matrix.hpp"

namespace stdec::nn {

enum class Activation { relu, linear };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
    Matrix weights;            // in_dim x out_dim
    std::vector<double> bias;  // out_dim
    Activation activation = Activation::relu;
    double dropout_rate = 0.0;  // applied to the layer input while training

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

/// Fixed dense feed-forward stack. The layer at latent_index produces the
/// latent code z; everything before it is the encoder, everything after the
/// decoder.
struct Network {
    std::vector<DenseLayer> layers;
    std::size_t latent_index = 0;
    std::uint64_t rng_seed = 0;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.back().out_dim(); }
    std::size_t latent_dim() const { return layers[latent_index].out_dim(); }
    std::size_t parameter_count() const;

    /// Throws std::invalid_argument if layer dims do not chain or
    /// latent_index is not an interior layer boundary.
    void validate() const;
};

/// Builds the dense autoencoder used throughout: hidden stack with ReLU and
/// shared dropout, plus a linear output layer back to output_dim. latent_pos
/// indexes into hidden. Weights get Glorot-uniform init from seed.
Network make_autoencoder(std::size_t input_dim, std::size_t output_dim,
                         const std::vector<std::size_t>& hidden, std::size_t latent_pos,
                         double dropout_rate, std::uint64_t seed);

struct ForwardCache {
    // Per layer: the (post-dropout) input actually multiplied, the activation
    // output, and the scaled dropout mask (empty when inactive).
    std::vector<Matrix> inputs;
    std::vector<Matrix> activations;
    std::vector<Matrix> masks;
};

struct ForwardResult {
    Matrix latent;
    Matrix output;
    ForwardCache cache;
};

/// Runs the stack on a batch (rows are samples). Dropout masks are drawn from
/// rng only when training is set; rng may be null otherwise.
ForwardResult forward(const Network& net, const Matrix& input, bool training,
                      std::mt19937_64* rng = nullptr);

/// Inference-only forward, no cache kept.
Matrix infer_latent(const Network& net, const Matrix& input);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> bias;

    static Gradients zeros_like(const Network& net);
    void accumulate(const Gradients& other, double scale);
    void scale(double factor);
};

/// Backpropagates output_grad (dL/d output) and latent_grad (dL/d z, injected
/// at the latent boundary and summed with the decoder backflow). Pass an
/// all-zero latent_grad when no loss is attached to the latent layer.
Gradients backward(const Network& net, const ForwardCache& cache,
                   const Matrix& output_grad, const Matrix& latent_grad);

/// Flat view over every weight and bias, layer by layer (weights row-major,
/// then bias). Gradients flatten in the same order.
std::vector<double*> parameter_view(Network& net);
std::vector<double> flatten(const Gradients& g);

}  // namespace stdec::nn
