#include "stdec/network.hpp"

#include <cmath>
#include <stdexcept>

namespace stdec::nn {

std::string activation_name(Activation a) {
    return a == Activation::relu ? "relu" : "linear";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "linear") return Activation::linear;
    throw std::invalid_argument("unknown activation: " + name);
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

void Network::validate() const {
    if (layers.empty()) throw std::invalid_argument("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.bias.size() != l.out_dim())
            throw std::invalid_argument("layer bias size does not match out_dim");
        if (l.dropout_rate < 0.0 || l.dropout_rate >= 1.0)
            throw std::invalid_argument("dropout_rate must lie in [0, 1)");
        if (i > 0 && layers[i - 1].out_dim() != l.in_dim())
            throw std::invalid_argument("consecutive layer dimensions do not chain");
    }
    if (latent_index + 1 >= layers.size())
        throw std::invalid_argument("latent_index must be an interior layer boundary");
}

Network make_autoencoder(std::size_t input_dim, std::size_t output_dim,
                         const std::vector<std::size_t>& hidden, std::size_t latent_pos,
                         double dropout_rate, std::uint64_t seed) {
    if (hidden.empty()) throw std::invalid_argument("hidden stack is empty");
    if (latent_pos >= hidden.size())
        throw std::invalid_argument("latent_pos out of range");

    Network net;
    net.rng_seed = seed;
    net.latent_index = latent_pos;
    std::mt19937_64 rng(seed);

    auto make_layer = [&](std::size_t in, std::size_t out, Activation act, double drop) {
        DenseLayer layer;
        layer.weights = Matrix(in, out);
        // Slight positive bias keeps narrow relu layers alive early on;
        // with zero bias the 8-unit stages die under dropout noise.
        layer.bias.assign(out, act == Activation::relu ? 0.05 : 0.0);
        layer.activation = act;
        layer.dropout_rate = drop;
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : layer.weights.values()) w = dist(rng);
        return layer;
    };

    std::size_t prev = input_dim;
    for (std::size_t h : hidden) {
        net.layers.push_back(make_layer(prev, h, Activation::relu, dropout_rate));
        prev = h;
    }
    // Window-mean-subtracted targets are signed, so the output stays linear.
    // The readout takes the last hidden activation undropped and starts at
    // zero: a random readout turns the first training phase into "shrink the
    // noise", which under dropout drives the narrow relu stages dead before
    // any structure is learned. From zero the only gradient is the signal.
    net.layers.push_back(make_layer(prev, output_dim, Activation::linear, 0.0));
    for (double& w : net.layers.back().weights.values()) w = 0.0;
    net.validate();
    return net;
}

ForwardResult forward(const Network& net, const Matrix& input, bool training,
                      std::mt19937_64* rng) {
    if (input.cols() != net.input_dim())
        throw std::invalid_argument("forward: input width does not match first layer");
    if (training && rng == nullptr)
        throw std::invalid_argument("forward: training mode needs an rng for dropout");

    ForwardResult res;
    auto& cache = res.cache;
    cache.inputs.reserve(net.layers.size());
    cache.activations.reserve(net.layers.size());
    cache.masks.resize(net.layers.size());

    const Matrix* current = &input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        Matrix dropped = *current;
        if (training && layer.dropout_rate > 0.0) {
            // Inverted dropout: keep-probability scaling happens here so
            // inference needs no rescale.
            const double keep = 1.0 - layer.dropout_rate;
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            Matrix mask(dropped.rows(), dropped.cols());
            for (std::size_t i = 0; i < mask.size(); ++i) {
                const double m = unif(*rng) < keep ? 1.0 / keep : 0.0;
                mask.data()[i] = m;
                dropped.data()[i] *= m;
            }
            cache.masks[l] = std::move(mask);
        }
        Matrix pre = matmul(dropped, layer.weights);
        add_row_vector(pre, layer.bias);
        if (layer.activation == Activation::relu) {
            for (double& v : pre.values()) v = v > 0.0 ? v : 0.0;
        }
        cache.inputs.push_back(std::move(dropped));
        cache.activations.push_back(std::move(pre));
        current = &cache.activations.back();
    }

    res.latent = cache.activations[net.latent_index];
    res.output = cache.activations.back();
    return res;
}

Matrix infer_latent(const Network& net, const Matrix& input) {
    return forward(net, input, false).latent;
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    for (const auto& l : net.layers) {
        g.weights.emplace_back(l.weights.rows(), l.weights.cols());
        g.bias.emplace_back(l.bias.size(), 0.0);
    }
    return g;
}

void Gradients::accumulate(const Gradients& other, double s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i)
            weights[l].data()[i] += s * other.weights[l].data()[i];
        for (std::size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += s * other.bias[l][i];
    }
}

void Gradients::scale(double factor) {
    for (auto& w : weights)
        for (double& v : w.values()) v *= factor;
    for (auto& b : bias)
        for (double& v : b) v *= factor;
}

Gradients backward(const Network& net, const ForwardCache& cache,
                   const Matrix& output_grad, const Matrix& latent_grad) {
    const std::size_t L = net.layers.size();
    if (cache.activations.size() != L)
        throw std::invalid_argument("backward: cache does not match network");
    if (!output_grad.same_shape(cache.activations.back()))
        throw std::invalid_argument("backward: output_grad shape mismatch");
    if (!latent_grad.same_shape(cache.activations[net.latent_index]))
        throw std::invalid_argument("backward: latent_grad shape mismatch");

    Gradients grads;
    grads.weights.resize(L);
    grads.bias.resize(L);

    Matrix act_grad = output_grad;
    for (std::size_t li = L; li-- > 0;) {
        const auto& layer = net.layers[li];
        if (li == net.latent_index && li == L - 1) {
            // cannot happen: latent_index is interior by validate()
        }
        if (li == net.latent_index) {
            for (std::size_t i = 0; i < act_grad.size(); ++i)
                act_grad.data()[i] += latent_grad.data()[i];
        }
        // through the activation
        Matrix pre_grad = std::move(act_grad);
        if (layer.activation == Activation::relu) {
            const Matrix& out = cache.activations[li];
            for (std::size_t i = 0; i < pre_grad.size(); ++i)
                if (out.data()[i] <= 0.0) pre_grad.data()[i] = 0.0;
        }
        grads.weights[li] = matmul_at(cache.inputs[li], pre_grad);
        grads.bias[li].assign(layer.out_dim(), 0.0);
        for (std::size_t r = 0; r < pre_grad.rows(); ++r)
            for (std::size_t c = 0; c < pre_grad.cols(); ++c)
                grads.bias[li][c] += pre_grad(r, c);
        if (li > 0) {
            act_grad = matmul_bt(pre_grad, layer.weights);
            if (!cache.masks[li].empty()) {
                for (std::size_t i = 0; i < act_grad.size(); ++i)
                    act_grad.data()[i] *= cache.masks[li].data()[i];
            }
        }
    }
    return grads;
}

std::vector<double*> parameter_view(Network& net) {
    std::vector<double*> view;
    view.reserve(net.parameter_count());
    for (auto& l : net.layers) {
        for (double& w : l.weights.values()) view.push_back(&w);
        for (double& b : l.bias) view.push_back(&b);
    }
    return view;
}

std::vector<double> flatten(const Gradients& g) {
    std::vector<double> flat;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        flat.insert(flat.end(), g.weights[l].values().begin(), g.weights[l].values().end());
        flat.insert(flat.end(), g.bias[l].begin(), g.bias[l].end());
    }
    return flat;
}

}  // namespace stdec::nn
