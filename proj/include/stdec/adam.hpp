#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stdec::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Bias-corrected Adam over an externally owned parameter set.  The state
// vector length is fixed at construction; step() must always be fed the same
// parameters in the same order.
class AdamState {
  public:
    AdamState() = default;
    AdamState(std::size_t n, AdamConfig cfg = {});

    void step(std::span<double* const> params, std::span<const double> grads);

    std::size_t size() const { return m_.size(); }
    std::size_t step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

  private:
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

}  // namespace stdec::nn
