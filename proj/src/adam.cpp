#include "stdec/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace stdec::nn {

AdamState::AdamState(std::size_t n, AdamConfig cfg)
    : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

void AdamState::step(std::span<double* const> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("AdamState::step: size mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
        const double g = grads[i];
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        *params[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
}

}  // namespace stdec::nn
