#include "geofuse/optim.hpp"

#include <cmath>

#include "geofuse/errors.hpp"

namespace geofuse {

double lr_at_epoch(double lr0, int epoch, double factor) {
    if (lr0 <= 0.0) {
        throw ConfigError("lr0 must be positive");
    }
    if (factor <= 0.0 || factor > 1.0) {
        throw ConfigError("decay factor must be in (0, 1]");
    }
    if (epoch < 0) {
        throw ConfigError("epoch must be non-negative");
    }
    return lr0 * std::pow(factor, static_cast<double>(epoch));
}

AdamState::AdamState(const ParamStore& params, std::vector<ParamId> subset, AdamConfig cfg)
    : cfg_(cfg), subset_(std::move(subset)) {
    m_.reserve(subset_.size());
    v_.reserve(subset_.size());
    for (ParamId id : subset_) {
        const Tensor2& p = params.value(id);
        m_.emplace_back(p.rows, p.cols);
        v_.emplace_back(p.rows, p.cols);
    }
}

void AdamState::step(ParamStore& params, const GradStore& grads, double lr) {
    if (lr < 0.0) {
        throw ConfigError("learning rate must be non-negative");
    }
    for (std::size_t k = 0; k < subset_.size(); ++k) {
        if (!grads.grad(subset_[k]).all_finite()) {
            throw NumericError("non-finite gradient for parameter " +
                               params.name(subset_[k]));
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < subset_.size(); ++k) {
        Tensor2& theta = params.value(subset_[k]);
        const Tensor2& g = grads.grad(subset_[k]);
        Tensor2& m = m_[k];
        Tensor2& v = v_[k];
        for (std::size_t i = 0; i < theta.data.size(); ++i) {
            const double gi = g.data[i];
            m.data[i] = cfg_.beta1 * m.data[i] + (1.0 - cfg_.beta1) * gi;
            v.data[i] = cfg_.beta2 * v.data[i] + (1.0 - cfg_.beta2) * gi * gi;
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            theta.data[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void adam_step(ParamStore& params, const GradStore& grads, AdamState& state, double lr) {
    state.step(params, grads, lr);
}

} // namespace geofuse
