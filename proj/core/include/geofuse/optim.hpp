#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geofuse/autodiff.hpp"

namespace geofuse {

// lr0 * factor^epoch.
double lr_at_epoch(double lr0, int epoch, double factor);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction over a subset of a ParamStore. The update is
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;  t <- t+1
//   theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
class AdamState {
  public:
    AdamState(const ParamStore& params, std::vector<ParamId> subset, AdamConfig cfg = {});

    // Applies one update using grads; rejects non-finite gradients with a
    // NumericError naming the parameter.
    void step(ParamStore& params, const GradStore& grads, double lr);

    std::int64_t steps() const { return t_; }
    const std::vector<ParamId>& subset() const { return subset_; }

  private:
    AdamConfig cfg_;
    std::vector<ParamId> subset_;
    std::vector<Tensor2> m_;
    std::vector<Tensor2> v_;
    std::int64_t t_ = 0;
};

// Single-parameter-set convenience used by tests and small drivers: one Adam
// update over every parameter in the store.
void adam_step(ParamStore& params, const GradStore& grads, AdamState& state, double lr);

} // namespace geofuse
