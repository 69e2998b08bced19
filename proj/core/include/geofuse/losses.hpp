#pragma once

#include "geofuse/tensor.hpp"

namespace geofuse {

struct LossGrad {
    double loss = 0.0;
    Tensor2 grad; // d loss / d first-argument
};

// Numerically stable softmax of a column vector of logits.
Tensor2 softmax_vec(const Tensor2& logits);

// loss = -log softmax(logits)[target]; grad = softmax(logits) - onehot(target).
// Requires at least 2 classes and 0 <= target < class count.
LossGrad cross_entropy(const Tensor2& logits, int target);

// Mean of squared elementwise differences; grad = 2 (pred - target) / N.
LossGrad mse(const Tensor2& pred, const Tensor2& target);

// Per-class sigmoid negative log loss with the positive term weighted by the
// class count C:
//   loss = -[ C log sigmoid(h_y) + sum_{i != y} log(1 - sigmoid(h_i)) ]
// grad_y = -C (1 - sigmoid(h_y)); grad_i = sigmoid(h_i) for i != y.
LossGrad geoprior_loss(const Tensor2& loc_logits, int target);

} // namespace geofuse
