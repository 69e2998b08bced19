#include "geofuse/losses.hpp"

#include <algorithm>
#include <cmath>

#include "geofuse/errors.hpp"

namespace geofuse {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

Tensor2 softmax_vec(const Tensor2& logits) {
    if (logits.cols != 1 || logits.rows < 1) {
        throw ShapeError("softmax expects a non-empty column vector, got " + logits.shape_str());
    }
    const double m = *std::max_element(logits.data.begin(), logits.data.end());
    Tensor2 out(logits.rows, 1);
    double sum = 0.0;
    for (int i = 0; i < logits.rows; ++i) {
        out.data[static_cast<std::size_t>(i)] = std::exp(logits.data[static_cast<std::size_t>(i)] - m);
        sum += out.data[static_cast<std::size_t>(i)];
    }
    for (auto& x : out.data) {
        x /= sum;
    }
    return out;
}

LossGrad cross_entropy(const Tensor2& logits, int target) {
    if (logits.cols != 1 || logits.rows < 2) {
        throw ShapeError("cross_entropy expects a column vector with >= 2 classes, got " +
                         logits.shape_str());
    }
    if (target < 0 || target >= logits.rows) {
        throw ValidationError("cross_entropy target " + std::to_string(target) +
                              " out of range for " + std::to_string(logits.rows) + " classes");
    }
    const double m = *std::max_element(logits.data.begin(), logits.data.end());
    double sum = 0.0;
    for (double x : logits.data) {
        sum += std::exp(x - m);
    }
    const double log_z = m + std::log(sum);
    LossGrad out;
    out.loss = log_z - logits.data[static_cast<std::size_t>(target)];
    out.grad = Tensor2(logits.rows, 1);
    for (int i = 0; i < logits.rows; ++i) {
        out.grad.data[static_cast<std::size_t>(i)] =
            std::exp(logits.data[static_cast<std::size_t>(i)] - log_z);
    }
    out.grad.data[static_cast<std::size_t>(target)] -= 1.0;
    return out;
}

LossGrad mse(const Tensor2& pred, const Tensor2& target) {
    if (!pred.same_shape(target)) {
        throw ShapeError("mse shape mismatch: " + pred.shape_str() + " vs " + target.shape_str());
    }
    const double n = static_cast<double>(pred.size());
    LossGrad out;
    out.grad = Tensor2(pred.rows, pred.cols);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        out.loss += d * d;
        out.grad.data[i] = 2.0 * d / n;
    }
    out.loss /= n;
    return out;
}

LossGrad geoprior_loss(const Tensor2& loc_logits, int target) {
    if (loc_logits.cols != 1 || loc_logits.rows < 2) {
        throw ShapeError("geoprior_loss expects a column vector with >= 2 classes, got " +
                         loc_logits.shape_str());
    }
    const int classes = loc_logits.rows;
    if (target < 0 || target >= classes) {
        throw ValidationError("geoprior_loss target " + std::to_string(target) +
                              " out of range for " + std::to_string(classes) + " classes");
    }
    const double cw = static_cast<double>(classes);
    LossGrad out;
    out.grad = Tensor2(classes, 1);
    for (int i = 0; i < classes; ++i) {
        const double h = loc_logits.data[static_cast<std::size_t>(i)];
        if (i == target) {
            // -C log sigmoid(h) = C softplus(-h)
            out.loss += cw * softplus(-h);
            out.grad.data[static_cast<std::size_t>(i)] = -cw * (1.0 - sigmoid(h));
        } else {
            // -log(1 - sigmoid(h)) = softplus(h)
            out.loss += softplus(h);
            out.grad.data[static_cast<std::size_t>(i)] = sigmoid(h);
        }
    }
    return out;
}

} // namespace geofuse
