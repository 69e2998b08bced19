#pragma once

#include <functional>

#include "geofuse/autodiff.hpp"

namespace geofuse {

// Central finite differences over every scalar entry of every parameter:
//   (L(theta + eps) - L(theta - eps)) / (2 eps)
// loss_fn must be a deterministic function of the store. Parameters are
// restored exactly after each probe. Serves as the independent gradient
// oracle for the analytic backward passes.
GradStore finite_diff_grad(const std::function<double(const ParamStore&)>& loss_fn,
                           ParamStore& params, double eps);

// Largest relative disagreement between two gradient stores, where the
// per-entry relative error uses max(|a|, |b|, floor) as the denominator.
double max_rel_err(const GradStore& a, const GradStore& b, double floor = 1e-6);
double max_rel_err(const Tensor2& a, const Tensor2& b, double floor = 1e-6);

} // namespace geofuse
