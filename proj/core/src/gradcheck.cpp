#include "geofuse/gradcheck.hpp"

#include <cmath>

#include "geofuse/errors.hpp"

namespace geofuse {

GradStore finite_diff_grad(const std::function<double(const ParamStore&)>& loss_fn,
                           ParamStore& params, double eps) {
    if (eps <= 0.0) {
        throw ConfigError("finite_diff_grad eps must be positive");
    }
    GradStore out(params);
    for (ParamId id = 0; id < params.size(); ++id) {
        Tensor2& p = params.value(id);
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double saved = p.data[i];
            p.data[i] = saved + eps;
            const double lp = loss_fn(params);
            p.data[i] = saved - eps;
            const double lm = loss_fn(params);
            p.data[i] = saved;
            if (!std::isfinite(lp) || !std::isfinite(lm)) {
                throw NumericError("non-finite loss while probing parameter " + params.name(id));
            }
            out.grad(id).data[i] = (lp - lm) / (2.0 * eps);
        }
    }
    return out;
}

double max_rel_err(const Tensor2& a, const Tensor2& b, double floor) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double x = a.data[i];
        const double y = b.data[i];
        const double denom = std::max({std::fabs(x), std::fabs(y), floor});
        const double rel = std::fabs(x - y) / denom;
        if (rel > worst) {
            worst = rel;
        }
    }
    return worst;
}

double max_rel_err(const GradStore& a, const GradStore& b, double floor) {
    double worst = 0.0;
    for (int id = 0; id < a.size(); ++id) {
        worst = std::max(worst, max_rel_err(a.grad(id), b.grad(id), floor));
    }
    return worst;
}

} // namespace geofuse
