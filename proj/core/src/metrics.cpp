#include "geofuse/metrics.hpp"

#include <cmath>

#include "geofuse/errors.hpp"

namespace geofuse {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("pearson needs two equal-length series with >= 2 points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (syy == 0.0) {
        throw ValidationError("pearson undefined: zero variance in targets");
    }
    if (sxx == 0.0) {
        return 0.0; // constant predictions carry no correlation
    }
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

GroupMetrics group_metrics(std::span<const double> preds, std::span<const double> targets,
                           std::span<const int> domains, TaskKind task) {
    if (preds.size() != targets.size() || preds.size() != domains.size() || preds.empty()) {
        throw ValidationError("group_metrics needs equal-length non-empty inputs");
    }
    GroupMetrics out;
    if (task == TaskKind::Classification) {
        std::map<int, std::pair<int, int>> counts; // domain -> (correct, total)
        int correct = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            auto& [c, t] = counts[domains[i]];
            ++t;
            if (static_cast<long>(preds[i]) == static_cast<long>(targets[i])) {
                ++c;
                ++correct;
            }
        }
        out.average = static_cast<double>(correct) / static_cast<double>(preds.size());
        bool first = true;
        for (const auto& [d, ct] : counts) {
            GroupStat stat;
            stat.count = ct.second;
            stat.value = static_cast<double>(ct.first) / static_cast<double>(ct.second);
            out.per_group.emplace(d, stat);
            if (first || stat.value < out.worst) {
                out.worst = stat.value;
                first = false;
            }
        }
        return out;
    }
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        auto& [p, t] = groups[domains[i]];
        p.push_back(preds[i]);
        t.push_back(targets[i]);
    }
    std::vector<double> all_p(preds.begin(), preds.end());
    std::vector<double> all_t(targets.begin(), targets.end());
    out.average = pearson(all_p, all_t);
    bool first = true;
    for (const auto& [d, pt] : groups) {
        if (pt.first.size() < 2) {
            throw ValidationError("pearson undefined for group " + std::to_string(d) +
                                  ": fewer than 2 records");
        }
        GroupStat stat;
        stat.count = static_cast<int>(pt.first.size());
        try {
            stat.value = pearson(pt.first, pt.second);
        } catch (const ValidationError&) {
            throw ValidationError("pearson undefined for group " + std::to_string(d) +
                                  ": zero target variance");
        }
        out.per_group.emplace(d, stat);
        if (first || stat.value < out.worst) {
            out.worst = stat.value;
            first = false;
        }
    }
    return out;
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
    if (points.empty()) {
        throw ValidationError("pareto_front needs at least one point");
    }
    std::vector<ParetoPoint> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (j == i) {
                continue;
            }
            const bool ge = points[j].avg >= points[i].avg && points[j].worst >= points[i].worst;
            const bool strict = points[j].avg > points[i].avg || points[j].worst > points[i].worst;
            dominated = ge && strict;
        }
        if (!dominated) {
            out.push_back(points[i]);
        }
    }
    return out;
}

} // namespace geofuse
