#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "geofuse/data.hpp"

namespace geofuse {

struct GroupStat {
    double value = 0.0;
    int count = 0;
};

// Per-domain, pooled-average, and worst-group scores. Classification scores
// are accuracies; regression scores are Pearson r. The average pools every
// record (count-weighted accuracy / overall r), worst is the min over groups.
struct GroupMetrics {
    std::map<int, GroupStat> per_group;
    double average = 0.0;
    double worst = 0.0;
};

// preds: predicted class index (as double) or regression estimate.
GroupMetrics group_metrics(std::span<const double> preds, std::span<const double> targets,
                           std::span<const int> domains, TaskKind task);

// Pearson correlation coefficient. Zero variance in y raises ValidationError;
// a constant prediction vector scores 0 (no correlation to report).
double pearson(std::span<const double> x, std::span<const double> y);

struct ParetoPoint {
    std::string label;
    double avg = 0.0;
    double worst = 0.0;
};

// Points not dominated by any other: q dominates p when q.avg >= p.avg and
// q.worst >= p.worst with at least one strict. Input order is preserved;
// duplicates survive (neither strictly dominates the other).
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points);

} // namespace geofuse
