#pragma once

#include <cstdint>
#include <vector>

#include "geofuse/tensor.hpp"

namespace geofuse {

struct KmeansResult {
    Tensor2 centroids; // k x dim
    std::vector<int> assignments;
    double inertia = 0.0; // sum of squared distances to assigned centroids
    std::vector<double> inertia_history; // one entry per Lloyd iteration
    int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic per seed: ties in
// assignment and seeding go to the lowest index, empty clusters are reseeded
// to the point farthest from its assigned centroid. Stops when the largest
// centroid shift drops below tol or after max_iter iterations.
KmeansResult kmeans_fit(const Tensor2& points, int k, std::uint64_t seed, int max_iter = 100,
                        double tol = 1e-6);

} // namespace geofuse
