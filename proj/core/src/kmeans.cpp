#include "geofuse/kmeans.hpp"

#include <cmath>
#include <limits>

#include "geofuse/errors.hpp"
#include "geofuse/rng.hpp"

namespace geofuse {

namespace {

double dist2(const Tensor2& points, int i, const Tensor2& centroids, int c) {
    const double* p = points.data.data() + static_cast<std::size_t>(i) * points.cols;
    const double* q = centroids.data.data() + static_cast<std::size_t>(c) * centroids.cols;
    double acc = 0.0;
    for (int j = 0; j < points.cols; ++j) {
        const double d = p[j] - q[j];
        acc += d * d;
    }
    return acc;
}

void copy_row(const Tensor2& src, int row, Tensor2& dst, int dst_row) {
    for (int j = 0; j < src.cols; ++j) {
        dst.at(dst_row, j) = src.at(row, j);
    }
}

} // namespace

KmeansResult kmeans_fit(const Tensor2& points, int k, std::uint64_t seed, int max_iter,
                        double tol) {
    const int n = points.rows;
    if (k < 1) {
        throw ValidationError("k must be >= 1");
    }
    if (n < k) {
        throw ValidationError("k-means needs at least k points, got " + std::to_string(n) +
                              " for k=" + std::to_string(k));
    }
    Rng rng(mix_seed(seed, "kmeans"));
    KmeansResult res;
    res.centroids = Tensor2(k, points.cols);
    res.assignments.assign(static_cast<std::size_t>(n), 0);

    // k-means++ seeding.
    std::vector<double> d2(static_cast<std::size_t>(n), 0.0);
    copy_row(points, static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), res.centroids, 0);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = dist2(points, i, res.centroids, 0);
            for (int cc = 1; cc < c; ++cc) {
                best = std::min(best, dist2(points, i, res.centroids, cc));
            }
            d2[static_cast<std::size_t>(i)] = best;
            total += best;
        }
        int chosen = -1;
        if (total > 0.0) {
            const double u = rng.uniform01() * total;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (u < acc) {
                    chosen = i;
                    break;
                }
            }
        }
        if (chosen < 0) {
            chosen = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        }
        copy_row(points, chosen, res.centroids, c);
    }

    const auto assign_all = [&]() {
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = dist2(points, i, res.centroids, 0);
            for (int c = 1; c < k; ++c) {
                const double d = dist2(points, i, res.centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            res.assignments[static_cast<std::size_t>(i)] = best;
            inertia += best_d;
        }
        return inertia;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        res.inertia_history.push_back(assign_all());
        res.iterations = iter + 1;

        Tensor2 next(k, points.cols);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < n; ++i) {
            const int c = res.assignments[static_cast<std::size_t>(i)];
            ++counts[static_cast<std::size_t>(c)];
            const double* p = points.data.data() + static_cast<std::size_t>(i) * points.cols;
            double* q = next.data.data() + static_cast<std::size_t>(c) * next.cols;
            for (int j = 0; j < points.cols; ++j) {
                q[j] += p[j];
            }
        }
        // Distances to the current centroids, reused for empty-cluster rescue.
        std::vector<double> cur_d(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            cur_d[static_cast<std::size_t>(i)] =
                dist2(points, i, res.centroids, res.assignments[static_cast<std::size_t>(i)]);
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                double* q = next.data.data() + static_cast<std::size_t>(c) * next.cols;
                for (int j = 0; j < points.cols; ++j) {
                    q[j] /= counts[static_cast<std::size_t>(c)];
                }
            } else {
                // Reseed to the farthest point from its assigned centroid.
                int far = 0;
                for (int i = 1; i < n; ++i) {
                    if (cur_d[static_cast<std::size_t>(i)] > cur_d[static_cast<std::size_t>(far)]) {
                        far = i;
                    }
                }
                cur_d[static_cast<std::size_t>(far)] = -1.0; // not reusable
                copy_row(points, far, next, c);
            }
        }
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            shift = std::max(shift, std::sqrt(dist2(res.centroids, c, next, c)));
        }
        res.centroids = std::move(next);
        if (shift < tol) {
            break;
        }
    }
    // Final assignment: leaves the result at a fixed point of reassignment.
    res.inertia = assign_all();
    res.inertia_history.push_back(res.inertia);
    return res;
}

} // namespace geofuse
