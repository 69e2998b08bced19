#include <doctest.h>

#include <cmath>

#include "geofuse/errors.hpp"
#include "geofuse/kmeans.hpp"
#include "geofuse/metrics.hpp"
#include "geofuse/rng.hpp"

using namespace geofuse;

TEST_CASE("group accuracy: counting example") {
    // Group A: 9/10 correct, group B: 1/2 correct.
    std::vector<double> preds;
    std::vector<double> targets;
    std::vector<int> domains;
    for (int i = 0; i < 10; ++i) {
        preds.push_back(i < 9 ? 1.0 : 0.0);
        targets.push_back(1.0);
        domains.push_back(0);
    }
    preds.push_back(1.0);
    targets.push_back(1.0);
    domains.push_back(1);
    preds.push_back(0.0);
    targets.push_back(1.0);
    domains.push_back(1);

    const GroupMetrics m = group_metrics(preds, targets, domains, TaskKind::Classification);
    CHECK(m.per_group.at(0).value == doctest::Approx(0.9));
    CHECK(m.per_group.at(1).value == doctest::Approx(0.5));
    CHECK(m.worst == doctest::Approx(0.5));
    CHECK(m.average == doctest::Approx(10.0 / 12.0));
    CHECK(m.per_group.at(0).count == 10);
    CHECK(m.per_group.at(1).count == 2);
}

TEST_CASE("classification worst is never above the average") {
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 20 + static_cast<int>(rng.below(50));
        std::vector<double> preds;
        std::vector<double> targets;
        std::vector<int> domains;
        for (int i = 0; i < n; ++i) {
            preds.push_back(static_cast<double>(rng.below(3)));
            targets.push_back(static_cast<double>(rng.below(3)));
            domains.push_back(static_cast<int>(rng.below(4)));
        }
        const GroupMetrics m = group_metrics(preds, targets, domains, TaskKind::Classification);
        CHECK(m.worst <= m.average + 1e-12);
    }
}

TEST_CASE("regression metrics: perfect and anti correlation") {
    std::vector<double> targets;
    std::vector<double> preds;
    std::vector<int> domains;
    Rng rng(2);
    for (int i = 0; i < 30; ++i) {
        const double t = rng.normal();
        targets.push_back(t);
        preds.push_back(t);
        domains.push_back(i % 3);
    }
    const GroupMetrics m = group_metrics(preds, targets, domains, TaskKind::Regression);
    for (const auto& [d, stat] : m.per_group) {
        CHECK(stat.value == doctest::Approx(1.0));
    }
    CHECK(m.worst == doctest::Approx(1.0));

    for (auto& p : preds) {
        p = -p;
    }
    const GroupMetrics anti = group_metrics(preds, targets, domains, TaskKind::Regression);
    for (const auto& [d, stat] : anti.per_group) {
        CHECK(stat.value == doctest::Approx(-1.0));
    }
}

TEST_CASE("regression with a zero-variance group names the group") {
    std::vector<double> preds{1.0, 2.0, 3.0, 4.0};
    std::vector<double> targets{1.0, 2.0, 5.0, 5.0}; // group 7 has constant targets
    std::vector<int> domains{3, 3, 7, 7};
    try {
        group_metrics(preds, targets, domains, TaskKind::Regression);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
}

TEST_CASE("pearson is invariant under positive affine transforms") {
    Rng rng(3);
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(rng.normal());
        y.push_back(rng.normal() + 0.5 * x.back());
    }
    const double base = pearson(x, y);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = std::exp(rng.uniform(-2.0, 2.0));
        const double b = rng.normal();
        std::vector<double> xt = x;
        for (auto& v : xt) {
            v = a * v + b;
        }
        CHECK(std::fabs(pearson(xt, y) - base) < 1e-12);
    }
}

TEST_CASE("pareto front: worked example and degenerate cases") {
    const std::vector<ParetoPoint> pts = {
        {"a", 1.0, 1.0}, {"b", 2.0, 0.5}, {"c", 0.5, 2.0}, {"d", 0.9, 0.9}};
    const auto front = pareto_front(pts);
    REQUIRE(front.size() == 3);
    CHECK(front[0].label == "a");
    CHECK(front[1].label == "b");
    CHECK(front[2].label == "c");

    const std::vector<ParetoPoint> one = {{"solo", 0.3, 0.4}};
    CHECK(pareto_front(one).size() == 1);

    const std::vector<ParetoPoint> dup = {{"x", 1.0, 1.0}, {"y", 1.0, 1.0}};
    CHECK(pareto_front(dup).size() == 2);
}

TEST_CASE("pareto front equals a brute-force dominance scan") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(200));
        std::vector<ParetoPoint> pts;
        for (int i = 0; i < n; ++i) {
            // Duplicates on purpose via coarse rounding.
            const double avg = std::round(rng.uniform(0.0, 10.0)) / 2.0;
            const double worst = std::round(rng.uniform(0.0, 10.0)) / 2.0;
            pts.push_back({"p" + std::to_string(i), avg, worst});
        }
        const auto front = pareto_front(pts);
        // Brute force: recompute dominance relation pairwise.
        std::vector<bool> keep(pts.size(), true);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j) {
                    continue;
                }
                if (pts[j].avg >= pts[i].avg && pts[j].worst >= pts[i].worst &&
                    (pts[j].avg > pts[i].avg || pts[j].worst > pts[i].worst)) {
                    keep[i] = false;
                    break;
                }
            }
        }
        std::vector<std::string> expect;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (keep[i]) {
                expect.push_back(pts[i].label);
            }
        }
        REQUIRE(front.size() == expect.size());
        for (std::size_t i = 0; i < front.size(); ++i) {
            CHECK(front[i].label == expect[i]);
        }
        // Every excluded point is dominated by some retained point.
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (keep[i]) {
                continue;
            }
            bool dominated = false;
            for (const ParetoPoint& f : front) {
                if (f.avg >= pts[i].avg && f.worst >= pts[i].worst &&
                    (f.avg > pts[i].avg || f.worst > pts[i].worst)) {
                    dominated = true;
                    break;
                }
            }
            CHECK(dominated);
        }
    }
}

TEST_CASE("kmeans recovers two separated pairs") {
    Tensor2 pts(4, 2, {0.0, 0.0, 0.2, 0.0, 10.0, 10.0, 10.2, 10.0});
    const KmeansResult res = kmeans_fit(pts, 2, 1);
    CHECK(res.assignments[0] == res.assignments[1]);
    CHECK(res.assignments[2] == res.assignments[3]);
    CHECK(res.assignments[0] != res.assignments[2]);
    // Centroids are the pair means.
    const int c0 = res.assignments[0];
    CHECK(res.centroids.at(c0, 0) == doctest::Approx(0.1));
    CHECK(res.centroids.at(c0, 1) == doctest::Approx(0.0));
    const int c1 = res.assignments[2];
    CHECK(res.centroids.at(c1, 0) == doctest::Approx(10.1));
    CHECK(res.centroids.at(c1, 1) == doctest::Approx(10.0));
}

TEST_CASE("kmeans inertia is non-increasing and the result is a fixed point") {
    Rng rng(5);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        Tensor2 pts(60, 4);
        for (auto& x : pts.data) {
            x = rng.normal();
        }
        const KmeansResult res = kmeans_fit(pts, 5, trial);
        for (std::size_t i = 1; i < res.inertia_history.size(); ++i) {
            CHECK(res.inertia_history[i] <= res.inertia_history[i - 1] + 1e-9);
        }
        // Reassignment changes nothing.
        for (int i = 0; i < pts.rows; ++i) {
            int best = 0;
            double best_d = 0.0;
            for (int c = 0; c < 5; ++c) {
                double d = 0.0;
                for (int j = 0; j < 4; ++j) {
                    const double diff = pts.at(i, j) - res.centroids.at(c, j);
                    d += diff * diff;
                }
                if (c == 0 || d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            CHECK(best == res.assignments[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("kmeans with k=1 lands on the global mean") {
    Rng rng(6);
    Tensor2 pts(40, 3);
    for (auto& x : pts.data) {
        x = rng.normal();
    }
    const KmeansResult res = kmeans_fit(pts, 1, 0);
    for (int j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (int i = 0; i < 40; ++i) {
            mean += pts.at(i, j);
        }
        mean /= 40.0;
        CHECK(res.centroids.at(0, j) == doctest::Approx(mean).epsilon(1e-12));
    }
    double inertia = 0.0;
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double d = pts.at(i, j) - res.centroids.at(0, j);
            inertia += d * d;
        }
    }
    CHECK(res.inertia == doctest::Approx(inertia).epsilon(1e-12));
}

TEST_CASE("kmeans is deterministic per seed and validates n >= k") {
    Rng rng(7);
    Tensor2 pts(30, 2);
    for (auto& x : pts.data) {
        x = rng.normal();
    }
    const KmeansResult a = kmeans_fit(pts, 4, 9);
    const KmeansResult b = kmeans_fit(pts, 4, 9);
    CHECK(a.assignments == b.assignments);
    CHECK(a.centroids.data == b.centroids.data);
    CHECK_THROWS_AS(kmeans_fit(Tensor2(3, 2), 4, 0), ValidationError);
}
