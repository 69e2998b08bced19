#include <doctest.h>

#include <cmath>

#include "geofuse/errors.hpp"
#include "geofuse/rng.hpp"
#include "geofuse/tensor.hpp"

using namespace geofuse;

TEST_CASE("rng streams are deterministic and seed-sensitive") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(43);
    Rng d(42);
    int diff = 0;
    for (int i = 0; i < 16; ++i) {
        if (c.next_u64() != d.next_u64()) {
            ++diff;
        }
    }
    CHECK(diff > 0);
}

TEST_CASE("uniform01 stays in [0,1), below stays in range") {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 10000; ++i) {
        CHECK(rng.below(7) < 7);
    }
}

TEST_CASE("normal moments are roughly standard") {
    Rng rng(7);
    const int n = 50000;
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        mean += x;
        m2 += x * x;
    }
    mean /= n;
    m2 /= n;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(m2 - 1.0) < 0.05);
}

TEST_CASE("dirichlet lands on the simplex") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = rng.dirichlet(0.5, 6);
        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mix_seed separates purposes") {
    CHECK(mix_seed(5, "init") != mix_seed(5, "shuffle"));
    CHECK(mix_seed(5, "shuffle", 0) != mix_seed(5, "shuffle", 1));
    CHECK(mix_seed(5, "init") == mix_seed(5, "init"));
}

TEST_CASE("tensor shape checks") {
    CHECK_THROWS_AS(Tensor2(2, 2, {1.0, 2.0}), ShapeError);
    const Tensor2 a(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(a.at(1, 2) == 6.0);
    CHECK_THROWS_AS(matmul(a, a), ShapeError);
    CHECK_THROWS_AS(add(a, Tensor2(3, 2)), ShapeError);
}

TEST_CASE("matmul and transpose agree with hand arithmetic") {
    const Tensor2 a(2, 3, {1, 2, 3, 4, 5, 6});
    const Tensor2 x(3, 1, {1, 0, -1});
    const Tensor2 y = matmul(a, x);
    CHECK(y.rows == 2);
    CHECK(y.data[0] == doctest::Approx(-2.0));
    CHECK(y.data[1] == doctest::Approx(-2.0));
    const Tensor2 at = transpose(a);
    CHECK(at.rows == 3);
    CHECK(at.at(2, 1) == 6.0);
    const Tensor2 m = matmul(a, at); // 2x2
    CHECK(m.at(0, 0) == doctest::Approx(14.0));
    CHECK(m.at(0, 1) == doctest::Approx(32.0));
    CHECK(m.at(1, 1) == doctest::Approx(77.0));
}
