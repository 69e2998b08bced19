#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace geofuse {

// Deterministic pseudo-random generator used everywhere a seed appears.
// xoshiro256++ core, state expanded from the seed with splitmix64. All
// distributions are implemented here (not via <random>) so that streams are
// identical across standard libraries and compilers.
//
// Draw contracts, relied on by tests that re-derive streams:
//   next_u64    one xoshiro256++ output
//   uniform01   (next_u64() >> 11) * 2^-53, in [0, 1)
//   normal      Box-Muller: sqrt(-2 ln u1) * cos(2 pi u2); consumes exactly
//               two uniforms per call, u1 forced into (0, 1]
//   below(n)    Lemire reduction of one next_u64() onto [0, n)
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform01();
    double uniform(double lo, double hi);
    double normal(); // mean 0, stddev 1
    std::uint64_t below(std::uint64_t n);

    // Gamma(shape, 1) via Marsaglia-Tsang; valid for any shape > 0.
    double gamma(double shape);
    // Symmetric Dirichlet(alpha) over k components.
    std::vector<double> dirichlet(double alpha, int k);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t s_[4];
};

// Stable derivation of purpose-specific sub-seeds from a run seed, so that
// independent streams (init, shuffle, data, ...) never alias.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t n = 0);

} // namespace geofuse
