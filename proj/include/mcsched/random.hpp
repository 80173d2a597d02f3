#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mcsched {

/// Seedable 64-bit generator with portable output.
///
/// Built on std::mt19937_64 seeded through std::seed_seq; both are fully
/// specified by the standard. The conversions to doubles and bounded integers
/// are done here rather than through std distributions, whose output is
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng({seed}) {}

    Rng(std::initializer_list<std::uint64_t> words) {
        std::seed_seq seq = make_seq(words);
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection; n must be positive.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t const limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next();
        while (x >= limit) {
            x = next();
        }
        return x % n;
    }

private:
    static std::seed_seq make_seq(std::initializer_list<std::uint64_t> words) {
        std::seed_seq::result_type parts[16] = {};
        std::size_t k = 0;
        for (std::uint64_t w : words) {
            if (k + 2 > 16) {
                break;
            }
            parts[k++] = static_cast<std::seed_seq::result_type>(w & 0xffffffffu);
            parts[k++] = static_cast<std::seed_seq::result_type>(w >> 32);
        }
        return std::seed_seq(parts, parts + k);
    }

    std::mt19937_64 engine_;
};

} // namespace mcsched
