#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace bandlab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based stream keyed by (seed, i, j). Each matrix entry owns an
/// independent stream, so the value of X_ij does not depend on the order in
/// which entries are generated.
class EntryStream {
public:
    using result_type = std::uint64_t;

    constexpr EntryStream(std::uint64_t seed, std::uint64_t i, std::uint64_t j)
        : key_(mix64(mix64(mix64(seed) ^ i) ^ (j * 0xD1B54A32D192ED03ull))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() { return mix64(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by Box-Muller; consumes two draws.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace bandlab
