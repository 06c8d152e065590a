#pragma once

#include <cstdint>

namespace kolmocouple {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a stream key from a seed and a stream index.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream * 0xd1342543de82ef95ULL + 1));
}

/// Inverse of the standard normal CDF (Wichura AS241, double precision).
double normal_quantile(double p);

/// Counter-based random stream: output n is a hash of (key, n), so any
/// draw is randomly accessible and streams derived from distinct indices
/// are independent regardless of scheduling.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream)
        : key_(derive_key(seed, stream)) {}

    std::uint64_t next_u64() {
        return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on the open interval (0, 1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    /// Standard normal by inverse-CDF: exactly one u64 draw per variate.
    double next_normal() { return normal_quantile(next_uniform()); }

    std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace kolmocouple
