#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace augforge::imaging {

/// Counter-based random stream keyed by (study_seed, trial_id, sample_id,
/// aug_index). Identical keys replay identical sequences; any change to a key
/// component yields a statistically independent stream. No global state, no
/// wall clock, no thread identity.
class RngStream {
public:
    RngStream(std::uint64_t study_seed, std::uint64_t trial_id,
              std::uint64_t sample_id, std::uint64_t aug_index)
        : state_(derive_key(study_seed, trial_id, sample_id, aug_index)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    /// Uniform draw in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform integer in [lo, hi], both inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double gaussian() {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(
                uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(values[i - 1], values[j]);
        }
    }

    /// SplitMix64 finalizer.
    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

private:
    static std::uint64_t derive_key(std::uint64_t s0, std::uint64_t s1,
                                    std::uint64_t s2, std::uint64_t s3) {
        // Distinct per-slot constants so permuted tuples land on distinct keys.
        std::uint64_t h = mix64(s0 ^ 0x243f6a8885a308d3ull);
        h = mix64(h ^ mix64(s1 ^ 0x13198a2e03707344ull));
        h = mix64(h ^ mix64(s2 ^ 0xa4093822299f31d0ull));
        h = mix64(h ^ mix64(s3 ^ 0x082efa98ec4e6c89ull));
        return h;
    }

    std::uint64_t state_;
};

inline RngStream derive_stream(std::uint64_t study_seed, std::uint64_t trial_id,
                               std::uint64_t sample_id,
                               std::uint64_t aug_index) {
    return RngStream(study_seed, trial_id, sample_id, aug_index);
}

/// FNV-1a hash used to fold string sample ids into the 64-bit key slot.
inline std::uint64_t hash_id(std::string_view id) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : id) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace augforge::imaging
