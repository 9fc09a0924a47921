#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace decorr {

// SplitMix64 finalizer. Used for state expansion and seed derivation.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Chains any number of 64-bit words into one well-mixed seed. This is the
// documented seed-splitting rule: child = hash64(parent_seed, stream_tag).
inline std::uint64_t hash64(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t acc = 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t p : parts)
        acc = splitmix64_mix(acc + 0x9e3779b97f4a7c15ULL + p);
    return acc;
}

inline std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
    return hash64({a, b});
}
inline std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return hash64({a, b, c});
}

// Independent named streams derived from one run seed.
enum class Stream : std::uint64_t {
    env = 1,      // environment resets
    init = 2,     // network weight initialization
    actions = 3,  // action sampling during collection
    update = 4,   // index subsampling and minibatch shuffles
    eval = 5,     // evaluation episodes
    skip = 6,     // Method 2 gap draws
};

// xoshiro256++: pinned generator so trajectories are bitwise reproducible
// across platforms. std:: engines/distributions are not portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) {
            sm += 0x9e3779b97f4a7c15ULL;
            word = splitmix64_mix(sm);
        }
        has_spare_ = false;
        spare_ = 0.0;
    }

    Rng derive(Stream tag) const {
        return Rng(hash64(seed_of_state(), static_cast<std::uint64_t>(tag)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1): top 53 bits scaled by 2^-53.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t min = (0 - bound) % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < min);
        return x % bound;
    }

    // Standard normal via Box-Muller; caches the second deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], log is safe
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // Collapse the current state into a derivation seed without advancing it.
    std::uint64_t seed_of_state() const {
        return hash64({s_[0], s_[1], s_[2], s_[3]});
    }

    std::uint64_t s_[4];
    bool has_spare_;
    double spare_;
};

}  // namespace decorr
