#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dimest {

/// (master, stream) fully determines a draw sequence; trial t uses stream t.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
    friend bool operator==(const Seed&, const Seed&) = default;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// mt19937_64 keyed by the seed pair. Uniform and normal transforms are
/// done here rather than with <random> distributions, whose output is
/// implementation-defined, so streams are identical across toolchains.
class Rng {
public:
    explicit Rng(Seed seed)
        : engine_(splitmix64(seed.master) ^ splitmix64(splitmix64(seed.stream) + 0x632be59bd9b4e019ull)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t limit = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= limit) return x % n;
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dimest
