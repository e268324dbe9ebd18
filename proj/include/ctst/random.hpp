#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

// All randomness in the library flows from a single run seed. Independent
// streams (anchor selection, CV folds, permutation i, node v, ...) are keyed
// with derive_seed(seed, stream) so replicates are reproducible and can be
// scheduled in any order. Samplers are hand-rolled on top of mt19937_64
// because the std <random> distributions are not bit-portable across
// standard-library implementations and the output files must be
// byte-identical for a given seed everywhere.

namespace ctst {

// splitmix64 finalizer; good avalanche, cheap, and stateless.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform double in [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = eng_(); } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do { u1 = uniform(); } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Fisher-Yates, back to front.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Random permutation of {0, ..., n-1}.
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

    // k distinct indices sampled uniformly from {0, ..., n-1} (partial
    // Fisher-Yates); order is the selection order.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        std::vector<int> out;
        out.reserve(k);
        for (int i = 0; i < k && i < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(uniform_int(n - i));
            std::swap(idx[i], idx[j]);
            out.push_back(idx[i]);
        }
        return out;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stream indices used to key derive_seed throughout the library. Keeping the
// map in one place avoids accidental stream collisions between modules.
namespace streams {
constexpr std::uint64_t kAnchors = 1;
constexpr std::uint64_t kCvFolds = 2;
constexpr std::uint64_t kScenarioGraph = 3;
constexpr std::uint64_t kScenarioData = 4;
constexpr std::uint64_t kEgoCenter = 5;
constexpr std::uint64_t kCvFoldsRev = 6;
constexpr std::uint64_t kPermBase = 1u << 20;       // + permutation index
constexpr std::uint64_t kRulsifNodeBase = 1u << 21; // + node id
constexpr std::uint64_t kBenchNullBase = 1u << 22;  // + instance index
constexpr std::uint64_t kBenchAltBase = 1u << 23;   // + instance index
} // namespace streams

} // namespace ctst
