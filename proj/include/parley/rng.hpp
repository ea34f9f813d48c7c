#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace parley {

// mt19937_64 plus hand-rolled draws. The standard distributions are not
// pinned across library implementations; these are, so seeded runs give
// byte-identical output everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // [0, 1)
    double real01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // [0, n), unbiased
    std::size_t below(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = bits();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * real01() - 1.0;
            v = 2.0 * real01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Index drawn with probability weight[i] / sum(weight). Negative or all-zero
    // weights fall back to the last index.
    std::size_t weighted(const std::vector<double>& weight) {
        double total = 0.0;
        for (double w : weight) total += w > 0.0 ? w : 0.0;
        double x = real01() * total;
        for (std::size_t i = 0; i + 1 < weight.size(); ++i) {
            const double w = weight[i] > 0.0 ? weight[i] : 0.0;
            if (x < w) return i;
            x -= w;
        }
        return weight.empty() ? 0 : weight.size() - 1;
    }

    // Derives an independent stream seed (splitmix finalizer).
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace parley
