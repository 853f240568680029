#ifndef BWF_RNG_HPP
#define BWF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace bwf {

// Reproducible per-replicate random stream. Identical (seed, stream) pairs
// yield identical draws; distinct stream ids are decorrelated through a
// splitmix64 scramble of the seed material before it reaches the engine.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s0 = splitmix(seed ^ 0x9e3779b97f4a7c15ULL);
        std::uint64_t s1 = splitmix(stream + 0xbf58476d1ce4e5b9ULL);
        std::seed_seq seq{static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
                          static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32)};
        gen_.seed(seq);
    }

    std::mt19937_64& engine() { return gen_; }

    // Uniform on [0,1).
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1], safe inside logs.
    double uniform_pos() { return ((gen_() >> 11) + 1.0) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    double normal() {
        // Box-Muller without the cached spare, so draws stay a pure function
        // of the engine position.
        const double u = uniform_pos();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(gen_);
    }

    int binomial(int n, double p) {
        if (n <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        std::binomial_distribution<int> d(n, p);
        return d(gen_);
    }

    // Number of failures before the k-th success, success probability p.
    int negative_binomial(int k, double p) {
        std::negative_binomial_distribution<int> d(k, p);
        return d(gen_);
    }

    // Hypergeometric draw: number of marked among `draws` taken without
    // replacement from a population with `marked` marked elements.
    int hypergeometric(int population, int marked, int draws) {
        if (draws > population) draws = population;
        int hits = 0;
        for (int j = 0; j < draws; ++j) {
            const int remaining = population - j;
            if (bernoulli(static_cast<double>(marked - hits) / remaining)) ++hits;
        }
        return hits;
    }

  private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace bwf

#endif
