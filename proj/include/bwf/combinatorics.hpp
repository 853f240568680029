#ifndef BWF_COMBINATORICS_HPP
#define BWF_COMBINATORICS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

// Log-gamma based combinatorics. Everything here must stay finite for
// degrees up to a few hundred (leaf counts reached in entrance-law runs),
// so binomials are never formed directly except through exp(log).

namespace bwf {

inline double log_factorial(int n) {
    if (n < 0) throw std::invalid_argument("log_factorial: negative n");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log_choose(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

inline double choose(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k == 0 || k == n) return 1.0;
    if (n <= 61) {
        // exact: the partial products C(n-k+j, j) are integers and C(61,30)
        // still fits in 64 bits
        if (k > n - k) k = n - k;
        unsigned long long c = 1;
        for (int j = 1; j <= k; ++j) c = c * static_cast<unsigned long long>(n - k + j) / j;
        return static_cast<double>(c);
    }
    return std::exp(log_choose(n, k));
}

// Ratio C(i,k)/C(m,k) as a product of small factors; exact enough for the
// triangular basis changes (i <= m <= a few hundred).
inline double choose_ratio(int i, int k, int m) {
    if (k < 0 || k > i) return 0.0;
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= static_cast<double>(i - j) / static_cast<double>(m - j);
    return r;
}

// P(K = i) for K ~ Hypergeometric(population, marked, draws).
// Returns exactly 0 outside the support; exact binomials below the 64-bit
// range, log-gamma space beyond.
inline double hypergeom_pmf(int population, int marked, int draws, int i) {
    if (marked < 0 || draws < 0 || marked > population || draws > population)
        throw std::invalid_argument("hypergeom_pmf: invalid parameters");
    if (i < 0 || i > marked || i > draws) return 0.0;
    if (draws - i > population - marked) return 0.0;
    if (population <= 61)
        return choose(marked, i) * choose(population - marked, draws - i) / choose(population, draws);
    double lp = log_choose(marked, i) + log_choose(population - marked, draws - i)
                - log_choose(population, draws);
    return std::exp(lp);
}

}  // namespace bwf

#endif
