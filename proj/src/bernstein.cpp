#include "bwf/bernstein.hpp"

#include <cmath>
#include <stdexcept>

#include "bwf/combinatorics.hpp"

namespace bwf {

int Polynomial::effective_degree(double tol) const {
    for (int k = degree(); k >= 0; --k)
        if (std::abs(coeffs[static_cast<std::size_t>(k)]) > tol) return k;
    return 0;
}

double Polynomial::eval(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double bernstein_eval(const BernsteinVector& bv, double x) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("bernstein_eval: x outside [0,1]");
    if (bv.v.empty()) throw std::invalid_argument("bernstein_eval: empty vector");
    if (x == 0.0) return bv.v.front();
    if (x == 1.0) return bv.v.back();
    const std::size_t m = bv.v.size() - 1;
    if (m <= 64) {
        std::vector<double> w = bv.v;
        for (std::size_t len = m; len > 0; --len)
            for (std::size_t i = 0; i < len; ++i) w[i] = (1.0 - x) * w[i] + x * w[i + 1];
        return w[0];
    }
    // log-space basis recurrence: log b_{i+1} - log b_i =
    // log((m-i)/(i+1)) + log(x/(1-x)); basis weights never exceed 1.
    const double step = std::log(x) - std::log1p(-x);
    double lb = static_cast<double>(m) * std::log1p(-x);
    double acc = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        if (lb > -745.0) acc += bv.v[i] * std::exp(lb);
        if (i < m)
            lb += std::log(static_cast<double>(m - i) / static_cast<double>(i + 1)) + step;
    }
    return acc;
}

namespace {

// The triangular basis changes amplify rounding by the size of the binomial
// weights; 80-bit accumulation keeps the round trip at degree 12 well inside
// 1e-12.
long double choose_ld(int n, int k) {
    if (k < 0 || k > n) return 0.0L;
    if (k > n - k) k = n - k;
    if (n <= 61) {
        unsigned long long c = 1;
        for (int j = 1; j <= k; ++j) c = c * static_cast<unsigned long long>(n - k + j) / j;
        return static_cast<long double>(c);
    }
    return std::exp(static_cast<long double>(log_choose(n, k)));
}

}  // namespace

BernsteinVector bcv_from_monomial(const Polynomial& p, int m) {
    const int d = p.degree();
    if (d < 0) throw std::invalid_argument("bcv_from_monomial: empty polynomial");
    if (m < d) throw std::invalid_argument("bcv_from_monomial: m < deg(p)");
    // Triangular change of basis: x^k = sum_{i>=k} [C(i,k)/C(m,k)] b_{i,m}(x).
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    for (int i = 0; i <= m; ++i) {
        long double acc = 0.0L;
        for (int k = 0; k <= std::min(i, d); ++k)
            acc += static_cast<long double>(p.coeffs[static_cast<std::size_t>(k)]) *
                   (choose_ld(i, k) / choose_ld(m, k));
        v[static_cast<std::size_t>(i)] = static_cast<double>(acc);
    }
    return BernsteinVector(std::move(v));
}

Polynomial monomial_from_bcv(const BernsteinVector& bv) {
    const int m = bv.degree();
    if (m < 0) throw std::invalid_argument("monomial_from_bcv: empty vector");
    // c_k = C(m,k) sum_{i=0}^k C(k,i) (-1)^{k-i} v_i
    std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
    for (int k = 0; k <= m; ++k) {
        long double acc = 0.0L;
        for (int i = 0; i <= k; ++i) {
            const long double term = choose_ld(k, i) * static_cast<long double>(bv.v[static_cast<std::size_t>(i)]);
            acc += ((k - i) % 2 == 0) ? term : -term;
        }
        c[static_cast<std::size_t>(k)] = static_cast<double>(choose_ld(m, k) * acc);
    }
    return Polynomial(std::move(c));
}

BernsteinVector degree_elevate(const BernsteinVector& bv, int target) {
    const int n = bv.degree();
    if (target < n) throw std::invalid_argument("degree_elevate: target below current degree");
    if (target == n) return bv;
    // b_{j,n}(x) = sum_i [C(n,j) C(target-n, i-j) / C(target,i)] b_{i,target}(x),
    // i.e. the elevated coefficients are a hypergeometric smoothing of v.
    std::vector<double> w(static_cast<std::size_t>(target) + 1, 0.0);
    for (int i = 0; i <= target; ++i) {
        double acc = 0.0;
        for (int j = std::max(0, i - (target - n)); j <= std::min(n, i); ++j)
            acc += hypergeom_pmf(target, n, i, j) * bv.v[static_cast<std::size_t>(j)];
        w[static_cast<std::size_t>(i)] = acc;
    }
    return BernsteinVector(std::move(w));
}

}  // namespace bwf
