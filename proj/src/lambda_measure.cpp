#include "bwf/lambda_measure.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bwf/combinatorics.hpp"

namespace bwf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LambdaMeasure::LambdaMeasure(double kingman_weight, std::vector<std::pair<double, double>> atom_list)
    : kingman(kingman_weight), atoms(std::move(atom_list)) {
    if (kingman < 0.0) throw std::invalid_argument("LambdaMeasure: negative Kingman weight");
    double prev = 0.0;
    for (const auto& [r, w] : atoms) {
        if (r <= 0.0 || r > 1.0) throw std::invalid_argument("LambdaMeasure: atom location outside (0,1]");
        if (w <= 0.0) throw std::invalid_argument("LambdaMeasure: nonpositive atom weight");
        if (r <= prev) throw std::invalid_argument("LambdaMeasure: atom locations must be strictly increasing");
        prev = r;
    }
    if (total_mass() <= 0.0) throw std::invalid_argument("LambdaMeasure: total mass must be positive");
}

double LambdaMeasure::total_mass() const {
    double m = kingman;
    for (const auto& [r, w] : atoms) m += w;
    return m;
}

double LambdaMeasure::mass_at_one() const {
    for (const auto& [r, w] : atoms)
        if (r == 1.0) return w;
    return 0.0;
}

std::string LambdaMeasure::describe() const {
    std::ostringstream os;
    os << "kingman=" << kingman;
    for (const auto& [r, w] : atoms) os << " +" << w << "*delta_" << r;
    return os.str();
}

double lambda_rate(const LambdaMeasure& L, int n, int k) {
    if (k < 2 || k > n) throw std::invalid_argument("lambda_rate: need 2 <= k <= n");
    double rate = (k == 2) ? L.kingman : 0.0;
    return rate + lambda_rate0(L, n, k);
}

double lambda_rate0(const LambdaMeasure& L, int n, int k) {
    if (k < 2 || k > n) throw std::invalid_argument("lambda_rate0: need 2 <= k <= n");
    double rate = 0.0;
    for (const auto& [r, w] : L.atoms) {
        // 0^0 = 1 at the boundary atoms (r=1 with k=n contributes w).
        double term = w;
        if (k > 2) term *= std::pow(r, k - 2);
        if (n > k) term *= std::pow(1.0 - r, n - k);
        rate += term;
    }
    return rate;
}

double total_coalescence_rate(const LambdaMeasure& L, int n) {
    if (n < 2) throw std::invalid_argument("total_coalescence_rate: need n >= 2");
    double rate = L.kingman * choose(n, 2);
    for (const auto& [r, w] : L.atoms) {
        // sum_k C(n,k) r^{k-2}(1-r)^{n-k} = [1 - (1-r)^n - n r (1-r)^{n-1}] / r^2
        const double q = 1.0 - r;
        rate += w * (1.0 - std::pow(q, n) - n * r * std::pow(q, n - 1)) / (r * r);
    }
    return rate;
}

double coalescence_impact(const LambdaMeasure& L) {
    if (L.kingman > 0.0) return kInf;
    double c = 0.0;
    for (const auto& [r, w] : L.atoms) {
        if (r == 1.0) return kInf;
        c += -w * std::log(1.0 - r) / (r * r);
    }
    return c;
}

double delta_n(const LambdaMeasure& L, int n) {
    if (n < 2) throw std::invalid_argument("delta_n: need n >= 2");
    // Kingman atom: limit of the integrand as r -> 0 is n(n-1)/2 per unit mass.
    double d = L.kingman * 0.5 * n * (n - 1.0);
    for (const auto& [r, w] : L.atoms) {
        const double inner = (n * r - 1.0 + std::pow(1.0 - r, n)) / n;
        d += -w * static_cast<double>(n) * std::log1p(-inner) / (r * r);
    }
    return d;
}

const char* to_string(CdiVerdict v) {
    switch (v) {
        case CdiVerdict::likely_cdi: return "likely_cdi";
        case CdiVerdict::likely_not: return "likely_not";
        default: return "inconclusive";
    }
}

CdiDiagnostic cdi_diagnostic(const LambdaMeasure& L, int K) {
    if (K < 2) throw std::invalid_argument("cdi_diagnostic: need K >= 2");
    CdiDiagnostic out;
    out.K = K;

    auto increment = [&](int k) { return (k / delta_n(L, k)) * std::log(k / (k - 1.0)); };

    double f = 0.0;
    for (int k = 2; k <= K; ++k) f += increment(k);
    out.partial_sum = f;

    // Fit log(increment) ~ -p log(k) over the last decade of K. Needs a few
    // points of asymptotics; a single term gives no exponent.
    const int k_lo = std::max(2, K / 10);
    if (K - k_lo < 2) {
        out.verdict = CdiVerdict::inconclusive;
        return out;
    }
    // Subsample at most 64 points, log-spaced.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    const int samples = 64;
    for (int j = 0; j <= samples; ++j) {
        const int k = static_cast<int>(std::lround(k_lo * std::pow(static_cast<double>(K) / k_lo,
                                                                   static_cast<double>(j) / samples)));
        if (k < k_lo || k > K) continue;
        const double lx = std::log(static_cast<double>(k));
        const double ly = std::log(increment(k));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++npts;
    }
    const double denom = npts * sxx - sx * sx;
    if (npts < 3 || std::abs(denom) < 1e-12) {
        out.verdict = CdiVerdict::inconclusive;
        return out;
    }
    const double slope = (npts * sxy - sx * sy) / denom;
    out.fitted_exponent = -slope;

    if (out.fitted_exponent > 1.1)
        out.verdict = CdiVerdict::likely_cdi;
    else if (out.fitted_exponent < 1.05)
        out.verdict = CdiVerdict::likely_not;
    else
        out.verdict = CdiVerdict::inconclusive;
    return out;
}

}  // namespace bwf
