#include "bwf/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bwf/combinatorics.hpp"

namespace bwf {

double drift_eval(const SelectionMechanism& sd, double x) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("drift_eval: x outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;  // p_{0,l}=0 and p_{l,l}=1 kill the boundary terms
    double drift = 0.0;
    double w[13];  // m <= 12; this sits in the Euler-step hot loop
    for (int ell = 2; ell <= sd.m(); ++ell) {
        const double b = sd.beta_at(ell);
        if (b == 0.0) continue;
        const auto& p = sd.rule.row(ell);
        // de Casteljau on the coefficient vector (p_{i,l} - i/l)
        for (int i = 0; i <= ell; ++i) w[i] = p[static_cast<std::size_t>(i)] - static_cast<double>(i) / ell;
        for (int len = ell; len > 0; --len)
            for (int i = 0; i < len; ++i) w[i] = (1.0 - x) * w[i] + x * w[i + 1];
        drift += b * w[0];
    }
    return drift;
}

double MoranMeasure::total_mass() const {
    double m = weight0;
    for (std::size_t r = 1; r < weights.size(); ++r)
        m += weights[r] * static_cast<double>(r) * static_cast<double>(r);
    return m;
}

MoranMeasure moran_mu_from_lambda(int N, const LambdaMeasure& L) {
    if (N < 2) throw std::invalid_argument("moran_mu_from_lambda: N >= 2");
    MoranMeasure mu;
    mu.weight0 = L.kingman;
    mu.weights.assign(static_cast<std::size_t>(N), 0.0);
    for (int k = 1; k <= N - 1; ++k) {
        // (1/N^2) C(N,k+1) lambda0_{N,k+1}; computed in log space per atom
        double w = 0.0;
        for (const auto& [r, wa] : L.atoms) {
            double lg = log_choose(N, k + 1) - 2.0 * std::log(static_cast<double>(N));
            if (k + 1 > 2) lg += (k - 1) * std::log(r);
            if (N > k + 1) lg += (N - k - 1) * std::log1p(-r);
            if (r == 1.0 && N > k + 1) continue;  // (1-r)^{N-k-1} = 0
            w += wa * std::exp(lg);
        }
        mu.weights[static_cast<std::size_t>(k)] = w;
    }
    return mu;
}

void MoranModel::validate() const {
    if (N < 2) throw std::invalid_argument("MoranModel: N >= 2");
    rule.validate();
    if (rule.m > N) throw std::invalid_argument("MoranModel: m <= N required");
    if (beta_N.size() != static_cast<std::size_t>(rule.m) + 1)
        throw std::invalid_argument("MoranModel: beta_N size");
    for (double b : beta_N)
        if (b < 0.0) throw std::invalid_argument("MoranModel: negative rate");
    if (mu.weights.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("MoranModel: mu support must be {0..N-1}");
    if (mu.weight0 < 0.0) throw std::invalid_argument("MoranModel: negative weight");
    for (double w : mu.weights)
        if (w < 0.0) throw std::invalid_argument("MoranModel: negative weight");
}

int moran_simulate(const MoranModel& model, int k0, double horizon_model_time, RngStream& rng,
                   std::vector<MoranStep>* trajectory) {
    model.validate();
    const int N = model.N;
    if (k0 < 0 || k0 > N) throw std::invalid_argument("moran_simulate: k0 outside [0,N]");

    // Per-individual rates; each event picks its focal individual uniformly.
    double sel_rate = 0.0;
    for (int ell = 2; ell <= model.rule.m; ++ell) sel_rate += model.beta_N[static_cast<std::size_t>(ell)];
    double rep_rate = 0.0;
    std::vector<double> rep_weights(model.mu.weights);
    if (!rep_weights.empty() && rep_weights.size() > 1)
        rep_weights[1] += model.mu.weight0 / 2.0;  // r=1 gets the extra mu({0})/2
    for (std::size_t r = 1; r < rep_weights.size(); ++r) rep_rate += rep_weights[r];

    const double total = N * (sel_rate + rep_rate);
    int k = k0;
    double t = 0.0;
    for (;;) {
        if (total <= 0.0) break;
        t += rng.exponential(total);
        if (t >= horizon_model_time) break;
        if (k == 0 || k == N) break;  // absorbing without mutation
        double u = rng.uniform() * (sel_rate + rep_rate);
        int new_k = k;
        if (u < sel_rate) {
            // l-replacement: focal + (l-1) potential parents drawn without
            // replacement; j type-a among the l; focal becomes a w.p. p_{j,l}
            int ell = 2;
            for (; ell < model.rule.m; ++ell) {
                u -= model.beta_N[static_cast<std::size_t>(ell)];
                if (u <= 0.0) break;
            }
            const bool focal_a = rng.bernoulli(static_cast<double>(k) / N);
            const int others_a = rng.hypergeometric(N - 1, k - (focal_a ? 1 : 0), ell - 1);
            const int j = others_a + (focal_a ? 1 : 0);
            const bool becomes_a = rng.bernoulli(model.rule.row(ell)[static_cast<std::size_t>(j)]);
            new_k = k + (becomes_a ? 1 : 0) - (focal_a ? 1 : 0);
        } else {
            u -= sel_rate;
            std::size_t r = 1;
            for (; r + 1 < rep_weights.size(); ++r) {
                u -= rep_weights[r];
                if (u <= 0.0) break;
            }
            // parent uniform; its r offspring replace r uniformly chosen
            // individuals among the other N-1
            const bool parent_a = rng.bernoulli(static_cast<double>(k) / N);
            const int victims_a =
                rng.hypergeometric(N - 1, k - (parent_a ? 1 : 0), static_cast<int>(r));
            new_k = k - victims_a + (parent_a ? static_cast<int>(r) : 0);
        }
        if (new_k != k) {
            k = new_k;
            if (trajectory) trajectory->push_back({t, k});
        }
    }
    return k;
}

double moran_frequency_at(const SelectionMechanism& sd, const LambdaMeasure& L, int N, double x0,
                          double t_limit_time, RngStream& rng) {
    MoranModel model;
    model.N = N;
    model.rule = sd.rule;
    model.beta_N.assign(sd.beta.size(), 0.0);
    for (std::size_t ell = 2; ell < sd.beta.size(); ++ell) model.beta_N[ell] = sd.beta[ell] / N;
    model.mu = moran_mu_from_lambda(N, L);
    const int k0 = static_cast<int>(std::lround(N * x0));
    const int k = moran_simulate(model, k0, N * t_limit_time, rng);
    return static_cast<double>(k) / N;
}

SdeResult sde_simulate(const SdeConfig& cfg, double x0, double horizon, RngStream& rng) {
    if (x0 < 0.0 || x0 > 1.0) throw std::domain_error("sde_simulate: x0 outside [0,1]");
    if (cfg.dt <= 0.0) throw std::invalid_argument("sde_simulate: dt > 0");
    // jump intensity w/r^2 per atom is finite by construction (atoms only)
    std::vector<double> jump_rate(cfg.L.atoms.size());
    double total_jump = 0.0;
    for (std::size_t a = 0; a < cfg.L.atoms.size(); ++a) {
        const auto& [r, w] = cfg.L.atoms[a];
        jump_rate[a] = w / (r * r);
        total_jump += jump_rate[a];
    }
    const double sigma0 = cfg.L.kingman;

    SdeResult res;
    double x = x0;
    double t = 0.0;

    // Euler step for the continuous part; the state is clipped back into
    // [0,1] and the clip counted.
    auto diffuse = [&](double y, double h) {
        const double drift = drift_eval(cfg.sd, y);
        const double diff = std::sqrt(std::max(sigma0 * y * (1.0 - y), 0.0));
        double z = y + drift * h + diff * std::sqrt(h) * rng.normal();
        ++res.steps;
        if (z < 0.0 || z > 1.0) {
            z = std::clamp(z, 0.0, 1.0);
            ++res.clamped;
        }
        return z;
    };

    double next_jump = total_jump > 0.0 ? rng.exponential(total_jump)
                                        : std::numeric_limits<double>::infinity();
    while (t < horizon) {
        if (x == 0.0 || x == 1.0) break;  // absorbed: drift, noise and jumps all vanish
        if (next_jump <= t + cfg.dt && next_jump <= horizon) {
            // advance the diffusion to the jump time, then apply the jump;
            // mean zero given x, so no compensator drift appears
            const double h = next_jump - t;
            if (h > 0.0) x = diffuse(x, h);
            std::size_t a = 0;
            double u = rng.uniform() * total_jump;
            for (; a + 1 < jump_rate.size(); ++a) {
                u -= jump_rate[a];
                if (u <= 0.0) break;
            }
            const double r = cfg.L.atoms[a].first;
            x = rng.bernoulli(x) ? x + r * (1.0 - x) : x * (1.0 - r);
            ++res.jumps;
            t = next_jump;
            next_jump = t + rng.exponential(total_jump);
            continue;
        }
        const double h = std::min(cfg.dt, horizon - t);
        x = diffuse(x, h);
        t += h;
    }
    res.x = x;
    return res;
}

}  // namespace bwf
