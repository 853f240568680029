#include "bwf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bwf/bernstein.hpp"
#include "bwf/combinatorics.hpp"

namespace bwf {

namespace {

double z_score(const MeanSe& l, const MeanSe& r) {
    const double denom = std::sqrt(l.se * l.se + r.se * r.se);
    const double diff = std::abs(l.mean - r.mean);
    if (denom == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / denom;
}

}  // namespace

const char* to_string(Regime r) {
    switch (r) {
        case Regime::positive_recurrent: return "positive_recurrent";
        case Regime::transient: return "transient";
        default: return "critical_unknown";
    }
}

const char* to_string(AbsorptionMethod m) {
    switch (m) {
        case AbsorptionMethod::dual_mc: return "dual_mc";
        case AbsorptionMethod::forward_mc: return "forward_mc";
        default: return "series";
    }
}

Regime classify_leaf_process(const std::vector<double>& beta, const LambdaMeasure& L) {
    double b = 0.0;
    for (std::size_t ell = 2; ell < beta.size(); ++ell) b += beta[ell] * (static_cast<double>(ell) - 1.0);
    const double c = coalescence_impact(L);
    if (std::isinf(c)) return Regime::positive_recurrent;
    if (std::abs(b - c) < 1e-12) return Regime::critical_unknown;
    return b < c ? Regime::positive_recurrent : Regime::transient;
}

// ---------------------------------------------------------------------------

namespace {

double kappa_coefficient(const LambdaMeasure& L, int n, int c) {
    // C(n+c-1, c) lambda_{c+n, c} without the atom at 1
    double v = (c == 2) ? L.kingman * choose(n + 1, 2) : 0.0;
    for (const auto& [r, w] : L.atoms) {
        if (r == 1.0) continue;
        const double lg = log_choose(n + c - 1, c) + (c - 2) * std::log(r) + n * std::log1p(-r);
        v += w * std::exp(lg);
    }
    return v;
}

std::vector<double> solve_dense(std::vector<std::vector<double>> M, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-300) throw std::runtime_error("fearnhead: singular system");
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = M[r][col] / M[col][col];
            if (f == 0.0) continue;
            for (std::size_t cc = col; cc < n; ++cc) M[r][cc] -= f * M[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double acc = rhs[r];
        for (std::size_t cc = r + 1; cc < n; ++cc) acc -= M[r][cc] * x[cc];
        x[r] = acc / M[r][r];
    }
    return x;
}

struct FearnheadCoeffs {
    double a_coeff;                 // multiplies a_n on the left
    std::vector<double> kappa;      // kappa[c] for c = 2..c_max (index shifted by 2)
    std::vector<double> s;          // s[r] for r = 1..rmax
};

FearnheadCoeffs fearnhead_row(const std::vector<double>& beta, const LambdaMeasure& L, int n,
                              int n_max) {
    FearnheadCoeffs fc;
    const int m = static_cast<int>(beta.size()) - 1;
    // selection side
    const int rmax = std::min(m - 1, n);
    fc.s.assign(static_cast<std::size_t>(rmax) + 1, 0.0);
    double s_total = 0.0;
    for (int r = 1; r <= rmax; ++r) {
        double tail = 0.0;
        for (int k = r + 2; k <= m; ++k) tail += beta[static_cast<std::size_t>(k)];
        fc.s[static_cast<std::size_t>(r)] = (n + 1.0 - r) * beta[static_cast<std::size_t>(r + 1)] + tail;
        s_total += fc.s[static_cast<std::size_t>(r)];
    }
    // coalescence side: exact total for the a_n coefficient, explicit kappa
    // for the a_{c+n-1} terms that stay inside the window
    double kappa_total = L.kingman * choose(n + 1, 2);
    for (const auto& [r, w] : L.atoms) {
        if (r == 1.0) continue;
        const double q = 1.0 - r;
        kappa_total += w * (1.0 - std::pow(q, n) * (1.0 + n * r)) / (r * r);
    }
    const int c_max = n_max - n + 1;
    fc.kappa.assign(static_cast<std::size_t>(std::max(c_max + 1, 0)) + 1, 0.0);
    for (int c = 2; c <= c_max; ++c) fc.kappa[static_cast<std::size_t>(c)] = kappa_coefficient(L, n, c);
    fc.a_coeff = kappa_total + L.mass_at_one() + s_total;
    return fc;
}

std::vector<double> fearnhead_window(const std::vector<double>& beta, const LambdaMeasure& L,
                                     int n_max) {
    std::vector<std::vector<double>> M(static_cast<std::size_t>(n_max),
                                       std::vector<double>(static_cast<std::size_t>(n_max), 0.0));
    std::vector<double> rhs(static_cast<std::size_t>(n_max), 0.0);
    for (int n = 1; n <= n_max; ++n) {
        const FearnheadCoeffs fc = fearnhead_row(beta, L, n, n_max);
        auto& row = M[static_cast<std::size_t>(n - 1)];
        row[static_cast<std::size_t>(n - 1)] += fc.a_coeff;
        for (int c = 2; c < static_cast<int>(fc.kappa.size()); ++c) {
            const int j = c + n - 1;
            if (j <= n_max) row[static_cast<std::size_t>(j - 1)] -= fc.kappa[static_cast<std::size_t>(c)];
        }
        for (int r = 1; r < static_cast<int>(fc.s.size()); ++r) {
            const int j = n - r;
            if (j == 0)
                rhs[static_cast<std::size_t>(n - 1)] += fc.s[static_cast<std::size_t>(r)];  // a_0 = 1
            else
                row[static_cast<std::size_t>(j - 1)] -= fc.s[static_cast<std::size_t>(r)];
        }
    }
    return solve_dense(std::move(M), std::move(rhs));
}

}  // namespace

StationaryTail fearnhead_solve(const std::vector<double>& beta, const LambdaMeasure& L,
                               int n_max_initial, double tol) {
    if (classify_leaf_process(beta, L) != Regime::positive_recurrent)
        throw std::domain_error("fearnhead_solve: leaf process not positive recurrent");
    int n_max = std::max(n_max_initial, 8);
    std::vector<double> prev = fearnhead_window(beta, L, n_max);
    double change = std::numeric_limits<double>::infinity();
    for (int doubling = 0; doubling < 6; ++doubling) {
        const int next = n_max * 2;
        std::vector<double> cur = fearnhead_window(beta, L, next);
        change = 0.0;
        for (int i = 0; i < n_max; ++i)
            change = std::max(change, std::abs(cur[static_cast<std::size_t>(i)] - prev[static_cast<std::size_t>(i)]));
        prev = std::move(cur);
        n_max = next;
        if (change < tol) break;
    }
    if (change >= tol)
        throw std::runtime_error("fearnhead_solve: no convergence after 6 doublings");

    StationaryTail out;
    out.n_max = n_max;
    out.last_change = change;
    out.a.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.a[0] = 1.0;
    for (int i = 1; i <= n_max; ++i) out.a[static_cast<std::size_t>(i)] = prev[static_cast<std::size_t>(i - 1)];
    out.q.assign(out.a.size(), 0.0);
    for (int i = 1; i <= n_max; ++i)
        out.q[static_cast<std::size_t>(i)] = out.a[static_cast<std::size_t>(i - 1)] - out.a[static_cast<std::size_t>(i)];

    // residual of the recursion at the solution
    for (int n = 1; n <= n_max; ++n) {
        const FearnheadCoeffs fc = fearnhead_row(beta, L, n, n_max);
        double lhs = fc.a_coeff * out.a[static_cast<std::size_t>(n)];
        for (int c = 2; c < static_cast<int>(fc.kappa.size()); ++c) {
            const int j = c + n - 1;
            if (j <= n_max) lhs -= fc.kappa[static_cast<std::size_t>(c)] * out.a[static_cast<std::size_t>(j)];
        }
        for (int r = 1; r < static_cast<int>(fc.s.size()); ++r)
            lhs -= fc.s[static_cast<std::size_t>(r)] * out.a[static_cast<std::size_t>(n - r)];
        out.residual = std::max(out.residual, std::abs(lhs));
    }
    return out;
}

double stationary_L_empirical_check(const std::vector<double>& beta, const LambdaMeasure& L,
                                    double run_time, std::uint64_t seed) {
    const StationaryTail tail = fearnhead_solve(beta, L);
    RngStream rng(seed, 0);
    const LeafPath path = simulate_leaf_path(1, beta, L, run_time, rng);
    std::vector<double> occupancy;
    int count = 1;
    double t_prev = 0.0;
    auto deposit = [&](int state, double dt) {
        if (state >= static_cast<int>(occupancy.size())) occupancy.resize(static_cast<std::size_t>(state) + 1, 0.0);
        occupancy[static_cast<std::size_t>(state)] += dt;
    };
    for (const auto& e : path.events) {
        deposit(count, e.time - t_prev);
        t_prev = e.time;
        count += (e.kind == LeafEvent::Kind::branch) ? e.param - 1 : -(e.param - 1);
    }
    deposit(count, run_time - t_prev);

    double tv = 0.0;
    const std::size_t top = std::max(occupancy.size(), tail.q.size());
    for (std::size_t n = 1; n < top; ++n) {
        const double emp = n < occupancy.size() ? occupancy[n] / run_time : 0.0;
        const double sol = n < tail.q.size() ? tail.q[n] : 0.0;
        tv += std::abs(emp - sol);
    }
    return 0.5 * tv;
}

// ---------------------------------------------------------------------------

DualityReport verify_duality(const SelectionMechanism& sd, const LambdaMeasure& L, double x, int n,
                             double t, std::size_t reps, std::uint64_t seed,
                             const ForwardConfig& forward, const ExecConfig& exec) {
    if (reps < 1000) throw std::invalid_argument("verify_duality: reps >= 1000");
    MeanSe lhs;
    if (forward.kind == ForwardConfig::Kind::sde) {
        SdeConfig cfg{sd, L, forward.dt};
        lhs = monte_carlo(
            reps,
            [&](std::size_t rep) {
                RngStream rng(seed, rep);
                const double xt = sde_simulate(cfg, x, t, rng).x;
                return std::pow(xt, n);
            },
            exec);
    } else {
        lhs = monte_carlo(
            reps,
            [&](std::size_t rep) {
                RngStream rng(seed, rep);
                const double xt = moran_frequency_at(sd, L, forward.moran_N, x, t, rng);
                return std::pow(xt, n);
            },
            exec);
    }
    const MeanSe rhs = monte_carlo(
        reps,
        [&](std::size_t rep) {
            RngStream rng(seed ^ 0x5851f42d4c957f2dULL, rep);
            const BcpResult run = simulate_bcp(CoefficientState::unit(n), sd, L, t, rng);
            return asp_eval(run.state, x);
        },
        exec);

    DualityReport rep;
    rep.lhs = lhs.mean;
    rep.lhs_se = lhs.se;
    rep.rhs = rhs.mean;
    rep.rhs_se = rhs.se;
    rep.z = z_score(lhs, rhs);
    rep.reps = reps;
    std::ostringstream cfg;
    cfg << "duality x=" << x << " n=" << n << " t=" << t
        << " forward=" << (forward.kind == ForwardConfig::Kind::sde ? "sde" : "moran");
    rep.config = cfg.str();
    return rep;
}

DualityReport verify_siegmund(const std::vector<double>& beta, const LambdaMeasure& L, int ell,
                              long long d, double t, std::size_t reps, std::uint64_t seed,
                              const ExecConfig& exec) {
    if (reps < 1000) throw std::invalid_argument("verify_siegmund: reps >= 1000");
    const MeanSe lhs = monte_carlo(
        reps,
        [&](std::size_t rep) {
            RngStream rng(seed, rep);
            const LeafPath path = simulate_leaf_path(ell, beta, L, t, rng);
            return path.final_count() >= d ? 1.0 : 0.0;
        },
        exec);
    const MeanSe rhs = monte_carlo(
        reps,
        [&](std::size_t rep) {
            RngStream rng(seed ^ 0x9e3779b97f4a7c15ULL, rep);
            const auto dt = simulate_fixation_line(d, beta, L, t, rng);
            return (dt.has_value() && *dt <= ell) ? 1.0 : 0.0;
        },
        exec);
    DualityReport rep;
    rep.lhs = lhs.mean;
    rep.lhs_se = lhs.se;
    rep.rhs = rhs.mean;
    rep.rhs_se = rhs.se;
    rep.z = z_score(lhs, rhs);
    rep.reps = reps;
    std::ostringstream cfg;
    cfg << "siegmund ell=" << ell << " d=" << d << " t=" << t;
    rep.config = cfg.str();
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kStationaryChunk = 128;

// Chunked stationary sampling: each chunk owns one RngStream and one sampler
// (the length-biasing envelope adapts within the chunk), so results are
// independent of the thread count.
std::vector<double> stationary_values(const SelectionMechanism& sd, const LambdaMeasure& L,
                                      std::size_t reps, std::uint64_t seed, const ExecConfig& exec,
                                      const std::function<double(const CoefficientState&)>& f) {
    const std::size_t chunks = (reps + kStationaryChunk - 1) / kStationaryChunk;
    std::vector<std::vector<double>> per_chunk(chunks);
    std::vector<double> marker;
    parallel_map(
        chunks, marker,
        [&](std::size_t chunk) {
            RngStream rng(seed, chunk);
            StationarySampler sampler(sd, L);
            const std::size_t lo = chunk * kStationaryChunk;
            const std::size_t hi = std::min(reps, lo + kStationaryChunk);
            auto& out = per_chunk[chunk];
            out.reserve(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) out.push_back(f(sampler.sample(rng)));
            return 0.0;
        },
        exec);
    std::vector<double> values;
    values.reserve(reps);
    for (auto& c : per_chunk) values.insert(values.end(), c.begin(), c.end());
    return values;
}

}  // namespace

AbsorptionEstimate absorption_probability(const SelectionMechanism& sd, const LambdaMeasure& L,
                                          double x, AbsorptionMethod method, std::size_t budget,
                                          std::uint64_t seed, const ExecConfig& exec,
                                          double sde_dt) {
    AbsorptionEstimate est;
    est.reps = budget;
    if (x == 0.0 || x == 1.0) {
        est.h = x;
        return est;
    }

    if (method == AbsorptionMethod::forward_mc) {
        const double b_star = minimal_branching_rate(drift_bcv(sd));
        est.horizon_cap = 50.0 / std::max(b_star, 0.05);  // neutral drifts get a wide cap
        const SdeConfig cfg{sd, L, sde_dt};
        std::vector<double> vals;
        parallel_map(
            budget, vals,
            [&](std::size_t rep) {
                RngStream rng(seed, rep);
                double xx = x;
                double t = 0.0;
                const double eps = 1e-6;
                while (xx > eps && xx < 1.0 - eps && t < est.horizon_cap) {
                    // advance in blocks to keep the loop overhead small
                    const double block = std::min(1.0, est.horizon_cap - t);
                    xx = sde_simulate(cfg, xx, block, rng).x;
                    t += block;
                }
                if (xx >= 1.0 - eps) return 1.0;
                if (xx <= eps) return 0.0;
                return -1.0;  // unabsorbed at the cap
            },
            exec);
        for (double v : vals)
            if (v < 0.0) ++est.unabsorbed;
        // fraction at 1 among all paths; unabsorbed ones are reported, and
        // counted as not fixed
        std::vector<double> indicator(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) indicator[i] = vals[i] == 1.0 ? 1.0 : 0.0;
        const MeanSe s = summarize(indicator);
        est.h = s.mean;
        est.se = s.se;
        return est;
    }

    if (method == AbsorptionMethod::dual_mc) {
        const auto values = stationary_values(sd, L, budget, seed, exec,
                                              [&](const CoefficientState& v) { return asp_eval(v, x); });
        const MeanSe s = summarize(values);
        est.h = s.mean;
        est.se = s.se;
        return est;
    }

    // series: c_k = E[cbar_{k,L}(V) 1{L = l}] estimated from stationary
    // samples through the monomial coefficients of <B_L(.), V>.
    const std::size_t chunks = (budget + kStationaryChunk - 1) / kStationaryChunk;
    std::vector<std::vector<std::vector<double>>> chunk_coeffs(chunks);
    std::vector<double> marker;
    parallel_map(
        chunks, marker,
        [&](std::size_t chunk) {
            RngStream rng(seed, chunk);
            StationarySampler sampler(sd, L);
            const std::size_t lo = chunk * kStationaryChunk;
            const std::size_t hi = std::min(budget, lo + kStationaryChunk);
            auto& out = chunk_coeffs[chunk];
            out.reserve(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) {
                const CoefficientState v = sampler.sample(rng);
                out.push_back(monomial_from_bcv(BernsteinVector(v.v)).coeffs);
            }
            return 0.0;
        },
        exec);

    std::vector<std::vector<double>> samples;
    samples.reserve(budget);
    for (auto& c : chunk_coeffs)
        for (auto& s : c) samples.push_back(std::move(s));

    std::size_t max_len = 0;
    for (const auto& s : samples) max_len = std::max(max_len, s.size());
    std::vector<double> c_hat(max_len, 0.0);
    for (const auto& s : samples)
        for (std::size_t k = 0; k < s.size(); ++k) c_hat[k] += s[k];
    for (auto& c : c_hat) c /= static_cast<double>(samples.size());

    double c_max = 0.0;
    for (std::size_t k = 1; k < c_hat.size(); ++k) c_max = std::max(c_max, std::abs(c_hat[k]));
    std::size_t K = c_hat.size() - 1;
    for (std::size_t k = 1; k < c_hat.size(); ++k) {
        if (std::abs(c_hat[k]) < 1e-8 * c_max) {
            K = k - 1;
            break;
        }
    }
    est.series_terms = static_cast<int>(K);
    est.series_coeffs.assign(c_hat.begin(), c_hat.begin() + static_cast<long>(K) + 1);

    std::vector<double> per_sample(samples.size(), 0.0);
    double remainder = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double acc = 0.0;
        const std::size_t top = std::min(K, samples[i].size() - 1);
        for (std::size_t k = 1; k <= top; ++k) acc += samples[i][k] * std::pow(x, static_cast<double>(k));
        per_sample[i] = acc;
        // tail bound per sample: sum_{k>K} C(L,k)(2x)^k
        const int Lc = static_cast<int>(samples[i].size()) - 1;
        double tail = std::pow(1.0 + 2.0 * x, Lc);
        for (int k = 0; k <= std::min<int>(static_cast<int>(K), Lc); ++k)
            tail -= choose(Lc, k) * std::pow(2.0 * x, k);
        remainder += std::max(tail, 0.0);
    }
    est.series_remainder_bound = remainder / static_cast<double>(samples.size());
    const MeanSe s = summarize(per_sample);
    est.h = s.mean;
    est.se = s.se;
    return est;
}

AbsorptionTimeEstimate absorption_time(const SelectionMechanism& sd, const LambdaMeasure& L,
                                       double x, const std::vector<double>& t_grid, int n_max,
                                       std::size_t reps, std::uint64_t seed,
                                       const ExecConfig& exec) {
    const CdiDiagnostic diag = cdi_diagnostic(L, 2000);
    if (diag.verdict == CdiVerdict::likely_not)
        throw std::domain_error("absorption_time: leaf process does not come down from infinity");
    std::vector<double> grid(t_grid);
    std::sort(grid.begin(), grid.end());
    const double horizon = 1e9;  // tau is a.s. finite in the c.d.i. regime

    auto run_batch = [&](int n0, std::uint64_t salt, std::size_t nreps) {
        struct Batch {
            std::vector<std::vector<double>> q;
            std::vector<double> integral, tau;
        } batch;
        batch.q.assign(nreps, {});
        batch.integral.resize(nreps);
        batch.tau.resize(nreps);
        std::vector<double> marker;
        parallel_map(
            nreps, marker,
            [&](std::size_t rep) {
                RngStream rng(seed ^ salt, rep);
                const CoupledRunStats st = run_coupled_entrance(n0, sd, L, x, grid, horizon, rng);
                batch.q[rep] = st.q_at_grid;
                batch.integral[rep] = st.integral_one_minus_q;
                batch.tau[rep] = st.tau;
                return 0.0;
            },
            exec);
        return batch;
    };

    const auto base = run_batch(n_max, 0, reps);
    AbsorptionTimeEstimate est;
    est.t_grid = grid;
    est.n_max = n_max;
    const MeanSe mt = summarize(base.integral);
    est.mean_T = mt.mean;
    est.mean_T_se = mt.se;
    const MeanSe tau = summarize(base.tau);
    est.tau_mean = tau.mean;
    est.tau_mean_se = tau.se;
    est.cdf.assign(grid.size(), 0.0);
    est.cdf_se.assign(grid.size(), 0.0);
    std::vector<double> col(reps);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t i = 0; i < reps; ++i) col[i] = base.q[i][g];
        const MeanSe s = summarize(col);
        est.cdf[g] = s.mean;
        est.cdf_se[g] = s.se;
    }

    // doubling sensitivity: rerun at 2 n_max with a quarter of the budget
    const std::size_t reps2 = std::max<std::size_t>(reps / 4, 64);
    const auto dbl = run_batch(2 * n_max, 0xabcdefULL, reps2);
    std::vector<double> col2(reps2);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t i = 0; i < reps2; ++i) col2[i] = dbl.q[i][g];
        const MeanSe s2 = summarize(col2);
        MeanSe s1{est.cdf[g], est.cdf_se[g], reps};
        est.sensitivity_z = std::max(est.sensitivity_z, z_score(s1, s2));
    }
    est.sensitivity_ok = est.sensitivity_z <= 3.0;
    return est;
}

EntranceSensitivity entrance_sensitivity_check(const SelectionMechanism& sd,
                                               const LambdaMeasure& L, double t0, int n_max,
                                               const std::vector<double>& x_grid, std::size_t reps,
                                               std::uint64_t seed, const ExecConfig& exec) {
    auto batch = [&](int n0, std::uint64_t salt, double x) {
        return monte_carlo(
            reps,
            [&, n0, x](std::size_t rep) {
                RngStream rng(seed ^ salt, rep);
                const EntranceSample s = entrance_law_sample(sd, L, t0, n0, rng);
                return asp_eval(s.V, x);
            },
            exec);
    };
    EntranceSensitivity out;
    for (double x : x_grid) {
        const MeanSe a = batch(n_max, 0, x);
        const MeanSe b = batch(2 * n_max, 0x517cc1b727220a95ULL, x);
        out.worst_z = std::max(out.worst_z, z_score(a, b));
    }
    out.ok = out.worst_z <= 3.0;
    return out;
}

}  // namespace bwf
