#ifndef BWF_ANALYSIS_HPP
#define BWF_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bwf/ancestral.hpp"
#include "bwf/forward.hpp"
#include "bwf/lambda_measure.hpp"
#include "bwf/parallel.hpp"
#include "bwf/selection.hpp"

namespace bwf {

enum class Regime { positive_recurrent, transient, critical_unknown };
const char* to_string(Regime r);

// Compares b(beta) against c(Lambda) with exact infinity handling.
Regime classify_leaf_process(const std::vector<double>& beta, const LambdaMeasure& L);

// ---------------------------------------------------------------------------
// Stationary leaf-count tail probabilities a_n = P(L_inf > n): the unique
// solution of the linear recursion
//   sum_{c>=2} C(n+c-1,c) lambda_{c+n,c} [a_n - a_{c+n-1}] + Lambda({1}) a_n
//     = sum_r ((n+1-r) beta_{r+1} + sum_{k>r} beta_{k+1}) [a_{n-r} - a_n]
// with a_0 = 1, a_n -> 0. Solved on a truncated window that doubles until
// the solution stops moving.
struct StationaryTail {
    std::vector<double> a;  // a[0..n_max]
    std::vector<double> q;  // q[n] = a_{n-1} - a_n, q[0] = 0
    int n_max = 0;
    double residual = 0.0;      // sup-norm recursion residual at the solution
    double last_change = 0.0;   // sup change in the final doubling step
};

StationaryTail fearnhead_solve(const std::vector<double>& beta, const LambdaMeasure& L,
                               int n_max_initial = 32, double tol = 1e-12);

// Long-run occupation frequencies of the simulated leaf process against the
// solved stationary masses; returns the total-variation distance.
double stationary_L_empirical_check(const std::vector<double>& beta, const LambdaMeasure& L,
                                    double run_time, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Duality verification

struct DualityReport {
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    double z = 0.0;
    std::size_t reps = 0;
    std::string config;
};

struct ForwardConfig {
    enum class Kind { sde, moran };
    Kind kind = Kind::sde;
    int moran_N = 500;
    double dt = 1e-3;
};

// E_x[X_t^n] (forward Monte Carlo) against E[<B_{L_t}(x), V_t>] started from
// e_{n+1} (coefficient-process Monte Carlo).
DualityReport verify_duality(const SelectionMechanism& sd, const LambdaMeasure& L, double x, int n,
                             double t, std::size_t reps, std::uint64_t seed,
                             const ForwardConfig& forward = {}, const ExecConfig& exec = {});

// P_ell(d <= L_t) against P_d(D_t <= ell).
DualityReport verify_siegmund(const std::vector<double>& beta, const LambdaMeasure& L, int ell,
                              long long d, double t, std::size_t reps, std::uint64_t seed,
                              const ExecConfig& exec = {});

// ---------------------------------------------------------------------------
// Absorption probability h(x): the fixation probability of type a,
// h(x) = lim_t E_x[X_t] = E[<B_{L_inf}(x), V_inf>].

enum class AbsorptionMethod { dual_mc, forward_mc, series };
const char* to_string(AbsorptionMethod m);

struct AbsorptionEstimate {
    double h = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
    // forward_mc diagnostics
    std::size_t unabsorbed = 0;
    double horizon_cap = 0.0;
    // series diagnostics
    int series_terms = 0;
    double series_remainder_bound = 0.0;
    std::vector<double> series_coeffs;
};

AbsorptionEstimate absorption_probability(const SelectionMechanism& sd, const LambdaMeasure& L,
                                          double x, AbsorptionMethod method, std::size_t budget,
                                          std::uint64_t seed, const ExecConfig& exec = {},
                                          double sde_dt = 1e-3);

// ---------------------------------------------------------------------------
// Absorption time via the entrance law: P(T <= t) = E[Q_t(x)] and
// E[T] = E[int_0^tau (1 - Q_t(x)) dt], approximated from n_max leaves with a
// doubling sensitivity check.
struct AbsorptionTimeEstimate {
    std::vector<double> t_grid;
    std::vector<double> cdf;
    std::vector<double> cdf_se;
    double mean_T = 0.0, mean_T_se = 0.0;
    double tau_mean = 0.0, tau_mean_se = 0.0;
    int n_max = 0;
    bool sensitivity_ok = true;
    double sensitivity_z = 0.0;  // worst grid z between n_max and 2 n_max runs
};

AbsorptionTimeEstimate absorption_time(const SelectionMechanism& sd, const LambdaMeasure& L,
                                       double x, const std::vector<double>& t_grid, int n_max,
                                       std::size_t reps, std::uint64_t seed,
                                       const ExecConfig& exec = {});

// Sensitivity of the entrance-law truncation: E[<B(x), V_{t0}>] on an x-grid
// from n_max leaves against 2 n_max leaves; flags any grid point moving by
// more than 3 pooled SE.
struct EntranceSensitivity {
    bool ok = true;
    double worst_z = 0.0;
};
EntranceSensitivity entrance_sensitivity_check(const SelectionMechanism& sd,
                                               const LambdaMeasure& L, double t0, int n_max,
                                               const std::vector<double>& x_grid, std::size_t reps,
                                               std::uint64_t seed, const ExecConfig& exec = {});

}  // namespace bwf

#endif
