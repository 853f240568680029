#ifndef BWF_FORWARD_HPP
#define BWF_FORWARD_HPP

#include <cstdint>
#include <vector>

#include "bwf/lambda_measure.hpp"
#include "bwf/rng.hpp"
#include "bwf/selection.hpp"

namespace bwf {

// Drift of the limiting SDE: sum_l beta_l sum_i b_{i,l}(x)(p_{i,l} - i/l).
// Vanishes exactly at x in {0,1}.
double drift_eval(const SelectionMechanism& sd, double x);

// ---------------------------------------------------------------------------
// (beta, p, mu)-Moran model

// Neutral reproduction measure on {0..N}: weight0 plays the Kingman role
// (it boosts 1-reproductions by weight0/2), weights[r] is the rate weight of
// r-reproductions, r in [1, N-1].
struct MoranMeasure {
    double weight0 = 0.0;
    std::vector<double> weights;  // index r, size N; weights[0] unused

    double total_mass() const;  // M_mu = mu({0}) + sum r^2 mu({r})
};

// mu_N = Lambda({0}) delta_0 + (1/N^2) sum_k C(N,k+1) lambda0_{N,k+1} delta_k;
// the sequence of Moran models built from these measures converges to the
// Lambda-Wright-Fisher limit.
MoranMeasure moran_mu_from_lambda(int N, const LambdaMeasure& L);

struct MoranModel {
    int N = 0;
    std::vector<double> beta_N;  // per-individual l-replacement rates, index l
    ColouringRule rule;
    MoranMeasure mu;

    void validate() const;
};

struct MoranStep {
    double time;
    int k;
};

// Exact event-driven simulation of the type-a count; returns the count at
// the horizon (model time units). If trajectory is non-null, every state
// change is appended.
int moran_simulate(const MoranModel& model, int k0, double horizon_model_time, RngStream& rng,
                   std::vector<MoranStep>* trajectory = nullptr);

// Frequency at limit time t: runs the count process to model time N*t with
// per-individual rates beta/N (the factor-N speed-up) and returns k/N.
double moran_frequency_at(const SelectionMechanism& sd, const LambdaMeasure& L, int N, double x0,
                          double t_limit_time, RngStream& rng);

// ---------------------------------------------------------------------------
// Jump-diffusion scheme for the limiting SDE

struct SdeConfig {
    SelectionMechanism sd;
    LambdaMeasure L;
    double dt = 1e-3;
};

struct SdeResult {
    double x = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t clamped = 0;  // diffusion steps clipped back into [0,1]
    std::uint64_t jumps = 0;
};

// Euler-Maruyama on drift + sqrt(Lambda({0}) x(1-x)) dW with exact
// exponential jump clocks per atom (rate w/r^2): with probability x the jump
// is x + r(1-x), else x(1-r). The jump has mean zero given x, so no
// compensator drift is added.
SdeResult sde_simulate(const SdeConfig& cfg, double x0, double horizon, RngStream& rng);

}  // namespace bwf

#endif
