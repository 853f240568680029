#ifndef BWF_ANCESTRAL_HPP
#define BWF_ANCESTRAL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bwf/lambda_measure.hpp"
#include "bwf/parallel.hpp"
#include "bwf/rng.hpp"
#include "bwf/selection.hpp"

namespace bwf {

// ---------------------------------------------------------------------------
// Leaf process

struct LeafEvent {
    enum class Kind { branch, coalesce };
    double time;
    Kind kind;
    int param;  // branch: ell (count += ell-1); coalesce: k (count -= k-1)
};

struct LeafPath {
    int initial = 1;
    std::vector<LeafEvent> events;  // strictly increasing times

    int final_count() const;
    int count_at(double t) const;
};

// Exact continuous-time simulation: at count n, Branch(ell) at total rate
// n beta_ell and Coalesce(k) at total rate C(n,k) lambda_{n,k}.
LeafPath simulate_leaf_path(int n, const std::vector<double>& beta, const LambdaMeasure& L,
                            double horizon, RngStream& rng);

// ---------------------------------------------------------------------------
// Bernstein coefficient process

// State of the coefficient process; dimension is authoritative (a trailing
// zero does not reduce the leaf count).
struct CoefficientState {
    std::vector<double> v;

    CoefficientState() = default;
    explicit CoefficientState(std::vector<double> coeffs) : v(std::move(coeffs)) {}
    static CoefficientState unit(int n);  // e_{n+1}: monomial x^n

    int leaf_count() const { return static_cast<int>(v.size()) - 1; }
};

// Selection operator S^{n,ell}: R^{n+1} -> R^{n+ell}; row-stochastic,
// endpoint-preserving, sup-norm non-expansive.
CoefficientState apply_selection(const CoefficientState& v, int ell, const ColouringRule& rule);

// Coagulation operator C^{n,k}: R^{n+1} -> R^{n-k+2}.
CoefficientState apply_coagulation(const CoefficientState& v, int k);

// Drive v0 through the events of a leaf path (the state is a deterministic
// function of v0 and the path).
CoefficientState apply_leaf_path(const CoefficientState& v0, const LeafPath& path,
                                 const ColouringRule& rule);

struct BcpResult {
    CoefficientState state;
    LeafPath path;
};
BcpResult simulate_bcp(const CoefficientState& v0, const SelectionMechanism& sd,
                       const LambdaMeasure& L, double horizon, RngStream& rng);

// <B_L(x), v>: the ancestral selection polynomial at x.
double asp_eval(const CoefficientState& v, double x);

// ---------------------------------------------------------------------------
// Explicit ASG (independent colouring oracle)

struct AsgParticle {
    double birth = 0.0;                  // backward time
    double death = -1.0;                 // backward time; <0 while alive
};

struct AsgEvent {
    double time;
    bool is_branch;
    int marked = -1;                 // branch: the marked particle
    std::vector<int> participants;   // branch: new children; coalesce: victims
    int newborn = -1;                // coalesce: replacement particle
};

struct AsgGraph {
    int n_roots = 0;
    double horizon = 0.0;
    std::vector<AsgParticle> particles;  // roots are ids 0..n_roots-1
    std::vector<AsgEvent> events;        // increasing backward time
    std::vector<int> leaves;             // alive at the horizon

    std::vector<int> leaf_counts() const;  // count after each event
};

inline constexpr int kAsgParticleGuard = 100000;
inline constexpr long long kFixationLineGuard = 100000;  // levels past this count as +infinity

AsgGraph simulate_asg_graph(int n, const std::vector<double>& beta, const LambdaMeasure& L,
                            double horizon, RngStream& rng);

// Propagate i.i.d. leaf types through the graph with the colouring rule;
// returns the root types (true = type a). Deterministic rules consume no
// randomness.
std::vector<bool> colour_graph(const AsgGraph& g, const std::vector<bool>& leaf_types,
                               const ColouringRule& rule, RngStream& rng);

// Monte Carlo estimate of P(all n roots type a) with Bernoulli(x) leaves.
MeanSe asg_colouring_oracle(int n, const SelectionMechanism& sd, const LambdaMeasure& L,
                            double horizon, double x, std::size_t reps, std::uint64_t seed,
                            const ExecConfig& exec = {});

// ---------------------------------------------------------------------------
// Stationary and entrance-law sampling

// Regenerative sampler for V_infty (requires b(beta) < c(Lambda)): draws a
// duration-biased excursion of the leaf process away from state 1 and a
// uniform time inside it. The envelope for the length-biasing rejection
// doubles until acceptance succeeds.
class StationarySampler {
  public:
    StationarySampler(const SelectionMechanism& sd, const LambdaMeasure& L);

    CoefficientState sample(RngStream& rng);

  private:
    SelectionMechanism sd_;
    LambdaMeasure L_;
    double envelope_ = 1.0;
};

CoefficientState sample_stationary_V(const SelectionMechanism& sd, const LambdaMeasure& L,
                                     RngStream& rng);

// Coupled pair (V with rule p, W with the reversed rule pbar) driven by one
// leaf path started from e_{n+1}; Q_t(x) = <B(x),V_t> + <B(1-x),W_t>.
struct EntranceSample {
    CoefficientState V;
    CoefficientState W;
    int leaf_count = 0;
};
EntranceSample entrance_law_sample(const SelectionMechanism& sd, const LambdaMeasure& L, double t0,
                                   int n_max, RngStream& rng);

// Streaming functionals of the coupled run: Q on a time grid plus
// int_0^tau (1 - Q_t(x)) dt, where tau is the first hit of leaf count 1.
struct CoupledRunStats {
    std::vector<double> q_at_grid;
    double integral_one_minus_q = 0.0;
    double tau = 0.0;
    bool hit_one = false;
};
CoupledRunStats run_coupled_entrance(int n0, const SelectionMechanism& sd, const LambdaMeasure& L,
                                     double x, const std::vector<double>& t_grid, double horizon,
                                     RngStream& rng);

// ---------------------------------------------------------------------------
// Siegmund-dual fixation line

// Simulates D_t from d0; returns the value at the horizon, or nullopt for
// +infinity (the Lambda({1}) jump). Total up-rates are exact closed forms;
// the jump size is drawn from the negative-binomial identity behind them,
// so there is no series truncation (mass defect 0).
std::optional<long long> simulate_fixation_line(long long d0, const std::vector<double>& beta,
                                                const LambdaMeasure& L, double horizon,
                                                RngStream& rng);

// Pathwise-coupled leaf paths proving monotonicity in the initial count:
// returns (L_t^{n_small}, L_t^{n_big}) at the horizon, built from one ASG.
std::pair<int, int> coupled_leaf_counts(int n_small, int n_big, const std::vector<double>& beta,
                                        const LambdaMeasure& L, double horizon, RngStream& rng);

}  // namespace bwf

#endif
