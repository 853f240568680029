#ifndef BWF_SELECTION_HPP
#define BWF_SELECTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "bwf/bernstein.hpp"

namespace bwf {

// Colouring rule p in P_m: for each replacement order l in [2,m] a row
// p_{.,l} of length l+1 with p_{0,l} = 0, p_{l,l} = 1, entries in [0,1].
struct ColouringRule {
    int m = 2;
    std::vector<std::vector<double>> p;  // p[l] has size l+1; slots 0,1 unused

    const std::vector<double>& row(int ell) const { return p[static_cast<std::size_t>(ell)]; }
    std::vector<double>& row(int ell) { return p[static_cast<std::size_t>(ell)]; }

    static ColouringRule uniform(int m);       // p_{i,l} = i/l
    static ColouringRule fittest_wins(int m);  // p_{i,l} = 1{i=l}
    static ColouringRule minority(int m);      // p_{i,l} = 1{i <= floor(l/2)}, boundary rows fixed
    static ColouringRule majority(int m);      // p_{i,l} = 1{i >= ceil(l/2)}

    ColouringRule reversed() const;  // pbar_{i,l} = 1 - p_{l-i,l}
    void validate(double tol = 1e-9) const;
};

// A point of E^m: branching rates beta_l and a colouring rule.
struct SelectionMechanism {
    std::vector<double> beta;  // beta[l] for l in [2,m]; size m+1, slots 0,1 unused
    ColouringRule rule;

    int m() const { return rule.m; }
    double beta_at(int ell) const { return beta[static_cast<std::size_t>(ell)]; }
    double effective_rate() const;  // b(beta) = sum_l beta_l (l-1)
    double total_branch_rate() const;  // |beta| = sum_l beta_l

    static SelectionMechanism neutral(int m = 2);
    void validate(double tol = 1e-9) const;
};

// Lower-triangular stochastic matrix acting on branching rates.
struct ThinningMechanism {
    int m = 2;
    std::vector<std::vector<double>> t;  // t[k][i], k,i in [1,m]; size (m+1)x(m+1)

    static ThinningMechanism identity(int m);
    void validate(double tol = 1e-12) const;
};

// One lambda-convex decomposition: rho = sum_l alpha_l v_l with
// v_l in S^l_lambda and alpha on the simplex.
struct ConvexDecomposition {
    double lambda = 0.0;
    std::vector<std::vector<double>> v;  // v[l] in R^{m-1}, l in [2,m]; slots 0,1 unused
    std::vector<double> alpha;           // alpha[l], same indexing
    int m() const { return static_cast<int>(alpha.size()) - 1; }
};

// Hypergeometric smoothing of an order-l rule row to degree m:
// theta_l(p)_i = E[p_{K}], K ~ Hyp(m; l; i), for i = 1..m-1.
std::vector<double> theta(int m, int ell, const std::vector<double>& p_ell);

// Inverse of theta on its image: forward-substitution on the triangular
// system; nullopt if w is not the image of a valid rule row (1e-9 clipping).
std::optional<std::vector<double>> theta_inverse(int m, int ell, const std::vector<double>& w);

// B(beta,p): interior Bernstein coefficients (degree m) of the drift
// sum_l beta_l <B_l(.), p_{.,l} - u_l>. Cross-checked internally against the
// polynomial route to 1e-12.
std::vector<double> drift_bcv(const SelectionMechanism& sd);

// Extreme directions of S_lambda: (lambda/(l-1))(theta_l(p) - u_m) over the
// deterministic rules p in {0}x{0,1}^{l-1}x{1}, l = 2..m.
struct ExtremePoint {
    int ell;
    std::vector<double> rule_row;  // deterministic order-l rule
    std::vector<double> point;     // R^{m-1}
};
std::vector<ExtremePoint> extreme_points(int m, double lambda);

// b_star for the drift with interior BCV rho: the LP
//   min sum mu_j  s.t.  sum mu_j w_j = rho, mu >= 0
// over the extreme directions of S_1.
double minimal_branching_rate(const std::vector<double>& rho);

struct MinimalDecomposition {
    double b_star = 0.0;
    SelectionMechanism sd;
    double drift_residual = 0.0;  // sup-norm of drift_bcv(sd) - rho(d)
};

// Minimal selection decomposition of d (LP route). Requires d(0)=d(1)=0.
// d == 0 yields the empty SD (beta = 0).
MinimalDecomposition minimal_sd(const Polynomial& d);

// An SD of d with prescribed effective branching rate lambda; nullopt iff
// lambda < b_star(d) (up to 1e-9).
std::optional<SelectionMechanism> decompose_with_rate(const Polynomial& d, double lambda);

// The bijection phi between lambda-convex decompositions and E^m.
std::optional<SelectionMechanism> phi(const ConvexDecomposition& c);
ConvexDecomposition phi_inverse(const SelectionMechanism& sd);  // requires b(beta) > 0

// Faces of the m=3 polygon S_1, named by their extreme-point pairs
// (v^{2,2}=(-1/3,-1/3), v^{1,2}=(1/3,1/3), v^{1,3}=(-1/6,1/6),
//  v^{2,3}=(1/3,-1/3)).
enum class FaceM3 { v22_v13, v22_v23, v12_v13, v12_v23 };
const char* to_string(FaceM3 f);

struct MinimalSdM3 {
    double b_star = 0.0;
    FaceM3 face = FaceM3::v22_v13;
    SelectionMechanism sd;
};

// Closed-form minimal decomposition for deg(d) <= 3:
//   face {v22,v13}: b_star = (3/2)(b - 3a);  face {v22,v23}: b_star = -3b;
// the two remaining faces by the symmetry (a,b) -> (-b,-a).
MinimalSdM3 minimal_sd_m3(const Polynomial& d);

// Tail-sum partial order: beta' <= beta iff sum_{j>=k} beta'_j <= sum_{j>=k} beta_j
// for every k. Inputs indexed like SelectionMechanism::beta.
bool partial_order_leq(const std::vector<double>& beta_lhs, const std::vector<double>& beta_rhs,
                       double tol = 0.0);

// (T beta)_l = sum_{k>=l} beta_k T_{k,l}; the result is always <= beta in the
// tail order (asserted).
std::vector<double> thinning_apply(const ThinningMechanism& T, const std::vector<double>& beta);

// Cascade construction of a thinning with T beta = beta'; nullopt iff the
// tail order fails.
std::optional<ThinningMechanism> thinning_construct(const std::vector<double>& beta,
                                                    const std::vector<double>& beta_prime);

// For m=3: thin an arbitrary SD of d down to a minimal one (beta of the
// result is reachable from sd.beta by a thinning mechanism).
SelectionMechanism reduce_to_minimal_m3(const SelectionMechanism& sd, const Polynomial& d);

// rho(d): interior coefficients of the degree-m Bernstein representation.
// Requires d(0)=d(1)=0 within tol.
std::vector<double> interior_bcv(const Polynomial& d, int m, double tol = 1e-10);

std::vector<double> uniform_profile(int m);  // u_m = (i/m)_{i=1}^{m-1}

}  // namespace bwf

#endif
