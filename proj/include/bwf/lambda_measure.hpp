#ifndef BWF_LAMBDA_MEASURE_HPP
#define BWF_LAMBDA_MEASURE_HPP

#include <string>
#include <utility>
#include <vector>

namespace bwf {

// Finite measure on [0,1]: a Kingman atom at 0 plus finitely many atoms in
// (0,1]. Every coalescence-side rate is a closed-form sum over the atoms.
struct LambdaMeasure {
    double kingman = 0.0;                        // mass at r = 0
    std::vector<std::pair<double, double>> atoms;  // (r, w), r strictly increasing in (0,1]

    LambdaMeasure() = default;
    LambdaMeasure(double kingman_weight, std::vector<std::pair<double, double>> atom_list);

    static LambdaMeasure kingman_unit() { return LambdaMeasure(1.0, {}); }
    static LambdaMeasure single_atom(double r, double w = 1.0) { return LambdaMeasure(0.0, {{r, w}}); }

    double total_mass() const;
    double mass_at_one() const;  // Lambda({1})

    std::string describe() const;
};

// lambda_{n,k} = Lambda({0}) 1{k=2} + sum_atoms w r^{k-2} (1-r)^{n-k}.
double lambda_rate(const LambdaMeasure& L, int n, int k);

// As above but excluding the Kingman atom (the lambda^0 of the Moran
// construction).
double lambda_rate0(const LambdaMeasure& L, int n, int k);

// sum_{k=2}^n C(n,k) lambda_{n,k}; closed form per atom.
double total_coalescence_rate(const LambdaMeasure& L, int n);

// c(Lambda) = -int log(1-r) Lambda(dr)/r^2; +infinity if the Kingman atom or
// an atom at 1 is present. Infinity is the IEEE value, never a large float.
double coalescence_impact(const LambdaMeasure& L);

// delta(n) = -n int log(1 - (nr - 1 + (1-r)^n)/n) Lambda(dr)/r^2, with the
// analytic r->0 limit n(n-1)/2 per unit mass for the Kingman atom.
double delta_n(const LambdaMeasure& L, int n);

enum class CdiVerdict { likely_cdi, likely_not, inconclusive };

struct CdiDiagnostic {
    double partial_sum = 0.0;      // f(K) = sum_{k=2}^K (k/delta(k)) log(k/(k-1))
    CdiVerdict verdict = CdiVerdict::inconclusive;
    double fitted_exponent = 0.0;  // decay exponent of the increments over the last decade
    int K = 0;
};

const char* to_string(CdiVerdict v);

// Heuristic coming-down-from-infinity check: the leaf process c.d.i. iff
// lim f(n) < infinity, decided from the increment decay over the last decade
// of K. Increments ~ 1/k^p with p > 1.1 read as convergent; p < 1.05 (the
// c/k regime included) as divergent; otherwise inconclusive.
CdiDiagnostic cdi_diagnostic(const LambdaMeasure& L, int K);

}  // namespace bwf

#endif
