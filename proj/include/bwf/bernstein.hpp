#ifndef BWF_BERNSTEIN_HPP
#define BWF_BERNSTEIN_HPP

#include <vector>

namespace bwf {

// Polynomial in the monomial basis, lowest degree first.
struct Polynomial {
    std::vector<double> coeffs;  // c_0..c_m

    Polynomial() = default;
    explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    // Degree of the polynomial ignoring trailing (near-)zero coefficients.
    int effective_degree(double tol = 0.0) const;

    double eval(double x) const;  // Horner
};

// A polynomial represented by its coefficients in the Bernstein basis of
// degree v.size()-1. <B_m(x), v> = sum_i v_i binom(m,i) x^i (1-x)^{m-i}.
struct BernsteinVector {
    std::vector<double> v;

    BernsteinVector() = default;
    explicit BernsteinVector(std::vector<double> coeffs) : v(std::move(coeffs)) {}

    int degree() const { return static_cast<int>(v.size()) - 1; }
};

// de Casteljau evaluation; exact at the endpoints (returns v_0 / v_m).
// High degrees switch to an O(m) basis recurrence (entrance-law states reach
// dimensions where the O(m^2) scheme is too slow).
double bernstein_eval(const BernsteinVector& bv, double x);

// Unique degree-m Bernstein representation of p. Requires m >= deg(p).
BernsteinVector bcv_from_monomial(const Polynomial& p, int m);

// Inverse of bcv_from_monomial at the same degree.
Polynomial monomial_from_bcv(const BernsteinVector& bv);

// Same polynomial re-expressed in the Bernstein basis of degree `target`.
BernsteinVector degree_elevate(const BernsteinVector& bv, int target);

}  // namespace bwf

#endif
