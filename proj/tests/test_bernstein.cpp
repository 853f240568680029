#include <cmath>
#include <random>

#include "bwf/bernstein.hpp"
#include "bwf/combinatorics.hpp"
#include "doctest.h"

using namespace bwf;

TEST_CASE("bernstein_eval pinned values") {
    CHECK(bernstein_eval(BernsteinVector({0, 1}), 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    // identity polynomial at degree 2
    CHECK(bernstein_eval(BernsteinVector({0, 0.5, 1}), 0.7) == doctest::Approx(0.7).epsilon(1e-14));
    // balancing drift x(1-x)(1-2x) vanishes at 1/2
    CHECK(bernstein_eval(BernsteinVector({0, 1.0 / 3, -1.0 / 3, 0}), 0.5) == doctest::Approx(0.0));
    CHECK_THROWS_AS(bernstein_eval(BernsteinVector({0, 1}), 1.5), std::domain_error);
}

TEST_CASE("endpoint extraction is exact") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> v(1 + gen() % 12);
        for (auto& x : v) x = u(gen);
        BernsteinVector bv(v);
        CHECK(bernstein_eval(bv, 0.0) == v.front());
        CHECK(bernstein_eval(bv, 1.0) == v.back());
    }
}

TEST_CASE("partition of unity") {
    for (int m = 1; m <= 12; ++m) {
        BernsteinVector ones(std::vector<double>(m + 1, 1.0));
        for (int g = 0; g <= 10; ++g) {
            const double x = g / 10.0;
            CHECK(std::abs(bernstein_eval(ones, x) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("monomial <-> bcv pinned values") {
    // x - 3x^2 + 2x^3 has degree-3 BCV (0, 1/3, -1/3, 0)
    BernsteinVector v = bcv_from_monomial(Polynomial({0, 1, -3, 2}), 3);
    CHECK(v.v[0] == doctest::Approx(0.0));
    CHECK(v.v[1] == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(v.v[2] == doctest::Approx(-1.0 / 3).epsilon(1e-13));
    CHECK(v.v[3] == doctest::Approx(0.0));

    // constant 1 at degree 2 -> partition of unity coefficients
    BernsteinVector c = bcv_from_monomial(Polynomial({1}), 2);
    for (double x : c.v) CHECK(x == doctest::Approx(1.0));

    // -x(1-x) at degree 2 -> (0, -1/2, 0)
    BernsteinVector g = bcv_from_monomial(Polynomial({0, -1, 1}), 2);
    CHECK(g.v[1] == doctest::Approx(-0.5));

    Polynomial back = monomial_from_bcv(BernsteinVector({0, 1.0 / 3, -1.0 / 3, 0}));
    CHECK(back.coeffs[0] == doctest::Approx(0.0));
    CHECK(back.coeffs[1] == doctest::Approx(1.0));
    CHECK(back.coeffs[2] == doctest::Approx(-3.0));
    CHECK(back.coeffs[3] == doctest::Approx(2.0));

    Polynomial id = monomial_from_bcv(BernsteinVector({0, 0.5, 1}));
    CHECK(id.coeffs[1] == doctest::Approx(1.0));
    CHECK(std::abs(id.coeffs[0]) < 1e-14);
    CHECK(std::abs(id.coeffs[2]) < 1e-14);

    CHECK_THROWS(bcv_from_monomial(Polynomial({0, 1, -3, 2}), 2));
}

TEST_CASE("round trip on random polynomials up to degree 12") {
    // The change of basis is conditioned like the binomial weights, so the
    // double-rounded intermediate limits degree 12 to ~1e-11; 1e-12 relative
    // holds through degree 9 and 1e-9 absolute everywhere.
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int rep = 0; rep < 400; ++rep) {
        const int deg = static_cast<int>(gen() % 13);
        std::vector<double> c(deg + 1);
        double norm = 0.0;
        for (auto& x : c) {
            x = u(gen);
            norm = std::max(norm, std::abs(x));
        }
        Polynomial p(c);
        Polynomial back = monomial_from_bcv(bcv_from_monomial(p, deg));
        for (int k = 0; k <= deg; ++k) {
            const double err = std::abs(back.coeffs[k] - c[k]);
            CHECK(err < 1e-9);
            if (deg <= 9) CHECK(err / norm < 1e-12);
        }
        // the polynomial as a function survives at full precision
        const BernsteinVector bv = bcv_from_monomial(p, deg);
        for (int g = 0; g <= 10; ++g) {
            const double x = g / 10.0;
            CHECK(std::abs(bernstein_eval(bv, x) - p.eval(x)) <= 1e-12 * std::max(1.0, norm * (deg + 1)));
        }
    }
}

TEST_CASE("degree elevation") {
    BernsteinVector lin({0, 1});
    BernsteinVector up = degree_elevate(lin, 2);
    CHECK(up.v[0] == doctest::Approx(0.0));
    CHECK(up.v[1] == doctest::Approx(0.5));
    CHECK(up.v[2] == doctest::Approx(1.0));

    BernsteinVector same = degree_elevate(lin, 1);
    CHECK(same.v == lin.v);

    BernsteinVector c3 = degree_elevate(BernsteinVector({1, 1}), 3);
    for (double x : c3.v) CHECK(x == doctest::Approx(1.0));

    // point values preserved on a grid
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(1 + gen() % 6);
        for (auto& x : v) x = u(gen);
        BernsteinVector bv(v);
        BernsteinVector el = degree_elevate(bv, bv.degree() + 1 + static_cast<int>(gen() % 6));
        for (int g = 0; g <= 10; ++g) {
            const double x = g / 10.0;
            CHECK(std::abs(bernstein_eval(bv, x) - bernstein_eval(el, x)) < 1e-12);
        }
    }
    CHECK_THROWS(degree_elevate(BernsteinVector({0, 1, 2}), 1));
}

TEST_CASE("hypergeometric pmf") {
    CHECK(hypergeom_pmf(4, 2, 2, 1) == doctest::Approx(2.0 / 3).epsilon(1e-13));
    CHECK(hypergeom_pmf(6, 6, 3, 3) == doctest::Approx(1.0));
    CHECK(hypergeom_pmf(2, 1, 2, 1) == doctest::Approx(1.0));
    CHECK(hypergeom_pmf(4, 2, 2, 5) == 0.0);
    CHECK(hypergeom_pmf(4, 2, 2, -1) == 0.0);
    // sums to one over the support
    for (int pop = 2; pop <= 40; pop += 7)
        for (int marked = 0; marked <= pop; marked += 3)
            for (int draws = 0; draws <= pop; draws += 5) {
                double s = 0.0;
                for (int i = 0; i <= draws; ++i) s += hypergeom_pmf(pop, marked, draws, i);
                CHECK(std::abs(s - 1.0) < 1e-12);
            }
}
