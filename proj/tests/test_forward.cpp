#include <cmath>

#include "bwf/combinatorics.hpp"
#include "bwf/forward.hpp"
#include "bwf/parallel.hpp"
#include "doctest.h"

using namespace bwf;

namespace {

const LambdaMeasure kKingman = LambdaMeasure::kingman_unit();
const LambdaMeasure kHalf = LambdaMeasure::single_atom(0.5);

SelectionMechanism genic_sd(double sigma) {
    SelectionMechanism sd = SelectionMechanism::neutral(2);
    sd.beta[2] = sigma;
    sd.rule.row(2) = {0, 0, 1};
    return sd;
}

SelectionMechanism balancing_sd() {
    SelectionMechanism sd = SelectionMechanism::neutral(3);
    sd.beta[3] = 0.5;
    sd.rule.row(3) = {0, 1, 0, 1};
    return sd;
}

}  // namespace

TEST_CASE("drift_eval pinned values") {
    const auto g = genic_sd(1.0);
    CHECK(drift_eval(g, 0.5) == doctest::Approx(-0.25));
    for (int i = 0; i <= 10; ++i) {
        const double x = i / 10.0;
        CHECK(drift_eval(g, x) == doctest::Approx(-x * (1 - x)).epsilon(1e-12));
    }
    const auto b = balancing_sd();
    CHECK(drift_eval(b, 0.25) == doctest::Approx(0.09375));
    CHECK(drift_eval(b, 0.0) == 0.0);
    CHECK(drift_eval(b, 1.0) == 0.0);
    CHECK_THROWS_AS(drift_eval(b, -0.1), std::domain_error);
}

TEST_CASE("moran measure from lambda") {
    // Kingman only: mu_N = Lambda({0}) delta_0
    const MoranMeasure muK = moran_mu_from_lambda(100, kKingman);
    CHECK(muK.weight0 == doctest::Approx(1.0));
    for (double w : muK.weights) CHECK(w == 0.0);

    // delta_1: mu_N = (1/N^2) delta_{N-1}
    const MoranMeasure mu1 = moran_mu_from_lambda(50, LambdaMeasure::single_atom(1.0));
    CHECK(mu1.weight0 == 0.0);
    for (int r = 1; r <= 48; ++r) CHECK(mu1.weights[r] == 0.0);
    CHECK(mu1.weights[49] == doctest::Approx(1.0 / 2500.0));

    // total mass M_mu converges to Lambda([0,1]); for delta_{1/2} the exact
    // defect is 3/N, so the 2% band holds from N ~ 150 up
    double prev_err = 1e9;
    for (int N : {200, 1000, 10000}) {
        const MoranMeasure mu = moran_mu_from_lambda(N, kHalf);
        const double err = std::abs(mu.total_mass() - 1.0);
        CHECK(err < 0.02);
        CHECK(err <= prev_err + 1e-12);
        prev_err = err;
    }
}

TEST_CASE("moran absorbing states") {
    MoranModel model;
    model.N = 30;
    model.rule = ColouringRule::minority(3);
    model.beta_N = {0, 0, 0.02, 0.01};
    model.mu = moran_mu_from_lambda(30, kKingman);
    RngStream rng(3, 0);
    CHECK(moran_simulate(model, 0, 500.0, rng) == 0);
    CHECK(moran_simulate(model, 30, 500.0, rng) == 30);
    CHECK_THROWS(moran_simulate(model, 31, 1.0, rng));
}

TEST_CASE("neutral moran count is a martingale") {
    MoranModel model;
    model.N = 100;
    model.rule = ColouringRule::uniform(2);
    model.beta_N = {0, 0, 0.0};
    model.mu = moran_mu_from_lambda(100, kHalf);  // multiple-merger events included
    const int k0 = 37;
    const MeanSe s = monte_carlo(10000, [&](std::size_t rep) {
        RngStream rng(11, rep);
        return static_cast<double>(moran_simulate(model, k0, 10.0, rng));
    });
    CHECK(std::abs(s.mean - k0) <= 3.0 * s.se);
}

TEST_CASE("neutral Kingman heterozygosity decay at N=500") {
    const auto neutral = SelectionMechanism::neutral(2);
    const MeanSe s = monte_carlo(3000, [&](std::size_t rep) {
        RngStream rng(13, rep);
        const double x = moran_frequency_at(neutral, kKingman, 500, 0.5, 1.0, rng);
        return x * (1.0 - x);
    });
    CHECK(std::abs(s.mean - 0.25 * std::exp(-1.0)) <= 3.0 * s.se + 1e-3);
}

TEST_CASE("moran frequency at t=0") {
    RngStream rng(17, 0);
    CHECK(moran_frequency_at(genic_sd(1.0), kKingman, 200, 0.3, 0.0, rng) ==
          doctest::Approx(60.0 / 200));
}

TEST_CASE("sde absorbing boundaries and martingale checks") {
    SdeConfig cfg{SelectionMechanism::neutral(2), kKingman, 1e-3};
    RngStream rng(19, 0);
    CHECK(sde_simulate(cfg, 0.0, 1.0, rng).x == 0.0);
    CHECK(sde_simulate(cfg, 1.0, 1.0, rng).x == 1.0);

    // neutral diffusion: E[X_t] = x0
    const MeanSe s = monte_carlo(20000, [&](std::size_t rep) {
        RngStream r(23, rep);
        return sde_simulate(cfg, 0.3, 1.0, r).x;
    });
    CHECK(std::abs(s.mean - 0.3) <= 3.0 * s.se);

    // jump part alone is mean zero: Lambda = delta_{1/2}, beta = 0
    SdeConfig jump{SelectionMechanism::neutral(2), kHalf, 1e-3};
    const MeanSe j = monte_carlo(20000, [&](std::size_t rep) {
        RngStream r(29, rep);
        return sde_simulate(jump, 0.4, 1.0, r).x;
    });
    CHECK(std::abs(j.mean - 0.4) <= 3.0 * j.se);
}

TEST_CASE("sde clamping stays rare at dt=1e-3") {
    SdeConfig cfg{genic_sd(1.0), kKingman, 1e-3};
    std::uint64_t steps = 0, clamped = 0;
    for (int rep = 0; rep < 200; ++rep) {
        RngStream rng(31, rep);
        const SdeResult r = sde_simulate(cfg, 0.5, 1.0, rng);
        steps += r.steps;
        clamped += r.clamped;
    }
    CHECK(static_cast<double>(clamped) < 0.001 * static_cast<double>(steps));
}

TEST_CASE("moran generator consistency at small N") {
    // |A^N f(k/N)/N - drift(k/N)| <= C/N for f(x) = x: the selection part of
    // the sped-up generator converges to the drift.
    const auto sd = balancing_sd();
    double c_prev = -1.0;
    for (int N : {6, 12, 24, 48, 96}) {
        double worst = 0.0;
        for (int k = 1; k < N; ++k) {
            const double x = static_cast<double>(k) / N;
            // exact E[delta k] per unit sped-up time for the selection events
            double gen = 0.0;
            for (int ell = 2; ell <= sd.m(); ++ell) {
                const double b = sd.beta_at(ell);
                if (b == 0.0) continue;
                // focal a with prob k/N; j-1 of the others hypergeometric
                double exp_delta = 0.0;
                for (int focal = 0; focal <= 1; ++focal) {
                    const double pf = focal ? x : 1.0 - x;
                    for (int oth = 0; oth <= ell - 1; ++oth) {
                        const double ph = hypergeom_pmf(N - 1, k - focal, ell - 1, oth);
                        if (ph == 0.0) continue;
                        const int j = focal + oth;
                        const double pa = sd.rule.row(ell)[j];
                        exp_delta += pf * ph * (pa - focal);
                    }
                }
                gen += b * exp_delta;  // per-individual rate beta/N * N individuals * N speedup / N jump
            }
            worst = std::max(worst, std::abs(gen - drift_eval(sd, x)));
        }
        const double c_fit = worst * N;
        if (c_prev >= 0.0) CHECK(c_fit < c_prev * 2.5 + 1.0);  // C stays bounded
        c_prev = c_fit;
    }
}
