// Times the replicate-parallel kernels against the serial reference path.
// The two paths must agree bit for bit; the table reports the speedup.

#include <chrono>
#include <cstdio>
#include <vector>

#include "bwf/analysis.hpp"
#include "bwf/parallel.hpp"

using namespace bwf;

namespace {

SelectionMechanism genic_sd(double sigma) {
    SelectionMechanism sd = SelectionMechanism::neutral(2);
    sd.beta[2] = sigma;
    sd.rule.row(2) = {0, 0, 1};
    return sd;
}

template <class F>
double time_ms(F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

struct BenchCase {
    const char* name;
    std::size_t reps;
    double (*replicate)(std::size_t);
};

const LambdaMeasure kKingman = LambdaMeasure::kingman_unit();
const SelectionMechanism kGenic = genic_sd(1.0);

double sde_replicate(std::size_t rep) {
    RngStream rng(2024, rep);
    SdeConfig cfg{kGenic, kKingman, 1e-3};
    return sde_simulate(cfg, 0.3, 0.5, rng).x;
}

double bcp_replicate(std::size_t rep) {
    RngStream rng(2025, rep);
    const BcpResult run = simulate_bcp(CoefficientState::unit(3), kGenic, kKingman, 0.5, rng);
    return asp_eval(run.state, 0.3);
}

double moran_replicate(std::size_t rep) {
    RngStream rng(2026, rep);
    return moran_frequency_at(kGenic, kKingman, 200, 0.3, 0.5, rng);
}

}  // namespace

int main() {
    const BenchCase cases[] = {
        {"sde forward (t=0.5, dt=1e-3)", 40000, sde_replicate},
        {"bcp dual (n=3, t=0.5)", 400000, bcp_replicate},
        {"moran forward (N=200, t=0.5)", 4000, moran_replicate},
    };

    std::printf("%-34s %10s %12s %12s %9s\n", "kernel", "reps", "serial[ms]", "openmp[ms]",
                "speedup");
    for (const auto& c : cases) {
        std::vector<double> serial_out, omp_out;
        const double ts =
            time_ms([&] { parallel_map(c.reps, serial_out, c.replicate, ExecConfig::serial()); });
        const double tp = time_ms(
            [&] { parallel_map(c.reps, omp_out, c.replicate, ExecConfig{ExecMode::openmp, 0}); });
        bool identical = serial_out == omp_out;
        std::printf("%-34s %10zu %12.1f %12.1f %8.2fx %s\n", c.name, c.reps, ts, tp, ts / tp,
                    identical ? "" : "  [MISMATCH]");
        if (!identical) return 1;
    }
    std::printf("threads available: %d\n", hardware_threads());
    return 0;
}
