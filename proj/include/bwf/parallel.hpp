#ifndef BWF_PARALLEL_HPP
#define BWF_PARALLEL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bwf {

// Replicate-level parallelism. Every Monte Carlo estimator in this project
// is an independent map over replicate indices, each replicate drawing from
// its own RngStream, so results are identical whether the map runs serially
// or under OpenMP, and independent of the thread count. The serial path is
// the reference implementation the OpenMP path is tested against.

enum class ExecMode { serial, openmp };

struct ExecConfig {
    ExecMode mode = ExecMode::openmp;
    int threads = 0;  // 0: library default

    static ExecConfig serial() { return {ExecMode::serial, 1}; }
};

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// out[i] = fn(i) for i in [0, n). fn must only touch replicate-local state.
template <class F>
void parallel_map(std::size_t n, std::vector<double>& out, F&& fn, const ExecConfig& cfg = {}) {
    out.resize(n);
#ifdef _OPENMP
    if (cfg.mode == ExecMode::openmp) {
        const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

// Sequential reduction regardless of how the samples were produced, so the
// summary is bit-stable across thread counts.
inline MeanSe summarize(const std::vector<double>& xs) {
    MeanSe s;
    s.n = xs.size();
    if (s.n == 0) return s;
    double acc = 0.0;
    for (double x : xs) acc += x;
    s.mean = acc / static_cast<double>(s.n);
    if (s.n < 2) return s;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - s.mean;
        ss += d * d;
    }
    s.se = std::sqrt(ss / (static_cast<double>(s.n) * (static_cast<double>(s.n) - 1.0)));
    return s;
}

template <class F>
MeanSe monte_carlo(std::size_t reps, F&& fn, const ExecConfig& cfg = {}) {
    std::vector<double> buf;
    parallel_map(reps, buf, fn, cfg);
    return summarize(buf);
}

}  // namespace bwf

#endif
