#ifndef BWF_SIMPLEX_HPP
#define BWF_SIMPLEX_HPP

#include <vector>

namespace bwf {

// Dense two-phase primal simplex for small equality-form programs:
//
//   minimize c.x   subject to   A x = b,  x >= 0.
//
// Bland's rule throughout, so the method cannot cycle. Problem sizes here
// are a handful of rows by at most a few thousand columns.
struct SimplexResult {
    enum class Status { optimal, infeasible, unbounded };
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

SimplexResult solve_lp_eq(std::vector<std::vector<double>> A, std::vector<double> b,
                          const std::vector<double>& c, double eps = 1e-11);

}  // namespace bwf

#endif
