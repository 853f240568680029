#include "bwf/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace bwf {

namespace {

// Tableau with rows 0..m-1 the constraints and row m the objective.
struct Tableau {
    std::size_t m, n;               // constraints, total columns (excluding rhs)
    std::vector<std::vector<double>> t;  // (m+1) x (n+1), last column rhs
    std::vector<std::size_t> basis;      // basis[i] = column basic in row i

    void pivot(std::size_t r, std::size_t col) {
        const double piv = t[r][col];
        for (auto& v : t[r]) v /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == r) continue;
            const double f = t[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n; ++j) t[i][j] -= f * t[r][j];
        }
        basis[r] = col;
    }

    // Bland: entering = lowest eligible column, leaving = min ratio with
    // lowest basis column on ties. `allowed` masks columns that may enter.
    bool iterate(const std::vector<char>& allowed, double eps) {
        for (;;) {
            std::size_t enter = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (!allowed[j]) continue;
                if (t[m][j] < -eps) { enter = j; break; }
            }
            if (enter == n) return true;  // optimal
            std::size_t leave = m;
            double best = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (t[i][enter] <= eps) continue;
                const double ratio = t[i][n] / t[i][enter];
                if (leave == m || ratio < best - eps ||
                    (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m) return false;  // unbounded
            pivot(leave, enter);
        }
    }
};

}  // namespace

SimplexResult solve_lp_eq(std::vector<std::vector<double>> A, std::vector<double> b,
                          const std::vector<double>& c, double eps) {
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("solve_lp_eq: ragged constraint matrix");
    if (b.size() != m) throw std::invalid_argument("solve_lp_eq: rhs size mismatch");

    // Normalize to b >= 0 so the artificial basis is feasible.
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0.0) {
            for (auto& v : A[i]) v = -v;
            b[i] = -b[i];
        }
    }

    Tableau tb;
    tb.m = m;
    tb.n = n + m;  // structural + artificial
    tb.t.assign(m + 1, std::vector<double>(tb.n + 1, 0.0));
    tb.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tb.t[i][j] = A[i][j];
        tb.t[i][n + i] = 1.0;
        tb.t[i][tb.n] = b[i];
        tb.basis[i] = n + i;
    }

    // Phase 1: minimize the sum of artificials. The objective row starts as
    // -(sum of constraint rows) restricted to structural columns.
    for (std::size_t j = 0; j <= tb.n; ++j) {
        if (j >= n && j < tb.n) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += tb.t[i][j];
        tb.t[m][j] = -s;
    }
    std::vector<char> allowed(tb.n, 1);
    if (!tb.iterate(allowed, eps)) throw std::logic_error("solve_lp_eq: phase 1 unbounded");

    SimplexResult res;
    if (tb.t[m][tb.n] < -1e-7) {  // residual infeasibility (objective = -value)
        res.status = SimplexResult::Status::infeasible;
        return res;
    }

    // Drive any leftover artificial out of the basis; a row with no usable
    // structural entry is redundant and can host the artificial at zero.
    for (std::size_t i = 0; i < m; ++i) {
        if (tb.basis[i] < n) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(tb.t[i][j]) > eps) {
                tb.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2: swap in the real objective expressed over the current basis.
    for (std::size_t j = 0; j <= tb.n; ++j) tb.t[m][j] = 0.0;
    for (std::size_t j = 0; j < n; ++j) tb.t[m][j] = c[j];
    for (std::size_t i = 0; i < m; ++i) {
        if (tb.basis[i] >= n) continue;
        const double f = tb.t[m][tb.basis[i]];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j <= tb.n; ++j) tb.t[m][j] -= f * tb.t[i][j];
    }
    for (std::size_t j = n; j < tb.n; ++j) allowed[j] = 0;  // artificials stay out
    if (!tb.iterate(allowed, eps)) {
        res.status = SimplexResult::Status::unbounded;
        return res;
    }

    res.status = SimplexResult::Status::optimal;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.t[i][tb.n];
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += c[j] * res.x[j];
    res.objective = obj;
    return res;
}

}  // namespace bwf
