#include "bwf/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bwf/combinatorics.hpp"
#include "bwf/simplex.hpp"

namespace bwf {

namespace {

void check_order(int m) {
    if (m < 2) throw std::invalid_argument("colouring rule needs m >= 2");
    if (m > 12) throw std::invalid_argument("m > 12 not supported (enumeration size)");
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

}  // namespace

ColouringRule ColouringRule::uniform(int m) {
    check_order(m);
    ColouringRule r;
    r.m = m;
    r.p.resize(static_cast<std::size_t>(m) + 1);
    for (int ell = 2; ell <= m; ++ell) {
        auto& row = r.row(ell);
        row.resize(static_cast<std::size_t>(ell) + 1);
        for (int i = 0; i <= ell; ++i) row[static_cast<std::size_t>(i)] = static_cast<double>(i) / ell;
    }
    return r;
}

ColouringRule ColouringRule::fittest_wins(int m) {
    ColouringRule r = uniform(m);
    for (int ell = 2; ell <= m; ++ell)
        for (int i = 0; i <= ell; ++i) r.row(ell)[static_cast<std::size_t>(i)] = (i == ell) ? 1.0 : 0.0;
    return r;
}

ColouringRule ColouringRule::minority(int m) {
    ColouringRule r = uniform(m);
    for (int ell = 2; ell <= m; ++ell)
        for (int i = 0; i <= ell; ++i) {
            double v = (i <= ell / 2) ? 1.0 : 0.0;
            if (i == 0) v = 0.0;
            if (i == ell) v = 1.0;
            r.row(ell)[static_cast<std::size_t>(i)] = v;
        }
    return r;
}

ColouringRule ColouringRule::majority(int m) {
    ColouringRule r = uniform(m);
    for (int ell = 2; ell <= m; ++ell)
        for (int i = 0; i <= ell; ++i) {
            double v = (2 * i >= ell + 1) ? 1.0 : 0.0;
            if (i == 0) v = 0.0;
            if (i == ell) v = 1.0;
            r.row(ell)[static_cast<std::size_t>(i)] = v;
        }
    return r;
}

ColouringRule ColouringRule::reversed() const {
    ColouringRule r = *this;
    for (int ell = 2; ell <= m; ++ell)
        for (int i = 0; i <= ell; ++i)
            r.row(ell)[static_cast<std::size_t>(i)] = 1.0 - row(ell)[static_cast<std::size_t>(ell - i)];
    return r;
}

void ColouringRule::validate(double tol) const {
    check_order(m);
    if (p.size() != static_cast<std::size_t>(m) + 1) throw std::invalid_argument("rule rows missing");
    for (int ell = 2; ell <= m; ++ell) {
        const auto& r = row(ell);
        if (r.size() != static_cast<std::size_t>(ell) + 1) throw std::invalid_argument("rule row size");
        if (std::abs(r.front()) > tol || std::abs(r.back() - 1.0) > tol)
            throw std::invalid_argument("rule row must have p_0=0, p_l=1");
        for (double v : r)
            if (v < -tol || v > 1.0 + tol) throw std::invalid_argument("rule entry outside [0,1]");
    }
}

double SelectionMechanism::effective_rate() const {
    double b = 0.0;
    for (int ell = 2; ell <= m(); ++ell) b += beta_at(ell) * (ell - 1);
    return b;
}

double SelectionMechanism::total_branch_rate() const {
    double b = 0.0;
    for (int ell = 2; ell <= m(); ++ell) b += beta_at(ell);
    return b;
}

SelectionMechanism SelectionMechanism::neutral(int m) {
    SelectionMechanism sd;
    sd.rule = ColouringRule::uniform(m);
    sd.beta.assign(static_cast<std::size_t>(m) + 1, 0.0);
    return sd;
}

void SelectionMechanism::validate(double tol) const {
    rule.validate(tol);
    if (beta.size() != static_cast<std::size_t>(m()) + 1)
        throw std::invalid_argument("beta size must be m+1");
    for (int ell = 2; ell <= m(); ++ell)
        if (beta_at(ell) < -tol) throw std::invalid_argument("negative branching rate");
}

ThinningMechanism ThinningMechanism::identity(int m) {
    ThinningMechanism T;
    T.m = m;
    T.t.assign(static_cast<std::size_t>(m) + 1, std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
    for (int k = 1; k <= m; ++k) T.t[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1.0;
    return T;
}

void ThinningMechanism::validate(double tol) const {
    for (int k = 1; k <= m; ++k) {
        double s = 0.0;
        for (int i = 1; i <= m; ++i) {
            const double v = t[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            if (i > k && std::abs(v) > tol) throw std::invalid_argument("thinning not lower-triangular");
            if (v < -tol) throw std::invalid_argument("thinning entry negative");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("thinning row does not sum to 1");
    }
}

std::vector<double> uniform_profile(int m) {
    std::vector<double> u(static_cast<std::size_t>(m) - 1);
    for (int i = 1; i < m; ++i) u[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) / m;
    return u;
}

std::vector<double> theta(int m, int ell, const std::vector<double>& p_ell) {
    check_order(m);
    if (ell < 2 || ell > m) throw std::invalid_argument("theta: ell outside [2,m]");
    if (p_ell.size() != static_cast<std::size_t>(ell) + 1) throw std::invalid_argument("theta: row size");
    std::vector<double> w(static_cast<std::size_t>(m) - 1, 0.0);
    for (int i = 1; i < m; ++i) {
        double acc = 0.0;
        for (int j = std::max(0, i - (m - ell)); j <= std::min(ell, i); ++j)
            acc += hypergeom_pmf(m, ell, i, j) * p_ell[static_cast<std::size_t>(j)];
        w[static_cast<std::size_t>(i - 1)] = acc;
    }
    return w;
}

std::optional<std::vector<double>> theta_inverse(int m, int ell, const std::vector<double>& w) {
    check_order(m);
    if (ell < 2 || ell > m) throw std::invalid_argument("theta_inverse: ell outside [2,m]");
    if (w.size() != static_cast<std::size_t>(m) - 1) throw std::invalid_argument("theta_inverse: w size");
    const double clip = 1e-9;

    std::vector<double> p(static_cast<std::size_t>(ell) + 1, 0.0);
    p.back() = 1.0;
    // Rows i = 1..ell-1 are triangular in p_1..p_{ell-1}: the diagonal weight
    // is P(K = i) = C(ell,i)/C(m,i) > 0.
    for (int i = 1; i < ell; ++i) {
        double acc = w[static_cast<std::size_t>(i - 1)];
        for (int j = std::max(0, i - (m - ell)); j < i; ++j)
            acc -= hypergeom_pmf(m, ell, i, j) * p[static_cast<std::size_t>(j)];
        const double diag = hypergeom_pmf(m, ell, i, i);
        double pi = acc / diag;
        if (pi < -clip || pi > 1.0 + clip) return std::nullopt;
        p[static_cast<std::size_t>(i)] = std::clamp(pi, 0.0, 1.0);
    }
    // The remaining rows must be consistent, otherwise w is outside the image.
    const std::vector<double> back = theta(m, ell, p);
    for (std::size_t i = 0; i < back.size(); ++i)
        if (std::abs(back[i] - w[i]) > 1e-9) return std::nullopt;
    return p;
}

std::vector<double> drift_bcv(const SelectionMechanism& sd) {
    const int m = sd.m();
    const std::vector<double> u = uniform_profile(m);
    std::vector<double> out(static_cast<std::size_t>(m) - 1, 0.0);
    for (int ell = 2; ell <= m; ++ell) {
        const double b = sd.beta_at(ell);
        if (b == 0.0) continue;
        const std::vector<double> th = theta(m, ell, sd.rule.row(ell));
        for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(m); ++i)
            out[i] += b * (th[i] - u[i]);
    }

    // Cross-check through the polynomial route: assemble the drift in the
    // monomial basis and re-read its degree-m Bernstein coefficients.
    Polynomial drift(std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
    for (int ell = 2; ell <= m; ++ell) {
        const double b = sd.beta_at(ell);
        if (b == 0.0) continue;
        std::vector<double> diff(sd.rule.row(ell));
        for (int i = 0; i <= ell; ++i) diff[static_cast<std::size_t>(i)] -= static_cast<double>(i) / ell;
        const Polynomial part = monomial_from_bcv(BernsteinVector(std::move(diff)));
        for (std::size_t k = 0; k < part.coeffs.size(); ++k) drift.coeffs[k] += b * part.coeffs[k];
    }
    const BernsteinVector check = bcv_from_monomial(drift, m);
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(m); ++i)
        if (std::abs(check.v[i + 1] - out[i]) > 1e-12 * std::max(1.0, std::abs(out[i])) + 1e-12)
            throw std::logic_error("drift_bcv: hypergeometric and polynomial routes disagree");
    return out;
}

std::vector<ExtremePoint> extreme_points(int m, double lambda) {
    check_order(m);
    const std::vector<double> u = uniform_profile(m);
    std::vector<ExtremePoint> pts;
    for (int ell = 2; ell <= m; ++ell) {
        const int interior = ell - 1;
        for (unsigned code = 0; code < (1u << interior); ++code) {
            ExtremePoint ep;
            ep.ell = ell;
            ep.rule_row.assign(static_cast<std::size_t>(ell) + 1, 0.0);
            ep.rule_row.back() = 1.0;
            for (int j = 1; j < ell; ++j)
                ep.rule_row[static_cast<std::size_t>(j)] = (code >> (j - 1)) & 1u ? 1.0 : 0.0;
            ep.point = theta(m, ell, ep.rule_row);
            for (std::size_t i = 0; i < ep.point.size(); ++i)
                ep.point[i] = lambda * (ep.point[i] - u[i]) / (ell - 1);
            pts.push_back(std::move(ep));
        }
    }
    return pts;
}

namespace {

// Shared LP assembly: columns are the S_1 extreme directions, optionally an
// extra normalization row sum(mu) = lambda.
struct GeometryLp {
    std::vector<ExtremePoint> pts;
    SimplexResult result;
};

GeometryLp solve_geometry_lp(const std::vector<double>& rho, std::optional<double> fixed_total) {
    const int m = static_cast<int>(rho.size()) + 1;
    check_order(m);
    GeometryLp g;
    g.pts = extreme_points(m, 1.0);
    const std::size_t rows = rho.size() + (fixed_total ? 1 : 0);
    const std::size_t cols = g.pts.size();
    std::vector<std::vector<double>> A(rows, std::vector<double>(cols, 0.0));
    std::vector<double> b(rows, 0.0);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rho.size(); ++i) A[i][j] = g.pts[j].point[i];
    for (std::size_t i = 0; i < rho.size(); ++i) b[i] = rho[i];
    std::vector<double> c(cols, fixed_total ? 0.0 : 1.0);
    if (fixed_total) {
        for (std::size_t j = 0; j < cols; ++j) A[rows - 1][j] = 1.0;
        b[rows - 1] = *fixed_total;
    }
    g.result = solve_lp_eq(std::move(A), std::move(b), c);
    return g;
}

// Turn nonnegative LP weights on extreme directions into an SD: group by
// order, mix the deterministic rules convexly (B is affine in p), and set
// beta_l = m_l/(l-1). Orders with no weight keep the uniform rule.
SelectionMechanism sd_from_weights(int m, const std::vector<ExtremePoint>& pts,
                                   const std::vector<double>& mu) {
    SelectionMechanism sd = SelectionMechanism::neutral(m);
    std::vector<double> group(static_cast<std::size_t>(m) + 1, 0.0);
    for (std::size_t j = 0; j < pts.size(); ++j) group[static_cast<std::size_t>(pts[j].ell)] += mu[j];
    for (int ell = 2; ell <= m; ++ell) {
        const double mass = group[static_cast<std::size_t>(ell)];
        if (mass <= 1e-13) continue;
        sd.beta[static_cast<std::size_t>(ell)] = mass / (ell - 1);
        std::vector<double> mix(static_cast<std::size_t>(ell) + 1, 0.0);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (pts[j].ell != ell || mu[j] == 0.0) continue;
            for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += (mu[j] / mass) * pts[j].rule_row[i];
        }
        mix.front() = 0.0;
        mix.back() = 1.0;
        sd.rule.row(ell) = std::move(mix);
    }
    return sd;
}

}  // namespace

double minimal_branching_rate(const std::vector<double>& rho) {
    bool zero = true;
    for (double r : rho)
        if (r != 0.0) zero = false;
    if (zero) return 0.0;
    GeometryLp g = solve_geometry_lp(rho, std::nullopt);
    if (g.result.status != SimplexResult::Status::optimal)
        throw std::logic_error("minimal_branching_rate: LP not optimal (cannot happen for valid rho)");
    return g.result.objective;
}

std::vector<double> interior_bcv(const Polynomial& d, int m, double tol) {
    if (std::abs(d.eval(0.0)) > tol || std::abs(d.eval(1.0)) > tol)
        throw std::invalid_argument("drift polynomial must vanish at 0 and 1");
    Polynomial p = d;
    if (p.degree() > m) {  // tolerate explicit trailing zeros
        for (int k = p.degree(); k > m; --k) {
            if (std::abs(p.coeffs[static_cast<std::size_t>(k)]) > tol)
                throw std::invalid_argument("interior_bcv: polynomial degree exceeds m");
            p.coeffs.pop_back();
        }
    }
    const BernsteinVector bv = bcv_from_monomial(p, m);
    return std::vector<double>(bv.v.begin() + 1, bv.v.end() - 1);
}

namespace {

int drift_order(const Polynomial& d) {
    double scale = 0.0;
    for (double c : d.coeffs) scale = std::max(scale, std::abs(c));
    const int deg = d.effective_degree(1e-12 * std::max(1.0, scale));
    return std::max(2, deg);
}

}  // namespace

MinimalDecomposition minimal_sd(const Polynomial& d) {
    MinimalDecomposition out;
    const int m = drift_order(d);
    if (m > 12) throw std::invalid_argument("minimal_sd: deg(d) > 12");
    const std::vector<double> rho = interior_bcv(d, m);

    bool zero = true;
    for (double r : rho)
        if (std::abs(r) > 1e-13) zero = false;
    if (zero) {
        // d == 0: the empty SD; every simulator accepts it as neutral.
        out.sd = SelectionMechanism::neutral(m);
        return out;
    }

    GeometryLp g = solve_geometry_lp(rho, std::nullopt);
    if (g.result.status != SimplexResult::Status::optimal)
        throw std::logic_error("minimal_sd: LP failed");
    out.b_star = g.result.objective;
    out.sd = sd_from_weights(m, g.pts, g.result.x);
    out.drift_residual = sup_diff(drift_bcv(out.sd), rho);
    if (out.drift_residual > 1e-9)
        throw std::logic_error("minimal_sd: drift round trip failed");
    if (std::abs(out.sd.effective_rate() - out.b_star) > 1e-9)
        throw std::logic_error("minimal_sd: effective rate does not meet the LP optimum");
    return out;
}

std::optional<SelectionMechanism> decompose_with_rate(const Polynomial& d, double lambda) {
    const int m = drift_order(d);
    if (m > 12) throw std::invalid_argument("decompose_with_rate: deg(d) > 12");
    if (lambda <= 0.0) return std::nullopt;
    const std::vector<double> rho = interior_bcv(d, m);
    GeometryLp g = solve_geometry_lp(rho, lambda);
    if (g.result.status != SimplexResult::Status::optimal) return std::nullopt;
    SelectionMechanism sd = sd_from_weights(m, g.pts, g.result.x);
    if (sup_diff(drift_bcv(sd), rho) > 1e-9)
        throw std::logic_error("decompose_with_rate: drift round trip failed");
    return sd;
}

std::optional<SelectionMechanism> phi(const ConvexDecomposition& c) {
    const int m = c.m();
    check_order(m);
    if (c.lambda <= 0.0) throw std::invalid_argument("phi: lambda must be positive");
    SelectionMechanism sd = SelectionMechanism::neutral(m);
    const std::vector<double> u = uniform_profile(m);
    for (int ell = 2; ell <= m; ++ell) {
        sd.beta[static_cast<std::size_t>(ell)] = c.lambda * c.alpha[static_cast<std::size_t>(ell)] / (ell - 1);
        std::vector<double> w(u);
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] += (ell - 1) * c.v[static_cast<std::size_t>(ell)][i] / c.lambda;
        auto row = theta_inverse(m, ell, w);
        if (!row) return std::nullopt;
        sd.rule.row(ell) = std::move(*row);
    }
    return sd;
}

ConvexDecomposition phi_inverse(const SelectionMechanism& sd) {
    const int m = sd.m();
    const double lambda = sd.effective_rate();
    if (lambda <= 0.0) throw std::invalid_argument("phi_inverse: requires b(beta) > 0");
    ConvexDecomposition c;
    c.lambda = lambda;
    c.alpha.assign(static_cast<std::size_t>(m) + 1, 0.0);
    c.v.assign(static_cast<std::size_t>(m) + 1, std::vector<double>(static_cast<std::size_t>(m) - 1, 0.0));
    const std::vector<double> u = uniform_profile(m);
    for (int ell = 2; ell <= m; ++ell) {
        c.alpha[static_cast<std::size_t>(ell)] = sd.beta_at(ell) * (ell - 1) / lambda;
        const std::vector<double> th = theta(m, ell, sd.rule.row(ell));
        for (std::size_t i = 0; i < th.size(); ++i)
            c.v[static_cast<std::size_t>(ell)][i] = lambda * (th[i] - u[i]) / (ell - 1);
    }
    return c;
}

const char* to_string(FaceM3 f) {
    switch (f) {
        case FaceM3::v22_v13: return "v22-v13";
        case FaceM3::v22_v23: return "v22-v23";
        case FaceM3::v12_v13: return "v12-v13";
        default: return "v12-v23";
    }
}

namespace {

SelectionMechanism make_m3_sd(double b_star, double alpha2, const std::vector<double>& p2,
                              const std::vector<double>& p3) {
    SelectionMechanism sd = SelectionMechanism::neutral(3);
    alpha2 = std::clamp(alpha2, 0.0, 1.0);
    sd.beta[2] = b_star * alpha2;
    sd.beta[3] = b_star * (1.0 - alpha2) / 2.0;
    sd.rule.row(2) = p2;
    sd.rule.row(3) = p3;
    return sd;
}

}  // namespace

MinimalSdM3 minimal_sd_m3(const Polynomial& d) {
    const int m = drift_order(d);
    if (m != 2 && m != 3) throw std::invalid_argument("minimal_sd_m3: deg(d) must be 2 or 3");
    const std::vector<double> rho = interior_bcv(d, 3);
    const double a = rho[0], b = rho[1];
    if (a == 0.0 && b == 0.0) throw std::invalid_argument("minimal_sd_m3: rho(d) = 0");

    MinimalSdM3 out;
    const double eps = 1e-12;

    // Ray {s(a,b) : s>0} against the four supporting lines; a hit must land
    // inside the face segment. Shared vertices satisfy both adjacent
    // formulas, so the first match wins.
    // west {v22,v13}: y - 3x = 2/3
    if (b - 3.0 * a > eps) {
        const double s = 2.0 / (3.0 * (b - 3.0 * a));
        const double hx = s * a, hy = s * b;
        if (hx >= -1.0 / 3.0 - 1e-9 && hx <= -1.0 / 6.0 + 1e-9 && hy >= -1.0 / 3.0 - 1e-9 &&
            hy <= 1.0 / 6.0 + 1e-9) {
            out.face = FaceM3::v22_v13;
            out.b_star = 1.5 * (b - 3.0 * a);
            const double alpha2 = (a + b) / (3.0 * a - b);
            out.sd = make_m3_sd(out.b_star, alpha2, {0, 0, 1}, {0, 0, 1, 1});
            return out;
        }
    }
    // bottom {v22,v23}: y = -1/3
    if (b < -eps) {
        const double s = -1.0 / (3.0 * b);
        const double hx = s * a;
        if (hx >= -1.0 / 3.0 - 1e-9 && hx <= 1.0 / 3.0 + 1e-9) {
            out.face = FaceM3::v22_v23;
            out.b_star = -3.0 * b;
            const double alpha2 = (a + b) / (2.0 * b);
            out.sd = make_m3_sd(out.b_star, alpha2, {0, 0, 1}, {0, 1, 0, 1});
            return out;
        }
    }
    // north {v12,v13}: 3y - x = 2/3 (image of west under (a,b)->(-b,-a))
    if (3.0 * b - a > eps) {
        const double s = 2.0 / (3.0 * (3.0 * b - a));
        const double hx = s * a, hy = s * b;
        if (hx >= -1.0 / 6.0 - 1e-9 && hx <= 1.0 / 3.0 + 1e-9 && hy >= 1.0 / 6.0 - 1e-9 &&
            hy <= 1.0 / 3.0 + 1e-9) {
            out.face = FaceM3::v12_v13;
            out.b_star = 1.5 * (3.0 * b - a);
            const double alpha2 = (a + b) / (3.0 * b - a);
            out.sd = make_m3_sd(out.b_star, alpha2, {0, 1, 1}, {0, 0, 1, 1});
            return out;
        }
    }
    // east {v12,v23}: x = 1/3 (image of bottom)
    if (a > eps) {
        const double s = 1.0 / (3.0 * a);
        const double hy = s * b;
        if (hy >= -1.0 / 3.0 - 1e-9 && hy <= 1.0 / 3.0 + 1e-9) {
            out.face = FaceM3::v12_v23;
            out.b_star = 3.0 * a;
            const double alpha2 = (a + b) / (2.0 * a);
            out.sd = make_m3_sd(out.b_star, alpha2, {0, 1, 1}, {0, 1, 0, 1});
            return out;
        }
    }
    throw std::logic_error("minimal_sd_m3: ray missed every face");
}

bool partial_order_leq(const std::vector<double>& beta_lhs, const std::vector<double>& beta_rhs,
                       double tol) {
    if (beta_lhs.size() != beta_rhs.size())
        throw std::invalid_argument("partial_order_leq: mismatched m");
    double tl = 0.0, tr = 0.0;
    for (std::size_t k = beta_lhs.size(); k-- > 2;) {
        tl += beta_lhs[k];
        tr += beta_rhs[k];
        if (tl > tr + tol) return false;
    }
    return true;
}

std::vector<double> thinning_apply(const ThinningMechanism& T, const std::vector<double>& beta) {
    const int m = T.m;
    if (beta.size() != static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("thinning_apply: beta size");
    std::vector<double> out(beta.size(), 0.0);
    for (int ell = 2; ell <= m; ++ell) {
        double acc = 0.0;
        for (int k = ell; k <= m; ++k)
            acc += beta[static_cast<std::size_t>(k)] * T.t[static_cast<std::size_t>(k)][static_cast<std::size_t>(ell)];
        out[static_cast<std::size_t>(ell)] = acc;
    }
    if (!partial_order_leq(out, beta, 1e-9))
        throw std::logic_error("thinning_apply: T beta not below beta in tail order");
    return out;
}

std::optional<ThinningMechanism> thinning_construct(const std::vector<double>& beta,
                                                    const std::vector<double>& beta_prime) {
    if (beta.size() != beta_prime.size())
        throw std::invalid_argument("thinning_construct: mismatched m");
    const int m = static_cast<int>(beta.size()) - 1;
    if (!partial_order_leq(beta_prime, beta, 1e-9)) return std::nullopt;

    ThinningMechanism total = ThinningMechanism::identity(m);
    std::vector<double> work = beta;

    auto compose = [&](const ThinningMechanism& step) {
        // Action is beta -> beta * T (row vector times matrix), applied left
        // to right, so the composite is total * step.
        ThinningMechanism next = ThinningMechanism::identity(m);
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j) {
                double acc = 0.0;
                for (int k = 1; k <= m; ++k)
                    acc += total.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                           step.t[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                next.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
            }
        total = next;
    };

    for (int k = m; k >= 2; --k) {
        const double bk = work[static_cast<std::size_t>(k)];
        const double target = beta_prime[static_cast<std::size_t>(k)];
        ThinningMechanism step = ThinningMechanism::identity(m);
        auto& row = step.t[static_cast<std::size_t>(k)];
        row.assign(static_cast<std::size_t>(m) + 1, 0.0);
        // T_{k,k} = beta'_k / beta_k; leftover flows to k-1 up to its target
        // and the rest to k-2 (destroyed when k-2 < 2).
        const double tkk = bk > 1e-15 ? std::clamp(target / bk, 0.0, 1.0) : 1.0;
        const double rem = 1.0 - tkk;
        row[static_cast<std::size_t>(k)] = tkk;
        if (k == 2) {
            row[1] = rem;
        } else {
            const double denom = bk - target;
            const double next_target = beta_prime[static_cast<std::size_t>(k - 1)];
            const double s = denom > 1e-15 ? std::min(next_target / denom, 1.0) : 1.0;
            row[static_cast<std::size_t>(k - 1)] = rem * s;
            const int drop = std::max(k - 2, 1);
            row[static_cast<std::size_t>(drop)] += rem * (1.0 - s);
        }
        work[static_cast<std::size_t>(k)] = bk * tkk;
        if (k > 2) {
            work[static_cast<std::size_t>(k - 1)] += bk * row[static_cast<std::size_t>(k - 1)];
            if (k - 2 >= 2) work[static_cast<std::size_t>(k - 2)] += bk * row[static_cast<std::size_t>(k - 2)];
        }
        compose(step);
    }

    // The cascade lands exactly on beta_prime when the order holds.
    const std::vector<double> reached = thinning_apply(total, beta);
    for (std::size_t i = 2; i < reached.size(); ++i)
        if (std::abs(reached[i] - beta_prime[i]) > 1e-9)
            throw std::logic_error("thinning_construct: cascade missed the target rates");
    return total;
}

SelectionMechanism reduce_to_minimal_m3(const SelectionMechanism& sd, const Polynomial& d) {
    if (sd.m() != 3) throw std::invalid_argument("reduce_to_minimal_m3: sd must have m = 3");
    const std::vector<double> rho = interior_bcv(d, 3);
    if (sup_diff(drift_bcv(sd), rho) > 1e-9)
        throw std::invalid_argument("reduce_to_minimal_m3: sd is not an SD of d");

    const MinimalSdM3 closed = minimal_sd_m3(d);
    if (std::abs(sd.effective_rate() - closed.b_star) <= 1e-9) return sd;  // already minimal

    const double b_star = closed.b_star;
    const double t3_cap = sd.beta_at(3);                   // beta'_3 <= beta_3
    const double t2_cap = sd.beta_at(2) + sd.beta_at(3);   // beta'_2 + beta'_3 <= ...

    if (closed.face == FaceM3::v22_v13 || closed.face == FaceM3::v12_v13) {
        // Unique minimal SD on these faces; it is reachable by thinning from
        // any SD of d.
        if (!partial_order_leq(closed.sd.beta, sd.beta, 1e-9))
            throw std::logic_error("reduce_to_minimal_m3: unique minimal SD not below input");
        return closed.sd;
    }

    // One-parameter family on the OD faces: v3 = (x0, -1/3) scaled, with
    // alpha_3(x0) = (b-a)/(b(1+3x0)) on the bottom face (east by symmetry).
    double a = rho[0], b = rho[1];
    const bool east = closed.face == FaceM3::v12_v23;
    if (east) {
        const double na = -b, nb = -a;
        a = na;
        b = nb;
    }
    const double x_lo = std::max(-1.0 / 6.0, -a / (3.0 * b));  // b < 0 on this face
    auto alpha3_of = [&](double x0) { return (b - a) / (b * (1.0 + 3.0 * x0)); };
    const double a3_min = alpha3_of(1.0 / 3.0);  // alpha_3 decreasing in x0
    const double a3_max = alpha3_of(x_lo);
    // Tail constraints on alpha_3: b* alpha_3/2 <= t3_cap and
    // b*(1 - alpha_3/2) <= t2_cap.
    const double lo = std::max(a3_min, 2.0 * (1.0 - t2_cap / b_star));
    const double hi = std::min(a3_max, 2.0 * t3_cap / b_star);
    if (lo > hi + 1e-9) throw std::logic_error("reduce_to_minimal_m3: no minimal SD below input");
    const double alpha3 = std::clamp(std::min(std::max(a3_min, lo), hi), 0.0, 1.0);
    const double x0 = ((b - a) / (b * alpha3) - 1.0) / 3.0;

    std::vector<double> p2{0, 0, 1};
    std::vector<double> p3{0, std::clamp(2.0 * x0 + 1.0 / 3.0, 0.0, 1.0), 0, 1};
    if (east) {
        // reverse the rules for the mirrored drift
        p2 = {0, 1, 1};
        p3 = {0, 1, std::clamp(2.0 / 3.0 - 2.0 * x0, 0.0, 1.0), 1};
    }
    SelectionMechanism out = make_m3_sd(b_star, 1.0 - alpha3, p2, p3);
    if (sup_diff(drift_bcv(out), rho) > 1e-9)
        throw std::logic_error("reduce_to_minimal_m3: drift round trip failed");
    if (!partial_order_leq(out.beta, sd.beta, 1e-9))
        throw std::logic_error("reduce_to_minimal_m3: result not a thinning of the input");
    return out;
}

}  // namespace bwf
