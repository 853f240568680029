#include "bwf/ancestral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bwf/bernstein.hpp"
#include "bwf/combinatorics.hpp"

namespace bwf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Total branch rate per particle and a sampler for the branching order.
struct BranchKernel {
    std::vector<double> beta;  // indexed by ell
    double per_particle = 0.0;

    explicit BranchKernel(const std::vector<double>& b) : beta(b) {
        for (std::size_t ell = 2; ell < beta.size(); ++ell) {
            if (beta[ell] < 0.0) throw std::invalid_argument("negative branching rate");
            per_particle += beta[ell];
        }
    }

    int sample_order(RngStream& rng) const {
        double u = rng.uniform() * per_particle;
        for (std::size_t ell = 2; ell < beta.size(); ++ell) {
            u -= beta[ell];
            if (u <= 0.0) return static_cast<int>(ell);
        }
        return static_cast<int>(beta.size()) - 1;
    }
};

// Coalescence rates at count n, split by component so the merger size can be
// sampled exactly: the Kingman part is a pair merger, an atom at r draws
// k ~ Binomial(n, r) conditioned on k >= 2.
struct CoalescenceDraw {
    double total;
    std::vector<double> atom_rate;  // aligned with L.atoms
    double kingman_rate;
};

CoalescenceDraw coalescence_rates(const LambdaMeasure& L, int n) {
    CoalescenceDraw cd;
    cd.kingman_rate = L.kingman * choose(n, 2);
    cd.total = cd.kingman_rate;
    cd.atom_rate.resize(L.atoms.size());
    for (std::size_t a = 0; a < L.atoms.size(); ++a) {
        const auto& [r, w] = L.atoms[a];
        const double q = 1.0 - r;
        const double rate = w * (1.0 - std::pow(q, n) - n * r * std::pow(q, n - 1)) / (r * r);
        cd.atom_rate[a] = std::max(rate, 0.0);
        cd.total += cd.atom_rate[a];
    }
    return cd;
}

int sample_conditioned_binomial(int n, double r, RngStream& rng) {
    // k ~ Bin(n,r) conditioned on k >= 2.
    const double q = 1.0 - r;
    const double accept = 1.0 - std::pow(q, n) - n * r * std::pow(q, n - 1);
    if (accept > 0.05) {
        for (int tries = 0; tries < 10000; ++tries) {
            const int k = rng.binomial(n, r);
            if (k >= 2) return k;
        }
    }
    // Tiny acceptance: inverse CDF over the conditioned pmf via the ratio
    // recurrence p_{k+1}/p_k = r (n-k) / (q (k+1)).
    double pk = choose(n, 2) * r * r * std::pow(q, n - 2);  // k = 2
    double u = rng.uniform() * accept;
    int k = 2;
    while (k < n && u > pk) {
        u -= pk;
        pk *= r * (n - k) / (q * (k + 1));
        ++k;
    }
    return k;
}

int sample_merger_size(const LambdaMeasure& L, int n, const CoalescenceDraw& cd, RngStream& rng) {
    double u = rng.uniform() * cd.total;
    if (u < cd.kingman_rate) return 2;
    u -= cd.kingman_rate;
    for (std::size_t a = 0; a < L.atoms.size(); ++a) {
        if (u < cd.atom_rate[a]) return sample_conditioned_binomial(n, L.atoms[a].first, rng);
        u -= cd.atom_rate[a];
    }
    return 2;
}

}  // namespace

int LeafPath::final_count() const {
    int c = initial;
    for (const auto& e : events) c += (e.kind == LeafEvent::Kind::branch) ? e.param - 1 : -(e.param - 1);
    return c;
}

int LeafPath::count_at(double t) const {
    int c = initial;
    for (const auto& e : events) {
        if (e.time > t) break;
        c += (e.kind == LeafEvent::Kind::branch) ? e.param - 1 : -(e.param - 1);
    }
    return c;
}

LeafPath simulate_leaf_path(int n, const std::vector<double>& beta, const LambdaMeasure& L,
                            double horizon, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("simulate_leaf_path: n >= 1");
    if (horizon < 0.0) throw std::invalid_argument("simulate_leaf_path: negative horizon");
    const BranchKernel bk(beta);
    LeafPath path;
    path.initial = n;
    double t = 0.0;
    int count = n;
    for (;;) {
        const double branch_rate = count * bk.per_particle;
        const CoalescenceDraw cd = count >= 2 ? coalescence_rates(L, count)
                                              : CoalescenceDraw{0.0, {}, 0.0};
        const double total = branch_rate + cd.total;
        if (total <= 0.0) break;
        t += rng.exponential(total);
        if (t >= horizon) break;
        if (rng.uniform() * total < branch_rate) {
            const int ell = bk.sample_order(rng);
            path.events.push_back({t, LeafEvent::Kind::branch, ell});
            count += ell - 1;
        } else {
            const int k = sample_merger_size(L, count, cd, rng);
            path.events.push_back({t, LeafEvent::Kind::coalesce, k});
            count -= k - 1;
        }
    }
    return path;
}

CoefficientState CoefficientState::unit(int n) {
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    v.back() = 1.0;
    return CoefficientState(std::move(v));
}

CoefficientState apply_selection(const CoefficientState& state, int ell, const ColouringRule& rule) {
    const int n = state.leaf_count();
    if (n < 1) throw std::invalid_argument("apply_selection: leaf count must be >= 1");
    if (ell < 2 || ell > rule.m) throw std::invalid_argument("apply_selection: ell outside [2,m]");
    const auto& p = rule.row(ell);
    const int pop = n + ell - 1;
    std::vector<double> out(static_cast<std::size_t>(n + ell), 0.0);
    for (int i = 0; i <= pop; ++i) {
        double acc = 0.0;
        const int j_lo = std::max(0, i - n + 1);
        const int j_hi = std::min(ell, i);
        for (int j = j_lo; j <= j_hi; ++j) {
            const double w = hypergeom_pmf(pop, i, ell, j);
            if (w == 0.0) continue;
            const double pj = p[static_cast<std::size_t>(j)];
            acc += w * (pj * state.v[static_cast<std::size_t>(i + 1 - j)] +
                        (1.0 - pj) * state.v[static_cast<std::size_t>(i - j)]);
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return CoefficientState(std::move(out));
}

CoefficientState apply_coagulation(const CoefficientState& state, int k) {
    const int n = state.leaf_count();
    if (k < 2 || k > n) throw std::invalid_argument("apply_coagulation: k outside [2,n]");
    const int dim = n - k + 1;  // top index of the output
    std::vector<double> out(static_cast<std::size_t>(dim) + 1, 0.0);
    for (int i = 0; i <= dim; ++i) {
        const double f = static_cast<double>(i) / dim;
        out[static_cast<std::size_t>(i)] =
            f * state.v[static_cast<std::size_t>(i + k - 1)] + (1.0 - f) * state.v[static_cast<std::size_t>(i)];
    }
    return CoefficientState(std::move(out));
}

CoefficientState apply_leaf_path(const CoefficientState& v0, const LeafPath& path,
                                 const ColouringRule& rule) {
    CoefficientState v = v0;
    for (const auto& e : path.events)
        v = (e.kind == LeafEvent::Kind::branch) ? apply_selection(v, e.param, rule)
                                                : apply_coagulation(v, e.param);
    return v;
}

BcpResult simulate_bcp(const CoefficientState& v0, const SelectionMechanism& sd,
                       const LambdaMeasure& L, double horizon, RngStream& rng) {
    BcpResult out;
    out.path = simulate_leaf_path(v0.leaf_count(), sd.beta, L, horizon, rng);
    out.state = apply_leaf_path(v0, out.path, sd.rule);
    return out;
}

double asp_eval(const CoefficientState& state, double x) {
    return bernstein_eval(BernsteinVector(state.v), x);
}

std::vector<int> AsgGraph::leaf_counts() const {
    std::vector<int> c;
    int cur = n_roots;
    for (const auto& e : events) {
        cur += e.is_branch ? static_cast<int>(e.participants.size())
                           : -static_cast<int>(e.participants.size()) + 1;
        c.push_back(cur);
    }
    return c;
}

AsgGraph simulate_asg_graph(int n, const std::vector<double>& beta, const LambdaMeasure& L,
                            double horizon, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("simulate_asg_graph: n >= 1");
    const BranchKernel bk(beta);
    AsgGraph g;
    g.n_roots = n;
    g.horizon = horizon;
    g.particles.resize(static_cast<std::size_t>(n));
    std::vector<int> live(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) live[static_cast<std::size_t>(i)] = i;

    double t = 0.0;
    for (;;) {
        const int count = static_cast<int>(live.size());
        if (count > kAsgParticleGuard)
            throw std::runtime_error("simulate_asg_graph: live particle count exceeded guard");
        const double branch_rate = count * bk.per_particle;
        const CoalescenceDraw cd = count >= 2 ? coalescence_rates(L, count)
                                              : CoalescenceDraw{0.0, {}, 0.0};
        const double total = branch_rate + cd.total;
        if (total <= 0.0) break;
        t += rng.exponential(total);
        if (t >= horizon) break;
        AsgEvent ev;
        ev.time = t;
        if (rng.uniform() * total < branch_rate) {
            const int ell = bk.sample_order(rng);
            ev.is_branch = true;
            ev.marked = live[rng.below(live.size())];
            for (int c = 0; c < ell - 1; ++c) {
                const int id = static_cast<int>(g.particles.size());
                g.particles.push_back({t, -1.0});
                ev.participants.push_back(id);
                live.push_back(id);
            }
        } else {
            const int k = sample_merger_size(L, count, cd, rng);
            ev.is_branch = false;
            // choose k victims uniformly without replacement
            for (int c = 0; c < k; ++c) {
                const std::size_t pick = rng.below(live.size());
                ev.participants.push_back(live[pick]);
                live[pick] = live.back();
                live.pop_back();
            }
            for (int id : ev.participants) g.particles[static_cast<std::size_t>(id)].death = t;
            const int newborn = static_cast<int>(g.particles.size());
            g.particles.push_back({t, -1.0});
            ev.newborn = newborn;
            live.push_back(newborn);
        }
        g.events.push_back(std::move(ev));
    }
    g.leaves = live;
    std::sort(g.leaves.begin(), g.leaves.end());
    return g;
}

std::vector<bool> colour_graph(const AsgGraph& g, const std::vector<bool>& leaf_types,
                               const ColouringRule& rule, RngStream& rng) {
    if (leaf_types.size() != g.leaves.size())
        throw std::invalid_argument("colour_graph: leaf type count mismatch");
    std::vector<char> colour(g.particles.size(), 0);
    for (std::size_t i = 0; i < g.leaves.size(); ++i)
        colour[static_cast<std::size_t>(g.leaves[i])] = leaf_types[i] ? 1 : 0;

    // Types propagate from the leaves (deep backward time) to the roots, so
    // walk the events in decreasing time.
    for (auto it = g.events.rbegin(); it != g.events.rend(); ++it) {
        if (it->is_branch) {
            // potential parents: the ell-1 children plus the marked line's
            // own continuation beyond the event
            int a_count = colour[static_cast<std::size_t>(it->marked)];
            for (int id : it->participants) a_count += colour[static_cast<std::size_t>(id)];
            const int ell = static_cast<int>(it->participants.size()) + 1;
            const double pa = rule.row(ell)[static_cast<std::size_t>(a_count)];
            char result;
            if (pa <= 0.0)
                result = 0;
            else if (pa >= 1.0)
                result = 1;
            else
                result = rng.bernoulli(pa) ? 1 : 0;
            colour[static_cast<std::size_t>(it->marked)] = result;
        } else {
            const char c = colour[static_cast<std::size_t>(it->newborn)];
            for (int id : it->participants) colour[static_cast<std::size_t>(id)] = c;
        }
    }
    std::vector<bool> roots(static_cast<std::size_t>(g.n_roots));
    for (int i = 0; i < g.n_roots; ++i) roots[static_cast<std::size_t>(i)] = colour[static_cast<std::size_t>(i)] != 0;
    return roots;
}

MeanSe asg_colouring_oracle(int n, const SelectionMechanism& sd, const LambdaMeasure& L,
                            double horizon, double x, std::size_t reps, std::uint64_t seed,
                            const ExecConfig& exec) {
    if (reps < 100) throw std::invalid_argument("asg_colouring_oracle: reps >= 100");
    return monte_carlo(
        reps,
        [&](std::size_t rep) {
            RngStream rng(seed, rep);
            const AsgGraph g = simulate_asg_graph(n, sd.beta, L, horizon, rng);
            std::vector<bool> types(g.leaves.size());
            for (std::size_t i = 0; i < types.size(); ++i) types[i] = rng.bernoulli(x);
            const std::vector<bool> roots = colour_graph(g, types, sd.rule, rng);
            for (bool r : roots)
                if (!r) return 0.0;
            return 1.0;
        },
        exec);
}

StationarySampler::StationarySampler(const SelectionMechanism& sd, const LambdaMeasure& L)
    : sd_(sd), L_(L) {
    const double b = sd.effective_rate();
    const double c = coalescence_impact(L);
    if (!(b < c))
        throw std::domain_error("StationarySampler: leaf process not positive recurrent (b >= c)");
}

CoefficientState StationarySampler::sample(RngStream& rng) {
    const double hold_rate = sd_.total_branch_rate();
    if (hold_rate <= 0.0) return CoefficientState(std::vector<double>{0.0, 1.0});  // V == (0,1) a.s.

    // One excursion of the leaf process away from state 1, including the
    // initial holding time.
    auto draw_excursion = [&](LeafPath& path) {
        path.initial = 1;
        path.events.clear();
        const BranchKernel bk(sd_.beta);
        double t = rng.exponential(hold_rate);
        int count = 1;
        path.events.push_back({t, LeafEvent::Kind::branch, bk.sample_order(rng)});
        count += path.events.back().param - 1;
        while (count > 1) {
            const double branch_rate = count * bk.per_particle;
            const CoalescenceDraw cd = coalescence_rates(L_, count);
            const double total = branch_rate + cd.total;
            t += rng.exponential(total);
            if (rng.uniform() * total < branch_rate) {
                const int ell = bk.sample_order(rng);
                path.events.push_back({t, LeafEvent::Kind::branch, ell});
                count += ell - 1;
            } else {
                const int k = sample_merger_size(L_, count, cd, rng);
                path.events.push_back({t, LeafEvent::Kind::coalesce, k});
                count -= k - 1;
            }
        }
        return t;  // duration: return time to state 1
    };

    // Duration-biased excursion by rejection; the envelope doubles whenever
    // an excursion overshoots it (the overshoot is discarded and redrawn, so
    // the residual truncation sits far below Monte Carlo resolution).
    LeafPath exc;
    double duration = 0.0;
    for (;;) {
        duration = draw_excursion(exc);
        if (duration > envelope_) {
            while (duration > envelope_) envelope_ *= 2.0;
            continue;
        }
        if (rng.uniform() * envelope_ <= duration) break;
    }

    // Uniform time point inside the excursion; replay V up to it.
    const double u = rng.uniform() * duration;
    CoefficientState v(std::vector<double>{0.0, 1.0});
    for (const auto& e : exc.events) {
        if (e.time > u) break;
        v = (e.kind == LeafEvent::Kind::branch) ? apply_selection(v, e.param, sd_.rule)
                                                : apply_coagulation(v, e.param);
    }
    return v;
}

CoefficientState sample_stationary_V(const SelectionMechanism& sd, const LambdaMeasure& L,
                                     RngStream& rng) {
    StationarySampler sampler(sd, L);
    return sampler.sample(rng);
}

EntranceSample entrance_law_sample(const SelectionMechanism& sd, const LambdaMeasure& L, double t0,
                                   int n_max, RngStream& rng) {
    if (t0 <= 0.0) throw std::invalid_argument("entrance_law_sample: t0 > 0 required");
    const CdiDiagnostic diag = cdi_diagnostic(L, 2000);
    if (diag.verdict == CdiVerdict::likely_not)
        throw std::domain_error("entrance_law_sample: leaf process does not come down from infinity");
    const LeafPath path = simulate_leaf_path(n_max, sd.beta, L, t0, rng);
    EntranceSample out;
    out.V = apply_leaf_path(CoefficientState::unit(n_max), path, sd.rule);
    out.W = apply_leaf_path(CoefficientState::unit(n_max), path, sd.rule.reversed());
    out.leaf_count = out.V.leaf_count();
    return out;
}

CoupledRunStats run_coupled_entrance(int n0, const SelectionMechanism& sd, const LambdaMeasure& L,
                                     double x, const std::vector<double>& t_grid, double horizon,
                                     RngStream& rng) {
    CoupledRunStats stats;
    stats.q_at_grid.assign(t_grid.size(), 1.0);
    const ColouringRule rule = sd.rule;
    const ColouringRule rbar = sd.rule.reversed();
    const BranchKernel bk(sd.beta);

    CoefficientState V = CoefficientState::unit(n0);
    CoefficientState W = CoefficientState::unit(n0);
    double t = 0.0;
    double q = asp_eval(V, x) + asp_eval(W, 1.0 - x);
    std::size_t grid_pos = 0;
    int count = n0;

    auto advance_to = [&](double t_next) {
        while (grid_pos < t_grid.size() && t_grid[grid_pos] < t_next) {
            stats.q_at_grid[grid_pos] = q;
            ++grid_pos;
        }
        stats.integral_one_minus_q += (1.0 - q) * (t_next - t);
        t = t_next;
    };

    while (count > 1 && t < horizon) {
        const double branch_rate = count * bk.per_particle;
        const CoalescenceDraw cd = count >= 2 ? coalescence_rates(L, count)
                                              : CoalescenceDraw{0.0, {}, 0.0};
        const double total = branch_rate + cd.total;
        if (total <= 0.0) break;
        const double t_next = t + rng.exponential(total);
        if (t_next >= horizon) {
            advance_to(horizon);
            break;
        }
        advance_to(t_next);
        if (rng.uniform() * total < branch_rate) {
            const int ell = bk.sample_order(rng);
            V = apply_selection(V, ell, rule);
            W = apply_selection(W, ell, rbar);
            count += ell - 1;
        } else {
            const int k = sample_merger_size(L, count, cd, rng);
            V = apply_coagulation(V, k);
            W = apply_coagulation(W, k);
            count -= k - 1;
        }
        q = asp_eval(V, x) + asp_eval(W, 1.0 - x);
    }
    stats.tau = t;
    stats.hit_one = count == 1;
    // Q == 1 from tau on: remaining grid points keep the default 1.
    if (stats.hit_one)
        for (; grid_pos < t_grid.size(); ++grid_pos) stats.q_at_grid[grid_pos] = 1.0;
    else
        for (; grid_pos < t_grid.size(); ++grid_pos) stats.q_at_grid[grid_pos] = q;
    return stats;
}

std::optional<long long> simulate_fixation_line(long long d0, const std::vector<double>& beta,
                                                const LambdaMeasure& L, double horizon,
                                                RngStream& rng) {
    if (d0 < 1) throw std::invalid_argument("simulate_fixation_line: d0 >= 1");
    const int m = static_cast<int>(beta.size()) - 1;
    const double mass_one = L.mass_at_one();
    // beta tail sums for the down-jump rates
    std::vector<double> beta_tail(beta.size() + 1, 0.0);
    for (std::size_t k = beta.size(); k-- > 2;) beta_tail[k] = beta_tail[k + 1] + beta[k];
    std::vector<double> up_atom(L.atoms.size(), 0.0);
    std::vector<double> down(static_cast<std::size_t>(m) + 1, 0.0);
    long long d = d0;
    double t = 0.0;
    for (;;) {
        if (d == 1) return d;  // absorbing
        // The fixation line explodes in finite time exactly when the leaf
        // process comes down from infinity; a path climbing past the guard is
        // reported as +infinity (any comparison level of interest sits far
        // below it, and the residual time to explosion is ~1/guard).
        if (d >= kFixationLineGuard) return std::nullopt;
        // up-jumps: Kingman part is d -> d+1 at rate C(d,2) w0; an atom at r
        // contributes w [1 - (1-r)^{d-1}(1 + (d-1)r)] / r^2 in total.
        const double up_kingman = L.kingman * 0.5 * static_cast<double>(d) * (d - 1.0);
        double up_total = up_kingman;
        for (std::size_t a = 0; a < L.atoms.size(); ++a) {
            const auto& [r, w] = L.atoms[a];
            if (r == 1.0) continue;  // the explicit mass-at-one jump handles it
            const double q = 1.0 - r;
            const double rate =
                w * (1.0 - std::pow(q, static_cast<double>(d - 1)) * (1.0 + (d - 1.0) * r)) / (r * r);
            up_atom[a] = std::max(rate, 0.0);
            up_total += up_atom[a];
        }
        // down-jumps: d -> d-r at rate (d-r) beta_{r+1} + sum_{k>r+1} beta_{k+1}
        double down_total = 0.0;
        const long long rmax = std::min<long long>(m, d) - 1;
        for (long long r = 1; r <= rmax; ++r) {
            const double rate = (d - r) * beta[static_cast<std::size_t>(r + 1)] +
                                beta_tail[static_cast<std::size_t>(r + 2)];
            down[static_cast<std::size_t>(r)] = rate;
            down_total += rate;
        }
        const double inf_rate = (d >= 2) ? mass_one : 0.0;
        const double total = up_total + down_total + inf_rate;
        if (total <= 0.0) return d;
        t += rng.exponential(total);
        if (t >= horizon) return d;
        double u = rng.uniform() * total;
        if (u < up_kingman) {
            d += 1;
            continue;
        }
        u -= up_kingman;
        bool jumped = false;
        for (std::size_t a = 0; a < L.atoms.size() && !jumped; ++a) {
            if (u < up_atom[a]) {
                // jump size c = j - 1 where j ~ NB(d-1, 1-r) failures
                // conditioned on j >= 2
                const double r = L.atoms[a].first;
                int j = 0;
                const double q = 1.0 - r;
                const double accept =
                    1.0 - std::pow(q, static_cast<double>(d - 1)) * (1.0 + (d - 1.0) * r);
                if (accept > 0.05) {
                    do {
                        j = rng.negative_binomial(static_cast<int>(d - 1), q);
                    } while (j < 2);
                } else {
                    // inverse CDF on the conditioned tail
                    double pj = choose(static_cast<int>(d), 2) * r * r *
                                std::pow(q, static_cast<double>(d - 1));  // j = 2
                    double uu = rng.uniform() * accept;
                    j = 2;
                    while (uu > pj && j < 100000) {
                        uu -= pj;
                        pj *= r * (d - 1.0 + j) / (j + 1.0);
                        ++j;
                    }
                }
                d += j - 1;
                jumped = true;
                break;
            }
            u -= up_atom[a];
        }
        if (jumped) continue;
        if (u < down_total) {
            for (long long r = 1; r <= rmax; ++r) {
                if (u < down[static_cast<std::size_t>(r)]) {
                    d -= r;
                    break;
                }
                u -= down[static_cast<std::size_t>(r)];
            }
            continue;
        }
        return std::nullopt;  // Lambda({1}) jump to +infinity
    }
}

std::pair<int, int> coupled_leaf_counts(int n_small, int n_big, const std::vector<double>& beta,
                                        const LambdaMeasure& L, double horizon, RngStream& rng) {
    if (n_small > n_big) throw std::invalid_argument("coupled_leaf_counts: n_small <= n_big");
    const AsgGraph g = simulate_asg_graph(n_big, beta, L, horizon, rng);
    // membership of the subsystem generated by the first n_small roots
    std::vector<char> member(g.particles.size(), 0);
    for (int i = 0; i < n_small; ++i) member[static_cast<std::size_t>(i)] = 1;
    int small_count = n_small;
    int big_count = n_big;
    for (const auto& e : g.events) {
        if (e.is_branch) {
            big_count += static_cast<int>(e.participants.size());
            if (member[static_cast<std::size_t>(e.marked)]) {
                for (int id : e.participants) member[static_cast<std::size_t>(id)] = 1;
                small_count += static_cast<int>(e.participants.size());
            }
        } else {
            big_count -= static_cast<int>(e.participants.size()) - 1;
            int in = 0;
            for (int id : e.participants) in += member[static_cast<std::size_t>(id)];
            if (in > 0) {
                member[static_cast<std::size_t>(e.newborn)] = 1;
                small_count -= in - 1;
            }
        }
        if (small_count > big_count)
            throw std::logic_error("coupled_leaf_counts: monotone coupling violated");
    }
    return {small_count, big_count};
}

}  // namespace bwf
