// Command-line front end: model configuration, experiment execution, and
// machine-readable reports. Subcommands: decompose | simulate | verify |
// analyze. All randomness sits behind --seed; replicate parallelism behind
// --threads (results are independent of the thread count).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "bwf/analysis.hpp"
#include "bwf/json_io.hpp"
#include "bwf/parallel.hpp"

using namespace bwf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitRegime = 3;

struct CommonOpts {
    std::string model_path;
    std::uint64_t seed = 42;
    std::size_t reps = 10000;
    int threads = 0;
    bool serial = false;
    double sd_rate = 0.0;

    ExecConfig exec() const {
        ExecConfig e;
        e.mode = serial ? ExecMode::serial : ExecMode::openmp;
        e.threads = threads;
        return e;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_model = true) {
    if (needs_model)
        cmd->add_option("--model", opts.model_path, "model config JSON file")->required();
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--reps", opts.reps, "replicate count");
    cmd->add_option("--threads", opts.threads, "thread count (0 = all cores)");
    cmd->add_flag("--serial", opts.serial, "run the serial reference path");
    cmd->add_option("--sd-rate", opts.sd_rate,
                    "decompose a drift model at this effective branching rate instead of minimally");
}

ModelConfig read_model(const CommonOpts& opts) {
    std::ifstream in(opts.model_path);
    if (!in) throw std::invalid_argument("cannot open model file: " + opts.model_path);
    json j;
    in >> j;
    return load_model(j, opts.sd_rate);
}

Polynomial parse_poly(const std::string& spec) {
    std::vector<double> coeffs;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) coeffs.push_back(std::stod(tok));
    if (coeffs.empty()) throw std::invalid_argument("empty polynomial");
    return Polynomial(std::move(coeffs));
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << header << "\n";
    out.precision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

json exec_echo(const CommonOpts& o) {
    return {{"seed", o.seed}, {"reps", o.reps}, {"threads", o.threads}, {"serial", o.serial}};
}

// ---------------------------------------------------------------------------

int cmd_decompose(const std::string& poly_spec, bool minimal, double rate, bool m3_closed_form) {
    Polynomial d;
    try {
        d = parse_poly(poly_spec);
    } catch (const std::exception& e) {
        std::cerr << "error: bad polynomial: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        json report;
        report["config"] = {{"poly", to_json(d)},
                            {"minimal", minimal},
                            {"rate", rate},
                            {"m3_closed_form", m3_closed_form}};
        if (m3_closed_form) {
            const MinimalSdM3 res = minimal_sd_m3(d);
            report["b_star"] = res.b_star;
            report["face"] = to_string(res.face);
            report["sd"] = to_json(res.sd);
            double resid = 0.0;
            const auto rho = interior_bcv(d, 3);
            const auto back = drift_bcv(res.sd);
            for (std::size_t i = 0; i < rho.size(); ++i)
                resid = std::max(resid, std::abs(rho[i] - back[i]));
            report["round_trip_residual"] = resid;
        } else if (rate > 0.0) {
            const auto sd = decompose_with_rate(d, rate);
            if (!sd) {
                std::cerr << "error: rate " << rate << " lies below b_star(d)\n";
                return kExitInfeasible;
            }
            report["b_star"] = minimal_sd(d).b_star;
            report["sd"] = to_json(*sd);
            report["effective_rate"] = sd->effective_rate();
            double resid = 0.0;
            const auto rho = interior_bcv(d, sd->m());
            const auto back = drift_bcv(*sd);
            for (std::size_t i = 0; i < rho.size(); ++i)
                resid = std::max(resid, std::abs(rho[i] - back[i]));
            report["round_trip_residual"] = resid;
        } else {
            const MinimalDecomposition res = minimal_sd(d);
            report["b_star"] = res.b_star;
            report["sd"] = to_json(res.sd);
            report["round_trip_residual"] = res.drift_residual;
        }
        emit(report);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_simulate(const std::string& kind, const CommonOpts& opts, double x0, double t, int N,
                 double dt, int n_leaves, const std::string& traj_path,
                 const std::string& events_path) {
    const ModelConfig model = read_model(opts);
    json report;
    report["config"] = {{"command", "simulate"}, {"kind", kind},     {"model", model.echo},
                        {"x0", x0},              {"t", t},           {"N", N},
                        {"dt", dt},              {"n", n_leaves},    {"exec", exec_echo(opts)}};

    if (kind == "asg") {
        // one explicit graph, exported as a line-delimited JSON event log
        RngStream rng(opts.seed, 0);
        const AsgGraph g = simulate_asg_graph(n_leaves, model.sd.beta, model.lambda, t, rng);
        report["leaves"] = g.leaves.size();
        report["events"] = g.events.size();
        if (!events_path.empty()) {
            std::ofstream out(events_path);
            if (!out) throw std::invalid_argument("cannot open output file: " + events_path);
            write_asg_events(out, g);
            report["event_log"] = events_path;
        }
        report["seed"] = opts.seed;
        emit(report);
        return kExitOk;
    }

    if (kind == "leaf") {
        if (!events_path.empty()) {
            RngStream rng(opts.seed, opts.reps + 1);
            const LeafPath path = simulate_leaf_path(n_leaves, model.sd.beta, model.lambda, t, rng);
            std::ofstream out(events_path);
            if (!out) throw std::invalid_argument("cannot open output file: " + events_path);
            write_leaf_path_events(out, path);
            report["event_log"] = events_path;
        }
        const MeanSe s = monte_carlo(
            opts.reps,
            [&](std::size_t rep) {
                RngStream rng(opts.seed, rep);
                return static_cast<double>(
                    simulate_leaf_path(n_leaves, model.sd.beta, model.lambda, t, rng).final_count());
            },
            opts.exec());
        report["mean_leaf_count"] = s.mean;
        report["se"] = s.se;
    } else if (kind == "moran") {
        const MeanSe s = monte_carlo(
            opts.reps,
            [&](std::size_t rep) {
                RngStream rng(opts.seed, rep);
                return moran_frequency_at(model.sd, model.lambda, N, x0, t, rng);
            },
            opts.exec());
        report["mean"] = s.mean;
        report["se"] = s.se;
    } else {  // sde
        SdeConfig cfg{model.sd, model.lambda, dt};
        std::vector<double> clamp_frac(opts.reps, 0.0);
        std::vector<double> values;
        parallel_map(
            opts.reps, values,
            [&](std::size_t rep) {
                RngStream rng(opts.seed, rep);
                const SdeResult r = sde_simulate(cfg, x0, t, rng);
                clamp_frac[rep] =
                    r.steps ? static_cast<double>(r.clamped) / static_cast<double>(r.steps) : 0.0;
                return r.x;
            },
            opts.exec());
        const MeanSe s = summarize(values);
        const MeanSe cf = summarize(clamp_frac);
        report["mean"] = s.mean;
        report["se"] = s.se;
        report["clamped_fraction"] = cf.mean;
        report["clamp_flag"] = cf.mean >= 1e-3;  // boundary clipping should stay below 0.1%
    }
    report["replicates"] = opts.reps;
    report["seed"] = opts.seed;

    if (!traj_path.empty()) {
        // one trajectory under stream id = reps (past the estimator streams)
        RngStream rng(opts.seed, opts.reps);
        std::vector<std::vector<double>> rows;
        if (kind == "moran") {
            MoranModel mm;
            mm.N = N;
            mm.rule = model.sd.rule;
            mm.beta_N.assign(model.sd.beta.size(), 0.0);
            for (std::size_t ell = 2; ell < model.sd.beta.size(); ++ell)
                mm.beta_N[ell] = model.sd.beta[ell] / N;
            mm.mu = moran_mu_from_lambda(N, model.lambda);
            std::vector<MoranStep> steps;
            moran_simulate(mm, static_cast<int>(std::lround(N * x0)), N * t, rng, &steps);
            for (const auto& s : steps)
                rows.push_back({s.time / N, static_cast<double>(s.k) / N});
        } else if (kind == "leaf") {
            const LeafPath path = simulate_leaf_path(n_leaves, model.sd.beta, model.lambda, t, rng);
            int count = path.initial;
            rows.push_back({0.0, static_cast<double>(count)});
            for (const auto& e : path.events) {
                count += (e.kind == LeafEvent::Kind::branch) ? e.param - 1 : -(e.param - 1);
                rows.push_back({e.time, static_cast<double>(count)});
            }
        } else {
            SdeConfig cfg{model.sd, model.lambda, dt};
            double x = x0;
            for (double tt = 0.0; tt < t; tt += dt) {
                rows.push_back({tt, x});
                x = sde_simulate(cfg, x, dt, rng).x;
            }
            rows.push_back({t, x});
        }
        write_csv(traj_path, "time,value", rows);
        report["trajectory"] = traj_path;
    }
    emit(report);
    return kExitOk;
}

int cmd_verify(const std::string& kind, const CommonOpts& opts, double x, int n, int ell,
               long long d, double t, const std::string& forward_spec) {
    const ModelConfig model = read_model(opts);
    json report;
    report["config"] = {{"command", "verify"}, {"kind", kind},   {"model", model.echo},
                        {"x", x},              {"n", n},         {"ell", ell},
                        {"d", d},              {"t", t},         {"forward", forward_spec},
                        {"exec", exec_echo(opts)}};
    DualityReport rep;
    if (kind == "duality") {
        ForwardConfig fwd;
        if (forward_spec.rfind("moran:", 0) == 0) {
            fwd.kind = ForwardConfig::Kind::moran;
            fwd.moran_N = std::stoi(forward_spec.substr(6));
        } else if (forward_spec.rfind("sde:", 0) == 0) {
            fwd.kind = ForwardConfig::Kind::sde;
            fwd.dt = std::stod(forward_spec.substr(4));
        } else if (forward_spec != "sde") {
            throw std::invalid_argument("--forward must be sde, sde:<dt>, or moran:<N>");
        }
        rep = verify_duality(model.sd, model.lambda, x, n, t, opts.reps, opts.seed, fwd, opts.exec());
    } else {
        rep = verify_siegmund(model.sd.beta, model.lambda, ell, d, t, opts.reps, opts.seed, opts.exec());
    }
    report["report"] = to_json(rep);
    emit(report);
    return kExitOk;  // the z-score is data, not a failure
}

int cmd_analyze(const std::string& kind, const CommonOpts& opts, double x, int n_max, double t_max,
                const std::string& method_name, const std::string& out_path, double run_time) {
    const ModelConfig model = read_model(opts);
    json report;
    report["config"] = {{"command", "analyze"}, {"kind", kind},       {"model", model.echo},
                        {"x", x},               {"n_max", n_max},     {"t_max", t_max},
                        {"method", method_name}, {"out", out_path},   {"run_time", run_time},
                        {"exec", exec_echo(opts)}};

    if (kind == "classify") {
        const Regime r = classify_leaf_process(model.sd.beta, model.lambda);
        report["regime"] = to_string(r);
        report["b_beta"] = model.sd.effective_rate();
        const double c = coalescence_impact(model.lambda);
        report["c_lambda"] = std::isinf(c) ? json("infinity") : json(c);
        const CdiDiagnostic diag = cdi_diagnostic(model.lambda, 10000);
        report["cdi"] = {{"verdict", to_string(diag.verdict)},
                         {"partial_sum", diag.partial_sum},
                         {"fitted_exponent", diag.fitted_exponent},
                         {"K", diag.K},
                         {"thresholds", "likely_cdi if exponent > 1.1, likely_not if < 1.05"}};
        emit(report);
        return kExitOk;
    }

    if (kind == "stationary") {
        const StationaryTail tail = fearnhead_solve(model.sd.beta, model.lambda);
        report["n_max"] = tail.n_max;
        report["residual"] = tail.residual;
        report["last_change"] = tail.last_change;
        json q = json::array();
        for (int i = 1; i <= std::min(tail.n_max, 16); ++i) q.push_back(tail.q[static_cast<std::size_t>(i)]);
        report["q_head"] = q;
        if (run_time > 0.0)
            report["empirical_tv"] =
                stationary_L_empirical_check(model.sd.beta, model.lambda, run_time, opts.seed);
        if (!out_path.empty()) {
            // exact solve: se = 0, reps = 0
            std::vector<std::vector<double>> rows;
            for (int i = 1; i <= tail.n_max; ++i)
                rows.push_back({static_cast<double>(i), tail.q[static_cast<std::size_t>(i)], 0.0, 0.0});
            write_csv(out_path, "n,estimate,se,reps", rows);
        }
        emit(report);
        return kExitOk;
    }

    if (kind == "absorb") {
        AbsorptionMethod method = AbsorptionMethod::dual_mc;
        if (method_name == "forward_mc") method = AbsorptionMethod::forward_mc;
        else if (method_name == "series") method = AbsorptionMethod::series;
        else if (method_name != "dual_mc") throw std::invalid_argument("--method must be dual_mc, forward_mc, or series");
        const AbsorptionEstimate est =
            absorption_probability(model.sd, model.lambda, x, method, opts.reps, opts.seed, opts.exec());
        report["h"] = est.h;
        report["se"] = est.se;
        report["unabsorbed"] = est.unabsorbed;
        if (method == AbsorptionMethod::forward_mc) report["horizon_cap"] = est.horizon_cap;
        if (method == AbsorptionMethod::series) {
            report["series_terms"] = est.series_terms;
            report["series_remainder_bound"] = est.series_remainder_bound;
        }
        if (!out_path.empty())
            write_csv(out_path, "x,estimate,se,reps",
                      {{x, est.h, est.se, static_cast<double>(opts.reps)}});
        emit(report);
        return kExitOk;
    }

    if (kind == "absorb-time") {
        std::vector<double> grid;
        for (double tt = t_max / 20.0; tt <= t_max + 1e-12; tt += t_max / 20.0) grid.push_back(tt);
        const AbsorptionTimeEstimate est = absorption_time(model.sd, model.lambda, x, grid, n_max,
                                                           opts.reps, opts.seed, opts.exec());
        report["mean_T"] = est.mean_T;
        report["mean_T_se"] = est.mean_T_se;
        report["tau_mean"] = est.tau_mean;
        report["tau_mean_se"] = est.tau_mean_se;
        report["n_max"] = est.n_max;
        report["sensitivity_ok"] = est.sensitivity_ok;
        report["sensitivity_z"] = est.sensitivity_z;
        if (!out_path.empty()) {
            std::vector<std::vector<double>> rows;
            for (std::size_t g = 0; g < est.t_grid.size(); ++g)
                rows.push_back({est.t_grid[g], est.cdf[g], est.cdf_se[g],
                                static_cast<double>(opts.reps)});
            write_csv(out_path, "t,estimate,se,reps", rows);
        }
        emit(report);
        return kExitOk;
    }

    throw std::invalid_argument("unknown analyze subcommand: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lambda-Wright-Fisher processes, selection decompositions, and their"
                 " Bernstein-coefficient duals"};
    app.require_subcommand(1);

    // decompose
    auto* dec = app.add_subcommand("decompose", "minimal selection decomposition of a drift");
    std::string poly_spec;
    bool minimal = false, m3cf = false;
    double rate = 0.0;
    dec->add_option("--poly", poly_spec, "monomial coefficients c0,c1,...")->required();
    dec->add_flag("--minimal", minimal, "minimal decomposition (default)");
    dec->add_option("--rate", rate, "decompose at this effective branching rate");
    dec->add_flag("--m3-closed-form", m3cf, "use the deg<=3 closed forms");

    // simulate
    auto* sim = app.add_subcommand("simulate", "forward/backward trajectory estimators");
    CommonOpts sim_opts;
    std::string sim_kind, traj_path;
    double sim_x0 = 0.5, sim_t = 1.0, sim_dt = 1e-3;
    int sim_N = 200, sim_n = 2;
    std::string events_path;
    sim->add_option("kind", sim_kind, "sde | moran | leaf | asg")->required();
    add_common(sim, sim_opts);
    sim->add_option("--x0", sim_x0, "initial frequency");
    sim->add_option("--t", sim_t, "time horizon (limit time units)");
    sim->add_option("--N", sim_N, "Moran population size");
    sim->add_option("--dt", sim_dt, "Euler step");
    sim->add_option("--n", sim_n, "initial leaf count (leaf/asg)");
    sim->add_option("--traj", traj_path, "write one trajectory CSV here");
    sim->add_option("--events", events_path, "write a line-delimited JSON event log here (leaf/asg)");

    // verify
    auto* ver = app.add_subcommand("verify", "duality verification reports");
    CommonOpts ver_opts;
    std::string ver_kind, forward_spec = "sde";
    double ver_x = 0.5, ver_t = 0.5;
    int ver_n = 1, ver_ell = 1;
    long long ver_d = 1;
    ver->add_option("kind", ver_kind, "duality | siegmund")->required();
    add_common(ver, ver_opts);
    ver->add_option("--x", ver_x, "frequency argument");
    ver->add_option("--n", ver_n, "moment order / initial leaf count");
    ver->add_option("--ell", ver_ell, "leaf-process start (siegmund)");
    ver->add_option("--d", ver_d, "fixation-line start (siegmund)");
    ver->add_option("--t", ver_t, "time horizon");
    ver->add_option("--forward", forward_spec, "forward estimator: sde, sde:<dt>, or moran:<N>");

    // analyze
    auto* ana = app.add_subcommand("analyze", "classification, recursions, absorption");
    CommonOpts ana_opts;
    std::string ana_kind, method_name = "dual_mc", out_path;
    double ana_x = 0.5, ana_tmax = 4.0, ana_runtime = 0.0;
    int ana_nmax = 256;
    ana->add_option("kind", ana_kind, "classify | stationary | absorb | absorb-time")->required();
    add_common(ana, ana_opts);
    ana->add_option("--x", ana_x, "frequency argument");
    ana->add_option("--n-max", ana_nmax, "entrance-law truncation");
    ana->add_option("--t-max", ana_tmax, "absorption-time grid end");
    ana->add_option("--method", method_name, "absorb estimator: dual_mc | forward_mc | series");
    ana->add_option("--out", out_path, "CSV output path");
    ana->add_option("--run-time", ana_runtime, "empirical occupation run length (stationary)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dec->parsed()) return cmd_decompose(poly_spec, minimal, rate, m3cf);
        if (sim->parsed())
            return cmd_simulate(sim_kind, sim_opts, sim_x0, sim_t, sim_N, sim_dt, sim_n, traj_path,
                                events_path);
        if (ver->parsed())
            return cmd_verify(ver_kind, ver_opts, ver_x, ver_n, ver_ell, ver_d, ver_t, forward_spec);
        if (ana->parsed())
            return cmd_analyze(ana_kind, ana_opts, ana_x, ana_nmax, ana_tmax, method_name, out_path,
                               ana_runtime);
    } catch (const std::domain_error& e) {
        // regime refusals: recurrence/c.d.i. preconditions
        std::cerr << "refused: " << e.what() << "\n";
        return kExitRegime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
