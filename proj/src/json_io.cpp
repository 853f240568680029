#include "bwf/json_io.hpp"

#include <ostream>
#include <stdexcept>

namespace bwf {

json to_json(const LambdaMeasure& L) {
    json atoms = json::array();
    for (const auto& [r, w] : L.atoms) atoms.push_back({r, w});
    return {{"kingman", L.kingman}, {"atoms", atoms}};
}

LambdaMeasure lambda_from_json(const json& j) {
    std::vector<std::pair<double, double>> atoms;
    if (j.contains("atoms"))
        for (const auto& a : j.at("atoms")) atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    return LambdaMeasure(j.value("kingman", 0.0), std::move(atoms));
}

json to_json(const SelectionMechanism& sd) {
    json beta = json::array();
    json rules = json::object();
    for (int ell = 2; ell <= sd.m(); ++ell) {
        beta.push_back(sd.beta_at(ell));
        rules[std::to_string(ell)] = sd.rule.row(ell);
    }
    return {{"m", sd.m()}, {"beta", beta}, {"p", rules}};
}

SelectionMechanism sd_from_json(const json& j) {
    const int m = j.at("m").get<int>();
    SelectionMechanism sd = SelectionMechanism::neutral(m);
    const auto& beta = j.at("beta");
    if (static_cast<int>(beta.size()) != m - 1)
        throw std::invalid_argument("sd: beta must list beta_2..beta_m");
    for (int ell = 2; ell <= m; ++ell) sd.beta[static_cast<std::size_t>(ell)] = beta.at(ell - 2).get<double>();
    if (j.contains("p"))
        for (int ell = 2; ell <= m; ++ell) {
            const std::string key = std::to_string(ell);
            if (j.at("p").contains(key))
                sd.rule.row(ell) = j.at("p").at(key).get<std::vector<double>>();
        }
    sd.validate();
    return sd;
}

json to_json(const ThinningMechanism& T) {
    json rows = json::array();
    for (int k = 1; k <= T.m; ++k) {
        json row = json::array();
        for (int i = 1; i <= T.m; ++i) row.push_back(T.t[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
        rows.push_back(row);
    }
    return rows;
}

json to_json(const Polynomial& p) { return json(p.coeffs); }

Polynomial polynomial_from_json(const json& j) { return Polynomial(j.get<std::vector<double>>()); }

json to_json(const DualityReport& rep) {
    return {{"lhs", rep.lhs},       {"lhs_se", rep.lhs_se}, {"rhs", rep.rhs},
            {"rhs_se", rep.rhs_se}, {"z", rep.z},           {"replicates", rep.reps},
            {"config", rep.config}};
}

void write_leaf_path_events(std::ostream& out, const LeafPath& path) {
    out << json{{"event", "init"}, {"count", path.initial}}.dump() << "\n";
    int count = path.initial;
    for (const auto& e : path.events) {
        const bool branch = e.kind == LeafEvent::Kind::branch;
        count += branch ? e.param - 1 : -(e.param - 1);
        out << json{{"event", branch ? "branch" : "coalesce"},
                    {"time", e.time},
                    {branch ? "ell" : "k", e.param},
                    {"count", count}}
                   .dump()
            << "\n";
    }
}

void write_asg_events(std::ostream& out, const AsgGraph& g) {
    out << json{{"event", "init"}, {"roots", g.n_roots}, {"horizon", g.horizon}}.dump() << "\n";
    for (const auto& e : g.events) {
        json j{{"time", e.time}};
        if (e.is_branch) {
            j["event"] = "branch";
            j["marked"] = e.marked;
            j["children"] = e.participants;
        } else {
            j["event"] = "coalesce";
            j["victims"] = e.participants;
            j["newborn"] = e.newborn;
        }
        out << j.dump() << "\n";
    }
    out << json{{"event", "leaves"}, {"ids", g.leaves}}.dump() << "\n";
}

ModelConfig load_model(const json& j, double sd_rate) {
    ModelConfig cfg;
    if (!j.contains("lambda")) throw std::invalid_argument("model: missing \"lambda\"");
    cfg.lambda = lambda_from_json(j.at("lambda"));
    const bool has_drift = j.contains("drift");
    const bool has_sd = j.contains("sd");
    if (has_drift == has_sd)
        throw std::invalid_argument("model: exactly one of \"drift\" or \"sd\" required");
    if (has_sd) {
        cfg.sd = sd_from_json(j.at("sd"));
    } else {
        const Polynomial d = polynomial_from_json(j.at("drift"));
        bool zero = true;
        for (double c : d.coeffs)
            if (c != 0.0) zero = false;
        if (zero) {
            cfg.sd = SelectionMechanism::neutral(2);
        } else if (sd_rate > 0.0) {
            auto sd = decompose_with_rate(d, sd_rate);
            if (!sd) throw std::invalid_argument("model: requested rate below b_star of the drift");
            cfg.sd = *sd;
        } else {
            cfg.sd = minimal_sd(d).sd;
        }
    }
    cfg.echo = {{"lambda", to_json(cfg.lambda)}, {"sd", to_json(cfg.sd)}};
    if (has_drift) cfg.echo["drift"] = j.at("drift");
    if (sd_rate > 0.0) cfg.echo["sd_rate"] = sd_rate;
    return cfg;
}

}  // namespace bwf
