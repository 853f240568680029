#ifndef BWF_JSON_IO_HPP
#define BWF_JSON_IO_HPP

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "bwf/analysis.hpp"
#include "bwf/ancestral.hpp"
#include "bwf/lambda_measure.hpp"
#include "bwf/selection.hpp"

namespace bwf {

using json = nlohmann::json;

// {"kingman": w0, "atoms": [[r, w], ...]}
json to_json(const LambdaMeasure& L);
LambdaMeasure lambda_from_json(const json& j);

// {"m": 3, "beta": [b2, b3], "p": {"2": [...], "3": [...]}}
json to_json(const SelectionMechanism& sd);
SelectionMechanism sd_from_json(const json& j);

json to_json(const ThinningMechanism& T);  // row-major matrix

// polynomials travel as arrays of monomial coefficients, lowest degree first
json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j);

json to_json(const DualityReport& rep);

// Line-delimited JSON event logs for replay and external plotting.
void write_leaf_path_events(std::ostream& out, const LeafPath& path);
void write_asg_events(std::ostream& out, const AsgGraph& g);

// Resolved model: a Lambda measure plus a selection mechanism (either given
// outright or produced from a drift polynomial).
struct ModelConfig {
    LambdaMeasure lambda = LambdaMeasure::kingman_unit();
    SelectionMechanism sd = SelectionMechanism::neutral(2);
    json echo;  // the fully resolved configuration, echoed into reports
};

// Parses {"drift": [...] | "sd": {...}, "lambda": {...}}; exactly one of
// drift/sd must be present. A drift is decomposed minimally, or at the given
// rate when sd_rate > 0.
ModelConfig load_model(const json& j, double sd_rate = 0.0);

}  // namespace bwf

#endif
