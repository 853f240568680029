#include <sstream>

#include "bwf/json_io.hpp"
#include "doctest.h"

using namespace bwf;

TEST_CASE("lambda measure round trip") {
    const LambdaMeasure L(0.5, {{0.3, 1.0}, {0.9, 0.25}});
    const LambdaMeasure back = lambda_from_json(to_json(L));
    CHECK(back.kingman == L.kingman);
    REQUIRE(back.atoms.size() == 2);
    CHECK(back.atoms[1].first == 0.9);
    CHECK(back.atoms[1].second == 0.25);
}

TEST_CASE("selection mechanism round trip") {
    SelectionMechanism sd = SelectionMechanism::neutral(3);
    sd.beta[2] = 0.25;
    sd.beta[3] = 0.5;
    sd.rule.row(3) = {0, 1, 0, 1};
    const SelectionMechanism back = sd_from_json(to_json(sd));
    CHECK(back.m() == 3);
    CHECK(back.beta_at(2) == 0.25);
    CHECK(back.beta_at(3) == 0.5);
    CHECK(back.rule.row(3)[1] == 1.0);
    CHECK(back.rule.row(3)[2] == 0.0);
}

TEST_CASE("model loading") {
    const json j{{"drift", {0.0, -1.0, 1.0}}, {"lambda", {{"kingman", 1.0}}}};
    const ModelConfig cfg = load_model(j);
    CHECK(cfg.sd.m() == 2);
    CHECK(cfg.sd.beta_at(2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cfg.echo.contains("sd"));

    // exactly one of drift/sd
    json both = j;
    both["sd"] = to_json(cfg.sd);
    CHECK_THROWS(load_model(both));
    json neither{{"lambda", {{"kingman", 1.0}}}};
    CHECK_THROWS(load_model(neither));

    // rate below b_star refused
    CHECK_THROWS(load_model(j, 0.5));
    const ModelConfig inflated = load_model(j, 2.0);
    CHECK(inflated.sd.effective_rate() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("event logs are line-delimited json") {
    RngStream rng(3, 0);
    const LambdaMeasure L = LambdaMeasure::kingman_unit();
    const std::vector<double> beta{0, 0, 0.5};
    const LeafPath path = simulate_leaf_path(3, beta, L, 1.0, rng);
    std::ostringstream os;
    write_leaf_path_events(os, path);
    std::istringstream is(os.str());
    std::string line;
    std::size_t lines = 0;
    int count = -1;
    while (std::getline(is, line)) {
        const json j = json::parse(line);  // throws on malformed lines
        CHECK(j.contains("event"));
        if (j.contains("count")) count = j["count"].get<int>();
        ++lines;
    }
    CHECK(lines == path.events.size() + 1);
    CHECK(count == path.final_count());

    const AsgGraph g = simulate_asg_graph(3, beta, L, 1.0, rng);
    std::ostringstream os2;
    write_asg_events(os2, g);
    std::istringstream is2(os2.str());
    lines = 0;
    while (std::getline(is2, line)) {
        const json j = json::parse(line);
        CHECK(j.contains("event"));
        ++lines;
    }
    CHECK(lines == g.events.size() + 2);
}
