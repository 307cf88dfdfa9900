#include "doctest.h"
#include "ncindex/errors.hpp"
#include "ncindex/runner.hpp"

using namespace ncindex;
using nlohmann::json;

namespace {

json one(json experiment) { return {{"experiments", json::array({std::move(experiment)})}}; }

}  // namespace

TEST_CASE("config: validation rejects unknown fields and bad values") {
    RunOptions opts;
    CHECK_THROWS_AS(parse_config(json::object(), opts), ConfigError);
    CHECK_THROWS_AS(parse_config({{"experiments", json::array()}, {"colour", 1}}, opts), ConfigError);
    CHECK_THROWS_AS(parse_config(one({{"id", "a"}, {"kind", "toeplitz"}, {"cutoff", 3}}), opts), ConfigError);
    CHECK_THROWS_AS(parse_config(one({{"id", "a"}, {"kind", "heat-kernel"}}), opts), ConfigError);
    CHECK_THROWS_AS(parse_config(one({{"id", "a"}, {"kind", "toeplitz"}, {"tolerance", 0}}), opts), ConfigError);
    CHECK_THROWS_AS(parse_config(one({{"id", "a"}, {"kind", "toeplitz"}, {"system", 3}}), opts), ConfigError);
    CHECK_THROWS_AS(parse_config(one({{"kind", "toeplitz"}}), opts), ConfigError);
    json dup = {{"experiments", {{{"id", "a"}, {"kind", "specflow"}}, {{"id", "a"}, {"kind", "specflow"}}}}};
    CHECK_THROWS_AS(parse_config(dup, opts), ConfigError);
    json torus = one({{"id", "t"}, {"kind", "covering-check"}, {"manifold", "torus"}});
    CHECK_THROWS_AS(parse_config(torus, opts), ConfigError);
    opts.stretch = true;
    auto ex = parse_config(torus, opts);
    auto row = run_experiment(ex.at(0));
    CHECK_FALSE(row.pass);
    CHECK(row.error_kind == "UnsupportedManifold");
}

TEST_CASE("config: defaults, overrides, seeds") {
    RunOptions opts;
    json doc = {{"seed", 10},
                {"fourier_cutoff", 32},
                {"experiments", {{{"id", "b"}, {"kind", "toeplitz"}, {"grid_size", 16}},
                                 {{"id", "a"}, {"kind", "toeplitz"}, {"seed", 3}}}}};
    auto ex = parse_config(doc, opts);
    REQUIRE(ex.size() == 2);
    CHECK(ex[0].params["fourier_cutoff"] == 32);
    CHECK(ex[0].params["grid_size"] == 16);
    CHECK(ex[1].params["grid_size"] == 256);
    CHECK(ex[0].seed == 10);
    CHECK(ex[1].seed == 3);
    opts.grid_size = 8;
    opts.seed = 100;
    ex = parse_config(doc, opts);
    CHECK(ex[0].params["grid_size"] == 16);
    CHECK(ex[1].params["grid_size"] == 8);
    CHECK(ex[0].seed == 100);
}

TEST_CASE("runner: rows sorted by id, failures reported") {
    RunOptions opts;
    json doc = {{"experiments",
                 {{{"id", "z-toeplitz"}, {"kind", "toeplitz"}, {"grid_size", 16}, {"expected", 1}},
                  {{"id", "a-gap"},
                   {"kind", "covering-check"},
                   {"grid_size", 64},
                   {"arcs", {{-0.25, 0.25}, {0.3, 0.55}, {0.42, 0.92}}}},
                  {{"id", "m-too-coarse"}, {"kind", "toeplitz"}, {"grid_size", 16}, {"fourier_cutoff", 4},
                   {"u", {{"named", "character"}, {"m", 2}}}}}}};
    auto rows = run_experiments(parse_config(doc, opts));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].id == "a-gap");
    CHECK(rows[0].error_kind == "BadCover");
    CHECK_FALSE(rows[0].pass);
    CHECK(rows[1].error_kind == "InsufficientTruncation");
    CHECK(rows[2].pass);
    const std::string csv = report_csv(rows);
    CHECK(csv == report_csv(run_experiments(parse_config(doc, opts))));
    CHECK(csv.find("wall_time") == std::string::npos);
    CHECK(report_json(rows)[2]["computed"]["tau_index"].get<double>() == doctest::Approx(1.0));
}
