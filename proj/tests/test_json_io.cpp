#include <catch_amalgamated.hpp>

#include "delaystab/json_io.hpp"
#include "test_util.hpp"

using namespace delaystab;
using Catch::Approx;

TEST_CASE("linear problem files round-trip through the schema", "[io]") {
    const char* text = R"({
        "equation_class": "linear",
        "a": {"kind": "piecewise_periodic", "period": 1.0,
              "pieces": [{"from": 0.0, "to": 0.25, "value": 5.4},
                         {"from": 0.25, "to": 1.0, "value": 0.0}]},
        "terms": [
            {"b": {"kind": "constant", "value": 1.8},
             "delay": {"kind": "floor_argument"}},
            {"b": {"kind": "sinusoid_affine", "offset": 1.0, "amplitude": 0.5, "frequency": 2.0},
             "delay": {"kind": "constant_lag", "tau": 0.5},
             "kernel": {"kind": "atoms", "atoms": [{"position": 0.0, "weight": 0.25},
                                                   {"position": 1.0, "weight": 0.75}]}}
        ],
        "initial": {"history": {"kind": "constant", "value": 1.0}, "value_at_zero": 1.0},
        "horizon": 12.0
    })";
    ProblemFile pf = parse_problem(json::parse(text));
    REQUIRE(pf.is_linear());
    const auto& p = std::get<LinearDDE>(pf.problem);
    CHECK(p.concentrated_terms.size() == 1);
    CHECK(p.distributed_terms.size() == 1);
    CHECK(pf.horizon == 12.0);
    CHECK(evaluate(p.a, 0.1) == Approx(5.4));

    // serialize and parse again: same structure, same evaluations
    ProblemFile back = parse_problem(to_json(pf));
    const auto& q = std::get<LinearDDE>(back.problem);
    for (int i = 0; i <= 20; ++i) {
        const double t = 0.6 * i;
        CHECK(evaluate(q.a, t) == evaluate(p.a, t));
        CHECK(evaluate(q.concentrated_terms[0].b, t) ==
              evaluate(p.concentrated_terms[0].b, t));
    }
    // and serialization is idempotent byte for byte
    CHECK(to_json(back).dump() == to_json(pf).dump());
}

TEST_CASE("nonlinear and respiratory problem files parse", "[io]") {
    const char* nl = R"({
        "equation_class": "nonlinear",
        "f": {"kind": "linear_gain", "gain": 1.0},
        "terms": [{"g": {"kind": "linear_gain", "gain": 0.5},
                   "delay": {"kind": "constant_lag", "tau": 1.0}}],
        "sector_bounds": {"a0": 1.0, "A": 1.0, "b_k": [0.5], "box": [-1.0, 1.0]},
        "initial": {"history": {"kind": "constant", "value": 0.5}, "value_at_zero": 0.5},
        "horizon": 30.0
    })";
    ProblemFile pf = parse_problem(json::parse(nl));
    REQUIRE(pf.is_nonlinear());
    CHECK(std::get<NonlinearDDE>(pf.problem).sector_bounds.b0() == Approx(0.5));

    const char* mg = R"({
        "equation_class": "mackey_glass",
        "alpha": 1.0, "beta": 0.5, "n": 4.0,
        "r_spec": {"kind": "sinusoid_affine", "offset": 2.7, "amplitude": 0.3, "frequency": 1.0},
        "r0": 2.4, "R": 3.0,
        "lag": {"kind": "constant_lag", "tau": 1.0},
        "K_override": 1.5,
        "horizon": 100.0
    })";
    ProblemFile mgf = parse_problem(json::parse(mg));
    REQUIRE(mgf.is_mackey_glass());
    REQUIRE(mgf.K_override.has_value());
    CHECK(*mgf.K_override == 1.5);
    CHECK(std::get<MackeyGlassProblem>(mgf.problem).params.r0 == 2.4);
}

TEST_CASE("schema violations carry a usable message", "[io]") {
    CHECK_THROWS_AS(parse_problem(json::parse(R"({"equation_class": "quadratic",
                                                  "horizon": 1.0})")),
                    SchemaError);
    CHECK_THROWS_AS(parse_problem(json::parse(R"({"equation_class": "linear",
                                                  "horizon": 1.0})")),
                    SchemaError);  // missing terms
    CHECK_THROWS_AS(
        parse_problem(json::parse(
            R"({"equation_class": "linear", "horizon": 1.0,
                "terms": [{"b": {"kind": "warp", "value": 1}, "delay": {"kind": "constant_lag", "tau": 1}}],
                "initial": {"history": {"kind": "constant", "value": 1}, "value_at_zero": 1}})")),
        SchemaError);  // unknown function kind

    SECTION("syntax errors report the line") {
        auto dir = testutil::make_temp_dir("io");
        testutil::write_file(dir / "bad.json", "{\n  \"equation_class\": \"linear\",\n");
        try {
            load_problem((dir / "bad.json").string());
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find(":3") != std::string::npos);
        }
    }
}

TEST_CASE("verdicts serialize with the documented keys", "[io]") {
    Verdict v = check_thm1(1.0, 1.5, 2.0);
    json j = to_json(v);
    CHECK(j.at("criterion") == "Thm1");
    CHECK(j.at("certified") == false);
    CHECK(j.at("status") == "inconclusive");
    CHECK(j.at("lhs").get<double>() == Approx(0.0902).margin(5e-5));
    CHECK(j.at("rhs").get<double>() == Approx(0.1431).margin(5e-5));
    CHECK(j.at("inputs").at("a") == 1.0);

    SECTION("infinities become strings") {
        Verdict trivial = check_thm1(1.0, 0.0, 5.0);
        json jt = to_json(trivial);
        CHECK(jt.at("lhs") == "inf");
        CHECK(jt.at("rhs") == "-inf");
        CHECK(jt.at("certified") == true);
    }
}
