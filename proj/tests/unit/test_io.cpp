#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "apfront/cell_problem.hpp"
#include "apfront/eigenvalue.hpp"
#include "apfront/io.hpp"

using namespace apfront;
using nlohmann::json;

TEST_CASE("coefficient specs parse from decimal strings and round trip") {
    json j = json::parse(R"({
      "a": {"constant": "2.0", "terms": [{"frequency": "1.0", "cos_amp": "1.0"}]},
      "b": {"constant": "0"},
      "c": "1.0",
      "c_tilde": {"terms": [{"frequency": "1.4142135623730951", "cos_amp": "0.3"}]}
    })");
    CoefficientSet cs = parse_coefficients(j);
    CHECK(cs.a(0.0) == doctest::Approx(3.0));
    CHECK(cs.c.mean() == 1.0);
    CHECK(cs.c_tilde.mean() == 0.0);
    CHECK(cs.alpha_m == doctest::Approx(1.0).epsilon(1e-8));

    json back = coefficients_to_json(cs);
    CoefficientSet cs2 = parse_coefficients(back);
    for (double x : {0.0, 0.37, 5.11})
        CHECK(cs2.a(x) == doctest::Approx(cs.a(x)).epsilon(1e-15));
}

TEST_CASE("format_decimal round trips doubles bit-exactly") {
    for (double v : {1.0 / 3.0, 2.0, -1.7320508075688772e-5, 1e300}) {
        const std::string s = format_decimal(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("bad specs raise ConfigError") {
    CHECK_THROWS_AS(parse_coefficients(json::parse(R"({"b": "0"})")), ConfigError);
    CHECK_THROWS_AS(parse_ap_function(json::parse(R"({"constant": "x17"})")), ConfigError);
    CHECK_THROWS_AS(
        parse_ap_function(json::parse(R"({"terms": [{"frequency": "-1", "cos_amp": "1"}]})")),
        ConfigError);
}

TEST_CASE("csv writer quotes per RFC 4180") {
    const auto path = std::filesystem::temp_directory_path() / "apfront_csv_test.csv";
    {
        CsvWriter w(path);
        w.header({"name", "value"});
        w.row({"plain", "1.5"});
        w.row({"with,comma", "quote\"inside"});
    }
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == "name,value\nplain,1.5\n\"with,comma\",\"quote\"\"inside\"\n");
    std::filesystem::remove(path);
}

TEST_CASE("csv writer enforces row width") {
    const auto path = std::filesystem::temp_directory_path() / "apfront_csv_test2.csv";
    CsvWriter w(path);
    w.header({"a", "b"});
    CHECK_THROWS_AS(w.row({"1"}), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("diagnostic dumps: cell solve and hbar table") {
    using namespace apfront;
    Grid1D g;
    g.x_lo = 0.0;
    g.x_hi = 10.0;
    g.n = 64;
    CellCoefficients cf;
    cf.a.assign(64, 1.0);
    cf.b.assign(64, 0.0);
    cf.C.assign(64, 1.0);
    DiscountedSolve s = solve_discounted(cf, g, 0.5, SolveOptions{});
    const auto p1 = std::filesystem::temp_directory_path() / "apfront_cell.csv";
    write_cell_csv(p1, g, s);
    std::ifstream is(p1);
    std::string header;
    std::getline(is, header);
    CHECK(header == "x,u,eps_u");
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == 64);
    std::filesystem::remove(p1);

    CoefficientSet cs = assemble_coefficients(APFunction(1.0), APFunction(0.0),
                                              APFunction(1.0, {{1.0, 0.5, 0.0}}),
                                              APFunction(0.0));
    EigenOptions o;
    o.hbar_x_samples = 5;
    o.hbar_q_samples = 9;
    HBarCurve curve = build_hbar_curve(cs, -2.0, 2.0, o);
    CHECK(curve.convex_ok);
    CHECK(curve.growth_ok);
    const auto p2 = std::filesystem::temp_directory_path() / "apfront_hbar.csv";
    write_hbar_csv(p2, curve);
    std::ifstream is2(p2);
    std::getline(is2, header);
    CHECK(header == "x,q,hbar");
    rows = 0;
    for (std::string line; std::getline(is2, line);) ++rows;
    CHECK(rows == 5 * 9);
    std::filesystem::remove(p2);
}
