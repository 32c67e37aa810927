#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "steinb/report.hpp"

using namespace steinb;

namespace {

bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

void check_equal(const ScenarioResult& a, const ScenarioResult& b)
{
    CHECK(a.scenario == b.scenario);
    CHECK(a.failed == b.failed);
    CHECK(a.error == b.error);
    CHECK(a.identity_checks == b.identity_checks);
    REQUIRE(a.report.has_value() == b.report.has_value());
    if (!a.report)
        return;
    const BoundReport& x = *a.report;
    const BoundReport& y = *b.report;
    CHECK(same_number(x.lower, y.lower));
    CHECK(same_number(x.variance_truth, y.variance_truth));
    CHECK(same_number(x.upper, y.upper));
    CHECK(same_number(x.lower_slack, y.lower_slack));
    CHECK(same_number(x.upper_slack, y.upper_slack));
    CHECK(same_number(x.tightness_residual, y.tightness_residual));
    CHECK(same_number(x.fisher, y.fisher));
    CHECK(x.witness == y.witness);
    CHECK(x.flags == y.flags);
    CHECK(x.comparators == y.comparators);
}

std::vector<ScenarioResult> sample_results()
{
    auto specs = builtin_scenarios();
    ScenarioSpec bad;
    bad.id = "zz-failing";
    bad.target = {"exponential", RoleKind::Location, 0.0, {}};
    specs.push_back(bad);
    return run_scenarios(specs, {}, 2);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"')
            quoted = !quoted;
        else if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s)
{
    if (s == "inf")
        return kInf;
    return std::stod(s);
}

} // namespace

TEST_CASE("number encoding")
{
    CHECK(number_to_json(kInf) == "inf");
    CHECK(number_to_json(-kInf) == "-inf");
    CHECK(number_to_json(0.25) == 0.25);
    CHECK(number_from_json(json("inf")) == kInf);
    CHECK(std::isnan(number_from_json(json("nan"))));
    CHECK_THROWS_AS(number_from_json(json("many")), SteinError);
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
    for (double v : {0.1 + 0.2, 1.0 / 3.0, 2.3443204575812016, 6.02214076e23})
        CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("JSON schema")
{
    const auto results = sample_results();
    const json j = json::parse(emit_json(results));
    REQUIRE(j.is_array());
    for (const auto& r : j) {
        for (const char* k : {"scenario", "lower", "variance", "upper", "flags", "comparators", "identity_checks"})
            CHECK(r.contains(k));
        for (const auto& c : r["identity_checks"]) {
            CHECK(c.contains("f0"));
            CHECK(c.contains("value"));
            CHECK(c["pass"].is_boolean());
        }
        for (const auto& c : r["comparators"]) {
            CHECK(c.contains("name"));
            CHECK(c.contains("kind"));
            CHECK(c.contains("value"));
        }
    }
    const auto skew = std::find_if(j.begin(), j.end(), [](const json& r) { return r["scenario"] == "gauss-skew-h-linear"; });
    REQUIRE(skew != j.end());
    CHECK((*skew)["upper"] == "inf");
}

TEST_CASE("report round trip")
{
    const auto results = sample_results();
    const json j = json::parse(emit_json(results));
    REQUIRE(j.size() == results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        CAPTURE(results[i].scenario);
        check_equal(scenario_result_from_json(j[i]), results[i]);
    }
    CHECK(results.back().failed);
    CHECK_THROWS_AS(scenario_result_from_json(json::object()), SteinError);
}

TEST_CASE("CSV and JSON carry the same numbers")
{
    const auto results = sample_results();
    const json j = json::parse(emit_json(results));
    std::istringstream csv(emit_csv(results));
    std::string line;
    std::getline(csv, line);
    const auto header = split(line);
    CHECK(header.front() == "scenario");
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        const auto cells = split(line);
        REQUIRE(cells.size() == header.size());
        const json& r = j[row++];
        CHECK(cells[0] == r["scenario"].get<std::string>());
        if (r["lower"].is_null())
            continue;
        for (std::size_t k = 1; k <= 7; ++k) {
            const double from_csv = parse_number(cells[k]);
            const double from_json = number_from_json(r[header[k] == "variance" ? "variance" : header[k]]);
            if (std::isinf(from_json)) {
                CHECK(std::isinf(from_csv));
            } else {
                char a[32];
                char b[32];
                std::snprintf(a, sizeof a, "%.14e", from_csv);
                std::snprintf(b, sizeof b, "%.14e", from_json);
                CHECK(std::string(a) == std::string(b));
            }
        }
    }
    CHECK(row == results.size());
}

TEST_CASE("markdown output")
{
    const auto md = emit_markdown(sample_results());
    CHECK(md.find("| scenario |") == 0);
    CHECK(md.find("exp-sca-h-sqrt") != std::string::npos);
    CHECK(md.find("witness") != std::string::npos);
}

TEST_CASE("scenario files")
{
    std::istringstream in(
        "# comment\n"
        "\n"
        R"({"id": "a", "family": "gamma", "role": {"kind": "scale", "value": 2}, "constants": {"shape": 3}, "test_function": "sqrt", "tol": 1e-10})"
        "\n"
        R"({"id": "b", "family": "binomial", "role": {"kind": "theta", "value": 0.4}, "constants": {"n": 8}, "test_function": {"polynomial": [0, 1, 1]}})"
        "\n"
        R"({"id": "c", "family": "poisson", "value": 1, "law": {"family": "poisson", "role": {"kind": "theta", "value": 2}}})"
        "\n");
    const auto specs = parse_scenarios(in);
    REQUIRE(specs.size() == 3);
    CHECK(specs[0].target.constants.shape == 3.0);
    CHECK(specs[0].target.role == RoleKind::Scale);
    CHECK(specs[0].quad_tol == 1e-10);
    CHECK(specs[1].polynomial == std::vector<double>{0, 1, 1});
    CHECK(specs[1].target.constants.trials == 8);
    CHECK(specs[2].target.role == RoleKind::DiscreteTheta);
    REQUIRE(specs[2].law);
    CHECK(specs[2].law->value == 2.0);

    // Round trip through the writer.
    for (const auto& s : specs)
        CHECK(scenario_from_json(to_json(s)) == s);
    for (const auto& s : builtin_scenarios())
        CHECK(scenario_from_json(json::parse(to_json(s).dump())) == s);
}

TEST_CASE("scenario file errors")
{
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_scenarios(in);
    };
    auto kind_of = [&](const std::string& text) {
        try {
            parse(text);
        } catch (const SteinError& e) {
            return e.kind();
        }
        FAIL("no error for " << text);
        return ErrorKind::NonFinite;
    };
    CHECK(kind_of("{\"id\": \"a\",\n") == ErrorKind::Parse);
    CHECK(kind_of(R"({"family": "gaussian", "role": {"kind": "location", "value": 0}})") == ErrorKind::Parse);
    CHECK(kind_of(R"({"id": "a", "family": "cauchy", "role": {"kind": "location", "value": 0}})") == ErrorKind::Parse);
    CHECK(kind_of(R"({"id": "a", "family": "gaussian", "role": {"kind": "theta", "value": 0}})") == ErrorKind::Parse);
    CHECK(kind_of(R"({"id": "a", "family": "gaussian", "role": {"kind": "location", "value": 0}, "test_function": "tan"})") ==
          ErrorKind::Parse);
    CHECK(kind_of(R"({"id": "a", "family": "poisson", "value": 1})"
                  "\n"
                  R"({"id": "a", "family": "poisson", "value": 2})") == ErrorKind::Parse);
    CHECK_THROWS_AS(parse_scenario_file("/nonexistent/file.jsonl"), SteinError);
}

TEST_CASE("table emitters")
{
    std::vector<TableRow> rows{{"r1", 1, "first", 1.0, 1.0, 1e-8, "abs", true},
                               {"r2", 4, "second", kInf, kInf, 0.0, "inf", true},
                               {"r3", 9, "third, with comma", 2.0, 1.0, 0.0, "le", false}};
    const json j = json::parse(emit_table_json(rows));
    CHECK(j["rows"].size() == 3);
    CHECK(j["all_pass"] == false);
    CHECK(j["rows"][1]["computed"] == "inf");
    const auto csv = emit_table_csv(rows);
    CHECK(csv.find("\"third, with comma\"") != std::string::npos);
    CHECK(csv.find("FAIL") != std::string::npos);
    CHECK(emit_table_markdown(rows).find("+/- 1e-08") != std::string::npos);
}
