#include "steinb/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace steinb {

json number_to_json(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

double number_from_json(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf")
            return kInf;
        if (s == "-inf")
            return -kInf;
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
    }
    throw SteinError(ErrorKind::Parse, "expected a number, got " + j.dump());
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const IdentityCheck& c)
{
    return {
        {"family", c.family},
        {"role", c.role},
        {"f0", c.test_function},
        {"value", number_to_json(c.expectation_value)},
        {"tolerance", number_to_json(c.tolerance)},
        {"pass", c.pass},
    };
}

namespace {

json comparator_json(const Comparator& c)
{
    return {{"name", c.name}, {"kind", std::string(to_string(c.kind))}, {"value", number_to_json(c.value)}};
}

IdentityCheck identity_from_json(const json& j)
{
    IdentityCheck c;
    c.family = j.value("family", "");
    c.role = j.value("role", "");
    c.test_function = j.at("f0").get<std::string>();
    c.expectation_value = number_from_json(j.at("value"));
    c.tolerance = j.contains("tolerance") ? number_from_json(j.at("tolerance")) : 0.0;
    c.pass = j.at("pass").get<bool>();
    return c;
}

BoundKind bound_kind_from_string(const std::string& s)
{
    if (s == "lower")
        return BoundKind::Lower;
    if (s == "upper")
        return BoundKind::Upper;
    throw SteinError(ErrorKind::Parse, "unknown bound kind '" + s + "'");
}

} // namespace

json to_json(const BoundReport& r)
{
    json j;
    j["lower"] = number_to_json(r.lower);
    j["variance"] = number_to_json(r.variance_truth);
    j["upper"] = number_to_json(r.upper);
    j["lower_slack"] = number_to_json(r.lower_slack);
    j["upper_slack"] = number_to_json(r.upper_slack);
    j["tightness_residual"] = number_to_json(r.tightness_residual);
    j["fisher"] = number_to_json(r.fisher);
    j["witness"] = r.witness ? number_to_json(*r.witness) : json(nullptr);
    j["flags"] = r.flags;
    j["comparators"] = json::array();
    for (const auto& c : r.comparators)
        j["comparators"].push_back(comparator_json(c));
    return j;
}

json to_json(const ScenarioResult& r)
{
    json j;
    j["scenario"] = r.scenario;
    if (r.report) {
        const json b = to_json(*r.report);
        for (auto& [k, v] : b.items())
            j[k] = v;
    } else {
        for (const char* k : {"lower", "variance", "upper"})
            j[k] = nullptr;
        j["flags"] = json::array();
        j["comparators"] = json::array();
    }
    j["identity_checks"] = json::array();
    for (const auto& c : r.identity_checks)
        j["identity_checks"].push_back(to_json(c));
    j["failed"] = r.failed;
    j["error"] = r.error;
    return j;
}

ScenarioResult scenario_result_from_json(const json& j)
{
    try {
        ScenarioResult r;
        r.scenario = j.at("scenario").get<std::string>();
        r.failed = j.value("failed", false);
        r.error = j.value("error", "");
        if (!j.at("lower").is_null()) {
            BoundReport b;
            b.lower = number_from_json(j.at("lower"));
            b.variance_truth = number_from_json(j.at("variance"));
            b.upper = number_from_json(j.at("upper"));
            b.lower_slack = number_from_json(j.at("lower_slack"));
            b.upper_slack = number_from_json(j.at("upper_slack"));
            b.tightness_residual = number_from_json(j.at("tightness_residual"));
            b.fisher = number_from_json(j.at("fisher"));
            if (j.contains("witness") && !j.at("witness").is_null())
                b.witness = number_from_json(j.at("witness"));
            b.flags = j.at("flags").get<std::vector<std::string>>();
            for (const auto& c : j.at("comparators"))
                b.comparators.push_back({c.at("name").get<std::string>(),
                                         bound_kind_from_string(c.at("kind").get<std::string>()),
                                         number_from_json(c.at("value"))});
            r.report = std::move(b);
        }
        for (const auto& c : j.at("identity_checks"))
            r.identity_checks.push_back(identity_from_json(c));
        return r;
    } catch (const json::exception& e) {
        throw SteinError(ErrorKind::Parse, e.what());
    }
}

json to_json(const TableRow& row)
{
    return {
        {"id", row.id},
        {"criterion", row.criterion},
        {"description", row.description},
        {"computed", number_to_json(row.computed)},
        {"expected", number_to_json(row.expected)},
        {"tolerance", number_to_json(row.tolerance)},
        {"comparison", row.comparison},
        {"pass", row.pass},
    };
}

std::string emit_json(const std::vector<ScenarioResult>& results)
{
    json j = json::array();
    for (const auto& r : results)
        j.push_back(to_json(r));
    return j.dump(2) + "\n";
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join(const std::vector<std::string>& parts, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

std::string comparators_text(const BoundReport& r)
{
    std::vector<std::string> parts;
    for (const auto& c : r.comparators)
        parts.push_back(c.name + "=" + format_number(c.value));
    return join(parts, ";");
}

std::size_t passed(const ScenarioResult& r)
{
    std::size_t n = 0;
    for (const auto& c : r.identity_checks)
        n += c.pass;
    return n;
}

} // namespace

std::string emit_csv(const std::vector<ScenarioResult>& results)
{
    std::ostringstream out;
    out << "scenario,lower,variance,upper,lower_slack,upper_slack,tightness_residual,fisher,witness,"
           "identity_passed,identity_total,flags,comparators,failed,error\n";
    for (const auto& r : results) {
        std::vector<std::string> f{csv_field(r.scenario)};
        if (r.report) {
            const BoundReport& b = *r.report;
            for (double v : {b.lower, b.variance_truth, b.upper, b.lower_slack, b.upper_slack, b.tightness_residual,
                             b.fisher})
                f.push_back(format_number(v));
            f.push_back(b.witness ? format_number(*b.witness) : "");
        } else {
            f.insert(f.end(), 8, "");
        }
        f.push_back(std::to_string(passed(r)));
        f.push_back(std::to_string(r.identity_checks.size()));
        f.push_back(csv_field(r.report ? join(r.report->flags, ";") : ""));
        f.push_back(csv_field(r.report ? comparators_text(*r.report) : ""));
        f.push_back(r.failed ? "true" : "false");
        f.push_back(csv_field(r.error));
        out << join(f, ",") << "\n";
    }
    return out.str();
}

std::string emit_markdown(const std::vector<ScenarioResult>& results)
{
    std::ostringstream out;
    out << "| scenario | lower | variance | upper | identities | flags | comparators |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& r : results) {
        out << "| " << r.scenario << " | ";
        if (r.report) {
            const BoundReport& b = *r.report;
            out << format_number(b.lower) << " | " << format_number(b.variance_truth) << " | "
                << format_number(b.upper);
            if (b.witness)
                out << " (witness " << format_number(*b.witness) << ")";
        } else {
            out << "failed | | ";
        }
        out << " | " << passed(r) << "/" << r.identity_checks.size() << " | ";
        if (r.report)
            out << join(r.report->flags, ", ") << " | " << comparators_text(*r.report);
        else
            out << r.error << " |";
        out << " |\n";
    }
    return out.str();
}

std::string emit_table_json(const std::vector<TableRow>& rows)
{
    json j;
    bool all = true;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        j["rows"].push_back(to_json(r));
        all = all && r.pass;
    }
    j["all_pass"] = all;
    return j.dump(2) + "\n";
}

std::string emit_table_csv(const std::vector<TableRow>& rows)
{
    std::ostringstream out;
    out << "id,criterion,description,computed,expected,tolerance,comparison,pass\n";
    for (const auto& r : rows)
        out << csv_field(r.id) << "," << r.criterion << "," << csv_field(r.description) << ","
            << format_number(r.computed) << "," << format_number(r.expected) << "," << format_number(r.tolerance)
            << "," << r.comparison << "," << (r.pass ? "pass" : "FAIL") << "\n";
    return out.str();
}

std::string emit_table_markdown(const std::vector<TableRow>& rows)
{
    std::ostringstream out;
    out << "| # | row | computed | expected | test | result |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        std::string test = r.comparison;
        if (r.comparison == "abs")
            test = "+/- " + format_number(r.tolerance);
        out << "| " << r.criterion << " | " << r.id << " | " << format_number(r.computed) << " | "
            << format_number(r.expected) << " | " << test << " | " << (r.pass ? "pass" : "FAIL") << " |\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

FamilySpec family_spec_from_json(const json& j)
{
    FamilySpec f;
    f.family = j.at("family").get<std::string>();
    if (j.contains("role")) {
        const json& r = j.at("role");
        if (r.is_string()) {
            f.role = role_kind_from_string(r.get<std::string>());
        } else {
            f.role = role_kind_from_string(r.at("kind").get<std::string>());
            f.value = number_from_json(r.at("value"));
        }
    } else if (is_discrete_family(f.family)) {
        f.role = RoleKind::DiscreteTheta;
    } else {
        throw SteinError(ErrorKind::Parse, "missing role for " + f.family);
    }
    if (j.contains("value"))
        f.value = number_from_json(j.at("value"));
    const json c = j.value("constants", json::object());
    for (const char* k : {"shape", "a"})
        if (c.contains(k))
            f.constants.shape = number_from_json(c.at(k));
    if (c.contains("sd"))
        f.constants.sd = number_from_json(c.at("sd"));
    for (const char* k : {"trials", "n"})
        if (c.contains(k))
            f.constants.trials = c.at(k).get<long>();
    return f;
}

json family_spec_json(const FamilySpec& f)
{
    json j;
    j["family"] = f.family;
    j["role"] = {{"kind", std::string(to_string(f.role))}, {"value", number_to_json(f.value)}};
    json c = json::object();
    if (f.constants.shape)
        c["shape"] = *f.constants.shape;
    if (f.constants.sd)
        c["sd"] = *f.constants.sd;
    if (f.constants.trials)
        c["trials"] = *f.constants.trials;
    if (!c.empty())
        j["constants"] = c;
    return j;
}

} // namespace

ScenarioSpec scenario_from_json(const json& j)
{
    try {
        if (!j.is_object())
            throw SteinError(ErrorKind::Parse, "scenario must be a JSON object");
        ScenarioSpec s;
        s.id = j.at("id").get<std::string>();
        if (s.id.empty())
            throw SteinError(ErrorKind::Parse, "empty scenario id");
        s.target = family_spec_from_json(j);
        if (j.contains("test_function")) {
            const json& t = j.at("test_function");
            if (t.is_string())
                s.test_function = t.get<std::string>();
            else if (t.contains("polynomial"))
                s.polynomial = t.at("polynomial").get<std::vector<double>>();
            else
                s.test_function = t.at("name").get<std::string>();
        }
        if (j.contains("tol"))
            s.quad_tol = number_from_json(j.at("tol"));
        if (j.contains("law"))
            s.law = family_spec_from_json(j.at("law"));
        // Reject unregistered families, roles and test functions up front.
        make_family(s.target);
        if (s.law)
            make_family(*s.law);
        scenario_test_function(s);
        return s;
    } catch (const json::exception& e) {
        throw SteinError(ErrorKind::Parse, e.what());
    } catch (const SteinError& e) {
        if (e.kind() == ErrorKind::Parse)
            throw;
        throw SteinError(ErrorKind::Parse, e.what());
    }
}

json to_json(const ScenarioSpec& s)
{
    json j;
    j["id"] = s.id;
    const json target = family_spec_json(s.target);
    for (auto& [k, v] : target.items())
        j[k] = v;
    if (!s.polynomial.empty())
        j["test_function"] = {{"polynomial", s.polynomial}};
    else
        j["test_function"] = s.test_function;
    if (s.quad_tol)
        j["tol"] = *s.quad_tol;
    if (s.law)
        j["law"] = family_spec_json(*s.law);
    return j;
}

std::vector<ScenarioSpec> parse_scenarios(std::istream& in)
{
    std::vector<ScenarioSpec> out;
    std::set<std::string> ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SteinError(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + e.what());
        }
        ScenarioSpec s;
        try {
            s = scenario_from_json(j);
        } catch (const SteinError& e) {
            throw SteinError(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!ids.insert(s.id).second)
            throw SteinError(ErrorKind::Parse, "line " + std::to_string(lineno) + ": duplicate id '" + s.id + "'");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ScenarioSpec> parse_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SteinError(ErrorKind::Parse, "cannot open scenario file '" + path + "'");
    return parse_scenarios(in);
}

} // namespace steinb
