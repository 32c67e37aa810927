// steinb: Stein-operator identity checks and variance bounds from scenario files.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "steinb/report.hpp"

using namespace steinb;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Options {
    std::string file;
    bool builtin = false;
    std::string out;
    std::string format;
    std::optional<double> tol;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool list = false;
};

Tolerances resolve_tolerances(const Options& o)
{
    if (o.tol)
        return Tolerances::from_quad(*o.tol);
    if (const char* env = std::getenv("STEINB_TOL"); env && *env) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0))
            throw SteinError(ErrorKind::Parse, std::string("STEINB_TOL is not a positive number: ") + env);
        return Tolerances::from_quad(v);
    }
    return {};
}

std::vector<ScenarioSpec> load(const Options& o)
{
    if (o.builtin)
        return builtin_scenarios();
    if (o.file.empty())
        throw SteinError(ErrorKind::Parse, "no scenario file given (or pass --builtin)");
    return parse_scenario_file(o.file);
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SteinError(ErrorKind::Parse, "cannot write '" + path + "'");
    out << text;
}

std::string render(const std::vector<ScenarioResult>& results, const std::string& format)
{
    if (format == "csv")
        return emit_csv(results);
    if (format == "md")
        return emit_markdown(results);
    return emit_json(results);
}

std::string render(const std::vector<TableRow>& rows, const std::string& format)
{
    if (format == "csv")
        return emit_table_csv(rows);
    if (format == "md")
        return emit_table_markdown(rows);
    return emit_table_json(rows);
}

bool all_identities_pass(const ScenarioResult& r)
{
    return std::all_of(r.identity_checks.begin(), r.identity_checks.end(), [](const auto& c) { return c.pass; });
}

int cmd_check(const Options& o)
{
    const auto specs = load(o);
    const auto results = run_scenarios(specs, resolve_tolerances(o), o.jobs, true);
    bool ok = true;
    std::printf("%-32s %10s  %s\n", "scenario", "passed", "worst |E[T f0]|");
    for (const auto& r : results) {
        std::size_t passed = 0;
        double worst = 0.0;
        for (const auto& c : r.identity_checks) {
            passed += c.pass;
            worst = std::max(worst, std::abs(c.expectation_value));
        }
        const bool good = !r.failed && all_identities_pass(r);
        ok = ok && good;
        std::printf("%-32s %4zu/%-5zu  %-12s %s\n", r.scenario.c_str(), passed, r.identity_checks.size(),
                    format_number(worst).c_str(), good ? "ok" : r.failed ? r.error.c_str() : "FAIL");
    }
    if (!o.out.empty())
        write_file(o.out, render(results, o.format.empty() ? "json" : o.format));
    return ok ? kOk : kFailure;
}

int cmd_bounds(const Options& o)
{
    const auto specs = load(o);
    const auto results = run_scenarios(specs, resolve_tolerances(o), o.jobs, false);
    const std::string text = render(results, o.format.empty() ? "json" : o.format);
    if (o.out.empty())
        std::cout << text;
    else
        write_file(o.out, text);
    bool ok = true;
    for (const auto& r : results) {
        const bool sandwich = r.report && std::find(r.report->flags.begin(), r.report->flags.end(),
                                                    "sandwich-violation") != r.report->flags.end();
        if (r.failed || !all_identities_pass(r) || sandwich) {
            ok = false;
            std::cerr << "steinb: scenario " << r.scenario << " failed"
                      << (r.error.empty() ? "" : ": " + r.error) << "\n";
        }
    }
    return ok ? kOk : kFailure;
}

int cmd_fisher(const Options& o)
{
    const auto specs = load(o);
    const Tolerances tol = resolve_tolerances(o);
    json rows = json::array();
    bool ok = true;
    for (const auto& s : specs) {
        json row;
        row["scenario"] = s.id;
        try {
            const AnyFamily fam = make_family(s.target);
            const ScoreProfile p = std::visit(
                [&](const auto& f) {
                    using F = std::decay_t<decltype(f)>;
                    return score_profile(f, std::is_same_v<F, DiscreteFamily> ? tol.series : tol.quad);
                },
                fam);
            row["fisher"] = number_to_json(p.fisher);
            const char* verdict = p.monotonicity.verdict == Monotonicity::Increasing   ? "increasing"
                                  : p.monotonicity.verdict == Monotonicity::Decreasing ? "decreasing"
                                                                                       : "not-monotone";
            row["score"] = verdict;
            row["witness"] = p.monotonicity.witness ? number_to_json(*p.monotonicity.witness) : json(nullptr);
            row["zero_crossing"] = p.zero_crossing ? number_to_json(*p.zero_crossing) : json(nullptr);
        } catch (const std::exception& e) {
            row["error"] = e.what();
            ok = false;
        }
        rows.push_back(row);
    }
    std::string text;
    const std::string fmt = o.format.empty() ? "json" : o.format;
    if (fmt == "json") {
        text = rows.dump(2) + "\n";
    } else {
        const bool md = fmt == "md";
        text = md ? "| scenario | fisher | score | witness |\n|---|---|---|---|\n" : "scenario,fisher,score,witness\n";
        for (const auto& r : rows) {
            auto cell = [&](const char* k) {
                if (!r.contains(k) || r[k].is_null())
                    return std::string();
                return r[k].is_number() ? format_number(r[k].get<double>()) : r[k].get<std::string>();
            };
            const std::string score = r.contains("error") ? cell("error") : cell("score");
            if (md)
                text += "| " + cell("scenario") + " | " + cell("fisher") + " | " + score + " | " + cell("witness") +
                        " |\n";
            else
                text += cell("scenario") + "," + cell("fisher") + "," + score + "," + cell("witness") + "\n";
        }
    }
    if (o.out.empty())
        std::cout << text;
    else
        write_file(o.out, text);
    return ok ? kOk : kFailure;
}

int cmd_table(const Options& o)
{
    if (o.list) {
        for (const auto& id : worked_example_row_ids())
            std::cout << id << "\n";
        return kOk;
    }
    const auto rows = worked_example_table(resolve_tolerances(o));
    if (o.out.empty()) {
        std::cout << render(rows, o.format.empty() ? "md" : o.format);
    } else {
        write_file(o.out, render(rows, o.format.empty() ? "json" : o.format));
        std::cout << emit_table_markdown(rows);
    }
    const bool ok = std::all_of(rows.begin(), rows.end(), [](const TableRow& r) { return r.pass; });
    return ok ? kOk : kFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Parametric Stein operators: identity checks and variance bounds"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool takes_file) {
        if (takes_file) {
            sub->add_option("file", o.file, "Scenario file, one JSON object per line");
            sub->add_flag("--builtin", o.builtin, "Use the built-in scenario list");
        }
        sub->add_option("--out", o.out, "Write the machine-readable report here");
        sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv", "md"}));
        sub->add_option("--tol", o.tol, "Quadrature tolerance (overrides STEINB_TOL)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--jobs", o.jobs, "Scenarios evaluated in parallel")->check(CLI::PositiveNumber);
    };
    auto* check = app.add_subcommand("check", "Run the Stein identity checks only");
    common(check, true);
    auto* bounds = app.add_subcommand("bounds", "Bound reports with comparators and flags");
    common(bounds, true);
    auto* fisher = app.add_subcommand("fisher", "Fisher information and score monotonicity");
    common(fisher, true);
    auto* table = app.add_subcommand("paper-table", "Reproduce the worked-example table");
    common(table, false);
    table->add_flag("--list", o.list, "Print row ids without computing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (check->parsed())
            return cmd_check(o);
        if (bounds->parsed())
            return cmd_bounds(o);
        if (fisher->parsed())
            return cmd_fisher(o);
        return cmd_table(o);
    } catch (const SteinError& e) {
        std::cerr << "steinb: " << e.what() << "\n";
        return e.kind() == ErrorKind::Parse ? kUsage : kFailure;
    } catch (const std::exception& e) {
        std::cerr << "steinb: " << e.what() << "\n";
        return kFailure;
    }
}
