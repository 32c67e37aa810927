// Acceptance matrix: one line per criterion, exit status 0 iff every criterion holds.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>

#include "steinb/report.hpp"

using namespace steinb;

namespace {

const std::map<int, const char*> kTitles = {
    {1, "Gaussian Fisher informations (location, scale, skew kappa)"},
    {2, "Gamma Fisher informations, vacuous case a = 1.5"},
    {3, "Poisson Fisher information and discrete lower bounds"},
    {4, "Exponential sqrt chain with comparators"},
    {5, "Equality cases and tightness residuals"},
    {6, "Identity suite and perturbed-law falsification"},
    {7, "Closed-form operators vs difference quotient"},
    {8, "Poincare constants"},
    {9, "Shift invariance and c^2 equivariance"},
    {10, "Determinism of the worked-example report"},
};

} // namespace

int main()
{
    const auto start = std::chrono::steady_clock::now();
    const auto first = worked_example_table();
    // Criterion 10 also compares two complete runs of the table itself.
    const auto second = worked_example_table();
    const bool identical = emit_table_json(first) == emit_table_json(second);

    std::map<int, std::pair<int, int>> tally;
    std::map<int, std::string> failures;
    for (const auto& r : first) {
        auto& [passed, total] = tally[r.criterion];
        ++total;
        passed += r.pass;
        if (!r.pass)
            failures[r.criterion] += "      " + r.id + ": computed " + format_number(r.computed) + ", expected " +
                                     r.comparison + " " + format_number(r.expected) + "\n";
    }
    if (!identical)
        failures[10] += "      two table runs serialized differently\n";

    bool all = true;
    for (const auto& [criterion, title] : kTitles) {
        const auto [passed, total] = tally[criterion];
        const bool ok = total > 0 && passed == total && failures[criterion].empty();
        all = all && ok;
        std::printf("%s  criterion %2d  %-62s %d/%d rows%s\n", ok ? "PASS" : "FAIL", criterion, title, passed, total,
                    criterion == 10 ? (identical ? " + byte-identical rerun" : " + rerun differs") : "");
        if (!ok)
            std::fputs(failures[criterion].c_str(), stdout);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s (%.2f s)\n", all ? "all acceptance criteria pass" : "acceptance criteria FAILED", secs);
    return all ? 0 : 1;
}
