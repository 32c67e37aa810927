#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "steinb/bounds.hpp"

namespace steinb {

inline constexpr double kContinuousIdentityTol = 1e-8;
inline constexpr double kDiscreteIdentityTol = 1e-9;

struct Tolerances {
    double quad = 1e-12;
    double series = 1e-14;

    /// Same relative looseness applied to both.
    static Tolerances from_quad(double quad_tol);
};

struct IdentityCheck {
    std::string family;
    std::string role;
    std::string test_function;
    double expectation_value = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    friend bool operator==(const IdentityCheck&, const IdentityCheck&) = default;
};

using AnyFamily = std::variant<ContinuousFamily, DiscreteFamily>;

/// E[T(f0)(X)] including any Dirac term, X ~ fam at theta0.
IdentityCheck check_identity(const ContinuousFamily& fam, const TestFunction& f0, const Tolerances& tol = {});
IdentityCheck check_identity(const DiscreteFamily& fam, const TestFunction& f0, const Tolerances& tol = {});

/// The operator of `fam` averaged under a different law.
IdentityCheck falsify_identity(const ContinuousFamily& fam, const TestFunction& f0, const ContinuousFamily& wrong_law,
                               const Tolerances& tol = {});
IdentityCheck falsify_identity(const DiscreteFamily& fam, const TestFunction& f0, const DiscreteFamily& wrong_law,
                               const Tolerances& tol = {});

/// Built-in f0 family for identity checks: monomials of degree <= 4 times a
/// compact bump, the bare monomials, and Hermite-weighted functions for the
/// Gaussian location operator.
std::vector<TestFunction> identity_test_functions(const ContinuousFamily& fam);
std::vector<TestFunction> identity_test_functions(const DiscreteFamily& fam);

/// Every registered operator with its built-in test family.
std::vector<IdentityCheck> identity_suite(const Tolerances& tol = {});

struct FalsificationCase {
    std::string label;
    IdentityCheck control;    // same law
    IdentityCheck perturbed;  // wrong law
};

/// One perturbed law per registered operator, each with its same-law control.
std::vector<FalsificationCase> falsification_suite(const Tolerances& tol = {});

double ground_truth_variance(const ContinuousFamily& fam, const TestFunction& h, double tol = 1e-12);
double ground_truth_variance(const DiscreteFamily& fam, const TestFunction& h, double tol = 1e-14);

BoundReport bound_report(const ContinuousFamily& fam, const TestFunction& h, const Tolerances& tol = {});
BoundReport bound_report(const DiscreteFamily& fam, const TestFunction& h, const Tolerances& tol = {});

/// Seeded Monte Carlo estimate of Var[h(X)], for diagnostics only.
double monte_carlo_variance(const ContinuousFamily& fam, const TestFunction& h, std::size_t draws,
                            std::uint64_t seed);
double monte_carlo_variance(const DiscreteFamily& fam, const TestFunction& h, std::size_t draws,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scenarios

struct FamilySpec {
    std::string family;
    RoleKind role = RoleKind::Location;
    double value = 0.0;
    FamilyConstants constants;

    friend bool operator==(const FamilySpec& a, const FamilySpec& b)
    {
        return a.family == b.family && a.role == b.role && a.value == b.value &&
               a.constants.shape == b.constants.shape && a.constants.sd == b.constants.sd &&
               a.constants.trials == b.constants.trials;
    }
};

struct ScenarioSpec {
    std::string id;
    FamilySpec target;
    std::string test_function = "x";        // named test function
    std::vector<double> polynomial;         // used instead of the name when non-empty
    std::optional<double> quad_tol;
    std::optional<FamilySpec> law;           // evaluate identities under this law instead

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct ScenarioResult {
    std::string scenario;
    bool failed = false;
    std::string error;
    std::optional<BoundReport> report;
    std::vector<IdentityCheck> identity_checks;
    double wall_time = 0.0;  // seconds; not serialized
};

AnyFamily make_family(const FamilySpec& spec);
TestFunction scenario_test_function(const ScenarioSpec& spec);
TestFunction test_function_by_name(std::string_view name);

/// Identity checks only (the check subcommand).
ScenarioResult run_identity_checks(const ScenarioSpec& spec, const Tolerances& tol = {});
/// Identity checks, bound report and comparators.
ScenarioResult run_scenario(const ScenarioSpec& spec, const Tolerances& tol = {});

/// Runs scenarios on up to `jobs` threads; results sorted by scenario id.
std::vector<ScenarioResult> run_scenarios(const std::vector<ScenarioSpec>& specs, const Tolerances& tol,
                                          unsigned jobs, bool identity_only = false);

/// Scenarios named in the worked examples, addressable by id.
std::vector<ScenarioSpec> builtin_scenarios();

// ---------------------------------------------------------------------------
// Worked-example table

struct TableRow {
    std::string id;
    int criterion = 0;
    std::string description;
    double computed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string comparison;  // "abs", "le", "ge", "inf", "flag"
    bool pass = false;
};

std::vector<std::string> worked_example_row_ids();
std::vector<TableRow> worked_example_table(const Tolerances& tol = {});

} // namespace steinb
