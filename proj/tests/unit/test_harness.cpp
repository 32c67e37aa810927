#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "steinb/harness.hpp"
#include "steinb/report.hpp"

using namespace steinb;

namespace {

const TestFunction one = constant_function(1.0);
const TestFunction ident = polynomial({0.0, 1.0});

ScenarioSpec builtin(const std::string& id)
{
    for (const auto& s : builtin_scenarios())
        if (s.id == id)
            return s;
    FAIL("no builtin scenario " << id);
    return {};
}

double rel(double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST_CASE("identity checks")
{
    const auto g = check_identity(gaussian(ParamRole::location(0.0)), ident);
    CHECK(std::abs(g.expectation_value) < 1e-10);
    CHECK(g.pass);
    CHECK(g.tolerance == kContinuousIdentityTol);
    CHECK(g.family == "gaussian");
    CHECK(g.role == "location");

    CHECK(std::abs(check_identity(exponential(ParamRole::scale(1.0)), one).expectation_value) < 1e-10);
    const auto p = check_identity(poisson(1.0), one);
    CHECK(std::abs(p.expectation_value) < 1e-10);
    CHECK(p.tolerance == kDiscreteIdentityTol);
    CHECK(std::abs(check_identity(exponential(ParamRole::location(0.0)), ident).expectation_value) < 1e-10);
    // With f0(0) != 0 the Dirac term is needed for the identity to hold.
    CHECK(std::abs(check_identity(exponential(ParamRole::location(0.5)), one).expectation_value) < 1e-10);
}

TEST_CASE("falsification")
{
    const auto wrong = falsify_identity(gaussian(ParamRole::location(0.0)), ident,
                                        gaussian(ParamRole::location(0.0), std::sqrt(2.0)));
    CHECK(wrong.expectation_value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(wrong.pass);

    const auto pois = falsify_identity(poisson(1.0), one, poisson(2.0));
    CHECK(pois.expectation_value == doctest::Approx(-std::numbers::e).epsilon(1e-12));

    const auto same = falsify_identity(poisson(1.0), one, poisson(1.0));
    CHECK(same.pass);

    for (const auto& c : falsification_suite()) {
        CAPTURE(c.label);
        CHECK(c.control.pass);
        CHECK(std::abs(c.perturbed.expectation_value) > 10.0 * c.perturbed.tolerance);
    }
}

TEST_CASE("identity suite passes")
{
    const auto suite = identity_suite();
    CHECK(suite.size() > 100);
    std::set<std::string> families;
    for (const auto& c : suite) {
        CAPTURE(c.family);
        CAPTURE(c.role);
        CAPTURE(c.test_function);
        CHECK(c.pass);
        families.insert(c.family);
    }
    for (const char* f : {"gaussian", "sas-gaussian", "exponential", "gamma", "quartic", "poisson", "geometric",
                          "binomial"})
        CHECK(families.count(f) == 1);
}

TEST_CASE("built-in test family")
{
    const auto fs = identity_test_functions(gaussian(ParamRole::location(0.0)));
    CHECK(fs.size() == 16);
    CHECK(identity_test_functions(gaussian(ParamRole::scale(1.0))).size() == 10);
    CHECK(identity_test_functions(poisson(1.0)).size() == 10);
}

TEST_CASE("ground truth variance")
{
    CHECK(ground_truth_variance(gaussian(ParamRole::location(0.0)), ident) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ground_truth_variance(exponential(ParamRole::scale(1.0)), sqrt_function()) -
                   (1.0 - std::numbers::pi / 4.0)) < 1e-8);
    // Touchard: E[X^4] = 15, E[X^2] = 2 for Poisson(1)
    CHECK(std::abs(ground_truth_variance(poisson(1.0), polynomial({0.0, 0.0, 1.0})) - 11.0) < 1e-8);

    // E[1/X] diverges under the exponential law.
    TestFunction inv_sqrt;
    inv_sqrt.name = "x^-1/2";
    inv_sqrt.value = [](double x) { return 1.0 / std::sqrt(x); };
    inv_sqrt.first = [](double x) { return -0.5 / (x * std::sqrt(x)); };
    try {
        ground_truth_variance(exponential(ParamRole::scale(1.0)), inv_sqrt);
        FAIL("expected DivergentMoment");
    } catch (const SteinError& e) {
        CHECK(e.kind() == ErrorKind::DivergentMoment);
    }
}

TEST_CASE("bound reports")
{
    const auto r = bound_report(exponential(ParamRole::scale(1.0)), sqrt_function());
    CHECK(std::abs(r.lower - 0.19635) < 1e-5);
    CHECK(std::abs(r.variance_truth - 0.21460) < 1e-5);
    CHECK(std::abs(r.upper - 0.25) < 1e-10);
    CHECK(r.lower_slack == doctest::Approx(r.variance_truth - r.lower));
    CHECK(r.upper_slack == doctest::Approx(r.upper - r.variance_truth));
    CHECK(r.flags.empty());

    const auto skew = bound_report(sas_gaussian(0.0), ident);
    CHECK(std::isinf(skew.upper));
    REQUIRE(skew.witness);
    CHECK(std::abs(*skew.witness) < 1e-3);
    CHECK(std::count(skew.flags.begin(), skew.flags.end(), "infinite-upper") == 1);

    const auto vac = bound_report(gamma_family(ParamRole::location(0.0), 1.5), ident);
    CHECK(vac.lower == 0.0);
    CHECK(std::count(vac.flags.begin(), vac.flags.end(), "vacuous") == 1);

    const auto sq = bound_report(poisson(1.0), polynomial({0.0, 0.0, 1.0}));
    CHECK(std::count(sq.flags.begin(), sq.flags.end(), "suspected-typo:poisson-display-form") == 1);
    CHECK(std::count(sq.flags.begin(), sq.flags.end(), "no-discrete-upper") == 1);
    const auto lin = bound_report(poisson(1.0), ident);
    CHECK(std::count(lin.flags.begin(), lin.flags.end(), "suspected-typo:poisson-display-form") == 0);
}

TEST_CASE("scenarios")
{
    const auto g = run_scenario(builtin("gauss-loc-h-linear"));
    CHECK_FALSE(g.failed);
    REQUIRE(g.report);
    CHECK(g.report->lower == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.report->variance_truth == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.report->upper == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto& c : g.identity_checks)
        CHECK(c.pass);

    const auto gam = run_scenario(builtin("gamma3-sca-h-linear"));
    REQUIRE(gam.report);
    CHECK(gam.report->lower == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(gam.report->variance_truth == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(gam.report->upper == doctest::Approx(3.0).epsilon(1e-9));

    // Failures are recorded, not thrown.
    ScenarioSpec bad;
    bad.id = "bad";
    bad.target = {"exponential", RoleKind::Location, 0.0, {}};
    const auto b = run_scenario(bad);
    CHECK(b.failed);
    CHECK(b.error.find("UnsupportedRole") != std::string::npos);
    CHECK_FALSE(b.report);
    CHECK_FALSE(b.identity_checks.empty());

    ScenarioSpec wrong = builtin("poisson1-h-linear");
    wrong.law = FamilySpec{"poisson", RoleKind::DiscreteTheta, 1.2, {}};
    const auto w = run_identity_checks(wrong);
    CHECK_FALSE(w.failed);
    CHECK(std::any_of(w.identity_checks.begin(), w.identity_checks.end(), [](const auto& c) { return !c.pass; }));
}

TEST_CASE("scenario runs are sorted and deterministic")
{
    auto specs = builtin_scenarios();
    std::reverse(specs.begin(), specs.end());
    const auto a = run_scenarios(specs, {}, 1);
    const auto b = run_scenarios(specs, {}, 3);
    REQUIRE(a.size() == specs.size());
    CHECK(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.scenario < y.scenario; }));
    CHECK(emit_json(a) == emit_json(b));
    for (const auto& r : a) {
        CAPTURE(r.scenario);
        CHECK_FALSE(r.failed);
        REQUIRE(r.report);
        const auto& rep = *r.report;
        // Sandwich
        CHECK(rep.lower <= rep.variance_truth + 1e-8);
        if (std::isfinite(rep.upper))
            CHECK(rep.variance_truth + 1e-8 <= rep.upper + 2e-8);
    }
}

TEST_CASE("halving the tolerance moves nothing")
{
    Tolerances half;
    half.quad *= 0.5;
    half.series *= 0.5;
    for (const auto& s : builtin_scenarios()) {
        CAPTURE(s.id);
        const auto a = run_scenario(s);
        const auto b = run_scenario(s, half);
        REQUIRE(a.report);
        REQUIRE(b.report);
        CHECK(rel(a.report->lower, b.report->lower) <= 1e-8);
        CHECK(rel(a.report->variance_truth, b.report->variance_truth) <= 1e-8);
        CHECK(rel(a.report->upper, b.report->upper) <= 1e-8);
    }
}

TEST_CASE("equivariance under affine changes of h")
{
    for (const auto& s : builtin_scenarios()) {
        CAPTURE(s.id);
        const AnyFamily fam = make_family(s.target);
        const TestFunction h = scenario_test_function(s);
        std::visit(
            [&](const auto& f) {
                const auto a = bound_report(f, h);
                const auto c = bound_report(f, scaled(h, -3.0));
                const auto d = bound_report(f, shifted(h, -11.0));
                CHECK(rel(c.lower, 9.0 * a.lower) <= 1e-9);
                CHECK(rel(c.variance_truth, 9.0 * a.variance_truth) <= 1e-9);
                CHECK(rel(c.upper, 9.0 * a.upper) <= 1e-9);
                CHECK(rel(d.lower, a.lower) <= 1e-9);
                CHECK(rel(d.variance_truth, a.variance_truth) <= 1e-9);
                CHECK(rel(d.upper, a.upper) <= 1e-9);
            },
            fam);
    }
}

TEST_CASE("Monte Carlo diagnostics")
{
    const auto g = monte_carlo_variance(gaussian(ParamRole::location(1.0), 2.0), ident, 200000, 42);
    CHECK(g == doctest::Approx(4.0).epsilon(0.02));
    CHECK(g == monte_carlo_variance(gaussian(ParamRole::location(1.0), 2.0), ident, 200000, 42));
    CHECK(monte_carlo_variance(gamma_family(ParamRole::scale(2.0), 3.0), ident, 200000, 7) ==
          doctest::Approx(0.75).epsilon(0.03));
    CHECK(monte_carlo_variance(sas_gaussian(0.0), ident, 100000, 3) == doctest::Approx(1.0).epsilon(0.03));
    CHECK(monte_carlo_variance(quartic(ParamRole::location(0.0)), ident, 100000, 5) ==
          doctest::Approx(ground_truth_variance(quartic(ParamRole::location(0.0)), ident)).epsilon(0.03));
    CHECK(monte_carlo_variance(poisson(2.0), ident, 200000, 11) == doctest::Approx(2.0).epsilon(0.03));
    CHECK(monte_carlo_variance(binomial(10, 0.3), ident, 200000, 13) == doctest::Approx(2.1).epsilon(0.03));
}

TEST_CASE("named test functions")
{
    CHECK(test_function_by_name("x")(3.0) == 3.0);
    CHECK(test_function_by_name("x2")(3.0) == 9.0);
    CHECK(test_function_by_name("x^3")(2.0) == 8.0);
    CHECK(test_function_by_name("sqrt")(9.0) == 3.0);
    CHECK(test_function_by_name("1")(5.0) == 1.0);
    CHECK(test_function_by_name("hermite2")(2.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(test_function_by_name("cosine"), SteinError);
    ScenarioSpec s;
    s.polynomial = {1.0, 2.0};
    CHECK(scenario_test_function(s)(2.0) == 5.0);
}

TEST_CASE("family specs")
{
    CHECK(std::holds_alternative<DiscreteFamily>(make_family({"poisson", RoleKind::DiscreteTheta, 2.0, {}})));
    CHECK(std::holds_alternative<ContinuousFamily>(make_family({"gaussian", RoleKind::Scale, 2.0, {}})));
    CHECK_THROWS_AS(make_family({"poisson", RoleKind::Location, 2.0, {}}), SteinError);
    CHECK_THROWS_AS(make_family({"gaussian", RoleKind::DiscreteTheta, 2.0, {}}), SteinError);
    CHECK_THROWS_AS(make_family({"gaussian", RoleKind::Scale, -2.0, {}}), SteinError);
}

TEST_CASE("worked-example table ids")
{
    const auto ids = worked_example_row_ids();
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
    std::set<int> criteria;
    const auto rows = worked_example_table();
    REQUIRE(rows.size() == ids.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].id == ids[i]);
        criteria.insert(rows[i].criterion);
    }
    CHECK(criteria == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}
