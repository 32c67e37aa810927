#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "steinb/bounds.hpp"

using namespace steinb;

namespace {

const TestFunction x1 = polynomial({0.0, 1.0});
const TestFunction x2 = polynomial({0.0, 0.0, 1.0});
const TestFunction x3 = polynomial({0.0, 0.0, 0.0, 1.0});

double comparator(const std::vector<Comparator>& cs, std::string_view name)
{
    for (const auto& c : cs)
        if (c.name == name)
            return c.value;
    FAIL("missing comparator " << name);
    return 0.0;
}

} // namespace

TEST_CASE("lower bounds")
{
    CHECK(lower_bound(gaussian(ParamRole::location(0.0)), x1).value == doctest::Approx(1.0).epsilon(1e-12));
    // Exponential rate 1, h = sqrt: (E[X / (2 sqrt X)])^2 = (sqrt(pi) / 4)^2
    const auto e = lower_bound(exponential(ParamRole::scale(1.0)), sqrt_function());
    CHECK(std::abs(e.value - std::numbers::pi / 16.0) < 1e-8);
    CHECK_FALSE(e.vacuous);
    const auto v = lower_bound(gamma_family(ParamRole::location(0.0), 1.5), x1);
    CHECK(v.vacuous);
    CHECK(v.value == 0.0);
}

TEST_CASE("upper bounds")
{
    CHECK(upper_bound(gaussian(ParamRole::location(0.0)), x1).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(upper_bound(exponential(ParamRole::scale(1.0)), sqrt_function()).value - 0.25) < 1e-10);
    CHECK(upper_bound(gamma_family(ParamRole::scale(1.0), 3.0), x1).value == doctest::Approx(3.0).epsilon(1e-10));
    for (const auto& h : {x1, x2, x3}) {
        const auto u = upper_bound(gaussian(ParamRole::scale(1.0)), h);
        CHECK(std::isinf(u.value));
        REQUIRE(u.witness);
        CHECK(std::abs(*u.witness) < 1e-3);
    }
    const auto s = upper_bound(sas_gaussian(0.0), x1);
    CHECK(std::isinf(s.value));
    REQUIRE(s.witness);
}

TEST_CASE("upper-bound integrand is nonnegative where the score is monotone")
{
    for (const ContinuousFamily& fam :
         {gaussian(ParamRole::location(0.0)), exponential(ParamRole::scale(2.0)),
          gamma_family(ParamRole::scale(1.0), 3.0), gamma_family(ParamRole::location(0.0), 3.0)}) {
        const auto prof = score_profile(fam);
        REQUIRE(prof.monotonicity.verdict != Monotonicity::NotMonotone);
        const RealFn w = upper_bound_weight(fam, prof, x3);
        const Interval s = support_at(fam);
        for (int i = 1; i < 400; ++i)
            CHECK(w(interval_point(s, i / 400.0)) >= -1e-12);
    }
}

TEST_CASE("discrete lower bound")
{
    CHECK(discrete_lower_bound(poisson(2.0), x1).value == doctest::Approx(2.0).epsilon(1e-12));
    // Poisson(1), h = x^2: Cov(X^2, X) = E[X^3] - E[X^2] E[X] = 5 - 2 = 3, bound 3^2 / 1
    CHECK(std::abs(discrete_lower_bound(poisson(1.0), x2).value - 9.0) < 1e-8);
    CHECK(discrete_lower_bound(poisson(1.0), constant_function(3.0)).value == 0.0);
    // Geometric p: Var X = (1-p)/p^2 reached by h = x.
    CHECK(discrete_lower_bound(geometric(0.3), x1).value == doctest::Approx(0.7 / 0.09).epsilon(1e-10));
    CHECK(discrete_lower_bound(binomial(12, 0.2), x1).value == doctest::Approx(12 * 0.2 * 0.8).epsilon(1e-12));
    TestFunction no_diff = x1;
    no_diff.forward_difference = nullptr;
    CHECK_THROWS_AS(discrete_lower_bound(poisson(1.0), no_diff), SteinError);
}

TEST_CASE("Poincare constants")
{
    for (double s : {0.5, 1.0, 3.0}) {
        const auto p = poincare_constant(gaussian(ParamRole::location(1.0), s));
        CHECK(p.epsilon == doctest::Approx(1.0 / (s * s)).epsilon(1e-9));
        CHECK(std::abs(p.d - s * s) < 1e-6);
    }
    try {
        poincare_constant(quartic(ParamRole::location(0.0)));
        FAIL("expected NotStronglyUnimodal");
    } catch (const SteinError& e) {
        CHECK(e.kind() == ErrorKind::NotStronglyUnimodal);
    }
    // Gamma(3) location: -(log g)'' = 2 / y^2 decays to 0 in the tail.
    CHECK_THROWS_AS(poincare_constant(gamma_family(ParamRole::location(0.0), 3.0)), SteinError);
    CHECK_THROWS_AS(poincare_constant(gaussian(ParamRole::scale(1.0))), SteinError);
}

TEST_CASE("literature comparators")
{
    const auto ch = literature_bounds(gaussian(ParamRole::location(0.0), 2.0), x3);
    // h' = 3x^2 under N(0, 4): E[h'] = 12, E[h'^2] = 9 * 48
    CHECK(comparator(ch, "chernoff_lower") == doctest::Approx(4.0 * 144.0).epsilon(1e-10));
    CHECK(comparator(ch, "chernoff_upper") == doctest::Approx(4.0 * 432.0).epsilon(1e-10));

    const auto sq = literature_bounds(exponential(ParamRole::scale(1.0)), sqrt_function());
    CHECK(std::isinf(comparator(sq, "klaassen_exp_upper")));

    const auto lin = literature_bounds(exponential(ParamRole::scale(1.0)), x1);
    CHECK(comparator(lin, "exp_rewrite_upper") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(comparator(lin, "cacoullos_upper") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(comparator(lin, "klaassen_exp_upper") == doctest::Approx(4.0).epsilon(1e-12));

    const auto gam = literature_bounds(gamma_family(ParamRole::scale(1.0), 3.0), x1);
    CHECK(comparator(gam, "klaassen_gamma_lower") == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(literature_bounds(gamma_family(ParamRole::scale(1.0), 1.5), x1).empty());

    CHECK_THROWS_AS(literature_bounds(quartic(ParamRole::location(0.0)), x1), SteinError);
    CHECK_THROWS_AS(literature_bounds(gaussian(ParamRole::scale(1.0)), x1), SteinError);
}

TEST_CASE("our exponential upper bound never exceeds Cacoullos")
{
    for (double lambda : {0.5, 1.0, 2.0}) {
        const auto fam = exponential(ParamRole::scale(lambda));
        for (const auto& h : {x1, x2, x3, polynomial({1.0, -2.0, 0.3, 0.1})}) {
            const double ours = upper_bound(fam, h).value;
            CHECK(ours <= comparator(literature_bounds(fam, h), "cacoullos_upper") + 1e-9);
        }
    }
}

TEST_CASE("tightness residual")
{
    const auto g = gaussian(ParamRole::location(0.0));
    const auto prof = score_profile(g);
    CHECK(tightness_residual(g, prof, polynomial({4.0, -2.0})) < 1e-12);
    // x^3 = 3x + (x^3 - 3x): residual Var(He3) / Var(x^3) = 6 / 15
    CHECK(tightness_residual(g, prof, x3) == doctest::Approx(0.4).epsilon(1e-10));

    const auto p = poisson(1.5);
    CHECK(tightness_residual(p, score_profile(p), x1) < 1e-12);
    CHECK(tightness_residual(p, score_profile(p), x2) > 1e-3);
    CHECK(tightness_residual(p, score_profile(p), constant_function(2.0)) == 0.0);
}

TEST_CASE("bound kinds")
{
    CHECK(to_string(BoundKind::Lower) == "lower");
    CHECK(to_string(BoundKind::Upper) == "upper");
}
