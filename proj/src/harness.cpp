#include "steinb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "steinb/report.hpp"

namespace steinb {

Tolerances Tolerances::from_quad(double quad_tol)
{
    if (!(quad_tol > 0.0))
        throw SteinError(ErrorKind::InvalidParameter, "tolerance must be positive");
    return {quad_tol, quad_tol * 1e-2};
}

// ---------------------------------------------------------------------------
// Identity checks

namespace {

IdentityCheck make_check(const std::string& family, RoleKind role, const std::string& f0, double value, double tol)
{
    IdentityCheck c;
    c.family = family;
    c.role = std::string(to_string(role));
    c.test_function = f0;
    c.expectation_value = value;
    c.tolerance = tol;
    c.pass = std::isfinite(value) && std::abs(value) <= tol;
    return c;
}

double operator_mean(const SteinOperator& op, const ContinuousFamily& law, double tol)
{
    double v = expectation(law, op.apply, tol);
    if (op.atom)
        v += op.atom->coefficient * density_at(law, op.atom->location);
    return v;
}

} // namespace

IdentityCheck check_identity(const ContinuousFamily& fam, const TestFunction& f0, const Tolerances& tol)
{
    const SteinOperator op = stein_operator(fam, f0);
    return make_check(fam.name, fam.role.kind, f0.name, operator_mean(op, fam, tol.quad), kContinuousIdentityTol);
}

IdentityCheck check_identity(const DiscreteFamily& fam, const TestFunction& f0, const Tolerances& tol)
{
    const SteinOperator op = discrete_operator(fam, f0);
    const double v = sum_over_support(fam, op.apply_discrete, tol.series);
    return make_check(fam.name, fam.role.kind, f0.name, v, kDiscreteIdentityTol);
}

IdentityCheck falsify_identity(const ContinuousFamily& fam, const TestFunction& f0, const ContinuousFamily& wrong_law,
                               const Tolerances& tol)
{
    const SteinOperator op = stein_operator(fam, f0);
    return make_check(fam.name, fam.role.kind, f0.name, operator_mean(op, wrong_law, tol.quad),
                      kContinuousIdentityTol);
}

IdentityCheck falsify_identity(const DiscreteFamily& fam, const TestFunction& f0, const DiscreteFamily& wrong_law,
                               const Tolerances& tol)
{
    const SteinOperator op = discrete_operator(fam, f0);
    const double v = sum_over_support(wrong_law, op.apply_discrete, tol.series);
    return make_check(fam.name, fam.role.kind, f0.name, v, kDiscreteIdentityTol);
}

namespace {

TestFunction monomial(int k)
{
    std::vector<double> c(std::size_t(k) + 1, 0.0);
    c[std::size_t(k)] = 1.0;
    TestFunction t = polynomial(c);
    t.name = k == 0 ? "1" : k == 1 ? "x" : "x^" + std::to_string(k);
    return t;
}

std::vector<TestFunction> with_bump(double radius)
{
    std::vector<TestFunction> out;
    const TestFunction b = bump(radius);
    for (int k = 0; k <= 4; ++k)
        out.push_back(product(monomial(k), b));
    for (int k = 0; k <= 4; ++k)
        out.push_back(monomial(k));
    return out;
}

} // namespace

std::vector<TestFunction> identity_test_functions(const ContinuousFamily& fam)
{
    std::vector<TestFunction> out = with_bump(bulk_radius(fam, 1e-8));
    if (fam.name == "gaussian" && fam.role.kind == RoleKind::Location)
        for (int n = 1; n <= 6; ++n)
            out.push_back(hermite_function(n));
    return out;
}

std::vector<TestFunction> identity_test_functions(const DiscreteFamily& fam)
{
    long n = 0;
    double mass = 1.0;
    while (mass > 1e-8 && (!fam.support_max || n <= *fam.support_max)) {
        mass -= pmf_at(fam, n);
        ++n;
    }
    return with_bump(double(n) + 1.0);
}

namespace {

std::vector<ContinuousFamily> registered_continuous()
{
    return {
        gaussian(ParamRole::location(0.0)),
        gaussian(ParamRole::location(1.5), 2.0),
        gaussian(ParamRole::scale(1.0)),
        gaussian(ParamRole::scale(2.0)),
        sas_gaussian(0.0),
        sas_gaussian(0.5),
        exponential(ParamRole::location(0.0)),
        exponential(ParamRole::scale(1.0)),
        gamma_family(ParamRole::scale(1.0), 3.0),
        gamma_family(ParamRole::location(0.0), 3.0),
        quartic(ParamRole::location(0.0)),
    };
}

std::vector<DiscreteFamily> registered_discrete()
{
    return {poisson(1.0), poisson(2.0), geometric(0.5), binomial(10, 0.3)};
}

} // namespace

std::vector<IdentityCheck> identity_suite(const Tolerances& tol)
{
    std::vector<IdentityCheck> out;
    for (const auto& fam : registered_continuous())
        for (const auto& f0 : identity_test_functions(fam))
            out.push_back(check_identity(fam, f0, tol));
    for (const auto& fam : registered_discrete())
        for (const auto& f0 : identity_test_functions(fam))
            out.push_back(check_identity(fam, f0, tol));
    return out;
}

std::vector<FalsificationCase> falsification_suite(const Tolerances& tol)
{
    std::vector<FalsificationCase> out;
    auto cont = [&](std::string label, const ContinuousFamily& fam, const TestFunction& f0,
                    const ContinuousFamily& wrong) {
        out.push_back({std::move(label), check_identity(fam, f0, tol), falsify_identity(fam, f0, wrong, tol)});
    };
    auto disc = [&](std::string label, const DiscreteFamily& fam, const TestFunction& f0, const DiscreteFamily& wrong) {
        out.push_back({std::move(label), check_identity(fam, f0, tol), falsify_identity(fam, f0, wrong, tol)});
    };
    const TestFunction one = monomial(0);
    const TestFunction x = monomial(1);

    cont("gaussian-location-vs-sd2", gaussian(ParamRole::location(0.0)), x,
         gaussian(ParamRole::location(0.0), std::sqrt(2.0)));
    cont("gaussian-scale-vs-sigma0.707", gaussian(ParamRole::scale(1.0)), one,
         gaussian(ParamRole::scale(1.0 / std::sqrt(2.0))));
    cont("sas-vs-delta0.5", sas_gaussian(0.0), one, sas_gaussian(0.5));
    cont("exponential-location-vs-rate2", exponential(ParamRole::location(0.0)), x,
         exponential(ParamRole::scale(2.0)));
    cont("exponential-scale-vs-rate2", exponential(ParamRole::scale(1.0)), one, exponential(ParamRole::scale(2.0)));
    cont("gamma3-scale-vs-rate1.5", gamma_family(ParamRole::scale(1.0), 3.0), one,
         gamma_family(ParamRole::scale(1.5), 3.0));
    cont("gamma3-location-vs-rate2", gamma_family(ParamRole::location(0.0), 3.0), x,
         gamma_family(ParamRole::scale(2.0), 3.0));
    disc("poisson1-vs-poisson2", poisson(1.0), one, poisson(2.0));
    disc("geometric0.5-vs-0.25", geometric(0.5), one, geometric(0.25));
    disc("binomial10-0.3-vs-0.5", binomial(10, 0.3), one, binomial(10, 0.5));
    return out;
}

// ---------------------------------------------------------------------------
// Ground truth and bound reports

double ground_truth_variance(const ContinuousFamily& fam, const TestFunction& h, double tol)
{
    const ExtendedQuad m = expectation_extended(fam, h.value, tol);
    if (m.divergent)
        throw SteinError(ErrorKind::DivergentMoment, "E[h(X)] diverges");
    const double mean = m.value;
    const ExtendedQuad v = expectation_extended(
        fam,
        [&](double x) {
            const double d = h.value(x) - mean;
            return d * d;
        },
        tol);
    if (v.divergent)
        throw SteinError(ErrorKind::DivergentMoment, "E[h(X)^2] diverges");
    return v.value;
}

double ground_truth_variance(const DiscreteFamily& fam, const TestFunction& h, double tol)
{
    const IntFn hv = [&](long x) { return h.value(double(x)); };
    const double mean = sum_over_support(fam, hv, tol);
    return sum_over_support(
        fam,
        [&](long x) {
            const double d = hv(x) - mean;
            return d * d;
        },
        tol);
}

namespace {

void finish_report(BoundReport& r)
{
    r.lower_slack = r.variance_truth - r.lower;
    r.upper_slack = std::isfinite(r.upper) ? r.upper - r.variance_truth : kInf;
    if (r.lower > r.variance_truth + 1e-8 || (std::isfinite(r.upper) && r.variance_truth > r.upper + 2e-8))
        r.flags.push_back("sandwich-violation");
}

} // namespace

BoundReport bound_report(const ContinuousFamily& fam, const TestFunction& h, const Tolerances& tol)
{
    BoundReport r;
    const ScoreProfile prof = score_profile(fam, tol.quad);
    r.fisher = prof.fisher;
    r.variance_truth = ground_truth_variance(fam, h, tol.quad);

    const LowerBound lo = lower_bound(fam, prof, h, tol.quad);
    r.lower = lo.value;
    if (lo.vacuous)
        r.flags.push_back("vacuous");

    const UpperBound up = upper_bound(fam, prof, h, tol.quad);
    r.upper = up.value;
    if (up.witness) {
        r.flags.push_back("infinite-upper");
        r.witness = up.witness;
    } else if (up.divergent) {
        r.flags.push_back("divergent-upper");
    }

    r.tightness_residual = tightness_residual(fam, prof, h, tol.quad);
    try {
        r.comparators = literature_bounds(fam, h, tol.quad);
    } catch (const SteinError& e) {
        if (e.kind() != ErrorKind::NotApplicable)
            throw;
    }
    finish_report(r);
    return r;
}

BoundReport bound_report(const DiscreteFamily& fam, const TestFunction& h, const Tolerances& tol)
{
    BoundReport r;
    const ScoreProfile prof = score_profile(fam, tol.series);
    r.fisher = prof.fisher;
    r.variance_truth = ground_truth_variance(fam, h, tol.series);
    const LowerBound lo = discrete_lower_bound(fam, h, tol.series);
    r.lower = lo.value;
    if (lo.vacuous)
        r.flags.push_back("vacuous");
    r.upper = kInf;
    r.flags.push_back("no-discrete-upper");
    r.tightness_residual = tightness_residual(fam, prof, h, tol.series);

    if (fam.name == "poisson" && h.forward_difference) {
        // The display form evaluates D+h at X itself rather than at the
        // shifted mass points; it only agrees with the bound for affine h.
        const double lambda = fam.theta0();
        const double m = sum_over_support(
            fam, [&](long x) { return double(x) * h.forward_difference(x); }, tol.series);
        const double display = m * m / lambda;
        r.comparators.push_back({"poisson_display_form", BoundKind::Lower, display});
        if (std::abs(display - r.lower) > 1e-8 * std::max(1.0, std::abs(r.lower)))
            r.flags.push_back("suspected-typo:poisson-display-form");
    }
    finish_report(r);
    return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo diagnostics

namespace {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(static_cast<std::minstd_rand::result_type>(seed % 2147483646 + 1)) {}

    // Uniform on (0, 1).
    double uniform() { return double(rng_()) / 2147483647.0; }

    double normal()
    {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(t);
        return r * std::cos(t);
    }

    double gamma(double a)
    {
        if (a < 1.0)
            return gamma(a + 1.0) * std::pow(uniform(), 1.0 / a);
        const double d = a - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            const double z = normal();
            const double v = std::pow(1.0 + c * z, 3);
            if (v <= 0.0)
                continue;
            if (std::log(uniform()) < 0.5 * z * z + d - d * v + d * std::log(v))
                return d * v;
        }
    }

    double quartic()
    {
        for (;;) {
            const double z = normal();
            const double z2 = z * z;
            if (uniform() < std::exp(-0.25 * z2 * z2 + 0.5 * z2 - 0.25))
                return z;
        }
    }

private:
    std::minstd_rand rng_;
    std::optional<double> spare_;
};

double draw_base(const ContinuousFamily& fam, Sampler& s)
{
    if (fam.name == "gaussian" || fam.name == "sas-gaussian")
        return fam.sd * s.normal();
    if (fam.name == "exponential")
        return -std::log(s.uniform());
    if (fam.name == "gamma")
        return s.gamma(fam.shape);
    if (fam.name == "quartic")
        return s.quartic();
    throw SteinError(ErrorKind::NotApplicable, "no sampler for " + fam.name);
}

double draw(const ContinuousFamily& fam, Sampler& s)
{
    const double y = draw_base(fam, s);
    const double t = fam.theta0();
    switch (fam.role.kind) {
    case RoleKind::Location: return y + t;
    case RoleKind::Scale: return y / t;
    case RoleKind::SkewSAS: return std::sinh(std::asinh(y) - t);
    case RoleKind::DiscreteTheta: break;
    }
    throw SteinError(ErrorKind::UnsupportedRole, "discrete role on a continuous family");
}

struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v)
    {
        ++n;
        const double d = v - mean;
        mean += d / double(n);
        m2 += d * (v - mean);
    }
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
};

} // namespace

double monte_carlo_variance(const ContinuousFamily& fam, const TestFunction& h, std::size_t draws, std::uint64_t seed)
{
    Sampler s(seed);
    Welford w;
    for (std::size_t i = 0; i < draws; ++i)
        w.add(h.value(draw(fam, s)));
    return w.variance();
}

double monte_carlo_variance(const DiscreteFamily& fam, const TestFunction& h, std::size_t draws, std::uint64_t seed)
{
    // Inversion against a cached cumulative table.
    std::vector<double> cdf;
    double acc = 0.0;
    for (long x = 0; acc < 1.0 - 1e-15; ++x) {
        if (fam.support_max && x > *fam.support_max)
            break;
        if (x > 10000000)
            throw SteinError(ErrorKind::TruncationUnsafe, "sampler table too long");
        acc += pmf_at(fam, x);
        cdf.push_back(acc);
    }
    Sampler s(seed);
    Welford w;
    for (std::size_t i = 0; i < draws; ++i) {
        const double u = s.uniform() * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const long x = long(std::min<std::ptrdiff_t>(it - cdf.begin(), std::ptrdiff_t(cdf.size()) - 1));
        w.add(h.value(double(x)));
    }
    return w.variance();
}

// ---------------------------------------------------------------------------
// Scenarios

AnyFamily make_family(const FamilySpec& spec)
{
    if (is_discrete_family(spec.family)) {
        if (spec.role != RoleKind::DiscreteTheta)
            throw SteinError(ErrorKind::UnsupportedRole, spec.family + " takes the theta role");
        return discrete_family(spec.family, spec.value, spec.constants);
    }
    ParamRole role;
    switch (spec.role) {
    case RoleKind::Location: role = ParamRole::location(spec.value); break;
    case RoleKind::Scale: role = ParamRole::scale(spec.value); break;
    case RoleKind::SkewSAS: role = ParamRole::skew_sas(spec.value); break;
    case RoleKind::DiscreteTheta:
        throw SteinError(ErrorKind::UnsupportedRole, spec.family + " is continuous");
    }
    return continuous_family(spec.family, role, spec.constants);
}

TestFunction test_function_by_name(std::string_view name)
{
    if (name == "1" || name == "const")
        return constant_function(1.0);
    if (name == "sqrt")
        return sqrt_function();
    if (name == "x")
        return monomial(1);
    std::string_view rest;
    if (name.starts_with("x^"))
        rest = name.substr(2);
    else if (name.starts_with("x"))
        rest = name.substr(1);
    if (!rest.empty() && rest.size() <= 2 && std::all_of(rest.begin(), rest.end(), [](char c) {
            return c >= '0' && c <= '9';
        }))
        return monomial(std::stoi(std::string(rest)));
    for (std::string_view prefix : {"hermite", "he"}) {
        if (name.starts_with(prefix)) {
            const std::string_view n = name.substr(prefix.size());
            if (!n.empty() && n.size() <= 2 && std::all_of(n.begin(), n.end(), [](char c) {
                    return c >= '0' && c <= '9';
                }))
                return hermite_function(std::stoi(std::string(n)));
        }
    }
    throw SteinError(ErrorKind::Parse, "unknown test function '" + std::string(name) + "'");
}

TestFunction scenario_test_function(const ScenarioSpec& spec)
{
    if (!spec.polynomial.empty())
        return polynomial(spec.polynomial);
    return test_function_by_name(spec.test_function);
}

namespace {

Tolerances scenario_tolerances(const ScenarioSpec& spec, const Tolerances& tol)
{
    return spec.quad_tol ? Tolerances::from_quad(*spec.quad_tol) : tol;
}

void record_error(ScenarioResult& r, const std::exception& e)
{
    r.failed = true;
    if (!r.error.empty())
        r.error += "; ";
    r.error += e.what();
}

std::vector<IdentityCheck> identity_checks_for(const ScenarioSpec& spec, const Tolerances& tol)
{
    const AnyFamily target = make_family(spec.target);
    std::optional<AnyFamily> law;
    if (spec.law)
        law = make_family(*spec.law);
    if (law && law->index() != target.index())
        throw SteinError(ErrorKind::InvalidParameter, "law and target must both be continuous or both discrete");

    std::vector<IdentityCheck> out;
    std::visit(
        [&](const auto& fam) {
            using F = std::decay_t<decltype(fam)>;
            for (const auto& f0 : identity_test_functions(fam)) {
                if (law)
                    out.push_back(falsify_identity(fam, f0, std::get<F>(*law), tol));
                else
                    out.push_back(check_identity(fam, f0, tol));
            }
        },
        target);
    return out;
}

using Clock = std::chrono::steady_clock;

} // namespace

ScenarioResult run_identity_checks(const ScenarioSpec& spec, const Tolerances& tol_in)
{
    const auto start = Clock::now();
    ScenarioResult r;
    r.scenario = spec.id;
    try {
        r.identity_checks = identity_checks_for(spec, scenario_tolerances(spec, tol_in));
    } catch (const std::exception& e) {
        record_error(r, e);
    }
    r.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const Tolerances& tol_in)
{
    const auto start = Clock::now();
    ScenarioResult r;
    r.scenario = spec.id;
    Tolerances tol;
    try {
        tol = scenario_tolerances(spec, tol_in);
        r.identity_checks = identity_checks_for(spec, tol);
    } catch (const std::exception& e) {
        record_error(r, e);
    }
    try {
        const AnyFamily fam = make_family(spec.target);
        const TestFunction h = scenario_test_function(spec);
        r.report = std::visit([&](const auto& f) { return bound_report(f, h, tol); }, fam);
    } catch (const std::exception& e) {
        record_error(r, e);
    }
    r.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

std::vector<ScenarioResult> run_scenarios(const std::vector<ScenarioSpec>& specs, const Tolerances& tol,
                                          unsigned jobs, bool identity_only)
{
    std::vector<ScenarioResult> results(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++)
            results[i] = identity_only ? run_identity_checks(specs[i], tol) : run_scenario(specs[i], tol);
    };
    const std::size_t n = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(specs.size(), 1));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n; ++t)
            pool.emplace_back(worker);
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const ScenarioResult& a, const ScenarioResult& b) { return a.scenario < b.scenario; });
    return results;
}

std::vector<ScenarioSpec> builtin_scenarios()
{
    auto spec = [](std::string id, std::string family, RoleKind role, double value, std::string h,
                   FamilyConstants c = {}) {
        ScenarioSpec s;
        s.id = std::move(id);
        s.target = {std::move(family), role, value, c};
        s.test_function = std::move(h);
        return s;
    };
    const auto loc = RoleKind::Location;
    const auto sca = RoleKind::Scale;
    const auto th = RoleKind::DiscreteTheta;
    FamilyConstants g3;
    g3.shape = 3.0;
    FamilyConstants g5;
    g5.shape = 5.0;
    FamilyConstants g15;
    g15.shape = 1.5;
    FamilyConstants b10;
    b10.trials = 10;
    return {
        spec("gauss-loc-h-linear", "gaussian", loc, 0.0, "x"),
        spec("gauss-loc-h-cubic", "gaussian", loc, 0.0, "x3"),
        spec("gauss-sca-h-square", "gaussian", sca, 1.0, "x2"),
        spec("gauss-skew-h-linear", "sas-gaussian", RoleKind::SkewSAS, 0.0, "x"),
        spec("exp-sca-h-sqrt", "exponential", sca, 1.0, "sqrt"),
        spec("exp-sca-h-linear", "exponential", sca, 1.0, "x"),
        spec("exp-sca-h-square", "exponential", sca, 1.0, "x2"),
        spec("gamma3-sca-h-linear", "gamma", sca, 1.0, "x", g3),
        spec("gamma3-loc-h-linear", "gamma", loc, 0.0, "x", g3),
        spec("gamma5-loc-h-square", "gamma", loc, 0.0, "x2", g5),
        spec("gamma1.5-loc-h-linear", "gamma", loc, 0.0, "x", g15),
        spec("quartic-loc-h-linear", "quartic", loc, 0.0, "x"),
        spec("poisson0.5-h-linear", "poisson", th, 0.5, "x"),
        spec("poisson1-h-linear", "poisson", th, 1.0, "x"),
        spec("poisson1-h-square", "poisson", th, 1.0, "x2"),
        spec("poisson2-h-linear", "poisson", th, 2.0, "x"),
        spec("geometric0.5-h-linear", "geometric", th, 0.5, "x"),
        spec("binomial10-0.3-h-linear", "binomial", th, 0.3, "x", b10),
    };
}

// ---------------------------------------------------------------------------
// Worked-example table

namespace {

struct TableContext {
    Tolerances tol;
    std::optional<std::vector<IdentityCheck>> identities;
    std::optional<std::vector<FalsificationCase>> falsifications;
    std::map<std::string, BoundReport> reports;

    const std::vector<IdentityCheck>& identity()
    {
        if (!identities)
            identities = identity_suite(tol);
        return *identities;
    }
    const std::vector<FalsificationCase>& falsification()
    {
        if (!falsifications)
            falsifications = falsification_suite(tol);
        return *falsifications;
    }
    const BoundReport& report(const std::string& id)
    {
        auto it = reports.find(id);
        if (it != reports.end())
            return it->second;
        for (const auto& s : builtin_scenarios()) {
            if (s.id != id)
                continue;
            const AnyFamily fam = make_family(s.target);
            const TestFunction h = scenario_test_function(s);
            BoundReport r = std::visit([&](const auto& f) { return bound_report(f, h, tol); }, fam);
            return reports.emplace(id, std::move(r)).first->second;
        }
        throw SteinError(ErrorKind::InvalidParameter, "no builtin scenario " + id);
    }
};

struct Outcome {
    double computed;
    double expected;
    double tolerance;
    std::string comparison;
};

struct RowDef {
    std::string id;
    int criterion;
    std::string description;
    std::function<Outcome(TableContext&)> compute;
};

Outcome near(double computed, double expected, double tol) { return {computed, expected, tol, "abs"}; }
Outcome at_most(double computed, double limit) { return {computed, limit, 0.0, "le"}; }
Outcome at_least(double computed, double limit) { return {computed, limit, 0.0, "ge"}; }
Outcome infinite(double computed) { return {computed, kInf, 0.0, "inf"}; }
Outcome flag(bool raised) { return {raised ? 1.0 : 0.0, 1.0, 0.0, "flag"}; }

bool judge(const Outcome& o)
{
    if (o.comparison == "abs")
        return std::abs(o.computed - o.expected) <= o.tolerance;
    if (o.comparison == "le")
        return o.computed <= o.expected + o.tolerance;
    if (o.comparison == "ge")
        return o.computed >= o.expected - o.tolerance;
    if (o.comparison == "inf")
        return std::isinf(o.computed) && o.computed > 0.0;
    if (o.comparison == "flag")
        return o.computed == 1.0;
    return false;
}

bool has_flag(const BoundReport& r, std::string_view f)
{
    return std::find(r.flags.begin(), r.flags.end(), f) != r.flags.end();
}

double comparator(const BoundReport& r, std::string_view name)
{
    for (const auto& c : r.comparators)
        if (c.name == name)
            return c.value;
    throw SteinError(ErrorKind::NotApplicable, "comparator " + std::string(name) + " missing");
}

// Largest |closed form - difference quotient| / max(1, |quotient|) over 200 points.
double quotient_gap(const ContinuousFamily& fam, const TestFunction& f0)
{
    const SteinOperator op = stein_operator(fam, f0);
    const double r = bulk_radius(fam, 1e-8);
    const Interval& b = fam.base_support;
    const double lo = std::max(b.lo, -r);
    const double hi = std::min(b.hi, r);
    const double t = fam.theta0();
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double y = lo + (hi - lo) * (double(i) + 0.5) / 200.0;
        double x = y;
        switch (fam.role.kind) {
        case RoleKind::Location: x = y + t; break;
        case RoleKind::Scale: x = y / t; break;
        case RoleKind::SkewSAS: x = sas_inverse(y, t); break;
        case RoleKind::DiscreteTheta: break;
        }
        const double closed = op.apply(x);
        const double generic = generic_quotient(fam, f0, x);
        worst = std::max(worst, std::abs(closed - generic) / std::max(1.0, std::abs(generic)));
    }
    return worst;
}

double quotient_gap(const DiscreteFamily& fam, const TestFunction& f0)
{
    const SteinOperator op = discrete_operator(fam, f0);
    double worst = 0.0;
    const long n = fam.support_max ? std::min(*fam.support_max, 199L) : 199L;
    for (long x = 0; x <= n; ++x) {
        // Beyond the underflow point the quotient is not representable.
        if (!(pmf_at(fam, x) > 1e-250))
            continue;
        const double closed = op.apply_discrete(x);
        const double generic = generic_quotient(fam, f0, x);
        worst = std::max(worst, std::abs(closed - generic) / std::max(1.0, std::abs(generic)));
    }
    return worst;
}

template <class Fam>
double worst_quotient_gap(const Fam& fam)
{
    return std::max({quotient_gap(fam, constant_function(1.0)), quotient_gap(fam, polynomial({1.0, 1.0, -0.3})),
                     quotient_gap(fam, product(polynomial({0.0, 1.0}), bump(4.0)))});
}

double relative_change(double a, double b)
{
    if (std::isinf(a) || std::isinf(b))
        return a == b ? 0.0 : kInf;
    if (a == b)
        return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Largest relative deviation from the expected transformation over the scenario matrix.
double invariance_gap(TableContext& ctx, bool scale)
{
    constexpr double c = 2.5;
    constexpr double shift = 7.0;
    double worst = 0.0;
    for (const auto& s : builtin_scenarios()) {
        const AnyFamily fam = make_family(s.target);
        const TestFunction h = scenario_test_function(s);
        const TestFunction h2 = scale ? scaled(h, c) : shifted(h, shift);
        const double k = scale ? c * c : 1.0;
        BoundReport base;
        try {
            base = ctx.report(s.id);
        } catch (const SteinError&) {
            continue;
        }
        const BoundReport moved = std::visit([&](const auto& f) { return bound_report(f, h2, ctx.tol); }, fam);
        worst = std::max({worst, relative_change(moved.lower, k * base.lower),
                          relative_change(moved.variance_truth, k * base.variance_truth),
                          relative_change(moved.upper, k * base.upper)});
    }
    return worst;
}

const std::vector<RowDef>& row_definitions()
{
    static const std::vector<RowDef> rows = [] {
        std::vector<RowDef> d;
        auto fisher = [](const ContinuousFamily& f, const Tolerances& t) { return score_profile(f, t.quad).fisher; };

        // 1: Gaussian Fisher information
        d.push_back({"fisher-gaussian-location", 1, "I_loc for N(0,1)", [=](TableContext& c) {
                         return near(fisher(gaussian(ParamRole::location(0.0)), c.tol), 1.0, 1e-8);
                     }});
        for (double s : {0.5, 1.0, 2.0}) {
            char id[64];
            std::snprintf(id, sizeof id, "fisher-gaussian-scale-%g", s);
            d.push_back({id, 1, "I_sca = 2/sigma^2", [=](TableContext& c) {
                             return near(fisher(gaussian(ParamRole::scale(s)), c.tol), 2.0 / (s * s), 1e-8);
                         }});
        }
        d.push_back({"fisher-sas-skew-kappa", 1, "I_skew at delta = 0 against 2.34432", [=](TableContext& c) {
                         return near(fisher(sas_gaussian(0.0), c.tol), 2.34432, 1e-4);
                     }});

        // 2: Gamma Fisher information
        for (double a : {3.0, 5.0}) {
            char id[64];
            std::snprintf(id, sizeof id, "fisher-gamma%g-location", a);
            d.push_back({id, 2, "I_loc = 1/(a-2)", [=](TableContext& c) {
                             return near(fisher(gamma_family(ParamRole::location(0.0), a), c.tol), 1.0 / (a - 2.0),
                                         1e-7);
                         }});
        }
        d.push_back({"fisher-gamma1.5-location", 2, "I_loc diverges for a = 1.5", [=](TableContext& c) {
                         return infinite(fisher(gamma_family(ParamRole::location(0.0), 1.5), c.tol));
                     }});
        d.push_back({"gamma1.5-loc-lower-vacuous", 2, "lower bound 0 flagged vacuous", [](TableContext& c) {
                         const BoundReport& r = c.report("gamma1.5-loc-h-linear");
                         return flag(has_flag(r, "vacuous") && r.lower == 0.0);
                     }});
        for (auto [a, b] : {std::pair{3.0, 1.0}, std::pair{5.0, 2.0}}) {
            char id[64];
            std::snprintf(id, sizeof id, "fisher-gamma%g-scale-b%g", a, b);
            d.push_back({id, 2, "I_sca = a/b^2", [=](TableContext& c) {
                             return near(fisher(gamma_family(ParamRole::scale(b), a), c.tol), a / (b * b), 1e-8);
                         }});
        }

        // 3: Poisson
        for (double l : {0.5, 1.0, 2.0}) {
            char id[64];
            std::snprintf(id, sizeof id, "fisher-poisson%g", l);
            d.push_back({id, 3, "I = 1/lambda", [=](TableContext& c) {
                             return near(score_profile(poisson(l), c.tol.series).fisher, 1.0 / l, 1e-9);
                         }});
        }
        for (std::string id : {"poisson0.5-h-linear", "poisson1-h-linear", "poisson2-h-linear"}) {
            d.push_back({id + "-lower-equals-var", 3, "discrete lower bound = Var for h = x", [=](TableContext& c) {
                             const BoundReport& r = c.report(id);
                             return near(r.lower, r.variance_truth, 1e-9);
                         }});
        }
        d.push_back({"poisson1-h-square-lower", 3, "summation-by-parts bound for h = x^2", [](TableContext& c) {
                         return near(c.report("poisson1-h-square").lower, 9.0, 1e-8);
                     }});
        d.push_back({"poisson1-h-square-variance", 3, "Var[X^2] for Poisson(1)", [](TableContext& c) {
                         return near(c.report("poisson1-h-square").variance_truth, 11.0, 1e-8);
                     }});

        // 4: Exponential sqrt chain
        d.push_back({"exp-sqrt-lower", 4, "lower = pi/16", [](TableContext& c) {
                         return near(c.report("exp-sca-h-sqrt").lower, std::numbers::pi / 16.0, 1e-8);
                     }});
        d.push_back({"exp-sqrt-variance", 4, "Var = 1 - pi/4", [](TableContext& c) {
                         return near(c.report("exp-sca-h-sqrt").variance_truth, 1.0 - std::numbers::pi / 4.0, 1e-8);
                     }});
        d.push_back({"exp-sqrt-upper", 4, "upper = 1/4", [](TableContext& c) {
                         return near(c.report("exp-sca-h-sqrt").upper, 0.25, 1e-10);
                     }});
        d.push_back({"exp-sqrt-klaassen-divergent", 4, "Klaassen comparator diverges", [](TableContext& c) {
                         return infinite(comparator(c.report("exp-sca-h-sqrt"), "klaassen_exp_upper"));
                     }});
        d.push_back({"exp-sqrt-cacoullos-dominated", 4, "Cacoullos comparator >= our upper", [](TableContext& c) {
                         const BoundReport& r = c.report("exp-sca-h-sqrt");
                         return at_least(comparator(r, "cacoullos_upper"), r.upper);
                     }});

        // 5: Equality cases
        struct Eq {
            const char* id;
            bool upper;
        };
        for (Eq e : {Eq{"gauss-loc-h-linear", true}, Eq{"gauss-sca-h-square", false}, Eq{"exp-sca-h-linear", true},
                     Eq{"gamma3-sca-h-linear", true}, Eq{"poisson1-h-linear", false}}) {
            const std::string id = e.id;
            d.push_back({id + "-lower-tight", 5, "|lower - Var|", [=](TableContext& c) {
                             const BoundReport& r = c.report(id);
                             return near(r.lower, r.variance_truth, 1e-7);
                         }});
            if (e.upper)
                d.push_back({id + "-upper-tight", 5, "|upper - Var|", [=](TableContext& c) {
                                 const BoundReport& r = c.report(id);
                                 return near(r.upper, r.variance_truth, 1e-7);
                             }});
            d.push_back({id + "-residual", 5, "tightness residual", [=](TableContext& c) {
                             return at_most(c.report(id).tightness_residual, 1e-9);
                         }});
        }

        // 6: Identity suite and falsification
        d.push_back({"identity-suite", 6, "max |E[T f0]| / tolerance over the suite", [](TableContext& c) {
                         double worst = 0.0;
                         for (const auto& chk : c.identity())
                             worst = std::max(worst, std::abs(chk.expectation_value) / chk.tolerance);
                         return at_most(worst, 1.0);
                     }});
        d.push_back({"falsification-controls", 6, "max same-law |E| / tolerance", [](TableContext& c) {
                         double worst = 0.0;
                         for (const auto& fc : c.falsification())
                             worst = std::max(worst, std::abs(fc.control.expectation_value) / fc.control.tolerance);
                         return at_most(worst, 1.0);
                     }});
        d.push_back({"falsification-perturbed", 6, "min wrong-law |E| / tolerance", [](TableContext& c) {
                         double least = kInf;
                         for (const auto& fc : c.falsification())
                             least = std::min(least,
                                              std::abs(fc.perturbed.expectation_value) / fc.perturbed.tolerance);
                         return at_least(least, 10.0);
                     }});

        // 7: Closed forms against the difference quotient
        auto q = [&d](std::string id, std::function<double()> gap) {
            d.push_back({"quotient-" + id, 7, "closed form vs difference quotient",
                         [gap](TableContext&) { return at_most(gap(), 1e-6); }});
        };
        q("gaussian-location", [] { return worst_quotient_gap(gaussian(ParamRole::location(0.0))); });
        q("gaussian-scale", [] { return worst_quotient_gap(gaussian(ParamRole::scale(1.0))); });
        q("gaussian-skew", [] { return worst_quotient_gap(sas_gaussian(0.5)); });
        q("exponential-location", [] { return worst_quotient_gap(exponential(ParamRole::location(0.0))); });
        q("exponential-scale", [] { return worst_quotient_gap(exponential(ParamRole::scale(1.0))); });
        q("gamma-scale", [] { return worst_quotient_gap(gamma_family(ParamRole::scale(1.0), 3.0)); });
        q("poisson", [] { return worst_quotient_gap(poisson(1.0)); });
        q("geometric", [] { return worst_quotient_gap(geometric(0.5)); });
        q("binomial", [] { return worst_quotient_gap(binomial(10, 0.3)); });

        // 8: Poincare constants
        for (double s : {0.5, 1.0, 3.0}) {
            char id[64];
            std::snprintf(id, sizeof id, "poincare-gaussian-sd%g", s);
            d.push_back({id, 8, "d = sigma^2", [=](TableContext&) {
                             return near(poincare_constant(gaussian(ParamRole::location(0.0), s)).d, s * s, 1e-6);
                         }});
        }
        d.push_back({"poincare-quartic", 8, "quartic density is not strongly unimodal", [](TableContext&) {
                         try {
                             poincare_constant(quartic(ParamRole::location(0.0)));
                         } catch (const SteinError& e) {
                             return flag(e.kind() == ErrorKind::NotStronglyUnimodal);
                         }
                         return flag(false);
                     }});

        // 9: Invariance
        d.push_back({"invariance-shift", 9, "h + 7 leaves every bound unchanged", [](TableContext& c) {
                         return at_most(invariance_gap(c, false), 1e-9);
                     }});
        d.push_back({"invariance-scale", 9, "2.5 h multiplies every bound by 6.25", [](TableContext& c) {
                         return at_most(invariance_gap(c, true), 1e-9);
                     }});

        // 10: Determinism
        d.push_back({"determinism", 10, "two scenario runs serialize identically", [](TableContext& c) {
                         const auto specs = builtin_scenarios();
                         const std::string a = emit_json(run_scenarios(specs, c.tol, 1));
                         const std::string b = emit_json(run_scenarios(specs, c.tol, 2));
                         return flag(a == b);
                     }});
        return d;
    }();
    return rows;
}

} // namespace

std::vector<std::string> worked_example_row_ids()
{
    std::vector<std::string> ids;
    for (const auto& r : row_definitions())
        ids.push_back(r.id);
    return ids;
}

std::vector<TableRow> worked_example_table(const Tolerances& tol)
{
    TableContext ctx;
    ctx.tol = tol;
    std::vector<TableRow> out;
    for (const auto& def : row_definitions()) {
        TableRow row;
        row.id = def.id;
        row.criterion = def.criterion;
        row.description = def.description;
        try {
            const Outcome o = def.compute(ctx);
            row.computed = o.computed;
            row.expected = o.expected;
            row.tolerance = o.tolerance;
            row.comparison = o.comparison;
            row.pass = judge(o);
        } catch (const std::exception& e) {
            row.computed = std::numeric_limits<double>::quiet_NaN();
            row.comparison = "error";
            row.description += std::string(" [") + e.what() + "]";
            row.pass = false;
        }
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace steinb
