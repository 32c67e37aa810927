#include "steinb/families.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace steinb {

std::string_view to_string(RoleKind kind)
{
    switch (kind) {
    case RoleKind::Location: return "location";
    case RoleKind::Scale: return "scale";
    case RoleKind::SkewSAS: return "skew";
    case RoleKind::DiscreteTheta: return "theta";
    }
    return "unknown";
}

RoleKind role_kind_from_string(std::string_view s)
{
    if (s == "location" || s == "loc")
        return RoleKind::Location;
    if (s == "scale" || s == "sca")
        return RoleKind::Scale;
    if (s == "skew" || s == "sas")
        return RoleKind::SkewSAS;
    if (s == "theta" || s == "discrete")
        return RoleKind::DiscreteTheta;
    throw SteinError(ErrorKind::InvalidParameter, "unknown role '" + std::string(s) + "'");
}

ParamRole ParamRole::scale(double sigma0)
{
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
        throw SteinError(ErrorKind::InvalidParameter, "scale parameter must be positive");
    return {RoleKind::Scale, sigma0};
}

SasPoint sas_transform(double x, double delta)
{
    const double a = std::asinh(x) + delta;
    return {std::sinh(a), std::cosh(a)};
}

double sas_inverse(double y, double delta) { return std::sinh(std::asinh(y) - delta); }

double standard_normal_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

void check_role(const ParamRole& role)
{
    if (!std::isfinite(role.value))
        throw SteinError(ErrorKind::InvalidParameter, "parameter must be finite");
    if (role.kind == RoleKind::Scale && !(role.value > 0.0))
        throw SteinError(ErrorKind::InvalidParameter, "scale parameter must be positive");
    if (role.kind == RoleKind::DiscreteTheta)
        throw SteinError(ErrorKind::InvalidParameter, "continuous family cannot take a discrete role");
}

void check_theta(const ContinuousFamily& fam, double theta)
{
    if (!std::isfinite(theta))
        throw SteinError(ErrorKind::InvalidParameter, "parameter must be finite");
    if (fam.role.kind == RoleKind::Scale && !(theta > 0.0))
        throw SteinError(ErrorKind::InvalidParameter,
                         "scale parameter must be positive, got " + std::to_string(theta));
}

void check_theta(const DiscreteFamily& fam, double theta)
{
    if (!(theta > fam.theta_lo && theta < fam.theta_hi))
        throw SteinError(ErrorKind::InvalidParameter,
                         fam.name + ": parameter " + std::to_string(theta) + " outside admissible interval");
}

double log_binomial(long n, long k)
{
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) - std::lgamma(double(n - k) + 1.0);
}

} // namespace

ContinuousFamily gaussian(ParamRole role, double sd)
{
    check_role(role);
    if (!(sd > 0.0))
        throw SteinError(ErrorKind::InvalidParameter, "gaussian sd must be positive");
    ContinuousFamily fam;
    fam.name = role.kind == RoleKind::SkewSAS ? "sas-gaussian" : "gaussian";
    fam.base_density = [sd](double x) { return standard_normal_pdf(x / sd) / sd; };
    fam.log_derivative = [sd](double x) { return -x / (sd * sd); };
    fam.log_second_derivative = [sd](double) { return -1.0 / (sd * sd); };
    fam.base_support = Interval::real_line();
    fam.role = role;
    fam.smooth_order = 2;
    fam.symmetric_base = true;
    fam.sd = sd;
    return fam;
}

ContinuousFamily exponential(ParamRole role)
{
    check_role(role);
    if (role.kind == RoleKind::SkewSAS)
        throw SteinError(ErrorKind::InvalidParameter, "SAS skewing needs a symmetric base density");
    ContinuousFamily fam;
    fam.name = "exponential";
    fam.base_density = [](double x) { return x >= 0.0 ? std::exp(-x) : 0.0; };
    fam.log_derivative = [](double) { return -1.0; };
    fam.log_second_derivative = [](double) { return 0.0; };
    fam.base_support = Interval::positive();
    fam.role = role;
    fam.smooth_order = 2;
    fam.support_depends_on_parameter = role.kind == RoleKind::Location;
    return fam;
}

ContinuousFamily gamma_family(ParamRole role, double a)
{
    check_role(role);
    if (!(a > 0.0) || !std::isfinite(a))
        throw SteinError(ErrorKind::InvalidParameter, "gamma shape must be positive");
    if (role.kind == RoleKind::SkewSAS)
        throw SteinError(ErrorKind::InvalidParameter, "SAS skewing needs a symmetric base density");
    if (role.kind == RoleKind::Location && !(a > 1.0))
        throw SteinError(ErrorKind::InvalidParameter, "gamma location role requires shape a > 1");
    ContinuousFamily fam;
    fam.name = "gamma";
    const double log_norm = std::lgamma(a);
    fam.base_density = [a, log_norm](double x) {
        return x > 0.0 ? std::exp((a - 1.0) * std::log(x) - x - log_norm) : 0.0;
    };
    fam.log_derivative = [a](double x) { return (a - 1.0) / x - 1.0; };
    fam.log_second_derivative = [a](double x) { return -(a - 1.0) / (x * x); };
    fam.base_support = Interval::positive();
    fam.role = role;
    fam.smooth_order = 2;
    fam.shape = a;
    return fam;
}

ContinuousFamily sas_gaussian(double delta0) { return gaussian(ParamRole::skew_sas(delta0)); }

ContinuousFamily quartic(ParamRole role)
{
    check_role(role);
    ContinuousFamily fam;
    fam.name = "quartic";
    // Z = 2 * 4^(-3/4) * Gamma(1/4)
    const double z = 2.0 * std::pow(4.0, -0.75) * std::tgamma(0.25);
    fam.base_density = [z](double x) { return std::exp(-0.25 * x * x * x * x) / z; };
    fam.log_derivative = [](double x) { return -x * x * x; };
    fam.log_second_derivative = [](double x) { return -3.0 * x * x; };
    fam.base_support = Interval::real_line();
    fam.role = role;
    fam.smooth_order = 2;
    fam.symmetric_base = true;
    return fam;
}

DiscreteFamily poisson(double lambda0)
{
    DiscreteFamily fam;
    fam.name = "poisson";
    fam.pmf = [](long x, double lambda) {
        if (x < 0)
            return 0.0;
        return std::exp(-lambda + double(x) * std::log(lambda) - std::lgamma(double(x) + 1.0));
    };
    // lambda^(x-1) / (x-1)!
    fam.theta_ratio_derivative = [](long x, double lambda) {
        if (x <= 0)
            return 0.0;
        return std::exp(double(x - 1) * std::log(lambda) - std::lgamma(double(x)));
    };
    fam.score = [](long x, double lambda) { return double(x) / lambda - 1.0; };
    fam.role = ParamRole::discrete(lambda0);
    fam.theta_lo = 0.0;
    fam.theta_hi = kInf;
    check_theta(fam, lambda0);
    return fam;
}

DiscreteFamily geometric(double p0)
{
    DiscreteFamily fam;
    fam.name = "geometric";
    fam.pmf = [](long x, double p) { return x < 0 ? 0.0 : std::pow(1.0 - p, double(x)) * p; };
    fam.theta_ratio_derivative = [](long x, double p) {
        if (x <= 0)
            return 0.0;
        return -double(x) * std::pow(1.0 - p, double(x - 1));
    };
    fam.score = [](long x, double p) { return 1.0 / p - double(x) / (1.0 - p); };
    fam.tail_bound = [](long n, double p) -> std::optional<double> {
        return std::pow(1.0 - p, double(std::max(n, 0L)));
    };
    fam.role = ParamRole::discrete(p0);
    fam.theta_lo = 0.0;
    fam.theta_hi = 1.0;
    check_theta(fam, p0);
    return fam;
}

DiscreteFamily binomial(long n, double p0)
{
    if (n < 1)
        throw SteinError(ErrorKind::InvalidParameter, "binomial needs n >= 1");
    DiscreteFamily fam;
    fam.name = "binomial";
    fam.pmf = [n](long x, double p) {
        if (x < 0 || x > n)
            return 0.0;
        return std::exp(log_binomial(n, x) + double(x) * std::log(p) + double(n - x) * std::log1p(-p));
    };
    // C(n,x) x p^(x-1) / (1-p)^(x+1)
    fam.theta_ratio_derivative = [n](long x, double p) {
        if (x <= 0 || x > n)
            return 0.0;
        return std::exp(log_binomial(n, x) + std::log(double(x)) + double(x - 1) * std::log(p) -
                        double(x + 1) * std::log1p(-p));
    };
    fam.score = [n](long x, double p) { return double(x) / p - double(n - x) / (1.0 - p); };
    fam.tail_bound = [n](long k, double) -> std::optional<double> {
        return k > n ? std::optional<double>(0.0) : std::nullopt;
    };
    fam.support_max = n;
    fam.role = ParamRole::discrete(p0);
    fam.theta_lo = 0.0;
    fam.theta_hi = 1.0;
    fam.trials = n;
    check_theta(fam, p0);
    return fam;
}

bool is_discrete_family(std::string_view id)
{
    return id == "poisson" || id == "geometric" || id == "binomial";
}

ContinuousFamily continuous_family(std::string_view id, ParamRole role, const FamilyConstants& c)
{
    if (id == "gaussian")
        return gaussian(role, c.sd.value_or(1.0));
    if (id == "sas-gaussian") {
        if (role.kind != RoleKind::SkewSAS)
            throw SteinError(ErrorKind::UnsupportedRole, "sas-gaussian only carries the skew role");
        return gaussian(role, c.sd.value_or(1.0));
    }
    if (id == "exponential")
        return exponential(role);
    if (id == "quartic")
        return quartic(role);
    if (id == "gamma") {
        if (!c.shape)
            throw SteinError(ErrorKind::InvalidParameter, "gamma needs a shape constant");
        return gamma_family(role, *c.shape);
    }
    throw SteinError(ErrorKind::InvalidParameter, "unknown continuous family '" + std::string(id) + "'");
}

DiscreteFamily discrete_family(std::string_view id, double theta0, const FamilyConstants& c)
{
    if (id == "poisson")
        return poisson(theta0);
    if (id == "geometric")
        return geometric(theta0);
    if (id == "binomial") {
        if (!c.trials)
            throw SteinError(ErrorKind::InvalidParameter, "binomial needs a trials constant n");
        return binomial(*c.trials, theta0);
    }
    throw SteinError(ErrorKind::InvalidParameter, "unknown discrete family '" + std::string(id) + "'");
}

ContinuousFamily with_parameter(const ContinuousFamily& fam, double theta)
{
    check_theta(fam, theta);
    ContinuousFamily out = fam;
    out.role.value = theta;
    return out;
}

DiscreteFamily with_parameter(const DiscreteFamily& fam, double theta)
{
    check_theta(fam, theta);
    DiscreteFamily out = fam;
    out.role.value = theta;
    return out;
}

double density_at(const ContinuousFamily& fam, double x, double theta)
{
    check_theta(fam, theta);
    switch (fam.role.kind) {
    case RoleKind::Location: return fam.base_density(x - theta);
    case RoleKind::Scale: return theta * fam.base_density(theta * x);
    case RoleKind::SkewSAS: {
        const SasPoint p = sas_transform(x, theta);
        return p.c / std::sqrt(1.0 + x * x) * fam.base_density(p.s);
    }
    case RoleKind::DiscreteTheta: break;
    }
    throw SteinError(ErrorKind::UnsupportedRole, "discrete role on a continuous family");
}

double density_at(const ContinuousFamily& fam, double x) { return density_at(fam, x, fam.theta0()); }

double pmf_at(const DiscreteFamily& fam, long x, double theta)
{
    check_theta(fam, theta);
    if (x < 0 || (fam.support_max && x > *fam.support_max))
        return 0.0;
    return fam.pmf(x, theta);
}

double pmf_at(const DiscreteFamily& fam, long x) { return pmf_at(fam, x, fam.theta0()); }

Interval support_at(const ContinuousFamily& fam, double theta)
{
    const Interval& b = fam.base_support;
    switch (fam.role.kind) {
    case RoleKind::Location: return {b.lo + theta, b.hi + theta};
    case RoleKind::Scale: return {b.lo / theta, b.hi / theta};
    case RoleKind::SkewSAS: return {sas_inverse(b.lo, theta), sas_inverse(b.hi, theta)};
    case RoleKind::DiscreteTheta: break;
    }
    throw SteinError(ErrorKind::UnsupportedRole, "discrete role on a continuous family");
}

Interval support_at(const ContinuousFamily& fam) { return support_at(fam, fam.theta0()); }

double log_derivative_prime(const ContinuousFamily& fam, double y)
{
    if (fam.log_second_derivative)
        return fam.log_second_derivative(y);
    return derivative(fam.log_derivative, y);
}

double expectation(const ContinuousFamily& fam, const RealFn& q, double tol)
{
    RealFn integrand = [&](double x) {
        const double g = density_at(fam, x);
        return g == 0.0 ? 0.0 : q(x) * g;
    };
    return integrate(integrand, support_at(fam), tol).value;
}

ExtendedQuad expectation_extended(const ContinuousFamily& fam, const RealFn& q, double tol)
{
    RealFn integrand = [&](double x) {
        const double g = density_at(fam, x);
        return g == 0.0 ? 0.0 : q(x) * g;
    };
    return integrate_extended(integrand, support_at(fam), tol);
}

double sum_over_support(const DiscreteFamily& fam, const IntFn& q, double tol)
{
    const double theta = fam.theta0();
    if (fam.support_max) {
        double sum = 0.0;
        for (long x = 0; x <= *fam.support_max; ++x)
            sum += q(x) * fam.pmf(x, theta);
        return sum;
    }
    IntFn term = [&](long x) {
        const double g = fam.pmf(x, theta);
        return g == 0.0 ? 0.0 : q(x) * g;
    };
    return sum_series(term, 0, nullptr, tol);
}

double expectation(const DiscreteFamily& fam, const IntFn& q, double tol)
{
    return sum_over_support(fam, q, tol);
}

double bulk_radius(const ContinuousFamily& fam, double mass)
{
    const Interval& s = fam.base_support;
    auto outside = [&](double r) {
        double m = 0.0;
        if (s.lo < -r)
            m += integrate(fam.base_density, Interval(s.lo, -r), 1e-15).value;
        if (s.hi > r)
            m += integrate(fam.base_density, Interval(r, s.hi), 1e-15).value;
        return m;
    };
    double hi = 1.0;
    while (outside(hi) > mass) {
        hi *= 2.0;
        if (hi > 1e8)
            throw SteinError(ErrorKind::NonConvergence, "bulk radius: tails too heavy");
    }
    double lo = 0.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (outside(mid) > mass)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Test functions

TestFunction constant_function(double c)
{
    return {
        "const",
        [c](double) { return c; },
        [](double) { return 0.0; },
        [](double) { return 0.0; },
        [](long) { return 0.0; },
    };
}

namespace {

double horner(const std::vector<double>& c, double x)
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

std::vector<double> differentiate(const std::vector<double>& c)
{
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k)
        d.push_back(double(k) * c[k]);
    return d;
}

std::string poly_name(const std::vector<double>& c)
{
    std::string out = "poly[";
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k)
            out += ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", c[k]);
        out += buf;
    }
    return out + "]";
}

} // namespace

TestFunction polynomial(std::vector<double> coeffs)
{
    auto d1 = differentiate(coeffs);
    auto d2 = differentiate(d1);
    TestFunction t;
    t.name = poly_name(coeffs);
    t.value = [coeffs](double x) { return horner(coeffs, x); };
    t.first = [d1](double x) { return horner(d1, x); };
    t.second = [d2](double x) { return horner(d2, x); };
    t.forward_difference = [coeffs](long x) {
        return horner(coeffs, double(x) + 1.0) - horner(coeffs, double(x));
    };
    return t;
}

TestFunction sqrt_function()
{
    TestFunction t;
    t.name = "sqrt";
    t.value = [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; };
    t.first = [](double x) { return 0.5 / std::sqrt(x); };
    t.second = [](double x) { return -0.25 / (x * std::sqrt(x)); };
    t.forward_difference = [](long x) { return std::sqrt(double(x) + 1.0) - std::sqrt(double(std::max(x, 0L))); };
    return t;
}

TestFunction bump(double radius)
{
    TestFunction t;
    t.name = "bump";
    const double r = radius;
    t.value = [r](double x) {
        const double s = x / r;
        const double u = 1.0 - s * s;
        return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
    };
    t.first = [r](double x) {
        const double s = x / r;
        const double u = 1.0 - s * s;
        if (u <= 0.0)
            return 0.0;
        return std::exp(1.0 - 1.0 / u) * (-2.0 * s / (r * u * u));
    };
    t.second = [r](double x) {
        const double s = x / r;
        const double u = 1.0 - s * s;
        if (u <= 0.0)
            return 0.0;
        const double b = std::exp(1.0 - 1.0 / u);
        const double g = -2.0 * s / (r * u * u);
        const double gp = -2.0 / (r * r * u * u) - 8.0 * s * s / (r * r * u * u * u);
        return b * (g * g + gp);
    };
    auto value = t.value;
    t.forward_difference = [value](long x) { return value(double(x) + 1.0) - value(double(x)); };
    return t;
}

TestFunction product(const TestFunction& a, const TestFunction& b)
{
    TestFunction t;
    t.name = a.name + "*" + b.name;
    t.value = [a, b](double x) { return a.value(x) * b.value(x); };
    t.first = [a, b](double x) { return a.first(x) * b.value(x) + a.value(x) * b.first(x); };
    if (a.second && b.second) {
        t.second = [a, b](double x) {
            return a.second(x) * b.value(x) + 2.0 * a.first(x) * b.first(x) + a.value(x) * b.second(x);
        };
    }
    auto value = t.value;
    t.forward_difference = [value](long x) { return value(double(x) + 1.0) - value(double(x)); };
    return t;
}

TestFunction scaled(const TestFunction& h, double c)
{
    TestFunction t;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", c);
    t.name = std::string(buf) + "*" + h.name;
    t.value = [h, c](double x) { return c * h.value(x); };
    t.first = [h, c](double x) { return c * h.first(x); };
    if (h.second)
        t.second = [h, c](double x) { return c * h.second(x); };
    if (h.forward_difference)
        t.forward_difference = [h, c](long x) { return c * h.forward_difference(x); };
    return t;
}

TestFunction shifted(const TestFunction& h, double c)
{
    TestFunction t = h;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", c);
    t.name = h.name + "+" + buf;
    t.value = [h, c](double x) { return h.value(x) + c; };
    return t;
}

} // namespace steinb
