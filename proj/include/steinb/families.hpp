#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steinb/numerics.hpp"

namespace steinb {

enum class RoleKind { Location, Scale, SkewSAS, DiscreteTheta };

std::string_view to_string(RoleKind kind);
RoleKind role_kind_from_string(std::string_view s);

/// Which parameter the Stein operator differentiates, and its value theta0.
struct ParamRole {
    RoleKind kind = RoleKind::Location;
    double value = 0.0;

    static ParamRole location(double mu0 = 0.0) { return {RoleKind::Location, mu0}; }
    static ParamRole scale(double sigma0 = 1.0);
    static ParamRole skew_sas(double delta0 = 0.0) { return {RoleKind::SkewSAS, delta0}; }
    static ParamRole discrete(double theta0) { return {RoleKind::DiscreteTheta, theta0}; }
};

/// A base density g0 together with the way the parameter enters:
/// g0(x - mu), sigma g0(sigma x), or the sinh-arcsinh skewing of g0.
struct ContinuousFamily {
    std::string name;
    RealFn base_density;
    RealFn log_derivative;         // g0'/g0
    RealFn log_second_derivative;  // (g0'/g0)'; empty means finite differences
    Interval base_support = Interval::real_line();
    ParamRole role;
    int smooth_order = 1;
    bool symmetric_base = false;
    bool support_depends_on_parameter = false;
    double shape = 0.0;  // structural constant (gamma shape), 0 when unused
    double sd = 1.0;     // standard deviation of a Gaussian base

    double theta0() const { return role.value; }
};

struct DiscreteFamily {
    std::string name;
    std::function<double(long, double)> pmf;
    std::optional<long> support_max;  // N, or nullopt for {0, 1, ...}
    // d/dtheta of g(x; theta) / g(0; theta)
    std::function<double(long, double)> theta_ratio_derivative;
    // d/dtheta of log g(x; theta)
    std::function<double(long, double)> score;
    // Bound on sum_{y >= n} g(y; theta), when a closed form exists.
    std::function<std::optional<double>(long, double)> tail_bound;
    ParamRole role = ParamRole::discrete(1.0);
    double theta_lo = 0.0;  // admissible open interval for theta
    double theta_hi = kInf;
    long trials = 0;  // binomial n

    double theta0() const { return role.value; }
};

/// h with its derivatives; the forward difference is used on integer supports.
struct TestFunction {
    std::string name;
    RealFn value;
    RealFn first;
    RealFn second;  // may be empty
    IntFn forward_difference;  // may be empty

    double operator()(double x) const { return value(x); }
};

struct SasPoint {
    double s;
    double c;
};

SasPoint sas_transform(double x, double delta);
/// Inverse of x -> S_delta(x).
double sas_inverse(double y, double delta);

double standard_normal_pdf(double x);

// Continuous catalogue. `sd` rescales the Gaussian base to N(0, sd^2).
ContinuousFamily gaussian(ParamRole role, double sd = 1.0);
ContinuousFamily exponential(ParamRole role);
ContinuousFamily gamma_family(ParamRole role, double shape);
ContinuousFamily sas_gaussian(double delta0);
/// exp(-x^4/4)/Z: log-concave but not strongly so.
ContinuousFamily quartic(ParamRole role);

// Discrete catalogue; the role carries theta0.
DiscreteFamily poisson(double lambda0);
DiscreteFamily geometric(double p0);
DiscreteFamily binomial(long n, double p0);

/// Structural constants accepted by the string registry.
struct FamilyConstants {
    std::optional<double> shape;
    std::optional<double> sd;
    std::optional<long> trials;
};

bool is_discrete_family(std::string_view id);
ContinuousFamily continuous_family(std::string_view id, ParamRole role, const FamilyConstants& c = {});
DiscreteFamily discrete_family(std::string_view id, double theta0, const FamilyConstants& c = {});

/// Family with the same base and role kind but a different parameter value.
ContinuousFamily with_parameter(const ContinuousFamily& fam, double theta);
DiscreteFamily with_parameter(const DiscreteFamily& fam, double theta);

double density_at(const ContinuousFamily& fam, double x, double theta);
double density_at(const ContinuousFamily& fam, double x);
double pmf_at(const DiscreteFamily& fam, long x, double theta);
double pmf_at(const DiscreteFamily& fam, long x);

/// Support of X ~ g(.; theta).
Interval support_at(const ContinuousFamily& fam, double theta);
Interval support_at(const ContinuousFamily& fam);

/// Log-derivative of the base density, with its derivative (closed form when
/// registered, finite differences otherwise).
double log_derivative_prime(const ContinuousFamily& fam, double y);

/// E[q(X)] under the family at theta0.
double expectation(const ContinuousFamily& fam, const RealFn& q, double tol = 1e-12);
ExtendedQuad expectation_extended(const ContinuousFamily& fam, const RealFn& q, double tol = 1e-12);
double expectation(const DiscreteFamily& fam, const IntFn& q, double tol = 1e-14);

/// Sums q(x) g(x) over the support, stopping by the series rules for infinite N.
double sum_over_support(const DiscreteFamily& fam, const IntFn& q, double tol = 1e-14);

/// Smallest R such that the base law puts mass at most `mass` outside [-R, R].
double bulk_radius(const ContinuousFamily& fam, double mass = 1e-8);

// Test functions.
TestFunction constant_function(double c);
TestFunction polynomial(std::vector<double> coeffs);  // coeffs[k] multiplies x^k
TestFunction sqrt_function();
/// exp(1 - 1/(1 - (x/R)^2)) on |x| < R, zero outside.
TestFunction bump(double radius);
TestFunction product(const TestFunction& a, const TestFunction& b);
TestFunction scaled(const TestFunction& h, double c);
TestFunction shifted(const TestFunction& h, double c);

} // namespace steinb
