#pragma once

#include <optional>
#include <string>

#include "steinb/families.hpp"

namespace steinb {

/// Dirac term c * delta_{location} carried by operators whose support moves
/// with the parameter.
struct Atom {
    double location;
    double coefficient;
};

/// A Stein operator with its test function f0 already bound.
struct SteinOperator {
    std::string family;
    ParamRole role;
    RealFn apply;           // continuous families: x -> T(f0)(x) on the support interior
    IntFn apply_discrete;   // discrete families
    std::optional<Atom> atom;

    bool discrete() const { return static_cast<bool>(apply_discrete); }
};

SteinOperator location_operator(const ContinuousFamily& fam, const TestFunction& f0);
SteinOperator scale_operator(const ContinuousFamily& fam, const TestFunction& f0);
SteinOperator skew_operator_sas(const ContinuousFamily& fam, const TestFunction& f0);
/// SAS operator applied to f0 = sqrt(1 + x^2) f1.
SteinOperator skew_operator_sas_variant(const ContinuousFamily& fam, const TestFunction& f1);
/// f0 = sqrt(1 + x^2) f1, the substitution behind the variant SAS operator.
TestFunction sqrt_one_plus_square_times(const TestFunction& f1);
SteinOperator discrete_operator(const DiscreteFamily& fam, const TestFunction& f0);

/// Dispatches on the family's role.
SteinOperator stein_operator(const ContinuousFamily& fam, const TestFunction& f0);

/// d/dtheta (f g) / g at theta0 by central differences in theta, with
/// f(x; theta) built from f0 as the role prescribes.
double generic_quotient(const ContinuousFamily& fam, const TestFunction& f0, double x, double step = 1e-5);
double generic_quotient(const DiscreteFamily& fam, const TestFunction& f0, long x, double step = 1e-5);

/// Probabilists' Hermite polynomial He_n.
double hermite(int n, double x);
TestFunction hermite_function(int n);

struct ScoreProfile {
    RealFn phi;        // d/dtheta log g(x; theta) at theta0, as a function of x
    RealFn phi_prime;  // d/dx of phi; empty for discrete families
    MonotonicityCertificate monotonicity;
    double fisher = 0.0;  // +inf when the defining integral diverges
    std::optional<double> zero_crossing;
};

ScoreProfile score_profile(const ContinuousFamily& fam, double tol = 1e-12);
ScoreProfile score_profile(const DiscreteFamily& fam, double tol = 1e-14);

struct ExchangingPair {
    RealFn ftilde;
    bool boundary_ok = false;
};

struct DiscreteExchangingPair {
    IntFn ftilde;
    IntFn ftilde_times_density;
    bool boundary_ok = false;
};

/// Exchanging function for f(x; theta) built from f0, so that
/// d/dtheta (f g) = d/dx (ftilde g). Throws BoundaryViolation when ftilde g
/// does not vanish at both ends of the support and `strict` is set.
ExchangingPair exchanging_pair(const ContinuousFamily& fam, const TestFunction& f0, bool strict = true);
ExchangingPair exchanging_pair(const ContinuousFamily& fam, bool strict = true);

/// Exchanging function for f = 1 on a discrete family:
/// d/dtheta g = D+(ftilde g), ftilde(0) g(0) = 0.
DiscreteExchangingPair exchanging_pair(const DiscreteFamily& fam, bool strict = true, double tol = 1e-14);

/// Value of ftilde g at both support edges (limits for open or infinite ends).
std::pair<double, double> boundary_values(const ContinuousFamily& fam, const RealFn& ftilde);

} // namespace steinb
