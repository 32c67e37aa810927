#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steinb/operators.hpp"

namespace steinb {

enum class BoundKind { Lower, Upper };

std::string_view to_string(BoundKind kind);

struct Comparator {
    std::string name;
    BoundKind kind = BoundKind::Lower;
    double value = 0.0;  // +inf for divergent comparator integrals

    friend bool operator==(const Comparator&, const Comparator&) = default;
};

struct BoundReport {
    double lower = 0.0;
    double variance_truth = 0.0;
    double upper = kInf;
    double lower_slack = 0.0;
    double upper_slack = kInf;
    double tightness_residual = 0.0;
    double fisher = 0.0;
    std::vector<Comparator> comparators;
    std::vector<std::string> flags;
    std::optional<double> witness;  // where the score's derivative fails, for infinite upper bounds
};

struct LowerBound {
    double value = 0.0;
    bool vacuous = false;  // Fisher information diverges
};

struct UpperBound {
    double value = kInf;
    std::optional<double> witness;
    bool divergent = false;  // monotone score, but the defining integral diverges
};

/// (E[h'(X) ftilde(X)])^2 / I(theta0), with ftilde from the f = 1 exchanging pair.
LowerBound lower_bound(const ContinuousFamily& fam, const TestFunction& h, double tol = 1e-12);
LowerBound lower_bound(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h,
                       double tol = 1e-12);

/// E[(h')^2 ftilde / (-phi')]; +inf when the score is not a diffeomorphism.
UpperBound upper_bound(const ContinuousFamily& fam, const TestFunction& h, double tol = 1e-12);
UpperBound upper_bound(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h,
                       double tol = 1e-12);

/// Integrand of the upper bound, without the density.
RealFn upper_bound_weight(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h);

/// (sum_x D+h(x) ftilde(x+1) g(x+1))^2 / I(theta0), summation-by-parts form.
LowerBound discrete_lower_bound(const DiscreteFamily& fam, const TestFunction& h, double tol = 1e-14);

struct PoincareConstant {
    double epsilon = 0.0;  // inf of -(log g)'' over the support
    double d = kInf;       // 1 / epsilon
};

PoincareConstant poincare_constant(const ContinuousFamily& fam);

/// Comparator bounds from the literature for the families that have them.
std::vector<Comparator> literature_bounds(const ContinuousFamily& fam, const TestFunction& h, double tol = 1e-12);

/// min over (a, b) of E[(h - a phi - b)^2] / Var[h].
double tightness_residual(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h,
                          double tol = 1e-12);
double tightness_residual(const DiscreteFamily& fam, const ScoreProfile& prof, const TestFunction& h,
                          double tol = 1e-14);

} // namespace steinb
