#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>

#include "steinb/error.hpp"

namespace steinb {

using RealFn = std::function<double(double)>;
using IntFn = std::function<double(long)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed real interval with possibly infinite endpoints.
struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_);

    static Interval real_line() { return {-kInf, kInf}; }
    static Interval positive() { return {0.0, kInf}; }

    bool lo_finite() const { return lo > -kInf; }
    bool hi_finite() const { return hi < kInf; }
    bool contains(double x) const { return x >= lo && x <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct QuadOptions {
    std::size_t max_intervals = 2000;
};

/// Adaptive 21-point Gauss-Kronrod quadrature. Infinite endpoints are mapped
/// onto a finite parameter interval (x = t/(1-t^2) on the real line,
/// x = a + t/(1-t) on half lines) before subdivision.
QuadResult integrate(const RealFn& f, const Interval& iv, double tol, const QuadOptions& opts = {});

/// Integral that may legitimately diverge. `value` is +/-inf when the
/// truncation probe shows the truncated integrals growing without contracting.
struct ExtendedQuad {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    bool divergent = false;
};

ExtendedQuad integrate_extended(const RealFn& f, const Interval& iv, double tol,
                                const QuadOptions& opts = {});

/// Bound on the remaining tail sum of |f| starting at the given index, when known.
using TailBound = std::function<std::optional<double>(long)>;

double sum_series(const IntFn& f, long start, const TailBound& tail_bound, double tol);

/// Central difference with step cbrt(eps) * max(1, |x|).
double derivative(const RealFn& f, double x);

enum class Monotonicity { Increasing, Decreasing, NotMonotone };

struct MonotonicityCertificate {
    Monotonicity verdict = Monotonicity::NotMonotone;
    std::optional<double> witness;
    std::size_t skipped = 0;
    bool all_skipped = false;
};

/// Samples `f_prime` over the interior of `iv`. A derivative that vanishes at
/// an interior point (found by polishing local minima of |f'|) counts as a
/// failure of monotonicity: the caller needs a diffeomorphism.
MonotonicityCertificate monotonicity_scan(const RealFn& f, const RealFn& f_prime, const Interval& iv,
                                          std::size_t grid);

/// Points of `iv` at evenly spaced parameter values of the quadrature transform.
double interval_point(const Interval& iv, double u);

/// Golden-section minimisation of f over [a, b].
double golden_section_min(const RealFn& f, double a, double b, double xtol = 1e-12);

} // namespace steinb
