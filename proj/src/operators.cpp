#include "steinb/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace steinb {

namespace {

void require_role(const ContinuousFamily& fam, RoleKind kind, const char* what)
{
    if (fam.role.kind != kind)
        throw SteinError(ErrorKind::UnsupportedRole,
                         std::string(what) + " needs the " + std::string(to_string(kind)) + " role, family " +
                             fam.name + " carries " + std::string(to_string(fam.role.kind)));
}

bool in_open_support(const Interval& s, double x) { return x > s.lo && x < s.hi; }

} // namespace

SteinOperator location_operator(const ContinuousFamily& fam, const TestFunction& f0)
{
    require_role(fam, RoleKind::Location, "location_operator");
    const double mu0 = fam.theta0();
    const Interval support = support_at(fam);
    SteinOperator op;
    op.family = fam.name;
    op.role = fam.role;
    op.apply = [fam, f0, mu0, support](double x) {
        if (!in_open_support(support, x))
            return 0.0;
        const double y = x - mu0;
        return -f0.first(y) - f0.value(y) * fam.log_derivative(y);
    };
    // A density that jumps at a finite left edge leaves a Dirac term in the
    // distributional derivative.
    if (fam.base_support.lo_finite() && fam.base_density(fam.base_support.lo) > 0.0) {
        const double a = fam.base_support.lo;
        op.atom = Atom{a + mu0, -f0.value(a)};
    }
    return op;
}

SteinOperator scale_operator(const ContinuousFamily& fam, const TestFunction& f0)
{
    require_role(fam, RoleKind::Scale, "scale_operator");
    const double sigma0 = fam.theta0();
    const Interval support = support_at(fam);
    SteinOperator op;
    op.family = fam.name;
    op.role = fam.role;
    op.apply = [fam, f0, sigma0, support](double x) {
        if (!in_open_support(support, x))
            return 0.0;
        const double u = sigma0 * x;
        return (f0.value(u) + u * f0.first(u) + u * f0.value(u) * fam.log_derivative(u)) / sigma0;
    };
    return op;
}

SteinOperator skew_operator_sas(const ContinuousFamily& fam, const TestFunction& f0)
{
    require_role(fam, RoleKind::SkewSAS, "skew_operator_sas");
    if (!fam.symmetric_base)
        throw SteinError(ErrorKind::UnsupportedRole, "SAS operator needs a symmetric base density");
    const double delta0 = fam.theta0();
    SteinOperator op;
    op.family = fam.name;
    op.role = fam.role;
    op.apply = [fam, f0, delta0](double x) {
        const SasPoint p = sas_transform(x, delta0);
        return p.c * f0.first(p.s) + (p.s / p.c + p.c * fam.log_derivative(p.s)) * f0.value(p.s);
    };
    return op;
}

TestFunction sqrt_one_plus_square_times(const TestFunction& f1)
{
    TestFunction f0;
    f0.name = "sqrt(1+x^2)*" + f1.name;
    f0.value = [f1](double x) { return std::sqrt(1.0 + x * x) * f1.value(x); };
    f0.first = [f1](double x) {
        const double r = std::sqrt(1.0 + x * x);
        return x / r * f1.value(x) + r * f1.first(x);
    };
    return f0;
}

SteinOperator skew_operator_sas_variant(const ContinuousFamily& fam, const TestFunction& f1)
{
    return skew_operator_sas(fam, sqrt_one_plus_square_times(f1));
}

SteinOperator discrete_operator(const DiscreteFamily& fam, const TestFunction& f0)
{
    if (!fam.theta_ratio_derivative)
        throw SteinError(ErrorKind::UnsupportedRole, fam.name + ": no theta ratio derivative registered");
    const double theta0 = fam.theta0();
    SteinOperator op;
    op.family = fam.name;
    op.role = fam.role;
    op.apply_discrete = [fam, f0, theta0](long x) {
        const double g = pmf_at(fam, x, theta0);
        if (g == 0.0)
            return 0.0;
        auto r = [&](long k) {
            if (fam.support_max && k > *fam.support_max)
                return 0.0;
            return fam.theta_ratio_derivative(k, theta0);
        };
        const double xd = double(x);
        return (f0.value(xd + 1.0) * r(x + 1) - f0.value(xd) * r(x)) / g;
    };
    return op;
}

SteinOperator stein_operator(const ContinuousFamily& fam, const TestFunction& f0)
{
    switch (fam.role.kind) {
    case RoleKind::Location: return location_operator(fam, f0);
    case RoleKind::Scale: return scale_operator(fam, f0);
    case RoleKind::SkewSAS: return skew_operator_sas(fam, f0);
    case RoleKind::DiscreteTheta: break;
    }
    throw SteinError(ErrorKind::UnsupportedRole, "discrete role on a continuous family");
}

namespace {

template <class F>
double five_point(const F& f, double t, double h)
{
    return (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h);
}

} // namespace

double generic_quotient(const ContinuousFamily& fam, const TestFunction& f0, double x, double step)
{
    auto fg = [&](double theta) {
        double f = 0.0;
        switch (fam.role.kind) {
        case RoleKind::Location: f = f0.value(x - theta); break;
        case RoleKind::Scale: f = f0.value(theta * x); break;
        case RoleKind::SkewSAS: f = f0.value(sas_transform(x, theta).s); break;
        case RoleKind::DiscreteTheta:
            throw SteinError(ErrorKind::UnsupportedRole, "discrete role on a continuous family");
        }
        return f * density_at(fam, x, theta);
    };
    const double theta0 = fam.theta0();
    const double g = density_at(fam, x, theta0);
    if (g == 0.0)
        return 0.0;
    return five_point(fg, theta0, step) / g;
}

double generic_quotient(const DiscreteFamily& fam, const TestFunction& f0, long x, double step)
{
    // f g = D+( f0(x) g(x; theta) / g(0; theta) )
    auto fg = [&](double theta) {
        const double g0 = pmf_at(fam, 0, theta);
        return (f0.value(double(x) + 1.0) * pmf_at(fam, x + 1, theta) - f0.value(double(x)) * pmf_at(fam, x, theta)) /
               g0;
    };
    const double theta0 = fam.theta0();
    const double g = pmf_at(fam, x, theta0);
    if (g == 0.0)
        return 0.0;
    return five_point(fg, theta0, step) / g;
}

double hermite(int n, double x)
{
    if (n < 0 || n > 30)
        throw SteinError(ErrorKind::InvalidParameter, "hermite: degree must lie in [0, 30]");
    double prev = 1.0;
    if (n == 0)
        return prev;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = x * cur - double(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

TestFunction hermite_function(int n)
{
    hermite(n, 0.0);
    TestFunction t;
    t.name = "hermite" + std::to_string(n);
    t.value = [n](double x) { return hermite(n, x); };
    t.first = [n](double x) { return n >= 1 ? double(n) * hermite(n - 1, x) : 0.0; };
    t.second = [n](double x) { return n >= 2 ? double(n) * double(n - 1) * hermite(n - 2, x) : 0.0; };
    t.forward_difference = [n](long x) { return hermite(n, double(x) + 1.0) - hermite(n, double(x)); };
    return t;
}

// ---------------------------------------------------------------------------
// Score profiles

namespace {

std::optional<double> find_zero(const RealFn& phi, const Interval& iv)
{
    constexpr std::size_t kGrid = 512;
    double x_prev = interval_point(iv, 0.5 / kGrid);
    double f_prev = phi(x_prev);
    for (std::size_t i = 1; i < kGrid; ++i) {
        const double x = interval_point(iv, (double(i) + 0.5) / kGrid);
        const double f = phi(x);
        if (!std::isfinite(f) || !std::isfinite(f_prev)) {
            x_prev = x;
            f_prev = f;
            continue;
        }
        if (f == 0.0)
            return x;
        if ((f > 0.0) != (f_prev > 0.0)) {
            double a = x_prev;
            double b = x;
            double fa = f_prev;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if (m <= a || m >= b)
                    break;
                const double fm = phi(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fm > 0.0) == (fa > 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double x0 = 0.5 * (a + b);
            if (std::abs(phi(x0)) < 1e-9)
                return x0;
            return std::nullopt;
        }
        x_prev = x;
        f_prev = f;
    }
    return std::nullopt;
}

} // namespace

ScoreProfile score_profile(const ContinuousFamily& fam, double tol)
{
    ScoreProfile prof;
    const double theta0 = fam.theta0();
    switch (fam.role.kind) {
    case RoleKind::Location:
        if (fam.support_depends_on_parameter && fam.base_support.lo_finite() &&
            fam.base_density(fam.base_support.lo) > 0.0)
            throw SteinError(ErrorKind::UnsupportedRole,
                             fam.name + " location: support moves with the parameter and the density does not "
                                        "vanish at its edge");
        prof.phi = [fam, theta0](double x) { return -fam.log_derivative(x - theta0); };
        prof.phi_prime = [fam, theta0](double x) { return -log_derivative_prime(fam, x - theta0); };
        break;
    case RoleKind::Scale:
        prof.phi = [fam, theta0](double x) {
            const double u = theta0 * x;
            return (1.0 + u * fam.log_derivative(u)) / theta0;
        };
        prof.phi_prime = [fam, theta0](double x) {
            const double u = theta0 * x;
            return fam.log_derivative(u) + u * log_derivative_prime(fam, u);
        };
        break;
    case RoleKind::SkewSAS:
        if (!fam.symmetric_base)
            throw SteinError(ErrorKind::UnsupportedRole, "SAS score needs a symmetric base density");
        prof.phi = [fam, theta0](double x) {
            const SasPoint p = sas_transform(x, theta0);
            return p.s / p.c + p.c * fam.log_derivative(p.s);
        };
        prof.phi_prime = [fam, theta0](double x) {
            const SasPoint p = sas_transform(x, theta0);
            const double num = 1.0 / (p.c * p.c) + p.s * fam.log_derivative(p.s) +
                               p.c * p.c * log_derivative_prime(fam, p.s);
            return num / std::sqrt(1.0 + x * x);
        };
        break;
    case RoleKind::DiscreteTheta:
        throw SteinError(ErrorKind::UnsupportedRole, "discrete role on a continuous family");
    }

    const Interval support = support_at(fam);
    const RealFn phi = prof.phi;
    const ExtendedQuad fisher = expectation_extended(fam, [phi](double x) { return phi(x) * phi(x); }, tol);
    prof.fisher = fisher.divergent ? kInf : fisher.value;
    prof.monotonicity = monotonicity_scan(prof.phi, prof.phi_prime, support, 256);
    prof.zero_crossing = find_zero(prof.phi, support);
    return prof;
}

ScoreProfile score_profile(const DiscreteFamily& fam, double tol)
{
    ScoreProfile prof;
    const double theta0 = fam.theta0();
    prof.phi = [fam, theta0](double x) { return fam.score(std::lround(x), theta0); };
    prof.fisher = sum_over_support(
        fam,
        [&](long x) {
            const double s = fam.score(x, theta0);
            return s * s;
        },
        tol);

    // Monotonicity of the score along the bulk of the support, by forward
    // differences.
    long last = fam.support_max ? *fam.support_max : 0;
    if (!fam.support_max) {
        double mass = 0.0;
        while (mass < 1.0 - 1e-12 && last < 10'000'000) {
            mass += pmf_at(fam, last);
            ++last;
        }
    }
    MonotonicityCertificate cert;
    double sign = 0.0;
    for (long x = 0; x < last; ++x) {
        const double d = fam.score(x + 1, theta0) - fam.score(x, theta0);
        const double s = d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0;
        if (s == 0.0 || (sign != 0.0 && s != sign)) {
            cert.witness = double(x) + 0.5;
            sign = 0.0;
            break;
        }
        sign = s;
    }
    if (sign != 0.0)
        cert.verdict = sign > 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
    prof.monotonicity = cert;
    return prof;
}

// ---------------------------------------------------------------------------
// Exchanging pairs

std::pair<double, double> boundary_values(const ContinuousFamily& fam, const RealFn& ftilde)
{
    const Interval s = support_at(fam);
    auto product = [&](double x) {
        const double g = density_at(fam, x);
        return g == 0.0 ? 0.0 : ftilde(x) * g;
    };
    auto edge = [&](double e, double inward) {
        if (std::isfinite(e)) {
            const double off = std::max(4.0 * std::numeric_limits<double>::epsilon() * std::abs(e), 1e-300);
            return product(e + inward * off);
        }
        // Walk outward until the density underflows; the last finite product is the edge value.
        double last = 0.0;
        for (double r = 1.0; r <= 1e16; r *= 2.0) {
            const double x = -inward * r;
            if (density_at(fam, x) == 0.0)
                break;
            const double v = product(x);
            if (std::isfinite(v))
                last = v;
        }
        return last;
    };
    return {edge(s.lo, 1.0), edge(s.hi, -1.0)};
}

ExchangingPair exchanging_pair(const ContinuousFamily& fam, const TestFunction& f0, bool strict)
{
    ExchangingPair pair;
    const double theta0 = fam.theta0();
    switch (fam.role.kind) {
    case RoleKind::Location: pair.ftilde = [f0, theta0](double x) { return -f0.value(x - theta0); }; break;
    case RoleKind::Scale:
        pair.ftilde = [f0, theta0](double x) { return x / theta0 * f0.value(theta0 * x); };
        break;
    case RoleKind::SkewSAS:
        pair.ftilde = [f0, theta0](double x) {
            return std::sqrt(1.0 + x * x) * f0.value(sas_transform(x, theta0).s);
        };
        break;
    case RoleKind::DiscreteTheta:
        throw SteinError(ErrorKind::UnsupportedRole, "discrete role on a continuous family");
    }
    const auto [left, right] = boundary_values(fam, pair.ftilde);
    pair.boundary_ok = std::abs(left) <= 1e-9 && std::abs(right) <= 1e-9;
    if (strict && !pair.boundary_ok)
        throw SteinError(ErrorKind::BoundaryViolation,
                         fam.name + ": ftilde*g does not vanish at the support edges (" + std::to_string(left) +
                             ", " + std::to_string(right) + ")");
    return pair;
}

ExchangingPair exchanging_pair(const ContinuousFamily& fam, bool strict)
{
    return exchanging_pair(fam, constant_function(1.0), strict);
}

DiscreteExchangingPair exchanging_pair(const DiscreteFamily& fam, bool strict, double tol)
{
    const double theta0 = fam.theta0();
    auto term = [&](long y) {
        const double g = pmf_at(fam, y, theta0);
        return g == 0.0 ? 0.0 : fam.score(y, theta0) * g;
    };

    // Cut-off past which every term is negligible, by the series stop rule.
    long cutoff = 0;
    if (fam.support_max) {
        cutoff = *fam.support_max + 1;
    } else {
        int run = 0;
        const double small = tol * 1e-3;
        for (long y = 0;; ++y) {
            run = std::abs(term(y)) < small ? run + 1 : 0;
            if (run >= 64 && pmf_at(fam, y, theta0) < small) {
                cutoff = y + 1;
                break;
            }
            if (y > 10'000'000)
                throw SteinError(ErrorKind::TruncationUnsafe, fam.name + ": exchanging sum does not settle");
        }
    }

    // Prefix sums are free of cancellation while the score is negative (or
    // positive) throughout; past its sign change, the tail is used instead.
    auto prefix = std::make_shared<std::vector<double>>(std::size_t(cutoff) + 1, 0.0);
    auto tail = std::make_shared<std::vector<double>>(std::size_t(cutoff) + 2, 0.0);
    for (long y = 0; y < cutoff; ++y)
        (*prefix)[std::size_t(y) + 1] = (*prefix)[std::size_t(y)] + term(y);
    for (long y = cutoff - 1; y >= 0; --y)
        (*tail)[std::size_t(y)] = (*tail)[std::size_t(y) + 1] + term(y);
    const double s0 = fam.score(0, theta0);
    long pivot = 0;
    while (pivot < cutoff && (fam.score(pivot, theta0) > 0.0) == (s0 > 0.0))
        ++pivot;

    DiscreteExchangingPair pair;
    pair.ftilde_times_density = [prefix, tail, pivot, cutoff](long x) {
        if (x <= 0 || x > cutoff)
            return 0.0;
        return x <= pivot ? (*prefix)[std::size_t(x)] : -(*tail)[std::size_t(x)];
    };
    auto product = pair.ftilde_times_density;
    pair.ftilde = [product, fam, theta0](long x) {
        const double g = pmf_at(fam, x, theta0);
        return g == 0.0 ? 0.0 : product(x) / g;
    };
    const double total = (*prefix)[std::size_t(cutoff)];
    pair.boundary_ok = std::abs(total) <= 1e-9;
    if (strict && !pair.boundary_ok)
        throw SteinError(ErrorKind::BoundaryViolation,
                         fam.name + ": ftilde*g does not vanish past the support (" + std::to_string(total) + ")");
    return pair;
}

} // namespace steinb
