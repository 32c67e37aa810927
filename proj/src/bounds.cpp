#include "steinb/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace steinb {

std::string_view to_string(BoundKind kind) { return kind == BoundKind::Lower ? "lower" : "upper"; }

namespace {

double finite_expectation(const ContinuousFamily& fam, const RealFn& q, double tol, const char* what)
{
    const ExtendedQuad r = expectation_extended(fam, q, tol);
    if (r.divergent)
        throw SteinError(ErrorKind::DivergentMoment, std::string(what) + " diverges");
    return r.value;
}

} // namespace

LowerBound lower_bound(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h, double tol)
{
    if (!std::isfinite(prof.fisher))
        return {0.0, true};
    const ExchangingPair pair = exchanging_pair(fam);
    const RealFn& ft = pair.ftilde;
    const double cov = finite_expectation(
        fam, [&](double x) { return h.first(x) * ft(x); }, tol, "E[h'(X) ftilde(X)]");
    return {cov * cov / prof.fisher, false};
}

LowerBound lower_bound(const ContinuousFamily& fam, const TestFunction& h, double tol)
{
    return lower_bound(fam, score_profile(fam, tol), h, tol);
}

RealFn upper_bound_weight(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h)
{
    const ExchangingPair pair = exchanging_pair(fam);
    RealFn ft = pair.ftilde;
    RealFn dphi = prof.phi_prime;
    RealFn hp = h.first;
    return [ft, dphi, hp](double x) {
        const double d = hp(x);
        return d * d * ft(x) / -dphi(x);
    };
}

UpperBound upper_bound(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h, double tol)
{
    UpperBound out;
    if (prof.monotonicity.verdict == Monotonicity::NotMonotone) {
        out.witness = prof.monotonicity.witness;
        return out;
    }
    const RealFn weight = upper_bound_weight(fam, prof, h);
    const ExtendedQuad r = expectation_extended(fam, weight, tol);
    if (r.divergent) {
        out.divergent = true;
        return out;
    }
    out.value = r.value;
    return out;
}

UpperBound upper_bound(const ContinuousFamily& fam, const TestFunction& h, double tol)
{
    return upper_bound(fam, score_profile(fam, tol), h, tol);
}

LowerBound discrete_lower_bound(const DiscreteFamily& fam, const TestFunction& h, double tol)
{
    if (!h.forward_difference)
        throw SteinError(ErrorKind::InvalidParameter, "discrete bound needs a forward difference of h");
    const ScoreProfile prof = score_profile(fam, tol);
    if (!std::isfinite(prof.fisher))
        return {0.0, true};
    const DiscreteExchangingPair pair = exchanging_pair(fam, true, tol);
    // Summation by parts: sum h(x) D+(ftilde g)(x) = -sum D+h(x) (ftilde g)(x+1),
    // the boundary term ftilde(0) g(0) being zero.
    const IntFn term = [&](long x) { return h.forward_difference(x) * pair.ftilde_times_density(x + 1); };
    double cov = 0.0;
    if (fam.support_max) {
        for (long x = 0; x <= *fam.support_max; ++x)
            cov += term(x);
    } else {
        cov = sum_series(term, 0, nullptr, tol);
    }
    return {cov * cov / prof.fisher, false};
}

PoincareConstant poincare_constant(const ContinuousFamily& fam)
{
    if (fam.role.kind != RoleKind::Location)
        throw SteinError(ErrorKind::UnsupportedRole, "Poincare constant is defined through the location model");
    const Interval& s = fam.base_support;
    RealFn curvature = [&fam](double y) { return -log_derivative_prime(fam, y); };

    constexpr std::size_t kGrid = 2001;
    std::vector<double> xs(kGrid);
    std::vector<double> vs(kGrid);
    std::size_t best = 0;
    for (std::size_t i = 0; i < kGrid; ++i) {
        xs[i] = interval_point(s, (double(i) + 0.5) / double(kGrid));
        vs[i] = curvature(xs[i]);
        if (!std::isfinite(vs[i]))
            vs[i] = kInf;
        if (vs[i] < vs[best])
            best = i;
    }
    double eps = vs[best];
    if (best > 0 && best + 1 < kGrid) {
        const double xm = golden_section_min(curvature, xs[best - 1], xs[best + 1]);
        eps = std::min(eps, curvature(xm));
    } else {
        // Minimum at the edge of the grid: follow it out toward the end of the support.
        const bool upper = best + 1 == kGrid;
        const bool infinite = upper ? !s.hi_finite() : !s.lo_finite();
        for (double r = 1e4; r <= 1e300; r *= 1e4) {
            double x = 0.0;
            if (infinite)
                x = upper ? r : -r;
            else
                x = upper ? s.hi - (s.hi - xs[best]) / r : s.lo + (xs[best] - s.lo) / r;
            const double v = curvature(x);
            if (std::isfinite(v))
                eps = std::min(eps, v);
        }
    }
    if (!(eps > 1e-12))
        throw SteinError(ErrorKind::NotStronglyUnimodal,
                         fam.name + ": inf of -(log g)'' is " + std::to_string(eps) + ", not bounded away from 0");
    return {eps, 1.0 / eps};
}

std::vector<Comparator> literature_bounds(const ContinuousFamily& fam, const TestFunction& h, double tol)
{
    auto moment = [&](const RealFn& q) {
        const ExtendedQuad r = expectation_extended(fam, q, tol);
        return r.value;
    };
    const RealFn& hp = h.first;
    std::vector<Comparator> out;

    if (fam.name == "gaussian" && fam.role.kind == RoleKind::Location) {
        const double s2 = fam.sd * fam.sd;
        const double m1 = moment(hp);
        const double m2 = moment([&](double x) { return hp(x) * hp(x); });
        out.push_back({"chernoff_lower", BoundKind::Lower, s2 * m1 * m1});
        out.push_back({"chernoff_upper", BoundKind::Upper, std::isfinite(m2) ? s2 * m2 : kInf});
        return out;
    }

    if (fam.name == "exponential" && fam.role.kind == RoleKind::Scale) {
        const double lambda = fam.theta0();
        const double l2 = lambda * lambda;
        const double m_xh = moment([&](double x) { return x * hp(x); });
        const double m_h = moment(hp);
        const double m_hh = moment([&](double x) { return hp(x) * hp(x); });
        const double m_xhh = moment([&](double x) { return x * hp(x) * hp(x); });
        out.push_back({"cacoullos_lower", BoundKind::Lower, m_xh * m_xh});
        const double var_hp = std::isfinite(m_hh) && std::isfinite(m_h) ? m_hh - m_h * m_h : kInf;
        const double cac = var_hp / l2 + m_xhh / lambda;
        out.push_back({"cacoullos_upper", BoundKind::Upper, std::isfinite(cac) ? cac : kInf});
        out.push_back({"klaassen_exp_upper", BoundKind::Upper, std::isfinite(m_hh) ? 4.0 * m_hh / l2 : kInf});
        if (h.second) {
            const RealFn& hpp = h.second;
            const double m_x_hp_hpp = moment([&](double x) { return x * hp(x) * hpp(x); });
            const double rw = (m_hh + 2.0 * m_x_hp_hpp) / l2;
            const bool ok = std::isfinite(m_hh) && std::isfinite(m_x_hp_hpp);
            out.push_back({"exp_rewrite_upper", BoundKind::Upper, ok ? rw : kInf});
        }
        return out;
    }

    if (fam.name == "gamma" && (fam.role.kind == RoleKind::Scale || fam.role.kind == RoleKind::Location)) {
        const double a = fam.shape;
        if (!(a > 2.0))
            return out;
        const double b = fam.role.kind == RoleKind::Scale ? fam.theta0() : 1.0;
        const double shift = fam.role.kind == RoleKind::Location ? fam.theta0() : 0.0;
        const double m_h = moment(hp);
        const double m_xh = moment([&](double x) { return (x - shift) * hp(x); });
        const double m_xhh = moment([&](double x) { return (x - shift) * hp(x) * hp(x); });
        const double lo = std::max((a - 2.0) / (b * b) * m_h * m_h, m_xh * m_xh / a);
        out.push_back({"klaassen_gamma_lower", BoundKind::Lower, lo});
        out.push_back({"klaassen_gamma_upper", BoundKind::Upper, std::isfinite(m_xhh) ? m_xhh / b : kInf});
        return out;
    }

    throw SteinError(ErrorKind::NotApplicable,
                     "no literature comparators for " + fam.name + " " + std::string(to_string(fam.role.kind)));
}

namespace {

struct Fit {
    double alpha;
    double beta;
};

Fit normal_equations(double e_phi2, double e_phi, double e_hphi, double e_h)
{
    // [[E phi^2, E phi], [E phi, 1]] (alpha, beta) = (E h phi, E h)
    const double det = e_phi2 - e_phi * e_phi;
    if (!(det > 0.0))
        return {0.0, e_h};
    return {(e_hphi - e_phi * e_h) / det, (e_phi2 * e_h - e_phi * e_hphi) / det};
}

} // namespace

double tightness_residual(const ContinuousFamily& fam, const ScoreProfile& prof, const TestFunction& h, double tol)
{
    const RealFn& phi = prof.phi;
    const double e_h = expectation(fam, h.value, tol);
    const double var = expectation(
        fam,
        [&](double x) {
            const double d = h.value(x) - e_h;
            return d * d;
        },
        tol);
    if (var == 0.0)
        return 0.0;
    Fit fit{0.0, e_h};
    if (std::isfinite(prof.fisher)) {
        const double e_phi = expectation(fam, phi, tol);
        const double e_hphi = expectation(fam, [&](double x) { return h.value(x) * phi(x); }, tol);
        fit = normal_equations(prof.fisher, e_phi, e_hphi, e_h);
    }
    const double resid = expectation(
        fam,
        [&](double x) {
            const double r = h.value(x) - fit.alpha * phi(x) - fit.beta;
            return r * r;
        },
        tol);
    return resid / var;
}

double tightness_residual(const DiscreteFamily& fam, const ScoreProfile& prof, const TestFunction& h, double tol)
{
    const RealFn& phi = prof.phi;
    auto hv = [&](long x) { return h.value(double(x)); };
    auto ph = [&](long x) { return phi(double(x)); };
    const double e_h = sum_over_support(fam, hv, tol);
    const double var = sum_over_support(
        fam,
        [&](long x) {
            const double d = hv(x) - e_h;
            return d * d;
        },
        tol);
    if (var == 0.0)
        return 0.0;
    const double e_phi = sum_over_support(fam, ph, tol);
    const double e_hphi = sum_over_support(fam, [&](long x) { return hv(x) * ph(x); }, tol);
    const Fit fit = normal_equations(prof.fisher, e_phi, e_hphi, e_h);
    const double resid = sum_over_support(
        fam,
        [&](long x) {
            const double r = hv(x) - fit.alpha * ph(x) - fit.beta;
            return r * r;
        },
        tol);
    return resid / var;
}

} // namespace steinb
