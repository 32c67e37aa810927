#include "steinb/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace steinb {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::TruncationUnsafe: return "TruncationUnsafe";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::UnsupportedRole: return "UnsupportedRole";
    case ErrorKind::BoundaryViolation: return "BoundaryViolation";
    case ErrorKind::NotStronglyUnimodal: return "NotStronglyUnimodal";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::DivergentMoment: return "DivergentMoment";
    case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_)
{
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
        throw SteinError(ErrorKind::InvalidParameter, "interval requires lo < hi");
}

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478556, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
    double a;
    double b;
    double value;
    double error;
    double resabs;

    bool operator<(const Segment& other) const { return error < other.error; }
};

// Integrand after the change of variables onto a finite parameter interval.
class Transformed {
public:
    Transformed(const RealFn& f, const Interval& iv) : f_(f), iv_(iv)
    {
        if (!iv.lo_finite() && !iv.hi_finite()) {
            kind_ = Kind::Both;
            t_lo_ = -1.0;
            t_hi_ = 1.0;
        } else if (!iv.hi_finite()) {
            kind_ = Kind::Upper;
            t_lo_ = 0.0;
            t_hi_ = 1.0;
        } else if (!iv.lo_finite()) {
            kind_ = Kind::Lower;
            t_lo_ = 0.0;
            t_hi_ = 1.0;
        } else {
            kind_ = Kind::Finite;
            t_lo_ = iv.lo;
            t_hi_ = iv.hi;
        }
    }

    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }

    double operator()(double t)
    {
        double x = 0.0;
        double jac = 1.0;
        switch (kind_) {
        case Kind::Finite: x = t; break;
        case Kind::Both: {
            const double d = 1.0 - t * t;
            x = t / d;
            jac = (1.0 + t * t) / (d * d);
            break;
        }
        case Kind::Upper: {
            const double d = 1.0 - t;
            x = iv_.lo + t / d;
            jac = 1.0 / (d * d);
            break;
        }
        case Kind::Lower: {
            const double d = 1.0 - t;
            x = iv_.hi - t / d;
            jac = 1.0 / (d * d);
            break;
        }
        }
        // The parameter interval is open; a node rounded onto its edge
        // contributes nothing for integrable f.
        if (!std::isfinite(x) || !std::isfinite(jac))
            return 0.0;
        ++evaluations;
        double y = f_(x);
        if (!std::isfinite(y)) {
            const double nudge = 64.0 * kEps * std::max(1.0, std::abs(x));
            double xn = x + nudge;
            if (!iv_.contains(xn) || xn == x)
                xn = x - nudge;
            ++evaluations;
            y = f_(xn);
            if (!std::isfinite(y))
                throw SteinError(ErrorKind::NonFinite,
                                 "integrand not finite near x = " + std::to_string(x));
        }
        return y * jac;
    }

    std::size_t evaluations = 0;

private:
    enum class Kind { Finite, Both, Upper, Lower };
    const RealFn& f_;
    Interval iv_;
    Kind kind_ = Kind::Finite;
    double t_lo_ = 0.0;
    double t_hi_ = 1.0;
};

Segment gauss_kronrod(Transformed& f, double a, double b)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resk = kWgk[10] * fc;
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> f1{};
    std::array<double, 10> f2{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1)
            resg += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 10; ++j)
        resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
        err = std::max(50.0 * kEps * resabs, err);
    return {a, b, result, err, resabs};
}

} // namespace

QuadResult integrate(const RealFn& f, const Interval& iv, double tol, const QuadOptions& opts)
{
    if (!(tol > 0.0))
        throw SteinError(ErrorKind::InvalidParameter, "integrate: tol must be positive");
    Transformed tf(f, iv);
    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod(tf, tf.t_lo(), tf.t_hi());
    double total = first.value;
    double total_err = first.error;
    double total_abs = first.resabs;
    heap.push(first);

    // Segments too narrow to split further are retired but still counted.
    std::vector<Segment> retired;
    std::size_t intervals = 1;
    // Each segment's estimate is floored at 50 eps resabs, so the summed floor
    // needs headroom or the loop could never finish on cancelling integrands.
    auto target = [&] { return std::max(tol, 200.0 * kEps * total_abs); };

    while (total_err > target() && !heap.empty()) {
        if (intervals >= opts.max_intervals)
            throw SteinError(ErrorKind::NonConvergence,
                             "error estimate " + std::to_string(total_err) +
                                 " above tolerance after subdivision budget");
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) <= 4.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
            retired.push_back(worst);
            continue;
        }
        const Segment left = gauss_kronrod(tf, worst.a, mid);
        const Segment right = gauss_kronrod(tf, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }

    // Resum from scratch to drop the drift of the running updates.
    double value = 0.0;
    double err = 0.0;
    for (const auto& s : retired) {
        value += s.value;
        err += s.error;
    }
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    if (err > target())
        throw SteinError(ErrorKind::NonConvergence,
                         "error estimate " + std::to_string(err) + " stagnates above tolerance");
    return {value, err, tf.evaluations};
}

namespace {

// Integral over [lo + eta, hi - eta] in the transformed parameter.
double truncated_integral(const RealFn& f, const Interval& iv, double eta, double tol,
                          const QuadOptions& opts)
{
    Transformed tf(f, iv);
    const double span = tf.t_hi() - tf.t_lo();
    const double a = tf.t_lo() + eta * span;
    const double b = tf.t_hi() - eta * span;
    RealFn g = [&tf](double t) { return tf(t); };
    return integrate(g, Interval(a, b), tol, opts).value;
}

// One end of the interval, seen from an anchor: the cut at depth eta sits at
// anchor + dir * distance(eta), the same point the transformed cut maps to.
struct CutEnd {
    double anchor;
    double dir;
    double width; // > 0 for a finite interval, where distance = eta * width
    bool infinite;
    bool both; // real line: distance = x(1 - eta) under t / (1 - t^2)

    double distance(double eta) const
    {
        if (width > 0.0)
            return eta * width;
        if (both)
            return (1.0 - eta) / (eta * (2.0 - eta));
        return infinite ? (1.0 - eta) / eta : eta / (1.0 - eta);
    }
};

std::array<CutEnd, 2> cut_ends(const Interval& iv)
{
    if (iv.lo_finite() && iv.hi_finite()) {
        const double w = iv.hi - iv.lo;
        return {CutEnd{iv.lo, 1.0, w, false, false}, CutEnd{iv.hi, -1.0, w, false, false}};
    }
    if (!iv.lo_finite() && !iv.hi_finite())
        return {CutEnd{0.0, -1.0, 0.0, true, true}, CutEnd{0.0, 1.0, 0.0, true, true}};
    if (iv.lo_finite())
        return {CutEnd{iv.lo, 1.0, 0.0, false, false}, CutEnd{iv.lo, 1.0, 0.0, true, false}};
    return {CutEnd{iv.hi, -1.0, 0.0, false, false}, CutEnd{iv.hi, -1.0, 0.0, true, false}};
}

// Mass uncovered at one end when the cut deepens from eta0 to eta1, integrated
// directly in x over geometrically spaced pieces. Near a singular end the
// transformed parameter runs out of resolution long before x does.
double slab_integral(const RealFn& f, const CutEnd& end, double eta0, double eta1, double tol,
                     const QuadOptions& opts)
{
    constexpr int kPieces = 3;
    const double s0 = end.distance(eta0);
    const double s1 = end.distance(eta1);
    double total = 0.0;
    double prev = s0;
    for (int j = 1; j <= kPieces; ++j) {
        const double next = j == kPieces ? s1 : s0 * std::pow(s1 / s0, double(j) / kPieces);
        const double xa = end.anchor + end.dir * prev;
        const double xb = end.anchor + end.dir * next;
        if (xa != xb)
            total += integrate(f, Interval(std::min(xa, xb), std::max(xa, xb)), tol / kPieces, opts).value;
        prev = next;
    }
    return total;
}

} // namespace

ExtendedQuad integrate_extended(const RealFn& f, const Interval& iv, double tol, const QuadOptions& opts)
{
    std::optional<QuadResult> full;
    std::optional<SteinError> failure;
    try {
        full = integrate(f, iv, tol, opts);
    } catch (const SteinError& e) {
        if (e.kind() != ErrorKind::NonConvergence && e.kind() != ErrorKind::NonFinite)
            throw;
        failure = e;
    }
    // Probe: a divergent integral keeps gaining mass as the cut moves toward
    // the ends, without the increments contracting. The adaptive rule alone
    // can report a huge finite value for it, so the probe runs either way.
    std::array<double, 5> levels{};
    const auto ends = cut_ends(iv);
    try {
        levels[0] = truncated_integral(f, iv, 1e-3, tol, opts);
        for (std::size_t k = 1; k < levels.size(); ++k) {
            const double eta0 = std::pow(10.0, -3.0 * double(k));
            const double eta1 = eta0 * 1e-3;
            levels[k] = levels[k - 1] + slab_integral(f, ends[0], eta0, eta1, tol, opts) +
                        slab_integral(f, ends[1], eta0, eta1, tol, opts);
        }
    } catch (const SteinError&) {
        if (failure)
            throw *failure;
        return {full->value, full->abs_error_estimate, false};
    }
    bool growing = true;
    double sign = 0.0;
    for (std::size_t k = 1; k + 1 < levels.size(); ++k) {
        const double d0 = levels[k] - levels[k - 1];
        const double d1 = levels[k + 1] - levels[k];
        const double s = d1 > 0.0 ? 1.0 : -1.0;
        if (sign == 0.0)
            sign = s;
        const double floor = std::max(tol, 1e-9 * std::abs(levels[k + 1]));
        if (d0 * d1 <= 0.0 || s != sign || std::abs(d1) < 0.5 * std::abs(d0) || std::abs(d1) <= floor)
            growing = false;
    }
    if (growing)
        return {sign * kInf, kInf, true};
    if (failure)
        throw *failure;
    return {full->value, full->abs_error_estimate, false};
}

double sum_series(const IntFn& f, long start, const TailBound& tail_bound, double tol)
{
    if (!(tol > 0.0))
        throw SteinError(ErrorKind::InvalidParameter, "sum_series: tol must be positive");
    constexpr long kCap = 10'000'000;
    constexpr int kSmallRun = 64;
    const double small = tol * 1e-3;
    // Neumaier compensated summation.
    double sum = 0.0;
    double comp = 0.0;
    int run = 0;
    for (long n = start; n - start < kCap; ++n) {
        const double term = f(n);
        if (!std::isfinite(term))
            throw SteinError(ErrorKind::NonFinite, "series term not finite at " + std::to_string(n));
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        run = std::abs(term) < small ? run + 1 : 0;
        if (run >= kSmallRun)
            return sum + comp;
        if (tail_bound) {
            const auto bound = tail_bound(n + 1);
            if (bound && *bound < tol)
                return sum + comp;
        }
    }
    throw SteinError(ErrorKind::TruncationUnsafe, "series cap reached without meeting the stop rule");
}

double derivative(const RealFn& f, double x)
{
    const double step = std::cbrt(kEps) * std::max(1.0, std::abs(x));
    volatile double xp = x + step;
    volatile double xm = x - step;
    const double h2 = xp - xm;
    const double fp = f(xp);
    const double fm = f(xm);
    if (!std::isfinite(fp) || !std::isfinite(fm))
        throw SteinError(ErrorKind::NonFinite, "derivative: f not evaluable near x = " + std::to_string(x));
    return (fp - fm) / h2;
}

double interval_point(const Interval& iv, double u)
{
    if (iv.lo_finite() && iv.hi_finite())
        return iv.lo + u * (iv.hi - iv.lo);
    if (!iv.lo_finite() && !iv.hi_finite()) {
        const double t = 2.0 * u - 1.0;
        return t / (1.0 - t * t);
    }
    if (iv.lo_finite())
        return iv.lo + u / (1.0 - u);
    return iv.hi - (1.0 - u) / u;
}

double golden_section_min(const RealFn& f, double a, double b, double xtol)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && std::abs(b - a) > xtol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

MonotonicityCertificate monotonicity_scan(const RealFn& /*f*/, const RealFn& f_prime, const Interval& iv,
                                          std::size_t grid)
{
    grid = std::max<std::size_t>(grid, 64);
    MonotonicityCertificate cert;
    std::vector<double> xs;
    std::vector<double> ds;
    xs.reserve(grid);
    ds.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double u = (double(i) + 0.5) / double(grid);
        const double x = interval_point(iv, u);
        const double d = f_prime(x);
        if (!std::isfinite(x) || !std::isfinite(d)) {
            ++cert.skipped;
            continue;
        }
        xs.push_back(x);
        ds.push_back(d);
    }
    if (xs.empty()) {
        cert.all_skipped = true;
        return cert;
    }

    const double first_sign = ds.front() > 0.0 ? 1.0 : ds.front() < 0.0 ? -1.0 : 0.0;
    if (first_sign == 0.0) {
        cert.witness = xs.front();
        return cert;
    }
    for (std::size_t i = 1; i < ds.size(); ++i) {
        if (ds[i] == 0.0) {
            cert.witness = xs[i];
            return cert;
        }
        if ((ds[i] > 0.0) != (first_sign > 0.0)) {
            cert.witness = 0.5 * (xs[i - 1] + xs[i]);
            return cert;
        }
    }

    // Same sign everywhere on the grid; look for an interior zero of f'
    // hiding between samples at local minima of |f'|.
    double scale = 0.0;
    for (double d : ds)
        scale = std::max(scale, std::abs(d));
    RealFn abs_d = [&f_prime](double x) {
        const double d = f_prime(x);
        return std::isfinite(d) ? std::abs(d) : kInf;
    };
    for (std::size_t i = 1; i + 1 < ds.size(); ++i) {
        const double here = std::abs(ds[i]);
        if (here <= std::abs(ds[i - 1]) && here <= std::abs(ds[i + 1])) {
            const double xm = golden_section_min(abs_d, xs[i - 1], xs[i + 1]);
            if (abs_d(xm) <= 1e-10 * std::max(1.0, scale)) {
                cert.witness = xm;
                return cert;
            }
        }
    }
    cert.verdict = first_sign > 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
    return cert;
}

} // namespace steinb
