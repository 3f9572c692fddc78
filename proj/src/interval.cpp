#include "hsv/interval.hpp"

#include "hsv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace hsv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDenormMin = std::numeric_limits<double>::denorm_min();
// Below this magnitude FMA residuals may underflow; fall back to inflation.
const double kTiny = std::ldexp(1.0, -960);
// Beyond this magnitude trig arguments are not reduced; the full range is returned.
const double kTrigLimit = std::ldexp(1.0, 40);

constexpr double kPiLo = std::numbers::pi; // nearest double lies below pi
const double kPiHi = std::nextafter(std::numbers::pi, kInf);

void check_finite(double v, const char* op)
{
    if (!std::isfinite(v)) {
        throw ConstructionError(std::string("non-finite result in interval ") + op);
    }
}

// Error of a + b, exact (Knuth TwoSum).
double two_sum_err(double a, double b, double s)
{
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

double ulp(double v)
{
    const double m = std::fabs(v);
    return std::nextafter(m, kInf) - m;
}

} // namespace

namespace rounding {

double prev(double x)
{
    return std::nextafter(x, -kInf);
}
double next(double x)
{
    return std::nextafter(x, kInf);
}

double add_down(double a, double b)
{
    const double s = a + b;
    check_finite(s, "add");
    return two_sum_err(a, b, s) < 0.0 ? prev(s) : s;
}

double add_up(double a, double b)
{
    const double s = a + b;
    check_finite(s, "add");
    return two_sum_err(a, b, s) > 0.0 ? next(s) : s;
}

double sub_down(double a, double b)
{
    return add_down(a, -b);
}
double sub_up(double a, double b)
{
    return add_up(a, -b);
}

double mul_down(double a, double b)
{
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    const double p = a * b;
    check_finite(p, "mul");
    if (std::fabs(p) < kTiny) {
        return prev(p);
    }
    return std::fma(a, b, -p) < 0.0 ? prev(p) : p;
}

double mul_up(double a, double b)
{
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    const double p = a * b;
    check_finite(p, "mul");
    if (std::fabs(p) < kTiny) {
        return next(p);
    }
    return std::fma(a, b, -p) > 0.0 ? next(p) : p;
}

// For q = fl(a/b), a - q*b is exact and the true quotient is q + (a - q*b)/b.
double div_down(double a, double b)
{
    if (a == 0.0) {
        return 0.0;
    }
    const double q = a / b;
    check_finite(q, "div");
    if (std::fabs(q) < kTiny) {
        return prev(q);
    }
    const double r = std::fma(-q, b, a);
    const bool below = (r < 0.0) != (b < 0.0) && r != 0.0;
    return below ? prev(q) : q;
}

double div_up(double a, double b)
{
    if (a == 0.0) {
        return 0.0;
    }
    const double q = a / b;
    check_finite(q, "div");
    if (std::fabs(q) < kTiny) {
        return next(q);
    }
    const double r = std::fma(-q, b, a);
    const bool above = (r > 0.0) == (b > 0.0) && r != 0.0;
    return above ? next(q) : q;
}

} // namespace rounding

using namespace rounding;

Interval::Interval(double value) : lo_(value), hi_(value)
{
    if (!std::isfinite(value)) {
        throw ConstructionError("interval endpoint must be finite");
    }
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw ConstructionError("interval endpoints must be finite");
    }
    if (lo > hi) {
        throw ConstructionError("interval requires lo <= hi");
    }
}

double Interval::width() const
{
    return sub_up(hi_, lo_);
}

double Interval::mid() const noexcept
{
    return lo_ * 0.5 + hi_ * 0.5;
}

Interval operator-(const Interval& a)
{
    return {-a.hi(), -a.lo()};
}

Interval operator+(const Interval& a, const Interval& b)
{
    return {add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi())};
}

Interval operator-(const Interval& a, const Interval& b)
{
    return {sub_down(a.lo(), b.hi()), sub_up(a.hi(), b.lo())};
}

Interval operator*(const Interval& a, const Interval& b)
{
    const double lo = std::min({mul_down(a.lo(), b.lo()), mul_down(a.lo(), b.hi()), mul_down(a.hi(), b.lo()),
                                mul_down(a.hi(), b.hi())});
    const double hi = std::max(
        {mul_up(a.lo(), b.lo()), mul_up(a.lo(), b.hi()), mul_up(a.hi(), b.lo()), mul_up(a.hi(), b.hi())});
    return {lo, hi};
}

Interval scale(const Interval& a, double s)
{
    if (s >= 0.0) {
        return {mul_down(a.lo(), s), mul_up(a.hi(), s)};
    }
    return {mul_down(a.hi(), s), mul_up(a.lo(), s)};
}

Interval divide(const Interval& a, double s)
{
    if (s == 0.0 || !std::isfinite(s)) {
        throw DomainError("division by zero or non-finite scalar");
    }
    if (s > 0.0) {
        return {div_down(a.lo(), s), div_up(a.hi(), s)};
    }
    return {div_down(a.hi(), s), div_up(a.lo(), s)};
}

Interval div_positive(const Interval& a, const Interval& d)
{
    if (!(d.lo() > 0.0)) {
        throw DomainError("divisor interval must be strictly positive");
    }
    const double lo = std::min(div_down(a.lo(), d.lo()), div_down(a.lo(), d.hi()));
    const double hi = std::max(div_up(a.hi(), d.lo()), div_up(a.hi(), d.hi()));
    return {lo, hi};
}

Interval clamp(const Interval& a, const Interval& range)
{
    auto eta = [&](double s) { return std::max(range.lo(), std::min(s, range.hi())); };
    return {eta(a.lo()), eta(a.hi())};
}

Interval abs(const Interval& a)
{
    if (a.lo() >= 0.0) {
        return a;
    }
    if (a.hi() <= 0.0) {
        return -a;
    }
    return {0.0, std::max(-a.lo(), a.hi())};
}

Interval sqr(const Interval& a)
{
    return pow(a, 2);
}

namespace {

double pow_down(double x, unsigned n)
{
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) {
        r = mul_down(r, x);
    }
    return r;
}

double pow_up(double x, unsigned n)
{
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) {
        r = mul_up(r, x);
    }
    return r;
}

} // namespace

Interval pow(const Interval& a, unsigned n)
{
    if (n == 0) {
        return {1.0};
    }
    if (n == 1) {
        return a;
    }
    const bool even = n % 2 == 0;
    if (a.lo() >= 0.0) {
        return {pow_down(a.lo(), n), pow_up(a.hi(), n)};
    }
    if (a.hi() <= 0.0) {
        const double mlo = -a.hi();
        const double mhi = -a.lo();
        if (even) {
            return {pow_down(mlo, n), pow_up(mhi, n)};
        }
        return {-pow_up(mhi, n), -pow_down(mlo, n)};
    }
    const double neg = pow_up(-a.lo(), n);
    const double pos = pow_up(a.hi(), n);
    if (even) {
        return {0.0, std::max(neg, pos)};
    }
    return {-neg, pos};
}

namespace {

// Enclosure of a trig value computed by libm, with `arg_err` the absolute
// error already present in its argument (|d sin| <= |d arg|).
Interval trig_value(double v, double arg_err)
{
    const double err = add_up(add_up(arg_err, 2.0 * ulp(v)), kDenormMin);
    return {std::max(-1.0, sub_down(v, err)), std::min(1.0, add_up(v, err))};
}

Interval sin_at(double x)
{
    if (x == 0.0) {
        return {0.0};
    }
    return trig_value(std::sin(x), 0.0);
}

Interval cos_at(double x)
{
    if (x == 0.0) {
        return {1.0};
    }
    return trig_value(std::cos(x), 0.0);
}

// Critical points are (n + offset) * pi; the extremum there is (-1)^n.
Interval radian_trig(const Interval& a, double offset, Interval (*at)(double))
{
    if (std::max(std::fabs(a.lo()), std::fabs(a.hi())) > kTrigLimit) {
        return {-1.0, 1.0};
    }
    if (sub_down(a.hi(), a.lo()) >= 2.0 * kPiHi) {
        return {-1.0, 1.0};
    }
    Interval r = hull(at(a.lo()), at(a.hi()));
    const Interval pi{kPiLo, kPiHi};
    const auto n0 = static_cast<long long>(std::floor(a.lo() / kPiLo - offset)) - 1;
    const auto n1 = static_cast<long long>(std::ceil(a.hi() / kPiLo - offset)) + 1;
    for (long long n = n0; n <= n1; ++n) {
        const Interval c = Interval(static_cast<double>(n) + offset) * pi;
        if (c.hi() < a.lo() || c.lo() > a.hi()) {
            continue;
        }
        r = hull(r, Interval(n % 2 == 0 ? 1.0 : -1.0));
    }
    return r;
}

// Value of sin(2*pi*t) or cos(2*pi*t) at a single point.
Interval turns_at(double t, bool is_sin)
{
    const double r = t - std::nearbyint(t); // exact, r in [-1/2, 1/2]
    const double q = 4.0 * r;
    if (q == std::nearbyint(q)) {
        static constexpr double sin_q[] = {0.0, -1.0, 0.0, 1.0, 0.0};
        static constexpr double cos_q[] = {-1.0, 0.0, 1.0, 0.0, -1.0};
        const auto idx = static_cast<int>(q) + 2;
        return {is_sin ? sin_q[idx] : cos_q[idx]};
    }
    const double arg = 2.0 * std::numbers::pi * r;
    const double arg_err = std::ldexp(std::fabs(arg), -50);
    return trig_value(is_sin ? std::sin(arg) : std::cos(arg), arg_err);
}

// Maxima at n + max_off, minima at n + min_off.
Interval turns_trig(const Interval& t, bool is_sin)
{
    if (std::max(std::fabs(t.lo()), std::fabs(t.hi())) > kTrigLimit) {
        return {-1.0, 1.0};
    }
    if (sub_down(t.hi(), t.lo()) >= 1.0) {
        return {-1.0, 1.0};
    }
    const double max_off = is_sin ? 0.25 : 0.0;
    const double min_off = is_sin ? 0.75 : 0.5;
    Interval r = hull(turns_at(t.lo(), is_sin), turns_at(t.hi(), is_sin));
    const double n0 = std::floor(t.lo()) - 1.0;
    const double n1 = std::floor(t.hi()) + 1.0;
    for (double n = n0; n <= n1; n += 1.0) {
        if (t.contains(n + max_off)) {
            r = hull(r, Interval(1.0));
        }
        if (t.contains(n + min_off)) {
            r = hull(r, Interval(-1.0));
        }
    }
    return r;
}

} // namespace

Interval sin(const Interval& a)
{
    return radian_trig(a, 0.5, &sin_at);
}
Interval cos(const Interval& a)
{
    return radian_trig(a, 0.0, &cos_at);
}
Interval sin_turns(const Interval& t)
{
    return turns_trig(t, true);
}
Interval cos_turns(const Interval& t)
{
    return turns_trig(t, false);
}

Interval hull(const Interval& a, const Interval& b)
{
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

std::optional<Interval> intersection(const Interval& a, const Interval& b)
{
    if (!a.intersects(b)) {
        return std::nullopt;
    }
    return Interval{std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

Interval pi_interval()
{
    return {kPiLo, kPiHi};
}
Interval two_pi_interval()
{
    return {2.0 * kPiLo, 2.0 * kPiHi};
}

Interval log_interval(double x)
{
    if (!(x > 0.0)) {
        throw DomainError("log of a non-positive number");
    }
    if (x == 1.0) {
        return {0.0};
    }
    const double v = std::log(x);
    return {prev(v), next(v)};
}

std::ostream& operator<<(std::ostream& os, const Interval& a)
{
    return os << '[' << a.lo() << ", " << a.hi() << ']';
}

// ---------------------------------------------------------------------------

Box::Box(std::vector<Interval> components) : c_(std::move(components)) {}

Box::Box(std::initializer_list<Interval> components) : c_(components) {}

Box Box::point(std::span<const double> p)
{
    std::vector<Interval> c;
    c.reserve(p.size());
    for (double v : p) {
        c.emplace_back(v);
    }
    return Box(std::move(c));
}

Box Box::cube(std::size_t dims, Interval side)
{
    return Box(std::vector<Interval>(dims, side));
}

Box Box::with(std::size_t i, const Interval& v) const
{
    Box b = *this;
    b.c_.at(i) = v;
    return b;
}

double Box::width() const
{
    double w = 0.0;
    for (const auto& iv : c_) {
        w = std::max(w, iv.width());
    }
    return w;
}

std::size_t Box::widest_axis() const
{
    std::size_t best = 0;
    double w = -1.0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].width() > w) {
            w = c_[i].width();
            best = i;
        }
    }
    return best;
}

Point Box::midpoint() const
{
    Point p;
    p.reserve(c_.size());
    for (const auto& iv : c_) {
        p.push_back(iv.mid());
    }
    return p;
}

Point Box::lower() const
{
    Point p;
    for (const auto& iv : c_) {
        p.push_back(iv.lo());
    }
    return p;
}

Point Box::upper() const
{
    Point p;
    for (const auto& iv : c_) {
        p.push_back(iv.hi());
    }
    return p;
}

bool Box::contains(const Box& o) const
{
    require_same_dims(*this, o, "contains");
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (!c_[i].contains(o.c_[i])) {
            return false;
        }
    }
    return true;
}

bool Box::contains(std::span<const double> p) const
{
    if (p.size() != c_.size()) {
        throw DimMismatch("point/box dimension mismatch in contains");
    }
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (!c_[i].contains(p[i])) {
            return false;
        }
    }
    return true;
}

bool Box::intersects(const Box& o) const
{
    require_same_dims(*this, o, "intersects");
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (!c_[i].intersects(o.c_[i])) {
            return false;
        }
    }
    return true;
}

std::pair<Box, Box> Box::bisect(std::optional<std::size_t> axis) const
{
    if (c_.empty() || width() == 0.0) {
        throw DegenerateBox("cannot bisect a box with zero width in every component");
    }
    const std::size_t a = axis.value_or(widest_axis());
    if (a >= c_.size()) {
        throw DimMismatch("bisection axis out of range");
    }
    const Interval& iv = c_[a];
    const double m = iv.mid();
    if (!(iv.lo() < m && m < iv.hi())) {
        throw DegenerateBox("component too narrow to bisect");
    }
    return {with(a, {iv.lo(), m}), with(a, {m, iv.hi()})};
}

bool Box::can_bisect() const
{
    if (c_.empty() || !(width() > 0.0)) {
        return false;
    }
    const Interval& iv = c_[widest_axis()];
    const double m = iv.mid();
    return iv.lo() < m && m < iv.hi();
}

Box hull(const Box& a, const Box& b)
{
    require_same_dims(a, b, "hull");
    std::vector<Interval> c;
    for (std::size_t i = 0; i < a.dims(); ++i) {
        c.push_back(hull(a[i], b[i]));
    }
    return Box(std::move(c));
}

std::optional<Box> intersection(const Box& a, const Box& b)
{
    require_same_dims(a, b, "intersection");
    std::vector<Interval> c;
    for (std::size_t i = 0; i < a.dims(); ++i) {
        auto v = intersection(a[i], b[i]);
        if (!v) {
            return std::nullopt;
        }
        c.push_back(*v);
    }
    return Box(std::move(c));
}

void require_same_dims(const Box& a, const Box& b, const char* what)
{
    if (a.dims() != b.dims()) {
        throw DimMismatch(std::string("dimension mismatch in ") + what + ": " + std::to_string(a.dims()) +
                          " vs " + std::to_string(b.dims()));
    }
}

std::ostream& operator<<(std::ostream& os, const Box& b)
{
    for (std::size_t i = 0; i < b.dims(); ++i) {
        if (i) {
            os << " x ";
        }
        os << b[i];
    }
    return os;
}

} // namespace hsv
