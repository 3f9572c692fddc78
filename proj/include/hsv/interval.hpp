#pragma once

// Closed real intervals with outward-rounded endpoints, and boxes built from
// them. Every operation returns an enclosure of the exact image set.
//
// Rounding uses error-free transformations (TwoSum, FMA residuals) on top of
// round-to-nearest: an endpoint is moved one ulp outward only when the
// operation was inexact in the unsafe direction. Exact operations therefore
// keep exact endpoints, which the phase-gap and face-image checks rely on.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hsv {

using Point = std::vector<double>;

namespace rounding {

double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);

/// One ulp toward -inf / +inf.
double prev(double x);
double next(double x);

} // namespace rounding

class Interval {
public:
    constexpr Interval() = default;

    /// Point interval. Throws ConstructionError on NaN or infinity.
    Interval(double value); // NOLINT(google-explicit-constructor)

    /// Throws ConstructionError unless lo <= hi and both are finite.
    Interval(double lo, double hi);

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

    /// hi - lo rounded up.
    [[nodiscard]] double width() const;
    /// Center rounded to nearest.
    [[nodiscard]] double mid() const noexcept;

    [[nodiscard]] bool is_point() const noexcept { return lo_ == hi_; }
    [[nodiscard]] bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
    [[nodiscard]] bool contains(const Interval& o) const noexcept { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    [[nodiscard]] bool intersects(const Interval& o) const noexcept { return lo_ <= o.hi_ && o.lo_ <= hi_; }
    [[nodiscard]] bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Interval operator-(const Interval& a);
Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);

Interval scale(const Interval& a, double s);

/// Division by a nonzero scalar. Throws DomainError when s == 0.
Interval divide(const Interval& a, double s);

/// Division by an interval that is strictly positive. Throws DomainError otherwise.
Interval div_positive(const Interval& a, const Interval& d);

/// Componentwise projection max{alpha, min{s, beta}} applied to a set.
Interval clamp(const Interval& a, const Interval& range);

Interval abs(const Interval& a);
Interval sqr(const Interval& a);
Interval pow(const Interval& a, unsigned n);

Interval sin(const Interval& a);
Interval cos(const Interval& a);

/// sin(2*pi*t) and cos(2*pi*t) with t measured in periods.
Interval sin_turns(const Interval& t);
Interval cos_turns(const Interval& t);

Interval hull(const Interval& a, const Interval& b);
std::optional<Interval> intersection(const Interval& a, const Interval& b);

/// Enclosures of pi, 2*pi and log(n).
Interval pi_interval();
Interval two_pi_interval();
Interval log_interval(double x);

std::ostream& operator<<(std::ostream& os, const Interval& a);

class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> components);
    Box(std::initializer_list<Interval> components);

    static Box point(std::span<const double> p);
    static Box cube(std::size_t dims, Interval side);

    [[nodiscard]] std::size_t dims() const noexcept { return c_.size(); }
    [[nodiscard]] const Interval& operator[](std::size_t i) const { return c_[i]; }
    [[nodiscard]] const std::vector<Interval>& components() const noexcept { return c_; }
    [[nodiscard]] auto begin() const noexcept { return c_.begin(); }
    [[nodiscard]] auto end() const noexcept { return c_.end(); }

    /// Copy with component i replaced.
    [[nodiscard]] Box with(std::size_t i, const Interval& v) const;

    /// Largest component width.
    [[nodiscard]] double width() const;
    /// Widest component, lowest index on ties.
    [[nodiscard]] std::size_t widest_axis() const;

    [[nodiscard]] Point midpoint() const;
    [[nodiscard]] Point lower() const;
    [[nodiscard]] Point upper() const;

    [[nodiscard]] bool contains(const Box& o) const;
    [[nodiscard]] bool contains(std::span<const double> p) const;
    [[nodiscard]] bool intersects(const Box& o) const;

    /// Split at the midpoint of `axis` (default: widest). Throws DegenerateBox
    /// when the chosen component cannot be split.
    [[nodiscard]] std::pair<Box, Box> bisect(std::optional<std::size_t> axis = {}) const;
    /// False when the widest component has no double strictly inside it.
    [[nodiscard]] bool can_bisect() const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<Interval> c_;
};

Box hull(const Box& a, const Box& b);
std::optional<Box> intersection(const Box& a, const Box& b);

/// Throws DimMismatch when the dimensions differ.
void require_same_dims(const Box& a, const Box& b, const char* what);

std::ostream& operator<<(std::ostream& os, const Box& b);

} // namespace hsv
