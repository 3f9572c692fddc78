#pragma once

// Oriented rectangles, affine charts and the slab/crossing relations between
// axis-aligned oriented rectangles.

#include "hsv/interval.hpp"
#include "hsv/verdict.hpp"

#include <cstddef>
#include <string>

namespace hsv {

enum class Side { left, right };

/// Box collapsed to its lo (left) or hi (right) face on `axis`.
Box face_box(const Box& b, std::size_t axis, Side side);

/// An axis-aligned rectangle with a distinguished expansion axis. The two
/// faces orthogonal to that axis are the left/right sides; `flipped` swaps
/// which geometric face is called left.
class OrientedRect {
public:
    /// Throws ConstructionError if some component has zero width, or
    /// DimMismatch if the axis is out of range.
    OrientedRect(Box body, std::size_t axis, bool flipped = false);

    [[nodiscard]] const Box& body() const noexcept { return body_; }
    [[nodiscard]] std::size_t axis() const noexcept { return axis_; }
    [[nodiscard]] bool flipped() const noexcept { return flipped_; }
    [[nodiscard]] std::size_t dims() const noexcept { return body_.dims(); }
    [[nodiscard]] const Interval& expansion_interval() const { return body_[axis_]; }

    [[nodiscard]] Box side(Side s) const;
    [[nodiscard]] Box left() const { return side(Side::left); }
    [[nodiscard]] Box right() const { return side(Side::right); }

    friend bool operator==(const OrientedRect&, const OrientedRect&) = default;

private:
    Box body_;
    std::size_t axis_;
    bool flipped_;
};

Box face_box(const OrientedRect& r, std::size_t axis, Side side);

/// x -> offset + scale * x per axis, mapping the unit cube onto a rectangle.
class AffineChart {
public:
    AffineChart(Point offsets, Point scales);
    /// Chart whose image is `target`.
    static AffineChart onto(const Box& target);

    [[nodiscard]] std::size_t dims() const noexcept { return offsets_.size(); }
    [[nodiscard]] const Point& offsets() const noexcept { return offsets_; }
    [[nodiscard]] const Point& scales() const noexcept { return scales_; }

    [[nodiscard]] Point forward(std::span<const double> p) const;
    [[nodiscard]] Point inverse(std::span<const double> p) const;
    [[nodiscard]] Box forward(const Box& b) const;
    [[nodiscard]] Box inverse(const Box& b) const;

private:
    Point offsets_;
    Point scales_;
};

enum class ChartDirection { forward, inverse };

Point chart_map(const AffineChart& c, std::span<const double> p, ChartDirection dir);
Box chart_map(const AffineChart& c, const Box& b, ChartDirection dir);

struct SlabRelation {
    bool holds = false;
    /// M_l lies on N_r (orientations disagree).
    bool swapped = false;
    std::string reason;

    explicit operator bool() const noexcept { return holds; }
};

/// body(m) within body(n), same expansion axis, same expansion interval.
SlabRelation is_vertical_slab(const OrientedRect& m, const OrientedRect& n);

/// Sufficient criterion: same expansion axis, m is a full transverse slice of
/// n, and m's expansion interval lies inside n's.
SlabRelation is_horizontal_slab(const OrientedRect& m, const OrientedRect& n);

struct CrossingCertificate {
    Verdict status = Verdict::Inconclusive;
    std::string failing_clause;
    bool swapped = false;
};

/// e is vertical in a and horizontal in b.
CrossingCertificate check_crossing(const OrientedRect& e, const OrientedRect& a, const OrientedRect& b);

} // namespace hsv
