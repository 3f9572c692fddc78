#include "hsv/geometry.hpp"

#include "hsv/errors.hpp"

#include <cmath>

namespace hsv {

Box face_box(const Box& b, std::size_t axis, Side side)
{
    if (axis >= b.dims()) {
        throw DimMismatch("face axis out of range");
    }
    const double v = side == Side::left ? b[axis].lo() : b[axis].hi();
    return b.with(axis, Interval(v));
}

Box face_box(const OrientedRect& r, std::size_t axis, Side side)
{
    return face_box(r.body(), axis, side);
}

OrientedRect::OrientedRect(Box body, std::size_t axis, bool flipped)
    : body_(std::move(body)), axis_(axis), flipped_(flipped)
{
    if (axis_ >= body_.dims()) {
        throw DimMismatch("expansion axis out of range");
    }
    for (const auto& c : body_) {
        if (!(c.lo() < c.hi())) {
            throw ConstructionError("oriented rectangle needs positive width on every axis");
        }
    }
}

Box OrientedRect::side(Side s) const
{
    const bool geometric_left = (s == Side::left) != flipped_;
    return face_box(body_, axis_, geometric_left ? Side::left : Side::right);
}

// ---------------------------------------------------------------------------

AffineChart::AffineChart(Point offsets, Point scales)
    : offsets_(std::move(offsets)), scales_(std::move(scales))
{
    if (offsets_.size() != scales_.size()) {
        throw DimMismatch("chart offsets/scales size mismatch");
    }
    for (double s : scales_) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw ConstructionError("chart scales must be positive and finite");
        }
    }
}

AffineChart AffineChart::onto(const Box& target)
{
    Point a;
    Point s;
    for (const auto& c : target) {
        a.push_back(c.lo());
        s.push_back(c.hi() - c.lo());
    }
    return {std::move(a), std::move(s)};
}

Point AffineChart::forward(std::span<const double> p) const
{
    if (p.size() != dims()) {
        throw DimMismatch("chart dimension mismatch");
    }
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = std::fma(scales_[i], p[i], offsets_[i]);
    }
    return out;
}

Point AffineChart::inverse(std::span<const double> p) const
{
    if (p.size() != dims()) {
        throw DimMismatch("chart dimension mismatch");
    }
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = (p[i] - offsets_[i]) / scales_[i];
    }
    return out;
}

Box AffineChart::forward(const Box& b) const
{
    if (b.dims() != dims()) {
        throw DimMismatch("chart dimension mismatch");
    }
    std::vector<Interval> c;
    for (std::size_t i = 0; i < dims(); ++i) {
        c.push_back(Interval(offsets_[i]) + scale(b[i], scales_[i]));
    }
    return Box(std::move(c));
}

Box AffineChart::inverse(const Box& b) const
{
    if (b.dims() != dims()) {
        throw DimMismatch("chart dimension mismatch");
    }
    std::vector<Interval> c;
    for (std::size_t i = 0; i < dims(); ++i) {
        c.push_back(divide(b[i] - Interval(offsets_[i]), scales_[i]));
    }
    return Box(std::move(c));
}

Point chart_map(const AffineChart& c, std::span<const double> p, ChartDirection dir)
{
    return dir == ChartDirection::forward ? c.forward(p) : c.inverse(p);
}

Box chart_map(const AffineChart& c, const Box& b, ChartDirection dir)
{
    return dir == ChartDirection::forward ? c.forward(b) : c.inverse(b);
}

// ---------------------------------------------------------------------------

namespace {

void require_same_dims(const OrientedRect& m, const OrientedRect& n)
{
    if (m.dims() != n.dims()) {
        throw DimMismatch("oriented rectangles differ in dimension");
    }
}

} // namespace

SlabRelation is_vertical_slab(const OrientedRect& m, const OrientedRect& n)
{
    require_same_dims(m, n);
    SlabRelation r;
    r.swapped = m.flipped() != n.flipped();
    if (!n.body().contains(m.body())) {
        r.reason = "not contained";
    } else if (m.axis() != n.axis()) {
        r.reason = "expansion axes differ";
    } else if (!(m.expansion_interval() == n.expansion_interval())) {
        r.reason = "sides do not lie on the sides of the outer rectangle";
    } else {
        r.holds = true;
    }
    return r;
}

SlabRelation is_horizontal_slab(const OrientedRect& m, const OrientedRect& n)
{
    require_same_dims(m, n);
    SlabRelation r;
    r.swapped = m.flipped() != n.flipped();
    if (!n.body().contains(m.body())) {
        r.reason = "not contained";
        return r;
    }
    if (m.axis() != n.axis()) {
        r.reason = "expansion axes differ";
        return r;
    }
    for (std::size_t i = 0; i < m.dims(); ++i) {
        if (i != m.axis() && !(m.body()[i] == n.body()[i])) {
            r.reason = "not a full transverse slice on axis " + std::to_string(i);
            return r;
        }
    }
    r.holds = true;
    return r;
}

CrossingCertificate check_crossing(const OrientedRect& e, const OrientedRect& a, const OrientedRect& b)
{
    require_same_dims(e, a);
    require_same_dims(e, b);
    CrossingCertificate cert;
    if (!a.body().contains(e.body()) || !b.body().contains(e.body())) {
        cert.status = Verdict::Falsified;
        cert.failing_clause = "not contained";
        return cert;
    }
    const auto v = is_vertical_slab(e, a);
    if (!v) {
        cert.status = Verdict::Falsified;
        cert.failing_clause = "not a vertical slab: " + v.reason;
        return cert;
    }
    const auto h = is_horizontal_slab(e, b);
    if (!h) {
        cert.status = Verdict::Falsified;
        cert.failing_clause = "not a horizontal slab: " + h.reason;
        return cert;
    }
    cert.status = Verdict::Certified;
    cert.swapped = v.swapped;
    return cert;
}

} // namespace hsv
