#include "hsv/dynsys.hpp"

#include "hsv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hsv {

std::string_view to_string(MapKind k)
{
    switch (k) {
    case MapKind::affine:
        return "affine";
    case MapKind::trig_example:
        return "trig_example";
    case MapKind::affine_horseshoe:
        return "affine_horseshoe";
    case MapKind::composition:
        return "composition";
    case MapKind::clamped_extension:
        return "clamped_extension";
    case MapKind::expression:
        return "expression";
    case MapKind::residual:
        return "residual";
    }
    return "?";
}

std::string trig_params_violation(const TrigParams& p)
{
    if (!(p.d > 0.0)) {
        return "d must be positive";
    }
    if (!(p.d <= 0.5)) {
        return "d must not exceed 1/2";
    }
    if (!(p.c > 0.5)) {
        return "c must exceed 1/2";
    }
    if (!(p.l * p.d > 1.0)) {
        return "l must exceed 1/d";
    }
    if (!(p.k >= p.l + 1.0)) {
        return "k must be at least l + 1";
    }
    if (!(p.m >= 1.0)) {
        return "m must be at least 1";
    }
    return {};
}

class MapSpec::Impl {
public:
    Impl(MapKind kind, std::size_t in, std::size_t out) : kind_(kind), in_(in), out_(out) {}
    virtual ~Impl() = default;

    [[nodiscard]] virtual Point eval(std::span<const double> p) const = 0;
    [[nodiscard]] virtual Box eval(const Box& b) const = 0;
    [[nodiscard]] virtual std::string describe() const = 0;
    [[nodiscard]] virtual std::optional<PhaseForm> phase_form(std::size_t) const { return std::nullopt; }

    MapKind kind_;
    std::size_t in_;
    std::size_t out_;
};

namespace {

void check_dims(std::size_t got, std::size_t want)
{
    if (got != want) {
        throw DimMismatch("map expects " + std::to_string(want) + " inputs, got " + std::to_string(got));
    }
}

class AffineImpl final : public MapSpec::Impl {
public:
    AffineImpl(std::vector<std::vector<double>> a, std::vector<double> b)
        : Impl(MapKind::affine, a.empty() ? 0 : a.front().size(), a.size()), a_(std::move(a)),
          b_(std::move(b))
    {
        if (a_.empty() || in_ == 0) {
            throw ConstructionError("affine map needs a nonempty matrix");
        }
        if (b_.size() != out_) {
            throw DimMismatch("affine offset length differs from matrix rows");
        }
        for (const auto& row : a_) {
            if (row.size() != in_) {
                throw DimMismatch("ragged affine matrix");
            }
            for (double v : row) {
                if (!std::isfinite(v)) {
                    throw ConstructionError("non-finite affine coefficient");
                }
            }
        }
    }

    Point eval(std::span<const double> p) const override
    {
        check_dims(p.size(), in_);
        Point out(out_);
        for (std::size_t i = 0; i < out_; ++i) {
            double s = b_[i];
            for (std::size_t j = 0; j < in_; ++j) {
                s = std::fma(a_[i][j], p[j], s);
            }
            out[i] = s;
        }
        return out;
    }

    Box eval(const Box& x) const override
    {
        check_dims(x.dims(), in_);
        std::vector<Interval> out;
        out.reserve(out_);
        for (std::size_t i = 0; i < out_; ++i) {
            Interval s(b_[i]);
            for (std::size_t j = 0; j < in_; ++j) {
                if (a_[i][j] != 0.0) {
                    s = s + scale(x[j], a_[i][j]);
                }
            }
            out.push_back(s);
        }
        return Box(std::move(out));
    }

    std::string describe() const override
    {
        std::ostringstream os;
        os.precision(17);
        os << "affine " << out_ << "x" << in_;
        return os.str();
    }

private:
    std::vector<std::vector<double>> a_;
    std::vector<double> b_;
};

class TrigImpl final : public MapSpec::Impl {
public:
    explicit TrigImpl(const TrigParams& p) : Impl(MapKind::trig_example, 2, 2), p_(p) {}

    Point eval(std::span<const double> q) const override
    {
        check_dims(q.size(), 2);
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const double x = q[0];
        const double y = q[1];
        return {0.5 + p_.c * std::cos(two_pi * (p_.k * x + p_.l * (y - 0.5))),
                0.5 + p_.d * std::sin(two_pi * (y + p_.m * x))};
    }

    Box eval(const Box& b) const override
    {
        check_dims(b.dims(), 2);
        const auto f = *phase_form(0);
        const auto g = *phase_form(1);
        return Box{f.a0 + f.amplitude * cos_turns(f.phase(b)), g.a0 + g.amplitude * sin_turns(g.phase(b))};
    }

    std::optional<PhaseForm> phase_form(std::size_t component) const override
    {
        PhaseForm pf;
        pf.a0 = Interval(0.5);
        if (component == 0) {
            pf.amplitude = Interval(p_.c);
            pf.is_cos = true;
            pf.coef = {Interval(p_.k), Interval(p_.l)};
            pf.offset = -(Interval(p_.l) * Interval(0.5));
            return pf;
        }
        if (component == 1) {
            pf.amplitude = Interval(p_.d);
            pf.is_cos = false;
            pf.coef = {Interval(p_.m), Interval(1.0)};
            pf.offset = Interval(0.0);
            return pf;
        }
        return std::nullopt;
    }

    std::string describe() const override
    {
        std::ostringstream os;
        os.precision(17);
        os << "trig_example(c=" << p_.c << ", d=" << p_.d << ", k=" << p_.k << ", l=" << p_.l
           << ", m=" << p_.m << ")";
        return os.str();
    }

private:
    TrigParams p_;
};

// Strip geometry along the expansion axis. The branches are the affine maps
// taking each strip onto the unit cube with its end faces landing exactly on
// the faces of the cube: strip 0 preserves orientation, strip 1 reverses it.
const double kThird = 1.0 / 3.0;
const double kTwoThirds = 2.0 / 3.0;
const double kWidth1 = 1.0 - kTwoThirds; // exact

double branch_point(unsigned s, double v, bool expansion)
{
    if (s == 0) {
        return expansion ? v / kThird : v * kThird;
    }
    return expansion ? 1.0 - (v - kTwoThirds) / kWidth1 : 1.0 - kWidth1 * v;
}

Interval branch_box(unsigned s, const Interval& v, bool expansion)
{
    if (s == 0) {
        return expansion ? divide(v, kThird) : scale(v, kThird);
    }
    return expansion ? Interval(1.0) - divide(v - Interval(kTwoThirds), kWidth1)
                     : Interval(1.0) - scale(v, kWidth1);
}

const Interval& strip_interval(unsigned s)
{
    static const Interval s0(0.0, kThird);
    static const Interval s1(kTwoThirds, 1.0);
    return s == 0 ? s0 : s1;
}

class HorseshoeImpl final : public MapSpec::Impl {
public:
    HorseshoeImpl(std::size_t dims, bool strict, std::optional<unsigned> branch)
        : Impl(MapKind::affine_horseshoe, dims, dims), strict_(strict), branch_(branch)
    {
        if (dims < 2) {
            throw ConstructionError("horseshoe needs at least two dimensions");
        }
    }

    Point eval(std::span<const double> p) const override
    {
        check_dims(p.size(), in_);
        const std::size_t e = in_ - 1;
        unsigned s = 0;
        if (branch_) {
            s = *branch_;
        } else if (strict_) {
            for (std::size_t i = 0; i < e; ++i) {
                if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
                    throw DomainError("point outside the horseshoe domain");
                }
            }
            if (strip_interval(0).contains(p[e])) {
                s = 0;
            } else if (strip_interval(1).contains(p[e])) {
                s = 1;
            } else {
                throw DomainError("point off the horseshoe strips");
            }
        } else {
            s = p[e] < 0.5 ? 0 : 1;
        }
        Point out(in_);
        for (std::size_t i = 0; i < in_; ++i) {
            out[i] = branch_point(s, p[i], i == e);
        }
        return out;
    }

    Box eval(const Box& b) const override
    {
        check_dims(b.dims(), in_);
        const std::size_t e = in_ - 1;
        if (branch_) {
            return apply(*branch_, b);
        }
        if (strict_) {
            const Interval unit(0.0, 1.0);
            for (std::size_t i = 0; i < e; ++i) {
                if (!unit.contains(b[i])) {
                    throw DomainError("box outside the horseshoe domain");
                }
            }
            if (strip_interval(0).contains(b[e])) {
                return apply(0, b);
            }
            if (strip_interval(1).contains(b[e])) {
                return apply(1, b);
            }
            if (b[e].intersects(strip_interval(0)) && b[e].intersects(strip_interval(1))) {
                throw StripStraddle("box meets both horseshoe strips");
            }
            throw DomainError("box leaves the horseshoe strips");
        }
        if (b[e].hi() < 0.5) {
            return apply(0, b);
        }
        if (b[e].lo() >= 0.5) {
            return apply(1, b);
        }
        return hull(apply(0, b.with(e, Interval(b[e].lo(), 0.5))),
                    apply(1, b.with(e, Interval(0.5, b[e].hi()))));
    }

    std::string describe() const override
    {
        std::string s = "affine_horseshoe(dims=" + std::to_string(in_);
        if (branch_) {
            s += ", branch=" + std::to_string(*branch_);
        } else {
            s += strict_ ? ", strict" : ", permissive";
        }
        return s + ")";
    }

    bool strict_;
    std::optional<unsigned> branch_;

private:
    Box apply(unsigned s, const Box& b) const
    {
        std::vector<Interval> out;
        out.reserve(in_);
        for (std::size_t i = 0; i < in_; ++i) {
            out.push_back(branch_box(s, b[i], i == in_ - 1));
        }
        return Box(std::move(out));
    }
};

class CompositionImpl final : public MapSpec::Impl {
public:
    explicit CompositionImpl(std::vector<MapSpec> stages)
        : Impl(MapKind::composition, stages.empty() ? 0 : stages.front().dims_in(),
               stages.empty() ? 0 : stages.back().dims_out()),
          stages_(std::move(stages))
    {
        if (stages_.empty()) {
            throw ConstructionError("composition needs at least one stage");
        }
        for (std::size_t i = 0; i + 1 < stages_.size(); ++i) {
            if (stages_[i].dims_out() != stages_[i + 1].dims_in()) {
                throw DimMismatch("composition stages do not chain");
            }
        }
    }

    Point eval(std::span<const double> p) const override
    {
        Point x(p.begin(), p.end());
        for (const auto& s : stages_) {
            x = s.eval(x);
        }
        return x;
    }

    Box eval(const Box& b) const override
    {
        Box x = b;
        for (const auto& s : stages_) {
            x = s.eval(x);
        }
        return x;
    }

    std::optional<PhaseForm> phase_form(std::size_t c) const override
    {
        if (stages_.size() == 1) {
            return stages_.front().phase_form(c);
        }
        return std::nullopt;
    }

    std::string describe() const override
    {
        std::string s = "compose(";
        for (std::size_t i = 0; i < stages_.size(); ++i) {
            s += (i ? ", " : "") + stages_[i].describe();
        }
        return s + ")";
    }

private:
    std::vector<MapSpec> stages_;
};

class ClampedImpl final : public MapSpec::Impl {
public:
    ClampedImpl(MapSpec m, Box source, Box target)
        : Impl(MapKind::clamped_extension, m.dims_in(), m.dims_out()), m_(std::move(m)),
          source_(std::move(source)), target_(std::move(target))
    {
        if (source_.dims() != in_ || target_.dims() != out_) {
            throw DimMismatch("clamp boxes do not match the map dimensions");
        }
    }

    Point eval(std::span<const double> p) const override
    {
        check_dims(p.size(), in_);
        Point x(in_);
        for (std::size_t i = 0; i < in_; ++i) {
            x[i] = std::clamp(p[i], source_[i].lo(), source_[i].hi());
        }
        Point y = m_.eval(x);
        for (std::size_t i = 0; i < out_; ++i) {
            y[i] = std::clamp(y[i], target_[i].lo(), target_[i].hi());
        }
        return y;
    }

    Box eval(const Box& b) const override
    {
        check_dims(b.dims(), in_);
        std::vector<Interval> x;
        for (std::size_t i = 0; i < in_; ++i) {
            x.push_back(clamp(b[i], source_[i]));
        }
        const Box y = m_.eval(Box(std::move(x)));
        std::vector<Interval> out;
        for (std::size_t i = 0; i < out_; ++i) {
            out.push_back(clamp(y[i], target_[i]));
        }
        return Box(std::move(out));
    }

    std::string describe() const override { return "clamp_extend(" + m_.describe() + ")"; }

private:
    MapSpec m_;
    Box source_;
    Box target_;
};

class ExpressionImpl final : public MapSpec::Impl {
public:
    ExpressionImpl(std::vector<Expr> comps, std::vector<std::string> vars)
        : Impl(MapKind::expression, vars.size(), comps.size()), comps_(std::move(comps)),
          vars_(std::move(vars))
    {
        if (comps_.empty() || vars_.empty()) {
            throw ConstructionError("expression map needs components and variables");
        }
        for (const auto& c : comps_) {
            if (c.arity() > in_) {
                throw DimMismatch("expression uses an undeclared variable");
            }
        }
    }

    Point eval(std::span<const double> p) const override
    {
        check_dims(p.size(), in_);
        Point out;
        out.reserve(out_);
        for (const auto& c : comps_) {
            out.push_back(c.eval(p));
        }
        return out;
    }

    Box eval(const Box& b) const override
    {
        check_dims(b.dims(), in_);
        std::vector<Interval> out;
        out.reserve(out_);
        for (const auto& c : comps_) {
            out.push_back(c.eval(b));
        }
        return Box(std::move(out));
    }

    std::optional<PhaseForm> phase_form(std::size_t c) const override
    {
        if (c >= out_) {
            return std::nullopt;
        }
        return extract_phase_form(comps_[c], in_);
    }

    std::string describe() const override
    {
        std::string s = "expression(";
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            s += (i ? ", " : "") + comps_[i].to_string(vars_);
        }
        return s + ")";
    }

private:
    std::vector<Expr> comps_;
    std::vector<std::string> vars_;
};

class ResidualImpl final : public MapSpec::Impl {
public:
    explicit ResidualImpl(MapSpec psi)
        : Impl(MapKind::residual, psi.dims_in(), psi.dims_out()), psi_(std::move(psi))
    {
        if (in_ != out_) {
            throw DimMismatch("fixed-point residual needs a self-map");
        }
    }

    Point eval(std::span<const double> p) const override
    {
        Point y = psi_.eval(p);
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] -= p[i];
        }
        return y;
    }

    Box eval(const Box& b) const override
    {
        const Box y = psi_.eval(b);
        std::vector<Interval> out;
        out.reserve(y.dims());
        for (std::size_t i = 0; i < y.dims(); ++i) {
            out.push_back(y[i] - b[i]);
        }
        return Box(std::move(out));
    }

    std::string describe() const override { return "residual(" + psi_.describe() + ")"; }

private:
    MapSpec psi_;
};

} // namespace

MapSpec MapSpec::identity(std::size_t dims)
{
    std::vector<std::vector<double>> a(dims, std::vector<double>(dims, 0.0));
    for (std::size_t i = 0; i < dims; ++i) {
        a[i][i] = 1.0;
    }
    return affine(std::move(a), std::vector<double>(dims, 0.0));
}

MapSpec MapSpec::affine(std::vector<std::vector<double>> a, std::vector<double> b)
{
    return MapSpec(std::make_shared<AffineImpl>(std::move(a), std::move(b)));
}

MapSpec MapSpec::trig_example(const TrigParams& p, bool validate)
{
    if (validate) {
        if (auto why = trig_params_violation(p); !why.empty()) {
            throw ConstructionError("invalid trig_example parameters: " + why);
        }
    }
    for (double v : {p.c, p.d, p.k, p.l, p.m}) {
        if (!std::isfinite(v)) {
            throw ConstructionError("non-finite trig_example parameter");
        }
    }
    return MapSpec(std::make_shared<TrigImpl>(p));
}

MapSpec MapSpec::affine_horseshoe(std::size_t dims, bool strict)
{
    return MapSpec(std::make_shared<HorseshoeImpl>(dims, strict, std::nullopt));
}

MapSpec MapSpec::horseshoe_branch(std::size_t dims, unsigned strip)
{
    if (strip > 1) {
        throw ConstructionError("horseshoe has strips 0 and 1");
    }
    return MapSpec(std::make_shared<HorseshoeImpl>(dims, false, strip));
}

MapSpec MapSpec::compose(std::vector<MapSpec> stages)
{
    return MapSpec(std::make_shared<CompositionImpl>(std::move(stages)));
}

MapSpec MapSpec::clamp_extend(const MapSpec& m, const Box& source, const Box& target)
{
    return MapSpec(std::make_shared<ClampedImpl>(m, source, target));
}

MapSpec MapSpec::expression(std::vector<Expr> components, std::vector<std::string> variables)
{
    return MapSpec(std::make_shared<ExpressionImpl>(std::move(components), std::move(variables)));
}

MapSpec MapSpec::residual(const MapSpec& psi)
{
    return MapSpec(std::make_shared<ResidualImpl>(psi));
}

MapKind MapSpec::kind() const
{
    return impl_->kind_;
}
std::size_t MapSpec::dims_in() const
{
    return impl_->in_;
}
std::size_t MapSpec::dims_out() const
{
    return impl_->out_;
}
std::string MapSpec::describe() const
{
    return impl_->describe();
}
Point MapSpec::eval(std::span<const double> p) const
{
    return impl_->eval(p);
}
Box MapSpec::eval(const Box& b) const
{
    return impl_->eval(b);
}

std::optional<PhaseForm> MapSpec::phase_form(std::size_t component) const
{
    return impl_->phase_form(component);
}

MapSpec MapSpec::branch_for(const Box& k) const
{
    if (kind() != MapKind::affine_horseshoe) {
        return *this;
    }
    const auto& h = static_cast<const HorseshoeImpl&>(*impl_);
    if (h.branch_ || k.dims() != dims_in()) {
        return *this;
    }
    const Interval& e = k[k.dims() - 1];
    for (unsigned s = 0; s < 2; ++s) {
        if (strip_interval(s).contains(e)) {
            return horseshoe_branch(dims_in(), s);
        }
    }
    return *this;
}

MapSpec MapSpec::with_strict(bool strict) const
{
    if (kind() != MapKind::affine_horseshoe) {
        return *this;
    }
    const auto& h = static_cast<const HorseshoeImpl&>(*impl_);
    if (h.branch_ || h.strict_ == strict) {
        return *this;
    }
    return affine_horseshoe(dims_in(), strict);
}

MapSpec compose(std::vector<MapSpec> stages)
{
    return MapSpec::compose(std::move(stages));
}

MapSpec clamp_extend(const MapSpec& m, const Box& source, const Box& target)
{
    return MapSpec::clamp_extend(m, source, target);
}

Box horseshoe_strip(std::size_t dims, unsigned s)
{
    if (dims < 2 || s > 1) {
        throw ConstructionError("horseshoe strip needs dims >= 2 and s in {0, 1}");
    }
    Box b = Box::cube(dims, Interval(0.0, 1.0));
    return b.with(dims - 1, strip_interval(s));
}

} // namespace hsv
