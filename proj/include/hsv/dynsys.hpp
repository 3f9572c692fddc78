#pragma once

// Concrete maps with point and enclosure evaluation.

#include "hsv/expr.hpp"
#include "hsv/interval.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hsv {

enum class MapKind {
    affine,
    trig_example,
    affine_horseshoe,
    composition,
    clamped_extension,
    expression,
    residual,
};

std::string_view to_string(MapKind k);

/// f(x,y) = 1/2 + c cos(2 pi (k x + l (y - 1/2))),
/// g(x,y) = 1/2 + d sin(2 pi (y + m x)).
struct TrigParams {
    double c = 0.6;
    double d = 0.5;
    double k = 4;
    double l = 3;
    double m = 1;
};

/// 0 < d <= 1/2 < c, l > 1/d, k >= l + 1, m >= 1. Returns the first violated
/// condition, or an empty string.
std::string trig_params_violation(const TrigParams& p);

class MapSpec {
public:
    class Impl;

    static MapSpec identity(std::size_t dims);
    /// x -> A x + b with exact double coefficients (A is row-major, out x in).
    static MapSpec affine(std::vector<std::vector<double>> a, std::vector<double> b);
    /// Throws ConstructionError on invalid parameters unless validate is false.
    static MapSpec trig_example(const TrigParams& p, bool validate = true);
    /// Two-strip horseshoe on the unit cube, expansion along the last axis.
    /// Strict mode rejects points and boxes off the strips.
    static MapSpec affine_horseshoe(std::size_t dims = 2, bool strict = true);
    /// One affine branch of the horseshoe, defined everywhere.
    static MapSpec horseshoe_branch(std::size_t dims, unsigned strip);
    /// stages[0] is applied first.
    static MapSpec compose(std::vector<MapSpec> stages);
    /// Project onto `source`, apply, project onto `target`.
    static MapSpec clamp_extend(const MapSpec& m, const Box& source, const Box& target);
    static MapSpec expression(std::vector<Expr> components, std::vector<std::string> variables);
    /// x -> psi(x) - x.
    static MapSpec residual(const MapSpec& psi);

    [[nodiscard]] MapKind kind() const;
    [[nodiscard]] std::size_t dims_in() const;
    [[nodiscard]] std::size_t dims_out() const;
    [[nodiscard]] std::string describe() const;

    /// Round-to-nearest evaluation.
    [[nodiscard]] Point eval(std::span<const double> p) const;
    /// Enclosure of the image set.
    [[nodiscard]] Box eval(const Box& b) const;

    /// Recognized a0 + amp * trig(2 pi L(x)) shape of one output component.
    [[nodiscard]] std::optional<PhaseForm> phase_form(std::size_t component) const;

    /// The smooth branch acting on K: for the horseshoe, the affine branch of
    /// the strip containing K; otherwise the map itself.
    [[nodiscard]] MapSpec branch_for(const Box& k) const;

    /// Same map with strict strip checks switched on or off (no-op for
    /// maps without strips).
    [[nodiscard]] MapSpec with_strict(bool strict) const;

private:
    explicit MapSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

MapSpec compose(std::vector<MapSpec> stages);
MapSpec clamp_extend(const MapSpec& m, const Box& source, const Box& target);

/// Strip `s` (0 or 1) of the horseshoe in `dims` dimensions.
Box horseshoe_strip(std::size_t dims, unsigned s);

} // namespace hsv
