#pragma once

// Small arithmetic expression language for user-defined maps.
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;      divisor must fold to a constant
//   unary   = "-" unary | power ;
//   power   = primary [ "^" integer ] ;
//   primary = number | name | name "(" expr ")" | "(" expr ")" ;
//
// Names resolve to variables, user constants, or the builtin constant `pi`.
// Functions: sin, cos. Numbers accept decimal, exponent and p/q forms.

#include "hsv/interval.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsv {

class Expr {
public:
    enum class Op { constant, pi, variable, add, sub, mul, neg, pow, sin, cos };

    static Expr constant(Interval v);
    static Expr pi();
    static Expr variable(std::size_t index);

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, unsigned n);
    friend Expr sin(const Expr& a);
    friend Expr cos(const Expr& a);

    [[nodiscard]] Op op() const;
    [[nodiscard]] const Interval& value() const;
    [[nodiscard]] std::size_t index() const;
    [[nodiscard]] unsigned exponent() const;
    [[nodiscard]] const Expr& lhs() const;
    [[nodiscard]] const Expr& rhs() const;

    /// Rigorous enclosure over a box.
    [[nodiscard]] Interval eval(const Box& x) const;
    /// Floating evaluation, round-to-nearest, constants at their midpoints.
    [[nodiscard]] double eval(std::span<const double> x) const;

    /// Largest variable index used plus one.
    [[nodiscard]] std::size_t arity() const;
    /// True when the expression has no variables.
    [[nodiscard]] bool is_constant() const;

    [[nodiscard]] std::string to_string(const std::vector<std::string>& vars) const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Expr make(Op op, const Expr& a, const Expr* b, unsigned exponent = 0);
    std::shared_ptr<const Node> node_;
};

struct ParseContext {
    std::vector<std::string> variables;
    std::map<std::string, Interval, std::less<>> constants;
};

/// Throws ParseError naming the 1-based column of the problem.
Expr parse_expression(std::string_view text, const ParseContext& ctx);

/// Enclosure of a decimal or p/q literal ("0.1", "1e-3", "1/3").
Interval parse_number(std::string_view text);

/// A component of the form a0 + amplitude * trig(2*pi*(coef . x + offset)),
/// phase measured in periods.
struct PhaseForm {
    Interval a0;
    Interval amplitude;
    bool is_cos = true;
    std::vector<Interval> coef;
    Interval offset;

    /// Enclosure of the phase (in periods) over a box.
    [[nodiscard]] Interval phase(const Box& x) const;
    /// [a0 - |amplitude|, a0 + |amplitude|].
    [[nodiscard]] Interval range() const;
};

std::optional<PhaseForm> extract_phase_form(const Expr& e, std::size_t dims);

} // namespace hsv
