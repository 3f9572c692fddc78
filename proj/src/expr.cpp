#include "hsv/expr.hpp"

#include "hsv/decimal.hpp"
#include "hsv/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hsv {

struct Expr::Node {
    Op op = Op::constant;
    Interval value;
    std::size_t index = 0;
    unsigned exponent = 0;
    std::optional<Expr> a;
    std::optional<Expr> b;
    // For sin/cos: the argument divided by 2*pi when that can be done
    // symbolically, so evaluation can reduce in whole periods.
    std::optional<Expr> turns;
};

namespace {

bool has_pi(const Expr& e)
{
    switch (e.op()) {
    case Expr::Op::pi:
        return true;
    case Expr::Op::constant:
    case Expr::Op::variable:
        return false;
    case Expr::Op::neg:
    case Expr::Op::pow:
    case Expr::Op::sin:
    case Expr::Op::cos:
        return has_pi(e.lhs());
    default:
        return has_pi(e.lhs()) || has_pi(e.rhs());
    }
}

// e / pi, when e is a sum of products each carrying exactly one factor pi.
std::optional<Expr> strip_pi(const Expr& e)
{
    switch (e.op()) {
    case Expr::Op::pi:
        return Expr::constant(1.0);
    case Expr::Op::neg:
        if (auto s = strip_pi(e.lhs())) {
            return -*s;
        }
        return std::nullopt;
    case Expr::Op::add:
    case Expr::Op::sub: {
        auto l = strip_pi(e.lhs());
        auto r = strip_pi(e.rhs());
        if (!l || !r) {
            return std::nullopt;
        }
        return e.op() == Expr::Op::add ? *l + *r : *l - *r;
    }
    case Expr::Op::mul:
        if (!has_pi(e.rhs())) {
            if (auto l = strip_pi(e.lhs())) {
                return *l * e.rhs();
            }
        } else if (!has_pi(e.lhs())) {
            if (auto r = strip_pi(e.rhs())) {
                return e.lhs() * *r;
            }
        }
        return std::nullopt;
    default:
        return std::nullopt;
    }
}

} // namespace

Expr Expr::constant(Interval v)
{
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::pi()
{
    auto n = std::make_shared<Node>();
    n->op = Op::pi;
    n->value = pi_interval();
    return Expr(std::move(n));
}

Expr Expr::variable(std::size_t index)
{
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->index = index;
    return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.op() == Expr::Op::constant && b.op() == Expr::Op::constant) {
        return Expr::constant(a.value() + b.value());
    }
    return Expr::make(Expr::Op::add, a, &b);
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (a.op() == Expr::Op::constant && b.op() == Expr::Op::constant) {
        return Expr::constant(a.value() - b.value());
    }
    return Expr::make(Expr::Op::sub, a, &b);
}

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.op() == Expr::Op::constant && b.op() == Expr::Op::constant) {
        return Expr::constant(a.value() * b.value());
    }
    return Expr::make(Expr::Op::mul, a, &b);
}

Expr operator-(const Expr& a)
{
    if (a.op() == Expr::Op::constant) {
        return Expr::constant(-a.value());
    }
    return Expr::make(Expr::Op::neg, a, nullptr);
}

Expr pow(const Expr& a, unsigned n)
{
    if (a.op() == Expr::Op::constant) {
        return Expr::constant(pow(a.value(), n));
    }
    return Expr::make(Expr::Op::pow, a, nullptr, n);
}

Expr sin(const Expr& a)
{
    return Expr::make(Expr::Op::sin, a, nullptr);
}
Expr cos(const Expr& a)
{
    return Expr::make(Expr::Op::cos, a, nullptr);
}

Expr Expr::make(Op op, const Expr& a, const Expr* b, unsigned exponent)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = a;
    if (b != nullptr) {
        n->b = *b;
    }
    n->exponent = exponent;
    if (op == Op::sin || op == Op::cos) {
        if (auto s = strip_pi(a)) {
            n->turns = Expr::constant(0.5) * *s;
        }
    }
    return Expr(std::move(n));
}

Expr::Op Expr::op() const
{
    return node_->op;
}
const Interval& Expr::value() const
{
    return node_->value;
}
std::size_t Expr::index() const
{
    return node_->index;
}
unsigned Expr::exponent() const
{
    return node_->exponent;
}
const Expr& Expr::lhs() const
{
    return *node_->a;
}
const Expr& Expr::rhs() const
{
    return *node_->b;
}

Interval Expr::eval(const Box& x) const
{
    const Node& n = *node_;
    switch (n.op) {
    case Op::constant:
    case Op::pi:
        return n.value;
    case Op::variable:
        if (n.index >= x.dims()) {
            throw DimMismatch("expression variable out of range");
        }
        return x[n.index];
    case Op::add:
        return n.a->eval(x) + n.b->eval(x);
    case Op::sub:
        return n.a->eval(x) - n.b->eval(x);
    case Op::mul:
        return n.a->eval(x) * n.b->eval(x);
    case Op::neg:
        return -n.a->eval(x);
    case Op::pow:
        return pow(n.a->eval(x), n.exponent);
    case Op::sin:
        return n.turns ? sin_turns(n.turns->eval(x)) : sin(n.a->eval(x));
    case Op::cos:
        return n.turns ? cos_turns(n.turns->eval(x)) : cos(n.a->eval(x));
    }
    throw Error("corrupt expression");
}

double Expr::eval(std::span<const double> x) const
{
    const Node& n = *node_;
    switch (n.op) {
    case Op::constant:
        return n.value.mid();
    case Op::pi:
        return std::numbers::pi;
    case Op::variable:
        if (n.index >= x.size()) {
            throw DimMismatch("expression variable out of range");
        }
        return x[n.index];
    case Op::add:
        return n.a->eval(x) + n.b->eval(x);
    case Op::sub:
        return n.a->eval(x) - n.b->eval(x);
    case Op::mul:
        return n.a->eval(x) * n.b->eval(x);
    case Op::neg:
        return -n.a->eval(x);
    case Op::pow: {
        const double v = n.a->eval(x);
        double r = 1.0;
        for (unsigned i = 0; i < n.exponent; ++i) {
            r *= v;
        }
        return r;
    }
    case Op::sin:
        return std::sin(n.a->eval(x));
    case Op::cos:
        return std::cos(n.a->eval(x));
    }
    throw Error("corrupt expression");
}

std::size_t Expr::arity() const
{
    const Node& n = *node_;
    switch (n.op) {
    case Op::constant:
    case Op::pi:
        return 0;
    case Op::variable:
        return n.index + 1;
    case Op::neg:
    case Op::pow:
    case Op::sin:
    case Op::cos:
        return n.a->arity();
    default:
        return std::max(n.a->arity(), n.b->arity());
    }
}

bool Expr::is_constant() const
{
    return arity() == 0;
}

std::string Expr::to_string(const std::vector<std::string>& vars) const
{
    const Node& n = *node_;
    std::ostringstream os;
    os.precision(17);
    switch (n.op) {
    case Op::constant:
        if (n.value.is_point()) {
            os << n.value.lo();
        } else {
            os << n.value;
        }
        break;
    case Op::pi:
        os << "pi";
        break;
    case Op::variable:
        if (n.index < vars.size()) {
            os << vars[n.index];
        } else {
            os << "x" << n.index;
        }
        break;
    case Op::add:
        os << '(' << n.a->to_string(vars) << " + " << n.b->to_string(vars) << ')';
        break;
    case Op::sub:
        os << '(' << n.a->to_string(vars) << " - " << n.b->to_string(vars) << ')';
        break;
    case Op::mul:
        os << n.a->to_string(vars) << '*' << n.b->to_string(vars);
        break;
    case Op::neg:
        os << "-(" << n.a->to_string(vars) << ')';
        break;
    case Op::pow:
        os << '(' << n.a->to_string(vars) << ")^" << n.exponent;
        break;
    case Op::sin:
        os << "sin(" << n.a->to_string(vars) << ')';
        break;
    case Op::cos:
        os << "cos(" << n.a->to_string(vars) << ')';
        break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {

Interval reciprocal(const Interval& d)
{
    if (d.lo() > 0.0) {
        return div_positive(Interval(1.0), d);
    }
    if (d.hi() < 0.0) {
        return -div_positive(Interval(1.0), -d);
    }
    throw DomainError("division by an interval containing zero");
}

Interval decimal_enclosure(std::string_view text)
{
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ParseError("malformed number '" + std::string(text) + "'");
    }
    if (decimal_equals(text, v)) {
        return {v};
    }
    // from_chars rounds to nearest, so the literal lies strictly between the neighbours.
    return {rounding::prev(v), rounding::next(v)};
}

class Parser {
public:
    Parser(std::string_view text, const ParseContext& ctx) : s_(text), ctx_(ctx) {}

    Expr parse()
    {
        Expr e = expr();
        skip_ws();
        if (pos_ < s_.size()) {
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError("column " + std::to_string(pos_ + 1) + ": " + msg);
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr expr()
    {
        Expr e = term();
        for (;;) {
            if (accept('+')) {
                e = e + term();
            } else if (accept('-')) {
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term()
    {
        Expr e = unary();
        for (;;) {
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Expr d = unary();
                if (!d.is_constant()) {
                    pos_ = at;
                    fail("divisor must be a constant");
                }
                try {
                    e = e * Expr::constant(reciprocal(d.eval(Box{})));
                } catch (const DomainError&) {
                    pos_ = at;
                    fail("divisor may vanish");
                }
            } else {
                return e;
            }
        }
    }

    Expr unary()
    {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (!accept('^')) {
            return base;
        }
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
        unsigned n = 0;
        const auto r = std::from_chars(s_.data() + start, s_.data() + pos_, n);
        if (start == pos_ || r.ec != std::errc{} || n > 64) {
            pos_ = start;
            fail("exponent must be an integer literal between 0 and 64");
        }
        return pow(base, n);
    }

    Expr primary()
    {
        skip_ws();
        if (pos_ >= s_.size()) {
            fail("unexpected end of expression");
        }
        const char c = s_[pos_];
        if (accept('(')) {
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return name();
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            }
        };
        digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                ++pos_;
            }
            const std::size_t exp_start = pos_;
            digits();
            if (pos_ == exp_start) {
                pos_ = save;
            }
        }
        try {
            return Expr::constant(decimal_enclosure(s_.substr(start, pos_ - start)));
        } catch (const ParseError& e) {
            pos_ = start;
            fail(e.what());
        }
    }

    Expr name()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view id = s_.substr(start, pos_ - start);
        if (id == "sin" || id == "cos") {
            if (!accept('(')) {
                fail("expected '(' after " + std::string(id));
            }
            Expr arg = expr();
            expect(')');
            return id == "sin" ? sin(arg) : cos(arg);
        }
        for (std::size_t i = 0; i < ctx_.variables.size(); ++i) {
            if (ctx_.variables[i] == id) {
                return Expr::variable(i);
            }
        }
        if (auto it = ctx_.constants.find(id); it != ctx_.constants.end()) {
            return Expr::constant(it->second);
        }
        if (id == "pi") {
            return Expr::pi();
        }
        pos_ = start;
        fail("unknown name '" + std::string(id) + "'");
    }

    std::string_view s_;
    const ParseContext& ctx_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expression(std::string_view text, const ParseContext& ctx)
{
    return Parser(text, ctx).parse();
}

Interval parse_number(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
            s.remove_prefix(1);
        }
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
            s.remove_suffix(1);
        }
        return s;
    };
    text = trim(text);
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    Interval v;
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const Interval p = decimal_enclosure(trim(text.substr(0, slash)));
        const Interval q = decimal_enclosure(trim(text.substr(slash + 1)));
        if (q.lo() == 0.0) {
            throw ParseError("zero denominator in '" + std::string(text) + "'");
        }
        v = p * reciprocal(q);
        if (p.is_point() && q.is_point()) {
            v = Interval(rounding::div_down(p.lo(), q.lo()), rounding::div_up(p.lo(), q.lo()));
        }
    } else {
        v = decimal_enclosure(text);
    }
    return negative ? -v : v;
}

// ---------------------------------------------------------------------------

namespace {

struct Linear {
    std::vector<Interval> coef;
    Interval offset;
};

std::optional<Linear> linearize(const Expr& e, std::size_t dims)
{
    if (e.is_constant()) {
        return Linear{std::vector<Interval>(dims, Interval(0.0)), e.eval(Box{})};
    }
    switch (e.op()) {
    case Expr::Op::variable: {
        if (e.index() >= dims) {
            return std::nullopt;
        }
        Linear l{std::vector<Interval>(dims, Interval(0.0)), Interval(0.0)};
        l.coef[e.index()] = Interval(1.0);
        return l;
    }
    case Expr::Op::add:
    case Expr::Op::sub: {
        auto a = linearize(e.lhs(), dims);
        auto b = linearize(e.rhs(), dims);
        if (!a || !b) {
            return std::nullopt;
        }
        const bool add = e.op() == Expr::Op::add;
        for (std::size_t i = 0; i < dims; ++i) {
            a->coef[i] = add ? a->coef[i] + b->coef[i] : a->coef[i] - b->coef[i];
        }
        a->offset = add ? a->offset + b->offset : a->offset - b->offset;
        return a;
    }
    case Expr::Op::neg: {
        auto a = linearize(e.lhs(), dims);
        if (!a) {
            return std::nullopt;
        }
        for (auto& c : a->coef) {
            c = -c;
        }
        a->offset = -a->offset;
        return a;
    }
    case Expr::Op::mul: {
        const bool left_const = e.lhs().is_constant();
        if (!left_const && !e.rhs().is_constant()) {
            return std::nullopt;
        }
        const Interval k = left_const ? e.lhs().eval(Box{}) : e.rhs().eval(Box{});
        auto a = linearize(left_const ? e.rhs() : e.lhs(), dims);
        if (!a) {
            return std::nullopt;
        }
        for (auto& c : a->coef) {
            c = k * c;
        }
        a->offset = k * a->offset;
        return a;
    }
    case Expr::Op::pow:
        if (e.exponent() == 1) {
            return linearize(e.lhs(), dims);
        }
        return std::nullopt;
    default:
        return std::nullopt;
    }
}

// Flattens +, - and unary minus into signed terms.
void additive_terms(const Expr& e, bool negate, std::vector<std::pair<bool, Expr>>& out)
{
    switch (e.op()) {
    case Expr::Op::add:
        additive_terms(e.lhs(), negate, out);
        additive_terms(e.rhs(), negate, out);
        return;
    case Expr::Op::sub:
        additive_terms(e.lhs(), negate, out);
        additive_terms(e.rhs(), !negate, out);
        return;
    case Expr::Op::neg:
        additive_terms(e.lhs(), !negate, out);
        return;
    default:
        out.emplace_back(negate, e);
    }
}

void factors(const Expr& e, std::vector<Expr>& out)
{
    if (e.op() == Expr::Op::mul) {
        factors(e.lhs(), out);
        factors(e.rhs(), out);
    } else {
        out.push_back(e);
    }
}

} // namespace

Interval PhaseForm::phase(const Box& x) const
{
    if (x.dims() != coef.size()) {
        throw DimMismatch("phase form dimension mismatch");
    }
    Interval p = offset;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        p = p + coef[i] * x[i];
    }
    return p;
}

Interval PhaseForm::range() const
{
    return a0 + amplitude * Interval(-1.0, 1.0);
}

std::optional<PhaseForm> extract_phase_form(const Expr& e, std::size_t dims)
{
    std::vector<std::pair<bool, Expr>> terms;
    additive_terms(e, false, terms);
    PhaseForm pf;
    pf.a0 = Interval(0.0);
    std::optional<Expr> trig;
    for (const auto& [neg, t] : terms) {
        if (t.is_constant()) {
            pf.a0 = neg ? pf.a0 - t.eval(Box{}) : pf.a0 + t.eval(Box{});
            continue;
        }
        if (trig) {
            return std::nullopt;
        }
        std::vector<Expr> fs;
        factors(t, fs);
        Interval amp(neg ? -1.0 : 1.0);
        for (const auto& f : fs) {
            if (f.is_constant()) {
                amp = amp * f.eval(Box{});
            } else if (!trig && (f.op() == Expr::Op::sin || f.op() == Expr::Op::cos)) {
                trig = f;
            } else {
                return std::nullopt;
            }
        }
        if (!trig) {
            return std::nullopt;
        }
        pf.amplitude = amp;
    }
    if (!trig) {
        return std::nullopt;
    }
    pf.is_cos = trig->op() == Expr::Op::cos;
    const Expr& arg = trig->lhs();
    std::optional<Linear> lin;
    if (auto s = strip_pi(arg)) {
        lin = linearize(Expr::constant(0.5) * *s, dims);
    } else {
        lin = linearize(arg, dims);
        if (lin) {
            const Interval tp = two_pi_interval();
            for (auto& c : lin->coef) {
                c = div_positive(c, tp);
            }
            lin->offset = div_positive(lin->offset, tp);
        }
    }
    if (!lin) {
        return std::nullopt;
    }
    pf.coef = std::move(lin->coef);
    pf.offset = lin->offset;
    return pf;
}

} // namespace hsv
