#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"

#include "hsv/decimal.hpp"
#include "hsv/errors.hpp"
#include "hsv/interval.hpp"

#include <cmath>
#include <limits>

using hsv::Box;
using hsv::Interval;
using oracle::exact;
using oracle::Q;

namespace {

double random_double(std::mt19937_64& rng)
{
    // Mix of magnitudes so that both exact and inexact cases occur.
    const double mant = oracle::uniform(rng, -1.0, 1.0);
    const int e = std::uniform_int_distribution<int>(-30, 30)(rng);
    return std::ldexp(mant, e);
}

Interval random_interval(std::mt19937_64& rng)
{
    double a = random_double(rng);
    double b = rng() % 4 == 0 ? a : random_double(rng);
    if (b < a) {
        std::swap(a, b);
    }
    return {a, b};
}

double sample(std::mt19937_64& rng, const Interval& v)
{
    switch (rng() % 3) {
    case 0:
        return v.lo();
    case 1:
        return v.hi();
    default:
        return std::clamp(oracle::uniform(rng, v.lo(), v.hi()), v.lo(), v.hi());
    }
}

struct Frozen {
    double x;
    const char* sin;
    const char* cos;
};

// mpmath at 60 digits on the exact binary value of x.
const Frozen radians[] = {
    {0.5, "0.4794255386042030002732879352155713880818", "0.8775825618903727161162815826038296519916"},
    {1.0, "0.8414709848078965066525023216302989996226", "0.5403023058681397174009366074429766037323"},
    {2.0, "0.9092974268256816953960198659117448427023", "-0.416146836547142386997568229500762189766"},
    {3.0, "0.1411200080598672221007448028081102798469", "-0.9899924966004454572715727947312613023937"},
    {10.0, "-0.5440211108893698134047476618513772816836", "-0.8390715290764524522588639478240648345199"},
    {100.0, "-0.506365641109758793656557610459785432065", "0.8623188722876839341019385139508425355101"},
    {0.001, "0.0009999998333333416874831395573527063339607", "0.9999995000000416666652569611243370898969"},
    {-7.25, "-0.823080879011505458421671183412056515715", "0.5679241732886948644238363482181612943445"},
    {1000000.0, "-0.3499935021712929521176524867807714690614", "0.9367521275331447869385325350749187757081"},
};

// sin(2 pi t), cos(2 pi t) from mpmath on the exact binary value of t.
const Frozen turns[] = {
    {0.1, "0.5877852522924731573861548449791291541214", "0.8090169943749474036011167665330884372446"},
    {0.3, "0.9510565162951535936726521339731743207512", "-0.3090169943749473577590921569488335369111"},
    {1.0 / 3.0, "0.866025403784438704894864804230128655128", "-0.4999999999999998993139091888350305243412"},
    {0.7, "-0.9510565162951534858915881310041671547513", "-0.3090169943749476894750984581187461096094"},
    {2.125, "0.7071067811865475244008443621048490392848", "0.7071067811865475244008443621048490392848"},
    {-0.4, "-0.5877852522924730162989103932788400759619", "-0.8090169943749475061070000197817317034474"},
};

} // namespace

TEST_CASE("directed rounding brackets the exact result")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20000; ++i) {
        const double a = random_double(rng);
        const double b = random_double(rng);
        const Q qa = exact(a);
        const Q qb = exact(b);
        CHECK(exact(hsv::rounding::add_down(a, b)) <= qa + qb);
        CHECK(qa + qb <= exact(hsv::rounding::add_up(a, b)));
        CHECK(exact(hsv::rounding::sub_down(a, b)) <= qa - qb);
        CHECK(qa - qb <= exact(hsv::rounding::sub_up(a, b)));
        CHECK(exact(hsv::rounding::mul_down(a, b)) <= qa * qb);
        CHECK(qa * qb <= exact(hsv::rounding::mul_up(a, b)));
        if (b != 0.0) {
            CHECK(exact(hsv::rounding::div_down(a, b)) <= qa / qb);
            CHECK(qa / qb <= exact(hsv::rounding::div_up(a, b)));
        }
        // Never more than one ulp away from round-to-nearest.
        CHECK(hsv::rounding::add_up(a, b) <= std::nextafter(a + b, INFINITY));
        CHECK(hsv::rounding::add_down(a, b) >= std::nextafter(a + b, -INFINITY));
    }
}

TEST_CASE("exact operations keep exact endpoints")
{
    CHECK(Interval(1.0) + Interval(2.0) == Interval(3.0));
    CHECK(Interval(0.5) * Interval(0.25) == Interval(0.125));
    CHECK(Interval(1.0) - Interval(2.0 / 3.0) == Interval(1.0 - 2.0 / 3.0));
    CHECK(hsv::divide(Interval(1.0), 4.0) == Interval(0.25));
    const Interval third = hsv::divide(Interval(1.0), 3.0);
    CHECK(third.lo() < third.hi());
    CHECK(oracle::contains(third, Q(1, 3)));
}

TEST_CASE("arithmetic encloses every pointwise result")
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 5000; ++i) {
        const Interval x = random_interval(rng);
        const Interval y = random_interval(rng);
        const double a = sample(rng, x);
        const double b = sample(rng, y);
        CHECK(oracle::contains(x + y, exact(a) + exact(b)));
        CHECK(oracle::contains(x - y, exact(a) - exact(b)));
        CHECK(oracle::contains(x * y, exact(a) * exact(b)));
        CHECK(oracle::contains(-x, -exact(a)));
        CHECK(oracle::contains(hsv::sqr(x), exact(a) * exact(a)));
        CHECK(oracle::contains(hsv::abs(x), exact(std::fabs(a))));
        CHECK(oracle::contains(hsv::pow(x, 3), exact(a) * exact(a) * exact(a)));
        if (y.lo() > 0.0) {
            CHECK(oracle::contains(hsv::div_positive(x, y), exact(a) / exact(b)));
        }
        if (b != 0.0) {
            CHECK(oracle::contains(hsv::divide(x, b), exact(a) / exact(b)));
        }
        CHECK(hsv::sqr(x).lo() >= 0.0);
    }
}

TEST_CASE("radian sine and cosine enclose reference values tightly")
{
    for (const auto& f : radians) {
        const Interval s = hsv::sin(Interval(f.x));
        const Interval c = hsv::cos(Interval(f.x));
        INFO("x = " << f.x);
        CHECK(oracle::encloses_reference(s, f.sin));
        CHECK(oracle::encloses_reference(c, f.cos));
        CHECK(s.width() <= 16 * std::numeric_limits<double>::epsilon());
        CHECK(c.width() <= 16 * std::numeric_limits<double>::epsilon());
    }
}

TEST_CASE("turn-based sine and cosine enclose reference values")
{
    for (const auto& f : turns) {
        INFO("t = " << f.x);
        CHECK(oracle::encloses_reference(hsv::sin_turns(Interval(f.x)), f.sin));
        CHECK(oracle::encloses_reference(hsv::cos_turns(Interval(f.x)), f.cos));
    }
    CHECK(hsv::sin_turns(Interval(0.25)) == Interval(1.0));
    CHECK(hsv::cos_turns(Interval(0.5)) == Interval(-1.0));
    CHECK(hsv::sin_turns(Interval(0.0)) == Interval(0.0));
    CHECK(hsv::sin_turns(Interval(-3.75)) == Interval(1.0));
}

TEST_CASE("trigonometric ranges include interior extrema")
{
    const Interval s = hsv::sin(Interval(1.0, 2.0));
    CHECK(s.hi() == 1.0);
    CHECK(s.lo() <= std::sin(1.0));
    CHECK(hsv::cos(Interval(3.0, 3.5)).lo() == -1.0);
    CHECK(hsv::sin(Interval(0.0, 100.0)) == Interval(-1.0, 1.0));
    CHECK(hsv::sin_turns(Interval(0.0, 1.0)) == Interval(-1.0, 1.0));

    std::mt19937_64 rng(13);
    for (int i = 0; i < 3000; ++i) {
        const double a = oracle::uniform(rng, -20.0, 20.0);
        const double w = oracle::uniform(rng, 0.0, 2.0);
        const Interval x(a, a + w);
        const double p = sample(rng, x);
        CHECK(hsv::sin(x).contains(std::sin(p)));
        CHECK(hsv::cos(x).contains(std::cos(p)));
    }
}

TEST_CASE("constants")
{
    CHECK(oracle::encloses_reference(hsv::pi_interval(), "3.141592653589793238462643383279502884197"));
    CHECK(oracle::encloses_reference(hsv::log_interval(2.0), "0.6931471805599453094172321214581765680755"));
    CHECK(oracle::encloses_reference(hsv::log_interval(3.0), "1.098612288668109691395245236922525704647"));
}

TEST_CASE("construction errors")
{
    CHECK_THROWS_AS(Interval(2.0, 1.0), hsv::ConstructionError);
    CHECK_THROWS_AS(Interval(std::nan("")), hsv::ConstructionError);
    CHECK_THROWS_AS(Interval(0.0, INFINITY), hsv::ConstructionError);
    CHECK_THROWS_AS(hsv::divide(Interval(1.0), 0.0), hsv::DomainError);
    CHECK_THROWS_AS(hsv::div_positive(Interval(1.0), Interval(-1.0, 1.0)), hsv::DomainError);
}

TEST_CASE("clamp, hull and intersection")
{
    CHECK(hsv::clamp(Interval(-1.0, 0.5), Interval(0.0, 1.0)) == Interval(0.0, 0.5));
    CHECK(hsv::clamp(Interval(2.0, 3.0), Interval(0.0, 1.0)) == Interval(1.0));
    CHECK(hsv::hull(Interval(0.0, 1.0), Interval(3.0)) == Interval(0.0, 3.0));
    CHECK(hsv::intersection(Interval(0.0, 1.0), Interval(1.0, 2.0)) == Interval(1.0));
    CHECK_FALSE(hsv::intersection(Interval(0.0, 1.0), Interval(1.5, 2.0)).has_value());
}

TEST_CASE("boxes")
{
    const Box b{Interval(0.0, 1.0), Interval(0.0, 2.0), Interval(0.0, 2.0)};
    CHECK(b.widest_axis() == 1);
    const auto [l, r] = b.bisect();
    CHECK(l[1] == Interval(0.0, 1.0));
    CHECK(r[1] == Interval(1.0, 2.0));
    CHECK(b.contains(l));
    CHECK(l.intersects(r));
    CHECK_THROWS_AS(static_cast<void>(Box{Interval(1.0)}.bisect()), hsv::DegenerateBox);
    CHECK(b.can_bisect());
    CHECK_FALSE(Box{Interval(1.0)}.can_bisect());
    const Box tight{Interval(1.0, std::nextafter(1.0, 2.0))};
    CHECK_FALSE(tight.can_bisect());
    CHECK_THROWS_AS(static_cast<void>(tight.bisect()), hsv::DegenerateBox);
    CHECK(hsv::hull(Box{Interval(0.0)}, Box{Interval(2.0)}) == Box{Interval(0.0, 2.0)});
    CHECK_FALSE(hsv::intersection(Box{Interval(0.0, 1.0)}, Box{Interval(2.0, 3.0)}).has_value());
    CHECK_THROWS_AS(hsv::require_same_dims(b, Box{Interval(0.0)}, "x"), hsv::DimMismatch);
}

TEST_CASE("directed decimal output")
{
    std::mt19937_64 rng(14);
    for (int i = 0; i < 3000; ++i) {
        const double v = random_double(rng);
        const std::string down = hsv::to_decimal(v, hsv::RoundDir::down);
        const std::string up = hsv::to_decimal(v, hsv::RoundDir::up);
        const std::string near = hsv::to_decimal(v, hsv::RoundDir::nearest);
        INFO(v << " " << down << " " << up);
        CHECK(oracle::decimal(down) <= exact(v));
        CHECK(exact(v) <= oracle::decimal(up));
        CHECK(std::strtod(near.c_str(), nullptr) == v);
    }
    CHECK(hsv::to_decimal(0.5, hsv::RoundDir::down) == "0.5");
    CHECK(hsv::to_decimal(0.1, hsv::RoundDir::nearest) == "0.10000000000000001");
    CHECK(hsv::decimal_equals("0.5", 0.5));
    CHECK_FALSE(hsv::decimal_equals("0.1", 0.1));
}
