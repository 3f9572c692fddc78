#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "planted.hpp"

#include "hsv/errors.hpp"
#include "hsv/miranda.hpp"

#include <cmath>

using hsv::Box;
using hsv::Interval;
using hsv::MapSpec;
using hsv::Verdict;
using oracle::Q;

namespace {

MapSpec parse_map(std::vector<std::string> texts, std::vector<std::string> vars)
{
    hsv::ParseContext ctx;
    ctx.variables = vars;
    std::vector<hsv::Expr> comps;
    for (const auto& t : texts) {
        comps.push_back(hsv::parse_expression(t, ctx));
    }
    return MapSpec::expression(std::move(comps), std::move(vars));
}

std::vector<Q> exact_point(const std::vector<double>& p)
{
    std::vector<Q> out;
    for (double v : p) {
        out.push_back(oracle::exact(v));
    }
    return out;
}

bool covered(const hsv::ZeroSearchResult& r, const std::vector<double>& z)
{
    const auto q = exact_point(z);
    for (const auto& e : r.zeros) {
        if (oracle::contains(e.box, q)) {
            return true;
        }
    }
    for (const auto& b : r.unresolved) {
        if (oracle::contains(b, q)) {
            return true;
        }
    }
    return false;
}

bool share_facet(const Box& a, const Box& b)
{
    std::size_t touching = 0;
    for (std::size_t i = 0; i < a.dims(); ++i) {
        if (a[i] == b[i]) {
            continue;
        }
        if (a[i].hi() == b[i].lo() || b[i].hi() == a[i].lo()) {
            ++touching;
        } else {
            return false;
        }
    }
    return touching == 1;
}

} // namespace

TEST_CASE("circle and diagonal meet in a certified box")
{
    const auto f = parse_map({"x^2 + y^2 - 1", "x - y"}, {"x", "y"});
    const Box b{Interval(0.70, 0.72), Interval(0.70, 0.72)};
    const auto r = hsv::check_miranda(f, b);
    REQUIRE(r.status == Verdict::Certified);
    CHECK(hsv::replay_miranda(f, *r.certificate));
    CHECK(r.certificate->box == b);
    CHECK(r.certificate->pattern.size() == 2);

    // Without the zero the check cannot succeed, and it never claims absence.
    const auto away = hsv::check_miranda(f, Box{Interval(0.2, 0.3), Interval(0.2, 0.3)});
    CHECK(away.status == Verdict::Inconclusive);
    CHECK_FALSE(away.reason.empty());
}

TEST_CASE("a tampered certificate does not replay")
{
    const auto f = parse_map({"x^2 + y^2 - 1", "x - y"}, {"x", "y"});
    const auto r = hsv::check_miranda(f, Box{Interval(0.70, 0.72), Interval(0.70, 0.72)});
    REQUIRE(r.certificate);
    auto cert = *r.certificate;
    REQUIRE_FALSE(cert.faces.empty());
    cert.faces[0].value = Interval(cert.faces[0].value.lo(), std::nextafter(cert.faces[0].value.hi(), 10.0));
    CHECK_FALSE(hsv::replay_miranda(f, cert));
}

TEST_CASE("preconditioning rescues a coupled system")
{
    // A coupled linear system fails the plain face test but passes after A F.
    const auto f = parse_map({"x + 2*y - 1.5", "2*x - y - 0.5"}, {"x", "y"});
    const Box b{Interval(0.25, 0.75), Interval(0.25, 0.75)};
    hsv::MirandaOptions plain;
    plain.precondition = false;
    CHECK(hsv::check_miranda(f, b, plain).status == Verdict::Inconclusive);
    const auto r = hsv::check_miranda(f, b);
    REQUIRE(r.status == Verdict::Certified);
    REQUIRE(r.certificate->preconditioner);
    REQUIRE(r.certificate->determinant);
    CHECK_FALSE(r.certificate->determinant->contains_zero());
    CHECK(hsv::replay_miranda(f, *r.certificate));
}

TEST_CASE("planted zeros never escape")
{
    std::mt19937_64 rng(51);
    int certified = 0;
    for (int i = 0; i < 120; ++i) {
        const std::size_t dims = 1 + i % 3;
        const auto sys = oracle::planted_system(rng, dims);
        INFO(sys.text[0]);
        hsv::ZeroSearchOptions opt;
        opt.tol = 1e-9;
        opt.max_boxes = 20000;
        const auto r = hsv::find_zeros(sys.map, Box::cube(dims, Interval(-1.0, 1.0)), opt);
        CHECK(covered(r, sys.zero));
        for (const auto& z : r.zeros) {
            if (z.status == hsv::ZeroStatus::certified) {
                ++certified;
                REQUIRE(z.certificate);
                CHECK(hsv::replay_miranda(sys.map, *z.certificate));
            }
        }
    }
    CHECK(certified >= 100);
}

TEST_CASE("zero enclosures are sorted and disjoint for isolated zeros")
{
    const auto f = parse_map({"(x - 0.25)*(x + 0.5)*(x - 0.75)"}, {"x"});
    const auto r = hsv::find_zeros(f, Box{Interval(-1.0, 1.0)});
    REQUIRE(r.zeros.size() == 3);
    const double expected[] = {-0.5, 0.25, 0.75};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.zeros[i].status == hsv::ZeroStatus::certified);
        CHECK(r.zeros[i].box.contains(Box{Interval(expected[i])}));
        CHECK(r.zeros[i].box.width() <= 1e-9);
        if (i > 0) {
            CHECK_FALSE(r.zeros[i - 1].box.intersects(r.zeros[i].box));
        }
    }
    CHECK_FALSE(r.budget_exceeded);
}

TEST_CASE("a continuum of zeros is reported as non-isolated candidates")
{
    const auto f = MapSpec::residual(MapSpec::identity(2));
    hsv::ZeroSearchOptions opt;
    opt.tol = 1.0 / 16.0;
    const auto r = hsv::find_zeros(f, Box::cube(2, Interval(0.0, 1.0)), opt);
    REQUIRE_FALSE(r.zeros.empty());
    for (const auto& z : r.zeros) {
        CHECK(z.status == hsv::ZeroStatus::candidate);
        CHECK(z.non_isolated);
    }
}

TEST_CASE("a small budget leaves the remaining boxes unresolved")
{
    std::mt19937_64 rng(52);
    const auto sys = oracle::planted_system(rng, 2);
    hsv::ZeroSearchOptions opt;
    opt.max_boxes = 4;
    const auto r = hsv::find_zeros(sys.map, Box::cube(2, Interval(-1.0, 1.0)), opt);
    CHECK(r.budget_exceeded);
    CHECK_FALSE(r.unresolved.empty());
    CHECK(covered(r, sys.zero));
}

TEST_CASE("horseshoe fixed points match the exact affine solve")
{
    const auto psi = MapSpec::affine_horseshoe();
    for (unsigned s = 0; s < 2; ++s) {
        const auto r = hsv::find_fixed_points(psi, hsv::horseshoe_strip(2, s));
        REQUIRE(r.zeros.size() == 1);
        const auto& z = r.zeros[0];
        CHECK(z.status == hsv::ZeroStatus::certified);
        CHECK(z.box.width() <= 1e-9);
        CHECK(oracle::contains(z.box, oracle::horseshoe_periodic_point({s}, 2)));
    }
    // The closed forms: (0, 0) exactly, and (3/4, 3/4) up to the rounding of 1/3 and 2/3.
    CHECK(oracle::horseshoe_periodic_point({0}, 2) == std::vector<Q>{0, 0});
    const auto p1 = oracle::horseshoe_periodic_point({1}, 2);
    CHECK(abs(p1[0] - Q(3, 4)) < Q(1, 1000000000000LL));
    CHECK(abs(p1[1] - Q(3, 4)) < Q(1, 1000000000000LL));
}

TEST_CASE("branch tracker follows x = 0.5 + 0.3 sin(2 pi lambda)")
{
    const auto f = parse_map({"x - (0.5 + 0.3*sin(2*pi*lambda))"}, {"x", "lambda"});
    hsv::BranchOptions opt;
    opt.cell = 1.0 / 64.0;
    const auto r = hsv::track_zero_branch(f, Box::cube(2, Interval(0.0, 1.0)), 1, opt);
    REQUIRE(r.status == Verdict::Certified);
    REQUIRE(r.chain);
    const auto& boxes = r.chain->boxes;
    REQUIRE(boxes.size() >= 64);
    CHECK(r.chain->touches_lo);
    CHECK(r.chain->touches_hi);
    CHECK(boxes.front()[1].lo() == 0.0);
    CHECK(boxes.back()[1].hi() == 1.0);
    for (std::size_t i = 1; i < boxes.size(); ++i) {
        CHECK(share_facet(boxes[i - 1], boxes[i]));
    }
    for (const auto& b : boxes) {
        // Curve range over the cell's lambda interval from endpoint values and
        // the extrema at 1/4 and 3/4, padded for libm error.
        const double l0 = b[1].lo();
        const double l1 = b[1].hi();
        double lo = std::min(std::sin(2 * M_PI * l0), std::sin(2 * M_PI * l1));
        double hi = std::max(std::sin(2 * M_PI * l0), std::sin(2 * M_PI * l1));
        if (l0 <= 0.25 && 0.25 <= l1) {
            hi = 1.0;
        }
        if (l0 <= 0.75 && 0.75 <= l1) {
            lo = -1.0;
        }
        const double xlo = 0.5 + 0.3 * lo - 1e-12;
        const double xhi = 0.5 + 0.3 * hi + 1e-12;
        CHECK(b[0].hi() >= xlo);
        CHECK(b[0].lo() <= xhi);
    }
}

TEST_CASE("branch tracker rejects fields without face signs")
{
    const auto f = parse_map({"x - 2"}, {"x", "lambda"});
    CHECK_THROWS_AS(static_cast<void>(hsv::track_zero_branch(f, Box::cube(2, Interval(0.0, 1.0)), 1)),
                    hsv::HypothesisFailed);
    const auto g = parse_map({"x - 0.5", "lambda"}, {"x", "lambda"});
    CHECK_THROWS_AS(static_cast<void>(hsv::track_zero_branch(g, Box::cube(2, Interval(0.0, 1.0)), 1)),
                    hsv::DimMismatch);
}
