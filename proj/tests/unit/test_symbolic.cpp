#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"

#include "hsv/errors.hpp"
#include "hsv/symbolic.hpp"

#include <numeric>

using hsv::Box;
using hsv::Interval;
using hsv::MapSpec;
using hsv::SymbolWord;
using hsv::Verdict;
using oracle::Q;

namespace {

const Box unit{Interval(0.0, 1.0), Interval(0.0, 1.0)};

std::vector<Box> strips()
{
    return {hsv::horseshoe_strip(2, 0), hsv::horseshoe_strip(2, 1)};
}

unsigned letter(const SymbolWord& w, long long i)
{
    const auto n = static_cast<long long>(w.size());
    return w.letters()[static_cast<std::size_t>(((i % n) + n) % n)];
}

Q q_pow(unsigned m, unsigned e)
{
    Q r = 1;
    for (unsigned i = 0; i < e; ++i) {
        r *= m;
    }
    return r;
}

// Full two-sided distance of two periodic sequences, summed in closed form
// over the joint period.
Q exact_distance(const SymbolWord& a, const SymbolWord& b)
{
    const unsigned m = a.alphabet();
    const auto period = static_cast<unsigned>(std::lcm(a.size(), b.size()));
    const Q ratio = Q(1) / (Q(1) - Q(1) / q_pow(m, period));
    Q total = 0;
    for (unsigned r = 0; r < period; ++r) {
        const long long i = r;
        const int forward = std::abs(static_cast<int>(letter(a, i)) - static_cast<int>(letter(b, i)));
        total += Q(forward) / q_pow(m, r + 1) * ratio;
        // Negative positions -1 .. -period, weighted m^-(j+1).
        const long long j = r + 1;
        const int backward = std::abs(static_cast<int>(letter(a, -j)) - static_cast<int>(letter(b, -j)));
        total += Q(backward) / q_pow(m, r + 2) * ratio;
    }
    return total;
}

SymbolWord random_word(std::mt19937_64& rng, unsigned m, std::size_t len)
{
    std::vector<unsigned> l(len);
    for (auto& c : l) {
        c = static_cast<unsigned>(rng() % m);
    }
    return {m, l};
}

} // namespace

TEST_CASE("words, rotation and primitive period")
{
    const auto w = SymbolWord::parse("0101", 2);
    CHECK(w.primitive_period() == 2);
    CHECK(w.str() == "0101");
    CHECK(SymbolWord::parse("110", 2).canonical_rotation().str() == "011");
    CHECK(hsv::shift(SymbolWord::parse("011", 2)).str() == "110");
    CHECK(hsv::shift(SymbolWord::parse("abc", 13, false)).str() == "bc");
    CHECK(SymbolWord::parse("1", 2).at(-7) == 1);
    CHECK_THROWS_AS(SymbolWord(2, {}), hsv::EmptyWord);
    CHECK_THROWS_AS(SymbolWord(2, {0, 2}), hsv::ConstructionError);
    CHECK_THROWS_AS(hsv::shift(SymbolWord(2, {1}, false)), hsv::EmptyWord);
    CHECK_THROWS_AS(SymbolWord::parse("0?", 2), hsv::ParseError);
}

TEST_CASE("word counts match the necklace formulas")
{
    for (unsigned m = 2; m <= 4; ++m) {
        for (unsigned k = 1; k <= 6; ++k) {
            if (q_pow(m, k) > 5000) {
                continue;
            }
            const auto all = hsv::enumerate_periodic_words(m, k, false);
            const auto classes = hsv::enumerate_periodic_words(m, k, true);
            CHECK(Q(all.size()) == q_pow(m, k));
            CHECK(classes.size() == oracle::necklaces(m, k));
            std::size_t primitive = 0;
            for (const auto& w : all) {
                primitive += w.primitive_period() == k ? 1 : 0;
            }
            CHECK(primitive == k * oracle::primitive_necklaces(m, k));
        }
    }
    CHECK_THROWS_AS(hsv::enumerate_periodic_words(2, 30, false, 1000), hsv::BudgetExceeded);
}

TEST_CASE("sequence distance encloses the exact two-sided sum")
{
    std::mt19937_64 rng(61);
    for (int i = 0; i < 300; ++i) {
        const unsigned m = 2 + static_cast<unsigned>(rng() % 3);
        const auto a = random_word(rng, m, 1 + rng() % 5);
        const auto b = random_word(rng, m, 1 + rng() % 5);
        const unsigned horizon = static_cast<unsigned>(rng() % 30);
        const Interval d = hsv::seq_distance(a, b, horizon);
        CHECK(oracle::contains(d, exact_distance(a, b)));
        // Shift is bi-Lipschitz with constant m on this metric.
        const Q shifted = exact_distance(hsv::shift(a), hsv::shift(b));
        CHECK(shifted <= Q(m) * exact_distance(a, b));
    }
    const auto w = SymbolWord::parse("01", 2);
    CHECK(hsv::seq_distance(w, w, 20).lo() == 0.0);
    CHECK_THROWS_AS(hsv::seq_distance(w, SymbolWord::parse("01", 3), 5), hsv::AlphabetMismatch);
}

TEST_CASE("periodic orbits contain the exact affine solution")
{
    const auto psi = MapSpec::affine_horseshoe();
    for (const char* text : {"0", "1", "01", "001", "011", "0111"}) {
        const auto w = SymbolWord::parse(text, 2);
        INFO(text);
        const auto r = hsv::find_periodic_orbit(psi, strips(), w);
        REQUIRE(r.status == Verdict::Certified);
        const auto& rec = *r.record;
        REQUIRE(rec.points.size() == w.size());
        auto rotated = w.letters();
        for (std::size_t j = 0; j < w.size(); ++j) {
            const auto p = oracle::horseshoe_periodic_point(rotated, 2);
            CHECK(oracle::contains(rec.points[j], p));
            CHECK(rec.points[j].width() <= 1e-8);
            CHECK(strips()[w.letters()[j]].contains(rec.points[j]));
            std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
        }
        // The certificate is for the fixed point of the composed branches.
        std::vector<MapSpec> stages;
        for (unsigned l : w.letters()) {
            stages.push_back(psi.branch_for(strips()[l]));
        }
        CHECK(rec.certificate.box == rec.points[0]);
        CHECK(hsv::replay_miranda(MapSpec::residual(MapSpec::compose(stages)), rec.certificate));
    }
}

TEST_CASE("orbit of the shifted word is the rotated orbit")
{
    const auto psi = MapSpec::affine_horseshoe();
    for (unsigned k = 1; k <= 4; ++k) {
        for (const auto& w : hsv::enumerate_periodic_words(2, k, false)) {
            const auto a = hsv::find_periodic_orbit(psi, strips(), w);
            const auto b = hsv::find_periodic_orbit(psi, strips(), hsv::shift(w));
            REQUIRE(a.status == Verdict::Certified);
            REQUIRE(b.status == Verdict::Certified);
            for (std::size_t j = 0; j < k; ++j) {
                CHECK(a.record->points[(j + 1) % k].intersects(b.record->points[j]));
            }
        }
    }
}

TEST_CASE("chaos report on the horseshoe")
{
    const auto psi = MapSpec::affine_horseshoe();
    const hsv::OrientedRect x(unit, 1);
    const std::vector<hsv::OrientedRect> ks{hsv::OrientedRect(strips()[0], 1),
                                            hsv::OrientedRect(strips()[1], 1)};
    hsv::ChaosOptions opt;
    opt.max_period = 4;
    const auto r = hsv::chaos_report(psi, x, ks, opt);
    CHECK(r.status == Verdict::Certified);
    CHECK(r.symbols == 2);
    REQUIRE(r.periods.size() == 4);
    for (const auto& p : r.periods) {
        CHECK(Q(p.itineraries_certified) == q_pow(2, p.period));
        CHECK(p.necklaces == oracle::necklaces(2, p.period));
    }
    CHECK(r.orbits_disjoint);
    CHECK(oracle::encloses_reference(r.entropy, "0.6931471805599453094172321214581765680755"));

    CHECK_THROWS_AS(hsv::chaos_report(psi, x, {ks[0]}, opt), hsv::PrerequisiteFailed);
    const hsv::OrientedRect overlap(Box{Interval(0.0, 1.0), Interval(0.25, 1.0 / 3.0)}, 1);
    CHECK_THROWS_AS(hsv::chaos_report(psi, x, {ks[0], overlap}, opt), hsv::NotDisjoint);
}

TEST_CASE("forward iteration of an orbit enclosure")
{
    const auto psi = MapSpec::affine_horseshoe();
    const auto w = SymbolWord::parse("01", 2);
    const auto orbit = hsv::find_periodic_orbit(psi, strips(), w);
    REQUIRE(orbit.record);
    const auto short_run = hsv::verify_itinerary(psi, orbit.record->points[0], w, strips(), 10);
    CHECK(short_run.verdict == hsv::ItineraryVerdict::contained);
    CHECK(short_run.steps.size() == 11);
    // Expansion by 3 per step eventually loses the orbit.
    const auto long_run = hsv::verify_itinerary(psi, orbit.record->points[0], w, strips(), 80);
    CHECK(long_run.verdict != hsv::ItineraryVerdict::contained);
    CHECK(long_run.step > 10);
    const auto wrong =
        hsv::verify_itinerary(psi, orbit.record->points[0], SymbolWord::parse("1", 2), strips(), 5);
    CHECK(wrong.verdict == hsv::ItineraryVerdict::escaped);
    CHECK(wrong.step == 0);
    CHECK_THROWS_AS(hsv::verify_itinerary(psi, orbit.record->points[0], w, strips(), 10, 5),
                    hsv::BudgetExceeded);
}
