#include "hsv/symbolic.hpp"

#include "hsv/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace hsv {

SymbolWord::SymbolWord(unsigned m, std::vector<unsigned> letters, bool periodic)
    : m_(m), letters_(std::move(letters)), periodic_(periodic)
{
    if (letters_.empty()) {
        throw EmptyWord("symbol word must have at least one letter");
    }
    if (m_ < 2) {
        throw ConstructionError("alphabet needs at least two symbols");
    }
    for (unsigned l : letters_) {
        if (l >= m_) {
            throw ConstructionError("letter " + std::to_string(l) + " outside alphabet of size " +
                                    std::to_string(m_));
        }
    }
}

SymbolWord SymbolWord::parse(std::string_view text, unsigned m, bool periodic)
{
    std::vector<unsigned> letters;
    for (char c : text) {
        if (c >= '0' && c <= '9') {
            letters.push_back(static_cast<unsigned>(c - '0'));
        } else if (c >= 'a' && c <= 'z') {
            letters.push_back(static_cast<unsigned>(c - 'a') + 10);
        } else {
            throw ParseError("invalid symbol '" + std::string(1, c) + "'");
        }
    }
    return {m, std::move(letters), periodic};
}

unsigned SymbolWord::at(long long i) const
{
    if (!periodic_) {
        throw ConstructionError("periodic index into a finite window");
    }
    const auto n = static_cast<long long>(letters_.size());
    return letters_[static_cast<std::size_t>(((i % n) + n) % n)];
}

std::size_t SymbolWord::primitive_period() const
{
    const std::size_t n = letters_.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p != 0) {
            continue;
        }
        bool same = true;
        for (std::size_t i = 0; i < n && same; ++i) {
            same = letters_[i] == letters_[(i + p) % n];
        }
        if (same) {
            return p;
        }
    }
    return n;
}

SymbolWord SymbolWord::canonical_rotation() const
{
    std::vector<unsigned> best = letters_;
    std::vector<unsigned> rot = letters_;
    for (std::size_t r = 1; r < letters_.size(); ++r) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) {
            best = rot;
        }
    }
    return {m_, std::move(best), periodic_};
}

std::string SymbolWord::str() const
{
    std::string s;
    for (unsigned l : letters_) {
        s.push_back(l < 10 ? static_cast<char>('0' + l) : static_cast<char>('a' + (l - 10)));
    }
    return s;
}

SymbolWord shift(const SymbolWord& w)
{
    std::vector<unsigned> l = w.letters();
    if (w.periodic()) {
        std::rotate(l.begin(), l.begin() + 1, l.end());
    } else {
        if (l.size() == 1) {
            throw EmptyWord("shift would leave an empty window");
        }
        l.erase(l.begin());
    }
    return {w.alphabet(), std::move(l), w.periodic()};
}

Interval seq_distance(const SymbolWord& s1, const SymbolWord& s2, unsigned horizon)
{
    if (s1.alphabet() != s2.alphabet()) {
        throw AlphabetMismatch("words use different alphabets");
    }
    const double m = s1.alphabet();
    Interval sum(0.0);
    Interval weight = divide(Interval(1.0), m); // m^-(|i|+1)
    for (long long i = 0; i <= static_cast<long long>(horizon); ++i) {
        const double d0 = std::abs(static_cast<double>(s1.at(i)) - static_cast<double>(s2.at(i)));
        sum = sum + scale(weight, d0);
        if (i > 0) {
            const double d1 = std::abs(static_cast<double>(s1.at(-i)) - static_cast<double>(s2.at(-i)));
            sum = sum + scale(weight, d1);
        }
        weight = divide(weight, m);
    }
    // weight now encloses m^-(horizon+2); the tail is at most 2 m^-(horizon+1).
    const Interval tail = scale(weight, 2.0 * m);
    return {sum.lo(), rounding::add_up(sum.hi(), tail.hi())};
}

std::vector<SymbolWord> enumerate_periodic_words(unsigned m, unsigned k, bool up_to_rotation, std::size_t cap)
{
    if (m < 2 || k < 1) {
        throw ConstructionError("word enumeration needs m >= 2 and k >= 1");
    }
    std::size_t total = 1;
    for (unsigned i = 0; i < k; ++i) {
        if (total > cap / m) {
            throw BudgetExceeded("m^k exceeds the enumeration cap");
        }
        total *= m;
    }
    std::vector<SymbolWord> out;
    std::vector<unsigned> w(k, 0);
    for (std::size_t n = 0; n < total; ++n) {
        SymbolWord word(m, w);
        if (!up_to_rotation || word.canonical_rotation() == word) {
            out.push_back(std::move(word));
        }
        for (std::size_t i = k; i-- > 0;) {
            if (++w[i] < m) {
                break;
            }
            w[i] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<Box> try_eval(const MapSpec& f, const Box& b)
{
    try {
        return f.eval(b);
    } catch (const DomainError&) {
    } catch (const StripStraddle&) {
    }
    return std::nullopt;
}

// Forward images grow with the expansion rate. The orbit point z_j is a fixed
// point of the branch composition rotated to start at j, so a zero search
// inside the image that returns a single enclosure and exhausts the box
// holds z_j.
Box tighten(const std::vector<MapSpec>& branches, std::size_t j, const Box& e, const OrbitOptions& opt)
{
    std::vector<MapSpec> rotated(branches.begin() + static_cast<std::ptrdiff_t>(j), branches.end());
    rotated.insert(rotated.end(), branches.begin(), branches.begin() + static_cast<std::ptrdiff_t>(j));
    ZeroSearchOptions zo;
    zo.tol = opt.tol;
    zo.max_boxes = opt.max_boxes;
    zo.miranda = opt.miranda;
    const auto r = find_zeros(MapSpec::residual(MapSpec::compose(rotated)), e, zo);
    if (r.budget_exceeded || r.zeros.size() != 1) {
        return e;
    }
    return intersection(e, r.zeros.front().box).value_or(e);
}

} // namespace

OrbitResult find_periodic_orbit(const MapSpec& psi, const std::vector<Box>& ks, const SymbolWord& word,
                                const OrbitOptions& opt)
{
    if (word.alphabet() != ks.size()) {
        throw AlphabetMismatch("word alphabet size differs from the number of sets");
    }
    if (!(opt.tol > 0.0)) {
        throw ConstructionError("tolerance must be positive");
    }
    const std::size_t k = word.size();
    const auto& w = word.letters();
    std::vector<MapSpec> branches;
    branches.reserve(k);
    for (unsigned l : w) {
        if (ks[l].dims() != psi.dims_in()) {
            throw DimMismatch("set dimension differs from the map");
        }
        branches.push_back(psi.branch_for(ks[l]));
    }
    const MapSpec g = MapSpec::compose(branches);

    // A box survives when its clipped forward images can follow the word and
    // return to the box.
    auto survives = [&](const Box& b) {
        Box img = b;
        for (std::size_t j = 0; j < k; ++j) {
            const auto next = try_eval(branches[j], img);
            if (!next) {
                return true;
            }
            const Box& target = j + 1 < k ? ks[w[j + 1]] : b;
            const auto clipped = intersection(*next, target);
            if (!clipped) {
                return false;
            }
            img = *clipped;
        }
        return true;
    };

    OrbitResult res;
    std::vector<Box> work{ks[w[0]]};
    std::vector<Box> leaves;
    while (!work.empty()) {
        if (work.size() + leaves.size() > opt.max_boxes) {
            res.reason = "box budget exhausted";
            return res;
        }
        Box b = std::move(work.back());
        work.pop_back();
        ++res.boxes_processed;
        if (!survives(b)) {
            continue;
        }
        if (b.width() <= opt.tol / 2.0 || !b.can_bisect()) {
            leaves.push_back(std::move(b));
            continue;
        }
        auto [lo, hi] = b.bisect();
        work.push_back(std::move(hi));
        work.push_back(std::move(lo));
    }
    if (leaves.empty()) {
        res.reason = "every box was pruned";
        return res;
    }

    // Touching leaves are merged; the first cluster that certifies wins.
    std::vector<Box> hulls;
    for (const auto& leaf : leaves) {
        bool merged = false;
        for (auto& h : hulls) {
            if (h.intersects(leaf)) {
                h = hull(h, leaf);
                merged = true;
                break;
            }
        }
        if (!merged) {
            hulls.push_back(leaf);
        }
    }
    const MapSpec residual = MapSpec::residual(g);
    for (const auto& h : hulls) {
        const auto m = check_miranda(residual, h, opt.miranda);
        if (!m) {
            res.reason = "Miranda check failed: " + m.reason;
            continue;
        }
        OrbitRecord rec{word, {}, *m.certificate, {}};
        Box e = h;
        bool ok = true;
        for (std::size_t j = 0; j < k && ok; ++j) {
            if (j > 0) {
                e = tighten(branches, j, e, opt);
            }
            const bool in = ks[w[j]].contains(e);
            rec.points.push_back(e);
            rec.itinerary.push_back({e, in});
            ok = in;
            if (ok) {
                const auto next = try_eval(psi, e);
                if (!next) {
                    ok = false;
                    break;
                }
                e = *next;
            }
        }
        if (!ok) {
            res.reason = "orbit enclosure left its itinerary sets";
            continue;
        }
        rec.itinerary.push_back({e, ks[w[0]].contains(e)});
        res.status = Verdict::Certified;
        res.record = std::move(rec);
        res.reason.clear();
        return res;
    }
    return res;
}

// ---------------------------------------------------------------------------

namespace {

StretchCertificate stretch_for(const MapSpec& psi, const OrientedRect& x, const OrientedRect& k,
                               std::size_t i)
{
    StretchCertificate c;
    try {
        c = check_boundary_stretching(psi, x, x, k);
    } catch (const NotASlab& e) {
        throw PrerequisiteFailed("K_" + std::to_string(i) + ": " + e.what());
    }
    if (c.status == Verdict::Certified || !psi.phase_form(x.axis())) {
        return c;
    }
    // Phase sweep on the expansion component plus containment of the rest.
    StretchCertificate p = check_phase_covering(psi, k, x.expansion_interval(), x.axis());
    if (p.status != Verdict::Certified) {
        return c;
    }
    const auto img = try_eval(psi, k.body());
    for (std::size_t j = 0; img && j < x.dims(); ++j) {
        if (j != x.axis() && !x.body()[j].contains((*img)[j])) {
            return c;
        }
    }
    if (!img) {
        return c;
    }
    p.target = x;
    p.evidence.push_back({"psi(K)", *img});
    return p;
}

} // namespace

ChaosReport chaos_report(const MapSpec& psi, const OrientedRect& x, const std::vector<OrientedRect>& ks,
                         const ChaosOptions& opt)
{
    if (ks.size() < 2) {
        throw PrerequisiteFailed("chaotic dynamics needs at least two sets (m >= 2)");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        for (std::size_t j = i + 1; j < ks.size(); ++j) {
            if (ks[i].body().intersects(ks[j].body())) {
                throw NotDisjoint("K_" + std::to_string(i) + " and K_" + std::to_string(j) + " intersect");
            }
        }
    }
    ChaosReport rep;
    rep.symbols = ks.size();
    for (std::size_t i = 0; i < ks.size(); ++i) {
        auto c = stretch_for(psi, x, ks[i], i);
        if (c.status != Verdict::Certified) {
            throw PrerequisiteFailed("K_" + std::to_string(i) +
                                     " does not stretch X across itself: " + c.clause);
        }
        rep.stretching.push_back(std::move(c));
    }
    const auto m = static_cast<unsigned>(ks.size());
    std::vector<Box> bodies;
    for (const auto& k : ks) {
        bodies.push_back(k.body());
    }

    for (unsigned k = 1; k <= opt.max_period; ++k) {
        for (auto& w : enumerate_periodic_words(m, k, true)) {
            rep.words.push_back({std::move(w), {}});
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rep.words.size(); i = next++) {
            rep.words[i].orbit = find_periodic_orbit(psi, bodies, rep.words[i].word, opt.orbit);
        }
    };
    const unsigned n_workers =
        std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(rep.words.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_workers; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    bool all = true;
    for (unsigned k = 1; k <= opt.max_period; ++k) {
        PeriodSummary s;
        s.period = k;
        s.itineraries_expected = 1;
        for (unsigned i = 0; i < k; ++i) {
            s.itineraries_expected *= m;
        }
        for (const auto& wr : rep.words) {
            if (wr.word.size() != k) {
                continue;
            }
            ++s.necklaces;
            if (wr.orbit.status == Verdict::Certified) {
                ++s.necklaces_certified;
                s.itineraries_certified += wr.word.primitive_period();
            } else {
                all = false;
            }
        }
        rep.periods.push_back(s);
    }

    // Orbits of words with different primitive roots are distinct, so their
    // enclosures must not meet.
    auto root = [](const SymbolWord& w) {
        const std::vector<unsigned> l(
            w.letters().begin(), w.letters().begin() + static_cast<std::ptrdiff_t>(w.primitive_period()));
        return SymbolWord(w.alphabet(), l).canonical_rotation();
    };
    for (std::size_t a = 0; a < rep.words.size() && rep.orbits_disjoint; ++a) {
        const auto& ra = rep.words[a].orbit.record;
        if (!ra) {
            continue;
        }
        const SymbolWord root_a = root(rep.words[a].word);
        for (std::size_t b = a + 1; b < rep.words.size() && rep.orbits_disjoint; ++b) {
            const auto& rb = rep.words[b].orbit.record;
            if (!rb || root(rep.words[b].word) == root_a) {
                continue;
            }
            for (const auto& p : ra->points) {
                for (const auto& q : rb->points) {
                    if (p.intersects(q)) {
                        rep.orbits_disjoint = false;
                        rep.disjointness_detail = "orbits of " + rep.words[a].word.str() + " and " +
                                                  rep.words[b].word.str() + " overlap";
                    }
                }
            }
        }
    }
    rep.entropy_expression = "log(" + std::to_string(m) + ")";
    rep.entropy = log_interval(m);
    rep.status = all && rep.orbits_disjoint ? Verdict::Certified : Verdict::Inconclusive;
    return rep;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ItineraryVerdict v)
{
    switch (v) {
    case ItineraryVerdict::contained:
        return "Contained";
    case ItineraryVerdict::escaped:
        return "Escaped";
    case ItineraryVerdict::inflated:
        return "Inflated";
    }
    return "?";
}

ItineraryResult verify_itinerary(const MapSpec& psi, const Box& p, const SymbolWord& word,
                                 const std::vector<Box>& ks, std::size_t steps, std::size_t cap)
{
    if (word.alphabet() != ks.size()) {
        throw AlphabetMismatch("word alphabet size differs from the number of sets");
    }
    if (steps > cap) {
        throw BudgetExceeded("itinerary steps exceed the cap");
    }
    ItineraryResult res;
    // Expansion estimate: largest per-axis width ratio of psi over the sets.
    for (unsigned l : word.letters()) {
        const auto img = try_eval(psi, ks[l]);
        if (!img) {
            continue;
        }
        for (std::size_t i = 0; i < img->dims(); ++i) {
            const double w = ks[l][i].width();
            if (w > 0.0) {
                res.expansion = std::max(res.expansion, (*img)[i].width() / w);
            }
        }
    }
    double scale0 = p.width();
    for (const auto& c : p) {
        scale0 = std::max(scale0, 0x1.0p-52 * std::max(1.0, std::max(std::fabs(c.lo()), std::fabs(c.hi()))));
    }
    Box e = p;
    double threshold = 10.0 * scale0;
    for (std::size_t j = 0; j <= steps; ++j) {
        const Box& k = ks[word.at(static_cast<long long>(j))];
        const bool in = k.contains(e);
        res.steps.push_back({e, in});
        if (e.width() > threshold || !in) {
            res.verdict = e.width() > threshold ? ItineraryVerdict::inflated : ItineraryVerdict::escaped;
            res.step = j;
            return res;
        }
        if (j == steps) {
            break;
        }
        const auto next = try_eval(psi, e);
        if (!next) {
            res.verdict = ItineraryVerdict::escaped;
            res.step = j + 1;
            return res;
        }
        e = *next;
        threshold *= res.expansion;
    }
    return res;
}

} // namespace hsv
