#include "hsv/cli.hpp"

#include "hsv/config.hpp"
#include "hsv/covering.hpp"
#include "hsv/cutting.hpp"
#include "hsv/decimal.hpp"
#include "hsv/errors.hpp"
#include "hsv/miranda.hpp"
#include "hsv/symbolic.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace hsv {

namespace {

using nlohmann::json;

json interval_json(const Interval& v)
{
    return json::array({to_decimal(v.lo(), RoundDir::down), to_decimal(v.hi(), RoundDir::up)});
}

json box_json(const Box& b)
{
    json out = json::array();
    for (const auto& c : b) {
        out.push_back(interval_json(c));
    }
    return out;
}

json exact_json(double v)
{
    return to_decimal(v, RoundDir::nearest);
}

json rect_json(const OrientedRect& r)
{
    return {{"box", box_json(r.body())}, {"axis", r.axis()}, {"flipped", r.flipped()}};
}

json miranda_json(const MirandaCertificate& c)
{
    json out;
    out["box"] = box_json(c.box);
    json pattern = json::array();
    for (auto p : c.pattern) {
        pattern.push_back(std::string(to_string(p)));
    }
    out["pattern"] = pattern;
    json faces = json::array();
    for (const auto& f : c.faces) {
        faces.push_back({{"axis", f.axis},
                         {"side", f.side == Side::left ? "left" : "right"},
                         {"value", interval_json(f.value)},
                         {"strict", f.strict},
                         {"pieces", f.pieces}});
    }
    out["faces"] = faces;
    if (c.preconditioner) {
        json rows = json::array();
        for (const auto& row : *c.preconditioner) {
            json r = json::array();
            for (double v : row) {
                r.push_back(exact_json(v));
            }
            rows.push_back(r);
        }
        out["preconditioner"] = rows;
    }
    if (c.determinant) {
        out["determinant"] = interval_json(*c.determinant);
    }
    return out;
}

json stretch_json(const StretchCertificate& s)
{
    json out;
    out["method"] = std::string(to_string(s.method));
    out["status"] = std::string(to_string(s.status));
    out["clause"] = s.clause;
    out["swapped"] = s.swapped;
    out["k"] = box_json(s.k);
    if (s.source) {
        out["source"] = rect_json(*s.source);
    }
    if (s.target) {
        out["target"] = rect_json(*s.target);
    }
    json ev = json::array();
    for (const auto& e : s.evidence) {
        ev.push_back({{"label", e.label}, {"value", box_json(e.value)}});
    }
    out["evidence"] = ev;
    return out;
}

json zeros_json(const ZeroSearchResult& r)
{
    json zs = json::array();
    for (const auto& z : r.zeros) {
        json j{{"box", box_json(z.box)},
               {"status", std::string(to_string(z.status))},
               {"non_isolated", z.non_isolated}};
        if (z.certificate) {
            j["certificate"] = miranda_json(*z.certificate);
        }
        zs.push_back(j);
    }
    return {{"zeros", zs},
            {"budget_exceeded", r.budget_exceeded},
            {"unresolved", r.unresolved.size()},
            {"boxes_processed", r.boxes_processed}};
}

json orbit_json(const OrbitResult& r)
{
    json out{{"status", std::string(to_string(r.status))},
             {"reason", r.reason},
             {"boxes_processed", r.boxes_processed}};
    if (r.record) {
        json pts = json::array();
        for (const auto& p : r.record->points) {
            pts.push_back(box_json(p));
        }
        out["points"] = pts;
        json steps = json::array();
        for (const auto& s : r.record->itinerary) {
            steps.push_back({{"enclosure", box_json(s.enclosure)}, {"contained", s.contained}});
        }
        out["itinerary"] = steps;
        out["certificate"] = miranda_json(r.record->certificate);
    }
    return out;
}

struct Check {
    std::string name;
    std::string kind;
    std::string status;
    json detail = json::object();
    std::vector<std::pair<std::string, Box>> enclosures;
};

struct Context {
    const Config& cfg;
    const RunOptions& opt;
    std::filesystem::path base_dir;
    std::optional<MapSpec> psi;
    std::map<std::string, OrientedRect> rects;
    std::vector<Check> checks;
    json extra = json::object();
    json effective = json::object();
};

// Option precedence: command line (or HSV_* environment), then [job], then default.

double tol_option(Context& c, double fallback)
{
    // The config value is validated even when a flag overrides it.
    double v = fallback;
    if (auto t = c.cfg.real("job", "tol")) {
        if (!(*t > 0.0)) {
            c.cfg.fail(*c.cfg.entry("job", "tol"), "must be > 0");
        }
        v = *t;
    }
    if (c.opt.tol) {
        v = *c.opt.tol;
        if (!(v > 0.0)) {
            throw ParseError("--tol: must be > 0");
        }
    }
    c.effective["tol"] = exact_json(v);
    return v;
}

std::uint64_t count_option(Context& c, const char* flag, const char* key, std::optional<std::uint64_t> cli,
                           std::uint64_t fallback)
{
    std::uint64_t v = fallback;
    if (auto t = c.cfg.integer("job", key)) {
        if (*t < 1) {
            c.cfg.fail(*c.cfg.entry("job", key), "must be >= 1");
        }
        v = *t;
    }
    if (cli) {
        v = *cli;
        if (v < 1) {
            throw ParseError(std::string("--") + flag + ": must be >= 1");
        }
    }
    c.effective[key] = v;
    return v;
}

std::uint64_t budget_option(Context& c, std::uint64_t fallback)
{
    return count_option(c, "budget", "budget", c.opt.budget, fallback);
}

std::uint64_t max_period_option(Context& c)
{
    return count_option(c, "max-period", "max_period", c.opt.max_period, 6);
}

std::uint64_t seed_option(Context& c)
{
    std::uint64_t v = c.cfg.integer("job", "seed").value_or(1);
    if (c.opt.seed) {
        v = *c.opt.seed;
    }
    c.effective["seed"] = v;
    return v;
}

unsigned workers_option(Context& c)
{
    std::uint64_t v = c.cfg.integer("job", "workers").value_or(0);
    if (c.opt.workers) {
        v = *c.opt.workers;
    }
    if (v == 0) {
        v = std::max(1U, std::thread::hardware_concurrency());
    }
    // Not echoed: the worker count never changes results.
    return static_cast<unsigned>(std::min<std::uint64_t>(v, 256));
}

std::size_t index_value(const Config& cfg, std::string_view section, std::string_view key,
                        std::size_t fallback)
{
    if (auto v = cfg.integer(section, key)) {
        return static_cast<std::size_t>(*v);
    }
    return fallback;
}

std::vector<double> real_list(const Config& cfg, const ConfigEntry& e, std::string_view text)
{
    std::vector<double> out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        try {
            out.push_back(parse_real_literal(tok));
        } catch (const ParseError& err) {
            cfg.fail(e, err.what());
        }
    }
    return out;
}

MapSpec build_map(Context& c)
{
    const Config& cfg = c.cfg;
    const std::string kind = cfg.text_value("map", "kind");
    const ConfigEntry& kind_entry = *cfg.entry("map", "kind");
    bool strict = cfg.boolean("map", "strict_strips").value_or(true);
    if (c.opt.strict_strips) {
        strict = *c.opt.strict_strips;
    }
    c.effective["strict_strips"] = strict;

    auto dims_value = [&](std::size_t fallback) {
        const auto d = index_value(cfg, "map", "dims", fallback);
        if (d < 1 || d > 16) {
            cfg.fail(*cfg.entry("map", "dims"), "must be between 1 and 16");
        }
        return d;
    };

    if (kind == "horseshoe") {
        return MapSpec::affine_horseshoe(dims_value(2), strict);
    }
    if (kind == "identity") {
        return MapSpec::identity(dims_value(2));
    }
    if (kind == "trig") {
        TrigParams p;
        p.c = cfg.real("map", "c").value_or(p.c);
        p.d = cfg.real("map", "d").value_or(p.d);
        p.k = cfg.real("map", "k").value_or(p.k);
        p.l = cfg.real("map", "l").value_or(p.l);
        p.m = cfg.real("map", "m").value_or(p.m);
        const bool validate = cfg.boolean("map", "validate").value_or(true);
        if (validate) {
            if (auto why = trig_params_violation(p); !why.empty()) {
                cfg.fail("map", "trig parameters violate " + why);
            }
        }
        return MapSpec::trig_example(p, validate);
    }
    if (kind == "affine") {
        const auto& me = *cfg.entry("map", "matrix");
        std::vector<std::vector<double>> a;
        std::string_view rest = cfg.text_value("map", "matrix");
        std::string rows(rest);
        std::size_t start = 0;
        while (start <= rows.size()) {
            const auto semi = rows.find(';', start);
            const auto part =
                rows.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
            a.push_back(real_list(cfg, me, part));
            if (a.back().empty()) {
                cfg.fail(me, "empty matrix row");
            }
            if (semi == std::string::npos) {
                break;
            }
            start = semi + 1;
        }
        std::vector<double> b(a.size(), 0.0);
        if (const auto* oe = cfg.entry("map", "offset")) {
            b = real_list(cfg, *oe, oe->value);
            if (b.size() != a.size()) {
                cfg.fail(*oe, "offset needs one entry per matrix row");
            }
        }
        for (const auto& row : a) {
            if (row.size() != a.front().size()) {
                cfg.fail(me, "matrix rows differ in length");
            }
        }
        return MapSpec::affine(std::move(a), std::move(b));
    }
    if (kind == "expression") {
        ParseContext pc;
        pc.variables = cfg.list("map", "variables");
        if (pc.variables.empty()) {
            cfg.fail("map", "expression maps need 'variables'");
        }
        if (const auto* consts = cfg.section("constants")) {
            for (const auto& e : consts->entries) {
                e.used = true;
                try {
                    pc.constants.emplace(e.key, parse_number(e.value));
                } catch (const ParseError& err) {
                    cfg.fail(e, err.what());
                }
            }
        }
        std::vector<Expr> comps;
        for (std::size_t i = 0;; ++i) {
            const std::string key = "f" + std::to_string(i);
            const auto* e = cfg.entry("map", key);
            if (!e) {
                break;
            }
            try {
                comps.push_back(parse_expression(e->value, pc));
            } catch (const ParseError& err) {
                cfg.fail(*e, err.what());
            }
        }
        if (comps.empty()) {
            cfg.fail("map", "expression maps need components f0, f1, ...");
        }
        return MapSpec::expression(std::move(comps), pc.variables);
    }
    cfg.fail(kind_entry, "unknown map kind '" + kind + "' (horseshoe, trig, affine, identity, expression)");
}

const MapSpec& map_of(Context& c)
{
    if (!c.psi) {
        c.psi = build_map(c);
        c.extra["map"] = c.psi->describe();
    }
    return *c.psi;
}

OrientedRect rect_named(Context& c, const ConfigEntry& ref, const std::string& name)
{
    if (auto it = c.rects.find(name); it != c.rects.end()) {
        return it->second;
    }
    const std::string sec = "rect." + name;
    if (!c.cfg.section(sec)) {
        c.cfg.fail(ref, "no section [" + sec + "]");
    }
    const auto body = c.cfg.box(sec, "box");
    if (!body) {
        c.cfg.fail(sec, "missing required key 'box'");
    }
    const auto axis = index_value(c.cfg, sec, "axis", 0);
    const bool flipped = c.cfg.boolean(sec, "flipped").value_or(false);
    try {
        OrientedRect r(*body, axis, flipped);
        if (c.psi && r.dims() != c.psi->dims_in()) {
            c.cfg.fail(*c.cfg.entry(sec, "box"), "has " + std::to_string(r.dims()) +
                                                     " dimensions, the map takes " +
                                                     std::to_string(c.psi->dims_in()));
        }
        c.rects.emplace(name, r);
        return r;
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        c.cfg.fail(*c.cfg.entry(sec, "box"), e.what());
    }
}

OrientedRect rect_ref(Context& c, std::string_view section, std::string_view key)
{
    const auto name = c.cfg.text_value(section, key);
    return rect_named(c, *c.cfg.entry(section, key), name);
}

std::optional<OrientedRect> rect_ref_opt(Context& c, std::string_view section, std::string_view key)
{
    if (!c.cfg.has(section, key)) {
        return std::nullopt;
    }
    return rect_ref(c, section, key);
}

std::vector<OrientedRect> rect_list(Context& c, std::string_view section, std::string_view key)
{
    std::vector<OrientedRect> out;
    for (const auto& name : c.cfg.list(section, key)) {
        out.push_back(rect_named(c, *c.cfg.entry(section, key), name));
    }
    if (out.empty()) {
        c.cfg.fail(section, "missing required key '" + std::string(key) + "'");
    }
    return out;
}

void add_stretch(Context& c, const std::string& name, const StretchCertificate& s)
{
    Check ch{name, "stretching", std::string(to_string(s.status)), stretch_json(s), {}};
    for (const auto& e : s.evidence) {
        ch.enclosures.emplace_back(e.label, e.value);
    }
    c.checks.push_back(std::move(ch));
}

// Runs `body`; hsv errors other than parse errors are reported against the section.
template <class F> void in_section(const Context& c, std::string_view section, F body)
{
    try {
        body();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        c.cfg.fail(section, e.what());
    }
}

void verify_covering(Context& c)
{
    const auto secs = c.cfg.sections_with_prefix("check");
    if (secs.empty()) {
        throw ParseError(c.cfg.source() + ": verify-covering needs at least one [check.NAME] section");
    }
    const MapSpec& psi = map_of(c);
    std::optional<std::uint64_t> seed;
    for (const auto* s : secs) {
        const std::string& sec = s->name;
        const std::string method = c.cfg.text_value(sec, "method");
        in_section(c, sec, [&] {
            if (method == "face") {
                const auto r1 = rect_ref(c, sec, "r1");
                const auto r2 = rect_ref(c, sec, "r2");
                std::vector<std::size_t> dirs;
                for (const auto& t : c.cfg.list(sec, "directions")) {
                    try {
                        dirs.push_back(static_cast<std::size_t>(std::stoul(t)));
                    } catch (const std::exception&) {
                        c.cfg.fail(*c.cfg.entry(sec, "directions"), "expected axis indices, got '" + t + "'");
                    }
                }
                add_stretch(c, sec, check_face_covering(psi, r1.body(), r2.body(), dirs));
            } else if (method == "boundary") {
                const auto x = rect_ref(c, sec, "source");
                const auto y = rect_ref(c, sec, "target");
                const auto k = rect_ref_opt(c, sec, "k");
                add_stretch(c, sec, check_boundary_stretching(psi, x, y, k));
            } else if (method == "phase") {
                const auto x = rect_ref(c, sec, "source");
                const auto component = index_value(c.cfg, sec, "component", 0);
                const auto target = c.cfg.interval(sec, "interval").value_or(Interval(0.0, 1.0));
                add_stretch(c, sec, check_phase_covering(psi, x, target, component));
            } else if (method == "sampled") {
                const auto x = rect_ref(c, sec, "source");
                const auto y = rect_ref(c, sec, "target");
                SamplingOptions so;
                so.n_paths = index_value(c.cfg, sec, "paths", so.n_paths);
                so.n_samples = index_value(c.cfg, sec, "samples", so.n_samples);
                if (!seed) {
                    seed = seed_option(c);
                }
                so.seed = *seed;
                const auto r = falsify_by_sampling(psi, x, y, so);
                Check ch{
                    sec, "sampling", r.counterexample ? "Falsified" : "Inconclusive", json::object(), {}};
                ch.detail["counterexample"] = r.counterexample;
                ch.detail["paths_checked"] = r.paths_checked;
                if (r.counterexample) {
                    ch.detail["path_index"] = r.path_index;
                    json pts = json::array();
                    for (const auto& p : r.path) {
                        json q = json::array();
                        for (double v : p) {
                            q.push_back(exact_json(v));
                        }
                        pts.push_back(q);
                    }
                    ch.detail["path"] = pts;
                }
                c.checks.push_back(std::move(ch));
            } else {
                c.cfg.fail(*c.cfg.entry(sec, "method"),
                           "unknown method '" + method + "' (face, boundary, phase, sampled)");
            }
        });
    }
}

ZeroSearchOptions zero_options(Context& c)
{
    ZeroSearchOptions zo;
    zo.tol = tol_option(c, zo.tol);
    zo.max_boxes = budget_option(c, zo.max_boxes);
    return zo;
}

Check fixed_point_check(const std::string& name, const ZeroSearchResult& r, bool need_one)
{
    std::size_t certified = 0;
    bool clean = !r.budget_exceeded;
    for (const auto& z : r.zeros) {
        if (z.status == ZeroStatus::certified) {
            ++certified;
        } else {
            clean = false;
        }
    }
    const bool ok = need_one ? certified > 0 : clean;
    Check ch{name, "fixed-points", ok ? "Certified" : "Inconclusive", zeros_json(r), {}};
    ch.detail["certified"] = certified;
    for (std::size_t i = 0; i < r.zeros.size(); ++i) {
        ch.enclosures.emplace_back("zero " + std::to_string(i), r.zeros[i].box);
    }
    return ch;
}

void fixed_points(Context& c)
{
    const MapSpec& psi = map_of(c);
    const auto zo = zero_options(c);
    const auto crossings = c.cfg.sections_with_prefix("crossing");
    const auto boxes = c.cfg.list("job", "boxes");
    if (boxes.empty() && crossings.empty()) {
        throw ParseError(c.cfg.source() + ": fixed-points needs [job] boxes or [crossing.NAME] sections");
    }
    for (const auto& name : boxes) {
        const auto r = rect_named(c, *c.cfg.entry("job", "boxes"), name);
        c.checks.push_back(fixed_point_check(name, find_fixed_points(psi, r.body(), zo), false));
    }
    for (const auto* s : crossings) {
        const std::string& sec = s->name;
        in_section(c, sec, [&] {
            const auto a = rect_ref(c, sec, "a");
            const auto b = rect_ref(c, sec, "b");
            const auto e = rect_ref(c, sec, "e");
            const auto k = rect_ref(c, sec, "k");
            add_stretch(c, sec + "/stretching", check_boundary_stretching(psi, a, b, k));

            const auto cross = check_crossing(e, a, b);
            Check ch{sec + "/crossing", "crossing", std::string(to_string(cross.status)), json::object(), {}};
            ch.detail["clause"] = cross.failing_clause;
            ch.detail["swapped"] = cross.swapped;
            ch.detail["e"] = rect_json(e);
            c.checks.push_back(std::move(ch));

            const auto region = intersection(k.body(), e.body());
            if (!region) {
                Check none{sec + "/fixed-point", "fixed-points", "Inconclusive", json::object(), {}};
                none.detail["reason"] = "K and E do not meet";
                c.checks.push_back(std::move(none));
                return;
            }
            auto fp = fixed_point_check(sec + "/fixed-point", find_fixed_points(psi, *region, zo), true);
            fp.detail["region"] = box_json(*region);
            c.checks.push_back(std::move(fp));
        });
    }
}

OrbitOptions orbit_options(Context& c)
{
    OrbitOptions oo;
    oo.tol = tol_option(c, oo.tol);
    oo.max_boxes = budget_option(c, oo.max_boxes);
    return oo;
}

void periodic_orbits(Context& c)
{
    const MapSpec& psi = map_of(c);
    const auto ks = rect_list(c, "job", "ks");
    std::vector<Box> bodies;
    for (const auto& k : ks) {
        bodies.push_back(k.body());
    }
    const auto m = static_cast<unsigned>(ks.size());
    const auto oo = orbit_options(c);
    std::vector<SymbolWord> words;
    if (const auto* we = c.cfg.entry("job", "words")) {
        for (const auto& t : c.cfg.list("job", "words")) {
            try {
                words.push_back(SymbolWord::parse(t, m));
            } catch (const Error& e) {
                c.cfg.fail(*we, e.what());
            }
        }
    } else {
        const auto maxp = max_period_option(c);
        for (unsigned p = 1; p <= maxp; ++p) {
            for (auto& w : enumerate_periodic_words(m, p, true)) {
                words.push_back(std::move(w));
            }
        }
    }
    if (m < 2 && words.empty()) {
        c.cfg.fail("job", "no words to search");
    }
    for (const auto& w : words) {
        const auto r = find_periodic_orbit(psi, bodies, w, oo);
        Check ch{"word " + w.str(), "periodic-orbit", std::string(to_string(r.status)), orbit_json(r), {}};
        ch.detail["word"] = w.str();
        if (r.record) {
            for (std::size_t i = 0; i < r.record->points.size(); ++i) {
                ch.enclosures.emplace_back("z" + std::to_string(i), r.record->points[i]);
            }
        }
        c.checks.push_back(std::move(ch));
    }
}

void chaos(Context& c)
{
    const MapSpec& psi = map_of(c);
    const auto x = rect_ref(c, "job", "x");
    const auto ks = rect_list(c, "job", "ks");
    ChaosOptions co;
    co.max_period = static_cast<unsigned>(max_period_option(c));
    co.workers = workers_option(c);
    co.orbit = orbit_options(c);
    ChaosReport rep;
    try {
        rep = chaos_report(psi, x, ks, co);
    } catch (const PrerequisiteFailed& e) {
        Check ch{"prerequisites", "chaos", "Inconclusive", json::object(), {}};
        ch.detail["reason"] = e.what();
        c.checks.push_back(std::move(ch));
        return;
    } catch (const NotDisjoint& e) {
        c.cfg.fail(*c.cfg.entry("job", "ks"), e.what());
    }
    for (std::size_t i = 0; i < rep.stretching.size(); ++i) {
        add_stretch(c, "stretching K" + std::to_string(i), rep.stretching[i]);
    }
    for (const auto& w : rep.words) {
        Check ch{"word " + w.word.str(),
                 "periodic-orbit",
                 std::string(to_string(w.orbit.status)),
                 orbit_json(w.orbit),
                 {}};
        ch.detail["word"] = w.word.str();
        if (w.orbit.record) {
            for (std::size_t i = 0; i < w.orbit.record->points.size(); ++i) {
                ch.enclosures.emplace_back("z" + std::to_string(i), w.orbit.record->points[i]);
            }
        }
        c.checks.push_back(std::move(ch));
    }
    Check dis{"disjointness",
              "disjointness",
              rep.orbits_disjoint ? "Certified" : "Inconclusive",
              json::object(),
              {}};
    dis.detail["detail"] = rep.disjointness_detail;
    c.checks.push_back(std::move(dis));

    json periods = json::array();
    for (const auto& p : rep.periods) {
        periods.push_back({{"period", p.period},
                           {"necklaces", p.necklaces},
                           {"necklaces_certified", p.necklaces_certified},
                           {"itineraries_certified", p.itineraries_certified},
                           {"itineraries_expected", p.itineraries_expected}});
    }
    c.extra["chaos"] = {{"symbols", rep.symbols},
                        {"periods", periods},
                        {"orbits_disjoint", rep.orbits_disjoint},
                        {"entropy_bound",
                         {{"expression", rep.entropy_expression}, {"enclosure", interval_json(rep.entropy)}}},
                        {"status", std::string(to_string(rep.status))}};
}

void branch_track(Context& c)
{
    const MapSpec& f = map_of(c);
    if (f.dims_out() + 1 != f.dims_in()) {
        c.cfg.fail("map", "branch-track needs a map from N to N-1 dimensions");
    }
    const auto search = rect_ref(c, "job", "search");
    const auto lambda = index_value(c.cfg, "job", "lambda_axis", f.dims_in() - 1);
    BranchOptions bo;
    if (auto cell = c.cfg.real("job", "cell")) {
        if (!(*cell > 0.0)) {
            c.cfg.fail(*c.cfg.entry("job", "cell"), "must be > 0");
        }
        bo.cell = *cell;
    }
    if (c.opt.tol || c.cfg.has("job", "tol")) {
        bo.tol = tol_option(c, bo.tol);
    }
    bo.max_cells = budget_option(c, bo.max_cells);
    c.effective["cell"] = exact_json(bo.cell);
    c.effective["lambda_axis"] = lambda;
    Check ch{"branch", "branch", "Inconclusive", json::object(), {}};
    try {
        const auto r = track_zero_branch(f, search.body(), lambda, bo);
        ch.status = std::string(to_string(r.status));
        ch.detail["reason"] = r.reason;
        ch.detail["cells_total"] = r.cells_total;
        ch.detail["cells_kept"] = r.cells_kept;
        json pattern = json::array();
        for (auto p : r.pattern) {
            pattern.push_back(std::string(to_string(p)));
        }
        ch.detail["pattern"] = pattern;
        if (r.chain) {
            json boxes = json::array();
            for (std::size_t i = 0; i < r.chain->boxes.size(); ++i) {
                boxes.push_back(box_json(r.chain->boxes[i]));
                ch.enclosures.emplace_back("cell " + std::to_string(i), r.chain->boxes[i]);
            }
            json adj = json::array();
            for (const auto& a : r.chain->adjacency) {
                adj.push_back({{"axis", a.axis}, {"at", exact_json(a.at)}});
            }
            ch.detail["chain"] = {{"boxes", boxes},
                                  {"adjacency", adj},
                                  {"touches_lo", r.chain->touches_lo},
                                  {"touches_hi", r.chain->touches_hi}};
        }
    } catch (const HypothesisFailed& e) {
        ch.detail["reason"] = e.what();
    }
    c.checks.push_back(std::move(ch));
}

json cells_json(const GridSpace& x, const std::vector<Cell>& cells)
{
    json out = json::array();
    for (Cell cell : cells) {
        out.push_back(x.coords(cell));
    }
    return out;
}

void cutting_lab(Context& c)
{
    const auto grid_name = c.cfg.text_value("job", "grid");
    std::filesystem::path grid_path(grid_name);
    if (grid_path.is_relative()) {
        grid_path = c.base_dir / grid_path;
    }
    if (!std::filesystem::exists(grid_path)) {
        c.cfg.fail(*c.cfg.entry("job", "grid"), "grid file '" + grid_path.string() + "' does not exist");
    }
    GridFixture fx = [&] {
        try {
            return load_grid(grid_path.string());
        } catch (const Error& e) {
            c.cfg.fail(*c.cfg.entry("job", "grid"), e.what());
        }
    }();
    const GridSpace& x = fx.space;
    auto letter_set = [&](const char* key, bool required) -> std::optional<GridSet> {
        const auto v = c.cfg.text_value_opt("job", key);
        if (!v) {
            if (required) {
                c.cfg.fail("job", std::string("missing required key '") + key + "'");
            }
            return std::nullopt;
        }
        if (v->size() != 1) {
            c.cfg.fail(*c.cfg.entry("job", key), "expected a single tag letter");
        }
        const auto it = fx.sets.find((*v)[0]);
        if (it == fx.sets.end()) {
            return GridSet(x, {});
        }
        return it->second;
    };
    const GridSet a = *letter_set("a", true);
    const GridSet b = *letter_set("b", true);
    const GridSet cut = letter_set("c", false).value_or(GridSet(x, {}));
    const auto gamma = letter_set("gamma", false);
    const auto radius = index_value(c.cfg, "job", "radius", 1);
    const auto expect = c.cfg.boolean("job", "expect_cuts");
    const auto family = c.cfg.text_value_opt("job", "cutting_sets");

    c.extra["grid"] = {{"dims", x.dims()}, {"active_cells", x.active_count()}};
    in_section(c, "job", [&] {
        const auto cr = cuts(x, a, b, cut);
        Check ch{"cuts", "cutting", "Valid", json::object(), {}};
        ch.detail["cuts"] = cr.cuts;
        ch.detail["witness"] = cells_json(x, cr.witness);
        if (expect) {
            ch.status = *expect == cr.cuts ? "Certified" : "Falsified";
            ch.detail["expected"] = *expect;
        }
        c.checks.push_back(std::move(ch));

        const auto cf = cut_function(x, a, b, cut);
        bool zero_set_ok = true;
        for (Cell i = 0; i < x.size(); ++i) {
            if (x.active(i) && (cf.f[i] == 0) != cut.contains(i)) {
                zero_set_ok = false;
            }
        }
        Check fc{"cut_function",
                 "cutting",
                 cf.valid == cr.cuts && zero_set_ok ? "Valid" : "Falsified",
                 json::object(),
                 {}};
        fc.detail["valid"] = cf.valid;
        fc.detail["zero_set_is_c"] = zero_set_ok;
        if (cf.violation) {
            fc.detail["violation"] = x.coords(*cf.violation);
        }
        c.checks.push_back(std::move(fc));

        const auto sides = side_of(x, a, b);
        const bool disjoint = (sides.s_a & sides.s_b).empty();
        const bool same = cuts(x, sides.s_a, sides.s_b, cut).cuts == cr.cuts;
        Check sc{"side_of", "cutting", disjoint && same ? "Valid" : "Falsified", json::object(), {}};
        sc.detail["s_a"] = cells_json(x, sides.s_a.cells());
        sc.detail["s_b"] = cells_json(x, sides.s_b.cells());
        sc.detail["disjoint"] = disjoint;
        sc.detail["cuts_sides_matches"] = same;
        c.checks.push_back(std::move(sc));

        if (gamma) {
            const auto np = path_near_continuum(x, *gamma, a, b, radius,
                                                cut.empty() ? std::nullopt : std::optional<GridSet>(cut));
            Check pc{"path_near_continuum", "cutting", np ? "Valid" : "Inconclusive", json::object(), {}};
            pc.detail["radius"] = radius;
            if (np) {
                pc.detail["path"] = cells_json(x, np->path);
                if (np->meets_cut) {
                    pc.detail["meets_cut"] = x.coords(*np->meets_cut);
                }
            }
            c.checks.push_back(std::move(pc));
        }
        if (family) {
            std::vector<GridSet> sets;
            for (char letter : *family) {
                if (std::isspace(static_cast<unsigned char>(letter))) {
                    continue;
                }
                const auto it = fx.sets.find(letter);
                sets.push_back(it == fx.sets.end() ? GridSet(x, {}) : it->second);
            }
            const auto inter = intersect_cutting_sets(x, sets);
            Check ic{"intersect_cutting_sets", "cutting", "Valid", json::object(), {}};
            ic.detail["cells"] = cells_json(x, inter.cells());
            ic.detail["empty"] = inter.empty();
            c.checks.push_back(std::move(ic));
        }
    });
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int exit_for(const std::vector<Check>& checks)
{
    bool inconclusive = checks.empty();
    for (const auto& ch : checks) {
        if (ch.status == "Falsified") {
            return exit_falsified;
        }
        if (ch.status == "Inconclusive") {
            inconclusive = true;
        }
    }
    return inconclusive ? exit_inconclusive : exit_certified;
}

std::string csv_of(const std::vector<Check>& checks)
{
    std::string out = "check,label,axis,lo,hi\n";
    for (const auto& ch : checks) {
        for (const auto& [label, box] : ch.enclosures) {
            for (std::size_t i = 0; i < box.dims(); ++i) {
                out += "\"" + ch.name + "\",\"" + label + "\"," + std::to_string(i) + "," +
                       to_decimal(box[i].lo(), RoundDir::down) + "," + to_decimal(box[i].hi(), RoundDir::up) +
                       "\n";
            }
        }
    }
    return out;
}

} // namespace

const std::vector<std::string_view>& commands()
{
    static const std::vector<std::string_view> names{"verify-covering", "fixed-points", "periodic-orbits",
                                                     "chaos-report",    "branch-track", "cutting-lab"};
    return names;
}

RunResult execute(std::string_view command, const RunOptions& opt)
{
    if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
        throw ParseError("unknown command '" + std::string(command) + "'");
    }
    if (opt.config_path.empty()) {
        throw ParseError("--config is required");
    }
    const auto start = std::chrono::steady_clock::now();
    const Config cfg = Config::load(opt.config_path);
    Context c{cfg, opt, std::filesystem::path(opt.config_path).parent_path(), std::nullopt, {}, {}, {}, {}};
    if (const auto* ce = cfg.entry("job", "command"); ce && ce->value != command) {
        cfg.fail(*ce, "config is for '" + ce->value + "', not '" + std::string(command) + "'");
    }

    if (command == "verify-covering") {
        verify_covering(c);
    } else if (command == "fixed-points") {
        fixed_points(c);
    } else if (command == "periodic-orbits") {
        periodic_orbits(c);
    } else if (command == "chaos-report") {
        chaos(c);
    } else if (command == "branch-track") {
        branch_track(c);
    } else {
        cutting_lab(c);
    }
    cfg.reject_unused();

    json report;
    report["tool"] = {{"name", "hsv"}, {"version", std::string(tool_version)}};
    report["command"] = std::string(command);
    report["config"] = {{"source", cfg.source()}, {"hash", "fnv1a64:" + hex64(fnv1a64(cfg.text()))}};
    json echo = json::object();
    for (const auto& s : cfg.sections()) {
        json sec = json::object();
        for (const auto& e : s.entries) {
            sec[e.key] = e.value;
        }
        echo[s.name] = sec;
    }
    report["job"] = echo;
    report["options"] = c.effective;
    json checks = json::array();
    for (const auto& ch : c.checks) {
        checks.push_back(
            {{"name", ch.name}, {"kind", ch.kind}, {"status", ch.status}, {"detail", ch.detail}});
    }
    report["checks"] = checks;
    for (auto& [k, v] : c.extra.items()) {
        report[k] = v;
    }
    RunResult out;
    out.exit_code = exit_for(c.checks);
    report["exit_code"] = out.exit_code;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["timing"] = {{"seconds", seconds}};
    out.report = report.dump(2) + "\n";
    out.csv = csv_of(c.checks);
    return out;
}

int run(std::string_view command, const RunOptions& opt, std::ostream& out, std::ostream& err)
{
    RunResult r;
    try {
        r = execute(command, opt);
    } catch (const Error& e) {
        err << "hsv: error: " << e.what() << "\n";
        return exit_usage;
    }
    auto write_file = [&](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        f << text;
        if (!f) {
            err << "hsv: error: cannot write '" << path << "'\n";
            return false;
        }
        return true;
    };
    if (opt.out_path) {
        if (!write_file(*opt.out_path, r.report)) {
            return exit_usage;
        }
    } else {
        out << r.report;
    }
    if (opt.csv_path && !write_file(*opt.csv_path, r.csv)) {
        return exit_usage;
    }
    return r.exit_code;
}

} // namespace hsv
