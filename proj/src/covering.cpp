#include "hsv/covering.hpp"

#include "hsv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hsv {

std::string_view to_string(CoverMethod m)
{
    switch (m) {
    case CoverMethod::face_covering:
        return "face_covering";
    case CoverMethod::boundary:
        return "boundary";
    case CoverMethod::slab:
        return "slab";
    case CoverMethod::phase:
        return "phase";
    case CoverMethod::sampled:
        return "sampled";
    }
    return "?";
}

namespace {

Box interval_box(const Interval& v)
{
    return Box{v};
}

// Points of a face used as falsification witnesses: a small tensor grid over
// the free axes.
std::vector<Point> face_points(const Box& face)
{
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < face.dims(); ++i) {
        if (face[i].width() > 0.0) {
            free.push_back(i);
        }
    }
    const std::size_t per_axis = free.size() <= 1 ? 33 : free.size() == 2 ? 9 : 3;
    std::vector<Point> pts{face.lower()};
    for (std::size_t a : free) {
        std::vector<Point> next;
        for (const auto& p : pts) {
            for (std::size_t k = 0; k < per_axis; ++k) {
                Point q = p;
                const double t = static_cast<double>(k) / static_cast<double>(per_axis - 1);
                q[a] = k + 1 == per_axis ? face[a].hi() : face[a].lo() + t * (face[a].hi() - face[a].lo());
                next.push_back(std::move(q));
            }
        }
        pts = std::move(next);
    }
    return pts;
}

struct PointValue {
    Point at;
    Interval value;
};

std::optional<PointValue> witness(const MapSpec& psi, const Box& face, std::size_t j,
                                  bool (*pred)(const Interval&, double), double bound)
{
    for (const auto& p : face_points(face)) {
        Interval v;
        try {
            v = psi.eval(Box::point(p))[j];
        } catch (const DomainError&) {
            continue;
        } catch (const StripStraddle&) {
            continue;
        }
        if (pred(v, bound)) {
            return PointValue{p, v};
        }
    }
    return std::nullopt;
}

bool above(const Interval& v, double b)
{
    return v.lo() > b;
}
bool below(const Interval& v, double b)
{
    return v.hi() < b;
}

std::optional<Box> try_eval(const MapSpec& psi, const Box& b, std::string& why)
{
    try {
        return psi.eval(b);
    } catch (const DomainError& e) {
        why = e.what();
    } catch (const StripStraddle& e) {
        why = e.what();
    }
    return std::nullopt;
}

} // namespace

StretchCertificate check_face_covering(const MapSpec& psi, const Box& r1, const Box& r2,
                                       const std::vector<std::size_t>& directions)
{
    const std::size_t n = r1.dims();
    if (r2.dims() != n || psi.dims_in() != n || psi.dims_out() != n) {
        throw DimMismatch("face covering needs matching dimensions");
    }
    for (std::size_t j : directions) {
        if (j >= n) {
            throw DimMismatch("covering direction out of range");
        }
    }
    StretchCertificate cert;
    cert.method = CoverMethod::face_covering;
    cert.k = r1;
    bool inconclusive = false;
    std::string first_open;
    auto note_open = [&](std::string s) {
        inconclusive = true;
        if (first_open.empty()) {
            first_open = std::move(s);
        }
    };

    for (std::size_t j = 0; j < n; ++j) {
        const Interval target = r2[j];
        const std::string tag = "psi_" + std::to_string(j);
        const bool covering = std::find(directions.begin(), directions.end(), j) != directions.end();
        if (!covering) {
            std::string why;
            const auto img = try_eval(psi, r1, why);
            if (!img) {
                note_open(tag + " undefined on r1: " + why);
                continue;
            }
            cert.evidence.push_back({tag + " on r1", interval_box((*img)[j])});
            if (target.contains((*img)[j])) {
                continue;
            }
            const auto w_hi = witness(psi, r1, j, &above, target.hi());
            const auto w_lo = w_hi ? w_hi : witness(psi, r1, j, &below, target.lo());
            if (w_lo) {
                cert.status = Verdict::Falsified;
                cert.clause = tag + "(r1) is not inside [c, d]";
                cert.evidence.push_back({"witness point", Box::point(w_lo->at)});
                cert.evidence.push_back({tag + " at witness", interval_box(w_lo->value)});
                return cert;
            }
            note_open(tag + "(r1) not provably inside [c, d]");
            continue;
        }
        const Box left = face_box(r1, j, Side::left);
        const Box right = face_box(r1, j, Side::right);
        std::string why;
        const auto il = try_eval(psi, left, why);
        const auto ir = il ? try_eval(psi, right, why) : std::nullopt;
        if (!il || !ir) {
            note_open(tag + " undefined on a face: " + why);
            continue;
        }
        const Interval vl = (*il)[j];
        const Interval vr = (*ir)[j];
        cert.evidence.push_back({tag + " on left face", interval_box(vl)});
        cert.evidence.push_back({tag + " on right face", interval_box(vr)});
        // max over left <= c and min over right >= d, or the mirror.
        const bool forward = vl.hi() <= target.lo() && vr.lo() >= target.hi();
        const bool backward = vr.hi() <= target.lo() && vl.lo() >= target.hi();
        if (forward || backward) {
            cert.swapped = cert.swapped || (!forward && backward);
            continue;
        }
        // Each orientation is refuted by a point whose value lands on the
        // wrong side of the target interval.
        const auto fwd_l = witness(psi, left, j, &above, target.lo());
        const auto fwd_r = fwd_l ? std::nullopt : witness(psi, right, j, &below, target.hi());
        const auto bwd_r = witness(psi, right, j, &above, target.lo());
        const auto bwd_l = bwd_r ? std::nullopt : witness(psi, left, j, &below, target.hi());
        const auto fwd = fwd_l ? fwd_l : fwd_r;
        const auto bwd = bwd_r ? bwd_r : bwd_l;
        if (fwd && bwd) {
            cert.status = Verdict::Falsified;
            cert.clause = tag + " does not separate the faces of axis " + std::to_string(j);
            cert.evidence.push_back({"witness point (direct orientation)", Box::point(fwd->at)});
            cert.evidence.push_back({tag + " at direct witness", interval_box(fwd->value)});
            cert.evidence.push_back({"witness point (reversed orientation)", Box::point(bwd->at)});
            cert.evidence.push_back({tag + " at reversed witness", interval_box(bwd->value)});
            return cert;
        }
        note_open(tag + " face enclosures do not sandwich [c, d]");
    }
    if (inconclusive) {
        cert.clause = first_open;
        return cert;
    }
    cert.status = Verdict::Certified;
    return cert;
}

namespace {

// img inside the face box f of y: expansion component collapsed onto the
// face value, other components inside y.
bool inside_face(const Box& img, const Box& f)
{
    return f.contains(img);
}

} // namespace

StretchCertificate check_boundary_stretching(const MapSpec& psi, const OrientedRect& x, const OrientedRect& y,
                                             const std::optional<OrientedRect>& k)
{
    if (x.dims() != y.dims() || psi.dims_in() != x.dims() || psi.dims_out() != y.dims()) {
        throw DimMismatch("stretching check needs matching dimensions");
    }
    if (k) {
        if (k->dims() != x.dims()) {
            throw DimMismatch("K dimension differs from X");
        }
        const auto rel = is_horizontal_slab(*k, x);
        if (!rel) {
            throw NotASlab("K is not a horizontal slab of X: " + rel.reason);
        }
    }
    const OrientedRect& kk = k ? *k : x;
    StretchCertificate cert;
    cert.method = k ? CoverMethod::slab : CoverMethod::boundary;
    cert.source = x;
    cert.target = y;
    cert.k = kk.body();

    std::string why;
    const auto img = try_eval(psi, kk.body(), why);
    if (!img) {
        cert.clause = "map undefined on K: " + why;
        return cert;
    }
    cert.evidence.push_back({"psi(K)", *img});
    if (!y.body().contains(*img)) {
        cert.clause = "psi(K) is not inside Y";
        return cert;
    }
    const auto il = try_eval(psi, kk.left(), why);
    const auto ir = il ? try_eval(psi, kk.right(), why) : std::nullopt;
    if (!il || !ir) {
        cert.clause = "map undefined on a side of K: " + why;
        return cert;
    }
    cert.evidence.push_back({"psi(K_l)", *il});
    cert.evidence.push_back({"psi(K_r)", *ir});
    if (inside_face(*il, y.left()) && inside_face(*ir, y.right())) {
        cert.status = Verdict::Certified;
        return cert;
    }
    if (inside_face(*il, y.right()) && inside_face(*ir, y.left())) {
        cert.status = Verdict::Certified;
        cert.swapped = true;
        return cert;
    }
    cert.clause = "sides of K do not map into opposite sides of Y";
    return cert;
}

StretchCertificate check_phase_covering(const MapSpec& psi, const OrientedRect& x, const Interval& target,
                                        std::size_t component)
{
    if (psi.dims_in() != x.dims()) {
        throw DimMismatch("phase covering needs matching dimensions");
    }
    if (component >= psi.dims_out()) {
        throw DimMismatch("phase component out of range");
    }
    const auto pf = psi.phase_form(component);
    if (!pf) {
        throw NotPhaseForm("component " + std::to_string(component) +
                           " is not of the form a0 + c*cos(2*pi*L(x)) or a0 + c*sin(2*pi*L(x))");
    }
    StretchCertificate cert;
    cert.method = CoverMethod::phase;
    cert.source = x;
    cert.k = x.body();

    const Interval pl = pf->phase(x.left());
    const Interval pr = pf->phase(x.right());
    const Interval gap_fwd(rounding::sub_down(pr.lo(), pl.hi()), rounding::sub_up(pr.lo(), pl.hi()));
    const Interval gap_bwd(rounding::sub_down(pl.lo(), pr.hi()), rounding::sub_up(pl.lo(), pr.hi()));
    const bool use_bwd = gap_bwd.lo() > gap_fwd.lo();
    const Interval gap = use_bwd ? gap_bwd : gap_fwd;
    const Interval amp = abs(pf->amplitude);
    const Interval low = pf->a0 - amp;
    const Interval high = pf->a0 + amp;

    cert.swapped = use_bwd;
    cert.evidence.push_back({"phase on left side", interval_box(pl)});
    cert.evidence.push_back({"phase on right side", interval_box(pr)});
    cert.evidence.push_back({"phase gap", interval_box(gap)});
    cert.evidence.push_back({"amplitude range", interval_box(Interval(low.lo(), high.hi()))});
    cert.evidence.push_back({"target", interval_box(target)});

    if (low.lo() > target.lo() || high.hi() < target.hi()) {
        cert.status = Verdict::Falsified;
        cert.clause = "amplitude";
        return cert;
    }
    if (!(low.hi() <= target.lo() && high.lo() >= target.hi())) {
        cert.clause = "amplitude range not provably covering the target";
        return cert;
    }
    if (!(gap.lo() >= 1.0)) {
        cert.clause = "phase gap below one period";
        return cert;
    }
    cert.status = Verdict::Certified;
    return cert;
}

// ---------------------------------------------------------------------------

namespace {

double unit(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

std::vector<Point> sample_path(const OrientedRect& x, std::size_t index, std::size_t n_samples,
                               std::uint64_t seed)
{
    if (n_samples < 2) {
        n_samples = 2;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    const std::size_t n = x.dims();
    const std::size_t e = x.axis();
    const double from = x.left()[e].lo();
    const double to = x.right()[e].lo();
    Point start(n);
    Point end(n);
    Point amp(n, 0.0);
    std::vector<double> freq(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == e) {
            continue;
        }
        const Interval r = x.body()[i];
        start[i] = r.lo() + unit(rng) * (r.hi() - r.lo());
        end[i] = r.lo() + unit(rng) * (r.hi() - r.lo());
        // Odd paths wiggle sideways; even ones are straight.
        if (index % 2 == 1) {
            amp[i] = 0.25 * (r.hi() - r.lo()) * unit(rng);
            freq[i] = 1.0 + std::floor(4.0 * unit(rng));
        }
    }
    std::vector<Point> path;
    path.reserve(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(n_samples - 1);
        Point p(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == e) {
                p[i] = s + 1 == n_samples ? to : from + t * (to - from);
                continue;
            }
            const Interval r = x.body()[i];
            const double v =
                start[i] + t * (end[i] - start[i]) + amp[i] * std::sin(std::numbers::pi * freq[i] * t);
            p[i] = std::clamp(v, r.lo(), r.hi());
        }
        path.push_back(std::move(p));
    }
    return path;
}

SamplingResult falsify_by_sampling(const MapSpec& psi, const OrientedRect& x, const OrientedRect& y,
                                   const SamplingOptions& opt)
{
    if (psi.dims_in() != x.dims() || psi.dims_out() != y.dims()) {
        throw DimMismatch("sampling falsifier needs matching dimensions");
    }
    const std::size_t e = y.axis();
    const double face_lo = y.body()[e].lo();
    const double face_hi = y.body()[e].hi();
    SamplingResult res;
    for (std::size_t p = 0; p < std::max<std::size_t>(opt.n_paths, 1); ++p) {
        const auto path = sample_path(x, p, std::max<std::size_t>(opt.n_samples, 2), opt.seed);
        std::vector<std::optional<double>> img;
        img.reserve(path.size());
        for (const auto& q : path) {
            try {
                const Point v = psi.eval(q);
                if (y.body().contains(v)) {
                    img.emplace_back(v[e]);
                } else {
                    img.emplace_back();
                }
            } catch (const DomainError&) {
                img.emplace_back();
            }
        }
        double res_step = 0.0;
        for (std::size_t s = 1; s < img.size(); ++s) {
            if (img[s] && img[s - 1]) {
                res_step = std::max(res_step, std::fabs(*img[s] - *img[s - 1]));
            }
        }
        const double slack = res_step + 1e-12 * (face_hi - face_lo);
        bool spans = false;
        for (std::size_t s = 0; s < img.size() && !spans;) {
            if (!img[s]) {
                ++s;
                continue;
            }
            double lo = *img[s];
            double hi = *img[s];
            for (; s < img.size() && img[s]; ++s) {
                lo = std::min(lo, *img[s]);
                hi = std::max(hi, *img[s]);
            }
            spans = lo <= face_lo + slack && hi >= face_hi - slack;
        }
        ++res.paths_checked;
        if (!spans) {
            res.counterexample = true;
            res.path_index = p;
            res.path = path;
            return res;
        }
    }
    return res;
}

} // namespace hsv
