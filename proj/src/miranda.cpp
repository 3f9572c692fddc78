#include "hsv/miranda.hpp"

#include "hsv/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>

namespace hsv {

std::string_view to_string(SignPattern p)
{
    return p == SignPattern::neg_to_pos ? "neg_to_pos" : "pos_to_neg";
}

std::string_view to_string(ZeroStatus s)
{
    return s == ZeroStatus::certified ? "certified" : "candidate";
}

namespace {

Interval component(const Box& fx, const Matrix* a, std::size_t i)
{
    if (a == nullptr) {
        return fx[i];
    }
    Interval s(0.0);
    for (std::size_t j = 0; j < fx.dims(); ++j) {
        if ((*a)[i][j] != 0.0) {
            s = s + scale(fx[j], (*a)[i][j]);
        }
    }
    return s;
}

struct FaceSign {
    bool ok = false;
    bool nonpos = false;
    bool nonneg = false;
    bool strict_neg = false;
    bool strict_pos = false;
    Interval hull;
    std::size_t pieces = 0;
};

// Adaptive subdivision of a face until every piece has a one-signed
// enclosure of component i. Pieces are processed breadth first so the
// outcome depends only on the inputs.
FaceSign face_sign(const MapSpec& f, const Matrix* a, const Box& face, std::size_t i, std::size_t max_pieces)
{
    FaceSign r;
    std::deque<Box> queue{face};
    std::size_t live = 1;
    bool first = true;
    bool saw_neg = false;
    bool saw_pos = false;
    r.nonpos = true;
    r.nonneg = true;
    r.strict_neg = true;
    r.strict_pos = true;
    while (!queue.empty()) {
        Box p = std::move(queue.front());
        queue.pop_front();
        std::optional<Interval> v;
        try {
            v = component(f.eval(p), a, i);
        } catch (const StripStraddle&) {
        }
        if (v && (v->hi() <= 0.0 || v->lo() >= 0.0)) {
            r.hull = first ? *v : hull(r.hull, *v);
            first = false;
            r.nonpos = r.nonpos && v->hi() <= 0.0;
            r.nonneg = r.nonneg && v->lo() >= 0.0;
            r.strict_neg = r.strict_neg && v->hi() < 0.0;
            r.strict_pos = r.strict_pos && v->lo() > 0.0;
            saw_neg = saw_neg || v->hi() < 0.0;
            saw_pos = saw_pos || v->lo() > 0.0;
            if (saw_neg && saw_pos) {
                return r;
            }
            continue;
        }
        if (live + 1 > max_pieces || !p.can_bisect()) {
            return r;
        }
        auto [lo, hi] = p.bisect();
        if (lo == p || hi == p) {
            return r;
        }
        queue.push_back(std::move(lo));
        queue.push_back(std::move(hi));
        ++live;
    }
    r.pieces = live;
    r.ok = r.nonpos || r.nonneg;
    return r;
}

std::optional<MirandaCertificate> attempt(const MapSpec& f, const Box& b, const Matrix* a,
                                          const MirandaOptions& opt, std::string& reason)
{
    const std::size_t n = b.dims();
    MirandaCertificate cert;
    cert.box = b;
    for (std::size_t i = 0; i < n; ++i) {
        const FaceSign l = face_sign(f, a, face_box(b, i, Side::left), i, opt.max_face_pieces);
        if (!l.ok) {
            reason = "no sign on left face of axis " + std::to_string(i);
            return std::nullopt;
        }
        const FaceSign r = face_sign(f, a, face_box(b, i, Side::right), i, opt.max_face_pieces);
        if (!r.ok) {
            reason = "no sign on right face of axis " + std::to_string(i);
            return std::nullopt;
        }
        const bool up = l.nonpos && r.nonneg;
        const bool down = l.nonneg && r.nonpos;
        std::optional<SignPattern> p;
        if (opt.pattern) {
            const SignPattern want = (*opt.pattern)[i];
            if ((want == SignPattern::neg_to_pos && up) || (want == SignPattern::pos_to_neg && down)) {
                p = want;
            }
        } else if (up) {
            p = SignPattern::neg_to_pos;
        } else if (down) {
            p = SignPattern::pos_to_neg;
        }
        if (!p) {
            reason = "faces of axis " + std::to_string(i) + " do not have opposite signs";
            return std::nullopt;
        }
        const bool neg_left = *p == SignPattern::neg_to_pos;
        cert.pattern.push_back(*p);
        cert.faces.push_back({i, Side::left, l.hull, neg_left ? l.strict_neg : l.strict_pos, l.pieces});
        cert.faces.push_back({i, Side::right, r.hull, neg_left ? r.strict_pos : r.strict_neg, r.pieces});
    }
    return cert;
}

// Rigorous determinant by permutation expansion.
std::optional<Interval> interval_determinant(const Matrix& m)
{
    const std::size_t n = m.size();
    if (n > 7) {
        return std::nullopt;
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Interval det(0.0);
    do {
        std::size_t inversions = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                inversions += perm[i] > perm[j] ? 1 : 0;
            }
        }
        Interval term(inversions % 2 == 0 ? 1.0 : -1.0);
        for (std::size_t i = 0; i < n; ++i) {
            term = term * Interval(m[i][perm[i]]);
        }
        det = det + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

// Inverse of a central-difference Jacobian at the midpoint, with steps
// kept inside the box so piecewise maps stay on their domain.
std::optional<Matrix> preconditioner_for(const MapSpec& f, const Box& b)
{
    const std::size_t n = b.dims();
    const Point mid = b.midpoint();
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    try {
        for (std::size_t j = 0; j < n; ++j) {
            double h = b[j].width() / 4.0;
            if (!(h > 0.0)) {
                h = 1e-8 * (1.0 + std::fabs(mid[j]));
            }
            Point xp = mid;
            Point xm = mid;
            xp[j] = mid[j] + h;
            xm[j] = mid[j] - h;
            const Point fp = f.eval(xp);
            const Point fm = f.eval(xm);
            const double step = xp[j] - xm[j];
            for (std::size_t i = 0; i < n; ++i) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fp[i] - fm[i]) / step;
            }
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    if (!jac.allFinite()) {
        return std::nullopt;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) {
        return std::nullopt;
    }
    const Eigen::MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) {
        return std::nullopt;
    }
    Matrix a(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return a;
}

void check_square(const MapSpec& f, const Box& b)
{
    if (f.dims_in() != b.dims() || f.dims_out() != b.dims()) {
        throw DimMismatch("Miranda check needs F: R^n -> R^n on an n-box");
    }
}

} // namespace

MirandaResult check_miranda(const MapSpec& f, const Box& b, const MirandaOptions& opt)
{
    check_square(f, b);
    if (opt.pattern && opt.pattern->size() != b.dims()) {
        throw DimMismatch("sign pattern length differs from box dimension");
    }
    MirandaResult res;
    std::string reason;
    auto with = [&](const Matrix& a) -> bool {
        const auto det = interval_determinant(a);
        if (!det || det->contains_zero()) {
            reason = "preconditioner not provably nonsingular";
            return false;
        }
        if (auto c = attempt(f, b, &a, opt, reason)) {
            c->preconditioner = a;
            c->determinant = *det;
            res.certificate = std::move(c);
            return true;
        }
        return false;
    };
    if (opt.preconditioner) {
        if (opt.preconditioner->size() != b.dims()) {
            throw DimMismatch("preconditioner size differs from box dimension");
        }
        if (!with(*opt.preconditioner)) {
            res.reason = reason;
            return res;
        }
    } else if (auto c = attempt(f, b, nullptr, opt, reason)) {
        res.certificate = std::move(c);
    } else if (opt.precondition) {
        const std::string plain = reason;
        const auto a = preconditioner_for(f, b);
        if (!a || !with(*a)) {
            res.reason = plain + (a ? "; preconditioned: " + reason : "");
            return res;
        }
    } else {
        res.reason = reason;
        return res;
    }
    res.status = Verdict::Certified;
    return res;
}

bool replay_miranda(const MapSpec& f, const MirandaCertificate& cert)
{
    MirandaOptions opt;
    opt.pattern = cert.pattern;
    opt.preconditioner = cert.preconditioner;
    opt.precondition = false;
    opt.max_face_pieces = std::size_t{1} << 20;
    const auto r = check_miranda(f, cert.box, opt);
    if (!r.certificate || r.certificate->faces.size() != cert.faces.size()) {
        return false;
    }
    for (std::size_t i = 0; i < cert.faces.size(); ++i) {
        const auto& x = cert.faces[i];
        const auto& y = r.certificate->faces[i];
        if (x.axis != y.axis || x.side != y.side || !(x.value == y.value) || x.strict != y.strict ||
            x.pieces != y.pieces) {
            return false;
        }
    }
    return r.certificate->pattern == cert.pattern;
}

// ---------------------------------------------------------------------------

namespace {

bool lower_corner_less(const Box& a, const Box& b)
{
    for (std::size_t i = 0; i < a.dims(); ++i) {
        if (a[i].lo() != b[i].lo()) {
            return a[i].lo() < b[i].lo();
        }
    }
    for (std::size_t i = 0; i < a.dims(); ++i) {
        if (a[i].hi() != b[i].hi()) {
            return a[i].hi() < b[i].hi();
        }
    }
    return false;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i)
{
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

// Groups boxes that touch (closed intersection), preserving first-member order.
std::vector<std::vector<std::size_t>> clusters(const std::vector<Box>& boxes)
{
    const std::size_t n = boxes.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return boxes[a][0].lo() < boxes[b][0].lo(); });
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t x = 0; x < n; ++x) {
        const Box& a = boxes[order[x]];
        for (std::size_t y = x + 1; y < n && boxes[order[y]][0].lo() <= a[0].hi(); ++y) {
            if (a.intersects(boxes[order[y]])) {
                parent[find_root(parent, order[x])] = find_root(parent, order[y]);
            }
        }
    }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::ptrdiff_t> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find_root(parent, i);
        if (slot[r] < 0) {
            slot[r] = static_cast<std::ptrdiff_t>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(slot[r])].push_back(i);
    }
    return groups;
}

bool may_vanish(const MapSpec& f, const Box& b, double tol = 0.0)
{
    Box fb;
    try {
        fb = f.eval(b);
    } catch (const StripStraddle&) {
        return true;
    }
    return std::all_of(fb.begin(), fb.end(),
                       [&](const Interval& v) { return v.lo() <= tol && -tol <= v.hi(); });
}

} // namespace

ZeroSearchResult find_zeros(const MapSpec& f, const Box& search, const ZeroSearchOptions& opt)
{
    check_square(f, search);
    if (!(opt.tol > 0.0)) {
        throw ConstructionError("tolerance must be positive");
    }
    if (opt.max_boxes < 1) {
        throw ConstructionError("box budget must be at least 1");
    }
    ZeroSearchResult res;
    std::vector<Box> work{search};
    std::vector<Box> leaves;
    const double leaf_width = opt.tol / 2.0;
    while (!work.empty()) {
        if (work.size() + leaves.size() > opt.max_boxes) {
            res.budget_exceeded = true;
            res.unresolved = std::move(work);
            break;
        }
        Box b = std::move(work.back());
        work.pop_back();
        ++res.boxes_processed;
        if (!may_vanish(f, b)) {
            continue;
        }
        if (b.width() <= leaf_width || !b.can_bisect()) {
            leaves.push_back(std::move(b));
            continue;
        }
        auto [lo, hi] = b.bisect();
        work.push_back(std::move(hi));
        work.push_back(std::move(lo));
    }

    for (const auto& group : clusters(leaves)) {
        Box h = leaves[group.front()];
        for (std::size_t i : group) {
            h = hull(h, leaves[i]);
        }
        // A cluster wider than tol may hold a continuum; Miranda would prove
        // existence there but not isolation.
        if (h.width() <= opt.tol) {
            const auto m = check_miranda(f, h, opt.miranda);
            if (m) {
                res.zeros.push_back({h, ZeroStatus::certified, m.certificate, false});
            } else {
                res.zeros.push_back({h, ZeroStatus::candidate, std::nullopt, false});
            }
        } else {
            for (std::size_t i : group) {
                res.zeros.push_back({leaves[i], ZeroStatus::candidate, std::nullopt, true});
            }
        }
    }
    std::sort(res.zeros.begin(), res.zeros.end(),
              [](const ZeroEnclosure& a, const ZeroEnclosure& b) { return lower_corner_less(a.box, b.box); });
    std::sort(res.unresolved.begin(), res.unresolved.end(), lower_corner_less);
    return res;
}

ZeroSearchResult find_fixed_points(const MapSpec& psi, const Box& search, const ZeroSearchOptions& opt)
{
    return find_zeros(MapSpec::residual(psi), search, opt);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> grid_lines(const Interval& range, double cell)
{
    const double q = range.width() / cell;
    auto n = static_cast<std::size_t>(std::ceil(q * (1.0 - 1e-12)));
    n = std::max<std::size_t>(n, 1);
    std::vector<double> lines(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n);
        lines[k] = range.lo() + (range.hi() - range.lo()) * t;
    }
    lines.front() = range.lo();
    lines.back() = range.hi();
    return lines;
}

} // namespace

BranchResult track_zero_branch(const MapSpec& f, const Box& search, std::size_t lambda_axis,
                               const BranchOptions& opt)
{
    const std::size_t n = search.dims();
    if (f.dims_in() != n || f.dims_out() + 1 != n) {
        throw DimMismatch("branch tracking needs F: R^N -> R^(N-1) on an N-box");
    }
    if (lambda_axis >= n) {
        throw DimMismatch("parameter axis out of range");
    }
    if (!(opt.cell > 0.0)) {
        throw ConstructionError("cell size must be positive");
    }
    BranchResult res;
    std::vector<std::size_t> axes;
    for (std::size_t a = 0; a < n; ++a) {
        if (a != lambda_axis) {
            axes.push_back(a);
        }
    }
    for (std::size_t j = 0; j < axes.size(); ++j) {
        const FaceSign l =
            face_sign(f, nullptr, face_box(search, axes[j], Side::left), j, opt.max_face_pieces);
        const FaceSign r =
            face_sign(f, nullptr, face_box(search, axes[j], Side::right), j, opt.max_face_pieces);
        if (l.ok && r.ok && l.strict_neg && r.strict_pos) {
            res.pattern.push_back(SignPattern::neg_to_pos);
        } else if (l.ok && r.ok && l.strict_pos && r.strict_neg) {
            res.pattern.push_back(SignPattern::pos_to_neg);
        } else {
            throw HypothesisFailed("strict opposite signs of component " + std::to_string(j) +
                                   " on the faces of axis " + std::to_string(axes[j]) +
                                   " could not be certified");
        }
    }

    std::vector<std::vector<double>> lines;
    std::vector<std::size_t> counts;
    std::size_t total = 1;
    for (std::size_t a = 0; a < n; ++a) {
        lines.push_back(grid_lines(search[a], opt.cell));
        counts.push_back(lines.back().size() - 1);
        if (total > opt.max_cells / counts.back()) {
            res.reason = "cell budget exceeded";
            return res;
        }
        total *= counts.back();
    }
    res.cells_total = total;

    // Linear index with axis 0 slowest.
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t a = n - 1; a-- > 0;) {
        stride[a] = stride[a + 1] * counts[a + 1];
    }
    auto cell_box = [&](std::size_t idx) {
        std::vector<Interval> c(n);
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t k = idx / stride[a] % counts[a];
            c[a] = Interval(lines[a][k], lines[a][k + 1]);
        }
        return Box(std::move(c));
    };
    auto coord = [&](std::size_t idx, std::size_t a) { return idx / stride[a] % counts[a]; };

    std::vector<char> kept(total, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (may_vanish(f, cell_box(idx), opt.tol)) {
            kept[idx] = 1;
            ++res.cells_kept;
        }
    }

    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(total, none);
    std::queue<std::size_t> q;
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (kept[idx] && coord(idx, lambda_axis) == 0) {
            parent[idx] = idx;
            q.push(idx);
        }
    }
    std::size_t goal = none;
    while (!q.empty() && goal == none) {
        const std::size_t cur = q.front();
        q.pop();
        if (coord(cur, lambda_axis) + 1 == counts[lambda_axis]) {
            goal = cur;
            break;
        }
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t k = coord(cur, a);
            for (int dir : {-1, 1}) {
                if ((dir < 0 && k == 0) || (dir > 0 && k + 1 == counts[a])) {
                    continue;
                }
                const std::size_t nb = dir < 0 ? cur - stride[a] : cur + stride[a];
                if (kept[nb] && parent[nb] == none) {
                    parent[nb] = cur;
                    q.push(nb);
                }
            }
        }
    }
    if (goal == none) {
        res.reason = "no chain of retained cells joins the parameter faces";
        return res;
    }
    std::vector<std::size_t> path{goal};
    while (parent[path.back()] != path.back()) {
        path.push_back(parent[path.back()]);
    }
    std::reverse(path.begin(), path.end());

    BranchChain chain;
    for (std::size_t i = 0; i < path.size(); ++i) {
        chain.boxes.push_back(cell_box(path[i]));
        if (i > 0) {
            for (std::size_t a = 0; a < n; ++a) {
                const std::size_t ka = coord(path[i - 1], a);
                const std::size_t kb = coord(path[i], a);
                if (ka != kb) {
                    chain.adjacency.push_back({a, lines[a][std::max(ka, kb)]});
                }
            }
        }
    }
    chain.touches_lo = chain.boxes.front()[lambda_axis].lo() == search[lambda_axis].lo();
    chain.touches_hi = chain.boxes.back()[lambda_axis].hi() == search[lambda_axis].hi();
    res.chain = std::move(chain);
    res.status = Verdict::Certified;
    return res;
}

} // namespace hsv
