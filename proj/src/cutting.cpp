#include "hsv/cutting.hpp"

#include "hsv/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

namespace hsv {

namespace {

constexpr long long unreached = -1;

// Breadth-first distances from `sources` through cells admitted by `allowed`.
// Sources outside `allowed` are skipped.
template <class Allowed>
std::vector<long long> bfs(const GridSpace& x, const std::vector<Cell>& sources, Allowed allowed,
                           std::vector<Cell>* parent = nullptr)
{
    std::vector<long long> dist(x.size(), unreached);
    if (parent) {
        parent->assign(x.size(), std::numeric_limits<Cell>::max());
    }
    std::deque<Cell> queue;
    for (Cell s : sources) {
        if (!allowed(s) || dist[s] != unreached) {
            continue;
        }
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        for (Cell n : x.neighbors(c)) {
            if (dist[n] != unreached || !allowed(n)) {
                continue;
            }
            dist[n] = dist[c] + 1;
            if (parent) {
                (*parent)[n] = c;
            }
            queue.push_back(n);
        }
    }
    return dist;
}

std::vector<Cell> trace(const std::vector<Cell>& parent, Cell end)
{
    std::vector<Cell> path{end};
    while (parent[path.back()] != std::numeric_limits<Cell>::max()) {
        path.push_back(parent[path.back()]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

void require_pair(const GridSet& a, const GridSet& b)
{
    if (a.empty()) {
        throw EmptySet("set a is empty");
    }
    if (b.empty()) {
        throw EmptySet("set b is empty");
    }
    if (!(a & b).empty()) {
        throw SetsIntersect("sets a and b intersect");
    }
}

GridSet from_mask(const GridSpace& x, const std::vector<long long>& dist, bool reached)
{
    std::vector<Cell> cells;
    for (Cell c = 0; c < x.size(); ++c) {
        if (x.active(c) && (dist[c] != unreached) == reached) {
            cells.push_back(c);
        }
    }
    return GridSet(x, cells);
}

} // namespace

GridSpace::GridSpace(std::vector<std::size_t> dims, std::vector<bool> active)
    : dims_(std::move(dims)), active_(std::move(active))
{
    if (dims_.empty()) {
        throw ConstructionError("grid needs at least one axis");
    }
    std::size_t total = 1;
    stride_.assign(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 0;) {
        if (dims_[i] == 0) {
            throw ConstructionError("grid axis " + std::to_string(i) + " has length 0");
        }
        stride_[i] = total;
        total *= dims_[i];
    }
    if (active_.size() != total) {
        throw ConstructionError("mask has " + std::to_string(active_.size()) + " entries, grid has " +
                                std::to_string(total) + " cells");
    }
    n_active_ = static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
    if (n_active_ == 0) {
        throw ConstructionError("grid has no active cell");
    }
    Cell first = static_cast<Cell>(std::find(active_.begin(), active_.end(), true) - active_.begin());
    auto dist = bfs(*this, {first}, [](Cell) { return true; });
    auto reached = static_cast<std::size_t>(
        std::count_if(dist.begin(), dist.end(), [](long long d) { return d != unreached; }));
    if (reached != n_active_) {
        throw ConstructionError("active cells are not connected");
    }
}

GridSpace GridSpace::full(std::vector<std::size_t> dims)
{
    std::size_t total = 1;
    for (auto d : dims) {
        total *= d;
    }
    return GridSpace(std::move(dims), std::vector<bool>(total, true));
}

Cell GridSpace::index(const Coords& c) const
{
    if (c.size() != dims_.size()) {
        throw DimMismatch("cell coordinates have the wrong arity");
    }
    Cell idx = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] >= dims_[i]) {
            throw ConstructionError("cell coordinate out of range");
        }
        idx += c[i] * stride_[i];
    }
    return idx;
}

Coords GridSpace::coords(Cell c) const
{
    if (c >= size()) {
        throw ConstructionError("cell index out of range");
    }
    Coords out(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        out[i] = (c / stride_[i]) % dims_[i];
    }
    return out;
}

std::vector<Cell> GridSpace::neighbors(Cell c) const
{
    std::vector<Cell> out;
    out.reserve(2 * dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        std::size_t k = (c / stride_[i]) % dims_[i];
        if (k > 0 && active_[c - stride_[i]]) {
            out.push_back(c - stride_[i]);
        }
        if (k + 1 < dims_[i] && active_[c + stride_[i]]) {
            out.push_back(c + stride_[i]);
        }
    }
    return out;
}

GridSet::GridSet(const GridSpace& x, const std::vector<Cell>& cells) : member_(x.size(), false)
{
    for (Cell c : cells) {
        if (c >= x.size()) {
            throw ConstructionError("cell " + std::to_string(c) + " out of range");
        }
        if (!x.active(c)) {
            throw ConstructionError("cell " + std::to_string(c) + " is masked");
        }
        if (!member_[c]) {
            member_[c] = true;
            ++count_;
        }
    }
}

GridSet GridSet::all(const GridSpace& x)
{
    std::vector<Cell> cells;
    for (Cell c = 0; c < x.size(); ++c) {
        if (x.active(c)) {
            cells.push_back(c);
        }
    }
    return GridSet(x, cells);
}

GridSet GridSet::slice(const GridSpace& x, std::size_t axis, std::size_t value)
{
    if (axis >= x.dims().size()) {
        throw DimMismatch("slice axis out of range");
    }
    std::vector<Cell> cells;
    for (Cell c = 0; c < x.size(); ++c) {
        if (x.active(c) && x.coords(c)[axis] == value) {
            cells.push_back(c);
        }
    }
    return GridSet(x, cells);
}

std::vector<Cell> GridSet::cells() const
{
    std::vector<Cell> out;
    out.reserve(count_);
    for (Cell c = 0; c < member_.size(); ++c) {
        if (member_[c]) {
            out.push_back(c);
        }
    }
    return out;
}

namespace {

template <class Op>
void combine(const std::vector<bool>& a, const std::vector<bool>& b, Op op, std::vector<bool>& out,
             std::size_t& count)
{
    std::size_t n = std::max(a.size(), b.size());
    out.assign(n, false);
    count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool va = i < a.size() && a[i];
        bool vb = i < b.size() && b[i];
        if (op(va, vb)) {
            out[i] = true;
            ++count;
        }
    }
}

} // namespace

GridSet GridSet::operator|(const GridSet& o) const
{
    GridSet r;
    combine(member_, o.member_, [](bool p, bool q) { return p || q; }, r.member_, r.count_);
    return r;
}

GridSet GridSet::operator&(const GridSet& o) const
{
    GridSet r;
    combine(member_, o.member_, [](bool p, bool q) { return p && q; }, r.member_, r.count_);
    return r;
}

GridSet GridSet::operator-(const GridSet& o) const
{
    GridSet r;
    combine(member_, o.member_, [](bool p, bool q) { return p && !q; }, r.member_, r.count_);
    return r;
}

bool operator==(const GridSet& a, const GridSet& b)
{
    if (a.count_ != b.count_) {
        return false;
    }
    return (a - b).empty();
}

CutResult cuts(const GridSpace& x, const GridSet& a, const GridSet& b, const GridSet& c)
{
    require_pair(a, b);
    std::vector<Cell> parent;
    auto dist = bfs(x, (a - c).cells(), [&](Cell n) { return !c.contains(n); }, &parent);
    CutResult out;
    out.cuts = true;
    Cell best = 0;
    long long best_d = -1;
    for (Cell t : b.cells()) {
        if (dist[t] == unreached) {
            continue;
        }
        if (best_d < 0 || dist[t] < best_d) {
            best = t;
            best_d = dist[t];
        }
    }
    if (best_d >= 0) {
        out.cuts = false;
        out.witness = trace(parent, best);
    }
    return out;
}

Field distance_field(const GridSpace& x, const GridSet& c)
{
    if (c.empty()) {
        throw EmptySet("distance to an empty set");
    }
    auto dist = bfs(x, c.cells(), [](Cell) { return true; });
    for (auto& d : dist) {
        if (d == unreached) {
            d = 0;
        }
    }
    return dist;
}

Field reach_mu(const GridSpace& x, const GridSet& a, const GridSet& c)
{
    if (a.empty()) {
        throw EmptySet("set a is empty");
    }
    auto dist = bfs(x, (a - c).cells(), [&](Cell n) { return !c.contains(n); });
    Field mu(x.size(), 0);
    for (Cell i = 0; i < x.size(); ++i) {
        if (!x.active(i) || c.contains(i)) {
            continue;
        }
        mu[i] = dist[i] == unreached ? 1 : -1;
    }
    return mu;
}

CutFunction cut_function(const GridSpace& x, const GridSet& a, const GridSet& b, const GridSet& c)
{
    require_pair(a, b);
    Field rho = c.empty() ? Field(x.size(), 1) : distance_field(x, c);
    Field mu = reach_mu(x, a, c);
    CutFunction out;
    out.f.assign(x.size(), 0);
    for (Cell i = 0; i < x.size(); ++i) {
        if (x.active(i)) {
            out.f[i] = rho[i] * mu[i];
        }
    }
    out.valid = true;
    for (Cell i = 0; i < x.size(); ++i) {
        bool bad = (a.contains(i) && out.f[i] > 0) || (b.contains(i) && out.f[i] < 0);
        if (bad) {
            out.valid = false;
            out.violation = i;
            break;
        }
    }
    return out;
}

Sides side_of(const GridSpace& x, const GridSet& a, const GridSet& b)
{
    require_pair(a, b);
    auto from_b = bfs(x, b.cells(), [&](Cell n) { return !a.contains(n); });
    auto from_a = bfs(x, a.cells(), [&](Cell n) { return !b.contains(n); });
    return {from_mask(x, from_b, false), from_mask(x, from_a, false)};
}

bool is_connected(const GridSpace& x, const GridSet& s)
{
    if (s.empty()) {
        return false;
    }
    auto dist = bfs(x, {s.cells().front()}, [&](Cell n) { return s.contains(n); });
    return from_mask(x, dist, true).count() == s.count();
}

std::optional<NearPath> path_near_continuum(const GridSpace& x, const GridSet& gamma, const GridSet& a,
                                            const GridSet& b, std::size_t radius,
                                            const std::optional<GridSet>& c)
{
    if (!is_connected(x, gamma)) {
        throw PreconditionFailed("gamma is empty or not connected");
    }
    if ((gamma & a).empty()) {
        throw PreconditionFailed("gamma does not meet a");
    }
    if ((gamma & b).empty()) {
        throw PreconditionFailed("gamma does not meet b");
    }
    auto near = distance_field(x, gamma);
    auto r = static_cast<long long>(radius);
    auto allowed = [&](Cell n) { return near[n] <= r; };
    std::vector<Cell> parent;
    auto dist = bfs(x, a.cells(), allowed, &parent);
    std::optional<Cell> end;
    for (Cell t : b.cells()) {
        if (dist[t] != unreached && (!end || dist[t] < dist[*end])) {
            end = t;
        }
    }
    if (!end) {
        return std::nullopt;
    }
    NearPath out;
    out.path = trace(parent, *end);
    if (c && !c->empty() && cuts(x, a, b, *c).cuts) {
        auto to_c = distance_field(x, *c);
        for (Cell g : gamma.cells()) {
            if (to_c[g] <= r && (!out.meets_cut || to_c[g] < to_c[*out.meets_cut])) {
                out.meets_cut = g;
            }
        }
    }
    return out;
}

GridSet intersect_cutting_sets(const GridSpace& x, const std::vector<GridSet>& sets)
{
    const auto& dims = x.dims();
    if (sets.size() != dims.size()) {
        throw PreconditionFailed("expected " + std::to_string(dims.size()) + " cutting sets, got " +
                                 std::to_string(sets.size()));
    }
    GridSet out = GridSet::all(x);
    for (std::size_t i = 0; i < dims.size(); ++i) {
        GridSet lo = GridSet::slice(x, i, 0);
        GridSet hi = GridSet::slice(x, i, dims[i] - 1);
        if (lo.empty() || hi.empty() || !(lo & hi).empty()) {
            throw PreconditionFailed("walls of axis " + std::to_string(i) + " are empty or overlap");
        }
        if (!cuts(x, lo, hi, sets[i]).cuts) {
            throw PreconditionFailed("set " + std::to_string(i) + " does not cut the walls of axis " +
                                     std::to_string(i));
        }
        out = out & sets[i];
    }
    return out;
}

namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(std::size_t line, const std::string& msg)
{
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::size_t> parse_dims(const std::string& text, std::size_t line)
{
    std::vector<std::size_t> dims;
    std::string spaced;
    for (std::size_t i = 0; i < text.size(); ++i) {
        // Accept 'x', 'X' and the UTF-8 multiplication sign as separators.
        if (text[i] == 'x' || text[i] == 'X') {
            spaced += ' ';
        } else if (text.compare(i, 2, "\xC3\x97") == 0) {
            spaced += ' ';
            ++i;
        } else {
            spaced += text[i];
        }
    }
    std::istringstream in(spaced);
    std::string tok;
    while (in >> tok) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size() || v == 0) {
            fail(line, "bad grid extent '" + tok + "'");
        }
        dims.push_back(v);
    }
    if (dims.empty()) {
        fail(line, "dims needs at least one extent");
    }
    return dims;
}

} // namespace

GridFixture parse_grid(std::string_view text)
{
    std::vector<std::size_t> dims;
    std::map<char, std::string> tags;
    std::vector<std::pair<std::size_t, std::string>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == ';') {
            continue;
        }
        if (line.rfind("dims:", 0) == 0) {
            if (!dims.empty()) {
                fail(line_no, "dims given twice");
            }
            dims = parse_dims(line.substr(5), line_no);
            continue;
        }
        if (line.rfind("tag:", 0) == 0) {
            auto eq = line.find('=');
            std::string key = trim(std::string_view(line).substr(4, eq == std::string::npos ? 0 : eq - 4));
            if (eq == std::string::npos || key.size() != 1 ||
                !std::isalpha(static_cast<unsigned char>(key[0]))) {
                fail(line_no, "tag needs the form 'tag: Z = A B'");
            }
            std::string members;
            for (char ch : line.substr(eq + 1)) {
                if (!std::isspace(static_cast<unsigned char>(ch))) {
                    if (!std::isalpha(static_cast<unsigned char>(ch))) {
                        fail(line_no, std::string("tag member '") + ch + "' is not a letter");
                    }
                    members += ch;
                }
            }
            if (members.empty()) {
                fail(line_no, "tag has no members");
            }
            tags[key[0]] = members;
            continue;
        }
        if (dims.empty()) {
            fail(line_no, "grid rows before the dims header");
        }
        rows.emplace_back(line_no, line);
    }
    if (dims.empty()) {
        fail(line_no, "missing dims header");
    }
    std::size_t width = dims.back();
    std::size_t expected_rows = 1;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        expected_rows *= dims[i];
    }
    if (rows.size() != expected_rows) {
        fail(line_no, "expected " + std::to_string(expected_rows) + " grid rows, found " +
                          std::to_string(rows.size()));
    }

    std::vector<bool> active(expected_rows * width, false);
    std::map<char, std::vector<Cell>> members;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& [ln, row] = rows[r];
        if (row.size() != width) {
            fail(ln, "row has " + std::to_string(row.size()) + " cells, expected " + std::to_string(width));
        }
        for (std::size_t k = 0; k < width; ++k) {
            char ch = row[k];
            Cell cell = r * width + k;
            if (ch == '#') {
                continue;
            }
            if (ch != '.' && !std::isalpha(static_cast<unsigned char>(ch))) {
                fail(ln, std::string("unexpected cell character '") + ch + "' at column " +
                             std::to_string(k + 1));
            }
            active[cell] = true;
            if (ch == '.') {
                continue;
            }
            auto t = tags.find(ch);
            if (t == tags.end()) {
                members[ch].push_back(cell);
            } else {
                for (char m : t->second) {
                    members[m].push_back(cell);
                }
            }
        }
    }
    GridFixture out{GridSpace(dims, std::move(active)), {}};
    for (auto& [k, cells] : members) {
        out.sets.emplace(k, GridSet(out.space, cells));
    }
    return out;
}

GridFixture load_grid(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open grid file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_grid(ss.str());
}

} // namespace hsv
