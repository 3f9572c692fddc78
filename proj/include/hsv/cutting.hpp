#pragma once

// Discrete laboratory for separating sets on masked cell grids: cuts,
// distance and reachability fields, the sign function f = rho * mu, sides,
// and paths near connected sets. Cells are face-adjacent (2N neighbours).

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsv {

using Cell = std::size_t;
using Coords = std::vector<std::size_t>;

class GridSpace {
public:
    /// `active` has one entry per cell, linear index with axis 0 slowest.
    /// Throws ConstructionError when no cell is active or the active cells
    /// are not face-connected.
    GridSpace(std::vector<std::size_t> dims, std::vector<bool> active);

    static GridSpace full(std::vector<std::size_t> dims);

    [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t size() const noexcept { return active_.size(); }
    [[nodiscard]] std::size_t active_count() const noexcept { return n_active_; }
    [[nodiscard]] bool active(Cell c) const { return active_.at(c); }

    [[nodiscard]] Cell index(const Coords& c) const;
    [[nodiscard]] Coords coords(Cell c) const;
    /// Active face neighbours in axis order, lower side first.
    [[nodiscard]] std::vector<Cell> neighbors(Cell c) const;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> stride_;
    std::vector<bool> active_;
    std::size_t n_active_ = 0;
};

class GridSet {
public:
    GridSet() = default;
    /// Throws ConstructionError when a cell is masked or out of range.
    GridSet(const GridSpace& x, const std::vector<Cell>& cells);

    static GridSet all(const GridSpace& x);
    /// Active cells whose coordinate on `axis` equals `value`.
    static GridSet slice(const GridSpace& x, std::size_t axis, std::size_t value);

    [[nodiscard]] bool contains(Cell c) const { return c < member_.size() && member_[c]; }
    [[nodiscard]] bool empty() const noexcept { return count_ == 0; }
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] std::vector<Cell> cells() const;

    [[nodiscard]] GridSet operator|(const GridSet& o) const;
    [[nodiscard]] GridSet operator&(const GridSet& o) const;
    /// Set difference.
    [[nodiscard]] GridSet operator-(const GridSet& o) const;

    friend bool operator==(const GridSet& a, const GridSet& b);

private:
    std::vector<bool> member_;
    std::size_t count_ = 0;
};

/// Per-cell integer values; masked cells hold 0.
using Field = std::vector<long long>;

struct CutResult {
    bool cuts = false;
    /// When cuts is false: adjacent cells from an a-cell to a b-cell, all outside c.
    std::vector<Cell> witness;
};

/// Throws EmptySet when a or b is empty, SetsIntersect when they meet.
CutResult cuts(const GridSpace& x, const GridSet& a, const GridSet& b, const GridSet& c);

/// Graph distance to c. Throws EmptySet.
Field distance_field(const GridSpace& x, const GridSet& c);

/// 0 on c, -1 on cells reachable from a \ c inside x \ c, +1 elsewhere.
/// Throws EmptySet when a is empty.
Field reach_mu(const GridSpace& x, const GridSet& a, const GridSet& c);

struct CutFunction {
    Field f;
    bool valid = false;
    /// First cell violating f <= 0 on a or f >= 0 on b.
    std::optional<Cell> violation;
};

/// f = rho * mu, with rho taken as 1 everywhere when c is empty.
CutFunction cut_function(const GridSpace& x, const GridSet& a, const GridSet& b, const GridSet& c);

struct Sides {
    GridSet s_a;
    GridSet s_b;
};

Sides side_of(const GridSpace& x, const GridSet& a, const GridSet& b);

/// True when the set is nonempty and face-connected.
bool is_connected(const GridSpace& x, const GridSet& s);

struct NearPath {
    std::vector<Cell> path;
    /// Cell of gamma nearest to c (within `radius`), when c is given and cuts.
    std::optional<Cell> meets_cut;
};

/// Path from a to b within graph distance `radius` of gamma. Throws
/// PreconditionFailed when gamma is disconnected or misses a or b.
std::optional<NearPath> path_near_continuum(const GridSpace& x, const GridSet& gamma, const GridSet& a,
                                            const GridSet& b, std::size_t radius,
                                            const std::optional<GridSet>& c = std::nullopt);

/// Plain intersection of sets[i], each verified to cut the two walls
/// orthogonal to axis i. Throws PreconditionFailed when a check fails.
GridSet intersect_cutting_sets(const GridSpace& x, const std::vector<GridSet>& sets);

struct GridFixture {
    GridSpace space;
    std::map<char, GridSet> sets;
};

/// Text format:
///   dims: 8 x 8
///   tag: Z = A C        (optional; letter Z marks membership in A and C)
///   ........            one line per row, last axis along the line
/// '.' active, '#' masked, letters tag set membership. Blank lines and
/// lines starting with ';' are ignored. Throws ParseError with line numbers.
GridFixture parse_grid(std::string_view text);
GridFixture load_grid(const std::string& path);

} // namespace hsv
