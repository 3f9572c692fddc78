#pragma once

// Zero certification by opposite-face sign conditions, branch-and-prune zero
// search, and connected zero branches of (N-1)-dimensional fields.

#include "hsv/dynsys.hpp"
#include "hsv/geometry.hpp"
#include "hsv/verdict.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hsv {

/// F_i <= 0 on the left i-face and >= 0 on the right one, or the reverse.
enum class SignPattern { neg_to_pos, pos_to_neg };

std::string_view to_string(SignPattern p);

using Matrix = std::vector<std::vector<double>>;

struct FaceEnclosure {
    std::size_t axis = 0;
    Side side = Side::left;
    /// Hull of the component enclosures over the face pieces.
    Interval value;
    /// True when the sign holds strictly (bounded away from zero).
    bool strict = false;
    std::size_t pieces = 1;
};

struct MirandaCertificate {
    Box box;
    std::vector<SignPattern> pattern;
    std::vector<FaceEnclosure> faces;
    /// Constant nonsingular matrix A; the conditions were checked for A F.
    std::optional<Matrix> preconditioner;
    /// Interval determinant of the preconditioner, excludes zero.
    std::optional<Interval> determinant;
};

struct MirandaOptions {
    /// Required pattern; detected per axis when absent.
    std::optional<std::vector<SignPattern>> pattern;
    bool precondition = true;
    /// Use exactly this preconditioner (used for replay).
    std::optional<Matrix> preconditioner;
    /// Face pieces allowed per face during adaptive subdivision.
    std::size_t max_face_pieces = 2048;
};

struct MirandaResult {
    Verdict status = Verdict::Inconclusive;
    std::optional<MirandaCertificate> certificate;
    std::string reason;

    explicit operator bool() const noexcept { return status == Verdict::Certified; }
};

/// Never returns Falsified: failure to certify is Inconclusive.
MirandaResult check_miranda(const MapSpec& f, const Box& b, const MirandaOptions& opt = {});

/// Re-runs the stored check and compares every stored face enclosure.
bool replay_miranda(const MapSpec& f, const MirandaCertificate& cert);

enum class ZeroStatus { certified, candidate };

std::string_view to_string(ZeroStatus s);

struct ZeroEnclosure {
    Box box;
    ZeroStatus status = ZeroStatus::candidate;
    std::optional<MirandaCertificate> certificate;
    /// Part of a cluster too wide to be a single isolated zero.
    bool non_isolated = false;
};

struct ZeroSearchOptions {
    double tol = 1e-9;
    std::size_t max_boxes = 200000;
    MirandaOptions miranda;
};

struct ZeroSearchResult {
    /// Sorted by lower corner.
    std::vector<ZeroEnclosure> zeros;
    bool budget_exceeded = false;
    /// Boxes left unexplored when the budget ran out.
    std::vector<Box> unresolved;
    std::size_t boxes_processed = 0;
};

ZeroSearchResult find_zeros(const MapSpec& f, const Box& search, const ZeroSearchOptions& opt = {});

/// find_zeros on psi(x) - x.
ZeroSearchResult find_fixed_points(const MapSpec& psi, const Box& search, const ZeroSearchOptions& opt = {});

struct Adjacency {
    /// The two cells differ along this axis; the shared facet lies at `at`.
    std::size_t axis = 0;
    double at = 0.0;
};

struct BranchChain {
    std::vector<Box> boxes;
    std::vector<Adjacency> adjacency;
    bool touches_lo = false;
    bool touches_hi = false;
};

struct BranchOptions {
    double cell = 1.0 / 64.0;
    /// A cell is kept when every component enclosure meets [-tol, tol].
    double tol = 0.0;
    std::size_t max_cells = std::size_t{1} << 22;
    std::size_t max_face_pieces = 2048;
};

struct BranchResult {
    Verdict status = Verdict::Inconclusive;
    std::optional<BranchChain> chain;
    std::size_t cells_total = 0;
    std::size_t cells_kept = 0;
    /// Face sign pattern of each constrained axis.
    std::vector<SignPattern> pattern;
    std::string reason;
};

/// F maps N dims to N-1; `lambda_axis` is the parameter axis. Throws
/// HypothesisFailed when the strict face signs cannot be certified.
BranchResult track_zero_branch(const MapSpec& f, const Box& search, std::size_t lambda_axis,
                               const BranchOptions& opt = {});

} // namespace hsv
