#pragma once

// Sufficient criteria for covering and stretching relations, and a sampling
// falsifier for the path-quantified definition.

#include "hsv/dynsys.hpp"
#include "hsv/geometry.hpp"
#include "hsv/verdict.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsv {

enum class CoverMethod { face_covering, boundary, slab, phase, sampled };

std::string_view to_string(CoverMethod m);

/// A labelled enclosure backing a verdict.
struct Evidence {
    std::string label;
    Box value;
};

struct StretchCertificate {
    CoverMethod method = CoverMethod::boundary;
    Verdict status = Verdict::Inconclusive;
    std::optional<OrientedRect> source;
    std::optional<OrientedRect> target;
    /// The compact set K (the source body when not given separately).
    Box k;
    /// Orientation of the image sides is reversed.
    bool swapped = false;
    /// First clause that failed, empty when Certified.
    std::string clause;
    std::vector<Evidence> evidence;
};

/// Face criterion: for j in J the max over the left j-face and the min over
/// the right j-face sandwich [c_j, d_j] (either orientation); for j not in J,
/// psi_j(r1) lies in [c_j, d_j]. Falsified only with point witnesses.
StretchCertificate check_face_covering(const MapSpec& psi, const Box& r1, const Box& r2,
                                       const std::vector<std::size_t>& directions);

/// psi(K) in Y, psi(K_l) and psi(K_r) inside opposite sides of Y. Returns
/// Certified or Inconclusive. Throws NotASlab when k is not a horizontal slab
/// of x.
StretchCertificate check_boundary_stretching(const MapSpec& psi, const OrientedRect& x, const OrientedRect& y,
                                             const std::optional<OrientedRect>& k = std::nullopt);

/// Phase criterion for a component a0 + c trig(2 pi L(x)): the phases on the
/// two sides of x are at least one period apart and [a0 - |c|, a0 + |c|]
/// contains `target`. Throws NotPhaseForm.
StretchCertificate check_phase_covering(const MapSpec& psi, const OrientedRect& x, const Interval& target,
                                        std::size_t component);

struct SamplingOptions {
    std::size_t n_paths = 100;
    std::size_t n_samples = 200;
    std::uint64_t seed = 1;
};

struct SamplingResult {
    bool counterexample = false;
    /// Index of the first path with no spanning sub-path.
    std::size_t path_index = 0;
    std::vector<Point> path;
    std::size_t paths_checked = 0;
};

SamplingResult falsify_by_sampling(const MapSpec& psi, const OrientedRect& x, const OrientedRect& y,
                                   const SamplingOptions& opt = {});

/// Sample paths of the family used by the falsifier (exposed for tests).
std::vector<Point> sample_path(const OrientedRect& x, std::size_t index, std::size_t n_samples,
                               std::uint64_t seed);

} // namespace hsv
