#pragma once

// Symbol sequences, the shift, the sequence metric, and periodic orbits
// realizing symbol itineraries.

#include "hsv/covering.hpp"
#include "hsv/dynsys.hpp"
#include "hsv/miranda.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hsv {

class SymbolWord {
public:
    /// Throws EmptyWord when `letters` is empty, ConstructionError when m < 2
    /// or a letter is out of range.
    SymbolWord(unsigned m, std::vector<unsigned> letters, bool periodic = true);

    /// Digits '0'..'9' then 'a'..'z'.
    static SymbolWord parse(std::string_view text, unsigned m, bool periodic = true);

    [[nodiscard]] unsigned alphabet() const noexcept { return m_; }
    [[nodiscard]] const std::vector<unsigned>& letters() const noexcept { return letters_; }
    [[nodiscard]] std::size_t size() const noexcept { return letters_.size(); }
    [[nodiscard]] bool periodic() const noexcept { return periodic_; }

    /// Letter at position i of the periodic extension (periodic words only).
    [[nodiscard]] unsigned at(long long i) const;

    /// Smallest p with the word equal to its rotation by p.
    [[nodiscard]] std::size_t primitive_period() const;
    /// Lexicographically least rotation.
    [[nodiscard]] SymbolWord canonical_rotation() const;

    [[nodiscard]] std::string str() const;

    friend bool operator==(const SymbolWord&, const SymbolWord&) = default;

private:
    unsigned m_;
    std::vector<unsigned> letters_;
    bool periodic_;
};

/// Left rotation for periodic words; drops the first letter of a window
/// (EmptyWord if nothing would remain).
SymbolWord shift(const SymbolWord& w);

/// Partial sum over |i| <= horizon of |s1_i - s2_i| / m^(|i|+1), widened by
/// the bound 2 m^-(horizon+1) on the remaining terms.
Interval seq_distance(const SymbolWord& s1, const SymbolWord& s2, unsigned horizon);

/// All m^k words of length k in lexicographic order, or the least rotation of
/// each class when up_to_rotation. Throws BudgetExceeded beyond `cap` words.
std::vector<SymbolWord> enumerate_periodic_words(unsigned m, unsigned k, bool up_to_rotation,
                                                 std::size_t cap = std::size_t{1} << 22);

struct StepEvidence {
    Box enclosure;
    bool contained = false;
};

struct OrbitRecord {
    SymbolWord word;
    /// Orbit points z_0 .. z_{k-1}; points[0] carries the Miranda certificate.
    std::vector<Box> points;
    MirandaCertificate certificate;
    /// z_j inside K_{word[j]} for every j, and the image of z_{k-1}.
    std::vector<StepEvidence> itinerary;
};

struct OrbitOptions {
    double tol = 1e-10;
    std::size_t max_boxes = 200000;
    MirandaOptions miranda;
};

struct OrbitResult {
    Verdict status = Verdict::Inconclusive;
    std::optional<OrbitRecord> record;
    std::string reason;
    std::size_t boxes_processed = 0;
};

/// Periodic point with itinerary `word` through the sets `ks`. Existence
/// follows from certified stretching, so failure is reported as
/// Inconclusive, never as absence.
OrbitResult find_periodic_orbit(const MapSpec& psi, const std::vector<Box>& ks, const SymbolWord& word,
                                const OrbitOptions& opt = {});

struct WordResult {
    SymbolWord word;
    OrbitResult orbit;
};

struct PeriodSummary {
    unsigned period = 0;
    std::size_t necklaces = 0;
    std::size_t necklaces_certified = 0;
    /// Itineraries realized by certified orbits (rotations counted).
    std::size_t itineraries_certified = 0;
    std::size_t itineraries_expected = 0;
};

struct ChaosOptions {
    unsigned max_period = 6;
    unsigned workers = 1;
    OrbitOptions orbit;
};

struct ChaosReport {
    std::size_t symbols = 0;
    std::vector<StretchCertificate> stretching;
    std::vector<WordResult> words;
    std::vector<PeriodSummary> periods;
    bool orbits_disjoint = true;
    std::string disjointness_detail;
    std::string entropy_expression;
    Interval entropy;
    Verdict status = Verdict::Inconclusive;
};

/// Throws NotDisjoint when two sets of ks meet, PrerequisiteFailed when fewer
/// than two sets are given or some set fails the stretching check.
ChaosReport chaos_report(const MapSpec& psi, const OrientedRect& x, const std::vector<OrientedRect>& ks,
                         const ChaosOptions& opt = {});

enum class ItineraryVerdict { contained, escaped, inflated };

std::string_view to_string(ItineraryVerdict v);

struct ItineraryResult {
    ItineraryVerdict verdict = ItineraryVerdict::contained;
    /// First failing step, meaningful unless contained.
    std::size_t step = 0;
    double expansion = 1.0;
    std::vector<StepEvidence> steps;
};

/// Forward interval iteration of p for steps 0..steps, checking step j
/// against K_{word[j mod k]}.
ItineraryResult verify_itinerary(const MapSpec& psi, const Box& p, const SymbolWord& word,
                                 const std::vector<Box>& ks, std::size_t steps, std::size_t cap = 100000);

} // namespace hsv
