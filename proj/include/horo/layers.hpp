#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "horo/cft.hpp"
#include "horo/dyadic.hpp"
#include "horo/pattern.hpp"

// The four-layer construction: free content, computation zones, the dyadic
// encoding of the content, and the detection machinery that hunts enumerated
// forbidden patterns on the encoded rows and raises q_f on a hit.
//
// Zone layer conventions: letters are c, a*, b*, a+, a-, b+, b- where c is
// the half-plane region, '*' marks a zone's top row (always a lattice cell),
// '+' a lattice (tape-column) cell and '-' an off-lattice cell. Star rows
// span whole rows; a zone closes by turning the next row into a fresh star
// row of the opposite kind over its own footprint, so widths double at least
// and kinds keep alternating along every row.

namespace horo {

Alphabet zone_alphabet();

// Parent/children triples plus the two horizontal pair families (no letter
// next to c except c; starred next to unstarred) as forbidden patterns.
RuleSet zone_rules();

RowConstraint zone_row_constraint(std::int64_t boundary);

struct Zone {
    char kind;  // 'a' or 'b'
    Address base;
    std::int64_t width = 0;   // cells on the top (star) row
    std::int64_t height = 0;  // rows including the star row, clipped by the window
    bool clipped = false;     // footprint or height cut off by the window

    friend bool operator==(const Zone&, const Zone&) = default;
};

// Maximal same-kind starred runs and their trapezoids, in (level, offset)
// order. Throws std::invalid_argument on malformed layers (mixed star rows,
// kind changes without stars, broken lattice marks).
std::vector<Zone> zones_of(const Patch& layer2);

// Empty when the five reconstructed zone properties hold.
std::vector<std::string> zone_properties_report(const Patch& layer2);

struct ZoneSchedule {
    std::vector<std::int64_t> heights;  // interior rows per generation, each >= 1
    bool auto_mode = false;

    static ZoneSchedule automatic() { return ZoneSchedule{{}, true}; }
    static ZoneSchedule fixed(std::vector<std::int64_t> h) { return ZoneSchedule{std::move(h), false}; }

    // height of generation g; the last entry repeats
    std::int64_t height(std::size_t g) const;
};

// Schedule files: either a single line `auto`, or `zone: <generation>
// close_at <interior rows>` lines.
ZoneSchedule parse_schedule(std::string_view text);
std::string serialize_schedule(const ZoneSchedule& s);

struct FourLayerPatch {
    Window window;
    Patch layer1;  // content over A (halfplane designated)
    Patch layer2;  // zones
    Patch layer3;  // second track of phi(layer1)
    Patch layer4;  // detection trace: d:<sym> tape copies, machine trace, qf

    friend bool operator==(const FourLayerPatch&, const FourLayerPatch&) = default;
};

// Deterministic construction. x must be total on its window, respect rc and
// designate the half-plane symbol; the enumerator's patterns must be
// U_n-shaped over x's alphabet. Each zone restarts the enumerator with
// min(budget, interior rows) units and sweeps the fitting split members over
// its detecting tape (layer 3 on the zone's star row, three zone widths
// wide) at aligned positions; the first hit writes qf at the zone's base.
FourLayerPatch build_layers(const Patch& x, const RowConstraint& rc, const ZoneSchedule& schedule, Enumerator& en,
                            long long budget);

struct LayerViolation {
    Address at;
    std::string rule;

    friend bool operator==(const LayerViolation&, const LayerViolation&) = default;
};

struct LayerReport {
    std::vector<LayerViolation> violations;
    std::vector<Address> qf;

    bool clean() const { return violations.empty(); }
};

// Validates every cross-layer rule by direct checks and by replaying the
// deterministic construction: half-plane closure of layer 1, the c region
// matching it, zone structure, layer 3 equal to the encoding of layer 1, and
// layer 4 equal to the replayed detection trace. q_f cells are reported
// separately as the terminal detections.
LayerReport check_layers(const FourLayerPatch& flp, Enumerator& en, long long budget);

// First-layer projection.
Patch project(const FourLayerPatch& flp);

// The window a total patch covers; throws when the cells are not exactly a
// trapezoid.
Window infer_window(const Patch& x);

// Four patch blocks introduced by `layer: 1` .. `layer: 4`.
FourLayerPatch parse_layers(std::string_view text);
std::string serialize_layers(const FourLayerPatch& flp);

}  // namespace horo
