#pragma once

#include <map>
#include <string>

#include "horo/pattern.hpp"

// Schematic SVG rendering in the upper-half-plane style: one pentagon-like
// cell per address, rows below the top drawn at half the width of the row
// above. Deterministic byte output for fixed inputs.

namespace horo {

struct RenderOptions {
    double aspect = 0.75;  // row height as a fraction of the top row's cell width
    std::map<std::string, std::string> fills;  // symbol name -> fill colour
    bool show_labels = false;
    bool double_top_edge = true;  // draw half-plane cells with a doubled top edge

    // evenly spread default palette covering the alphabet
    static RenderOptions palette_for(const Alphabet& a);
};

// Throws std::invalid_argument when the colour map misses a symbol that
// occurs in the patch.
std::string render_svg(const Patch& patch, const RenderOptions& opts);

}  // namespace horo
