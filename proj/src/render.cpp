#include "horo/render.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace horo {

namespace {

const char* kPalette[] = {"#e8e8e8", "#4477aa", "#ee6677", "#228833", "#ccbb44",
                          "#66ccee", "#aa3377", "#bbbbbb", "#222255", "#997700"};

std::string num(long long v) { return std::to_string(v); }

}  // namespace

RenderOptions RenderOptions::palette_for(const Alphabet& a) {
    RenderOptions o;
    for (std::size_t i = 0; i < a.names.size(); ++i)
        o.fills[a.names[i]] = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    return o;
}

std::string render_svg(const Patch& patch, const RenderOptions& opts) {
    std::string svg;
    if (patch.cells.empty()) {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1\" height=\"1\"></svg>\n";
    }
    std::int64_t top = patch.cells.begin()->first.level;
    std::int64_t bottom = patch.cells.rbegin()->first.level;
    int depth = static_cast<int>(bottom - top);
    if (depth > 24) throw std::invalid_argument("render: patch too deep for the schematic layout");
    // integer layout: a cell on row l spans 2^(bottom-l) units
    long long unit_h = std::max<long long>(2, static_cast<long long>((std::int64_t{1} << depth) * opts.aspect));
    long long min_x = std::numeric_limits<long long>::max();
    long long max_x = std::numeric_limits<long long>::min();
    for (const auto& [a, s] : patch.cells) {
        (void)s;
        long long wcell = std::int64_t{1} << (bottom - a.level);
        min_x = std::min(min_x, a.offset * wcell);
        max_x = std::max(max_x, (a.offset + 1) * wcell);
    }
    long long width = max_x - min_x;
    long long height = (depth + 1) * unit_h;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(width) + " " + num(height) +
           "\" width=\"" + num(width) + "\" height=\"" + num(height) + "\">\n";
    for (const auto& [a, s] : patch.cells) {
        std::string name = s.is_wildcard() ? "*" : patch.alphabet.name(s);
        std::string fill = "#ffffff";
        if (!s.is_wildcard()) {
            auto it = opts.fills.find(name);
            if (it == opts.fills.end()) throw std::invalid_argument("render: no fill for symbol '" + name + "'");
            fill = it->second;
        }
        long long wcell = std::int64_t{1} << (bottom - a.level);
        long long x = a.offset * wcell - min_x;
        long long y = (a.level - top) * unit_h;
        long long notch = unit_h / 5;
        // pentagon: flat top, shallow point at the bottom centre
        svg += "<polygon points=\"" + num(x) + "," + num(y) + " " + num(x + wcell) + "," + num(y) + " " +
               num(x + wcell) + "," + num(y + unit_h - notch) + " " + num(x + wcell / 2) + "," + num(y + unit_h) +
               " " + num(x) + "," + num(y + unit_h - notch) + "\" fill=\"" + fill +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        bool hp = patch.alphabet.halfplane && !s.is_wildcard() && s.index() == *patch.alphabet.halfplane;
        if (hp && opts.double_top_edge) {
            svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(y + notch / 2 + 1) + "\" x2=\"" + num(x + wcell) +
                   "\" y2=\"" + num(y + notch / 2 + 1) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        }
        if (opts.show_labels) {
            svg += "<text x=\"" + num(x + wcell / 2) + "\" y=\"" + num(y + unit_h / 2) +
                   "\" font-size=\"" + num(std::max<long long>(1, unit_h / 3)) +
                   "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" + name + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace horo
