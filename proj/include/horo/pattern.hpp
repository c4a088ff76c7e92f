#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "horo/address.hpp"

// Finite partial colourings (patches) of the tessellation, patterns and
// their occurrences, and the line-based text format they travel in.
//
// A patch doubles as a pattern: its cells are read relative to its first
// cell in (level, offset) order, and an occurrence at base g = (l, o)
// places the cell at relative (d, r) on the tile (l + d, o * 2^d + r).
// For a pattern whose support is U_n this is the usual occurrence of the
// triangle below g.

namespace horo {

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

class Symbol {
  public:
    constexpr Symbol() : v_(kWildcard) {}
    explicit constexpr Symbol(int index) : v_(index) {}
    static constexpr Symbol wildcard() { return Symbol(); }

    constexpr bool is_wildcard() const { return v_ == kWildcard; }
    constexpr int index() const { return v_; }

    friend constexpr bool operator==(Symbol, Symbol) = default;
    friend constexpr auto operator<=>(Symbol, Symbol) = default;

  private:
    static constexpr int kWildcard = -1;
    int v_;
};

struct Alphabet {
    std::vector<std::string> names;
    std::optional<int> blank;
    std::optional<int> halfplane;
    std::optional<int> undetermined;

    // Validates names (unique, non-empty, no whitespace, "*" reserved) and
    // designates "?" as the undetermined symbol when present.
    static Alphabet make(std::vector<std::string> names);

    int size() const { return static_cast<int>(names.size()); }
    int index_of(std::string_view name) const;  // -1 when absent
    const std::string& name(Symbol s) const { return names.at(static_cast<std::size_t>(s.index())); }
    Symbol symbol(std::string_view name) const;  // throws on unknown name

    // Same alphabet extended with "?" (designated undetermined) if missing.
    Alphabet with_undetermined() const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

struct Patch {
    Alphabet alphabet;
    std::map<Address, Symbol> cells;
    bool partial = false;  // wildcards permitted only when set

    std::optional<Symbol> at(Address a) const {
        auto it = cells.find(a);
        if (it == cells.end()) return std::nullopt;
        return it->second;
    }
    void set(Address a, Symbol s);
    std::size_t size() const { return cells.size(); }
    bool empty() const { return cells.empty(); }

    // Dyadic translate: every cell (l, o) moves to (l, o + d * 2^(l - anchor))
    // where anchor is the patch's minimum level. Shifts an occurrence base on
    // the anchor row by exactly d.
    Patch translated(std::int64_t d) const;

    friend bool operator==(const Patch&, const Patch&) = default;
};

struct LinearPattern {
    std::int64_t level = 0;
    std::int64_t start = 0;
    std::vector<Symbol> symbols;  // wildcards allowed

    std::int64_t length() const { return static_cast<std::int64_t>(symbols.size()); }
    friend bool operator==(const LinearPattern&, const LinearPattern&) = default;
};

// Trapezoidal region: offsets [left, right) on the top level, doubling each
// row down to bottom (inclusive).
struct Window {
    std::int64_t top = 0;
    std::int64_t bottom = 0;
    std::int64_t left = 0;
    std::int64_t right = 1;

    static Window make(std::int64_t top, std::int64_t bottom, std::int64_t left, std::int64_t right);

    friend bool operator==(const Window&, const Window&) = default;

    std::int64_t row_left(std::int64_t level) const;
    std::int64_t row_right(std::int64_t level) const;
    bool contains(Address a) const;
    long long cell_count() const;
    std::vector<Address> cells() const;  // (level, offset) order
};

// Relative form of a patch used for pattern matching.
struct RelCell {
    std::int64_t dlevel;
    std::int64_t doffset;
    Symbol sym;
};
std::vector<RelCell> pattern_cells(const Patch& p);

// Base and size when the patch's support is exactly some U_n (n >= 1).
struct UnShape {
    Address base;
    int n;
};
std::optional<UnShape> un_shape(const Patch& p);

// Restriction of `patch` to support_un(n, base); throws std::invalid_argument
// listing the missing addresses if the support is not covered.
Patch extract(const Patch& patch, Address base, int n);

// All bases g inside `patch` such that every determined cell of `p` matches;
// occurrences whose support exits the patch are not reported. A wildcard in
// `p` matches anything; a determined cell of `p` requires an equal determined
// symbol in the patch.
std::vector<Address> appears(const Patch& patch, const Patch& p);

// Row-restricted analogue: start offsets on `level` where the symbol sequence
// of `lp` matches (lp's own level/start are not consulted).
std::vector<std::int64_t> linear_appears(const Patch& patch, const LinearPattern& lp, std::int64_t level);

// Text format (UTF-8, line-based, '#' comments):
//   alphabet: s1 s2 ...
//   halfplane: s            (optional)
//   cell: <level> <offset> <symbol|*>
Patch parse_patch(std::string_view text);
std::string serialize_patch(const Patch& p);

// Linear pattern files share the alphabet header:
//   alphabet: s1 s2 ...
//   linear: <level> <start_offset> <sym sym ...>
struct LinearFile {
    Alphabet alphabet;
    std::vector<LinearPattern> patterns;
};
LinearFile parse_linear_file(std::string_view text);
std::string serialize_linear_file(const LinearFile& f);

}  // namespace horo
