#include "horo/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace horo {

namespace {

std::int64_t shl_checked(std::int64_t v, std::int64_t k) {
    if (k < 0 || k > 62) throw std::overflow_error("dyadic shift out of range");
    std::int64_t r = v;
    for (std::int64_t i = 0; i < k; ++i) {
        if (__builtin_mul_overflow(r, std::int64_t{2}, &r)) throw std::overflow_error("offset overflow");
    }
    return r;
}

bool has_space(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Alphabet Alphabet::make(std::vector<std::string> names) {
    Alphabet a;
    a.names = std::move(names);
    if (a.names.empty()) throw std::invalid_argument("alphabet must be non-empty");
    for (std::size_t i = 0; i < a.names.size(); ++i) {
        const std::string& n = a.names[i];
        if (n.empty() || has_space(n)) throw std::invalid_argument("bad symbol name '" + n + "'");
        if (n == "*") throw std::invalid_argument("'*' is reserved for wildcards");
        for (std::size_t j = 0; j < i; ++j)
            if (a.names[j] == n) throw std::invalid_argument("duplicate symbol '" + n + "'");
        if (n == "?") a.undetermined = static_cast<int>(i);
    }
    return a;
}

int Alphabet::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

Symbol Alphabet::symbol(std::string_view name) const {
    int i = index_of(name);
    if (i < 0) throw std::invalid_argument("unknown symbol '" + std::string(name) + "'");
    return Symbol(i);
}

Alphabet Alphabet::with_undetermined() const {
    if (undetermined) return *this;
    Alphabet a = *this;
    a.names.push_back("?");
    a.undetermined = a.size() - 1;
    return a;
}

void Patch::set(Address a, Symbol s) {
    if (s.is_wildcard()) {
        if (!partial) throw std::invalid_argument("wildcard cell in a non-partial patch");
    } else if (s.index() >= alphabet.size()) {
        throw std::invalid_argument("symbol index out of range");
    }
    auto [it, inserted] = cells.emplace(a, s);
    if (!inserted) throw std::invalid_argument("duplicate cell at " + to_string(a));
}

Patch Patch::translated(std::int64_t d) const {
    Patch out;
    out.alphabet = alphabet;
    out.partial = partial;
    if (cells.empty()) return out;
    std::int64_t anchor = cells.begin()->first.level;
    for (const auto& [a, s] : cells) {
        std::int64_t shift = shl_checked(d, a.level - anchor);
        out.cells.emplace(Address{a.level, a.offset + shift}, s);
    }
    return out;
}

Window Window::make(std::int64_t top, std::int64_t bottom, std::int64_t left, std::int64_t right) {
    if (top > bottom) throw std::invalid_argument("window: top must be <= bottom");
    if (left >= right) throw std::invalid_argument("window: left must be < right");
    return Window{top, bottom, left, right};
}

std::int64_t Window::row_left(std::int64_t level) const { return shl_checked(left, level - top); }
std::int64_t Window::row_right(std::int64_t level) const { return shl_checked(right, level - top); }

bool Window::contains(Address a) const {
    if (a.level < top || a.level > bottom) return false;
    return a.offset >= row_left(a.level) && a.offset < row_right(a.level);
}

long long Window::cell_count() const {
    long long total = 0;
    for (std::int64_t l = top; l <= bottom; ++l) total += row_right(l) - row_left(l);
    return total;
}

std::vector<Address> Window::cells() const {
    std::vector<Address> out;
    out.reserve(static_cast<std::size_t>(cell_count()));
    for (std::int64_t l = top; l <= bottom; ++l)
        for (std::int64_t o = row_left(l); o < row_right(l); ++o) out.push_back(Address{l, o});
    return out;
}

std::vector<RelCell> pattern_cells(const Patch& p) {
    std::vector<RelCell> out;
    if (p.cells.empty()) return out;
    Address base = p.cells.begin()->first;
    out.reserve(p.cells.size());
    for (const auto& [a, s] : p.cells) {
        std::int64_t d = a.level - base.level;
        if (d < 0) throw std::invalid_argument("pattern cell above its base");
        out.push_back(RelCell{d, a.offset - shl_checked(base.offset, d), s});
    }
    return out;
}

std::optional<UnShape> un_shape(const Patch& p) {
    if (p.cells.empty()) return std::nullopt;
    Address base = p.cells.begin()->first;
    std::int64_t levels = p.cells.rbegin()->first.level - base.level + 1;
    if (levels < 1 || levels > 62) return std::nullopt;
    int n = static_cast<int>(levels);
    if (p.cells.size() != (std::size_t{1} << n) - 1) return std::nullopt;
    auto it = p.cells.begin();
    for (int r = 0; r < n; ++r) {
        std::int64_t start = shl_checked(base.offset, r);
        for (std::int64_t q = 0; q < (std::int64_t{1} << r); ++q, ++it) {
            if (it == p.cells.end()) return std::nullopt;
            if (it->first != Address{base.level + r, start + q}) return std::nullopt;
        }
    }
    return UnShape{base, n};
}

Patch extract(const Patch& patch, Address base, int n) {
    Patch out;
    out.alphabet = patch.alphabet;
    out.partial = patch.partial;
    std::string missing;
    for (Address a : support_un(n, base)) {
        auto s = patch.at(a);
        if (!s) {
            if (!missing.empty()) missing += ", ";
            missing += to_string(a);
            continue;
        }
        out.cells.emplace(a, *s);
    }
    if (!missing.empty()) throw std::invalid_argument("extract: missing cells " + missing);
    return out;
}

std::vector<Address> appears(const Patch& patch, const Patch& p) {
    std::vector<Address> out;
    auto rel = pattern_cells(p);
    if (rel.empty()) return out;
    for (const auto& [g, unused] : patch.cells) {
        (void)unused;
        bool ok = true;
        for (const RelCell& c : rel) {
            std::int64_t off;
            try {
                off = shl_checked(g.offset, c.dlevel) + c.doffset;
            } catch (const std::overflow_error&) {
                ok = false;
                break;
            }
            auto s = patch.at(Address{g.level + c.dlevel, off});
            if (!s) {
                ok = false;  // support exits the patch
                break;
            }
            if (!c.sym.is_wildcard() && *s != c.sym) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(g);
    }
    return out;
}

std::vector<std::int64_t> linear_appears(const Patch& patch, const LinearPattern& lp, std::int64_t level) {
    std::vector<std::int64_t> out;
    if (lp.symbols.empty()) return out;
    auto lo = patch.cells.lower_bound(Address{level, std::numeric_limits<std::int64_t>::min()});
    auto hi = patch.cells.lower_bound(Address{level + 1, std::numeric_limits<std::int64_t>::min()});
    for (auto it = lo; it != hi; ++it) {
        std::int64_t s = it->first.offset;
        bool ok = true;
        for (std::int64_t i = 0; i < lp.length(); ++i) {
            auto cell = patch.at(Address{level, s + i});
            if (!cell) {
                ok = false;
                break;
            }
            Symbol want = lp.symbols[static_cast<std::size_t>(i)];
            if (!want.is_wildcard() && *cell != want) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(s);
    }
    return out;
}

namespace {

struct LineReader {
    std::string_view text;
    int line_no = 0;

    // comments are whole lines starting with '#' ('#' may appear inside
    // symbol names, e.g. machine blanks)
    std::optional<std::pair<int, std::string>> next() {
        while (!text.empty()) {
            auto nl = text.find('\n');
            std::string line(text.substr(0, nl));
            text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
            ++line_no;
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            if (line[b] == '#') continue;
            auto e = line.find_last_not_of(" \t\r");
            return std::make_pair(line_no, line.substr(b, e - b + 1));
        }
        return std::nullopt;
    }
};

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::int64_t parse_int(const std::string& tok, int line) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError(line, "expected an integer, got '" + tok + "'");
    }
}

}  // namespace

Patch parse_patch(std::string_view text) {
    LineReader rd{text};
    Patch p;
    bool have_alphabet = false;
    std::optional<std::string> halfplane_name;
    struct PendingCell {
        int line;
        Address addr;
        std::string sym;
    };
    std::vector<PendingCell> pending;
    while (auto ln = rd.next()) {
        auto [no, line] = *ln;
        auto toks = split_ws(line);
        if (toks[0] == "alphabet:") {
            if (have_alphabet) throw ParseError(no, "duplicate alphabet line");
            try {
                p.alphabet = Alphabet::make({toks.begin() + 1, toks.end()});
            } catch (const std::invalid_argument& e) {
                throw ParseError(no, e.what());
            }
            have_alphabet = true;
        } else if (toks[0] == "halfplane:") {
            if (toks.size() != 2) throw ParseError(no, "halfplane: expects one symbol");
            halfplane_name = toks[1];
        } else if (toks[0] == "cell:") {
            if (toks.size() != 4) throw ParseError(no, "cell: expects <level> <offset> <symbol>");
            pending.push_back({no, Address{parse_int(toks[1], no), parse_int(toks[2], no)}, toks[3]});
        } else {
            throw ParseError(no, "unknown directive '" + toks[0] + "'");
        }
    }
    if (!have_alphabet) throw ParseError(rd.line_no, "missing alphabet line");
    if (halfplane_name) {
        int i = p.alphabet.index_of(*halfplane_name);
        if (i < 0) throw ParseError(1, "halfplane symbol '" + *halfplane_name + "' not in alphabet");
        p.alphabet.halfplane = i;
    }
    for (const auto& c : pending)
        if (c.sym == "*") {
            p.partial = true;
            break;
        }
    for (const auto& c : pending) {
        Symbol s = Symbol::wildcard();
        if (c.sym != "*") {
            int i = p.alphabet.index_of(c.sym);
            if (i < 0) throw ParseError(c.line, "unknown symbol '" + c.sym + "'");
            s = Symbol(i);
        }
        try {
            p.set(c.addr, s);
        } catch (const std::invalid_argument& e) {
            throw ParseError(c.line, e.what());
        }
    }
    return p;
}

std::string serialize_patch(const Patch& p) {
    std::string out = "alphabet:";
    for (const auto& n : p.alphabet.names) out += " " + n;
    out += "\n";
    if (p.alphabet.halfplane) out += "halfplane: " + p.alphabet.names[static_cast<std::size_t>(*p.alphabet.halfplane)] + "\n";
    for (const auto& [a, s] : p.cells) {
        out += "cell: " + std::to_string(a.level) + " " + std::to_string(a.offset) + " ";
        out += s.is_wildcard() ? "*" : p.alphabet.name(s);
        out += "\n";
    }
    return out;
}

LinearFile parse_linear_file(std::string_view text) {
    LineReader rd{text};
    LinearFile f;
    bool have_alphabet = false;
    while (auto ln = rd.next()) {
        auto [no, line] = *ln;
        auto toks = split_ws(line);
        if (toks[0] == "alphabet:") {
            if (have_alphabet) throw ParseError(no, "duplicate alphabet line");
            try {
                f.alphabet = Alphabet::make({toks.begin() + 1, toks.end()});
            } catch (const std::invalid_argument& e) {
                throw ParseError(no, e.what());
            }
            have_alphabet = true;
        } else if (toks[0] == "linear:") {
            if (!have_alphabet) throw ParseError(no, "linear: before alphabet");
            if (toks.size() < 4) throw ParseError(no, "linear: expects <level> <start> <sym...>");
            LinearPattern lp;
            lp.level = parse_int(toks[1], no);
            lp.start = parse_int(toks[2], no);
            for (std::size_t i = 3; i < toks.size(); ++i) {
                if (toks[i] == "*") {
                    lp.symbols.push_back(Symbol::wildcard());
                } else {
                    int idx = f.alphabet.index_of(toks[i]);
                    if (idx < 0) throw ParseError(no, "unknown symbol '" + toks[i] + "'");
                    lp.symbols.push_back(Symbol(idx));
                }
            }
            f.patterns.push_back(std::move(lp));
        } else {
            throw ParseError(no, "unknown directive '" + toks[0] + "'");
        }
    }
    if (!have_alphabet) throw ParseError(rd.line_no, "missing alphabet line");
    return f;
}

std::string serialize_linear_file(const LinearFile& f) {
    std::string out = "alphabet:";
    for (const auto& n : f.alphabet.names) out += " " + n;
    out += "\n";
    for (const auto& lp : f.patterns) {
        out += "linear: " + std::to_string(lp.level) + " " + std::to_string(lp.start);
        for (Symbol s : lp.symbols) out += " " + (s.is_wildcard() ? std::string("*") : f.alphabet.name(s));
        out += "\n";
    }
    return out;
}

}  // namespace horo
