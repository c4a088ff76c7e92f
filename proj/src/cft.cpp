#include "horo/cft.hpp"

#include <algorithm>
#include <limits>
#include <thread>
#include <sstream>
#include <unordered_map>

namespace horo {

namespace {

// Patterns grouped by the relative position of their completion cell (the
// row-major last cell): scanning a patch cell-by-cell and treating each cell
// as a potential completion point visits every fully-contained occurrence
// exactly once.
struct Group {
    std::int64_t cdl;  // completion dlevel
    std::int64_t cdo;  // completion doffset
    std::unordered_map<int, std::vector<std::size_t>> by_symbol;
    std::vector<std::size_t> any_symbol;  // wildcard completion cells
};

struct PatternIndex {
    std::vector<std::vector<RelCell>> cells;  // per rule, row-major sorted
    std::vector<Group> groups;

    explicit PatternIndex(const RuleSet& rules) {
        cells.reserve(rules.forbidden.size());
        for (std::size_t i = 0; i < rules.forbidden.size(); ++i) {
            auto rel = pattern_cells(rules.forbidden[i]);
            // pattern_cells yields map order, already row-major
            const RelCell& last = rel.back();
            Group* g = nullptr;
            for (auto& cand : groups)
                if (cand.cdl == last.dlevel && cand.cdo == last.doffset) g = &cand;
            if (!g) {
                groups.push_back(Group{last.dlevel, last.doffset, {}, {}});
                g = &groups.back();
            }
            if (last.sym.is_wildcard())
                g->any_symbol.push_back(i);
            else
                g->by_symbol[last.sym.index()].push_back(i);
            cells.push_back(std::move(rel));
        }
    }

    // Base address of the occurrence whose completion cell would sit at `at`,
    // if the dyadic frame admits one.
    static std::optional<Address> base_for(Address at, std::int64_t cdl, std::int64_t cdo) {
        std::int64_t num = at.offset - cdo;
        std::int64_t go = num >> cdl;
        if ((go << cdl) != num) return std::nullopt;
        return Address{at.level - cdl, go};
    }
};

bool same_names(const Alphabet& a, const Alphabet& b) { return a.names == b.names; }

}  // namespace

int RuleSet::max_depth() const {
    int d = 1;
    for (const auto& p : forbidden) {
        if (p.cells.empty()) continue;
        auto span = p.cells.rbegin()->first.level - p.cells.begin()->first.level + 1;
        d = std::max(d, static_cast<int>(span));
    }
    return d;
}

void RuleSet::add(Patch p) {
    if (p.cells.empty()) throw std::invalid_argument("empty forbidden pattern");
    if (!same_names(p.alphabet, alphabet)) throw std::invalid_argument("forbidden pattern alphabet mismatch");
    for (const auto& [a, s] : p.cells) {
        (void)a;
        if (!s.is_wildcard() && s.index() >= alphabet.size())
            throw std::invalid_argument("forbidden pattern symbol out of range");
    }
    forbidden.push_back(std::move(p));
}

std::vector<Violation> check(const Patch& patch, const RuleSet& rules, int jobs) {
    if (!same_names(patch.alphabet, rules.alphabet)) throw std::invalid_argument("check: alphabet mismatch");
    std::vector<Violation> out;
    if (rules.forbidden.empty()) return out;
    PatternIndex index(rules);
    auto scan_cell = [&](Address at, Symbol sym, std::vector<Violation>& sink) {
        auto try_rule = [&](std::size_t r, Address base) {
            for (const RelCell& c : index.cells[r]) {
                auto got = patch.at(Address{base.level + c.dlevel, (base.offset << c.dlevel) + c.doffset});
                if (!got) return;  // not fully inside
                if (!c.sym.is_wildcard() && *got != c.sym) return;
            }
            sink.push_back(Violation{r, base});
        };
        for (const Group& g : index.groups) {
            auto base = PatternIndex::base_for(at, g.cdl, g.cdo);
            if (!base) continue;
            if (!sym.is_wildcard()) {
                if (auto it = g.by_symbol.find(sym.index()); it != g.by_symbol.end())
                    for (std::size_t r : it->second) try_rule(r, *base);
            }
            for (std::size_t r : g.any_symbol) try_rule(r, *base);
        }
    };
    if (jobs <= 1 || patch.cells.size() < 1024) {
        for (const auto& [at, sym] : patch.cells) scan_cell(at, sym, out);
    } else {
        std::vector<std::pair<Address, Symbol>> cells(patch.cells.begin(), patch.cells.end());
        int workers = std::min<int>(jobs, static_cast<int>(std::thread::hardware_concurrency()));
        workers = std::max(workers, 1);
        std::vector<std::vector<Violation>> parts(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        std::size_t chunk = (cells.size() + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
        for (int wi = 0; wi < workers; ++wi) {
            pool.emplace_back([&, wi] {
                std::size_t lo = static_cast<std::size_t>(wi) * chunk;
                std::size_t hi = std::min(cells.size(), lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) scan_cell(cells[i].first, cells[i].second, parts[static_cast<std::size_t>(wi)]);
            });
        }
        for (auto& th : pool) th.join();
        for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Address> enforce_half_plane(const Patch& patch, const RowConstraint& rc) {
    std::vector<Address> out;
    std::int64_t min_nonhp_level = std::numeric_limits<std::int64_t>::max();
    for (const auto& [a, s] : patch.cells)
        if (!s.is_wildcard() && s != rc.halfplane) min_nonhp_level = std::min(min_nonhp_level, a.level);
    for (const auto& [a, s] : patch.cells) {
        if (s.is_wildcard()) continue;
        if (a.level <= rc.boundary) {
            if (s != rc.halfplane) out.push_back(a);
        } else if (s == rc.halfplane && min_nonhp_level <= a.level) {
            out.push_back(a);
        }
    }
    return out;  // map order is already sorted and unique
}

namespace {

class Solver {
  public:
    Solver(const Window& window, const RuleSet& rules, const std::optional<RowConstraint>& rc, const Patch* seed,
           long long node_budget)
        : window_(window), rules_(rules), rc_(rc), budget_(node_budget), index_(rules) {
        if (seed) {
            if (!same_names(seed->alphabet, rules.alphabet)) throw std::invalid_argument("solve: seed alphabet mismatch");
        }
        if (rc_ && (rc_->halfplane.is_wildcard() || rc_->halfplane.index() >= rules.alphabet.size()))
            throw std::invalid_argument("solve: half-plane symbol not in alphabet");
        row_start_.resize(static_cast<std::size_t>(window.bottom - window.top + 2));
        long long acc = 0;
        for (std::int64_t l = window.top; l <= window.bottom; ++l) {
            row_start_[static_cast<std::size_t>(l - window.top)] = acc;
            acc += window.row_right(l) - window.row_left(l);
        }
        row_start_.back() = acc;
        cells_ = window.cells();
        values_.assign(cells_.size(), -1);
        fixed_.assign(cells_.size(), -1);
        if (seed) {
            for (const auto& [a, s] : seed->cells) {
                if (!window.contains(a)) throw std::invalid_argument("solve: seed cell " + to_string(a) + " outside window");
                if (!s.is_wildcard()) fixed_[index_of(a)] = s.index();
            }
        }
        hp_per_row_.assign(static_cast<std::size_t>(window.bottom - window.top + 1), 0);
    }

    SolveResult first_solution() {
        SolveResult res;
        int verdict = dfs_first(0);
        res.nodes = nodes_;
        if (verdict == 1) {
            res.status = SolveStatus::solved;
            res.patch = snapshot();
        } else if (verdict == 0) {
            res.status = SolveStatus::unsat;
        } else {
            res.status = SolveStatus::budget;
        }
        return res;
    }

    CountResult count(long long limit) {
        limit_ = limit;
        int verdict = dfs_count(0);
        return CountResult{found_, verdict != -1 && found_ < limit_, nodes_};
    }

  private:
    std::size_t index_of(Address a) const {
        return static_cast<std::size_t>(row_start_[static_cast<std::size_t>(a.level - window_.top)] +
                                        (a.offset - window_.row_left(a.level)));
    }

    Patch snapshot() const {
        Patch p;
        p.alphabet = rules_.alphabet;
        for (std::size_t i = 0; i < cells_.size(); ++i) p.cells.emplace(cells_[i], Symbol(values_[i]));
        return p;
    }

    bool completion_ok(std::size_t at) const {
        Address a = cells_[at];
        for (const Group& g : index_.groups) {
            auto base = PatternIndex::base_for(a, g.cdl, g.cdo);
            if (!base) continue;
            if (auto it = g.by_symbol.find(values_[at]); it != g.by_symbol.end())
                for (std::size_t r : it->second)
                    if (occurrence_matches(r, *base)) return false;
            for (std::size_t r : g.any_symbol)
                if (occurrence_matches(r, *base)) return false;
        }
        return true;
    }

    bool occurrence_matches(std::size_t r, Address base) const {
        for (const RelCell& c : index_.cells[r]) {
            Address t{base.level + c.dlevel, (base.offset << c.dlevel) + c.doffset};
            if (!window_.contains(t)) return false;  // not fully inside the window
            int v = values_[index_of(t)];
            if (v < 0) return false;  // cell not yet assigned: occurrence completes later
            if (!c.sym.is_wildcard() && v != c.sym.index()) return false;
        }
        return true;
    }

    bool halfplane_ok(std::size_t at) const {
        if (!rc_) return true;
        Address a = cells_[at];
        int hp = rc_->halfplane.index();
        if (values_[at] == hp) {
            if (a.level <= rc_->boundary) return true;
            return nonhp_count_ == 0;
        }
        if (a.level <= rc_->boundary) return false;
        return hp_per_row_[static_cast<std::size_t>(a.level - window_.top)] == 0;
    }

    void note_assign(std::size_t at) {
        if (!rc_) return;
        if (values_[at] == rc_->halfplane.index())
            ++hp_per_row_[static_cast<std::size_t>(cells_[at].level - window_.top)];
        else
            ++nonhp_count_;
    }

    void note_unassign(std::size_t at) {
        if (!rc_) return;
        if (values_[at] == rc_->halfplane.index())
            --hp_per_row_[static_cast<std::size_t>(cells_[at].level - window_.top)];
        else
            --nonhp_count_;
    }

    // returns 1 = found, 0 = exhausted, -1 = budget
    int dfs_first(std::size_t at) {
        if (at == cells_.size()) return 1;
        int lo = 0, hi = rules_.alphabet.size() - 1;
        if (fixed_[at] >= 0) lo = hi = fixed_[at];
        for (int s = lo; s <= hi; ++s) {
            if (++nodes_ > budget_) return -1;
            values_[at] = s;
            if (halfplane_ok(at) && completion_ok(at)) {
                note_assign(at);
                int sub = dfs_first(at + 1);
                note_unassign(at);
                if (sub != 0) {
                    if (sub == 1) return 1;
                    values_[at] = -1;
                    return -1;
                }
            }
            values_[at] = -1;
        }
        return 0;
    }

    int dfs_count(std::size_t at) {
        if (at == cells_.size()) {
            ++found_;
            return found_ >= limit_ ? 1 : 0;
        }
        int lo = 0, hi = rules_.alphabet.size() - 1;
        if (fixed_[at] >= 0) lo = hi = fixed_[at];
        for (int s = lo; s <= hi; ++s) {
            if (++nodes_ > budget_) return -1;
            values_[at] = s;
            if (halfplane_ok(at) && completion_ok(at)) {
                note_assign(at);
                int sub = dfs_count(at + 1);
                note_unassign(at);
                if (sub != 0) {
                    values_[at] = -1;
                    return sub;
                }
            }
            values_[at] = -1;
        }
        return 0;
    }

    Window window_;
    const RuleSet& rules_;
    std::optional<RowConstraint> rc_;
    long long budget_;
    PatternIndex index_;
    std::vector<long long> row_start_;
    std::vector<Address> cells_;
    std::vector<int> values_;
    std::vector<int> fixed_;
    std::vector<int> hp_per_row_;
    long long nonhp_count_ = 0;
    long long nodes_ = 0;
    long long found_ = 0;
    long long limit_ = 2;
};

}  // namespace

SolveResult solve(const Window& window, const RuleSet& rules, const std::optional<RowConstraint>& rc,
                  const Patch* seed, long long node_budget) {
    Solver s(window, rules, rc, seed, node_budget);
    return s.first_solution();
}

CountResult count_solutions(const Window& window, const RuleSet& rules, const std::optional<RowConstraint>& rc,
                            const Patch* seed, long long limit, long long node_budget) {
    Solver s(window, rules, rc, seed, node_budget);
    return s.count(limit);
}

RuleSet limit_enumerator(Enumerator& e, long long budget) {
    e.reset();
    RuleSet rules;
    rules.alphabet = e.alphabet();
    while (auto p = e.next(budget)) rules.add(std::move(*p));
    return rules;
}

RuleSet parse_rules(std::string_view text) {
    RuleSet rules;
    bool have_alphabet = false;
    bool in_block = false;
    std::string block;  // patch-format lines of the current block
    int line_no = 0;
    int block_line = 0;
    std::string_view rest = text;
    auto flush = [&]() {
        Patch p;
        try {
            std::string body = "alphabet:";
            for (const auto& n : rules.alphabet.names) body += " " + n;
            body += "\n" + block;
            p = parse_patch(body);
        } catch (const ParseError& e) {
            throw ParseError(block_line, std::string("in forbidden block: ") + e.what());
        }
        if (p.cells.empty()) throw ParseError(block_line, "empty forbidden block");
        rules.add(std::move(p));
        block.clear();
    };
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        std::string line(rest.substr(0, nl));
        rest.remove_prefix(nl == std::string_view::npos ? rest.size() : nl + 1);
        ++line_no;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (line[b] == '#') continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        std::istringstream in(line);
        std::string head;
        in >> head;
        if (head == "alphabet:") {
            if (have_alphabet) throw ParseError(line_no, "duplicate alphabet line");
            std::vector<std::string> names;
            std::string tok;
            while (in >> tok) names.push_back(tok);
            try {
                rules.alphabet = Alphabet::make(std::move(names));
            } catch (const std::invalid_argument& err) {
                throw ParseError(line_no, err.what());
            }
            have_alphabet = true;
        } else if (head == "forbidden") {
            std::string brace, extra;
            in >> brace;
            if (brace != "{" || (in >> extra)) throw ParseError(line_no, "expected 'forbidden {'");
            if (!have_alphabet) throw ParseError(line_no, "forbidden block before alphabet");
            if (in_block) throw ParseError(line_no, "nested forbidden block");
            in_block = true;
            block_line = line_no;
        } else if (head == "}") {
            if (!in_block) throw ParseError(line_no, "unmatched '}'");
            in_block = false;
            flush();
        } else if (head == "cell:") {
            if (!in_block) throw ParseError(line_no, "cell: outside a forbidden block");
            block += line + "\n";
        } else if (head == "linear:") {
            if (!in_block) throw ParseError(line_no, "linear: outside a forbidden block");
            // sugar: linear: <level> <offset> <syms...> expands to one row of cells
            std::string ltok, otok, sym;
            in >> ltok >> otok;
            std::int64_t lvl, off;
            try {
                lvl = std::stoll(ltok);
                off = std::stoll(otok);
            } catch (...) {
                throw ParseError(line_no, "linear: expects <level> <start> <syms...>");
            }
            bool any = false;
            while (in >> sym) {
                block += "cell: " + std::to_string(lvl) + " " + std::to_string(off++) + " " + sym + "\n";
                any = true;
            }
            if (!any) throw ParseError(line_no, "linear: expects at least one symbol");
        } else {
            throw ParseError(line_no, "unknown directive '" + head + "'");
        }
    }
    if (in_block) throw ParseError(line_no, "unterminated forbidden block");
    if (!have_alphabet) throw ParseError(line_no, "missing alphabet line");
    return rules;
}

std::string serialize_rules(const RuleSet& rules) {
    std::string out = "alphabet:";
    for (const auto& n : rules.alphabet.names) out += " " + n;
    out += "\n";
    for (const auto& p : rules.forbidden) {
        out += "forbidden {\n";
        for (const auto& [a, s] : p.cells) {
            out += "cell: " + std::to_string(a.level) + " " + std::to_string(a.offset) + " ";
            out += s.is_wildcard() ? "*" : rules.alphabet.name(s);
            out += "\n";
        }
        out += "}\n";
    }
    return out;
}

}  // namespace horo
