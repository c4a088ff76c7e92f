#include "horo/layers.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "horo/turing.hpp"

namespace horo {

namespace {

struct ZoneTok {
    bool is_c = false;
    char kind = 0;  // 'a' or 'b'
    bool star = false;
    bool marked = false;  // lattice coordinate
};

ZoneTok parse_zone_tok(const std::string& name) {
    if (name == "c") return {true, 0, false, false};
    if (name.size() == 2 && (name[0] == 'a' || name[0] == 'b')) {
        if (name[1] == '*') return {false, name[0], true, true};
        if (name[1] == '+') return {false, name[0], false, true};
        if (name[1] == '-') return {false, name[0], false, false};
    }
    throw std::invalid_argument("not a zone letter: '" + name + "'");
}

int zone_index(char kind, bool star, bool marked) {
    // order must match zone_alphabet(): c a* b* a+ a- b+ b-
    if (star) return kind == 'a' ? 1 : 2;
    if (kind == 'a') return marked ? 3 : 4;
    return marked ? 5 : 6;
}

bool allowed_triple(const ZoneTok& p, const ZoneTok& l, const ZoneTok& r) {
    if (p.is_c) {
        if (l.is_c && r.is_c) return true;
        return l.star && r.star && l.kind == 'a' && r.kind == 'b';
    }
    if (l.is_c || r.is_c) return false;
    if (l.star || r.star) {
        // the zone closes: both children starred, opposite kind, and never
        // directly below the zone's own star row
        if (p.star) return false;
        char flip = p.kind == 'a' ? 'b' : 'a';
        return l.star && r.star && l.kind == flip && r.kind == flip;
    }
    // interior descent: kind inherited, marks lattice-style
    if (l.kind != p.kind || r.kind != p.kind) return false;
    if (r.marked) return false;
    return l.marked == (p.marked || p.star);
}

bool allowed_zone_pair(const ZoneTok& e, const ZoneTok& f) {
    if (e.is_c != f.is_c) return false;
    if (e.star != f.star) return false;
    return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return q * b > a ? q - 1 : q;
}

// ---- shared zone machinery -------------------------------------------------

struct ZonePlanRow {
    std::int64_t star_row;
    std::int64_t width;
    std::int64_t interior;  // rows below the star row belonging to the generation
};

struct DetectionHit {
    std::size_t pattern;
    int k;
    std::int64_t position;
};

Patch rebase_to_origin(const Patch& p) {
    if (p.cells.empty()) return p;
    Address base = p.cells.begin()->first;
    Patch out;
    out.alphabet = p.alphabet;
    out.partial = p.partial;
    for (const auto& [a, s] : p.cells) {
        std::int64_t d = a.level - base.level;
        out.cells.emplace(Address{d, a.offset - (base.offset << d)}, s);
    }
    return out;
}

}  // namespace

Alphabet zone_alphabet() { return Alphabet::make({"c", "a*", "b*", "a+", "a-", "b+", "b-"}); }

RuleSet zone_rules() {
    Alphabet a = zone_alphabet();
    RuleSet rules;
    rules.alphabet = a;
    std::vector<ZoneTok> toks;
    for (const auto& n : a.names) toks.push_back(parse_zone_tok(n));
    for (int p = 0; p < a.size(); ++p)
        for (int l = 0; l < a.size(); ++l)
            for (int r = 0; r < a.size(); ++r) {
                if (allowed_triple(toks[p], toks[l], toks[r])) continue;
                Patch bad;
                bad.alphabet = a;
                bad.cells.emplace(Address{0, 0}, Symbol(p));
                bad.cells.emplace(Address{1, 0}, Symbol(l));
                bad.cells.emplace(Address{1, 1}, Symbol(r));
                rules.add(std::move(bad));
            }
    for (int e = 0; e < a.size(); ++e)
        for (int f = 0; f < a.size(); ++f) {
            if (allowed_zone_pair(toks[e], toks[f])) continue;
            Patch bad;
            bad.alphabet = a;
            bad.cells.emplace(Address{0, 0}, Symbol(e));
            bad.cells.emplace(Address{0, 1}, Symbol(f));
            rules.add(std::move(bad));
        }
    return rules;
}

RowConstraint zone_row_constraint(std::int64_t boundary) {
    return RowConstraint{zone_alphabet().symbol("c"), boundary};
}

std::int64_t ZoneSchedule::height(std::size_t g) const {
    if (heights.empty()) throw std::logic_error("schedule has no heights (auto not resolved)");
    std::int64_t h = heights[std::min(g, heights.size() - 1)];
    if (h < 1) throw std::invalid_argument("schedule heights must be >= 1");
    return h;
}

ZoneSchedule parse_schedule(std::string_view text) {
    ZoneSchedule s;
    std::map<std::int64_t, std::int64_t> entries;
    int line_no = 0;
    std::string_view rest = text;
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
        if (line == "auto") {
            s.auto_mode = true;
            continue;
        }
        std::istringstream in(line);
        std::string head, mid;
        std::int64_t g, h;
        in >> head >> g >> mid >> h;
        if (in.fail() || head != "zone:" || mid != "close_at")
            throw ParseError(line_no, "expected 'zone: <generation> close_at <rows>' or 'auto'");
        if (h < 1) throw ParseError(line_no, "heights must be >= 1");
        entries[g] = h;
    }
    if (s.auto_mode && !entries.empty()) throw ParseError(line_no, "auto and explicit heights are exclusive");
    if (!s.auto_mode) {
        std::int64_t expect = 0;
        for (const auto& [g, h] : entries) {
            if (g != expect++) throw ParseError(line_no, "generations must be 0,1,2,...");
            s.heights.push_back(h);
        }
        if (s.heights.empty()) throw ParseError(line_no, "empty schedule");
    }
    return s;
}

std::string serialize_schedule(const ZoneSchedule& s) {
    if (s.auto_mode) return "auto\n";
    std::string out;
    for (std::size_t g = 0; g < s.heights.size(); ++g)
        out += "zone: " + std::to_string(g) + " close_at " + std::to_string(s.heights[g]) + "\n";
    return out;
}

Window infer_window(const Patch& x) {
    if (x.cells.empty()) throw std::invalid_argument("empty patch has no window");
    std::int64_t top = x.cells.begin()->first.level;
    std::int64_t bottom = x.cells.rbegin()->first.level;
    std::int64_t left = x.cells.begin()->first.offset;
    std::int64_t right = left;
    for (const auto& [a, s] : x.cells) {
        (void)s;
        if (a.level == top) right = std::max(right, a.offset);
    }
    Window w = Window::make(top, bottom, left, right + 1);
    if (static_cast<long long>(x.cells.size()) != w.cell_count())
        throw std::invalid_argument("patch cells do not fill a trapezoidal window");
    for (const auto& [a, s] : x.cells) {
        (void)s;
        if (!w.contains(a)) throw std::invalid_argument("patch cells do not fill a trapezoidal window");
    }
    return w;
}

std::vector<Zone> zones_of(const Patch& layer2) {
    std::vector<Zone> zones;
    if (layer2.cells.empty()) return zones;
    std::vector<ZoneTok> toks;
    for (const auto& n : layer2.alphabet.names) toks.push_back(parse_zone_tok(n));
    auto tok_at = [&](Address a) -> const ZoneTok* {
        auto s = layer2.at(a);
        if (!s || s->is_wildcard()) return nullptr;
        return &toks[static_cast<std::size_t>(s->index())];
    };
    // classify rows and validate uniformity
    std::map<std::int64_t, int> row_class;  // 0 = c, 1 = star, 2 = interior
    std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> row_span;
    for (const auto& [a, s] : layer2.cells) {
        (void)s;
        const ZoneTok* t = tok_at(a);
        if (!t) continue;
        int cls = t->is_c ? 0 : t->star ? 1 : 2;
        auto [it, fresh] = row_class.emplace(a.level, cls);
        if (!fresh && it->second != cls)
            throw std::invalid_argument("malformed zone layer: mixed row at level " + std::to_string(a.level));
        auto [sp, sfresh] = row_span.emplace(a.level, std::make_pair(a.offset, a.offset));
        if (!sfresh) {
            sp->second.first = std::min(sp->second.first, a.offset);
            sp->second.second = std::max(sp->second.second, a.offset);
        }
    }
    bool seen_content = false;
    for (auto& [lvl, cls] : row_class) {
        if (cls != 0) seen_content = true;
        if (cls == 0 && seen_content)
            throw std::invalid_argument("malformed zone layer: c row below content at level " + std::to_string(lvl));
    }
    // vertical consistency: kind changes need stars, marks follow the lattice
    for (const auto& [a, s] : layer2.cells) {
        (void)s;
        const ZoneTok* t = tok_at(a);
        const ZoneTok* p = tok_at({a.level - 1, a.offset >> 1});
        if (!t || !p || t->is_c || p->is_c) continue;
        if (!t->star) {
            if (t->kind != p->kind)
                throw std::invalid_argument("malformed zone layer: kind change without a star at " + to_string(a));
            bool left_child = (a.offset & 1) == 0;
            bool want_mark = left_child && (p->marked || p->star);
            if (t->marked != want_mark)
                throw std::invalid_argument("malformed zone layer: broken lattice mark at " + to_string(a));
        }
    }
    // star runs -> zones
    for (const auto& [lvl, cls] : row_class) {
        if (cls != 1) continue;
        auto [lo, hi] = row_span.at(lvl);
        std::int64_t o = lo;
        while (o <= hi) {
            const ZoneTok* t = tok_at({lvl, o});
            if (!t) throw std::invalid_argument("malformed zone layer: hole in star row at level " + std::to_string(lvl));
            std::int64_t start = o;
            char kind = t->kind;
            while (o <= hi) {
                const ZoneTok* u = tok_at({lvl, o});
                if (!u || u->kind != kind) break;
                ++o;
            }
            Zone z;
            z.kind = kind;
            z.base = {lvl, start};
            z.width = o - start;
            z.clipped = (start == lo || o - 1 == hi);
            std::int64_t h = 1;
            while (true) {
                auto it = row_class.find(lvl + h);
                if (it == row_class.end()) {
                    z.clipped = true;
                    break;
                }
                if (it->second != 2) break;
                ++h;
            }
            z.height = h;
            zones.push_back(z);
        }
    }
    return zones;
}

std::vector<std::string> zone_properties_report(const Patch& layer2) {
    std::vector<std::string> report;
    std::vector<Zone> zones;
    try {
        zones = zones_of(layer2);
    } catch (const std::invalid_argument& e) {
        report.push_back(std::string("structure: ") + e.what());
        return report;
    }
    std::vector<ZoneTok> toks;
    for (const auto& n : layer2.alphabet.names) toks.push_back(parse_zone_tok(n));
    auto tok_at = [&](Address a) -> const ZoneTok* {
        auto s = layer2.at(a);
        if (!s || s->is_wildcard()) return nullptr;
        return &toks[static_cast<std::size_t>(s->index())];
    };
    // P1: the first non-c row alternates a* b* on even/odd offsets
    std::optional<std::int64_t> first_content;
    for (const auto& [a, s] : layer2.cells) {
        (void)s;
        const ZoneTok* t = tok_at(a);
        if (t && !t->is_c) {
            first_content = a.level;
            break;
        }
    }
    if (first_content) {
        for (const auto& [a, s] : layer2.cells) {
            (void)s;
            if (a.level != *first_content) continue;
            const ZoneTok* t = tok_at(a);
            char want = (a.offset & 1) ? 'b' : 'a';
            if (!t || !t->star || t->kind != want) {
                report.push_back("P1: first non-c row is not the alternating star row at " + to_string(a));
                break;
            }
        }
    }
    // P2: cells below a starred cell keep its kind
    for (const auto& [a, s] : layer2.cells) {
        (void)s;
        const ZoneTok* t = tok_at(a);
        if (!t || !t->star) continue;
        for (Address child : {Address{a.level + 1, a.offset * 2}, Address{a.level + 1, a.offset * 2 + 1}}) {
            const ZoneTok* ct = tok_at(child);
            if (ct && (ct->is_c || ct->kind != t->kind)) {
                report.push_back("P2: cell below a starred cell changes type at " + to_string(child));
            }
        }
    }
    // P3: zone widths are powers of two
    for (const Zone& z : zones) {
        if (z.clipped) continue;
        if (z.width < 1 || (z.width & (z.width - 1)) != 0)
            report.push_back("P3: zone at " + to_string(z.base) + " has width " + std::to_string(z.width));
    }
    // P4: kinds alternate along every star row
    for (std::size_t i = 1; i < zones.size(); ++i) {
        if (zones[i].base.level == zones[i - 1].base.level &&
            zones[i].base.offset == zones[i - 1].base.offset + zones[i - 1].width &&
            zones[i].kind == zones[i - 1].kind)
            report.push_back("P4: adjacent zones of equal kind at " + to_string(zones[i].base));
    }
    // P5: vertical kind changes only across star rows
    for (const auto& [a, s] : layer2.cells) {
        (void)s;
        const ZoneTok* t = tok_at(a);
        const ZoneTok* p = tok_at({a.level - 1, a.offset >> 1});
        if (!t || !p || t->is_c || p->is_c) continue;
        if (!t->star && t->kind != p->kind)
            report.push_back("P5: kind change off a star row at " + to_string(a));
    }
    return report;
}

namespace {

// layer-4 detection and trace, shared by build and check

struct Layer4Build {
    Patch layer4;
    std::vector<Address> qf;
};

std::vector<ZonePlanRow> plan_generations(const Window& w, std::int64_t first_row, const ZoneSchedule& schedule,
                                          Enumerator& en, long long budget) {
    // plan.interior counts only the rows visible in the window, so a replay
    // that reads the zone structure back off layer 2 reproduces it exactly
    std::vector<ZonePlanRow> plan;
    std::int64_t row = first_row;
    std::int64_t width = 1;
    std::size_t g = 0;
    while (row <= w.bottom && row - first_row <= 60) {
        std::int64_t h;
        if (schedule.auto_mode) {
            std::int64_t cap = std::max<std::int64_t>(1, w.bottom - row);
            if (auto* me = dynamic_cast<MachineEnumerator*>(&en)) {
                // close once the head would step past the zone's last column
                const TuringMachine& tm = me->machine();
                h = cap;
                std::map<std::int64_t, int> tape;
                std::int64_t head = 0;
                int state = tm.initial;
                for (std::int64_t step = 1; step <= cap; ++step) {
                    if (tm.is_halting(state)) break;
                    int read = tape.count(head) ? tape[head] : tm.blank;
                    auto it = tm.delta.find({state, read});
                    if (it == tm.delta.end()) break;
                    bool tries_right_edge = it->second.move == Move::R && head == width - 1;
                    tape[head] = it->second.write;
                    state = it->second.state;
                    if (it->second.move == Move::R) ++head;
                    if (it->second.move == Move::L && !(tm.one_sided && head == 0)) --head;
                    if (tries_right_edge) {
                        h = step;
                        break;
                    }
                }
                h = std::max<std::int64_t>(1, std::min(h, cap));
            } else {
                long long units = std::min<long long>(budget, cap);
                en.reset();
                std::int64_t count = 0;
                while (en.next(units)) ++count;
                h = std::max<std::int64_t>(1, std::min<std::int64_t>(count, cap));
            }
        } else {
            h = schedule.height(g);
        }
        plan.push_back(ZonePlanRow{row, width, std::min(h, w.bottom - row)});
        row += h + 1;
        if (row - first_row > 60) break;  // offsets beyond any desk-scale window
        width = std::int64_t{1} << (row - first_row);
        ++g;
    }
    return plan;
}

Alphabet layer4_alphabet(const Alphabet& encoded, Enumerator& en) {
    std::vector<std::string> names = {"#", "qf"};
    for (const auto& n : encoded.names) names.push_back("d:" + n);
    if (auto* me = dynamic_cast<MachineEnumerator*>(&en)) {
        const TuringMachine& tm = me->machine();
        for (const auto& g : tm.tape_symbols) names.push_back("t:" + g);
        for (const auto& q : tm.states)
            for (const auto& g : tm.tape_symbols) names.push_back("h:" + q + ":" + g);
    }
    return Alphabet::make(names);
}

Layer4Build build_layer4(const Window& w, const Patch& layer3, const std::vector<ZonePlanRow>& plan, Enumerator& en,
                         long long budget) {
    Layer4Build out;
    out.layer4.alphabet = layer4_alphabet(layer3.alphabet, en);
    auto sym = [&](const std::string& n) { return out.layer4.alphabet.symbol(n); };
    for (Address a : w.cells()) out.layer4.cells.emplace(a, sym("#"));
    auto* me = dynamic_cast<MachineEnumerator*>(&en);

    for (const ZonePlanRow& gen : plan) {
        std::int64_t row_lo = w.row_left(gen.star_row);
        std::int64_t row_hi = w.row_right(gen.star_row);
        std::int64_t j_lo = floor_div(row_lo, gen.width);
        for (std::int64_t j = j_lo; j * gen.width < row_hi; ++j) {
            std::int64_t zone_start = j * gen.width;
            // detecting tape: the zone plus one neighbour each side, clipped
            std::int64_t dt_lo = std::max(zone_start - gen.width, row_lo);
            std::int64_t dt_hi = std::min(zone_start + 2 * gen.width, row_hi);
            for (std::int64_t o = dt_lo; o < dt_hi; ++o) {
                Symbol enc = *layer3.at({gen.star_row, o});
                out.layer4.cells[{gen.star_row, o}] = sym("d:" + layer3.alphabet.name(enc));
            }
            // enumerate with the zone's capacity and sweep
            long long units = std::min<long long>(budget, gen.interior);
            long long granted = units;
            en.reset();
            std::vector<Patch> patterns;
            while (auto p = en.next(units)) patterns.push_back(rebase_to_origin(*p));
            long long steps_used = granted - units;
            std::optional<DetectionHit> hit;
            for (std::size_t i = 0; i < patterns.size() && !hit; ++i) {
                auto shape = un_shape(patterns[i]);
                if (!shape) throw std::invalid_argument("enumerated pattern is not U_n-shaped");
                for (std::size_t si = 0; si < patterns[i].alphabet.names.size(); ++si)
                    if (si >= layer3.alphabet.names.size() ||
                        patterns[i].alphabet.names[si] != layer3.alphabet.names[si])
                        throw std::invalid_argument("enumerated pattern alphabet differs from the content alphabet");
                int n = shape->n;
                for (int k = 1; !hit; ++k) {
                    if (n + k > 40) break;
                    std::int64_t len = std::int64_t{1} << (n + k);
                    if (len > 3 * gen.width) break;
                    if (gen.star_row - n - k < w.top) {
                        if (len > 3 * gen.width) break;
                        continue;
                    }
                    LinearPattern member = tilde_k(patterns[i], k);
                    std::int64_t s0 = floor_div(dt_lo + len - 1, len) * len;
                    for (std::int64_t s = s0; s + len <= dt_hi && !hit; s += len) {
                        bool ok = true;
                        for (std::int64_t t = 0; t < len && ok; ++t) {
                            Symbol want = member.symbols[static_cast<std::size_t>(t)];
                            if (want.is_wildcard()) continue;
                            Symbol got = *layer3.at({gen.star_row, s + t});
                            if (got.index() != want.index()) ok = false;
                        }
                        if (ok) hit = DetectionHit{i, k, s};
                    }
                }
            }
            if (hit) {
                Address qf_at{gen.star_row, std::max(zone_start, row_lo)};
                out.layer4.cells[qf_at] = sym("qf");
                out.qf.push_back(qf_at);
            }
            // machine trace on the zone's lattice columns
            if (me) {
                const TuringMachine& tm = me->machine();
                SpaceTimeDiagram trace = [&] {
                    try {
                        return run(tm, {}, steps_used);
                    } catch (const StuckError&) {
                        return run(tm, {}, 0);  // unreachable: enumerator stops stepping first
                    }
                }();
                for (std::int64_t i = 1; i <= gen.interior && gen.star_row + i <= w.bottom; ++i) {
                    std::size_t step = std::min<std::size_t>(static_cast<std::size_t>(i), trace.rows.size() - 1);
                    const DiagramRow& r = trace.rows[step];
                    for (std::int64_t col = 0; col < gen.width; ++col) {
                        std::int64_t o = (zone_start + col) << i;
                        Address at{gen.star_row + i, o};
                        if (!w.contains(at)) continue;
                        int g = r.tape.count(col) ? r.tape.at(col) : tm.blank;
                        std::string name = (r.head == col)
                                               ? "h:" + tm.states[static_cast<std::size_t>(r.state)] + ":" +
                                                     tm.tape_symbols[static_cast<std::size_t>(g)]
                                               : "t:" + tm.tape_symbols[static_cast<std::size_t>(g)];
                        out.layer4.cells[at] = sym(name);
                    }
                }
            }
        }
    }
    std::sort(out.qf.begin(), out.qf.end());
    out.qf.erase(std::unique(out.qf.begin(), out.qf.end()), out.qf.end());
    return out;
}

std::int64_t first_content_row(const Patch& x, Symbol hp, const Window& w) {
    for (const auto& [a, s] : x.cells)
        if (s != hp) return a.level;
    return w.bottom + 1;
}

Patch build_layer2(const Window& w, std::int64_t first_row, const std::vector<ZonePlanRow>& plan) {
    Patch l2;
    l2.alphabet = zone_alphabet();
    Symbol c = l2.alphabet.symbol("c");
    for (Address a : w.cells()) {
        if (a.level < first_row) {
            l2.cells.emplace(a, c);
            continue;
        }
        // locate the generation containing this row
        const ZonePlanRow* gen = nullptr;
        for (const auto& p : plan)
            if (p.star_row <= a.level && a.level <= p.star_row + p.interior) gen = &p;
        if (!gen) throw std::logic_error("zone plan does not cover the window");
        std::int64_t i = a.level - gen->star_row;
        std::int64_t block = gen->width << i;
        std::int64_t j = floor_div(a.offset, block);
        // kind = zone index parity xor generation parity
        std::size_t gidx = static_cast<std::size_t>(gen - plan.data());
        char kind = (((j & 1) != 0) != (gidx % 2 != 0)) ? 'b' : 'a';
        bool star = i == 0;
        bool marked = star || ((a.offset >> i) << i) == a.offset;
        l2.cells.emplace(a, Symbol(zone_index(kind, star, marked)));
    }
    return l2;
}

}  // namespace

FourLayerPatch build_layers(const Patch& x, const RowConstraint& rc, const ZoneSchedule& schedule, Enumerator& en,
                            long long budget) {
    Window w = infer_window(x);
    if (rc.halfplane.is_wildcard() || rc.halfplane.index() >= x.alphabet.size())
        throw std::invalid_argument("row constraint symbol not in the content alphabet");
    if (!enforce_half_plane(x, rc).empty())
        throw std::invalid_argument("content does not respect the row constraint");
    FourLayerPatch flp;
    flp.window = w;
    flp.layer1 = x;
    flp.layer1.alphabet.halfplane = rc.halfplane.index();
    std::int64_t first_row = first_content_row(x, rc.halfplane, w);
    auto plan = plan_generations(w, first_row, schedule, en, budget);
    flp.layer2 = build_layer2(w, first_row, plan);
    flp.layer3 = phi(x, w).second;
    Layer4Build l4 = build_layer4(w, flp.layer3, plan, en, budget);
    flp.layer4 = std::move(l4.layer4);
    return flp;
}

Patch project(const FourLayerPatch& flp) { return flp.layer1; }

LayerReport check_layers(const FourLayerPatch& flp, Enumerator& en, long long budget) {
    LayerReport rep;
    auto flag = [&](Address at, std::string rule) { rep.violations.push_back({at, std::move(rule)}); };

    // windows agree
    Window w = flp.window;
    for (const Patch* layer : {&flp.layer1, &flp.layer2, &flp.layer3, &flp.layer4}) {
        if (static_cast<long long>(layer->cells.size()) != w.cell_count()) {
            flag({w.top, w.left}, "layers do not share the window");
            return rep;
        }
        for (const auto& [a, s] : layer->cells) {
            (void)s;
            if (!w.contains(a)) {
                flag(a, "layers do not share the window");
                return rep;
            }
        }
    }

    // half-plane closure of layer 1 and the c region matching it
    if (!flp.layer1.alphabet.halfplane) {
        flag({w.top, w.left}, "layer 1 has no designated half-plane symbol");
        return rep;
    }
    Symbol hp(*flp.layer1.alphabet.halfplane);
    std::int64_t first_row = first_content_row(flp.layer1, hp, w);
    RowConstraint rc{hp, first_row - 1};
    for (Address a : enforce_half_plane(flp.layer1, rc)) flag(a, "half-plane closure");
    Symbol c = flp.layer2.alphabet.symbol("c");
    for (const auto& [a, s] : flp.layer1.cells) {
        bool is_hp = s == hp;
        bool is_c = *flp.layer2.at(a) == c;
        if (is_hp != is_c) flag(a, "content half-plane and zone c region differ");
    }

    // zone layer structure
    for (const auto& v : check(flp.layer2, zone_rules())) flag(v.base, "zone local rule " + std::to_string(v.rule));
    for (const auto& line : zone_properties_report(flp.layer2)) flag({w.top, w.left}, "zone property: " + line);

    // layer 3 is the encoding of layer 1
    Patch expected3 = phi(flp.layer1, w).second;
    if (!(expected3.alphabet == flp.layer3.alphabet)) {
        flag({w.top, w.left}, "layer 3 alphabet mismatch");
    } else {
        for (const auto& [a, s] : expected3.cells)
            if (*flp.layer3.at(a) != s) flag(a, "layer 3 local rule");
    }

    // layer 4 replay: derive the plan from the zone layer
    bool structure_ok = rep.violations.empty();
    if (structure_ok) {
        std::vector<ZonePlanRow> plan;
        try {
            auto zones = zones_of(flp.layer2);
            std::map<std::int64_t, std::int64_t> interiors;  // star row -> visible interior rows
            for (const Zone& z : zones) {
                auto [it, fresh] = interiors.emplace(z.base.level, z.height - 1);
                if (!fresh && it->second != z.height - 1)
                    throw std::invalid_argument("zones of one generation have different heights");
            }
            std::optional<std::int64_t> first_star;
            for (const auto& [row, h] : interiors) {
                if (!first_star) first_star = row;
                plan.push_back(ZonePlanRow{row, std::int64_t{1} << (row - *first_star), h});
            }
        } catch (const std::invalid_argument& e) {
            flag({w.top, w.left}, std::string("zone structure: ") + e.what());
        }
        if (rep.violations.empty()) {
            Layer4Build expect4 = build_layer4(w, flp.layer3, plan, en, budget);
            if (!(expect4.layer4.alphabet == flp.layer4.alphabet)) {
                flag({w.top, w.left}, "layer 4 alphabet mismatch");
            } else {
                for (const auto& [a, s] : expect4.layer4.cells)
                    if (*flp.layer4.at(a) != s) flag(a, "layer 4 trace");
            }
        }
    }

    // q_f occurrences are terminal detections, reported separately
    int qf_idx = flp.layer4.alphabet.index_of("qf");
    if (qf_idx >= 0)
        for (const auto& [a, s] : flp.layer4.cells)
            if (s == Symbol(qf_idx)) rep.qf.push_back(a);

    std::sort(rep.violations.begin(), rep.violations.end(),
              [](const LayerViolation& a, const LayerViolation& b) {
                  return a.at != b.at ? a.at < b.at : a.rule < b.rule;
              });
    return rep;
}

FourLayerPatch parse_layers(std::string_view text) {
    std::vector<std::string> blocks(5);
    int cur = 0;
    int line_no = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        std::string line(rest.substr(0, nl));
        rest.remove_prefix(nl == std::string_view::npos ? rest.size() : nl + 1);
        ++line_no;
        std::string trimmed = line;
        auto b = trimmed.find_first_not_of(" \t\r");
        if (b != std::string::npos && trimmed[b] == '#') continue;
        if (b != std::string::npos && trimmed.compare(b, 6, "layer:") == 0) {
            std::istringstream in(trimmed.substr(b + 6));
            int idx = 0;
            in >> idx;
            if (idx < 1 || idx > 4) throw ParseError(line_no, "layer index must be 1..4");
            cur = idx;
            continue;
        }
        if (cur == 0) {
            if (b == std::string::npos) continue;
            throw ParseError(line_no, "content before the first layer: line");
        }
        blocks[static_cast<std::size_t>(cur)] += line + "\n";
    }
    for (int i = 1; i <= 4; ++i)
        if (blocks[static_cast<std::size_t>(i)].empty()) throw ParseError(line_no, "missing layer " + std::to_string(i));
    FourLayerPatch flp;
    flp.layer1 = parse_patch(blocks[1]);
    flp.layer2 = parse_patch(blocks[2]);
    flp.layer3 = parse_patch(blocks[3]);
    flp.layer4 = parse_patch(blocks[4]);
    flp.window = infer_window(flp.layer1);
    return flp;
}

std::string serialize_layers(const FourLayerPatch& flp) {
    std::string out;
    const Patch* layers[4] = {&flp.layer1, &flp.layer2, &flp.layer3, &flp.layer4};
    for (int i = 0; i < 4; ++i) {
        out += "layer: " + std::to_string(i + 1) + "\n";
        out += serialize_patch(*layers[i]);
    }
    return out;
}

}  // namespace horo
