#include "horo/turing.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace horo {

namespace {

bool name_ok(const std::string& n) {
    if (n.empty()) return false;
    for (char c : n)
        if (c == '.' || c == '!' || c == '<' || c == '>' || c == '*' || std::isspace(static_cast<unsigned char>(c)))
            return false;
    return true;
}

}  // namespace

int TuringMachine::state_id(std::string_view name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == name) return static_cast<int>(i);
    return -1;
}

int TuringMachine::symbol_id(std::string_view name) const {
    for (std::size_t i = 0; i < tape_symbols.size(); ++i)
        if (tape_symbols[i] == name) return static_cast<int>(i);
    return -1;
}

bool TuringMachine::is_halting(int state) const {
    return std::binary_search(halting.begin(), halting.end(), state);
}

void TuringMachine::validate() const {
    if (states.empty()) throw std::invalid_argument("machine has no states");
    if (tape_symbols.empty()) throw std::invalid_argument("machine has no tape symbols");
    for (const auto& s : states)
        if (!name_ok(s)) throw std::invalid_argument("bad state name '" + s + "'");
    for (const auto& s : tape_symbols)
        if (!name_ok(s)) throw std::invalid_argument("bad tape symbol '" + s + "'");
    if (initial < 0 || initial >= static_cast<int>(states.size()))
        throw std::invalid_argument("initial state out of range");
    if (blank < 0 || blank >= static_cast<int>(tape_symbols.size()))
        throw std::invalid_argument("blank symbol out of range");
    for (int h : halting)
        if (h < 0 || h >= static_cast<int>(states.size())) throw std::invalid_argument("halting state out of range");
    for (const auto& [key, t] : delta) {
        auto [q, g] = key;
        if (q < 0 || q >= static_cast<int>(states.size()) || g < 0 || g >= static_cast<int>(tape_symbols.size()))
            throw std::invalid_argument("transition key out of range");
        if (t.state < 0 || t.state >= static_cast<int>(states.size()) || t.write < 0 ||
            t.write >= static_cast<int>(tape_symbols.size()))
            throw std::invalid_argument("transition action out of range");
    }
}

int SpaceTimeDiagram::symbol_at(std::size_t row, std::int64_t pos, const TuringMachine& tm) const {
    const auto& t = rows.at(row).tape;
    auto it = t.find(pos);
    return it == t.end() ? tm.blank : it->second;
}

SpaceTimeDiagram run(const TuringMachine& tm, const std::vector<int>& input, long long steps) {
    tm.validate();
    SpaceTimeDiagram d;
    DiagramRow cur;
    for (std::size_t i = 0; i < input.size(); ++i) cur.tape[static_cast<std::int64_t>(i)] = input[i];
    cur.head = 0;
    cur.state = tm.initial;
    d.rows.push_back(cur);
    for (long long t = 0; t < steps; ++t) {
        if (tm.is_halting(cur.state)) {
            d.halted = true;
            break;
        }
        int read = cur.tape.count(cur.head) ? cur.tape[cur.head] : tm.blank;
        auto it = tm.delta.find({cur.state, read});
        if (it == tm.delta.end())
            throw StuckError("no transition from state '" + tm.states[static_cast<std::size_t>(cur.state)] +
                             "' reading '" + tm.tape_symbols[static_cast<std::size_t>(read)] + "'");
        const Transition& tr = it->second;
        cur.tape[cur.head] = tr.write;
        cur.state = tr.state;
        if (tr.move == Move::R) ++cur.head;
        if (tr.move == Move::L) {
            if (!(tm.one_sided && cur.head == 0)) --cur.head;
        }
        d.rows.push_back(cur);
    }
    return d;
}

TuringMachine machine_ex() {
    TuringMachine m;
    m.states = {"q0", "qa+", "qb+", "qb++", "qpar"};
    m.tape_symbols = {"a", "b", "|", "#"};
    m.blank = 3;
    m.initial = 0;
    m.one_sided = true;
    const int a = 0, b = 1, sep = 2, blank = 3;
    const int q0 = 0, qa = 1, qb = 2, qbb = 3, qp = 4;
    m.delta[{q0, blank}] = {qa, a, Move::R};    // very first a
    m.delta[{qa, blank}] = {qp, b, Move::R};    // very first b
    m.delta[{qa, b}] = {qb, a, Move::R};        // first b of the block becomes a
    m.delta[{qb, b}] = {qb, b, Move::R};        // skip the rest of the b block
    m.delta[{qb, sep}] = {qbb, b, Move::R};     // old separator becomes b
    m.delta[{qbb, blank}] = {qp, b, Move::R};   // one more b
    m.delta[{qp, blank}] = {qp, sep, Move::L};  // write the new separator, turn
    m.delta[{qp, b}] = {qp, b, Move::L};        // rewind over b
    m.delta[{qp, a}] = {qa, a, Move::R};        // last a found: sit on the first b
    return m;
}

TuringMachine parse_machine(std::string_view text) {
    // '#' is a tape symbol, so comments are whole lines starting with '#'
    TuringMachine m;
    m.initial = -1;
    m.blank = -1;
    int line_no = 0;
    std::string_view rest = text;
    struct Pending {
        int line;
        std::vector<std::string> toks;
    };
    std::vector<Pending> deltas;
    std::vector<Pending> names;  // initial/blank/halting lines, resolved at the end
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        std::string line(rest.substr(0, nl));
        rest.remove_prefix(nl == std::string_view::npos ? rest.size() : nl + 1);
        ++line_no;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        if (line[0] == '#') continue;
        std::istringstream in(line);
        std::string head;
        in >> head;
        std::vector<std::string> toks;
        std::string tok;
        while (in >> tok) toks.push_back(tok);
        if (head == "states:") {
            m.states = toks;
        } else if (head == "tape:") {
            m.tape_symbols = toks;
        } else if (head == "initial:" || head == "blank:" || head == "halting:") {
            if (head != "halting:" && toks.size() != 1) throw ParseError(line_no, head + " expects one name");
            toks.insert(toks.begin(), head);
            names.push_back({line_no, toks});
        } else if (head == "onesided:") {
            if (toks.size() != 1 || (toks[0] != "true" && toks[0] != "false"))
                throw ParseError(line_no, "onesided: expects true or false");
            m.one_sided = toks[0] == "true";
        } else if (head == "delta:") {
            deltas.push_back({line_no, toks});
        } else {
            throw ParseError(line_no, "unknown directive '" + head + "'");
        }
    }
    if (m.states.empty()) throw ParseError(line_no, "missing states: line");
    if (m.tape_symbols.empty()) throw ParseError(line_no, "missing tape: line");
    for (const auto& n : names) {
        if (n.toks[0] == "initial:") {
            m.initial = m.state_id(n.toks[1]);
            if (m.initial < 0) throw ParseError(n.line, "unknown state '" + n.toks[1] + "'");
        } else if (n.toks[0] == "blank:") {
            m.blank = m.symbol_id(n.toks[1]);
            if (m.blank < 0) throw ParseError(n.line, "unknown tape symbol '" + n.toks[1] + "'");
        } else {
            for (std::size_t i = 1; i < n.toks.size(); ++i) {
                int id = m.state_id(n.toks[i]);
                if (id < 0) throw ParseError(n.line, "unknown halting state '" + n.toks[i] + "'");
                m.halting.push_back(id);
            }
        }
    }
    std::sort(m.halting.begin(), m.halting.end());
    for (const auto& d : deltas) {
        if (d.toks.size() != 6 || d.toks[2] != "->")
            throw ParseError(d.line, "delta: expects <state> <read> -> <state> <write> <L|R|S>");
        int q = m.state_id(d.toks[0]);
        int g = m.symbol_id(d.toks[1]);
        int q2 = m.state_id(d.toks[3]);
        int w = m.symbol_id(d.toks[4]);
        if (q < 0 || q2 < 0) throw ParseError(d.line, "unknown state in delta");
        if (g < 0 || w < 0) throw ParseError(d.line, "unknown tape symbol in delta");
        Move mv;
        if (d.toks[5] == "L")
            mv = Move::L;
        else if (d.toks[5] == "R")
            mv = Move::R;
        else if (d.toks[5] == "S")
            mv = Move::S;
        else
            throw ParseError(d.line, "bad move '" + d.toks[5] + "'");
        if (m.delta.count({q, g})) throw ParseError(d.line, "duplicate transition");
        m.delta[{q, g}] = {q2, w, mv};
    }
    if (m.initial < 0) throw ParseError(line_no, "missing initial: line");
    if (m.blank < 0) throw ParseError(line_no, "missing blank: line");
    m.validate();
    return m;
}

std::string serialize_machine(const TuringMachine& m) {
    std::string out = "states:";
    for (const auto& s : m.states) out += " " + s;
    out += "\ninitial: " + m.states[static_cast<std::size_t>(m.initial)] + "\n";
    if (!m.halting.empty()) {
        out += "halting:";
        for (int h : m.halting) out += " " + m.states[static_cast<std::size_t>(h)];
        out += "\n";
    }
    out += "tape:";
    for (const auto& s : m.tape_symbols) out += " " + s;
    out += "\nblank: " + m.tape_symbols[static_cast<std::size_t>(m.blank)] + "\n";
    if (!m.one_sided) out += "onesided: false\n";
    for (const auto& [key, t] : m.delta) {
        out += "delta: " + m.states[static_cast<std::size_t>(key.first)] + " " +
               m.tape_symbols[static_cast<std::size_t>(key.second)] + " -> " +
               m.states[static_cast<std::size_t>(t.state)] + " " + m.tape_symbols[static_cast<std::size_t>(t.write)] +
               " " + (t.move == Move::L ? "L" : t.move == Move::R ? "R" : "S") + "\n";
    }
    return out;
}

Alphabet lattice_alphabet() { return Alphabet::make({"o", "."}); }

RuleSet lattice_rules() {
    Alphabet a = lattice_alphabet();
    Symbol mark = a.symbol("o"), empty = a.symbol(".");
    RuleSet rules;
    rules.alphabet = a;
    auto forbid = [&](Symbol parent, int child, Symbol value) {
        Patch p;
        p.alphabet = a;
        p.partial = true;
        p.cells.emplace(Address{0, 0}, parent);
        p.cells.emplace(Address{1, 0}, child == 0 ? value : Symbol::wildcard());
        p.cells.emplace(Address{1, 1}, child == 1 ? value : Symbol::wildcard());
        rules.add(std::move(p));
    };
    forbid(mark, 0, empty);  // a marked cell's left child is marked
    forbid(mark, 1, mark);   // ... and its right child is not
    forbid(empty, 0, mark);  // marks never restart below unmarked cells
    forbid(empty, 1, mark);
    return rules;
}

namespace {

using Kind = MachineLetter::Kind;
using HeadTag = MachineLetter::HeadTag;

struct LetterTable {
    std::vector<MachineLetter> letters;
    std::vector<std::string> names;
    int off = -1;
    std::vector<int> sig_r_origin, sig_r_transit, sig_l;      // by state
    std::vector<std::vector<int>> plain_by_tape;              // [tape]
    std::vector<std::vector<std::vector<int>>> head_by;       // [tape][state][tag]
    std::vector<std::vector<int>> emit_by;                    // [tape][state]

    int add(MachineLetter l, std::string name) {
        letters.push_back(l);
        names.push_back(std::move(name));
        return static_cast<int>(letters.size()) - 1;
    }
};

LetterTable build_letters(const TuringMachine& tm) {
    LetterTable t;
    int ns = static_cast<int>(tm.states.size());
    int ng = static_cast<int>(tm.tape_symbols.size());
    t.off = t.add({Kind::Off, -1, -1, HeadTag::Up}, ".");
    t.sig_r_origin.resize(static_cast<std::size_t>(ns));
    t.sig_r_transit.resize(static_cast<std::size_t>(ns));
    t.sig_l.resize(static_cast<std::size_t>(ns));
    for (int q = 0; q < ns; ++q) {
        t.sig_r_origin[q] = t.add({Kind::SigROrigin, -1, q, HeadTag::Up}, ">" + tm.states[q] + "*");
        t.sig_r_transit[q] = t.add({Kind::SigRTransit, -1, q, HeadTag::Up}, ">" + tm.states[q]);
        t.sig_l[q] = t.add({Kind::SigL, -1, q, HeadTag::Up}, "<" + tm.states[q]);
    }
    t.plain_by_tape.assign(static_cast<std::size_t>(ng), {});
    t.head_by.assign(static_cast<std::size_t>(ng),
                     std::vector<std::vector<int>>(static_cast<std::size_t>(ns), std::vector<int>(3, -1)));
    t.emit_by.assign(static_cast<std::size_t>(ng), std::vector<int>(static_cast<std::size_t>(ns), -1));
    static const char* tag_names[3] = {"u", "l", "r"};
    for (int g = 0; g < ng; ++g) {
        t.plain_by_tape[g].push_back(t.add({Kind::Plain, g, -1, HeadTag::Up}, tm.tape_symbols[g]));
        for (int q = 0; q < ns; ++q) {
            for (int tag = 0; tag < 3; ++tag)
                t.head_by[g][q][tag] = t.add({Kind::Head, g, q, static_cast<HeadTag>(tag)},
                                             tm.tape_symbols[g] + "." + tm.states[q] + "." + tag_names[tag]);
            t.emit_by[g][q] = t.add({Kind::Emit, g, q, HeadTag::Up}, tm.tape_symbols[g] + "!" + tm.states[q]);
        }
    }
    return t;
}

// What the head does from state q reading g: nullopt = frozen (halting or no
// transition: the column content is copied downward unchanged).
std::optional<Transition> step_of(const TuringMachine& tm, int q, int g) {
    if (tm.is_halting(q)) return std::nullopt;
    auto it = tm.delta.find({q, g});
    if (it == tm.delta.end()) return std::nullopt;
    return it->second;
}

bool allowed_vl(const TuringMachine& tm, const MachineLetter& p, const MachineLetter& x) {
    if (p.is_marked()) {
        if (!x.is_marked()) return false;
        int want_tape;
        if (p.kind == Kind::Head) {
            auto tr = step_of(tm, p.state, p.tape);
            if (!tr) return x.kind == Kind::Head && x.tape == p.tape && x.state == p.state && x.tag == HeadTag::Up;
            want_tape = tr->write;
            if (tr->move == Move::S)
                return x.kind == Kind::Head && x.tape == want_tape && x.state == tr->state && x.tag == HeadTag::Up;
            if (tr->move == Move::L)
                return x.kind == Kind::Emit && x.tape == want_tape && x.state == tr->state;
            // move R
            if (x.tape != want_tape) return false;
            return x.kind == Kind::Plain || (x.kind == Kind::Head && x.tag != HeadTag::Up);
        }
        want_tape = p.tape;
        if (x.tape != want_tape) return false;
        return x.kind == Kind::Plain || (x.kind == Kind::Head && x.tag != HeadTag::Up);
    }
    // unmarked parent: unmarked child, and left children are never R-origins
    return x.kind == Kind::Off || x.kind == Kind::SigRTransit || x.kind == Kind::SigL;
}

bool allowed_vr(const TuringMachine& tm, const MachineLetter& p, const MachineLetter& w) {
    if (w.is_marked()) return false;  // right children of any parent are off-lattice
    if (p.is_marked()) {
        if (p.kind == Kind::Head) {
            auto tr = step_of(tm, p.state, p.tape);
            if (tr && tr->move == Move::R)
                return w.kind == Kind::SigROrigin && w.state == tr->state;
        }
        return w.kind == Kind::Off || w.kind == Kind::SigL;
    }
    // unmarked parent: origins need marked parents
    return w.kind != Kind::SigROrigin;
}

bool allowed_h(const TuringMachine& tm, const MachineLetter& e, const MachineLetter& f) {
    (void)tm;
    bool e_sig_r = e.kind == Kind::SigROrigin || e.kind == Kind::SigRTransit;
    // what E demands of its right neighbour
    if (e_sig_r &&
        !((f.kind == Kind::SigRTransit && f.state == e.state) ||
          (f.kind == Kind::Head && f.tag == HeadTag::FromLeft && f.state == e.state)))
        return false;
    if (e.kind == Kind::SigL && !((f.kind == Kind::SigL || f.kind == Kind::Emit) && f.state == e.state))
        return false;
    if (e.kind == Kind::Head && e.tag == HeadTag::FromRight && !(f.kind == Kind::SigL && f.state == e.state))
        return false;
    // what F demands of its left neighbour
    if (f.kind == Kind::SigRTransit && !(e_sig_r && e.state == f.state)) return false;
    if (f.kind == Kind::SigROrigin && !e.is_marked()) return false;
    if (f.kind == Kind::SigL &&
        !((e.kind == Kind::SigL && e.state == f.state) ||
          (e.kind == Kind::Head && e.tag == HeadTag::FromRight && e.state == f.state)))
        return false;
    if (f.kind == Kind::Head && f.tag == HeadTag::FromLeft && !(e_sig_r && e.state == f.state)) return false;
    if (f.kind == Kind::Emit && !((e.kind == Kind::SigL || (e.kind == Kind::Head && e.tag == HeadTag::FromRight)) &&
                                  e.state == f.state))
        return false;
    return true;
}

}  // namespace

Window CompiledMachine::window(int width, int depth) const { return Window::make(0, depth, -1, width + 1); }

Patch CompiledMachine::seed(int width, int depth) const {
    Patch s;
    s.alphabet = alphabet;
    s.cells.emplace(Address{0, -1}, off());
    s.cells.emplace(Address{0, 0}, head(tm.blank, tm.initial, MachineLetter::HeadTag::Up));
    for (int c = 1; c < width; ++c) s.cells.emplace(Address{0, c}, plain(tm.blank));
    s.cells.emplace(Address{0, width}, off());
    for (int t = 1; t <= depth; ++t) {
        s.cells.emplace(Address{t, std::int64_t{-1} << t}, off());
        s.cells.emplace(Address{t, (std::int64_t{width + 1} << t) - 1}, off());
    }
    return s;
}

Symbol CompiledMachine::plain(int tape) const {
    for (std::size_t i = 0; i < letters.size(); ++i)
        if (letters[i].kind == MachineLetter::Kind::Plain && letters[i].tape == tape) return Symbol(static_cast<int>(i));
    throw std::logic_error("plain letter missing");
}

Symbol CompiledMachine::head(int tape, int state, MachineLetter::HeadTag tag) const {
    for (std::size_t i = 0; i < letters.size(); ++i) {
        const auto& l = letters[i];
        if (l.kind == MachineLetter::Kind::Head && l.tape == tape && l.state == state && l.tag == tag)
            return Symbol(static_cast<int>(i));
    }
    throw std::logic_error("head letter missing");
}

Symbol CompiledMachine::emit(int tape, int state) const {
    for (std::size_t i = 0; i < letters.size(); ++i) {
        const auto& l = letters[i];
        if (l.kind == MachineLetter::Kind::Emit && l.tape == tape && l.state == state)
            return Symbol(static_cast<int>(i));
    }
    throw std::logic_error("emit letter missing");
}

Symbol CompiledMachine::off() const {
    for (std::size_t i = 0; i < letters.size(); ++i)
        if (letters[i].kind == MachineLetter::Kind::Off) return Symbol(static_cast<int>(i));
    throw std::logic_error("off letter missing");
}

CompiledMachine compile_to_rules(const TuringMachine& tm) {
    tm.validate();  // determinism is structural (delta is a map); validate the rest
    LetterTable table = build_letters(tm);
    CompiledMachine cm;
    cm.tm = tm;
    cm.letters = table.letters;
    cm.alphabet = Alphabet::make(table.names);
    cm.rules.alphabet = cm.alphabet;
    int n = static_cast<int>(table.letters.size());
    auto pair_rule = [&](int first, int second, std::int64_t dl, std::int64_t dr) {
        Patch p;
        p.alphabet = cm.alphabet;
        p.cells.emplace(Address{0, 0}, Symbol(first));
        p.cells.emplace(Address{dl, dr}, Symbol(second));
        cm.rules.add(std::move(p));
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!allowed_vl(tm, table.letters[i], table.letters[j])) pair_rule(i, j, 1, 0);
            if (!allowed_vr(tm, table.letters[i], table.letters[j])) pair_rule(i, j, 1, 1);
            if (!allowed_h(tm, table.letters[i], table.letters[j])) pair_rule(i, j, 0, 1);
        }
    }
    return cm;
}

SpaceTimeDiagram extract_diagram(const Patch& patch, const CompiledMachine& cm) {
    SpaceTimeDiagram d;
    if (patch.cells.empty()) return d;
    std::int64_t lo = patch.cells.begin()->first.level;
    std::int64_t hi = patch.cells.rbegin()->first.level;
    for (std::int64_t l = lo; l <= hi; ++l) {
        std::vector<std::pair<std::int64_t, MachineLetter>> marked;
        for (auto it = patch.cells.lower_bound({l, std::numeric_limits<std::int64_t>::min()});
             it != patch.cells.end() && it->first.level == l; ++it) {
            if (it->second.is_wildcard()) continue;
            const MachineLetter& ml = cm.letters[static_cast<std::size_t>(it->second.index())];
            if (ml.is_marked()) marked.emplace_back(it->first.offset, ml);
        }
        if (marked.empty()) continue;
        DiagramRow row;
        int heads = 0;
        for (std::size_t c = 0; c < marked.size(); ++c) {
            row.tape[static_cast<std::int64_t>(c)] = marked[c].second.tape;
            if (marked[c].second.kind == MachineLetter::Kind::Head) {
                ++heads;
                row.head = static_cast<std::int64_t>(c);
                row.state = marked[c].second.state;
            }
        }
        if (heads != 1)
            throw std::invalid_argument("malformed encoding: row " + std::to_string(l) + " has " +
                                        std::to_string(heads) + " heads");
        d.rows.push_back(std::move(row));
    }
    return d;
}

Patch encode_diagram(const CompiledMachine& cm, int width, int depth) {
    const TuringMachine& tm = cm.tm;
    SpaceTimeDiagram d = run(tm, {}, depth);
    Window w = cm.window(width, depth);
    Patch out;
    out.alphabet = cm.alphabet;
    LetterTable table = build_letters(tm);
    // pad the diagram with frozen rows if the run halted early
    auto row_at = [&](int t) -> const DiagramRow& {
        return d.rows[std::min<std::size_t>(static_cast<std::size_t>(t), d.rows.size() - 1)];
    };
    for (int t = 0; t <= depth; ++t) {
        const DiagramRow& cur = row_at(t);
        // marked cells
        for (int c = 0; c < width; ++c) {
            Address at{t, std::int64_t{c} << t};
            int g = cur.tape.count(c) ? cur.tape.at(c) : tm.blank;
            if (cur.head == c) {
                MachineLetter::HeadTag tag = MachineLetter::HeadTag::Up;
                if (t > 0) {
                    const DiagramRow& prev = row_at(t - 1);
                    if (prev.head == cur.head - 1) tag = MachineLetter::HeadTag::FromLeft;
                    if (prev.head == cur.head + 1) tag = MachineLetter::HeadTag::FromRight;
                }
                out.cells.emplace(at, cm.head(g, cur.state, tag));
            } else if (t > 0 && row_at(t - 1).head == c && cur.head == c - 1) {
                // the head left this column moving left
                out.cells.emplace(at, cm.emit(g, cur.state));
            } else {
                out.cells.emplace(at, cm.plain(g));
            }
        }
        // unmarked cells: signals along the head's route, otherwise blank
        std::int64_t sig_from = 0, sig_to = -1;
        int sig_state = -1;
        bool rightward = false;
        if (t > 0) {
            const DiagramRow& prev = row_at(t - 1);
            if (cur.head == prev.head + 1) {
                rightward = true;
                sig_state = cur.state;
                sig_from = (prev.head << t) + 1;
                sig_to = (cur.head << t) - 1;
            } else if (cur.head == prev.head - 1) {
                sig_state = cur.state;
                sig_from = (cur.head << t) + 1;
                sig_to = (prev.head << t) - 1;
            }
        }
        for (std::int64_t o = w.row_left(t); o < w.row_right(t); ++o) {
            if (t <= 62 && o >= 0 && o < (std::int64_t{width} << t) && (o >> t << t) == o && (o >> t) < width)
                continue;  // marked cell
            Symbol s = Symbol(table.off);
            if (sig_state >= 0 && o >= sig_from && o <= sig_to) {
                if (rightward)
                    s = Symbol(o == sig_from ? table.sig_r_origin[static_cast<std::size_t>(sig_state)]
                                             : table.sig_r_transit[static_cast<std::size_t>(sig_state)]);
                else
                    s = Symbol(table.sig_l[static_cast<std::size_t>(sig_state)]);
            }
            out.cells.emplace(Address{t, o}, s);
        }
    }
    return out;
}

MachineEnumerator::MachineEnumerator(TuringMachine tm, Alphabet target)
    : tm_(std::move(tm)), target_(std::move(target)) {
    tm_.validate();
    reset();
}

void MachineEnumerator::reset() {
    tape_.clear();
    head_ = 0;
    state_ = tm_.initial;
    dead_ = false;
    last_word_.clear();
}

std::optional<std::string> MachineEnumerator::tape_word() const {
    int sep = tm_.symbol_id("|");
    if (sep < 0) return std::nullopt;
    std::string word;
    for (std::int64_t i = 0;; ++i) {
        auto it = tape_.find(i);
        int g = it == tape_.end() ? tm_.blank : it->second;
        if (g == tm_.blank) return std::nullopt;  // no terminated word
        if (g == sep) return word;
        word += tm_.tape_symbols[static_cast<std::size_t>(g)];
    }
}

std::optional<Patch> MachineEnumerator::next(long long& budget) {
    while (!dead_ && budget > 0) {
        if (tm_.is_halting(state_)) {
            dead_ = true;
            break;
        }
        int read = tape_.count(head_) ? tape_[head_] : tm_.blank;
        auto it = tm_.delta.find({state_, read});
        if (it == tm_.delta.end()) {
            dead_ = true;
            break;
        }
        --budget;
        tape_[head_] = it->second.write;
        state_ = it->second.state;
        if (it->second.move == Move::R) ++head_;
        if (it->second.move == Move::L && !(tm_.one_sided && head_ == 0)) --head_;
        auto word = tape_word();
        if (word && *word != last_word_) {
            last_word_ = *word;
            Patch p;
            p.alphabet = target_;
            p.cells.emplace(Address{0, 0}, Symbol(static_cast<int>(word->size()) % target_.size()));
            return p;
        }
    }
    return std::nullopt;
}

}  // namespace horo
