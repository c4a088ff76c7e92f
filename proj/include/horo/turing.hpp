#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "horo/cft.hpp"

// Turing machines, their space-time diagrams, and the embedding of both into
// local rules on the tessellation: a Z x N lattice of marked cells plus a
// signal construction that routes head moves between lattice columns through
// the unmarked cells of a row.

namespace horo {

enum class Move { L, R, S };

struct Transition {
    int state;
    int write;
    Move move;

    friend bool operator==(const Transition&, const Transition&) = default;
};

class StuckError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TuringMachine {
    std::vector<std::string> states;
    int initial = 0;
    std::vector<int> halting;  // sorted
    std::vector<std::string> tape_symbols;
    int blank = 0;
    std::map<std::pair<int, int>, Transition> delta;  // (state, read) -> action
    bool one_sided = true;

    int state_id(std::string_view name) const;   // -1 when absent
    int symbol_id(std::string_view name) const;  // -1 when absent
    bool is_halting(int state) const;
    void validate() const;  // throws std::invalid_argument

    friend bool operator==(const TuringMachine&, const TuringMachine&) = default;
};

struct DiagramRow {
    std::map<std::int64_t, int> tape;  // explicitly written cells
    std::int64_t head = 0;
    int state = 0;

    friend bool operator==(const DiagramRow&, const DiagramRow&) = default;
};

struct SpaceTimeDiagram {
    std::vector<DiagramRow> rows;
    bool halted = false;

    int symbol_at(std::size_t row, std::int64_t pos, const TuringMachine& tm) const;
    friend bool operator==(const SpaceTimeDiagram&, const SpaceTimeDiagram&) = default;
};

// Rows 0..steps of the run from the initial state on `input` over blanks;
// stops early in a halting state. Throws StuckError on a missing transition
// in a non-halting state. On a one-sided tape an L move at cell 0 stays put.
SpaceTimeDiagram run(const TuringMachine& tm, const std::vector<int>& input, long long steps);

// The five-state machine of the worked example: rewrites its tape through
// the stages ab|, aabb|, aaabbb|, ... and never halts.
TuringMachine machine_ex();

// Machine files:
//   states: q0 q1 ...
//   initial: q0
//   blank: #
//   halting: qh ...          (optional)
//   tape: a b | #
//   onesided: true|false     (optional, default true)
//   delta: <state> <read> -> <state> <write> <L|R|S>
TuringMachine parse_machine(std::string_view text);
std::string serialize_machine(const TuringMachine& tm);

// The Z x N lattice as a set of colourings on {o, .}: a marked cell's left
// child is marked and right child unmarked, and marks never appear below
// unmarked cells. A marked row therefore reproduces itself one row down with
// the same cardinality.
Alphabet lattice_alphabet();
RuleSet lattice_rules();

// Letters of the compiled alphabet A_M.
struct MachineLetter {
    enum class Kind { Off, SigROrigin, SigRTransit, SigL, Plain, Head, Emit };
    enum class HeadTag { Up, FromLeft, FromRight };

    Kind kind = Kind::Off;
    int tape = -1;
    int state = -1;
    HeadTag tag = HeadTag::Up;

    bool is_marked() const { return kind == Kind::Plain || kind == Kind::Head || kind == Kind::Emit; }
};

struct CompiledMachine {
    TuringMachine tm;
    Alphabet alphabet;
    std::vector<MachineLetter> letters;  // by symbol index
    RuleSet rules;

    // Window of the stated lattice width and depth, one padding column per
    // side so border signals can be pinned.
    Window window(int width, int depth) const;

    // Seed: row 0 carries the blank tape with the initial state once at
    // column 0, plus one blank off-lattice cell at each row's two borders.
    Patch seed(int width, int depth) const;

    Symbol plain(int tape) const;
    Symbol head(int tape, int state, MachineLetter::HeadTag tag) const;
    Symbol emit(int tape, int state) const;
    Symbol off() const;
};

// Local rules whose row-constrained completions of a seeded window reproduce
// the machine's space-time diagram on the marked sublattice. Rejects
// nondeterministic machines (the delta map is deterministic by construction;
// this validates the machine as a whole).
CompiledMachine compile_to_rules(const TuringMachine& tm);

// Reads the diagram off the marked cells; throws std::invalid_argument on a
// malformed encoding (a marked row with zero or two heads).
SpaceTimeDiagram extract_diagram(const Patch& patch, const CompiledMachine& cm);

// Full window encoding of the machine's own run, signals included.
Patch encode_diagram(const CompiledMachine& cm, int width, int depth);

// Enumerator backed by a machine run: after every step, the maximal
// '|'-terminated word over non-blank symbols starting at cell 0 is decoded
// (when it changed) into the single-cell pattern whose symbol index is the
// word length mod |alphabet|. Budget counts machine steps.
class MachineEnumerator final : public Enumerator {
  public:
    MachineEnumerator(TuringMachine tm, Alphabet target);

    void reset() override;
    Alphabet alphabet() const override { return target_; }
    std::optional<Patch> next(long long& budget) override;
    const TuringMachine& machine() const { return tm_; }

  private:
    std::optional<std::string> tape_word() const;

    TuringMachine tm_;
    Alphabet target_;
    // live machine state
    std::map<std::int64_t, int> tape_;
    std::int64_t head_ = 0;
    int state_ = 0;
    bool dead_ = false;
    std::string last_word_;
};

}  // namespace horo
