#pragma once

// Small machines shared by the embedding tests: a free-running right mover,
// a halting machine, and a two-cell bouncer that exercises left signals.

#include "horo/turing.hpp"

namespace horo::testing {

inline TuringMachine zigzag_free() {
    TuringMachine m;
    m.states = {"q0", "q1"};
    m.tape_symbols = {"a", "b", "#"};
    m.blank = 2;
    m.delta[{0, 2}] = {1, 0, Move::R};
    m.delta[{1, 2}] = {0, 1, Move::R};
    return m;
}

inline TuringMachine halter() {
    TuringMachine m;
    m.states = {"q0", "q1", "q2", "qh"};
    m.tape_symbols = {"a", "b", "#"};
    m.blank = 2;
    m.halting = {3};
    m.delta[{0, 2}] = {1, 0, Move::R};
    m.delta[{1, 2}] = {2, 1, Move::L};
    m.delta[{2, 0}] = {3, 0, Move::S};
    return m;
}

inline TuringMachine bouncer() {
    TuringMachine m;
    m.states = {"q0", "q1"};
    m.tape_symbols = {"x", "y", "#"};
    m.blank = 2;
    m.delta[{0, 2}] = {1, 0, Move::R};
    m.delta[{0, 0}] = {1, 1, Move::R};
    m.delta[{0, 1}] = {1, 0, Move::R};
    m.delta[{1, 2}] = {0, 0, Move::L};
    m.delta[{1, 0}] = {0, 1, Move::L};
    m.delta[{1, 1}] = {0, 0, Move::L};
    return m;
}

// run rows must prefix-match the extraction; frozen tails repeat the last row
inline bool diagram_matches(const SpaceTimeDiagram& truth, const SpaceTimeDiagram& got, const TuringMachine& tm,
                            int width) {
    if (got.rows.size() < truth.rows.size()) return false;
    for (std::size_t t = 0; t < got.rows.size(); ++t) {
        const DiagramRow& want = truth.rows[std::min(t, truth.rows.size() - 1)];
        const DiagramRow& have = got.rows[t];
        if (have.head != want.head || have.state != want.state) return false;
        for (int c = 0; c < width; ++c)
            if (got.symbol_at(t, c, tm) != truth.symbol_at(std::min(t, truth.rows.size() - 1), c, tm)) return false;
    }
    return true;
}

}  // namespace horo::testing
