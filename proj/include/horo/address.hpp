#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Canonical addressing of tiles of the 2-fold horocyclic tessellation.
//
// A tile is a pair (level, offset): levels grow downward, each row holds
// twice as many tiles as the row above it. The generator moves are
//   b : (l, n) -> (l, n+1)        (right neighbour)
//   a : (l, n) -> (l+1, 2n)       (bottom-left child)
// so the bottom-right child a·b of (l, n) is (l+1, 2n+1). Rising above
// level 0 requires an explicit alignment choice per row (ChoiceSequence);
// words that rise beyond the provided choices do not denote a tile.

namespace horo {

enum class Gen : std::uint8_t { A, AInv, B, BInv };

using Word = std::vector<Gen>;

// Words read from strings over {a, A, b, B}: a=alpha, A=alpha^-1,
// b=beta, B=beta^-1. Throws std::invalid_argument on anything else.
Word parse_word(std::string_view text);
std::string word_to_string(const Word& w);

// Formal inverse: reversed word with every generator inverted.
Word inverse_word(const Word& w);

struct Address {
    std::int64_t level = 0;
    std::int64_t offset = 0;

    friend constexpr bool operator==(Address, Address) = default;
    friend constexpr auto operator<=>(Address a, Address b) {
        if (auto c = a.level <=> b.level; c != 0) return c;
        return a.offset <=> b.offset;
    }
};

std::string to_string(Address a);  // "(level,offset)"

// Alignment bits for rows above level 0: bit(1) aligns row -1 against
// row 0, bit(2) aligns row -2 against row -1, and so on. The default
// (empty) sequence makes every rise above level 0 invalid.
struct ChoiceSequence {
    std::vector<std::uint8_t> bits;

    ChoiceSequence() = default;
    explicit ChoiceSequence(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
    static ChoiceSequence zeros(std::size_t n) { return ChoiceSequence(std::vector<std::uint8_t>(n, 0)); }

    // bit for target row -i (i >= 1); nullopt when the row is not covered.
    std::optional<int> bit(std::int64_t i) const {
        if (i < 1 || static_cast<std::size_t>(i) > bits.size()) return std::nullopt;
        return bits[static_cast<std::size_t>(i - 1)] ? 1 : 0;
    }
};

// Single-generator move; nullopt when the move exits the tessellation.
// Throws std::overflow_error if the offset leaves the 64-bit range.
std::optional<Address> apply_move(Address a, Gen g, const ChoiceSequence& choices = {});

// Fold of apply_move over the word, left to right.
std::optional<Address> normalize(const Word& w, Address base = {}, const ChoiceSequence& choices = {});

// Duplicate-free, (level, offset)-sorted.
using AddressSet = std::vector<Address>;

// U_n: the n-row triangle below `base`; row p holds 2^p tiles. |U_n| = 2^n - 1.
AddressSet support_un(int n, Address base = {});

// L_n: the full row n+1 levels below `base` within its subtree. |L_n| = 2^(n+1).
AddressSet support_ln(int n, Address base = {});

// A word w with normalize(w, origin, choices) == a. Canonical form: climbs
// with A when level < 0, descends with a, then adjusts with b/B. Throws
// std::domain_error when the address is unreachable under `choices`.
Word address_to_word(Address a, const ChoiceSequence& choices = {});

}  // namespace horo
