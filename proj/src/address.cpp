#include "horo/address.hpp"

#include <stdexcept>

namespace horo {

namespace {

std::int64_t checked_double(std::int64_t v) {
    std::int64_t r;
    if (__builtin_mul_overflow(v, std::int64_t{2}, &r)) throw std::overflow_error("address offset overflow");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("address offset overflow");
    return r;
}

std::int64_t floor_div2(std::int64_t v) {
    // arithmetic shift: floor division by 2 for negatives as well
    return v >> 1;
}

// base.offset * 2^p + q, checked
std::int64_t scaled_offset(std::int64_t base, int p, std::int64_t q) {
    if (p >= 62) throw std::overflow_error("support depth too large for 64-bit offsets");
    std::int64_t r = base;
    for (int i = 0; i < p; ++i) r = checked_double(r);
    return checked_add(r, q);
}

}  // namespace

Word parse_word(std::string_view text) {
    Word w;
    w.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case 'a': w.push_back(Gen::A); break;
            case 'A': w.push_back(Gen::AInv); break;
            case 'b': w.push_back(Gen::B); break;
            case 'B': w.push_back(Gen::BInv); break;
            default: throw std::invalid_argument(std::string("bad generator '") + c + "' (expected a, A, b or B)");
        }
    }
    return w;
}

std::string word_to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Gen g : w) {
        switch (g) {
            case Gen::A: s += 'a'; break;
            case Gen::AInv: s += 'A'; break;
            case Gen::B: s += 'b'; break;
            case Gen::BInv: s += 'B'; break;
        }
    }
    return s;
}

Word inverse_word(const Word& w) {
    Word r;
    r.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        switch (*it) {
            case Gen::A: r.push_back(Gen::AInv); break;
            case Gen::AInv: r.push_back(Gen::A); break;
            case Gen::B: r.push_back(Gen::BInv); break;
            case Gen::BInv: r.push_back(Gen::B); break;
        }
    }
    return r;
}

std::string to_string(Address a) {
    return "(" + std::to_string(a.level) + "," + std::to_string(a.offset) + ")";
}

std::optional<Address> apply_move(Address a, Gen g, const ChoiceSequence& choices) {
    switch (g) {
        case Gen::B:
            return Address{a.level, checked_add(a.offset, 1)};
        case Gen::BInv:
            return Address{a.level, checked_add(a.offset, -1)};
        case Gen::A: {
            std::int64_t off = checked_double(a.offset);
            if (a.level < 0) {
                // rows above level 0 are aligned by the choice bits
                auto c = choices.bit(-a.level);
                if (!c) return std::nullopt;
                off = checked_add(off, *c);
            }
            return Address{a.level + 1, off};
        }
        case Gen::AInv: {
            std::int64_t target = a.level - 1;
            if (target >= 0) return Address{target, floor_div2(a.offset)};
            auto c = choices.bit(-target);
            if (!c) return std::nullopt;
            return Address{target, floor_div2(checked_add(a.offset, -*c))};
        }
    }
    return std::nullopt;
}

std::optional<Address> normalize(const Word& w, Address base, const ChoiceSequence& choices) {
    Address cur = base;
    for (Gen g : w) {
        auto next = apply_move(cur, g, choices);
        if (!next) return std::nullopt;
        cur = *next;
    }
    return cur;
}

AddressSet support_un(int n, Address base) {
    if (n < 0) throw std::invalid_argument("support_un: n must be >= 0");
    AddressSet out;
    if (n == 0) return out;
    out.reserve((std::size_t{1} << n) - 1);
    for (int p = 0; p < n; ++p) {
        std::int64_t row = base.level + p;
        std::int64_t width = std::int64_t{1} << p;
        std::int64_t start = scaled_offset(base.offset, p, 0);
        for (std::int64_t q = 0; q < width; ++q) out.push_back(Address{row, checked_add(start, q)});
    }
    return out;
}

AddressSet support_ln(int n, Address base) {
    if (n < 0) throw std::invalid_argument("support_ln: n must be >= 0");
    AddressSet out;
    std::int64_t row = base.level + n + 1;
    std::int64_t width = std::int64_t{1} << (n + 1);
    std::int64_t start = scaled_offset(base.offset, n + 1, 0);
    out.reserve(static_cast<std::size_t>(width));
    for (std::int64_t q = 0; q < width; ++q) out.push_back(Address{row, checked_add(start, q)});
    return out;
}

Word address_to_word(Address a, const ChoiceSequence& choices) {
    Word w;
    Address cur{0, 0};
    if (a.level >= 0) {
        for (std::int64_t i = 0; i < a.level; ++i) {
            w.push_back(Gen::A);
            cur = *apply_move(cur, Gen::A, choices);
        }
    } else {
        for (std::int64_t i = 0; i < -a.level; ++i) {
            auto next = apply_move(cur, Gen::AInv, choices);
            if (!next) throw std::domain_error("address " + to_string(a) + " unreachable under the given choices");
            w.push_back(Gen::AInv);
            cur = *next;
        }
    }
    std::int64_t d = a.offset - cur.offset;
    Gen step = d >= 0 ? Gen::B : Gen::BInv;
    for (std::int64_t i = 0; i < (d >= 0 ? d : -d); ++i) w.push_back(step);
    return w;
}

}  // namespace horo
