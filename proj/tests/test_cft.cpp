#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "horo/cft.hpp"

using namespace horo;

namespace {

Alphabet ab2() { return Alphabet::make({"x", "y"}); }
Alphabet ab3() { return Alphabet::make({"x", "y", "z"}); }

Patch un_pattern(const Alphabet& a, Address base, int n, const std::vector<int>& syms) {
    Patch p;
    p.alphabet = a;
    auto sup = support_un(n, base);
    REQUIRE(sup.size() == syms.size());
    for (std::size_t i = 0; i < sup.size(); ++i) {
        if (syms[i] < 0) {
            p.partial = true;
            p.cells.emplace(sup[i], Symbol::wildcard());
        } else {
            p.cells.emplace(sup[i], Symbol(syms[i]));
        }
    }
    return p;
}

Patch random_window_patch(std::mt19937_64& rng, const Window& w, const Alphabet& a) {
    Patch p;
    p.alphabet = a;
    std::uniform_int_distribution<int> sym(0, a.size() - 1);
    for (Address addr : w.cells()) p.cells.emplace(addr, Symbol(sym(rng)));
    return p;
}

// brute force: enumerate all |A|^cells colourings, report SAT iff some
// colouring passes both checks
bool brute_force_sat(const Window& w, const RuleSet& rules, const std::optional<RowConstraint>& rc,
                     const Patch* seed) {
    auto cells = w.cells();
    std::vector<int> fixed(cells.size(), -1);
    if (seed)
        for (const auto& [a, s] : seed->cells)
            if (!s.is_wildcard())
                for (std::size_t i = 0; i < cells.size(); ++i)
                    if (cells[i] == a) fixed[i] = s.index();
    std::vector<int> v(cells.size(), 0);
    int k = rules.alphabet.size();
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (fixed[i] >= 0) v[i] = fixed[i];
    while (true) {
        Patch p;
        p.alphabet = rules.alphabet;
        for (std::size_t i = 0; i < cells.size(); ++i) p.cells.emplace(cells[i], Symbol(v[i]));
        bool ok = check(p, rules).empty();
        if (ok && rc) ok = enforce_half_plane(p, *rc).empty();
        if (ok) return true;
        // odometer over non-fixed cells
        std::size_t i = 0;
        for (; i < cells.size(); ++i) {
            if (fixed[i] >= 0) continue;
            if (++v[i] < k) break;
            v[i] = 0;
        }
        if (i == cells.size()) return false;
    }
}

}  // namespace

TEST_CASE("check: empty rules, exact self-violation, appears oracle") {
    std::mt19937_64 rng(21);
    Window w = Window::make(0, 3, 0, 2);
    Patch x = random_window_patch(rng, w, ab2());

    RuleSet empty;
    empty.alphabet = ab2();
    CHECK(check(x, empty).empty());

    // a patch equal to a forbidden pattern reports exactly one violation at its base
    Patch pat = un_pattern(ab2(), {0, 0}, 2, {0, 1, 0});
    RuleSet one;
    one.alphabet = ab2();
    one.add(pat);
    CHECK(check(pat, one) == std::vector<Violation>{{0, {0, 0}}});

    // agreement with appears() called per forbidden pattern
    RuleSet rules;
    rules.alphabet = ab2();
    rules.add(un_pattern(ab2(), {0, 0}, 1, {0}));
    rules.add(un_pattern(ab2(), {0, 0}, 2, {1, -1, 0}));
    rules.add(un_pattern(ab2(), {0, 0}, 3, {0, 0, 1, -1, 1, 0, -1}));
    std::vector<Violation> expect;
    for (std::size_t r = 0; r < rules.forbidden.size(); ++r)
        for (Address g : appears(x, rules.forbidden[r])) expect.push_back({r, g});
    std::sort(expect.begin(), expect.end());
    CHECK(check(x, rules) == expect);

    Patch other;
    other.alphabet = ab3();
    CHECK_THROWS_AS(check(other, rules), std::invalid_argument);
}

TEST_CASE("check is monotone in the rule set") {
    std::mt19937_64 rng(31);
    Window w = Window::make(0, 4, 0, 2);
    Patch x = random_window_patch(rng, w, ab2());
    RuleSet small;
    small.alphabet = ab2();
    small.add(un_pattern(ab2(), {0, 0}, 2, {0, 0, 1}));
    RuleSet big = small;
    big.add(un_pattern(ab2(), {0, 0}, 1, {1}));
    auto small_v = check(x, small);
    auto big_v = check(x, big);
    for (const auto& v : small_v) CHECK(std::find(big_v.begin(), big_v.end(), v) != big_v.end());
}

TEST_CASE("enforce_half_plane: examples and pair-scan oracle") {
    Alphabet a = Alphabet::make({"~", "x"});
    RowConstraint rc{a.symbol("~"), 1};

    Patch allhp;
    allhp.alphabet = a;
    for (Address addr : Window::make(0, 3, 0, 1).cells()) allhp.cells.emplace(addr, a.symbol("~"));
    CHECK(enforce_half_plane(allhp, rc).empty());

    Patch one = allhp;
    one.cells[Address{1, 1}] = a.symbol("x");
    auto v = enforce_half_plane(one, rc);
    REQUIRE(!v.empty());
    CHECK(std::find(v.begin(), v.end(), Address{1, 1}) != v.end());

    // randomized agreement with a quantifier scan over cell pairs
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        Window w = Window::make(0, 3, 0, 2);
        Patch p = random_window_patch(rng, w, a);
        std::vector<Address> expect;
        for (const auto& [addr, s] : p.cells) {
            bool bad = false;
            if (addr.level <= rc.boundary && s != rc.halfplane) bad = true;
            if (addr.level > rc.boundary && s == rc.halfplane)
                for (const auto& [addr2, s2] : p.cells)
                    if (s2 != rc.halfplane && addr2.level <= addr.level) bad = true;
            if (bad) expect.push_back(addr);
        }
        CHECK(enforce_half_plane(p, rc) == expect);
    }
}

TEST_CASE("solve: trivial cases") {
    Alphabet a1 = Alphabet::make({"x"});
    RuleSet none;
    none.alphabet = a1;
    Window w = Window::make(0, 2, 0, 1);
    auto res = solve(w, none);
    REQUIRE(res.status == SolveStatus::solved);
    CHECK(res.patch->size() == static_cast<std::size_t>(w.cell_count()));
    for (const auto& [addr, s] : res.patch->cells) {
        (void)addr;
        CHECK(s == Symbol(0));
    }

    // forbidding every single-cell pattern over a 2-symbol alphabet: UNSAT
    RuleSet all;
    all.alphabet = ab2();
    all.add(un_pattern(ab2(), {0, 0}, 1, {0}));
    all.add(un_pattern(ab2(), {0, 0}, 1, {1}));
    CHECK(solve(w, all).status == SolveStatus::unsat);

    // budget exhaustion is a distinct verdict
    RuleSet hard;
    hard.alphabet = ab2();
    hard.add(un_pattern(ab2(), {0, 0}, 1, {0}));
    hard.add(un_pattern(ab2(), {0, 0}, 1, {1}));
    auto tight = solve(Window::make(0, 4, 0, 4), hard, std::nullopt, nullptr, 1);
    CHECK(tight.status == SolveStatus::budget);
}

TEST_CASE("solve returns the DFS-first solution and respects seeds") {
    Window w = Window::make(0, 1, 0, 2);
    RuleSet none;
    none.alphabet = ab2();
    Patch seed;
    seed.alphabet = ab2();
    seed.cells.emplace(Address{1, 3}, Symbol(1));
    auto res = solve(w, none, std::nullopt, &seed);
    REQUIRE(res.status == SolveStatus::solved);
    // everything x except the seeded cell
    for (const auto& [addr, s] : res.patch->cells) CHECK(s == (addr == Address{1, 3} ? Symbol(1) : Symbol(0)));

    Patch bad_seed;
    bad_seed.alphabet = ab2();
    bad_seed.cells.emplace(Address{9, 0}, Symbol(0));
    CHECK_THROWS_AS(solve(w, none, std::nullopt, &bad_seed), std::invalid_argument);
}

TEST_CASE("solve soundness: outputs pass check and enforce_half_plane") {
    std::mt19937_64 rng(5150);
    Alphabet a = Alphabet::make({"~", "x", "y"});
    for (int t = 0; t < 60; ++t) {
        RuleSet rules;
        rules.alphabet = a;
        std::uniform_int_distribution<int> npat(0, 3), nsize(1, 2), sym(-1, 2);
        int m = npat(rng);
        for (int i = 0; i < m; ++i) {
            int n = nsize(rng);
            std::vector<int> syms;
            for (std::size_t c = 0; c < (std::size_t{1} << n) - 1; ++c) syms.push_back(sym(rng));
            rules.add(un_pattern(a, {0, 0}, n, syms));
        }
        RowConstraint rc{a.symbol("~"), 0};
        Window w = Window::make(0, 2 + (t % 2), 0, 1 + (t % 2));
        auto res = solve(w, rules, rc, nullptr, 2'000'000);
        if (res.status == SolveStatus::solved) {
            CHECK(check(*res.patch, rules).empty());
            CHECK(enforce_half_plane(*res.patch, rc).empty());
        }
    }
}

TEST_CASE("solve agrees with exhaustive enumeration on small instances") {
    std::mt19937_64 rng(777);
    int sat = 0, unsat = 0;
    for (int t = 0; t < 80; ++t) {
        Alphabet a = (t % 2) ? ab2() : ab3();
        Window w = (t % 2) ? Window::make(0, 2, 0, 1) : Window::make(0, 1, 0, 2);
        RuleSet rules;
        rules.alphabet = a;
        std::uniform_int_distribution<int> npat(1, 4), nsize(1, 2), sym(-1, a.size() - 1);
        int m = npat(rng);
        for (int i = 0; i < m; ++i) {
            int n = nsize(rng);
            std::vector<int> syms;
            bool all_wild = true;
            for (std::size_t c = 0; c < (std::size_t{1} << n) - 1; ++c) {
                syms.push_back(sym(rng));
                if (syms.back() >= 0) all_wild = false;
            }
            if (all_wild) syms[0] = 0;
            rules.add(un_pattern(a, {0, 0}, n, syms));
        }
        std::optional<RowConstraint> rc;
        if (t % 3 == 0) rc = RowConstraint{Symbol(0), 0};
        auto res = solve(w, rules, rc);
        REQUIRE(res.status != SolveStatus::budget);
        bool expect = brute_force_sat(w, rules, rc, nullptr);
        CHECK((res.status == SolveStatus::solved) == expect);
        expect ? ++sat : ++unsat;
    }
    CHECK(sat > 5);
    CHECK(unsat > 5);
}

TEST_CASE("count_solutions exhausts the tree") {
    RuleSet none;
    none.alphabet = ab2();
    Window w = Window::make(0, 1, 0, 1);  // 3 cells, 8 colourings
    auto r = count_solutions(w, none, std::nullopt, nullptr, 100);
    CHECK(r.count == 8);
    CHECK(r.exhausted);
    auto capped = count_solutions(w, none, std::nullopt, nullptr, 3);
    CHECK(capped.count == 3);
    CHECK(!capped.exhausted);
}

TEST_CASE("limit_enumerator truncates deterministically") {
    Alphabet a = ab2();
    std::vector<Patch> pats = {un_pattern(a, {0, 0}, 1, {0}), un_pattern(a, {0, 0}, 1, {1}),
                               un_pattern(a, {0, 0}, 2, {0, 1, 0})};
    ListEnumerator e(a, pats);
    CHECK(limit_enumerator(e, 0).forbidden.empty());
    CHECK(limit_enumerator(e, 5).forbidden.size() == 3);
    CHECK(limit_enumerator(e, 2).forbidden.size() == 2);
    // replay determinism
    auto first = limit_enumerator(e, 2);
    auto second = limit_enumerator(e, 2);
    CHECK(first.forbidden == second.forbidden);
}

TEST_CASE("rule files round-trip") {
    const char* text =
        "alphabet: x y\n"
        "forbidden {\n"
        "cell: 0 0 x\n"
        "cell: 1 0 y\n"
        "cell: 1 1 *\n"
        "}\n"
        "forbidden {\n"
        "linear: 0 0 x x\n"
        "}\n";
    RuleSet rules = parse_rules(text);
    REQUIRE(rules.forbidden.size() == 2);
    CHECK(rules.forbidden[0].size() == 3);
    CHECK(rules.forbidden[1].size() == 2);
    CHECK(rules.forbidden[1].at({0, 1}) == rules.alphabet.symbol("x"));
    RuleSet back = parse_rules(serialize_rules(rules));
    CHECK(back.alphabet == rules.alphabet);
    CHECK(back.forbidden == rules.forbidden);

    CHECK_THROWS_AS(parse_rules("forbidden {\n}\n"), ParseError);
    CHECK_THROWS_AS(parse_rules("alphabet: x\nforbidden {\ncell: 0 0 x\n"), ParseError);
    CHECK_THROWS_AS(parse_rules("alphabet: x\nforbidden {\n}\n"), ParseError);
}

TEST_CASE("a horizontal pair rule is honoured at every alignment") {
    // forbid x right-adjacent to y on any row
    Alphabet a = ab2();
    RuleSet rules;
    rules.alphabet = a;
    Patch pair;
    pair.alphabet = a;
    pair.cells.emplace(Address{0, 0}, a.symbol("x"));
    pair.cells.emplace(Address{0, 1}, a.symbol("y"));
    rules.add(pair);

    // violations found at odd and even offsets alike, including 2^k boundaries
    Patch row;
    row.alphabet = a;
    for (int i = 0; i < 32; ++i) row.cells.emplace(Address{5, i}, a.symbol(i % 2 ? "y" : "x"));
    auto v = check(row, rules);
    CHECK(v.size() == 16);

    // the solver then never produces x followed by y
    auto res = solve(Window::make(0, 3, 0, 2), rules);
    REQUIRE(res.status == SolveStatus::solved);
    for (const auto& [addr, s] : res.patch->cells) {
        auto right = res.patch->at({addr.level, addr.offset + 1});
        if (right && s == a.symbol("x")) CHECK(*right != a.symbol("y"));
    }
}

TEST_CASE("parallel check returns the sequential result") {
    std::mt19937_64 rng(0x9A11);
    Alphabet a = ab2();
    Window w = Window::make(0, 6, 0, 2);
    Patch hay = random_window_patch(rng, w, a);
    RuleSet rules;
    rules.alphabet = a;
    rules.add(un_pattern(a, {0, 0}, 2, {0, 1, -1}));
    rules.add(un_pattern(a, {0, 0}, 1, {1}));
    auto seq = check(hay, rules, 1);
    CHECK(check(hay, rules, 4) == seq);
    CHECK(check(hay, rules, 128) == seq);
}

TEST_CASE("check agrees with the naive matcher on arbitrary relative supports") {
    std::mt19937_64 rng(0xD1FF);
    for (int t = 0; t < 60; ++t) {
        Alphabet a = ab2();
        Window w = Window::make(0, 4, -1, 2);
        Patch hay = random_window_patch(rng, w, a);
        RuleSet rules;
        rules.alphabet = a;
        std::uniform_int_distribution<int> npat(1, 4), ncell(1, 5), dl(0, 2), dr(-2, 2), sym(-1, 1);
        int m = npat(rng);
        for (int i = 0; i < m; ++i) {
            Patch p;
            p.alphabet = a;
            p.partial = true;
            int cells = ncell(rng);
            bool all_wild = true;
            for (int cidx = 0; cidx < cells; ++cidx) {
                Address at{dl(rng), dr(rng)};
                if (p.at(at)) continue;
                int v = sym(rng);
                if (v >= 0) all_wild = false;
                p.cells.emplace(at, v < 0 ? Symbol::wildcard() : Symbol(v));
            }
            if (all_wild) p.cells.begin()->second = Symbol(0);
            rules.add(std::move(p));
        }
        std::vector<Violation> expect;
        for (std::size_t r = 0; r < rules.forbidden.size(); ++r)
            for (Address g : appears(hay, rules.forbidden[r])) expect.push_back({r, g});
        std::sort(expect.begin(), expect.end());
        CHECK(check(hay, rules) == expect);
    }
}
