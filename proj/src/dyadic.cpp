#include "horo/dyadic.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace horo {

namespace {

Symbol undet_symbol(const Alphabet& extended) { return Symbol(*extended.undetermined); }

UnShape require_un(const Patch& p, int min_n) {
    auto shape = un_shape(p);
    if (!shape) throw std::invalid_argument("pattern support is not a U_n");
    if (shape->n < min_n) throw std::invalid_argument("pattern size must be >= " + std::to_string(min_n));
    return *shape;
}

}  // namespace

DyadicPatch phi(const Patch& x, const Window& w) {
    DyadicPatch dp;
    dp.window = w;
    dp.first = x;
    dp.second.alphabet = x.alphabet.with_undetermined();
    Symbol undet = undet_symbol(dp.second.alphabet);
    for (std::int64_t l = w.top; l <= w.bottom; ++l) {
        for (std::int64_t o = w.row_left(l); o < w.row_right(l); ++o) {
            Address here{l, o};
            if (!x.at(here)) throw std::invalid_argument("phi: input not total on the window at " + to_string(here));
            Symbol v = undet;
            Address parent{l - 1, o >> 1};
            if (w.contains(parent)) {
                if ((o & 1) == 0) {
                    v = *x.at(parent);
                } else {
                    v = *dp.second.at(parent);
                }
            }
            dp.second.cells.emplace(here, v);
        }
    }
    return dp;
}

std::optional<Symbol> pi2_value(const Patch& x, Address a) {
    Address cur = a;
    while (true) {
        Address parent{cur.level - 1, cur.offset >> 1};
        if (!x.at(parent)) return std::nullopt;
        if ((cur.offset & 1) == 0) return x.at(parent);
        cur = parent;
    }
}

std::int64_t transport_offset(int n, int k, int r, std::int64_t j) {
    int kappa = n + k - r - 1;
    return (j << (kappa + 1)) + ((std::int64_t{1} << kappa) - 1);
}

LinearPattern tilde_k(const Patch& p, int k) {
    if (k < 1) throw std::invalid_argument("tilde_k: k must be >= 1");
    UnShape shape = require_un(p, 1);
    int n = shape.n;
    if (n + k > 40) throw std::invalid_argument("tilde_k: row width would overflow desk scale");
    LinearPattern lp;
    lp.level = shape.base.level + n + k;
    lp.start = shape.base.offset << (n + k);
    lp.symbols.assign(std::size_t{1} << (n + k), Symbol::wildcard());
    for (const auto& [a, s] : p.cells) {
        int r = static_cast<int>(a.level - shape.base.level);
        std::int64_t j = a.offset - (shape.base.offset << r);
        lp.symbols[static_cast<std::size_t>(transport_offset(n, k, r, j))] = s;
    }
    return lp;
}

LinearPattern tilde(const Patch& p) { return tilde_k(p, 1); }

Patch reconstruct(const LinearPattern& lp, int n, const Alphabet& alphabet) {
    if (n < 1) throw std::invalid_argument("reconstruct: n must be >= 1");
    std::int64_t want = std::int64_t{1} << (n + 1);
    if (lp.length() != want)
        throw std::invalid_argument("reconstruct: expected length " + std::to_string(want) + ", got " +
                                    std::to_string(lp.length()));
    if ((lp.start >> (n + 1)) << (n + 1) != lp.start)
        throw std::invalid_argument("reconstruct: start offset not aligned to the pattern frame");
    Patch p;
    p.alphabet = alphabet;
    Address base{lp.level - n - 1, lp.start >> (n + 1)};
    for (int r = 0; r < n; ++r) {
        for (std::int64_t j = 0; j < (std::int64_t{1} << r); ++j) {
            Symbol s = lp.symbols[static_cast<std::size_t>(transport_offset(n, 1, r, j))];
            if (s.is_wildcard())
                throw std::invalid_argument("reconstruct: wildcard at transport offset " +
                                            std::to_string(transport_offset(n, 1, r, j)));
            p.cells.emplace(Address{base.level + r, (base.offset << r) + j}, s);
        }
    }
    return p;
}

std::vector<LinearPattern> split_pattern(const Patch& p, int kmax) {
    if (kmax < 1) throw std::invalid_argument("split: kmax must be >= 1");
    std::vector<LinearPattern> out;
    out.reserve(static_cast<std::size_t>(kmax));
    for (int k = 1; k <= kmax; ++k) out.push_back(tilde_k(p, k));
    return out;
}

Patch product_patch(const DyadicPatch& dp) {
    const Alphabet& a = dp.first.alphabet;
    const Alphabet& ext = dp.second.alphabet;
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(a.size()) * static_cast<std::size_t>(ext.size()));
    for (const auto& s : a.names)
        for (const auto& t : ext.names) names.push_back(s + "|" + t);
    Patch out;
    out.alphabet = Alphabet::make(std::move(names));
    for (const auto& [addr, s] : dp.first.cells) {
        Symbol t = *dp.second.at(addr);
        out.cells.emplace(addr, Symbol(s.index() * ext.size() + t.index()));
    }
    return out;
}

Patch project_track(const Patch& product, int track) {
    if (track != 1 && track != 2) throw std::invalid_argument("track must be 1 or 2");
    std::set<std::string> names_seen;
    std::vector<std::string> first_names, second_names;
    for (const auto& n : product.alphabet.names) {
        auto bar = n.find('|');
        if (bar == std::string::npos) throw std::invalid_argument("not a product alphabet");
        std::string f = n.substr(0, bar), s = n.substr(bar + 1);
        if (std::find(first_names.begin(), first_names.end(), f) == first_names.end()) first_names.push_back(f);
        if (std::find(second_names.begin(), second_names.end(), s) == second_names.end()) second_names.push_back(s);
    }
    Patch out;
    out.alphabet = Alphabet::make(track == 1 ? first_names : second_names);
    for (const auto& [addr, s] : product.cells) {
        const std::string& tok = product.alphabet.name(s);
        auto bar = tok.find('|');
        std::string part = track == 1 ? tok.substr(0, bar) : tok.substr(bar + 1);
        out.cells.emplace(addr, out.alphabet.symbol(part));
    }
    return out;
}

RuleSet lifted_local_rules(const Alphabet& a) {
    Alphabet ext = a.with_undetermined();
    std::vector<std::string> names;
    for (const auto& s : a.names)
        for (const auto& t : ext.names) names.push_back(s + "|" + t);
    RuleSet rules;
    rules.alphabet = Alphabet::make(names);
    auto idx = [&](int s, int t) { return Symbol(s * ext.size() + t); };
    // left child's second track must copy the parent's first track
    for (int ps = 0; ps < a.size(); ++ps)
        for (int pt = 0; pt < ext.size(); ++pt)
            for (int cs = 0; cs < a.size(); ++cs)
                for (int ct = 0; ct < ext.size(); ++ct) {
                    if (ct == ps) continue;
                    Patch bad;
                    bad.alphabet = rules.alphabet;
                    bad.partial = true;
                    bad.cells.emplace(Address{0, 0}, idx(ps, pt));
                    bad.cells.emplace(Address{1, 0}, idx(cs, ct));
                    bad.cells.emplace(Address{1, 1}, Symbol::wildcard());
                    rules.add(std::move(bad));
                }
    // right child's second track must copy the parent's second track
    for (int ps = 0; ps < a.size(); ++ps)
        for (int pt = 0; pt < ext.size(); ++pt)
            for (int cs = 0; cs < a.size(); ++cs)
                for (int ct = 0; ct < ext.size(); ++ct) {
                    if (ct == pt) continue;
                    Patch bad;
                    bad.alphabet = rules.alphabet;
                    bad.partial = true;
                    bad.cells.emplace(Address{0, 0}, idx(ps, pt));
                    bad.cells.emplace(Address{1, 0}, Symbol::wildcard());
                    bad.cells.emplace(Address{1, 1}, idx(cs, ct));
                    rules.add(std::move(bad));
                }
    return rules;
}

namespace {

Alphabet binary_alphabet() { return Alphabet::make({"0", "1"}); }

Patch nth_binary_pattern(const Alphabet& a, int n, std::uint64_t bits) {
    Patch p;
    p.alphabet = a;
    auto sup = support_un(n, {0, 0});
    for (std::size_t i = 0; i < sup.size(); ++i) p.cells.emplace(sup[i], Symbol((bits >> i) & 1));
    return p;
}

Patch random_window(std::mt19937_64& rng, const Alphabet& a, const Window& w) {
    Patch x;
    x.alphabet = a;
    std::uniform_int_distribution<int> sym(0, a.size() - 1);
    for (Address addr : w.cells()) x.cells.emplace(addr, Symbol(sym(rng)));
    return x;
}

// determined cells of lp match dp.second on lp's own row at lp.start
bool linear_matches_at(const DyadicPatch& dp, const LinearPattern& lp) {
    for (std::int64_t i = 0; i < lp.length(); ++i) {
        Symbol want = lp.symbols[static_cast<std::size_t>(i)];
        if (want.is_wildcard()) continue;
        auto got = dp.second.at(Address{lp.level, lp.start + i});
        if (!got || got->index() != want.index()) return false;
    }
    return true;
}

}  // namespace

PropReport verify_prop(int prop, int n, long trials, std::uint64_t rng_seed) {
    if (prop < 1 || prop > 3) throw std::invalid_argument("prop must be 1, 2 or 3");
    if (n < 1 || n > 6) throw std::invalid_argument("verify_prop: n must be in 1..6 (desk scale)");
    PropReport rep;
    rep.prop = prop;
    std::mt19937_64 rng(rng_seed);
    Alphabet a = binary_alphabet();
    std::uint64_t cellcount = (std::uint64_t{1} << n) - 1;

    auto each_pattern = [&](auto&& f) {
        if (cellcount <= 10) {
            for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cellcount); ++bits)
                f(nth_binary_pattern(a, n, bits));
        } else {
            std::uniform_int_distribution<std::uint64_t> d;
            for (long t = 0; t < std::max(trials, 1L); ++t)
                f(nth_binary_pattern(a, n, d(rng) & ((std::uint64_t{1} << cellcount) - 1)));
        }
    };

    if (prop == 1) {
        std::set<std::string> images;
        long long total = 0;
        each_pattern([&](const Patch& p) {
            ++rep.checks;
            ++total;
            LinearPattern lp = tilde(p);
            long long determined = std::count_if(lp.symbols.begin(), lp.symbols.end(),
                                                 [](Symbol s) { return !s.is_wildcard(); });
            if (determined != static_cast<long long>(cellcount)) {
                ++rep.failures;
                rep.lines.push_back("tilde determined-cell count mismatch");
                return;
            }
            if (reconstruct(lp, n, a) != p) {
                ++rep.failures;
                rep.lines.push_back("reconstruct(tilde(p)) != p");
            }
            std::string key;
            for (Symbol s : lp.symbols) key += s.is_wildcard() ? '*' : char('0' + s.index());
            images.insert(key);
        });
        if (cellcount <= 10 && static_cast<long long>(images.size()) != total) {
            ++rep.failures;
            rep.lines.push_back("tilde is not injective");
        }
        // appearance equivalence on random windows
        Window w = Window::make(0, n + 2, 0, 2);
        for (long t = 0; t < trials; ++t) {
            Patch x = random_window(rng, a, w);
            DyadicPatch dp = phi(x, w);
            std::uniform_int_distribution<std::uint64_t> d;
            Patch p = nth_binary_pattern(a, n, d(rng) & ((std::uint64_t{1} << cellcount) - 1));
            LinearPattern plt = tilde(p);
            for (std::int64_t gl = 0; gl <= w.bottom - n - 1; ++gl) {
                for (std::int64_t go = w.row_left(gl); go < w.row_right(gl); ++go) {
                    ++rep.checks;
                    bool occurs = true;
                    auto sup = support_un(n, {gl, go});
                    auto psup = support_un(n, {0, 0});
                    for (std::size_t i = 0; i < sup.size(); ++i)
                        if (*x.at(sup[i]) != *p.at(psup[i])) occurs = false;
                    LinearPattern placed = plt;
                    placed.level = gl + n + 1;
                    placed.start = go << (n + 1);
                    bool matches = linear_matches_at(dp, placed);
                    if (occurs != matches) {
                        ++rep.failures;
                        rep.lines.push_back("appearance equivalence failed at " + to_string({gl, go}));
                    }
                }
            }
        }
    } else if (prop == 2) {
        const int kmax = 4;
        Window w = Window::make(0, n + kmax, -1, 2);
        for (long t = 0; t < std::max(trials, 1L); ++t) {
            Patch x = random_window(rng, a, w);
            std::uniform_int_distribution<std::uint64_t> d;
            Patch p = nth_binary_pattern(a, n, d(rng) & ((std::uint64_t{1} << cellcount) - 1));
            for (const auto& [addr, s] : p.cells) x.cells[addr] = s;
            DyadicPatch dp = phi(x, w);
            for (int k = 1; k <= kmax; ++k) {
                LinearPattern lp = tilde_k(p, k);
                ++rep.checks;
                if (!linear_matches_at(dp, lp)) {
                    ++rep.failures;
                    rep.lines.push_back("recursion-derived transport failed at k=" + std::to_string(k));
                }
            }
            // alternative closed form: row n+k, relative offset 2^i + 2^k - 1
            LinearPattern base_lt = tilde(p);
            for (int k = 1; k <= kmax; ++k) {
                for (int i = 0; i < n + 2; ++i) {
                    std::int64_t rel = (std::int64_t{1} << i) + (std::int64_t{1} << k) - 1;
                    Address pos{n + k, rel};
                    if (!w.contains(pos)) continue;
                    if (static_cast<std::size_t>(i) >= base_lt.symbols.size()) continue;
                    Symbol want = base_lt.symbols[static_cast<std::size_t>(i)];
                    if (want.is_wildcard()) continue;
                    auto got = dp.second.at(pos);
                    ++rep.literal_checks;
                    if (!got || got->index() != want.index()) ++rep.literal_failures;
                }
            }
        }
        rep.lines.push_back("alternative offset formula 2^i+2^k-1: " + std::to_string(rep.literal_failures) + "/" +
                            std::to_string(rep.literal_checks) + " disagreements (informational)");
    } else {
        const int depth = std::min(8, n + 4);
        Window w = Window::make(0, depth, 0, 2);
        for (long t = 0; t < std::max(trials, 1L); ++t) {
            Patch x = random_window(rng, a, w);
            std::uniform_int_distribution<std::uint64_t> d;
            Patch p = nth_binary_pattern(a, n, d(rng) & ((std::uint64_t{1} << cellcount) - 1));
            DyadicPatch dp = phi(x, w);
            auto members = split_pattern(p, depth - n);
            for (std::int64_t gl = 0; gl + n + 1 <= depth; ++gl) {
                for (std::int64_t go = w.row_left(gl); go < w.row_right(gl); ++go) {
                    ++rep.checks;
                    bool occurs = true;
                    auto sup = support_un(n, {gl, go});
                    auto psup = support_un(n, {0, 0});
                    for (std::size_t i = 0; i < sup.size(); ++i)
                        if (*x.at(sup[i]) != *p.at(psup[i])) occurs = false;
                    bool any = false;
                    for (int k = 1; gl + n + k <= depth; ++k) {
                        LinearPattern placed = members[static_cast<std::size_t>(k - 1)];
                        placed.level = gl + n + k;
                        placed.start = go << (n + k);
                        if (linear_matches_at(dp, placed)) {
                            any = true;
                            break;
                        }
                    }
                    if (occurs != any) {
                        ++rep.failures;
                        rep.lines.push_back("split appearance equivalence failed at " + to_string({gl, go}));
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace horo
