#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "horo/pattern.hpp"

// Sets of colourings given by forbidden patterns: finite-type checking, the
// half-plane (row-constrained) rule, a bounded exhaustive solver, and the
// enumerator interface behind effective sets.

namespace horo {

struct RuleSet {
    Alphabet alphabet;
    std::vector<Patch> forbidden;

    // deepest pattern, in rows
    int max_depth() const;
    void add(Patch p);  // validates alphabet compatibility and non-emptiness
};

struct Violation {
    std::size_t rule;
    Address base;

    friend bool operator==(const Violation&, const Violation&) = default;
    friend auto operator<=>(const Violation& a, const Violation& b) {
        if (auto c = a.rule <=> b.rule; c != 0) return c;
        return a.base <=> b.base;
    }
};

// Every occurrence of every forbidden pattern lying fully inside the patch,
// ordered by (rule, base). Throws std::invalid_argument on alphabet mismatch.
// jobs > 1 scans cell ranges on worker threads; the merged, sorted result is
// identical either way.
std::vector<Violation> check(const Patch& patch, const RuleSet& rules, int jobs = 1);

struct RowConstraint {
    Symbol halfplane;
    std::int64_t boundary;  // lowest row entirely filled by the half-plane symbol
};

// Half-plane closure violations: any determined cell at level <= boundary not
// carrying the half-plane symbol (reported at that cell), and any half-plane
// cell strictly below the boundary with a determined non-half-plane cell at
// its own level or above (reported at the half-plane cell). Sorted, unique.
std::vector<Address> enforce_half_plane(const Patch& patch, const RowConstraint& rc);

enum class SolveStatus { solved, unsat, budget };

struct SolveResult {
    SolveStatus status;
    std::optional<Patch> patch;
    long long nodes = 0;
};

inline constexpr long long kDefaultNodeBudget = 50'000'000;

// Total colouring of the window extending `seed` with no forbidden occurrence
// and no half-plane violation, found by DFS over cells in (level, offset)
// order trying symbols in alphabet order; the first solution is therefore
// deterministic. Budget exhaustion is reported distinctly from UNSAT.
SolveResult solve(const Window& window, const RuleSet& rules,
                  const std::optional<RowConstraint>& rc = std::nullopt, const Patch* seed = nullptr,
                  long long node_budget = kDefaultNodeBudget);

struct CountResult {
    long long count = 0;
    bool exhausted = false;  // search tree fully explored (count < limit and budget not hit)
    long long nodes = 0;
};

// Counts solutions up to `limit`, exhausting the search tree.
CountResult count_solutions(const Window& window, const RuleSet& rules,
                            const std::optional<RowConstraint>& rc = std::nullopt, const Patch* seed = nullptr,
                            long long limit = 2, long long node_budget = kDefaultNodeBudget);

// Pull-based stream of forbidden patterns. Deterministic replay: after
// reset(), the same prefix is produced again.
class Enumerator {
  public:
    virtual ~Enumerator() = default;
    virtual void reset() = 0;
    virtual Alphabet alphabet() const = 0;
    // Yields the next pattern, consuming budget (one unit per pattern for
    // list-backed enumerators, machine steps for machine-backed ones).
    // nullopt when exhausted or when the budget ran out.
    virtual std::optional<Patch> next(long long& budget) = 0;
};

class ListEnumerator final : public Enumerator {
  public:
    ListEnumerator(Alphabet a, std::vector<Patch> patterns)
        : alphabet_(std::move(a)), patterns_(std::move(patterns)) {}

    void reset() override { pos_ = 0; }
    Alphabet alphabet() const override { return alphabet_; }
    std::optional<Patch> next(long long& budget) override {
        if (pos_ >= patterns_.size() || budget < 1) return std::nullopt;
        budget -= 1;
        return patterns_[pos_++];
    }

  private:
    Alphabet alphabet_;
    std::vector<Patch> patterns_;
    std::size_t pos_ = 0;
};

// Finite truncation of an effective set: the patterns the enumerator yields
// within `budget`, as a RuleSet. Resets the enumerator first.
RuleSet limit_enumerator(Enumerator& e, long long budget);

// Rule files: one alphabet header, then `forbidden { ... }` blocks of cell:
// (and linear:) lines at pattern-relative coordinates.
RuleSet parse_rules(std::string_view text);
std::string serialize_rules(const RuleSet& rules);

}  // namespace horo
