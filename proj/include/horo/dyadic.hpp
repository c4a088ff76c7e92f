#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "horo/cft.hpp"
#include "horo/pattern.hpp"

// The dyadic encoding: a second track that copies every cell's value to its
// left child and then propagates it down-right forever, so each row carries
// all the information of the rows above it. tilde/split extract the partial
// row patterns that transport a U_n pattern, reconstruct inverts them.

namespace horo {

struct DyadicPatch {
    Window window;
    Patch first;   // the input, over A
    Patch second;  // over A extended with "?" (undetermined)

    friend bool operator==(const DyadicPatch&, const DyadicPatch&) = default;
};

// Second track by the local rule: even offsets read the parent's first track,
// odd offsets the parent's second track; cells whose recursion leaves the
// window become "?". `x` must be total on `w`.
DyadicPatch phi(const Patch& x, const Window& w);

// Single-cell second-track evaluation on x's own domain; nullopt is "?".
// Agrees with phi() when x is total on the window.
std::optional<Symbol> pi2_value(const Patch& x, Address a);

// The partial linear pattern on the row n+k below p's base (k >= 1) whose
// determined positions carry exactly p's cells under the encoding; tilde is
// the k = 1 case on L_n. p must be U_n-shaped, n >= 1.
LinearPattern tilde_k(const Patch& p, int k);
LinearPattern tilde(const Patch& p);

// The unique U_n pattern compatible with lp; lp must have length 2^(n+1),
// start aligned to it, and no wildcard at a transport offset.
Patch reconstruct(const LinearPattern& lp, int n, const Alphabet& alphabet);

// Finite truncation of split(p): tilde_k(p, 1..kmax).
std::vector<LinearPattern> split_pattern(const Patch& p, int kmax);

// Transport offset of p-cell (row r, column j) within tilde_k's row
// (relative to the row's dyadic frame below p's base).
std::int64_t transport_offset(int n, int k, int r, std::int64_t j);

// Both tracks as one patch over the product alphabet ("s|t" tokens).
Patch product_patch(const DyadicPatch& dp);
Patch project_track(const Patch& product, int track);

// The encoding's own local rule as forbidden U_2 patterns over the product
// alphabet of A: left child's second track must equal the parent's first,
// right child's second track must equal the parent's second.
RuleSet lifted_local_rules(const Alphabet& a);

struct PropReport {
    int prop = 0;
    long long checks = 0;
    long long failures = 0;
    // the alternative closed-form offset formula 2^i + 2^k - 1,
    // reported but not gating
    long long literal_checks = 0;
    long long literal_failures = 0;
    std::vector<std::string> lines;

    bool ok() const { return failures == 0; }
};

// Brute-force verification of the three transport propositions at desk scale
// (n <= 6). Counterexamples are listed in `lines`.
PropReport verify_prop(int prop, int n, long trials, std::uint64_t rng_seed);

}  // namespace horo
