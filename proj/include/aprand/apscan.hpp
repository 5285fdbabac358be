#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "aprand/rngword.hpp"

namespace aprand {

/// Straight progressions stay inside 1..n; wrapped ones reduce positions mod n.
enum class ApMode { straight, wrapped };

std::string_view to_string(ApMode mode) noexcept;

/// Start s, difference p, and run length k of a 0,1,1,...,1 progression.
struct ApWitness {
    std::size_t s = 0;
    std::size_t p = 0;
    std::size_t k = 0;

    friend bool operator==(const ApWitness&, const ApWitness&) = default;
};

/// Maximal progression length over all (s, p). The witness is the
/// lexicographically smallest (s, p) attaining the value, present iff value >= 1.
struct ApResult {
    std::size_t value = 0;
    std::optional<ApWitness> witness;
    ApMode mode = ApMode::wrapped;

    friend bool operator==(const ApResult&, const ApResult&) = default;
};

/// ((s + i*p - 1) mod n) + 1
constexpr std::size_t pos(std::size_t s, std::size_t i, std::size_t p, std::size_t n) noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(s) - 1 + static_cast<unsigned __int128>(i) * p) % n) + 1;
}

/// Largest k <= n with xi_s = 0 and xi at pos(s, i, p, n) equal to 1 for i = 1..k; 0 if none.
std::size_t w_sp(const BinaryWord& w, std::size_t s, std::size_t p);

/// Largest k <= floor((n - s) / p) with xi_s = 0 and xi_{s+ip} = 1 for i = 1..k; 0 if none.
std::size_t u_sp(const BinaryWord& w, std::size_t s, std::size_t p);

/// W^(N) by the stride-chain scanner: per difference, one backward sweep over
/// each residue cycle computes run lengths of ones. O(n) per difference.
ApResult max_w(const BinaryWord& w);

/// U^(N) by the same scanner over straight residue chains.
ApResult max_u(const BinaryWord& w);

inline constexpr std::size_t kDefaultOracleCap = 4096;

/// Brute force over all (s, p) calling w_sp / u_sp. Throws std::invalid_argument above `cap`.
ApResult max_w_naive(const BinaryWord& w, std::size_t cap = kDefaultOracleCap);
ApResult max_u_naive(const BinaryWord& w, std::size_t cap = kDefaultOracleCap);

/// Bit-parallel scanners: for each difference, AND successive shifted copies of
/// the packed word into the zero mask until it empties. Same results and
/// tie-breaking as max_w / max_u, much faster at the sizes experiments use.
ApResult max_w_packed(const BinaryWord& w);
ApResult max_u_packed(const BinaryWord& w);

/// Number of s with xi_s = 0 followed by at least m ones along difference p.
std::size_t count_runs_at_least(const BinaryWord& w, std::size_t p, std::size_t m, ApMode mode);

/// Sum of count_runs_at_least over all differences p in [1, n].
std::size_t count_all_runs_at_least(const BinaryWord& w, std::size_t m, ApMode mode);

}  // namespace aprand
